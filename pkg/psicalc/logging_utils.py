#!/usr/bin/env python3
"""
Logging Utilities for psicalc
structlog setup (stderr only, stdout stays reserved for JSON results) and
smart Unicode symbols with an ASCII fallback for report rendering.
"""

import logging
import os
import sys
from datetime import datetime
from typing import Any, Dict, Optional, TextIO

import structlog
from structlog._config import BoundLoggerLazyProxy
from structlog.dev import ConsoleRenderer


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


def local_timestamper(logger: Any, method_name: str, event_dict: Dict[str, Any]) -> Dict[str, Any]:
    """Stamp events with LOCAL wall-clock time, HH:MM:SS"""
    event_dict["timestamp"] = datetime.now().strftime("%H:%M:%S")
    return event_dict


def configure_logging(
    debug: bool = False,
    verbose: bool = False,
    json_logs: Optional[bool] = None,
    stream: Optional[TextIO] = None,
) -> None:
    """
    Configure structlog for the whole process.

    Args:
        debug: Emit DEBUG events (also enabled by PSICALC_DEBUG=1)
        verbose: Emit INFO events
        json_logs: Render events as JSON lines (default from PSICALC_LOG_JSON)
        stream: Destination, defaults to stderr
    """
    if debug or _env_flag("PSICALC_DEBUG"):
        level = logging.DEBUG
    elif verbose:
        level = logging.INFO
    else:
        level = logging.WARNING

    if json_logs is None:
        json_logs = _env_flag("PSICALC_LOG_JSON")

    renderer = (
        structlog.processors.JSONRenderer(sort_keys=True)
        if json_logs
        else ConsoleRenderer(colors=symbols.unicode_supported)
    )

    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            local_timestamper,
            renderer,
        ],
        logger_factory=structlog.PrintLoggerFactory(file=stream or sys.stderr),
        wrapper_class=structlog.make_filtering_bound_logger(level),
        # loggers are module globals; reconfiguring must reach them
        cache_logger_on_first_use=False,
    )


def get_logger(name: str) -> Any:
    """Module logger carrying its short module name"""
    # "logger" clashes with wrap_logger's first parameter, so pass it as a dict
    return BoundLoggerLazyProxy(
        None, initial_values={"logger": name.rsplit(".", 1)[-1]}, logger_factory_args=()
    )


# ============================================================================
# SMART SYMBOLS
# ============================================================================


class SmartSymbols:
    """Unicode report symbols with automatic ASCII fallback"""

    def __init__(self):
        self.unicode_supported = self._test_unicode_support()
        if self.unicode_supported:
            self._use_unicode_symbols()
        else:
            self._use_ascii_symbols()

    @property
    def symbol_type(self) -> str:
        return "Unicode" if self.unicode_supported else "ASCII"

    def _test_unicode_support(self) -> bool:
        if os.environ.get("PSICALC_FORCE_UNICODE") == "1":
            return True
        if os.environ.get("PSICALC_FORCE_ASCII") == "1":
            return False
        try:
            encoding = getattr(sys.stderr, "encoding", None) or "utf-8"
            "✔ ✖ ◦ ξ σ δ τ →".encode(encoding)
            return True
        except (UnicodeEncodeError, UnicodeDecodeError, LookupError, AttributeError):
            return False

    def _use_unicode_symbols(self):
        self.PASS = "✔"
        self.FAIL = "✖"
        self.OPTIONAL = "◦"
        self.ARROW = "→"
        self.XI = "ξ"
        self.SIGMA = "σ"
        self.DELTA = "δ"
        self.TAU = "τ"

    def _use_ascii_symbols(self):
        self.PASS = "+"
        self.FAIL = "X"
        self.OPTIONAL = "-"
        self.ARROW = "->"
        self.XI = "xi"
        self.SIGMA = "sigma"
        self.DELTA = "delta"
        self.TAU = "tau"

    def status(self, passed: bool, required: bool = True) -> str:
        if passed:
            return self.PASS
        return self.FAIL if required else self.OPTIONAL


# Global instance for easy access
symbols = SmartSymbols()

if not structlog.is_configured():
    configure_logging()

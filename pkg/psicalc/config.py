#!/usr/bin/env python3
"""
Configuration Management for psicalc
Engine defaults (truncation floors, checker depth) and output preferences,
persisted as JSON in the per-user config directory.
"""

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .logging_utils import get_logger

log = get_logger(__name__)

CONFIG_ENV_VAR = "PSICALC_CONFIG"


@dataclass
class EngineConfig:
    """Defaults for symbol arithmetic and the hypothesis checker"""

    default_floors: List[int] = field(default_factory=lambda: [-8, -8])
    degree_bound: int = 4
    random_seed: int = 20240101

    def __post_init__(self):
        if isinstance(self.default_floors, int):
            self.default_floors = [self.default_floors, self.default_floors]
        if len(self.default_floors) != 2:
            raise ValueError("default_floors needs one floor per axis")
        if self.degree_bound < 0:
            raise ValueError("degree_bound must be non-negative")

    @property
    def floors(self) -> Tuple[int, int]:
        return tuple(self.default_floors)


@dataclass
class OutputConfig:
    """How results are written"""

    json_indent: Optional[int] = None
    pretty: bool = False
    sort_keys: bool = True


@dataclass
class PsicalcConfig:
    """Complete configuration for psicalc"""

    engine: EngineConfig = None
    output: OutputConfig = None

    def __post_init__(self):
        if self.engine is None:
            self.engine = EngineConfig()
        if self.output is None:
            self.output = OutputConfig()

    def to_dict(self) -> Dict[str, Any]:
        return {"engine": asdict(self.engine), "output": asdict(self.output)}


STARTER_CONFIG = {
    "_comment": "psicalc settings; CLI flags and context-file default_floors take precedence",
    **PsicalcConfig().to_dict(),
}


class ConfigManager:
    """Manages configuration loading, saving, and validation"""

    def __init__(self, config_dir: Optional[Path] = None, config_file: Optional[Path] = None):
        """Initialize configuration manager

        Args:
            config_dir: Custom configuration directory, defaults to user config dir
            config_file: Explicit config file; overrides config_dir and PSICALC_CONFIG
        """
        if config_file is None and os.environ.get(CONFIG_ENV_VAR):
            config_file = Path(os.environ[CONFIG_ENV_VAR])
        if config_file is not None:
            self.config_file = Path(config_file)
            self.config_dir = self.config_file.parent
        else:
            self.config_dir = Path(config_dir) if config_dir else self._get_default_config_dir()
            self.config_file = self.config_dir / "config.json"

        self._config = self._load_config()

    def _get_default_config_dir(self) -> Path:
        """Get the default configuration directory for the current platform"""
        if os.name == "nt":  # Windows
            base = Path(os.environ.get("APPDATA", Path.home() / "AppData" / "Roaming"))
        elif os.name == "posix" and "darwin" in os.uname().sysname.lower():
            base = Path.home() / "Library" / "Application Support"
        else:
            base = Path(os.environ.get("XDG_CONFIG_HOME", Path.home() / ".config"))
        return base / "psicalc"

    def _load_config(self) -> PsicalcConfig:
        """Load configuration from file or fall back to defaults"""
        if not self.config_file.exists():
            return PsicalcConfig()
        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                data = json.load(f)
            config = PsicalcConfig()
            if "engine" in data:
                config.engine = EngineConfig(**data["engine"])
            if "output" in data:
                config.output = OutputConfig(**data["output"])
            return config
        except (OSError, json.JSONDecodeError, TypeError, ValueError) as e:
            log.warning("config_load_failed", path=str(self.config_file), error=str(e))
            return PsicalcConfig()

    def save_config(self) -> bool:
        """Save current configuration to file"""
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, "w", encoding="utf-8") as f:
                json.dump(self._config.to_dict(), f, indent=2, ensure_ascii=False)
            return True
        except OSError as e:
            log.error("config_save_failed", path=str(self.config_file), error=str(e))
            return False

    def write_starter(self, path: Optional[Path] = None, overwrite: bool = False) -> Path:
        """Write a commented starter config; refuses to clobber unless asked"""
        target = Path(path) if path else self.config_file
        if target.exists() and not overwrite:
            raise FileExistsError(f"{target} already exists")
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8") as f:
            json.dump(STARTER_CONFIG, f, indent=2)
            f.write("\n")
        log.info("config_written", path=str(target))
        return target

    @property
    def config(self) -> PsicalcConfig:
        """Get the current configuration"""
        return self._config

    def update_engine_config(self, **kwargs) -> None:
        for key, value in kwargs.items():
            if hasattr(self._config.engine, key):
                setattr(self._config.engine, key, value)

    def update_output_config(self, **kwargs) -> None:
        for key, value in kwargs.items():
            if hasattr(self._config.output, key):
                setattr(self._config.output, key, value)

    def reset_to_defaults(self) -> None:
        """Reset configuration to defaults"""
        self._config = PsicalcConfig()
        self.save_config()


# Global configuration manager instance
_config_manager = None


def get_config_manager(config_file: Optional[Path] = None) -> ConfigManager:
    """Get the global configuration manager (rebuilt when an explicit file is given)"""
    global _config_manager
    if _config_manager is None or config_file is not None:
        _config_manager = ConfigManager(config_file=config_file)
    return _config_manager


def get_config() -> PsicalcConfig:
    """Get the current configuration"""
    return get_config_manager().config


def reset_config_manager() -> None:
    global _config_manager
    _config_manager = None

#!/usr/bin/env python3
"""
psicalc - Main entry point for CLI execution

This module enables running psicalc as:
    python -m psicalc
"""

import sys

from psicalc.cli import main

if __name__ == "__main__":
    sys.exit(main())

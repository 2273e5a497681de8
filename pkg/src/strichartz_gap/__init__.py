"""Core package for strichartz-gap."""

from .main import main, run_cli

__all__ = ["main", "run_cli"]

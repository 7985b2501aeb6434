"""HTTP service and shared command handlers."""
from .handlers import COMMANDS, ConfigError, run_command

__all__ = ["COMMANDS", "ConfigError", "run_command"]

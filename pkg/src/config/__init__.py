"""
Config Module

This package reads simulation configs and system descriptors, validates their
structure and sets up logging from the environment.
"""

from src.config.documents import load_document, parse_duration
from src.config.manager import ConfigManager
from src.config.schema import SchemaError, validate_config_schema
from src.config.settings import close_log_file, log_level_from_env, setup_logging
from src.config.specs import EmulatorConfig, ModelConfig, SimulationConfig, duration_text

__all__ = [
    "ConfigManager",
    "EmulatorConfig",
    "ModelConfig",
    "SchemaError",
    "SimulationConfig",
    "close_log_file",
    "duration_text",
    "load_document",
    "log_level_from_env",
    "parse_duration",
    "setup_logging",
    "validate_config_schema",
]

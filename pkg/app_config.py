"""
Application configuration and initialization for the FR logic checker
Handles logging setup, persisted settings and directory creation
"""
import json
import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Tuple

from config import (
    APP_NAME, APP_VERSION, BASE_DIR, DEFAULT_DERIVE_DEPTH, DEFAULT_MAX_TRIALS, DEFAULT_SEED,
    LOG_DIR, LOG_FILE_PREFIX, LOG_LEVEL_ENV, MAX_FORMULAS, MAX_MODAL_DEPTH, REPORTS_DIR,
    SETTINGS_FILE, STAT_TRIALS,
)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
OUTPUT_FORMATS = ("text", "json")


class AppConfig:
    """Application configuration and initialization manager"""

    def __init__(self, config_file: Path = None, log_dir: Path = None):
        self.logger = None
        self.config_file = Path(config_file) if config_file else SETTINGS_FILE
        self.log_dir = Path(log_dir) if log_dir else LOG_DIR
        self.settings = {}
        self._handlers: List[logging.Handler] = []

        # Settings first: they carry the fallback log level
        self.settings = self._read_settings()
        self.setup_logging()
        self.load_configuration()
        self.initialize_directories()

        self.logger.info(f"{APP_NAME} v{APP_VERSION} initializing...")

    def _read_settings(self) -> dict:
        if not self.config_file.exists():
            return self.get_default_settings()
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                return json.load(f)
        except (OSError, ValueError):
            return self.get_default_settings()

    def log_level(self) -> str:
        """Environment override, then the settings file, then INFO"""
        level = os.environ.get(LOG_LEVEL_ENV) or self.get_setting("logging", "log_level", "INFO")
        level = str(level).upper()
        return level if level in LOG_LEVELS else "INFO"

    def setup_logging(self):
        """Dated file handler under logs/ plus a console handler on stderr"""
        level = getattr(logging, self.log_level())
        root = logging.getLogger()
        try:
            self.log_dir.mkdir(parents=True, exist_ok=True)

            file_handler = logging.FileHandler(
                self.log_dir / f"{LOG_FILE_PREFIX}_{datetime.now().strftime('%Y%m%d')}.log",
                encoding='utf-8'
            )
            file_handler.setLevel(min(level, logging.INFO))
            file_handler.setFormatter(logging.Formatter(LOG_FORMAT))

            # stdout carries command output only
            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setLevel(level if os.environ.get(LOG_LEVEL_ENV) else logging.WARNING)
            console_handler.setFormatter(logging.Formatter(LOG_FORMAT))

            self._handlers = [file_handler, console_handler]
            for handler in self._handlers:
                root.addHandler(handler)
            root.setLevel(min(level, logging.INFO))

            self.logger = logging.getLogger(__name__)
            self.logger.info("Logging system initialized")

        except OSError as e:
            print(f"Failed to setup logging: {e}", file=sys.stderr)
            root.setLevel(level)
            self.logger = logging.getLogger(__name__)

    def close_logging(self):
        """Detach and close the handlers added by setup_logging"""
        root = logging.getLogger()
        for handler in self._handlers:
            root.removeHandler(handler)
            handler.close()
        self._handlers = []

    def load_configuration(self):
        """Load settings from file, creating the default file on first run"""
        try:
            if self.config_file.exists():
                with open(self.config_file, 'r', encoding='utf-8') as f:
                    loaded = json.load(f)
                self.settings = self._merge_defaults(loaded)
                self.logger.info("Configuration loaded from file")
            else:
                self.settings = self.get_default_settings()
                self.save_configuration()
                self.logger.info("Default configuration created")

        except (OSError, ValueError) as e:
            self.logger.error(f"Failed to load configuration: {e}")
            self.settings = self.get_default_settings()

    def _merge_defaults(self, loaded: dict) -> dict:
        settings = self.get_default_settings()
        for section, values in loaded.items():
            if isinstance(values, dict) and isinstance(settings.get(section), dict):
                settings[section].update(values)
            else:
                settings[section] = values
        return settings

    def get_default_settings(self) -> dict:
        """Get default application settings"""
        return {
            "app": {
                "name": APP_NAME,
                "version": APP_VERSION
            },
            "simulation": {
                "seed": DEFAULT_SEED,
                "max_trials": DEFAULT_MAX_TRIALS,
                "stat_trials": STAT_TRIALS
            },
            "derivation": {
                "depth": DEFAULT_DERIVE_DEPTH,
                "max_modal_depth": MAX_MODAL_DEPTH,
                "max_formulas": MAX_FORMULAS
            },
            "output": {
                "format": "text",
                "reports_dir": str(REPORTS_DIR)
            },
            "logging": {
                "log_level": "INFO",
                "max_log_files": 30
            }
        }

    def save_configuration(self):
        """Save current configuration to file"""
        try:
            with open(self.config_file, 'w', encoding='utf-8') as f:
                json.dump(self.settings, f, indent=2, ensure_ascii=False)
            self.logger.info("Configuration saved to file")

        except OSError as e:
            self.logger.error(f"Failed to save configuration: {e}")

    def initialize_directories(self):
        """Create the log directory; report directories are created on write"""
        try:
            self.log_dir.mkdir(parents=True, exist_ok=True)
            self.logger.debug(f"Directory initialized: {self.log_dir}")

        except OSError as e:
            self.logger.error(f"Failed to initialize directories: {e}")
            raise

    def cleanup_old_logs(self):
        """Keep only the newest `logging.max_log_files` log files"""
        try:
            if not self.log_dir.exists():
                return

            max_files = self.get_setting("logging", "max_log_files", 30)
            log_files = sorted(self.log_dir.glob(f"{LOG_FILE_PREFIX}_*.log"))

            if len(log_files) > max_files:
                files_to_delete = log_files[:-max_files]
                for file_path in files_to_delete:
                    file_path.unlink()
                    self.logger.debug(f"Deleted old log file: {file_path}")

                self.logger.info(f"Cleaned up {len(files_to_delete)} old log files")

        except OSError as e:
            self.logger.error(f"Failed to cleanup old logs: {e}")

    def get_setting(self, section: str, key: str, default=None):
        """Get a configuration setting"""
        section_values = self.settings.get(section, {})
        if not isinstance(section_values, dict):
            return default
        return section_values.get(key, default)

    def set_setting(self, section: str, key: str, value):
        """Set a configuration setting and persist it"""
        if section not in self.settings:
            self.settings[section] = {}
        self.settings[section][key] = value
        self.save_configuration()

    def reports_dir(self) -> Path:
        path = Path(self.get_setting("output", "reports_dir", str(REPORTS_DIR)))
        return path if path.is_absolute() else BASE_DIR / path

    def get_app_info(self) -> dict:
        return {
            "name": APP_NAME,
            "version": APP_VERSION,
            "config_file": str(self.config_file),
            "log_directory": str(self.log_dir),
            "reports_directory": str(self.reports_dir()),
        }

    def validate_configuration(self) -> Tuple[bool, List[str]]:
        """
        Validate current configuration

        Returns:
            (valid, issues) with one message per problem found
        """
        issues = []

        def positive_int(section: str, key: str):
            value = self.get_setting(section, key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                issues.append(f"{section}.{key} must be a positive integer")

        seed = self.get_setting("simulation", "seed")
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            issues.append("simulation.seed must be a non-negative integer")
        positive_int("simulation", "max_trials")
        positive_int("simulation", "stat_trials")
        positive_int("derivation", "depth")
        positive_int("derivation", "max_modal_depth")
        positive_int("derivation", "max_formulas")
        positive_int("logging", "max_log_files")

        if self.get_setting("output", "format") not in OUTPUT_FORMATS:
            issues.append(f"output.format must be one of {', '.join(OUTPUT_FORMATS)}")
        if str(self.get_setting("logging", "log_level", "")).upper() not in LOG_LEVELS:
            issues.append(f"logging.log_level must be one of {', '.join(LOG_LEVELS)}")

        if issues:
            self.logger.warning(f"Configuration validation issues: {', '.join(issues)}")
        else:
            self.logger.info("Configuration validation passed")

        return len(issues) == 0, issues


def initialize_application(config_file: Path = None,
                           log_dir: Path = None) -> Tuple[Optional[AppConfig], List[str]]:
    """Initialize the application and return (config, errors)"""
    app_config = None
    try:
        app_config = AppConfig(config_file, log_dir)

        app_config.cleanup_old_logs()

        config_valid, config_issues = app_config.validate_configuration()
        if not config_valid:
            app_config.logger.error(f"Configuration issues detected: {', '.join(config_issues)}")
            app_config.close_logging()
            return None, config_issues

        app_config.logger.info("Application initialization completed successfully")
        return app_config, []

    except OSError as e:
        if app_config is not None and app_config.logger:
            app_config.logger.critical(f"Application initialization failed: {e}")
        else:
            print(f"Critical error during initialization: {e}", file=sys.stderr)
        return None, [f"Initialization error: {e}"]

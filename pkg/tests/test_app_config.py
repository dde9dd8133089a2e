"""
Unit tests for AppConfig
"""
import json
import logging
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from app_config import AppConfig, initialize_application
from config import BASE_DIR, LOG_LEVEL_ENV


class TestAppConfig(unittest.TestCase):
    """Test cases for AppConfig"""

    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp())
        self.config_file = self.temp_dir / "settings.json"
        self.log_dir = self.temp_dir / "logs"
        self.configs = []

    def tearDown(self):
        for config in self.configs:
            config.close_logging()
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def make_config(self) -> AppConfig:
        config = AppConfig(self.config_file, self.log_dir)
        self.configs.append(config)
        return config

    def write_settings(self, settings: dict):
        self.config_file.write_text(json.dumps(settings), encoding="utf-8")

    def test_first_run_creates_defaults(self):
        config = self.make_config()
        self.assertTrue(self.config_file.exists())
        self.assertTrue(self.log_dir.exists())
        self.assertEqual(config.get_setting("simulation", "seed"), 7)
        self.assertEqual(config.get_setting("derivation", "max_modal_depth"), 4)
        self.assertEqual(len(list(self.log_dir.glob("fr_logic_*.log"))), 1)

    def test_partial_file_is_merged_with_defaults(self):
        self.write_settings({"simulation": {"seed": 11}})
        config = self.make_config()
        self.assertEqual(config.get_setting("simulation", "seed"), 11)
        self.assertEqual(config.get_setting("simulation", "max_trials"), 1000)
        self.assertEqual(config.get_setting("output", "format"), "text")

    def test_corrupt_file_falls_back(self):
        self.config_file.write_text("{not json", encoding="utf-8")
        config = self.make_config()
        self.assertEqual(config.get_setting("derivation", "depth"), 40)

    def test_set_setting_persists(self):
        config = self.make_config()
        config.set_setting("output", "format", "json")
        saved = json.loads(self.config_file.read_text(encoding="utf-8"))
        self.assertEqual(saved["output"]["format"], "json")

    def test_get_setting_default(self):
        config = self.make_config()
        self.assertEqual(config.get_setting("missing", "key", "fallback"), "fallback")

    def test_log_level_env_override(self):
        self.write_settings({"logging": {"log_level": "ERROR"}})
        config = self.make_config()
        self.assertEqual(config.log_level(), "ERROR")
        with patch.dict("os.environ", {LOG_LEVEL_ENV: "debug"}):
            self.assertEqual(config.log_level(), "DEBUG")
        with patch.dict("os.environ", {LOG_LEVEL_ENV: "loud"}):
            self.assertEqual(config.log_level(), "INFO")

    def test_close_logging_detaches_handlers(self):
        config = self.make_config()
        handlers = list(config._handlers)
        self.assertTrue(all(h in logging.getLogger().handlers for h in handlers))
        config.close_logging()
        self.assertFalse(any(h in logging.getLogger().handlers for h in handlers))

    def test_reports_dir_relative_to_base(self):
        self.write_settings({"output": {"reports_dir": "out"}})
        config = self.make_config()
        self.assertEqual(config.reports_dir(), BASE_DIR / "out")
        info = config.get_app_info()
        self.assertEqual(info["log_directory"], str(self.log_dir))

    def test_validation_passes_for_defaults(self):
        config = self.make_config()
        self.assertEqual(config.validate_configuration(), (True, []))

    def test_validation_issues(self):
        self.write_settings({
            "simulation": {"seed": -1, "max_trials": 0},
            "derivation": {"depth": "deep"},
            "output": {"format": "xml"},
            "logging": {"log_level": "LOUD"},
        })
        config = self.make_config()
        valid, issues = config.validate_configuration()
        self.assertFalse(valid)
        self.assertIn("simulation.seed must be a non-negative integer", issues)
        self.assertIn("simulation.max_trials must be a positive integer", issues)
        self.assertIn("derivation.depth must be a positive integer", issues)
        self.assertIn("output.format must be one of text, json", issues)
        self.assertEqual(len(issues), 5)

    def test_booleans_are_not_integers(self):
        self.write_settings({"derivation": {"max_formulas": True}})
        _, issues = self.make_config().validate_configuration()
        self.assertEqual(issues, ["derivation.max_formulas must be a positive integer"])

    def test_cleanup_old_logs(self):
        self.write_settings({"logging": {"max_log_files": 2}})
        self.log_dir.mkdir(parents=True)
        for day in ("20200101", "20200102", "20200103"):
            (self.log_dir / f"fr_logic_{day}.log").write_text("", encoding="utf-8")
        config = self.make_config()
        config.cleanup_old_logs()
        remaining = sorted(p.name for p in self.log_dir.glob("fr_logic_*.log"))
        self.assertEqual(len(remaining), 2)
        self.assertNotIn("fr_logic_20200101.log", remaining)

    def test_initialize_application(self):
        config, errors = initialize_application(self.config_file, self.log_dir)
        self.configs.append(config)
        self.assertEqual(errors, [])
        self.assertIsInstance(config, AppConfig)

    def test_initialize_application_rejects_bad_settings(self):
        self.write_settings({"output": {"format": "xml"}})
        config, errors = initialize_application(self.config_file, self.log_dir)
        self.assertIsNone(config)
        self.assertEqual(errors, ["output.format must be one of text, json"])


if __name__ == '__main__':
    unittest.main()

"""
Configuration settings for the FR logic checker
"""
from pathlib import Path

# Application settings
APP_NAME = "FR Logic Checker"
APP_VERSION = "1.0.0"

# Simulation settings
DEFAULT_SEED = 7
DEFAULT_MAX_TRIALS = 1000
STAT_TRIALS = 120000
HALT_RUNS = 10000

# Derivation settings
DEFAULT_DERIVE_DEPTH = 40  # forward-chaining rounds
MAX_MODAL_DEPTH = 4  # derived formulas only; premises may be deeper
MAX_FORMULAS = 200000
BLOCK_DEPTH_SLACK = 4
MAX_TRACE_STEPS = 40

# File paths
BASE_DIR = Path(__file__).parent
REPORTS_DIR = BASE_DIR / "reports"
LOG_DIR = BASE_DIR / "logs"
SETTINGS_FILE = BASE_DIR / "app_settings.json"

# Logging
LOG_LEVEL_ENV = "FR_LOGIC_LOG_LEVEL"
LOG_FILE_PREFIX = "fr_logic"

"""Configuration settings for the load-balancing laboratory."""
import os
from pathlib import Path

# Environment overrides (optional .env support)
try:
	from dotenv import load_dotenv  # type: ignore
	load_dotenv()
except Exception:
	pass

# Base paths
BASE_DIR = Path(__file__).parent.parent.parent.parent
CONFIGS_DIR = BASE_DIR / "configs"
OUTPUT_ROOT = Path(os.getenv("LBLAB_OUTPUT_ROOT", str(BASE_DIR / "runs")))

# Application settings
APP_NAME = "lb-lab"
APP_VERSION = "1.0.0"
LOG_LEVEL = os.getenv("LBLAB_LOG_LEVEL", "INFO").upper()

# Partitioning
VELOCITY_THRESHOLD = 1e-3  # below this mean-velocity norm NoRCB cuts like RCB
HILBERT_ORDER = 10
RIB_EIGENGAP = 1e-12

# Load-balancing cost model, work units
COST_PER_PARTICLE = 1.0
COST_PER_MIGRATION = 10.0

# Desk-scale experiment sizes
DESK_N = 5000
DESK_P = 16
DESK_STEPS = 3000
PERIODIC_PERIOD = 600
RANK_INTERVAL = 100

# Physics
EPSILON = 1.0
SIGMA = 1e-2
R_CUT_FACTOR = 2.5
DT = 5e-4
V0 = 0.1
OMEGA = 1.0
DISK_RADIUS = 0.35
FORCE_CLAMP_FACTOR = 0.5  # LJ magnitude frozen below this fraction of sigma

# Scenario-scaled external force strength
SCENARIO_FORCE_STRENGTH = {
	"contraction_toy": 0.2,
	"contraction": 0.2,
	"gravity": 0.3,
	"rotation_contraction": 0.5,
}

RNG_NAME = "PCG64"

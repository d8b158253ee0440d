import os

from dotenv import load_dotenv

# Allow a local .env file to set the knobs below
load_dotenv()

# --- Limits ---
DEFAULT_MAX_N = 16
MIN_N = 2
CLOSED_FORM_MAX_N = 64
SPECTRAL_SUM_MAX_N = 10

# Largest number of float64 cells a single history may hold (about 800 MB)
HISTORY_BUDGET = 100_000_000

# Amplitude updates allowed in one ensemble run (trials × steps × n·2^n)
WORK_BUDGET = 1_000_000_000_000

# --- Tolerances ---
NORM_TOL = 1e-10
NEGATIVE_CLAMP_TOL = 1e-14
SYMMETRY_TOL = 1e-10

# --- Defaults ---
DEFAULT_TRIALS = 200
DEFAULT_SEED = 12345
TRIAL_CHUNK = 25


def max_state_n():
    """State-vector cap, overridable through HYPERWALK_MAX_N at your own risk."""
    raw = os.getenv("HYPERWALK_MAX_N")
    if not raw:
        return DEFAULT_MAX_N
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_MAX_N
    return max(value, MIN_N)


def log_level():
    return (os.getenv("HYPERWALK_LOG_LEVEL") or "WARNING").upper()


def default_jobs():
    raw = os.getenv("HYPERWALK_JOBS")
    if raw and raw.isdigit() and int(raw) > 0:
        return int(raw)
    return os.cpu_count() or 1


def default_t_max(n):
    """Search horizon for mixing times, comfortably beyond the linear scale."""
    return 200 * n

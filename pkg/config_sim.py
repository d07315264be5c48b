# ################ #
# SIMULATION VARS  #
# ################ #
import os

# log to console only when None; otherwise setup_default_log writes beamtrain_*.log here
LOG_FOLDER = None
LOG_LEVEL = "INFO"

# trials run in a process pool of this size (results do not depend on it)
MAX_WORKERS = max(1, (os.cpu_count() or 1) // 4)

OUTPUT_DIR = "results"
RESULT_CSV = "results.csv"
RESULT_JSON = "results.json"
TRACE_FILE = "trace.txt"

# used by `run` when no --config is given
DEFAULT_TRIALS = 1500
DEFAULT_SNR_GRID_DB = [30.0 + 2.5 * i for i in range(11)]  # 30 .. 55 dB
DEFAULT_M_VALUES = [2, 4, 8]
DEFAULT_METHODS = ["single", "multi", "rh"]

import os


PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

TOOL_VERSION = "0.0.1"

# Truncation defaults
DEFAULT_MAX_LENGTH = 4 # tail length L of a0[a1|...|aL]
DEFAULT_U_PRECISION = 8 # first untracked u-power for series work, retried once at 2N
DEFAULT_SATURATION_STEPS = 8 # cap on (u nabla)-saturation rounds

# Basis word enumeration
DEFAULT_WORD_BUDGET = None  # None checks every word; an int samples that many words per tail length
DEFAULT_TRIPLE_BUDGET = 20000 # basis triples checked when validating an algebra
DEFAULT_SAMPLE_SEED = 20240229

# Parallelism
JOBS_ENV_VAR = "CYCLO_JOBS"
DEFAULT_CHUNK_SIZE = 64

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2

# Built-in algebra ids for `verify --algebra`
BUILTIN_ALGEBRAS = ["lambda", "lambda-graded", "dual", "mat2", "aw:<poly>"]

"""Configuration settings for nugrass"""

# Bundle file schema
SCHEMA_VERSION = 1

# Sampling
SAMPLE_THRESHOLD = 200  # exhaustive checking up to this many triples
DEFAULT_SEED = 0
DEFAULT_WORKERS = 1

# Towers
DEFAULT_TOWER_DEPTH = 4

# Generator naming
EVEN_PREFIX = "x"
ODD_PREFIX = "e"
PARTITION_PREFIX = "r"
SECOND_PARTITION_PREFIX = "s"
HOMOTOPY_PARAMETER = "t"
FORMAL_UNIT_TEXT = "1nu"

# Exit codes
EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT_ERROR = 2

# Report statuses
STATUS_PASS = "pass"
STATUS_FAIL = "fail"

# Logging
LOGGER_NAME = "nugrass"
LOG_FORMAT = "%(message)s"
LOG_LEVELS = {
    0: "WARNING",
    1: "INFO",
    2: "DEBUG",
}

# Check configurations
CHECK_CONFIGS = {
    "atlas-build": {
        "description": "Coordinate matrices of every chart of a nu-Grassmannian",
    },
    "atlas-verify": {
        "description": "Identity, pair and triple gluing of chart transitions",
    },
    "bundle-verify": {
        "description": "Cocycle identities of a super vector bundle",
    },
    "gauss-build": {
        "description": "Gauss supermatrix and left-inverse certificate",
    },
    "classify": {
        "description": "Classifying substitutions into balanced charts",
    },
    "pullback-verify": {
        "description": "Pullback of the canonical bundle is isomorphic to the input",
    },
    "homotopy-endpoints": {
        "description": "Linear homotopy between doubled Gauss morphisms",
    },
    "retraction": {
        "description": "Deformation retraction of projective superspace onto its body",
    },
    "tower-verify": {
        "description": "Inclusion squares, bundle squares and sections along a tower",
    },
    "universality": {
        "description": "Universal bundle truncation and composed pullback",
    },
    "reduced-embedding": {
        "description": "Reduction of nu-Grassmannians onto classical Grassmannians",
    },
}

# Persisted user settings recognised on load
USER_SETTING_KEYS = ("seed", "sample_threshold", "workers")

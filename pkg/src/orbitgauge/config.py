# src/orbitgauge/config.py
import os
import logging
from fractions import Fraction

logger = logging.getLogger(__name__)


def _env_int(name, default, minimum=1):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not an integer")
        return default
    if value < minimum:
        logger.warning(f"Ignoring {name}={raw!r}: must be >= {minimum}")
        return default
    return value


# Parallelism (None means: ask the host, see utils.system)
DEFAULT_JOBS = _env_int('ORBITGAUGE_JOBS', None)

# Logging Configuration
LOG_LEVEL = os.environ.get('ORBITGAUGE_LOG_LEVEL', 'WARNING').upper()
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_FILE = os.environ.get('ORBITGAUGE_LOG_FILE')

# Enumeration caps
DEFAULT_PERIOD_CAP = Fraction(10)
DEFAULT_N_CAP = 1

# Diophantine search
DIRICHLET_PN_CEILING = _env_int('ORBITGAUGE_PN_CEILING', 100000)
ROOT_BISECTION_BITS = 64

# Surrogate table for 1/2 e^{-x}
SURROGATE_ACCURACY = Fraction(1, 10**6)

# Output
DECIMAL_PLACES = 12
OUTPUT_FORMATS = ('json', 'csv', 'pretty')

# Memo cache
CACHE_MAX_ENTRIES = 512

# Report constants
V34_WINDOW = Fraction(1, 14)
V34_BETAS = (Fraction(3), Fraction(4))
V34_EPS_LIMIT = Fraction(1, 6)
ELLDIST_R_VALUES = (3, 30, 300)
ELLDIST_EPS_FACTOR = Fraction(9, 10)
SINKHOLE_WINDOW = Fraction(1)

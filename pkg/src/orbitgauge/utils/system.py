# src/orbitgauge/utils/system.py
import logging

import psutil

from .. import config

logger = logging.getLogger(__name__)


def default_parallelism() -> int:
    """Sweep width: ORBITGAUGE_JOBS if set, else the physical core count."""
    if config.DEFAULT_JOBS is not None:
        return config.DEFAULT_JOBS
    try:
        cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
    except Exception as e:
        logger.warning(f"Could not read the CPU count: {str(e)}")
        cores = 1
    return max(1, cores)


def resolve_jobs(jobs) -> int:
    """--jobs value, falling back to default_parallelism."""
    if jobs is None:
        return default_parallelism()
    return max(1, int(jobs))

"""Worker-count resolution.

LCML_THREADS caps how many worker threads lcml spawns. Parallel code
derives one substream per unit of work, so the thread count can never
change numeric results, only wall-clock time.
"""

from __future__ import annotations

import os

from .errors import ConfigError

ENV_VAR = "LCML_THREADS"


def thread_count() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{ENV_VAR} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ConfigError(f"{ENV_VAR} must be >= 1, got {value}")
    return value

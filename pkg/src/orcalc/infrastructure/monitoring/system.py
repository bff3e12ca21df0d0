"""Process resource measurement using psutil."""

import os
import time
from typing import Optional

import psutil
from loguru import logger


class ResourceProbe:
    """Context manager recording wall time and resident memory of a command."""

    def __init__(self):
        self._process = psutil.Process(os.getpid())
        self._started: Optional[float] = None
        self.wall_time = 0.0
        self.memory_mb = 0.0

    def memory(self) -> float:
        """Current RSS in MB."""
        try:
            return self._process.memory_info().rss / (1024 * 1024)
        except (psutil.NoSuchProcess, psutil.AccessDenied) as e:
            logger.debug(f"Error reading process memory: {e}")
            return 0.0

    def __enter__(self) -> "ResourceProbe":
        self._started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.wall_time = time.perf_counter() - (self._started or time.perf_counter())
        self.memory_mb = self.memory()
        logger.debug(f"command took {self.wall_time:.3f}s, RSS {self.memory_mb:.1f} MB")

"""Worker partition plans for the history sums."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

MODES = ("balanced", "static_block")


@dataclass(frozen=True, slots=True)
class PartitionPlan:
    """How the history range [0, n] is split across workers at each step.

    balanced: P near-equal chunks of the current history (sizes differ by at
    most one).  static_block: fixed blocks of ceil(N/P) indices clamped to the
    available history; workers whose block lies beyond n idle.  balanced is
    the default because static blocks leave most workers idle early on.
    """

    workers: int = 1
    mode: str = "balanced"

    def __post_init__(self):
        if not isinstance(self.workers, (int, np.integer)) or isinstance(self.workers, bool) or self.workers < 1:
            raise ValidationError(f"workers must be a positive integer, got {self.workers!r}")
        object.__setattr__(self, "workers", int(self.workers))
        if self.mode not in MODES:
            raise ValidationError(f"partition mode must be one of {MODES}, got {self.mode!r}")

    def block_size(self, steps: int) -> int:
        """Static block length: ceil(N / P), enough for P blocks to cover [0, N)."""
        return max(1, math.ceil(steps / self.workers))

    def chunk_bounds(self, n: int, steps: int | None = None) -> np.ndarray:
        """Boundary array of length P+1; worker p owns [bounds[p], bounds[p+1]).

        ``n`` is the step index: the history being summed is k in [0, n].
        static_block mode needs ``steps`` (the solve's N) to size its blocks.
        """
        if n < 0:
            raise ValidationError(f"step index must be >= 0, got {n}")
        n1 = n + 1
        P = self.workers
        if self.mode == "balanced":
            return np.array([(p * n1) // P for p in range(P + 1)], dtype=np.int64)
        if steps is None:
            raise ValidationError("static_block chunk bounds need the total step count")
        if n >= steps:
            # The last history sum of an N-step solve has n = N-1; blocks are
            # sized for exactly that range and cannot cover anything longer.
            raise ValidationError(
                f"step index {n} out of range for a {steps}-step solve"
            )
        block = self.block_size(steps)
        return np.array([min(p * block, n1) for p in range(P + 1)], dtype=np.int64)

    def chunks(self, n: int, steps: int | None = None) -> list[tuple[int, int]]:
        """The same bounds as (lo, hi) pairs, one per worker."""
        b = self.chunk_bounds(n, steps)
        return [(int(b[p]), int(b[p + 1])) for p in range(self.workers)]

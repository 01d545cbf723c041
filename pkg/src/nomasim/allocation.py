"""NOMA power-fraction schemes and SIC decodability checks.

Canonical ordering throughout: user 1 has the strongest channel and the
smallest power fraction, so fractions are non-decreasing with user index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

_SUM_TOL = 64 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class PowerAllocation:
    """Per-user fractions of a cluster power budget, ordered weakest-last."""

    fractions: np.ndarray
    budget: float = 1.0

    def __post_init__(self):
        f = np.asarray(self.fractions, dtype=np.float64)
        if f.ndim != 1 or f.size < 1:
            raise ValueError("fractions must be a non-empty 1-D sequence")
        if np.any(f <= 0) or not np.all(np.isfinite(f)):
            raise ValueError("fractions must be finite and > 0")
        if np.any(np.diff(f) < 0):
            raise ValueError("fractions must be non-decreasing (user 1 = strongest = least power)")
        if f.sum() > 1.0 + _SUM_TOL:
            raise ValueError("fractions must sum to at most 1")
        if not (np.isfinite(self.budget) and self.budget > 0):
            raise ValueError("budget must be finite and > 0")
        object.__setattr__(self, "fractions", f)

    @property
    def size(self) -> int:
        return self.fractions.size

    @property
    def powers(self) -> np.ndarray:
        """Absolute per-user transmit powers f_i * budget."""
        return self.fractions * self.budget

    def scaled(self, budget: float) -> "PowerAllocation":
        """Same fractions under a different total budget."""
        return PowerAllocation(self.fractions, budget)

    @classmethod
    def geometric(cls, m: int, ratio: float = 2.0, budget: float = 1.0) -> "PowerAllocation":
        return cls(geometric_fractions(m, ratio), budget)


def geometric_fractions(m: int, ratio: float = 2.0) -> np.ndarray:
    """Channel-independent fractions f_i = ratio^(i-1) * (ratio-1) / (ratio^m - 1).

    They sum to 1 and strictly increase with i, which guarantees the NOMA
    power ordering for any cluster size.
    """
    if m < 1:
        raise ValueError("cluster size m must be >= 1")
    if not ratio > 1.0:
        raise ValueError("ratio must be > 1 to keep fractions strictly increasing")
    if m == 1:
        return np.ones(1)
    scale = (ratio - 1.0) / (ratio**m - 1.0)
    if not np.isfinite(scale) or scale == 0.0:
        raise ValueError(f"geometric fractions overflow for m={m}, ratio={ratio}")
    return ratio ** np.arange(m, dtype=np.float64) * scale


@dataclass(frozen=True)
class SicConstraint:
    """Minimum received-power separation the SIC hardware can resolve."""

    delta: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.delta) and self.delta >= 0):
            raise ValueError("delta must be finite and >= 0")


class SicVerdict(NamedTuple):
    """Feasibility result; violation is the first offending (user, level), 1-based."""

    feasible: bool
    violation: tuple[int, int] | None


def validate_sic_gaps(
    alloc: PowerAllocation,
    cluster,
    constraint: SicConstraint,
    gap_mode: str = "aggregate",
) -> SicVerdict:
    """Check that every signal user i must decode clears the sensitivity gap.

    For user i and each decoded level j >= i (levels are decoded strongest
    power first, j = m down to i), the received power of level j must exceed
    the still-undecoded signals by delta. ``aggregate`` compares against the
    sum of all lower-power levels, ``pairwise`` against the largest one.
    Users and levels in the verdict are 1-based.
    """
    gammas = np.asarray(getattr(cluster, "gammas", cluster), dtype=np.float64)
    if gammas.ndim != 1:
        raise ValueError("cluster gammas must be 1-D")
    m = gammas.size
    if alloc.size != m:
        raise ValueError(f"allocation size {alloc.size} != cluster size {m}")
    if gap_mode not in ("aggregate", "pairwise"):
        raise ValueError(f"unknown gap_mode: {gap_mode!r}")

    p = alloc.powers
    below = np.cumsum(p) - p  # sum of lower-power levels, per level
    if gap_mode == "aggregate":
        margin = p - below
    else:
        prev = np.concatenate(([0.0], p[:-1]))  # largest lower level (p is sorted)
        margin = p - prev

    for i in range(m):
        received = gammas[i] * margin[i:]
        bad = np.nonzero(received < constraint.delta)[0]
        if bad.size:
            return SicVerdict(False, (i + 1, i + 1 + int(bad[0])))
    return SicVerdict(True, None)

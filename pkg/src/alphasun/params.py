"""Shared value types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

MOMENT_KINDS = ("Y-positive", "X-negative-lattice", "hat-Y", "hat-Z", "perpetuity")


@dataclass(frozen=True)
class DistParams:
    """The pair (alpha, gamma) shared by the Frechet- and Weibull-case laws.

    The boundary values alpha = 0 and alpha = 1 are degenerate and rejected;
    tests approach alpha = 0 through tiny surrogates such as 1e-9.
    """

    alpha: float
    gamma: float

    def __post_init__(self):
        a, g = float(self.alpha), float(self.gamma)
        if not (0.0 < a < 1.0) or not math.isfinite(a):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")
        if not (g > 0.0) or not math.isfinite(g):
            raise DomainError(f"gamma must be positive, got {self.gamma!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "gamma", g)

    @property
    def beta(self) -> float:
        """Polynomial exponent alpha/(1-alpha) of the exponential tails."""
        return self.alpha / (1.0 - self.alpha)


@dataclass(frozen=True)
class MomentSequence:
    """Integer moments m_1, ..., m_N (``values[0]`` is m_1)."""

    values: tuple
    kind: str

    def __post_init__(self):
        if self.kind not in MOMENT_KINDS:
            raise DomainError(f"unknown moment kind {self.kind!r}")
        vals = tuple(float(v) for v in self.values)
        if not all(math.isfinite(v) and v > 0 for v in vals):
            raise DomainError("moments must be finite and positive")
        if self.kind == "Y-positive":
            for n, v in enumerate(vals, start=1):
                if v > math.factorial(n) * (1 + 1e-12):
                    raise DomainError(f"E[Y^{n}] = {v} exceeds {n}!")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n: int) -> float:
        """Moment of order n >= 0 (order 0 is 1)."""
        if n == 0:
            return 1.0
        return self.values[n - 1]


@dataclass(frozen=True)
class SampleBatch:
    """Seeded Monte Carlo draws together with what produced them."""

    values: np.ndarray
    seed: int | None = None
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("empty sample")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def variance(self) -> float:
        return float(self.values.var(ddof=1)) if self.count > 1 else 0.0

    def moment(self, n: float) -> tuple[float, float]:
        """Empirical E[X^n] and its standard error."""
        p = self.values**n
        se = p.std(ddof=1) / math.sqrt(p.size) if p.size > 1 else math.inf
        return float(p.mean()), float(se)

    def ecdf(self, x):
        s = np.sort(self.values)
        return np.searchsorted(s, np.asarray(x, dtype=float), side="right") / s.size

"""Direct simulation of the storage recurrence Y_n = max(Y_{n-1}, alpha Y_{n-1} + X_n),
Y_0 = X_0, for three canonical input laws, with renormalisation and
comparison against the limit laws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .params import DistParams, SampleBatch

LAWS = ("pareto-frechet", "bounded-weibull", "exponential-gumbel")


@dataclass(frozen=True)
class InputLaw:
    """pareto-frechet: P(X > x) = x^-gamma on x >= 1; bounded-weibull:
    X = -U^(1/gamma); exponential-gumbel: rate-one exponential."""

    tag: str
    gamma: float | None = None

    def __post_init__(self):
        if self.tag not in LAWS:
            raise DomainError(f"unknown input law {self.tag!r}; expected one of {LAWS}")
        if self.tag != "exponential-gumbel":
            if self.gamma is None or not self.gamma > 0:
                raise DomainError(f"{self.tag} needs gamma > 0")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        u = rng.random(size)
        if self.tag == "pareto-frechet":
            # 1 - u lies in (0, 1]
            return (1.0 - u) ** (-1.0 / self.gamma)
        if self.tag == "bounded-weibull":
            return -(u ** (1.0 / self.gamma))
        return -np.log1p(-u)


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")


def run_chain(law: InputLaw, alpha: float, n: int, rng: np.random.Generator, size: int | None = None,
              *, inputs: np.ndarray | None = None, path: bool = False):
    """Y_n for ``size`` independent chains (scalar if size is None).

    ``inputs`` (shape (n+1,) or (n+1, size)) replaces the random inputs;
    ``path=True`` returns the whole trajectory Y_0..Y_n."""
    _check_alpha(alpha)
    if n < 1:
        raise DomainError("n must be at least 1")
    shape = () if size is None else (size,)
    def draw(k):
        return inputs[k] if inputs is not None else law.sample(rng, shape)
    y = np.asarray(draw(0), float).copy()
    traj = [y.copy()] if path else None
    for k in range(1, n + 1):
        y = np.maximum(y, alpha * y + draw(k))
        if path:
            traj.append(y.copy())
    if path:
        return np.array(traj)
    return float(y) if size is None else y


def norming(law: InputLaw, n: int, alpha: float):
    """(scale, shift) with the renormalised value (Y_n - shift) * scale.

    Gumbel inputs: Y_n grows like log(n)/(1 - alpha), which is the centring used."""
    if law.tag == "pareto-frechet":
        return n ** (-1.0 / law.gamma), 0.0
    if law.tag == "bounded-weibull":
        return n ** (1.0 / law.gamma), 0.0
    return 1.0, math.log(n) / (1.0 - alpha)


def renormalized_batch(law: InputLaw, alpha: float, n: int, batch: int, rng: np.random.Generator,
                       seed=None) -> SampleBatch:
    """Classical extreme-value normings: Y_n / n^(1/gamma) (Frechet), Y_n n^(1/gamma)
    (Weibull, negative values), Y_n - log(n)/(1 - alpha) (Gumbel)."""
    if batch < 1000:
        raise DomainError("batch must be at least 1000")
    y = run_chain(law, alpha, n, rng, batch)
    a, b = norming(law, n, alpha)
    return SampleBatch((y - b) * a, seed=seed, label=f"{law.tag} alpha={alpha} n={n}",
                       meta={"law": law.tag, "gamma": law.gamma, "alpha": alpha, "n": n,
                             "scale": a, "shift": b})


def ks_distance(sample, reference_cdf: Callable) -> float:
    """sup_x |F_emp(x) - F_ref(x)| for a continuous reference cdf (ties allowed in the sample)."""
    x = np.sort(np.asarray(getattr(sample, "values", sample), float))
    if x.size == 0:
        raise DomainError("empty sample")
    v, counts = np.unique(x, return_counts=True)
    hi = np.cumsum(counts) / x.size
    lo = hi - counts / x.size
    F = np.asarray(reference_cdf(v), float)
    return float(max(np.max(np.abs(hi - F)), np.max(np.abs(F - lo))))


@dataclass(frozen=True)
class FitResult:
    parameter: float
    ks: float
    kind: str


def fit_and_compare(values, reference_cdf: Callable, reference_median: float, kind: str) -> FitResult:
    """One-parameter median matching, then KS.

    kind "scale": values / c with median(values)/c = reference median;
    kind "location": values - m.  Weibull-domain samples are negated by the caller."""
    values = np.asarray(values, float)
    med = float(np.median(values))
    if kind == "scale":
        if not med > 0:
            raise DomainError("scale fit needs a positive sample median")
        c = med / reference_median
        return FitResult(c, ks_distance(values / c, reference_cdf), kind)
    if kind == "location":
        m = med - reference_median
        return FitResult(m, ks_distance(values - m, reference_cdf), kind)
    raise DomainError(f"unknown fit kind {kind!r}")


def limit_reference(law: InputLaw, alpha: float, grid_cfg=None):
    """(cdf, median, fit kind, sign) of the limit law for the input domain.

    The renormalised sample times ``sign`` is compared with ``cdf``."""
    from . import ide_solver as ide

    if law.tag == "exponential-gumbel":
        from scipy import optimize

        cdf = lambda x: ide.gumbel_limit_cdf(alpha, x)
        med = optimize.brentq(lambda x: cdf(x) - 0.5, -50, 50, xtol=1e-14)
        return cdf, med, "location", 1.0
    p = DistParams(alpha, law.gamma)
    cfg = grid_cfg or ide.GridConfig()
    if law.tag == "pareto-frechet":
        td = ide.solve_frechet(p, cfg)
        sign = 1.0
    else:
        td = ide.solve_weibull(p, cfg)
        sign = -1.0
    return (lambda x: ide.cdf(td, np.maximum(x, 0.0))), ide.quantile(td, 0.5), "scale", sign


def convergence_study(law: InputLaw, alpha: float, horizons=(100, 1000, 10000), batch: int = 10000,
                      seeds=range(20), reference=None):
    """KS after fitting, for each horizon and seed; returns {n: array of KS}."""
    cdf, med, kind, sign = reference or limit_reference(law, alpha)
    out = {}
    for n in horizons:
        ks = []
        for sd in seeds:
            rng = np.random.default_rng([int(sd), int(n)])
            b = renormalized_batch(law, alpha, n, batch, rng, seed=sd)
            ks.append(fit_and_compare(sign * b.values, cdf, med, kind).ks)
        out[n] = np.array(ks)
    return out

"""Convex-order (peacock) checks, beta density crossings, moments of the
renormalised local time L~_1(d, p) and Mittag-Leffler monotonicity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import perpetuity as pp
from .errors import DomainError, EvaluationError, PreconditionError
from .params import SampleBatch
from .specfun import ln_gamma, log_mittag_leffler

STRICT_SLACK = 1e-8


# --------------------------------------------------------------------------
# Beta densities
# --------------------------------------------------------------------------

def beta_logpdf(a, b, x):
    x = np.asarray(x, float)
    return (a - 1) * np.log(x) + (b - 1) * np.log1p(-x) - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))


def _count_sign_changes(v):
    s = np.sign(v)
    s = s[s != 0]
    return int(np.sum(s[1:] != s[:-1]))


def beta_crossing_count(a: float, b: float, s: float, t: float, grid: int = 8192) -> int:
    """Number of sign changes of f_t - f_s on (0, 1), f_t the density of B_{ta,tb}.

    The scan runs on a logit-uniform grid so that crossings close to the
    endpoints are resolved; log densities avoid underflow."""
    if not (a > 0 and b > 0 and s > 0 and t > 0):
        raise DomainError("a, b, s, t must be positive")
    if s > t:
        raise DomainError("need s <= t")
    if grid < 2048:
        raise DomainError("grid resolution must be at least 2048")
    if s == t:
        return 0
    u = np.linspace(-60.0, 60.0, grid)
    x = special.expit(u)
    ok = (x > 0) & (x < 1)
    d = beta_logpdf(t * a, t * b, x[ok]) - beta_logpdf(s * a, s * b, x[ok])
    return _count_sign_changes(d)


def beta_call(a: float, b: float, c):
    """E[(B_{a,b} - c)_+]."""
    c = np.asarray(c, float)
    tail1 = special.betaincc(a + 1, b, np.clip(c, 0, 1))
    tail0 = special.betaincc(a, b, np.clip(c, 0, 1))
    out = a / (a + b) * tail1 - c * tail0
    return np.where(c <= 0, a / (a + b) - c, np.where(c >= 1, 0.0, out))


def t_alpha_crossings(c1: float, c2: float, delta: float, grid: int = 1 << 16) -> int:
    """Sign changes of x -> c1 (1 - c2 x^delta)^(1/delta) + x - 1 on (0, 1)."""
    if not (0 < c1 < 1 and 0 < c2 < 1 and delta > 1):
        raise DomainError("need 0 < c1, c2 < 1 < delta")
    x = (np.arange(grid) + 0.5) / grid
    return _count_sign_changes(c1 * (1 - c2 * x**delta) ** (1 / delta) + x - 1)


# --------------------------------------------------------------------------
# L~_1(d, p)
# --------------------------------------------------------------------------

def ltilde_params(d: float, p: float):
    """(alpha, gamma) = (1 - d/2, 1 - 2p)."""
    if not 0 < d < 2:
        raise DomainError(f"d must lie in (0, 2), got {d}")
    if not p < 0.5:
        raise DomainError(f"p must be < 1/2, got {p}")
    return 1.0 - d / 2.0, 1.0 - 2.0 * p


def ltilde_moment(d: float, p: float, n: int, K: int = 1 << 16) -> float:
    """E[L~_1(d,p)^n] from prod_k ((k+1)/(k+alpha)) B_{gamma(1+k/alpha), gamma(1/alpha-1)}."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    alpha, gamma = ltilde_params(d, p)
    if n == 1:
        return 1.0
    lv = pp.log_ltilde_moment_scaled_beta(alpha, gamma, int(n), K)
    if not math.isfinite(lv):
        raise EvaluationError("L~ moment product did not evaluate", {"d": d, "p": p, "n": n, "K": K})
    return math.exp(lv)


def gamma_limit_moment(p: float, n: int) -> float:
    """E[((1-2p)^-1 Gamma_{1-2p})^n], the d -> 2 limit."""
    g = 1.0 - 2.0 * p
    return math.exp(special.gammaln(g + n) - special.gammaln(g) - n * math.log(g))


def bernoulli_limit_moment(alpha: float, n: int) -> float:
    """E[(c^-1 Bernoulli(c))^n] = c^(1-n), c = alpha^alpha / Gamma(1+alpha)."""
    c = alpha**alpha / math.gamma(1 + alpha)
    return c ** (1 - n)


def sample_ltilde(d: float, p: float, rng: np.random.Generator, size: int, K: int = 200) -> SampleBatch:
    """prod_{k<=K} ((k+1)/(k+alpha)) B_k times a mean-one lognormal for the omitted factors,
    its second moment matched to the exact product."""
    alpha, gamma = ltilde_params(d, p)
    b = gamma * (1 / alpha - 1)
    logs = np.zeros(size)
    for k in range(K + 1):
        a = gamma * (1 + k / alpha)
        logs += math.log((k + 1) / (k + alpha)) + np.log(rng.beta(a, b, size))
    full = pp.log_ltilde_moment_scaled_beta(alpha, gamma, 2)
    k = np.arange(0, K + 1, dtype=float)
    a = gamma * (1 + k / alpha)
    head = float(np.sum(np.log1p(1 / a) - np.log1p(1 / (a + b))))
    s2 = max(full - head, 0.0)
    logs += rng.standard_normal(size) * math.sqrt(s2) - 0.5 * s2
    return SampleBatch(np.exp(logs), label=f"L~(d={d}, p={p})", meta={"K": K, "tail_log_m2": s2})


# --------------------------------------------------------------------------
# Convex order
# --------------------------------------------------------------------------

class BetaMember:
    """B_{a,b}: exact call prices and moments."""

    def __init__(self, a, b):
        self.a, self.b = a, b

    def mean(self):
        return self.a / (self.a + self.b), 0.0

    def call(self, c):
        return beta_call(self.a, self.b, c), np.zeros(np.shape(c))

    def second_moment(self):
        a, b = self.a, self.b
        return a * (a + 1) / ((a + b) * (a + b + 1)), 0.0

    def quantiles(self, q):
        return special.betaincinv(self.a, self.b, q)


class LtildeMember:
    """L~_1(d, p): exact moments from the product, call prices by product sampling."""

    def __init__(self, d, p, rng, size=100_000, K=200):
        self.d, self.p = d, p
        self.sample = sample_ltilde(d, p, rng, size, K).values

    def mean(self):
        return 1.0, 0.0

    def call(self, c):
        c = np.atleast_1d(np.asarray(c, float))
        v = np.maximum(self.sample[None, :] - c[:, None], 0.0)
        return v.mean(axis=1), v.std(axis=1, ddof=1) / math.sqrt(self.sample.size)

    def second_moment(self):
        return ltilde_moment(self.d, self.p, 2), 0.0

    def quantiles(self, q):
        return np.quantile(self.sample, q)


@dataclass(frozen=True)
class ConvexOrderReport:
    """``expectations[i, j]`` = E[psi_j(X_{index[i]})]; psi_j are the calls
    (x - c_j)_+ for the c-grid followed by x^2."""

    index: tuple
    c_grid: np.ndarray
    expectations: np.ndarray
    stderr: np.ndarray
    direction: str
    monotone: bool
    max_violation: float


def convex_order_check(members, index, direction: str = "increasing", n_calls: int = 64,
                       mean_tol: float = 1e-6, se_mult: float = 3.0, tol: float = 1e-4) -> ConvexOrderReport:
    """Check E[psi(X_t)] monotone in t for calls over a pooled quantile c-grid and x^2.

    A violation is a step against ``direction`` larger than ``tol`` plus
    ``se_mult`` combined standard errors."""
    if direction not in ("increasing", "decreasing"):
        raise DomainError("direction must be 'increasing' or 'decreasing'")
    if len(members) != len(index) or len(members) < 2:
        raise DomainError("need at least two members, one per index value")
    means = np.array([m.mean()[0] for m in members])
    if np.ptp(means) > mean_tol:
        raise PreconditionError("family members have unequal means", {"means": means.tolist()})
    lo = min(float(m.quantiles(0.001)) for m in members)
    hi = max(float(m.quantiles(0.999)) for m in members)
    c = np.linspace(lo, hi, n_calls)
    E = np.empty((len(members), n_calls + 1))
    S = np.empty_like(E)
    for i, m in enumerate(members):
        E[i, :n_calls], S[i, :n_calls] = m.call(c)
        E[i, n_calls], S[i, n_calls] = m.second_moment()
    step = np.diff(E, axis=0)
    if direction == "decreasing":
        step = -step
    noise = se_mult * np.sqrt(S[1:] ** 2 + S[:-1] ** 2) + tol
    viol = np.maximum(-step - noise, 0.0)
    return ConvexOrderReport(tuple(index), c, E, S, direction, bool(np.all(viol == 0)),
                             float(np.max(np.maximum(-step, 0.0))))


def beta_family(a: float, b: float, ts):
    return [BetaMember(t * a, t * b) for t in ts]


def ltilde_family(ds, ps, rng, size=100_000, K=200):
    return [LtildeMember(d, p, rng, size, K) for d, p in zip(ds, ps)]


# --------------------------------------------------------------------------
# Monotonicity in alpha
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MonotonicityVerdict:
    ok: bool
    max_increase: float
    values: np.ndarray


def ml_log_values(z_grid, alpha_grid):
    """log E_alpha(Gamma(1+alpha) z) on alpha x z (E overflows for small alpha, z > 1)."""
    return np.array([[log_mittag_leffler(a, math.gamma(1 + a) * z) for z in z_grid] for a in alpha_grid])


def ml_monotonicity(z_grid, alpha_grid, slack: float = STRICT_SLACK) -> MonotonicityVerdict:
    """alpha -> E_alpha(Gamma(1+alpha) z) nonincreasing within relative ``slack`` for every z.

    Compared on the log scale; ``values`` holds the logs."""
    z_grid = np.asarray(z_grid, float)
    alpha_grid = np.asarray(alpha_grid, float)
    if np.any(np.abs(z_grid) > 5):
        raise DomainError("z grid must lie in [-5, 5]")
    if np.any((alpha_grid <= 0) | (alpha_grid >= 1)) or np.any(np.diff(alpha_grid) <= 0):
        raise DomainError("alpha grid must be increasing inside (0, 1)")
    V = ml_log_values(z_grid, alpha_grid)
    inc = np.diff(V, axis=0)
    m = float(inc.max())
    return MonotonicityVerdict(m <= slack, m, V)


def log_prefactor(a: float, b: float, alpha):
    """log of Gamma(1+(b+1)alpha) Gamma(1+(a+b)alpha) / (Gamma(1+b alpha) Gamma(1+(a+b+1)alpha))."""
    al = np.asarray(alpha, float)
    g = special.gammaln
    return g(1 + (b + 1) * al) + g(1 + (a + b) * al) - g(1 + b * al) - g(1 + (a + b + 1) * al)


def prefactor_monotone(a: float, b: float, alpha_grid) -> MonotonicityVerdict:
    """Strict decrease of the support end of T_alpha over the grid."""
    if not (a > 0 and b > 0):
        raise DomainError("a, b must be positive")
    al = np.asarray(alpha_grid, float)
    v = np.exp(log_prefactor(a, b, al))
    d = np.diff(v)
    return MonotonicityVerdict(bool(np.all(d < 0)), float(d.max()), v)

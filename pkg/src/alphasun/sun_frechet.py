"""Frechet-case objects: the exponent F, the Levy tail of the associated killed
compound Poisson process, integer moments of Y = X^(-gamma), the factor laws
of the product representation, samplers and the tail constant c_{alpha,gamma}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, EvaluationError
from .params import DistParams, MomentSequence, SampleBatch
from .specfun import DEFAULT_OPTS, EvalOptions, gauss_2f1, hyp2f1_array

EULER_GAMMA = 0.57721566490153286061


# --------------------------------------------------------------------------
# Laplace exponent and Levy tail
# --------------------------------------------------------------------------

def _F_quad(p: DistParams, lam: float) -> float:
    a, g = p.alpha, p.gamma
    e = lam * g
    if e <= 1.0:
        f = lambda x: -math.expm1(e * math.log(x)) * (1.0 - a * x) ** (-g - 1.0) if x > 0 else 1.0
        val = integrate.quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
        return 1.0 + a * g * val
    # x = exp(-s/e) in the integrated-by-parts form
    f = lambda s: math.exp(-s - s / e) * (1.0 - a * math.exp(-s / e)) ** (-g - 1.0)
    val = integrate.quad(f, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
    return (1.0 - a) ** (-g) - a * g / e * val


def laplace_exponent_F(p: DistParams, lam: float, opts: EvalOptions = DEFAULT_OPTS,
                       *, check: bool = True) -> float:
    """F(lam) = 2F1(gamma, lam*gamma; 1 + lam*gamma; alpha).

    With ``check`` the Euler-integral quadrature is evaluated as well and the
    two are required to agree to 1e-9.
    """
    if lam < 0:
        raise DomainError(f"lambda must be >= 0, got {lam}")
    if lam == 0:
        return 1.0
    g = p.gamma
    val = gauss_2f1(g, lam * g, 1.0 + lam * g, p.alpha, opts)
    if check:
        q = _F_quad(p, lam)
        if abs(q - val) > 1e-9 * val:
            raise EvaluationError("F: series and quadrature disagree",
                                  {"series": val, "quadrature": q, "lambda": lam})
    return val


def F_values(p: DistParams, ks) -> np.ndarray:
    """F on an array of nonnegative arguments (vectorised series)."""
    ks = np.asarray(ks, dtype=float)
    g = p.gamma
    return hyp2f1_array(g, ks * g, 1.0 + ks * g, p.alpha)


def levy_jump_tail(p: DistParams, t):
    """Pi(t) = (1 - alpha e^(-t/gamma))^(-gamma) - 1."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("levy_jump_tail needs t >= 0")
    a, g = p.alpha, p.gamma
    out = np.expm1(-g * np.log1p(-a * np.exp(-t / g)))
    return float(out) if out.ndim == 0 else out


def total_jump_rate(p: DistParams) -> float:
    return math.expm1(-p.gamma * math.log1p(-p.alpha))


def sample_jump(p: DistParams, u):
    """Inverse of the normalised tail: Pi(t)/Pi(0) = 1 - u."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0) | (u >= 1)):
        raise DomainError("sample_jump needs u in (0, 1)")
    a, g = p.alpha, p.gamma
    pi0 = total_jump_rate(p)
    v = -np.expm1(-np.log1p((1.0 - u) * pi0) / g)
    out = -g * np.log(v / a)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Moments
# --------------------------------------------------------------------------

def log_moments_Y(p: DistParams, N: int) -> np.ndarray:
    """log E[Y^n] for n = 1..N, accumulated in log space."""
    k = np.arange(1, N + 1, dtype=float)
    return np.cumsum(np.log(k) - np.log(F_values(p, k)))


def moment_Y(p: DistParams, n: int) -> float:
    """E[Y^n] = prod_{k<=n} k/F(k); n = 0 gives the empty product."""
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    if n == 0:
        return 1.0
    return float(math.exp(log_moments_Y(p, int(n))[-1]))


def moments_Y(p: DistParams, N: int) -> MomentSequence:
    return MomentSequence(tuple(np.exp(log_moments_Y(p, N))), "Y-positive")


def G_factor(p: DistParams, k: float, opts: EvalOptions = DEFAULT_OPTS) -> float:
    """G(k) = 2F1(gamma, 1; 1 + k gamma; alpha/(alpha-1)).

    Evaluated through the Pfaff form that pulls out (1-z)^(-b), which does not
    reduce to the series used for F; (1-alpha)^gamma F(k) = G(k) is then a
    genuine identity check.
    """
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    a, g = p.alpha, p.gamma
    return gauss_2f1(g, 1.0, 1.0 + k * g, a / (a - 1.0), opts, pfaff="b")


def _G_minus_one(p: DistParams, ks: np.ndarray) -> np.ndarray:
    # (1 - alpha) 2F1(1 + k g - g, 1; 1 + k g; alpha) - 1, vectorised
    a, g = p.alpha, p.gamma
    c = 1.0 + ks * g
    s = hyp2f1_array(c - g, 1.0, c, a)
    return (1.0 - a) * (s - 1.0) - a


# --------------------------------------------------------------------------
# The constant c_{alpha,gamma}
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantReport:
    """Both routes to c_{alpha,gamma} and their bookkeeping.

    ``product`` is the infinite-product value, ``asymptotic`` the value
    recovered from large-moment asymptotics, ``c_prime`` the prefactor of
    E[Y^n]/(n! n^beta (1-alpha)^(gamma n)) and ``density_prefactor`` the
    constant c in g(y) ~ c y^beta exp(-(1-alpha)^(-gamma) y).
    """

    alpha: float
    gamma: float
    product: float
    asymptotic: float
    c_prime: float
    density_prefactor: float
    truncation: int
    tail_sum: float
    tail_uncertainty: float
    fit_residual: float

    @property
    def rel_diff(self) -> float:
        return abs(self.product - self.asymptotic) / self.product


def _product_log_sum(p: DistParams, K: int):
    """sum_{k>=1} [alpha/((alpha-1)k) - log G(k)] with a fitted k^-j tail."""
    a = p.alpha
    k = np.arange(1, K + 1, dtype=float)
    terms = a / ((a - 1.0) * k) - np.log1p(_G_minus_one(p, k))
    head = math.fsum(terms)
    if not np.isfinite(head):
        raise EvaluationError("non-finite product terms", {"K": K})
    block = slice(K // 2, K)
    kk = k[block]
    fits = []
    for deg in (3, 4):
        X = np.stack([kk ** (-j) for j in range(2, deg + 1)], axis=1)
        coef = np.linalg.lstsq(X, terms[block], rcond=None)[0]
        fits.append(sum(cj * special.zeta(j, K + 1.0) for j, cj in zip(range(2, deg + 1), coef)))
    return head + fits[1], fits[1], abs(fits[1] - fits[0])


def _asymptotic_log_cprime(p: DistParams, n_lo: int = 50, n_hi: int = 400, degree: int = 6):
    lm = log_moments_Y(p, n_hi)
    n = np.arange(n_lo, n_hi + 1, dtype=float)
    r = (lm[n_lo - 1:] - special.gammaln(n + 1.0) - p.beta * np.log(n)
         - p.gamma * n * math.log1p(-p.alpha))
    X = np.stack([n ** (-j) for j in range(degree + 1)], axis=1)
    coef, *_ = np.linalg.lstsq(X, r, rcond=None)
    resid = float(np.max(np.abs(X @ coef - r)))
    return float(coef[0]), resid


def c_constant_report(p: DistParams, K: int = 1 << 15, tol: float = 1e-9) -> ConstantReport:
    a, g = p.alpha, p.gamma
    s, tail, unc = _product_log_sum(p, K)
    if unc > tol:
        raise EvaluationError("product tail for c_{alpha,gamma} not resolved",
                              {"K": K, "tail": tail, "uncertainty": unc})
    log_c = (math.log(g) + g / (a - 1.0) * math.log1p(-a)
             - a * EULER_GAMMA / (a - 1.0) + s)
    lcp, resid = _asymptotic_log_cprime(p)
    # c' = c (1-alpha)^(gamma/(1-alpha)) / gamma
    log_c_asym = lcp + math.log(g) - g / (1.0 - a) * math.log1p(-a)
    c = math.exp(log_c)
    return ConstantReport(
        alpha=a, gamma=g, product=c, asymptotic=math.exp(log_c_asym),
        c_prime=math.exp(log_c + g / (1.0 - a) * math.log1p(-a)) / g,
        density_prefactor=c / g, truncation=K, tail_sum=float(tail),
        tail_uncertainty=float(unc), fit_residual=resid,
    )


def c_constant(p: DistParams) -> float:
    """c_{alpha,gamma}: the left-tail constant of the density of X."""
    return c_constant_report(p).product


# --------------------------------------------------------------------------
# Factor laws and samplers
# --------------------------------------------------------------------------

def factor_moment(p: DistParams, k: int, n: float) -> float:
    """E[Y_k^n] = k F(k+n) / ((k+n) F(k))."""
    return k * laplace_exponent_F(p, k + n, check=False) / (
        (k + n) * laplace_exponent_F(p, k, check=False))


def factor_sample_Y(p: DistParams, k: int, rng: np.random.Generator, size=None):
    """Exact draws of Y_k by rejection from the density k x^(k-1).

    Acceptance probability (1-alpha)^gamma (1 - alpha x^(1/gamma))^(-gamma).
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    a, g = p.alpha, p.gamma
    m = 1 if size is None else int(np.prod(size))
    out = np.empty(m)
    filled = 0
    floor = math.log1p(-a)
    while filled < m:
        want = m - filled
        n_try = int(want / (1 - a) ** g) + 16
        x = rng.random(n_try) ** (1.0 / k)
        logacc = g * (floor - np.log1p(-a * x ** (1.0 / g)))
        keep = x[np.log(rng.random(n_try)) < logacc][:want]
        out[filled:filled + keep.size] = keep
        filled += keep.size
    return float(out[0]) if size is None else out.reshape(size)


def _mixture_tables(p: DistParams, K: int, tol: float = 1e-17):
    """Cumulative weights of J in the exponential-mixture form of the factors.

    -log Y_k given J = j is Exp(k + j/gamma), with
    P(J = j) proportional to (gamma)_j alpha^j / j! * k gamma / (k gamma + j).
    """
    a, g = p.alpha, p.gamma
    jmax = 64
    while True:
        j = np.arange(jmax, dtype=float)
        logw = special.gammaln(g + j) - special.gammaln(g) - special.gammaln(j + 1) + j * math.log(a)
        if logw[-1] < math.log(tol) - 5 and np.all(np.diff(logw[-8:]) < 0):
            break
        jmax *= 2
    k = np.arange(1, K + 1, dtype=float)[:, None]
    w = np.exp(logw)[None, :] * (k * g / (k * g + j[None, :]))
    cum = np.cumsum(w, axis=1)
    cum /= cum[:, -1:]
    return cum


def truncation_moment_ratio(log_phi, K: int, n: int) -> float:
    """E[T^n] for the omitted tail T = prod_{k>K} c_k Y_k.

    ``log_phi`` maps an array of arguments to log of the killed exponent.
    The telescoping product gives prod_{j<=n} (K+j) Phi(K+1) / ((K+1) Phi(K+j)).
    """
    j = np.arange(1, n + 1, dtype=float)
    lp = log_phi(K + j)
    lp1 = log_phi(np.array([K + 1.0]))[0]
    return float(np.exp(np.sum(np.log(K + j) - math.log(K + 1.0) + lp1 - lp)))


def lognormal_tail_factor(rng, size, m2: float):
    """Mean-one lognormal with second moment m2."""
    s2 = math.log(m2)
    return np.exp(math.sqrt(s2) * rng.standard_normal(size) - 0.5 * s2)


def sample_Y_product(p: DistParams, K: int, rng: np.random.Generator, size: int,
                     *, tail: str = "lognormal", chunk: int = 200_000) -> SampleBatch:
    """Draws of Y from the truncated product representation.

    Y = (1/F(1)) prod_k ((k+1)F(k)/(kF(k+1))) Y_k.  The omitted factors
    k > K have mean one jointly but shrink the n-th moment by roughly
    n(n-1)/(2K); ``tail="lognormal"`` multiplies by an independent mean-one
    lognormal matching their exact second moment, ``tail="none"`` keeps the
    bare truncation.
    """
    if K < 8:
        raise DomainError("K must be >= 8")
    if tail not in ("lognormal", "none"):
        raise DomainError(f"unknown tail treatment {tail!r}")
    g = p.gamma
    ks = np.arange(1, K + 2, dtype=float)
    logF = np.log(F_values(p, ks))
    log_pref = -logF[0] + np.sum(np.log(ks[1:K + 1]) - np.log(ks[:K]) + logF[:K] - logF[1:K + 1])
    cum = _mixture_tables(p, K)
    rates_j = np.arange(cum.shape[1]) / g
    m2 = truncation_moment_ratio(lambda x: np.log(F_values(p, x)), K, 2)
    out = np.empty(size)
    for start in range(0, size, chunk):
        m = min(chunk, size - start)
        acc = np.zeros(m)
        for k in range(1, K + 1):
            jdx = np.searchsorted(cum[k - 1], rng.random(m), side="right")
            np.minimum(jdx, cum.shape[1] - 1, out=jdx)
            acc += rng.standard_exponential(m) / (k + rates_j[jdx])
        y = np.exp(log_pref - acc)
        if tail == "lognormal":
            y *= lognormal_tail_factor(rng, m, m2)
        out[start:start + m] = y
    return SampleBatch(out, label=f"Y product K={K}",
                       meta={"alpha": p.alpha, "gamma": g, "K": K, "tail": tail})


def sample_X_product(p: DistParams, K: int, rng: np.random.Generator, size: int) -> SampleBatch:
    """X = Y^(-1/gamma) from the product sampler."""
    y = sample_Y_product(p, K, rng, size)
    return SampleBatch(y.values ** (-1.0 / p.gamma), label=f"X product K={K}", meta=dict(y.meta))


def sample_Y_perpetuity(p: DistParams, rng: np.random.Generator, size: int) -> SampleBatch:
    """Y as the exponential functional of the killed compound Poisson process.

    Events arrive at rate 1 + Pi(0); each is a kill with probability
    1/(1 + Pi(0)), otherwise a jump drawn by tail inversion.  The functional
    sum_i exp(-sigma_i) tau_i is exact, no truncation.
    """
    pi0 = total_jump_rate(p)
    rate = 1.0 + pi0
    out = np.zeros(size)
    disc = np.ones(size)
    alive = np.arange(size)
    while alive.size:
        tau = rng.standard_exponential(alive.size) / rate
        out[alive] += disc[alive] * tau
        jump = rng.random(alive.size) * rate >= 1.0
        alive = alive[jump]
        u = rng.random(alive.size)
        u = np.clip(u, 1e-300, 1 - 1e-16)
        disc[alive] *= np.exp(-sample_jump(p, u))
    return SampleBatch(out, label="Y perpetuity", meta={"alpha": p.alpha, "gamma": p.gamma})

"""Perpetuities of subordinators and their multiplicative factorization.

A (possibly killed) subordinator is given by (q, b, pi) with killing rate q,
drift b and jump tail pi(t, inf).  Its exponent satisfies

    Phi(lam)/lam = b + int_0^1 x^(lam-1) (q + pi(-log x, inf)) dx,

the perpetuity I = int_0^inf exp(-sigma_t) dt has moments prod_{k<=n} k/Phi(k),
and I equals in law (1/Phi(1)) prod_k ((k+1)Phi(k)/(k Phi(k+1))) Y_k with
independent factors Y_k whose laws are built from (q, b, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from . import sun_frechet as fr
from . import sun_weibull as wb
from .errors import ConfigurationError, DomainError, EvaluationError
from .params import DistParams, MomentSequence, SampleBatch

_QOPTS = dict(epsabs=0.0, epsrel=1e-12, limit=400)


@dataclass(frozen=True)
class SubordinatorSpec:
    """Characteristics (q, b, pi) of a subordinator.

    ``tail`` maps t > 0 (array) to pi(t, inf).  ``tail_inverse`` maps v in
    (0, total_mass) to the t with pi(t, inf) = v.  ``phi`` is an optional
    closed-form exponent.  ``tail_singularity`` is theta in pi(t) ~ t^-theta
    as t -> 0 (0 for finite activity) and ``jump_support`` the right end of
    the Levy measure.
    """

    q: float
    b: float
    tail: Callable
    total_mass: float
    label: str = ""
    tail_inverse: Optional[Callable] = None
    phi: Optional[Callable] = None
    tail_singularity: float = 0.0
    jump_support: float = math.inf
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.q < 0 or self.b < 0:
            raise DomainError("q and b must be nonnegative")
        if not self.total_mass >= 0:
            raise DomainError("total_mass must be nonnegative")
        if self.q == 0 and self.b == 0 and self.total_mass == 0:
            raise DomainError("(q, b, pi) must not all vanish")
        if not 0 <= self.tail_singularity < 1:
            raise DomainError("tail_singularity must lie in [0, 1)")

    @property
    def infinite_activity(self) -> bool:
        return math.isinf(self.total_mass)

    def exponent(self, lam):
        """Phi at lam (scalar or array): closed form when available."""
        if self.phi is not None:
            return self.phi(lam)
        lam = np.asarray(lam, dtype=float)
        out = np.array([laplace_exponent(self, float(x)) for x in lam.ravel()]).reshape(lam.shape)
        return float(out) if out.ndim == 0 else out

    def log_exponent(self, lam):
        return np.log(self.exponent(lam))


# --------------------------------------------------------------------------
# Exponent and moments
# --------------------------------------------------------------------------

def laplace_exponent(spec: SubordinatorSpec, lam: float) -> float:
    """Phi(lam) = q + b lam + int_0^inf e^(-s) pi(s/lam, inf) ds by quadrature.

    The last term is lam int_0^1 x^(lam-1) pi(-log x, inf) dx after x = e^(-s/lam).
    """
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    th = spec.tail_singularity
    if spec.total_mass == 0:
        return spec.q + spec.b * lam
    top = lam * spec.jump_support
    f = lambda s: math.exp(-s) * float(spec.tail(max(s, 1e-300) / lam))
    info = {}
    try:
        s1 = min(1.0, top)
        if th > 0:
            head = integrate.quad(lambda s: f(s) * s**th, 0.0, s1, weight="alg", wvar=(-th, 0.0), **_QOPTS)
        else:
            head = integrate.quad(f, 0.0, s1, **_QOPTS)
        rest = (0.0, 0.0)
        if s1 < top:
            hi = min(top, 800.0)
            rest = integrate.quad(f, s1, hi, **_QOPTS)
        info = {"head": head, "rest": rest}
        val = head[0] + rest[0]
    except Exception as exc:  # quad signals failures as warnings or errors
        raise EvaluationError("exponent quadrature failed", {"lambda": lam, "error": repr(exc)}) from exc
    if not math.isfinite(val):
        raise EvaluationError("exponent quadrature failed", dict(info, **{"lambda": lam}))
    return spec.q + spec.b * lam + val


def log_perpetuity_moments(spec: SubordinatorSpec, N: int) -> np.ndarray:
    k = np.arange(1, N + 1, dtype=float)
    return np.cumsum(np.log(k) - spec.log_exponent(k))


def perpetuity_moment(spec: SubordinatorSpec, n: int) -> float:
    """E[I^n] = prod_{k<=n} k/Phi(k)."""
    if n < 0 or int(n) != n:
        raise DomainError("n must be a nonnegative integer")
    if n == 0:
        return 1.0
    return float(math.exp(log_perpetuity_moments(spec, int(n))[-1]))


def perpetuity_moments(spec: SubordinatorSpec, N: int) -> MomentSequence:
    return MomentSequence(tuple(np.exp(log_perpetuity_moments(spec, N))), "perpetuity")


# --------------------------------------------------------------------------
# Factor laws
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorLaw:
    """Law of Y_k: an atom bk/Phi(k) at 1 plus k x^(k-1)(q + pi(-log x))/Phi(k) dx."""

    k: int
    phi_k: float
    atom_weight: float
    spec: SubordinatorSpec

    def ac_density(self, x):
        x = np.asarray(x, dtype=float)
        s = self.spec
        return self.k * x ** (self.k - 1) * (s.q + s.tail(-np.log(x))) / self.phi_k

    def ac_mass(self) -> float:
        # in v = -log x the density is k e^(-kv)(q + pi(v))/Phi(k)
        s, k = self.spec, self.k
        th = s.tail_singularity
        f = lambda v: k * math.exp(-k * v) * (s.q + float(s.tail(max(v, 1e-300)))) / self.phi_k
        top = min(s.jump_support, 1.0 / k)
        if th > 0:
            head = integrate.quad(lambda v: f(v) * v**th, 0.0, top, weight="alg", wvar=(-th, 0.0), **_QOPTS)[0]
        else:
            head = integrate.quad(f, 0.0, top, **_QOPTS)[0]
        tail = 0.0
        if s.jump_support > top:
            tail = integrate.quad(f, top, min(s.jump_support, 800.0 / k), **_QOPTS)[0]
        if s.q > 0 and s.jump_support < math.inf:
            lo = s.jump_support
            tail += s.q * math.exp(-k * lo) / self.phi_k
        return head + tail

    def moment(self, n: float) -> float:
        """E[Y_k^n] = k Phi(k+n)/((k+n) Phi(k))."""
        return self.k * float(self.spec.exponent(self.k + n)) / ((self.k + n) * self.phi_k)


def factor_law(spec: SubordinatorSpec, k: int) -> FactorLaw:
    if k < 1:
        raise DomainError("k must be >= 1")
    ph = float(spec.exponent(float(k)))
    return FactorLaw(k=k, phi_k=ph, atom_weight=spec.b * k / ph, spec=spec)


class _InverseCDFTable:
    """Monotone inverse-CDF table for the continuous part of Y_k, in v = -log x.

    Nodes are log-spaced in v; the first cell uses the power law
    v^(1-theta) implied by the tail singularity.
    """

    def __init__(self, spec: SubordinatorSpec, k: int, phi_k: float, points: int = 4096):
        th = spec.tail_singularity
        v = np.geomspace(1e-12 / k, 60.0 / k, points)
        gl_x, gl_w = np.polynomial.legendre.leggauss(8)
        lv = np.log(v)
        mid, half = 0.5 * (lv[1:] + lv[:-1]), 0.5 * np.diff(lv)
        nodes = np.exp(mid[:, None] + half[:, None] * gl_x[None, :])
        dens = lambda t: k * np.exp(-k * t) * (spec.q + spec.tail(t)) / phi_k
        cells = np.sum(dens(nodes) * nodes * gl_w[None, :], axis=1) * half
        first = dens(v[:1])[0] * v[0] / (1.0 - th)
        cdf = np.concatenate([[first], first + np.cumsum(cells)])
        self.v, self.cdf, self.theta = v, cdf, th
        self.mass = float(cdf[-1])

    def sample_v(self, u):
        """Map u in (0, mass) to v."""
        out = np.empty_like(u)
        lo = u < self.cdf[0]
        out[lo] = self.v[0] * (u[lo] / self.cdf[0]) ** (1.0 / (1.0 - self.theta))
        hi = ~lo
        out[hi] = np.exp(np.interp(u[hi], self.cdf, np.log(self.v)))
        return out


def sample_factor(spec: SubordinatorSpec, k: int, rng: np.random.Generator, size: int,
                  *, table: bool = True, _cache: dict | None = None) -> np.ndarray:
    """Draws of Y_k.

    Bounded tails use rejection from k x^(k-1) with acceptance
    (q + pi(-log x))/(q + total_mass); unbounded tails need the inverse-CDF
    table (``table=True``).
    """
    law = factor_law(spec, k)
    out = np.ones(size)
    cont = rng.random(size) >= law.atom_weight
    m = int(cont.sum())
    if m == 0:
        return out
    if spec.total_mass == 0:
        out[cont] = rng.random(m) ** (1.0 / k)
        return out
    if not spec.infinite_activity:
        bound = spec.q + spec.total_mass
        draws = np.empty(m)
        filled = 0
        while filled < m:
            want = m - filled
            n_try = int(want * bound / max(law.phi_k - spec.b * k, 1e-12) * 1.1) + 16
            x = rng.random(n_try) ** (1.0 / k)
            acc = (spec.q + spec.tail(-np.log(x))) / bound
            keep = x[rng.random(n_try) < acc][:want]
            draws[filled:filled + keep.size] = keep
            filled += keep.size
        out[cont] = draws
        return out
    if not table:
        raise ConfigurationError(f"spec {spec.label!r} has an unbounded tail; an inverse-CDF table is required")
    key = (id(spec), k)
    tab = _cache.get(key) if _cache is not None else None
    if tab is None:
        tab = _InverseCDFTable(spec, k, law.phi_k)
        if _cache is not None:
            _cache[key] = tab
    out[cont] = np.exp(-tab.sample_v(rng.random(m) * tab.mass))
    return out


def log_product_prefactor(log_phi: np.ndarray, K: int) -> float:
    """log of (1/Phi(1)) prod_{k<=K} (k+1)Phi(k)/(k Phi(k+1)); log_phi[i] = log Phi(i+1)."""
    ks = np.arange(1, K + 1, dtype=float)
    return float(-log_phi[0] + np.sum(np.log(ks + 1) - np.log(ks) + log_phi[:K] - log_phi[1:K + 1]))


def sample_product(spec: SubordinatorSpec, K: int, rng: np.random.Generator, size: int,
                   *, tail: str = "lognormal") -> SampleBatch:
    """Truncated factorization of the perpetuity.

    The omitted factors k > K have product mean one but raise the second
    moment by M_2(K) = (K+2)Phi(K+1)/((K+1)Phi(K+2)); ``tail="lognormal"``
    multiplies by an independent mean-one lognormal with that second moment.
    """
    if K < 8:
        raise DomainError("K must be >= 8")
    if tail not in ("lognormal", "none"):
        raise DomainError(f"unknown tail treatment {tail!r}")
    lphi = spec.log_exponent(np.arange(1, K + 2, dtype=float))
    acc = np.full(size, log_product_prefactor(lphi, K))
    cache: dict = {}
    for k in range(1, K + 1):
        acc += np.log(sample_factor(spec, k, rng, size, _cache=cache))
    y = np.exp(acc)
    if tail == "lognormal":
        m2 = fr.truncation_moment_ratio(spec.log_exponent, K, 2)
        y *= fr.lognormal_tail_factor(rng, size, m2)
    return SampleBatch(y, label=f"{spec.label} product K={K}", meta={"K": K, "tail": tail, **spec.params})


def sample_beta_product(a: float, b: float, K: int, rng: np.random.Generator, size: int) -> SampleBatch:
    """B_{a,b} through its size-biased factorization.

    B_{a,b} = (a/(a+b)) prod_{k>=0} ((k+a+1)(k+a+b)/((k+a)(k+a+b+1))) Y_k with
    Y_k equal to 1 with probability (k+a)/(k+a+b), else x^(k+a-1)-distributed.
    """
    if not (a > 0 and b > 0):
        raise DomainError("a, b must be positive")
    ks = np.arange(0, K + 1, dtype=float)
    logc = np.log(ks + a + 1) + np.log(ks + a + b) - np.log(ks + a) - np.log(ks + a + b + 1)
    acc = np.full(size, math.log(a / (a + b)) + float(np.sum(logc)))
    for k in ks:
        jump = rng.random(size) >= (k + a) / (k + a + b)
        acc[jump] += np.log(rng.random(int(jump.sum()))) / (k + a)
    y = np.exp(acc)
    # omitted factors: same lognormal treatment, M_2 from the beta moments
    m2 = math.exp(_log_beta_tail_m2(a, b, K))
    y *= fr.lognormal_tail_factor(rng, size, m2)
    return SampleBatch(y, label=f"beta({a},{b}) product K={K}", meta={"a": a, "b": b, "K": K})


def _log_beta_tail_m2(a, b, K):
    # prod_{k>K} c_k^2 E[Y_k^2] telescopes as in the perpetuity case with Phi(x) = x + b shifted by a
    x1, x2 = K + 1 + a, K + 2 + a
    return math.log(x2 / x1) + math.log(x1 + b) - math.log(x2 + b)


# --------------------------------------------------------------------------
# Monte Carlo of the perpetuity itself
# --------------------------------------------------------------------------

def small_jump_mean(spec: SubordinatorSpec, eps: float) -> float:
    """int_0^eps t pi(dt) = int_0^eps pi(s) ds - eps pi(eps)."""
    th = spec.tail_singularity
    if th > 0:
        val = integrate.quad(lambda s: float(spec.tail(max(s, 1e-300))) * max(s, 1e-300)**th, 0.0, eps,
                             weight="alg", wvar=(-th, 0.0), **_QOPTS)[0]
    else:
        val = integrate.quad(lambda s: float(spec.tail(s)), 0.0, eps, **_QOPTS)[0]
    return val - eps * float(spec.tail(eps))


class _TailInverseTable:
    """Numerical pi^-1 on [eps, inf), log-log linear interpolation."""

    def __init__(self, spec, eps, points=20000):
        hi = spec.jump_support if math.isfinite(spec.jump_support) else 800.0
        t = np.geomspace(eps, hi, points)
        v = spec.tail(t)
        keep = v > 1e-300
        self.lt, self.lv = np.log(t[keep])[::-1], np.log(v[keep])[::-1]

    def __call__(self, v):
        return np.exp(np.interp(np.log(v), self.lv, self.lt))


def simulate_perpetuity(spec: SubordinatorSpec, rng: np.random.Generator, size: int,
                        eps: float = 1e-13, jump_eps: float | None = None,
                        chunk: int = 250_000) -> SampleBatch:
    """Direct simulation of int_0^inf exp(-sigma_t) dt.

    Compound Poisson paths are simulated event by event (rate q + mass of
    jumps, killing ends the path) with the integral accumulated exactly
    between events.  Without killing a path stops once exp(-sigma) < eps and
    the exact conditional mean exp(-sigma)/Phi(1) of the remainder is added.
    For infinite activity, jumps below ``jump_eps`` become a drift equal to
    their mean.
    """
    if spec.infinite_activity:
        if jump_eps is None:
            raise ConfigurationError(f"spec {spec.label!r} has infinite activity; jump_eps is required")
        drift = spec.b + small_jump_mean(spec, jump_eps)
        mass = float(spec.tail(jump_eps))
        inv = _TailInverseTable(spec, jump_eps)
    else:
        drift, mass = spec.b, spec.total_mass
        inv = spec.tail_inverse
        if inv is None and mass > 0:
            inv = _TailInverseTable(spec, 1e-12)
    q = spec.q
    if q == 0 and drift == 0 and mass == 0:
        raise ConfigurationError("degenerate subordinator")
    rate = q + mass
    phi1 = float(spec.exponent(1.0))
    out = np.empty(size)
    for start in range(0, size, chunk):
        m = min(chunk, size - start)
        acc = np.zeros(m)
        disc = np.ones(m)
        alive = np.arange(m)
        while alive.size:
            if rate > 0:
                tau = rng.standard_exponential(alive.size) / rate
            else:
                tau = np.full(alive.size, np.inf)
            if drift > 0:
                acc[alive] += disc[alive] * -np.expm1(-drift * tau) / drift
                step = np.exp(-drift * tau)
            else:
                acc[alive] += disc[alive] * tau
                step = 1.0
            disc[alive] *= step
            if rate == 0:
                break
            u = rng.random(alive.size) * rate
            jumped = u >= q
            alive = alive[jumped]
            if alive.size == 0:
                break
            v = np.clip(u[jumped] - q, 1e-300, None)
            disc[alive] *= np.exp(-inv(np.minimum(v, mass * (1 - 1e-15))))
            if q == 0:
                done = disc[alive] < eps
                fin = alive[done]
                acc[fin] += disc[fin] / phi1
                alive = alive[~done]
        out[start:start + m] = acc
    return SampleBatch(out, label=f"{spec.label} perpetuity",
                       meta={"eps": eps, "jump_eps": jump_eps, **spec.params})


# --------------------------------------------------------------------------
# Built-in specs
# --------------------------------------------------------------------------

def _alpha_sun(alpha, gamma):
    p = DistParams(alpha, gamma)
    a, g = p.alpha, p.gamma

    def inv(v):
        v = np.asarray(v, float)
        return -g * np.log(-np.expm1(-np.log1p(v) / g) / a)

    return SubordinatorSpec(
        q=1.0, b=0.0, tail=lambda t: fr.levy_jump_tail(p, np.maximum(t, 0.0)),
        total_mass=fr.total_jump_rate(p), label="alpha_sun", tail_inverse=inv,
        phi=lambda lam: fr.F_values(p, lam), params={"alpha": a, "gamma": g})


def _alpha_sun_hat(alpha, gamma):
    p = DistParams(alpha, gamma)
    a, g = p.alpha, p.gamma

    def inv(v):
        v = np.asarray(v, float)
        return g * np.log((1.0 - v ** (1.0 / g)) / a)

    return SubordinatorSpec(
        q=0.0, b=0.0, tail=lambda t: wb.levy_jump_tail_hat(p, np.maximum(t, 0.0)),
        total_mass=(1 - a) ** g, label="alpha_sun_hat", tail_inverse=inv,
        phi=lambda lam: _vec(lambda x: wb.phi_hat(p, x), lam),
        jump_support=wb.jump_support_hat(p), params={"alpha": a, "gamma": g})


def _jumpless(q, b):
    q, b = float(q), float(b)
    return SubordinatorSpec(q=q, b=b, tail=lambda t: np.zeros_like(np.asarray(t, float)),
                            total_mass=0.0, label="jumpless", phi=lambda lam: q + b * np.asarray(lam, float),
                            params={"q": q, "b": b})


def bessel_tail(alpha, gamma, t):
    """pi(t, inf) = C x^gamma (1 - x^(gamma/alpha))^(-alpha) at x = e^(-t), C = (gamma/2)^alpha/Gamma(1+alpha)."""
    t = np.asarray(t, float)
    C = (gamma / 2.0) ** alpha / math.gamma(1.0 + alpha)
    with np.errstate(divide="ignore"):
        out = C * np.exp(-gamma * t) * (-np.expm1(-gamma * t / alpha)) ** (-alpha)
    return out


def bessel_phi(alpha, gamma, lam):
    """Phi(lam) = C (alpha/gamma) lam B(alpha(1 + lam/gamma), 1 - alpha)."""
    lam = np.asarray(lam, float)
    C = (gamma / 2.0) ** alpha / math.gamma(1.0 + alpha)
    x = alpha * (1.0 + lam / gamma)
    lb = special.gammaln(x) + special.gammaln(1.0 - alpha) - special.gammaln(x + 1.0 - alpha)
    out = C * alpha / gamma * lam * np.exp(lb)
    return float(out) if out.ndim == 0 else out


def _bessel(alpha, gamma):
    p = DistParams(alpha, gamma)
    a, g = p.alpha, p.gamma
    return SubordinatorSpec(q=0.0, b=0.0, tail=lambda t: bessel_tail(a, g, t), total_mass=math.inf,
                            label="bessel_local_time", phi=lambda lam: bessel_phi(a, g, lam),
                            tail_singularity=a, params={"alpha": a, "gamma": g})


def _vec(f, x):
    x = np.asarray(x, float)
    out = np.array([f(float(v)) for v in x.ravel()]).reshape(x.shape)
    return float(out) if out.ndim == 0 else out


BUILTIN_SPECS = {
    "alpha_sun": _alpha_sun,
    "alpha_sun_hat": _alpha_sun_hat,
    "jumpless": _jumpless,
    "bessel_local_time": _bessel,
}


def builtin_spec(name: str, *args) -> SubordinatorSpec:
    """alpha_sun(alpha, gamma), alpha_sun_hat(alpha, gamma), jumpless(q, b), bessel_local_time(alpha, gamma)."""
    try:
        make = BUILTIN_SPECS[name]
    except KeyError:
        raise ConfigurationError(f"unknown spec {name!r}; known: {sorted(BUILTIN_SPECS)}") from None
    if len(args) == 1 and isinstance(args[0], DistParams):
        args = (args[0].alpha, args[0].gamma)
    return make(*args)


def ggc_condition(alpha: float, gamma: float) -> bool:
    """Sufficient condition for the inverse local time at one to be a GGC."""
    return bool((1 - alpha) * gamma >= alpha or 1 <= gamma <= 2)


# --------------------------------------------------------------------------
# Beta-product identities for the Bessel local time
# --------------------------------------------------------------------------

def log_gamma_ratio(a, s):
    """log Gamma(a+s) - log Gamma(a), accurate for large a (Stirling differences)."""
    a = np.asarray(a, float)
    s = np.broadcast_to(np.asarray(s, float), a.shape)
    out = np.empty(a.shape)
    small = a < 30
    out[small] = special.gammaln(a[small] + s[small]) - special.gammaln(a[small])
    x, d = a[~small], s[~small]
    y = x + d
    lead = (x - 0.5) * np.log1p(d / x) + d * np.log(y) - d
    corr = np.zeros_like(x)
    for B, j in ((1 / 6, 1), (-1 / 30, 2), (1 / 42, 3), (-1 / 30, 4), (5 / 66, 5)):
        corr += B / (2 * j * (2 * j - 1)) * (y ** (1 - 2 * j) - x ** (1 - 2 * j))
    out[~small] = lead + corr
    return out


def _log_beta_power_moment(a, b, s):
    """log E[B_{a,b}^s]."""
    return log_gamma_ratio(a, s) - log_gamma_ratio(a + b, s)


def _sum_with_tail(terms, k):
    """sum over k >= k[0] with a C2/k^2 + C3/k^3 + C4/k^4 tail fitted on the last half."""
    K = k[-1]
    blk = slice(len(k) // 2, len(k))
    X = np.stack([k[blk] ** (-j) for j in (2, 3, 4)], axis=1)
    coef = np.linalg.lstsq(X, terms[blk], rcond=None)[0]
    tail = sum(c * special.zeta(j, K + 1.0) for c, j in zip(coef, (2, 3, 4)))
    return math.fsum(terms) + tail


def log_ltilde_moment_scaled_beta(alpha, gamma, n, K=1 << 17):
    """log E[L~^n] from (k+1)/(k+alpha) scaled beta factors, k >= 0."""
    k = np.arange(0, K + 1, dtype=float)
    a = gamma * (1 + k / alpha)
    b = gamma * (1 / alpha - 1)
    j = np.arange(n, dtype=float)[:, None]
    # E[B^n]/E[B]^n = prod_j (1 + j/a)/(1 + j/(a+b)) for integer n
    terms = np.sum(np.log1p(j / a[None, :]) - np.log1p(j / (a + b)[None, :]), axis=0)
    return _sum_with_tail(terms, k + 1.0)


def log_ltilde_moment_power_product(alpha, gamma, s, K=1 << 17, k0=0):
    """log E[L~^s] from the product of normalised beta powers: prod_{k>=k0} E[Z_k^(s a/g)]/E[Z_k^(a/g)]^s."""
    k = np.arange(k0, K + 1, dtype=float)
    A = alpha * (1 + k / gamma)
    B = 1.0 - alpha
    r = alpha / gamma
    terms = _log_beta_power_moment(A, B, s * r) - s * _log_beta_power_moment(A, B, r)
    return _sum_with_tail(terms, k + 1.0)


def log_zhat_product(alpha, gamma, m, K=1 << 17):
    """log prod_{k>=0} E[Z_k^m]/E[Z_k]^m for integer m."""
    k = np.arange(0, K + 1, dtype=float)
    A = alpha * (1 + k / gamma)
    Bsum = A + 1 - alpha
    j = np.arange(m, dtype=float)[:, None]
    terms = np.sum(np.log1p(j / A[None, :]) - np.log1p(j / Bsum[None, :]), axis=0)
    return _sum_with_tail(terms, k + 1.0)


@dataclass(frozen=True)
class BesselIdentityReport:
    alpha: float
    gamma: float
    n: int
    scaled_beta: float
    power_product: float
    power_product_lhs: float
    power_product_rhs: float
    perpetuity_exact: float
    perpetuity_product: float

    @property
    def max_rel_error(self) -> float:
        r1 = abs(self.power_product / self.scaled_beta - 1)
        r2 = abs(self.power_product_rhs / self.power_product_lhs - 1)
        r3 = abs(self.perpetuity_product / self.perpetuity_exact - 1)
        return max(r1, r2, r3)


def bessel_identities(alpha: float, gamma: float, n: int, K: int = 1 << 17) -> BesselIdentityReport:
    """Check the beta-product identities for the Bessel local time at order n.

    * scaled-beta product vs beta-power product: E[L~^n] both ways.
    * power identity: E[L~^(m gamma/alpha)] = E[L~^(gamma/alpha)]^m prod E[Z_k^m]/E[Z_k]^m,
      evaluated at m = n.
    * perpetuity: Phi(1)^n prod_{j<=n} j/Phi(j) = prod_{k>=1} E[Y_k^n]/E[Y_k]^n.
    """
    sb = math.exp(log_ltilde_moment_scaled_beta(alpha, gamma, n, K))
    pw = math.exp(log_ltilde_moment_power_product(alpha, gamma, n, K))
    s = gamma / alpha
    lhs = math.exp(log_ltilde_moment_power_product(alpha, gamma, n * s, K))
    rhs = math.exp(n * log_ltilde_moment_power_product(alpha, gamma, s, K) + log_zhat_product(alpha, gamma, n, K))
    spec = _bessel(alpha, gamma)
    exact = math.exp(n * math.log(spec.exponent(1.0)) + log_perpetuity_moments(spec, n)[-1])
    prod = math.exp(log_ltilde_moment_power_product(alpha, gamma, n, K, k0=1))
    return BesselIdentityReport(alpha=alpha, gamma=gamma, n=n, scaled_beta=sb, power_product=pw,
                                power_product_lhs=lhs, power_product_rhs=rhs, perpetuity_exact=exact,
                                perpetuity_product=prod)

"""Real-argument special functions: log-Gamma, digamma, Gauss 2F1 and the
Mittag-Leffler function E_alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, EvaluationError


@dataclass(frozen=True)
class EvalOptions:
    rel_tol: float = 1e-15
    max_terms: int = 20000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-6):
            raise DomainError(f"rel_tol must lie in (0, 1e-6], got {self.rel_tol}")
        if self.max_terms < 64:
            raise DomainError("max_terms must be at least 64")


DEFAULT_OPTS = EvalOptions()


def ln_gamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"ln_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def digamma(x: float) -> float:
    if not x > 0:
        raise DomainError(f"digamma needs x > 0, got {x}")
    return float(special.digamma(x))


# --------------------------------------------------------------------------
# Gauss hypergeometric function
# --------------------------------------------------------------------------

def _series_2f1(a, b, c, z, opts):
    terms = [1.0]
    term, running, small = 1.0, 1.0, 0
    for n in range(opts.max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        terms.append(term)
        running += term
        if abs(term) <= opts.rel_tol * abs(running):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        raise EvaluationError(
            f"2F1({a}, {b}; {c}; {z}) series did not converge in {opts.max_terms} terms",
            {"partial_sum": math.fsum(terms), "last_term": term, "terms": len(terms)},
        )
    total = math.fsum(terms)
    m = len(terms)
    ratio = abs(z) * abs((a + m) * (b + m) / ((c + m) * m))
    tail = abs(term) * ratio / (1.0 - ratio) if ratio < 1 else math.inf
    return total, {"terms": m, "partial_sum": total, "last_term": term, "tail_bound": tail}


def gauss_2f1(a: float, b: float, c: float, z: float, opts: EvalOptions = DEFAULT_OPTS,
              *, pfaff: str = "a", diagnostics: dict | None = None) -> float:
    """Gauss hypergeometric function for real z < 1.

    Direct power series on [0, 1); for z < 0 a Pfaff transformation maps the
    argument to z/(z-1) in (0, 1).  ``pfaff`` selects which of the two Pfaff
    forms is used ("a": pulls out (1-z)^-a, "b": pulls out (1-z)^-b), so the
    two can be played against each other.
    """
    if not c > 0:
        raise DomainError(f"2F1 needs c > 0, got {c}")
    if not z < 1.0:
        raise DomainError(f"2F1 is only evaluated for z < 1, got {z}")
    if z >= 0.0:
        val, diag = _series_2f1(a, b, c, z, opts)
    else:
        w = z / (z - 1.0)
        if pfaff == "a":
            s, diag = _series_2f1(a, c - b, c, w, opts)
            val = (1.0 - z) ** (-a) * s
        elif pfaff == "b":
            s, diag = _series_2f1(c - a, b, c, w, opts)
            val = (1.0 - z) ** (-b) * s
        else:
            raise DomainError(f"unknown Pfaff variant {pfaff!r}")
        diag = dict(diag, pfaff=pfaff, transformed_argument=w)
    if diagnostics is not None:
        diagnostics.update(diag)
    return val


def hyp2f1_array(a, b, c, z, rel_tol=1e-16, max_terms=20000):
    """Vectorised direct series for z in [0, 1), broadcasting over a, b, c."""
    a, b, c = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))
    z = float(z)
    if not 0.0 <= z < 1.0:
        raise DomainError("hyp2f1_array covers 0 <= z < 1 only")
    total = np.ones(a.shape)
    term = np.ones(a.shape)
    small = np.zeros(a.shape, dtype=int)
    for n in range(max_terms):
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        ok = np.abs(term) <= rel_tol * np.abs(total)
        small = np.where(ok, small + 1, 0)
        if np.all(small >= 3):
            return total
    raise EvaluationError("vectorised 2F1 series did not converge", {"partial_sum": total})


# --------------------------------------------------------------------------
# Mittag-Leffler function
# --------------------------------------------------------------------------

def _ml_series(alpha, z, opts):
    terms = [1.0]
    lz = math.log(abs(z))
    running, small = 1.0, 0
    for n in range(1, opts.max_terms):
        t = math.exp(n * lz - math.lgamma(1.0 + alpha * n))
        if z < 0 and n % 2:
            t = -t
        terms.append(t)
        running += t
        if abs(t) <= opts.rel_tol * abs(running):
            small += 1
            if small >= 3:
                return math.fsum(terms)
        else:
            small = 0
    raise EvaluationError("Mittag-Leffler series did not converge",
                          {"partial_sum": math.fsum(terms), "terms": len(terms)})


def _ml_integral(alpha, z):
    """Remainder integral of the Laplace-type representation (0 < alpha < 1).

    E_alpha(z) = [z > 0] exp(z^(1/alpha))/alpha
                 - z sin(pi alpha)/(pi alpha) * int_0^inf exp(-r^(1/alpha)) / |r - z e^(i pi alpha)|^2 dr
    """
    s, c = math.sin(math.pi * alpha), math.cos(math.pi * alpha)
    r0 = max(z * c, 0.0)
    width = abs(z) * s

    def f(r):
        if r <= 0.0:
            return 1.0 / (z * z)
        e = math.log(r) / alpha
        if e > 6.5:
            return 0.0
        return math.exp(-math.exp(e)) / ((r - z * c) ** 2 + (z * s) ** 2)

    cuts = sorted({0.0, max(r0 - 20 * width, 0.0), r0, r0 + 20 * width, 2 * r0 + 2.0})
    acc = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi > lo:
            acc += integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=400)[0]
    acc += integrate.quad(f, cuts[-1], np.inf, epsabs=0.0, epsrel=1e-13, limit=400)[0]
    return -z * s / (math.pi * alpha) * acc


def _ml_series_ok(alpha, z, opts):
    n = np.arange(1, opts.max_terms)
    logt = n * math.log(abs(z)) - special.gammaln(1.0 + alpha * n)
    if logt[-1] > math.log(opts.rel_tol) - 5:
        return False
    limit = math.log(1e3) if z < 0 else 700.0
    return logt.max() <= limit


def mittag_leffler(alpha: float, z: float, opts: EvalOptions = DEFAULT_OPTS) -> float:
    """E_alpha(z) = sum_n z^n / Gamma(1 + alpha n) for real z, |z| <= 50.

    Power series with compensated summation whenever its largest term stays
    small enough (alternating case: below 1e3) to bound cancellation;
    otherwise an integral representation, which stays accurate for small
    alpha where the series would need astronomically many terms.  Overflows
    to ``inf`` for large positive z; use :func:`log_mittag_leffler` there.
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if abs(z) > 50:
        raise DomainError(f"|z| <= 50 required, got {z}")
    if z == 0.0:
        return 1.0
    if alpha == 1.0:
        return math.exp(z)
    if abs(z) <= 1.0 or _ml_series_ok(alpha, z, opts):
        return _ml_series(alpha, z, opts)
    rem = _ml_integral(alpha, z)
    if z > 0:
        lead = z ** (1.0 / alpha)
        if lead > 700:
            return math.inf
        return math.exp(lead) / alpha + rem
    return rem


def log_mittag_leffler(alpha: float, z: float, opts: EvalOptions = DEFAULT_OPTS) -> float:
    """log E_alpha(z), finite even where E_alpha(z) overflows."""
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1.0:
        return float(z)
    if z <= 0 or abs(z) <= 1.0 or _ml_series_ok(alpha, z, opts):
        return math.log(mittag_leffler(alpha, z, opts))
    if abs(z) > 50:
        raise DomainError(f"|z| <= 50 required, got {z}")
    lead = z ** (1.0 / alpha)
    rem = _ml_integral(alpha, z)
    return lead - math.log(alpha) + math.log1p(alpha * rem * math.exp(-lead))

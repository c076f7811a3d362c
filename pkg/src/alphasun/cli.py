"""Command-line front end: seeded batch jobs writing CSV or JSON."""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import ide_solver as ide
from . import perpetuity as pp
from . import storage_sim as ss
from . import stochastic_orders as so
from . import sun_frechet as fr
from . import sun_weibull as sw
from . import verification as V
from .errors import AlphaSunError, ConfigurationError, DomainError
from .params import DistParams

SEED_ENV = "ALPHASUN_SEED"
COMMANDS = ("moments", "constant", "density", "sample", "perpetuity", "simulate", "orders", "verify")


@dataclass
class JobConfig:
    command: str
    alpha: float | None = None
    gamma: float | None = None
    n: int = 5
    samples: int = 100_000
    seed: int = 0
    points: int = 4096
    eps: float = 1e-13
    out: str | None = None
    format: str = "csv"
    case: str = "frechet"
    spec: str = "alpha_sun"
    law: str = "pareto-frechet"
    K: int = 200
    batch: int = 10_000


class _Usage(Exception):
    pass


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def _header(cfg: JobConfig, extra: dict | None = None) -> list[str]:
    meta = {"command": cfg.command, "alpha": cfg.alpha, "gamma": cfg.gamma, "seed": cfg.seed,
            "alphasun": __version__, "numpy": np.__version__, "scipy": scipy.__version__}
    meta.update(extra or {})
    return [f"# {k}={v}" for k, v in meta.items()]


def _csv(cfg, columns, rows, extra=None) -> str:
    buf = io.StringIO()
    for line in _header(cfg, extra):
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _json(cfg, payload) -> str:
    meta = {"command": cfg.command, "alpha": cfg.alpha, "gamma": cfg.gamma, "seed": cfg.seed,
            "versions": {"alphasun": __version__, "numpy": np.__version__, "scipy": scipy.__version__}}
    return json.dumps({"meta": meta, **payload}, indent=2, sort_keys=True, default=V._plain) + "\n"


def _table(cfg, columns, rows, extra=None, payload=None):
    if cfg.format == "json":
        body = payload if payload is not None else {"columns": list(columns), "rows": [list(r) for r in rows]}
        if extra:
            body = {**body, "info": extra}
        return _json(cfg, body)
    return _csv(cfg, columns, rows, extra)


def _emit(cfg: JobConfig, text: str):
    if cfg.out is None:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # downstream closed early (head); not an error
            sys.stdout = open(os.devnull, "w")
        return
    d = Path(cfg.out)
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{cfg.command}.{cfg.format}").write_text(text)


def _params(cfg) -> DistParams:
    if cfg.alpha is None or cfg.gamma is None:
        raise _Usage(f"{cfg.command} needs --alpha and --gamma")
    return DistParams(cfg.alpha, cfg.gamma)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_moments(cfg):
    p = _params(cfg)
    if cfg.case == "frechet":
        seq = fr.moments_Y(p, cfg.n)
    elif cfg.case == "weibull":
        seq = sw.moments_Yhat(p, cfg.n)
    elif cfg.case == "zhat":
        seq = sw.moments_Zhat(p, cfg.n)
    elif cfg.case == "perpetuity":
        seq = pp.perpetuity_moments(pp.builtin_spec(cfg.spec, p), cfg.n)
    else:
        raise _Usage(f"unknown case {cfg.case!r} for moments")
    rows = [(n, v) for n, v in enumerate(seq.values, start=1)]
    return _table(cfg, ("n", "moment"), rows, {"kind": seq.kind, "case": cfg.case})


def cmd_constant(cfg):
    p = _params(cfg)
    r = fr.c_constant_report(p)
    d = {k: getattr(r, k) for k in ("product", "asymptotic", "c_prime", "density_prefactor", "truncation",
                                     "tail_sum", "tail_uncertainty", "fit_residual", "rel_diff")}
    return _table(cfg, tuple(d), [tuple(d.values())], payload={"constant": d})


def cmd_density(cfg):
    p = _params(cfg)
    grid = ide.GridConfig(points=cfg.points)
    if cfg.case == "frechet":
        td = ide.solve_frechet(p, grid)
    elif cfg.case == "weibull":
        td = ide.solve_weibull(p, grid)
    else:
        raise _Usage("density --case must be frechet or weibull")
    c = ide.cdf(td, td.x)
    extra = {"case": td.case, "normalization_defect": td.normalization_defect,
             "left_tail": td.left_tail.form, "right_tail": td.right_tail.form}
    rows = zip(td.x, td.pdf, c)
    if cfg.format == "json":
        return _json(cfg, {"info": extra, "x": td.x.tolist(), "pdf": td.pdf.tolist(), "cdf": c.tolist()})
    return _csv(cfg, ("x", "pdf", "cdf"), rows, extra)


def cmd_sample(cfg):
    p = _params(cfg)
    rng = np.random.default_rng(cfg.seed)
    if cfg.case == "frechet":
        b = fr.sample_X_product(p, cfg.K, rng, cfg.samples)
    elif cfg.case == "frechet-y":
        b = fr.sample_Y_product(p, cfg.K, rng, cfg.samples)
    elif cfg.case == "frechet-perpetuity":
        b = fr.sample_Y_perpetuity(p, rng, cfg.samples)
    elif cfg.case == "weibull-y":
        b = sw.sample_Yhat_product(p, cfg.K, rng, cfg.samples)
    else:
        raise _Usage("sample --case must be frechet, frechet-y, frechet-perpetuity or weibull-y")
    return _table(cfg, ("value",), ((v,) for v in b.values), {"label": b.label},
                  payload={"label": b.label, "values": b.values.tolist()})


def _spec(cfg):
    if cfg.spec == "jumpless":
        if cfg.alpha is None or cfg.gamma is None:
            raise _Usage("jumpless spec takes --alpha as q and --gamma as b")
        return pp.builtin_spec("jumpless", cfg.alpha, cfg.gamma)
    return pp.builtin_spec(cfg.spec, _params(cfg))


def cmd_perpetuity(cfg):
    spec = _spec(cfg)
    rng = np.random.default_rng(cfg.seed)
    jump_eps = 1e-3 if spec.infinite_activity else None
    b = pp.simulate_perpetuity(spec, rng, cfg.samples, eps=cfg.eps, jump_eps=jump_eps)
    rows = []
    for n in range(1, cfg.n + 1):
        m, se = b.moment(n)
        ex = pp.perpetuity_moment(spec, n)
        rows.append((n, m, se, ex, (m - ex) / se))
    return _table(cfg, ("n", "mc_mean", "mc_se", "exact", "z"), rows, {"spec": spec.label})


def cmd_simulate(cfg):
    gamma = None if cfg.law == "exponential-gumbel" else cfg.gamma
    law = ss.InputLaw(cfg.law, gamma)
    if cfg.alpha is None:
        raise _Usage("simulate needs --alpha")
    rng = np.random.default_rng(cfg.seed)
    cdf, med, kind, sign = ss.limit_reference(law, cfg.alpha)
    b = ss.renormalized_batch(law, cfg.alpha, cfg.n, cfg.batch, rng, seed=cfg.seed)
    fit = ss.fit_and_compare(sign * b.values, cdf, med, kind)
    row = (law.tag, cfg.alpha, cfg.n, cfg.batch, fit.kind, fit.parameter, fit.ks)
    return _table(cfg, ("law", "alpha", "n", "batch", "fit", "fitted", "ks"), [row])


def cmd_orders(cfg):
    rng = np.random.default_rng(cfg.seed)
    ts = [0.5, 1.0, 2.0, 4.0]
    reports = {
        "beta_t": so.convex_order_check(so.beta_family(1, 1, ts), ts, "decreasing"),
        "ltilde_p": so.convex_order_check(so.ltilde_family([1.0] * 4, [-4, -1, 0, 0.4], rng, cfg.samples),
                                          [-4, -1, 0, 0.4]),
        "ltilde_d": so.convex_order_check(so.ltilde_family([0.4, 1.0, 1.6], [0.0] * 3, rng, cfg.samples),
                                          [0.4, 1.0, 1.6]),
    }
    if cfg.format == "json":
        return _json(cfg, {k: {"index": r.index, "c_grid": r.c_grid.tolist(), "expectations": r.expectations.tolist(),
                               "monotone": r.monotone, "max_violation": r.max_violation}
                           for k, r in reports.items()})
    rows = []
    for k, r in reports.items():
        for i, t in enumerate(r.index):
            for j, c in enumerate(r.c_grid):
                rows.append((k, t, "call", c, r.expectations[i, j], r.stderr[i, j]))
            rows.append((k, t, "square", "", r.expectations[i, -1], r.stderr[i, -1]))
    verdicts = {f"{k}_monotone": r.monotone for k, r in reports.items()}
    return _csv(cfg, ("family", "index", "test", "c", "expectation", "stderr"), rows, verdicts)


def cmd_verify(cfg):
    p = _params(cfg)
    checks, info = V.suite(p, cfg.seed, draws=cfg.samples)
    ok = all(c.passed for c in checks)
    payload = {"passed": ok, "checks": [c.as_dict() for c in checks],
               "informational": [c.as_dict() for c in info]}
    cfg.format = "json"
    return _json(cfg, payload), (0 if ok else 1)


HANDLERS = {
    "moments": cmd_moments, "constant": cmd_constant, "density": cmd_density, "sample": cmd_sample,
    "perpetuity": cmd_perpetuity, "simulate": cmd_simulate, "orders": cmd_orders, "verify": cmd_verify,
}


# --------------------------------------------------------------------------
# Parsing and dispatch
# --------------------------------------------------------------------------

def _default_seed():
    v = os.environ.get(SEED_ENV)
    if v is None:
        return 0
    try:
        return int(v)
    except ValueError:
        raise _Usage(f"{SEED_ENV} must be an integer, got {v!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alphasun", description=__doc__)
    ap.add_argument("--version", action="version", version=f"alphasun {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=None, help="output directory (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        return sp

    common(sub.add_parser("moments", help="exact moment tables")).add_argument("--n", type=int, default=5)
    sp = sub.choices["moments"]
    sp.add_argument("--case", choices=("frechet", "weibull", "zhat", "perpetuity"), default="frechet")
    sp.add_argument("--spec", default="alpha_sun")
    common(sub.add_parser("constant", help="left-tail constant, both routes"))
    sp = common(sub.add_parser("density", help="solved density table"))
    sp.add_argument("--case", choices=("frechet", "weibull"), default="frechet")
    sp.add_argument("--points", type=int, default=4096)
    sp = common(sub.add_parser("sample", help="seeded draws"))
    sp.add_argument("--case", default="frechet")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--K", type=int, default=200)
    sp = common(sub.add_parser("perpetuity", help="simulate a perpetuity and compare moments"))
    sp.add_argument("--spec", default="alpha_sun", choices=sorted(pp.BUILTIN_SPECS))
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--eps", type=float, default=1e-13)
    sp = common(sub.add_parser("simulate", help="storage recurrence vs limit law"))
    sp.add_argument("--law", choices=ss.LAWS, default="pareto-frechet")
    sp.add_argument("--n", type=int, default=10_000)
    sp.add_argument("--batch", type=int, default=10_000)
    sp = common(sub.add_parser("orders", help="convex-order matrices"))
    sp.add_argument("--samples", type=int, default=100_000)
    sp = common(sub.add_parser("verify", help="cross-representation checks, JSON verdicts"))
    sp.add_argument("--samples", type=int, default=100_000)
    return ap


def parse(argv) -> JobConfig:
    ns = build_parser().parse_args(argv)
    d = {k: v for k, v in vars(ns).items() if v is not None}
    if "seed" not in d:
        d["seed"] = _default_seed()
    return JobConfig(**d)


def dispatch(cfg: JobConfig) -> int:
    if cfg.command not in HANDLERS:
        raise _Usage(f"unknown command {cfg.command!r}")
    res = HANDLERS[cfg.command](cfg)
    text, code = res if isinstance(res, tuple) else (res, 0)
    _emit(cfg, text)
    return code


def main(argv=None) -> int:
    try:
        cfg = parse(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except _Usage as e:
        sys.stderr.write(f"alphasun: {e}\n")
        return 2
    try:
        return dispatch(cfg)
    except (_Usage, DomainError, ConfigurationError) as e:
        sys.stderr.write(f"alphasun: usage error: {e}\n")
        return 2
    except AlphaSunError as e:
        diag = {"error": type(e).__name__, "message": str(e),
                "diagnostics": getattr(e, "diagnostics", None), "config": asdict(cfg)}
        sys.stderr.write(json.dumps(diag, default=V._plain, sort_keys=True) + "\n")
        return 1
    except (ArithmeticError, FloatingPointError) as e:
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e), "config": asdict(cfg)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

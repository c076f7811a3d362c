"""Frechet-case left tail: pointwise ratio to the asymptotic form versus A*y,
and the extrapolated limit, over the (alpha, gamma) grid."""

import argparse
import csv

import numpy as np

from alphasun import ide_solver as ide
from alphasun import sun_frechet as fr
from alphasun.params import DistParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="left_tail.csv")
    ap.add_argument("--points", type=int, default=4096)
    args = ap.parse_args()
    rows = []
    for a in (0.3, 0.5, 0.7):
        for g in (0.5, 1.0, 2.0):
            p = DistParams(a, g)
            td = ide.solve_frechet(p, ide.GridConfig(points=args.points))
            A = td.info["A"]
            c = fr.c_constant_report(p).density_prefactor
            icpt, a1, res = ide.frechet_left_tail_extrapolation(td)
            for Ay in (5, 10, 20, 40):
                y = Ay / A
                gy = float(np.exp(np.interp(np.log(y), np.log(td.y[::-1]), np.log(td.g[::-1]))))
                ratio = gy / (c * y**p.beta * np.exp(-Ay))
                rows.append((a, g, Ay, ratio, 1 + ide.frechet_tail_correction(p) / Ay, icpt, a1, res))
            xq = ide.quantile(td, 1e-8)
            print(f"a={a} g={g}: ratio at 1e-8 quantile {ide.frechet_left_tail_ratio(td, [xq])[0]:.4f}, "
                  f"extrapolated {icpt:.5f}, a1 fit {a1:.4f} vs {ide.frechet_tail_correction(p):.4f}")
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["alpha", "gamma", "Ay", "ratio", "first_order", "intercept", "a1_fit", "fit_residual"])
        w.writerows(rows)


if __name__ == "__main__":
    main()

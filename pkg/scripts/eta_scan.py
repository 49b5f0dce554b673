#!/usr/bin/env python3
"""Scan the one-parameter deformation families over c0 and tabulate residuals.

Writes one CSV per target to results/ (created next to this script) and
prints a summary table.  Equivalent CLI:

    genricci sugra scan configs/ads5xs5_eta.toml --grid c0=-0.9:0.9:19
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from genricci import sugra as sg  # noqa: E402

TARGETS = {
    "ads5_s5": (5, (sg.AlgebraSpec("so", p=6, q=0),)),
    "ads5_su3_so3": (5, (sg.AlgebraSpec("su", n=3, involution="so_real"),)),
    "ads5_s3_s2": (5, (sg.AlgebraSpec("so", p=4, q=0),
                       sg.AlgebraSpec("so", p=3, q=0))),
    "ads4_s6": (4, (sg.AlgebraSpec("so", p=7, q=0),)),
    "ads7_s3": (7, (sg.AlgebraSpec("so", p=4, q=0),)),
}


def main():
    outdir = os.path.join(os.path.dirname(__file__), "results")
    os.makedirs(outdir, exist_ok=True)
    grid = np.linspace(-0.9, 0.9, 19)
    for name, (m, factors) in TARGETS.items():
        rows = []
        for c0 in grid:
            cfg = sg.eta_family(m, factors, float(c0))
            model = sg.assemble(cfg)
            rep = sg.check_equations(model)
            rows.append((c0, cfg.blocks[1].c, cfg.blocks[1].lam,
                         cfg.flux.volume_dict()[(1, 0)], rep.max_residual,
                         rep.passed))
        path = os.path.join(outdir, f"eta_{name}.csv")
        with open(path, "w") as fh:
            fh.write("c0,c1,lambda1,a,max_residual,pass\n")
            for row in rows:
                fh.write(",".join(f"{x:.12g}" if isinstance(x, float) else str(x)
                                  for x in row) + "\n")
        worst = max(r[4] for r in rows)
        print(f"{name:16s} m={m} 19 points, worst residual {worst:.3e} -> {path}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Generalized Ricci flow trajectories on graded doubles.

For each (algebra, c) the flow starts at V+ = (1+t)a1, runs to t = 1, and the
script reports the action decay, the Ricci-tensor norm, and the worst
admissibility drift relative to s = a0 (which stays at rounding level: the
flow is tangent to the admissible locus).  Trajectories land in results/.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from genricci.curvature import flow_admissibility, ricci_flow  # noqa: E402
from genricci.genmetric import IsotropicSubalgebra, vplus_of_double  # noqa: E402
from genricci.liealg import (build_so, build_su, double, rescale_metric,  # noqa: E402
                             split_so_last, split_su_so, split_su_u1block)

CASES = {
    "su2_c0": (lambda: double(rescale_metric(build_su(2), -1.0), 0.0,
                              split_su_u1block(2))),
    "su2_cm1": (lambda: double(rescale_metric(build_su(2), -1.0), -1.0,
                               split_su_u1block(2))),
    "su3_so3": (lambda: double(rescale_metric(build_su(3), -1.0), 0.5,
                               split_su_so(3))),
    "so32": (lambda: double(rescale_metric(build_so(3, 2), 1.0), 0.0,
                            split_so_last(3, 2))),
}


def main():
    outdir = os.path.join(os.path.dirname(__file__), "results")
    os.makedirs(outdir, exist_ok=True)
    for name, make in CASES.items():
        dbl = make()
        v0 = vplus_of_double(dbl)
        cols = []
        for i in dbl.base_split.indices0:
            e = np.zeros(dbl.dim)
            e[i] = 1.0
            cols.append(e)
        s = IsotropicSubalgebra(dbl.algebra, np.column_stack(cols))
        result = ricci_flow(dbl.algebra, v0, None, t_end=1.0, dt=1e-3)
        path = os.path.join(outdir, f"flow_{name}.csv")
        with open(path, "w") as fh:
            result.to_csv(fh)
        first, last = result.states[0], result.states[-1]
        drift = flow_admissibility(result, s)
        status = "ok" if result.completed else f"halted ({result.message})"
        print(f"{name:10s} S: {first.action:+.6f} -> {last.action:+.6f}   "
              f"|GRic|: {first.gric_norm:.4f} -> {last.gric_norm:.4f}   "
              f"admissibility drift {drift:.2e}   {status}")


if __name__ == "__main__":
    main()

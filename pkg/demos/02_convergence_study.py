"""Strong-convergence study: Euler ~ order 0.5, Milstein ~ order 1.0.

For c1 = 0 the reference is the exact geometric-Brownian-motion solution.
For c1 > 0 the shipped closed-form candidate solution fails verification
(the error against it plateaus instead of vanishing), so the reference
switches to an 8x-refined Euler path — both runs are shown side by side to
make that defect concrete.
"""

import numpy as np

from vve.model import ModelParams
from vve.sde import strong_convergence

DT_LEVELS = [2.0 ** -k for k in range(6, 12)]


def show(label, report):
    print(f"\n{label} (reference = {report.reference})")
    print("      dt        strong error")
    for dt, err in zip(report.dt_levels, report.strong_errors):
        print(f"  {dt:10.6f}   {err:12.6f}")
    print(f"  fitted slope of log2(error) vs log2(dt): {report.fitted_slope:.3f}")


def main():
    gbm = ModelParams(mu=0.05, sigma=0.2, c1=0.0, s0=100.0)
    show("GBM / Euler", strong_convergence(gbm, 1.0, DT_LEVELS, 1000, seed=0,
                                           scheme="euler"))
    show("GBM / Milstein", strong_convergence(gbm, 1.0, DT_LEVELS, 1000, seed=0,
                                              scheme="milstein"))

    vve = ModelParams(mu=0.05, sigma=0.2, c1=5e-4, s0=100.0)
    show("VVE / Euler vs closed-form candidate",
         strong_convergence(vve, 1.0, DT_LEVELS, 1000, seed=0,
                            scheme="euler", reference="exact"))
    print("  ^ the error plateaus: the closed-form candidate is NOT a solution")
    print("    of the SDE for c1 > 0 (see the vve.sde docstring)")
    show("VVE / Euler vs refined Euler",
         strong_convergence(vve, 1.0, DT_LEVELS, 1000, seed=0,
                            scheme="euler", reference="refined"))


if __name__ == "__main__":
    main()

"""A compact seeded replication study.

Runs the study driver at two sample sizes, prints the two-stage error table
and the oracle-efficiency quartiles, and writes the efficiency density
curves that summarize how close the feasible estimator gets to the
infeasible benchmark.
"""

import os

import numpy as np

from spbk import McConfig, efficiency_density, run_mc
from spbk.io import write_csv

OUT = os.path.join(os.path.dirname(__file__), "output")


def main():
    os.makedirs(OUT, exist_ok=True)
    print("  n    comp   stage-1 ASE   stage-2 ASE   eff (q25/med/q75)")
    for n in (100, 400):
        cfg = McConfig(example="ex1", n=n, sigma0=0.5, c_tuning=0.5,
                       replications=40, seed=13)
        res = run_mc(cfg, workers=4)
        q = np.nanquantile(res.eff, [0.25, 0.5, 0.75], axis=0)
        for a in range(cfg.d):
            print(f"{n:5d}   {a + 1}     {res.mean_ase(1)[a]:9.4f}    "
                  f"{res.mean_ase(2)[a]:9.4f}    "
                  f"{q[0, a]:.2f}/{q[1, a]:.2f}/{q[2, a]:.2f}")
        rows = []
        for a in range(cfg.d):
            grid, dens = efficiency_density(res.eff[:, a])
            rows.extend((a + 1, g, v) for g, v in zip(grid, dens))
        write_csv(os.path.join(OUT, f"efficiency_density_n{n}.csv"),
                  ["component", "x", "density"], rows)
    print(f"\ndensity curves written to {OUT}/efficiency_density_n*.csv")
    print("the densities tighten around 1.0 as n grows: the backfitted")
    print("estimator tracks the oracle that knows the other components")


if __name__ == "__main__":
    main()

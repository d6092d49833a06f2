"""Lipschitz dependence on the initial melt layer.

Perturbs the melt height h_m on a disc around the hold point by
perturbations of L1 size delta and prints ||u - w||_L1 / delta over time,
each perturbed run replaying the base run's time steps.  A short
coarse run by default; ``--desk`` uses the desk grid up to t = 0.1.
"""

import argparse

from nonlocal_balance.cli_io import load_config, parse_perturbation, shipped_config
from nonlocal_balance.cli_io.cli import compare_runs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--desk", action="store_true")
    args = ap.parse_args()
    cfg = load_config(shipped_config("laser_desk"))
    cfg.solver.update(t_end=0.1, snapshot_interval=0.02)
    if not args.desk:
        cfg.grid.update(nx=200, ny=40)
    pert = parse_perturbation("component=h_m;shape=disc(3,0,1);delta=1e-2,1e-3,1e-4")
    base, _, table = compare_runs(cfg, pert)
    print("t      " + "  ".join(f"delta={d:<8g}" for d in pert.deltas))
    for k in range(table.shape[0]):
        print(f"{base.times[k]:5.2f}  " + "  ".join(f"{r:<14.6g}" for r in table[k]))


if __name__ == "__main__":
    main()

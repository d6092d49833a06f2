"""Finite-time blow-up of nonlocal source terms.

Runs the homogeneous problem (exact solution 1/(1 - t)) and the
space-dependent psi problem, printing the numerical growth next to the
exact values.  Takes a few seconds.
"""

from nonlocal_balance import run
from nonlocal_balance.cli_io import load_config, shipped_config
from nonlocal_balance.models.blowup import exact_homogeneous


def main():
    cfg = load_config(shipped_config("blowup_homogeneous"))
    grid = cfg.make_grid()
    rec = run(cfg.build_model(grid), grid, cfg.solver_config())
    print("homogeneous problem, dt = 1e-3")
    print(f"{'t':>6} {'numerical':>12} {'exact':>12}")
    for t, u in zip(rec.times, rec.series("linf_u")):
        if t < 0.999:
            print(f"{t:6.2f} {u:12.5f} {exact_homogeneous(t):12.5f}")
    print(f"halted: {rec.halt_reason} at t = {rec.halt_time}\n")

    cfg = load_config(shipped_config("blowup_psi"))
    grid = cfg.make_grid()
    rec = run(cfg.build_model(grid), grid, cfg.solver_config())
    print("psi problem on [-3, 3], dx = dt = 1e-3")
    l1 = rec.series("l1_u")
    for k in range(0, len(l1), 10):
        print(f"t = {rec.times[k]:5.2f}   L1 = {l1[k]:.6g}")
    print(f"last: t = {rec.times[-1]:.3f}, L1 = {l1[-1]:.6g} ({rec.halt_reason})")


if __name__ == "__main__":
    main()

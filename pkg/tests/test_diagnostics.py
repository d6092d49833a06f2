import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_balance import ConfigurationError, Field, SolverConfig, make_grid, run
from nonlocal_balance.diagnostics import (
    RunRecord,
    cut_area,
    cut_components,
    cut_half_width_profile,
    cut_region,
    lipschitz_ratio,
    outside_mass_fraction,
    ripple_stats,
    symmetry_defect,
    wake_profile,
)
from nonlocal_balance.kernels import BumpProfile
from nonlocal_balance.models.base import ModelSpec

G = make_grid(0, 20, -2, 2, 200, 40)


def brute_maxima(p):
    """Reference count: collapse runs of equal values, then scan triples."""
    runs = [p[0]]
    for v in p[1:]:
        if v != runs[-1]:
            runs.append(v)
    return sum(1 for k in range(1, len(runs) - 1) if runs[k] > runs[k - 1] and runs[k] > runs[k + 1])


def test_cut_region_examples():
    assert not cut_region(np.full(G.shape, 4.5)).any()
    assert cut_region(np.full(G.shape, -0.1)).all()
    X, Y = G.meshgrid()
    disc = (X - 10) ** 2 + Y**2 < 1.0
    np.testing.assert_array_equal(cut_region(np.where(disc, -1.0, 4.5)), disc)
    # the threshold is exactly zero
    assert not cut_region(np.zeros(3)).any()


def test_cut_half_width_profile_examples():
    assert not cut_half_width_profile(np.full(G.shape, 4.5), G).any()
    X, Y = G.meshgrid()
    hs = np.where((X > 5) & (X < 12) & (np.abs(Y) < 0.5), -1.0, 4.5)
    prof = cut_half_width_profile(hs, G)
    cut_cols = prof > 0
    np.testing.assert_allclose(prof[cut_cols], 0.45)  # outermost cut cell centre
    assert cut_cols.sum() == 70


def test_wake_profile_excludes_hole():
    X, Y = G.meshgrid()
    hs = np.where((np.abs(Y) < 0.5) & (X < 15), -1.0, 4.5)
    w = wake_profile(hs, G)
    assert len(w) == np.count_nonzero(np.abs(G.x_centers() - 3.0) > 3.6) - np.count_nonzero(G.x_centers() >= 15)


def test_ripple_stats_examples():
    assert ripple_stats(np.full(20, 0.3)) == (0, 0.0)
    x = np.linspace(0, 3 * 2 * np.pi, 301)
    count, amp = ripple_stats(0.5 + 0.1 * np.sin(x))
    assert count == 3 and amp == pytest.approx(0.2, rel=1e-3)
    bump = np.full(30, 0.2)
    bump[10:14] = 0.35
    assert ripple_stats(bump) == (1, pytest.approx(0.15))
    assert ripple_stats([1.0, 2.0, 1.0, 2.0]) is None


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=5, max_size=60))
def test_ripple_stats_matches_brute_force(values):
    p = np.array(values, dtype=float) * 0.025
    count, amp = ripple_stats(p)
    assert count == brute_maxima(list(p))
    assert amp >= 0 and count <= len(p) / 2
    assert amp == pytest.approx(p.max() - p.min())


def test_cut_components_and_area():
    X, Y = G.meshgrid()
    one = np.where((X - 5) ** 2 + Y**2 < 1, -1.0, 4.5)
    assert cut_components(one) == 1
    two = np.where(((X - 5) ** 2 + Y**2 < 1) | ((X - 12) ** 2 + Y**2 < 1), -1.0, 4.5)
    assert cut_components(two) == 2
    assert cut_area(two, G) == pytest.approx(2 * np.pi, rel=0.05)
    # diagonal neighbours are not connected
    d = np.full((4, 4), 1.0)
    d[0, 0] = d[1, 1] = -1.0
    assert cut_components(d) == 2


def test_outside_mass_fraction_examples():
    g = make_grid(-1, 11, -1.5, 1.5, 48, 12)
    belt = (0.0, 10.0, -1.0, 1.0)
    X, Y = g.meshgrid()
    inside = (X >= 0) & (X <= 10) & (np.abs(Y) <= 1)
    assert outside_mass_fraction(np.where(inside, 1.0, 0.0), g, belt) == 0.0
    assert outside_mass_fraction(np.zeros(g.shape), g, belt) == 0.0
    assert outside_mass_fraction(np.where(inside, 0.0, 2.0), g, belt) == 1.0
    # absolute values: negative undershoots count as mass
    rho = np.where(inside, 1.0, 0.0)
    rho[0, 0] = -float(inside.sum())
    assert outside_mass_fraction(rho, g, belt) == pytest.approx(0.5)


def test_symmetry_defect_examples():
    X, Y = G.meshgrid()
    sym = np.exp(-(Y**2)) * X
    assert symmetry_defect(sym, G) == 0.0
    bad = sym.copy()
    bad[10, 3] += 0.25
    assert symmetry_defect(bad, G) == pytest.approx(0.25)
    f = Field(np.stack([sym, bad]))
    assert symmetry_defect(f, G) == pytest.approx(0.25)


@pytest.mark.parametrize("grid", [make_grid(0, 1, -1, 1, 4, 5), make_grid(0, 1, -1, 2, 4, 6)])
def test_symmetry_defect_rejects_asymmetric_grid(grid):
    with pytest.raises(ConfigurationError):
        symmetry_defect(np.zeros(grid.shape), grid)


class Transport(ModelSpec):
    name = "transport"
    names = ("u",)
    far_field = (0.0,)
    transported = (True,)
    coupling = (1.0,)
    kernel = BumpProfile(1.0, 0.3, 3)

    def flux(self, t, x1, x2, i, u, A):
        return 0.8 * u, -0.3 * u

    def source(self, t, x1, x2, U, A):
        return np.zeros_like(U)

    def wave_speed_bound(self, t, grid, field):
        return 0.8

    def initial_field(self, grid):
        X, Y = grid.meshgrid()
        return Field((((X - 1) ** 2 + (Y - 1) ** 2) < 0.25).astype(float)[None], (0.0,))


def test_lipschitz_ratio_examples():
    g = make_grid(0, 2, 0, 2, 40, 40, periodic=True)
    m = Transport()
    cfg = SolverConfig(t_end=0.5, snapshot_interval=0.25)
    base_field = m.initial_field(g)
    a = run(m, g, cfg, base_field)
    b = run(m, g, cfg, base_field, dt_sequence=a.dts)
    assert lipschitz_ratio(a, b, 1e-3, 0.5) == 0.0
    # a positive perturbation of a linear monotone scheme keeps its L1 size
    w = base_field.copy()
    w.values[0, 5:8, 5:8] += 0.1
    delta = 9 * 0.1 * g.cell_area
    c = run(m, g, cfg, w, dt_sequence=a.dts)
    assert lipschitz_ratio(a, c, delta, 0.5) == pytest.approx(1.0, rel=1e-12)


def test_lipschitz_ratio_rejects_mismatched_runs():
    g = make_grid(0, 2, 0, 2, 20, 20, periodic=True)
    m = Transport()
    a = run(m, g, SolverConfig(t_end=0.2, snapshot_interval=0.1))
    b = run(m, g, SolverConfig(t_end=0.2, snapshot_interval=0.1, cfl=0.3))
    with pytest.raises(ValueError):
        lipschitz_ratio(a, b, 1e-3, 0.2)
    h = make_grid(0, 2, 0, 2, 10, 10, periodic=True)
    c = run(m, h, SolverConfig(t_end=0.2, snapshot_interval=0.1))
    with pytest.raises(ValueError):
        lipschitz_ratio(a, c, 1e-3, 0.2)
    with pytest.raises(ValueError):
        lipschitz_ratio(a, a, 0.0, 0.2)


def test_run_record_rows_and_series():
    g = make_grid(0, 1, 0, 1, 4, 4)
    rec = RunRecord(g, ("u",), (0.0,))
    f = Field(np.ones((1, 4, 4)), (0.0,), ("u",))
    rec.add(0.0, g, f, {"extra": 2.0}, keep_field=True)
    rec.add(0.5, g, f, {"extra": 3.0}, keep_field=False)
    assert rec.columns() == ["t", "mass_u", "l1_u", "linf_u", "tv_u", "extra"]
    np.testing.assert_allclose(rec.series("extra"), [2.0, 3.0])
    assert rec.series("mass_u")[0] == pytest.approx(1.0)
    assert len(rec.snapshots) == 1 and rec.nearest_snapshot(0.4) == 0
    assert not rec.halted

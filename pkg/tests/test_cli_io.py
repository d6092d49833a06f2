import subprocess
import sys

import numpy as np
import pytest

from nonlocal_balance import ConfigurationError, Field, make_grid
from nonlocal_balance.cli_io import (
    format_grid_dump,
    load_config,
    main,
    parse_config,
    parse_grid_dump,
    parse_perturbation,
    pgm_bytes,
    read_pgm,
    read_timeseries,
    shipped_config,
)
from nonlocal_balance.cli_io.cli import compare_runs, oracle_deviation
from nonlocal_balance.models import LaserModel


def write(tmp_path, text, name="s.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


# ---------------------------------------------------------------- config


def test_shipped_paper_config_is_reference_setup():
    cfg = load_config(shipped_config("laser_paper"))
    g = cfg.make_grid()
    assert (g.x_min, g.x_max, g.y_min, g.y_max, g.nx, g.ny) == (0, 40, -2, 2, 8000, 800)
    assert g.dx == pytest.approx(5e-3) and g.dy == pytest.approx(5e-3)
    assert cfg.solver["t_end"] == 1.0
    m = cfg.build_model(g)
    assert isinstance(m, LaserModel)
    p = m.params
    assert p.tau_g == 4 and p.plate_thickness == 4.5 and p.speed == 40 and p.hold_time == 0.1
    assert (p.wind.amplitude, p.wind.radius, p.wind.exponent) == (1, 3.6, 4)
    assert (p.intensity.amplitude, p.intensity.radius, p.intensity.exponent) == (2, 1.2, 6)
    assert (p.kernel.radius, p.kernel.exponent) == (2.4, 3)
    assert p.hold_point == (3, 0)


@pytest.mark.parametrize("name", ["laser_paper", "laser_desk", "conveyor", "blowup_homogeneous", "blowup_psi"])
def test_all_shipped_configs_load(name):
    load_config(shipped_config(name))


def test_empty_blowup_config_takes_defaults(tmp_path):
    cfg = load_config(write(tmp_path, "[scenario]\nkind = blowup_homogeneous\n"))
    assert cfg.solver["fixed_dt"] == 1e-3 and cfg.solver["t_end"] == 1.05
    assert cfg.grid["boundary"] == "periodic"


@pytest.mark.parametrize(
    "text,needle",
    [
        ("[scenario]\nkind = laser\n[model]\ntau_g = -1\n", "[model] tau_g"),
        ("[scenario]\nkind = laser\n[model]\ntau = 1\n", "[model] tau"),
        ("[scenario]\nkind = laser\n[grid]\nnx = 0\n", "[grid]"),
        ("[scenario]\nkind = laser\n[grid]\nnx = 1.5\n", "[grid] nx"),
        ("[scenario]\nkind = laser\n[solver]\ncfl = 1.5\n", "[solver] cfl"),
        ("[scenario]\nkind = laser\n[output]\nclip_min = 5\nclip_max = 1\n", "[output] clip_max"),
        ("[scenario]\nkind = conveyor\n[model]\neps_hat = 0.2\n", "[model] eps_hat"),
        ("[scenario]\nkind = toaster\n", "[scenario] kind"),
        ("[scenario]\nkind = laser\n[extras]\na = 1\n", "[extras]"),
        ("[scenario]\nkind = laser\n[model]\nR_cut = 1\nr_cut = 2\n", "[model] R_cut"),
        ("[scenario]\nkind = laser\n[solver]\nt_end = abc\n", "[solver] t_end"),
        ("kind = laser\n", "parse"),
    ],
)
def test_config_errors_name_the_key(tmp_path, text, needle):
    with pytest.raises(ConfigurationError) as info:
        load_config(write(tmp_path, text))
    assert needle in str(info.value)


def test_effective_config_round_trips():
    cfg = load_config(shipped_config("laser_desk"))
    again = parse_config(cfg.to_ini())
    assert again.to_ini() == cfg.to_ini()
    assert again.model == cfg.model and again.grid == cfg.grid


def test_custom_factory(tmp_path):
    text = (
        "[scenario]\nkind = custom\nfactory = nonlocal_balance.models:BlowupModel\n"
        "[model]\nwhich = psi\n[grid]\nny = 1\n"
    )
    cfg = parse_config(text)


    assert cfg.build_model().name == "blowup_psi"
    with pytest.raises(ConfigurationError):
        parse_config("[scenario]\nkind = custom\nfactory = no.such.module:thing\n")


# ---------------------------------------------------------------- serialization


def test_grid_dump_round_trip_is_byte_identical():
    g = make_grid(-0.3, 1.7, -1.0, 1.0, 7, 4)
    rng = np.random.default_rng(2)
    f = Field(rng.normal(size=(2, 7, 4)) * 1e3, (0.1, 4.5), ("h_m", "h_s"))
    text = format_grid_dump(g, f, 0.123456789)
    g2, f2, t2 = parse_grid_dump(text)
    assert g2 == g and t2 == 0.123456789
    np.testing.assert_array_equal(f2.values, f.values)
    assert f2.names == f.names and f2.far_field == f.far_field
    assert format_grid_dump(g2, f2, t2) == text


def test_pgm_mapping():
    v = np.array([[-1.0, 0.0], [2.25, 4.5], [9.0, 1e-9]])  # nx = 3, ny = 2
    data = pgm_bytes(v, 0.0, 4.5)
    assert data.startswith(b"P5\n3 2\n255\n")
    px = np.frombuffer(data[len(b"P5\n3 2\n255\n"):], dtype=np.uint8).reshape(2, 3)
    # top row is the upper x2 row
    np.testing.assert_array_equal(px[1], [0, 128, 255])
    np.testing.assert_array_equal(px[0], [1, 255, 1])
    with pytest.raises(ConfigurationError):
        pgm_bytes(v, 1.0, 1.0)


# ---------------------------------------------------------------- perturbations


def test_parse_perturbation():
    p = parse_perturbation("component=h_m;shape=disc(3,0,1);delta=1e-2,1e-3")
    assert p.component == "h_m" and p.shape == "disc" and p.args == (3.0, 0.0, 1.0)
    assert p.deltas == (1e-2, 1e-3) and not p.identical
    for bad in ("component=h_m;delta=0", "component=h_m;delta=-1e-3", "delta=1e-3",
                "component=u;shape=disc(1,2);delta=1e-3", "component=u;shape=star;delta=1"):
        with pytest.raises(ConfigurationError):
            parse_perturbation(bad)


def test_perturbation_has_exact_l1_size():
    g = make_grid(0, 2, 0, 2, 20, 20)
    p = parse_perturbation("component=u;shape=disc(1,1,0.5);delta=1e-3")
    f = Field(np.zeros((1, 20, 20)), (0.0,), ("u",))
    w = p.apply(f, g, 1e-3)
    assert np.abs(w.values - f.values).sum() * g.cell_area == pytest.approx(1e-3, rel=1e-12)


def test_compare_identical_perturbation_gives_zero(tmp_path):
    cfg = parse_config(
        "[scenario]\nkind = laser\n[grid]\nnx = 60\nny = 16\nx_max = 12\n[solver]\nt_end = 0.02\nsnapshot_interval = 0.01\n"
    )
    pert = parse_perturbation("component=h_m;shape=disc(3,0,1);delta=1e-2,1e-3;mode=identical")
    _, _, table = compare_runs(cfg, pert)
    assert table.shape == (3, 2) and np.all(table == 0)
    pert = parse_perturbation("component=h_m;shape=disc(3,0,1);delta=1e-2,1e-3")
    _, _, table = compare_runs(cfg, pert)
    np.testing.assert_allclose(table[0], 1.0, rtol=1e-9)
    assert np.all(np.isfinite(table)) and np.all(table[1:] > 0)


# ---------------------------------------------------------------- commands


def test_oracle_deviation_small():
    assert oracle_deviation(1, 0) <= 1e-15
    assert oracle_deviation(64, 0) <= 1e-10


def test_cli_run_blowup_homogeneous(tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", str(shipped_config("blowup_homogeneous")), "--output-dir", str(out)])
    assert code == 3  # halted at the blow-up
    report = (out / "report.txt").read_text()
    assert "u(0.5) = 1.99" in report and "blow-up" in report
    ts = read_timeseries(out / "timeseries.csv")
    k = int(np.argmin(np.abs(ts["t"] - 0.5)))
    assert ts["linf_u"][k] == pytest.approx(2.0, rel=1e-2)
    assert (out / "effective.cfg").exists()
    assert "u(0.5)" in capsys.readouterr().out


def test_cli_run_is_deterministic_and_writes_artifacts(tmp_path):
    cfg = write(
        tmp_path,
        "[scenario]\nkind = laser\n[grid]\nnx = 80\nny = 16\n[model]\nintensity_amplitude = 60\n"
        "[solver]\nt_end = 0.12\nsnapshot_interval = 0.06\n",
    )
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(cfg), "--output-dir", str(a), "--quiet"]) == 0
    assert main(["run", str(cfg), "--output-dir", str(b), "--quiet"]) == 0
    assert (a / "timeseries.csv").read_bytes() == (b / "timeseries.csv").read_bytes()
    pgms = sorted((a / "snapshots").glob("*.pgm"))
    assert len(pgms) == 3
    px = read_pgm(pgms[-1])
    assert px.shape == (16, 80) and px.min() == 0  # the hole is below the clip range
    head = (a / "timeseries.csv").read_text().splitlines()[0]
    assert "cut_area" in head and "ripple_count" in head
    dumps = sorted((a / "snapshots").glob("*.txt"))
    _, f, t = parse_grid_dump(dumps[-1].read_text())
    assert t == pytest.approx(0.12) and f.names == ("h_m", "h_s")


def test_cli_snapshots_flag(tmp_path):
    cfg = write(tmp_path, "[scenario]\nkind = blowup_psi\n[grid]\nnx = 600\n[solver]\nt_end = 0.2\n")
    out = tmp_path / "o"
    assert main(["run", str(cfg), "--output-dir", str(out), "--snapshots", "4", "--quiet"]) == 0
    ts = read_timeseries(out / "timeseries.csv")
    np.testing.assert_allclose(ts["t"], [0, 0.05, 0.1, 0.15, 0.2], atol=1e-12)


def test_cli_conveyor_has_outside_mass_column(tmp_path):
    cfg = write(tmp_path, "[scenario]\nkind = conveyor\n[grid]\nnx = 96\nny = 24\n[solver]\nt_end = 0.1\n"
                "[output]\nformats = csv\n")
    out = tmp_path / "c"
    assert main(["run", str(cfg), "--output-dir", str(out), "--quiet"]) == 0
    assert "outside_mass_fraction" in read_timeseries(out / "timeseries.csv")


def test_cli_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "[scenario]\nkind = laser\n[model]\ntau_g = -4\n")
    assert main(["run", str(bad)]) == 2
    assert "tau_g" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.cfg")]) == 2
    blocker = tmp_path / "file"
    blocker.write_text("x")
    ok = write(tmp_path, "[scenario]\nkind = blowup_homogeneous\n[solver]\nt_end = 0.01\n")
    assert main(["run", str(ok), "--output-dir", str(blocker / "sub")]) == 4
    cfg = write(tmp_path, "[scenario]\nkind = laser\n[grid]\nnx = 40\nny = 8\n[solver]\nt_end = 0.01\n")
    assert main(["compare", str(cfg), "--perturb", "component=h_m;delta=0"]) == 2


def test_cli_oracle(capsys):
    assert main(["oracle", "--sizes", "1", "16", "64", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert out.count("[ok]") == 3


def test_module_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "nonlocal_balance", "oracle", "--sizes", "8", "--quiet"],
        capture_output=True, text=True, timeout=120,
    )
    assert res.returncode == 0 and res.stdout == ""

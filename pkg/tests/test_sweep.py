import math

import numpy as np
import pytest

from aamemory.dynamics import TimeGrid
from aamemory.lattice import LatticeConfig
from aamemory.sweep import (
    GridSpec,
    RunRecord,
    SweepSpec,
    draw_phases,
    emit_echo_series,
    emit_phase_scan,
    emit_r_curve,
    evaluate_point,
    params_of,
    parse_sweep_config,
    partial_path,
    read_echo_series,
    read_records,
    run_sweep,
)

SMALL_GRID = GridSpec(n_samples=201, t_max=40.0)


def small_spec(**kw):
    args = dict(delta_over_j=(0.5, 2.5), epsilon_over_j=(0.1, 0.3), lengths=(13,),
                grid=SMALL_GRID)
    args.update(kw)
    return SweepSpec(**args)


def test_draw_phases_reproducible():
    a = draw_phases(10, 42)
    assert len(a) == 10 and a == draw_phases(10, 42)
    assert all(0 <= p < 2 * math.pi for p in a)
    assert draw_phases(1, 7) == draw_phases(1, 7)
    assert draw_phases(3, 1) != draw_phases(3, 2)
    with pytest.raises(ValueError):
        draw_phases(0, 1)


def test_draw_phases_uniform_mean():
    assert abs(np.mean(draw_phases(10_000, 3)) - math.pi) < 0.05


def test_draw_phases_frozen_values():
    # PCG64 streams are fixed by numpy's stability policy for Generator.random
    expected = 2 * math.pi * np.random.Generator(np.random.PCG64(42)).random(3)
    assert draw_phases(3, 42) == list(expected)


def test_spec_validation():
    with pytest.raises(ValueError):
        small_spec(delta_over_j=())
    with pytest.raises(ValueError):
        small_spec(phases=())
    with pytest.raises(ValueError):
        small_spec(phase_count=3)
    spec = small_spec(phase_count=3, seed=5)
    assert len(spec.phases) == 3 and len(spec) == 12


def test_configs_cartesian_product():
    spec = small_spec(lengths=(13, 21), phases=(0.0, 1.0))
    configs = spec.configs()
    assert len(configs) == len(spec) == 16
    assert len({(c.length, c.impurity_coupling, c.phase, c.potential_strength)
                for c in configs}) == 16


def test_record_round_trip(tmp_path):
    cfg = LatticeConfig(13, potential_strength=2.5, impurity_coupling=0.2, phase=1.0)
    rec = evaluate_point(params_of(cfg, TimeGrid(30.0, 301)))
    assert rec.status == "ok"
    back = RunRecord.from_row(rec.row())
    assert back.params == rec.params
    assert back.ratio == rec.ratio and back.backflow == rec.backflow
    assert back.config() == cfg
    assert back.grid() == TimeGrid(30.0, 301)
    # the record alone re-runs the point
    assert evaluate_point(back.params).ratio == rec.ratio


def test_error_rows_do_not_stop_sweep(tmp_path):
    spec = small_spec(epsilon_over_j=(0.1,))
    good = params_of(spec.configs()[0], TimeGrid(10.0, 11))
    bad = dict(good, length=2)
    rec = evaluate_point(bad)
    assert rec.status == "error" and "length" in rec.message
    assert math.isnan(rec.ratio)


def test_run_sweep_sorted_and_complete(tmp_path):
    out = tmp_path / "r.csv"
    spec = small_spec()
    records = run_sweep(spec, out)
    assert len(records) == len(spec)
    rows = read_records(out)
    assert len(rows) == len(spec)
    keys = [(r.params["length"], r.params["epsilon_over_j"], r.params["delta_over_j"])
            for r in rows]
    assert keys == sorted(keys)
    text = out.read_text()
    assert text.startswith("# aamemory")
    assert "# seed = none" in text
    assert not partial_path(out).exists()
    assert (tmp_path / "r.csv.timing").exists()


def test_run_sweep_deterministic(tmp_path):
    spec = small_spec(phase_count=2, seed=11)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_sweep(spec, a)
    run_sweep(spec, b, workers=2)
    assert a.read_bytes() == b.read_bytes()


def test_resume_skips_finished(tmp_path, monkeypatch):
    out = tmp_path / "r.csv"
    spec = small_spec()
    first = SweepSpec(delta_over_j=(0.5,), epsilon_over_j=(0.1, 0.3), lengths=(13,),
                      grid=SMALL_GRID)
    run_sweep(first, out)
    calls = []
    import aamemory.sweep as sweep_mod
    real = sweep_mod.evaluate_point

    def counting(p):
        calls.append(p)
        return real(p)

    monkeypatch.setattr(sweep_mod, "evaluate_point", counting)
    run_sweep(spec, out, resume=True)
    assert len(calls) == 2
    assert len(read_records(out)) == 4
    fresh = tmp_path / "fresh.csv"
    monkeypatch.setattr(sweep_mod, "evaluate_point", real)
    run_sweep(spec, fresh)
    assert fresh.read_bytes() == out.read_bytes()


def test_resume_from_partial_file(tmp_path):
    out = tmp_path / "r.csv"
    spec = small_spec()
    full = run_sweep(spec, None)
    # simulate an interrupted run that completed one point
    from aamemory.sweep import _append_partial
    _append_partial(partial_path(out), full[0])
    done = run_sweep(spec, out, resume=True)
    assert len(done) == 4
    assert not partial_path(out).exists()


CONFIG_TEXT = """
[delta]
start = 0.5
stop = 1.5
step = 0.5

[epsilon]
values = 0.1, 0.01

[length]
values = 13

[phase]
count = 2
seed = 9

[grid]
n_samples = 101
t_max = 20

[output]
path = out.csv
"""


def test_parse_config():
    spec = parse_sweep_config(CONFIG_TEXT)
    assert spec.delta_over_j == (0.5, 1.0, 1.5)
    assert spec.epsilon_over_j == (0.1, 0.01)
    assert spec.lengths == (13,)
    assert spec.phases == tuple(draw_phases(2, 9))
    assert spec.grid == GridSpec(n_samples=101, t_max=20.0)
    assert spec.output_path == "out.csv"
    assert parse_sweep_config(CONFIG_TEXT, seed=3).phases == tuple(draw_phases(2, 3))


@pytest.mark.parametrize("text", [
    "[delta]\nstart = 2\nstop = 1\nstep = 0.1\n[epsilon]\nvalues = 0.1\n[length]\nvalues = 13\n",
    "[delta]\nvalues =\n[epsilon]\nvalues = 0.1\n[length]\nvalues = 13\n",
    "[epsilon]\nvalues = 0.1\n[length]\nvalues = 13\n",
    "[delta]\nvalues = 1\n[epsilon]\nvalues = 0.1\n[length]\nvalues = 13\n[phase]\ncount = 3\n",
])
def test_parse_config_rejects_degenerate(text):
    with pytest.raises(ValueError):
        parse_sweep_config(text)


def test_grid_rule_scales_with_coupling():
    g = GridSpec(n_samples=11)
    assert g.for_config(LatticeConfig(13, impurity_coupling=0.1)).t_max == pytest.approx(200)
    assert g.for_config(LatticeConfig(13)).t_max == 50
    assert GridSpec(11, t_max=7.0).for_config(LatticeConfig(13, impurity_coupling=0.1)).t_max == 7


def test_emit_echo_series(tmp_path):
    cfg = LatticeConfig(13, potential_strength=2.5, impurity_coupling=0.3)
    path = tmp_path / "echo.csv"
    series = emit_echo_series(cfg, TimeGrid(20.0, 41), path)
    text = path.read_text()
    assert "# config length=13" in text
    cols = read_echo_series(path)
    assert list(cols) == ["t", "re_chi", "im_chi", "abs_chi", "log10_abs_chi"]
    np.testing.assert_array_equal(cols["t"], series.times)
    np.testing.assert_array_equal(cols["re_chi"] + 1j * cols["im_chi"], series.chi)
    np.testing.assert_allclose(10 ** cols["log10_abs_chi"], cols["abs_chi"], rtol=1e-12)


def test_emit_echo_series_reports_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_echo_series(LatticeConfig(5), TimeGrid(1.0, 3), blocker / "echo.csv")


def test_emit_curves(tmp_path):
    spec = small_spec(phase_count=2, seed=1)
    emit_r_curve(spec, tmp_path / "r.csv")
    emit_phase_scan(spec, tmp_path / "p.csv")
    lines = [ln for ln in (tmp_path / "r.csv").read_text().splitlines() if not ln.startswith("#")]
    assert lines[0].startswith("length,epsilon_over_j,phase,delta_over_j,ratio")
    assert len(lines) == 1 + len(spec)
    assert (tmp_path / "r.csv").read_bytes() == (tmp_path / "p.csv").read_bytes()

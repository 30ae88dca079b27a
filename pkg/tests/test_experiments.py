import dataclasses

import pytest

import hrris.experiments as experiments
from hrris.config import parse_config
from hrris.errors import ExperimentError
from hrris.experiments import (
    CSV_HEADER,
    DISTANCE_VAR,
    POWER_VAR,
    ResultRow,
    build_grid,
    run_experiment,
)

# Small sizes keep each cell to a handful of optimizer steps; the texture of
# the sweeps (row counts, pairing, resumability, bytes) does not depend on
# the optimization being any good.
FAST_KNOBS = {
    "surface.n": "8",
    "channel.n_paths": "2",
    "mc.n_trials": "2",
    "pso.n_particles": "4",
    "pso.max_iters": "4",
    "ao.max_rounds": "2",
    "output.plots": "false",
}


def _config(extra: dict[str, str] | None = None):
    merged = {**FAST_KNOBS, **(extra or {})}
    return parse_config("".join(f"{key} = {value}\n" for key, value in merged.items()))


# ---------------------------------------------------------------------- grid


def test_fig2_grid_covers_triples_and_powers():
    config = _config({"experiment": "fig2", "sweep.power_dbm": "10, 20"})
    cells = build_grid(config)
    assert len(cells) == len(experiments.FIG2_TRIPLES) * 2
    labels = {label for cell in cells for label in cell.labels}
    assert "HrRis[A4-B2-E2]" in labels and "NoRis[A2-B2-E4]" in labels
    assert all(cell.sweep_var == POWER_VAR for cell in cells)


def test_fig3_grid_moves_eve_along_the_axis():
    config = _config({"experiment": "fig3", "sweep.distance_m": "40, 90"})
    cells = build_grid(config)
    assert len(cells) == 2
    assert [cell.sweep_value for cell in cells] == [40.0, 90.0]
    for cell in cells:
        assert cell.scenario.topology.eve == (cell.sweep_value, 0.0)
        assert cell.sweep_var == DISTANCE_VAR
        assert cell.labels == (
            "NoRis",
            "PassiveRis",
            "HrRis[K2-Pmax5dBm]",
            "HrRis[K2-Pmax10dBm]",
            "HrRis[K4-Pmax10dBm]",
        )
        # Multi-point default power sweep pins the fixed power at 20 dBm.
        assert cell.scenario.params.transmit_power == pytest.approx(0.1)


def test_fig4_grid_spans_sizes_and_error_levels():
    config = _config({"experiment": "fig4", "sweep.power_dbm": "20"})
    cells = build_grid(config)
    assert len(cells) == 4
    labels = {label for cell in cells for label in cell.labels}
    assert "HrRis[N16-s0.1]" in labels and "PassiveRis[N40-s0.5]" in labels
    sizes = {cell.scenario.arrays.surface.size for cell in cells}
    assert sizes == {16, 40}
    with pytest.raises(ExperimentError):
        build_grid(_config({"experiment": "fig4", "surface.k": "0"}))


def test_custom_grid_uses_config_surface():
    config = _config({"sweep.power_dbm": "20", "surface.active": "3, 6"})
    cells = build_grid(config)
    assert len(cells) == 1
    assert cells[0].labels == ("NoRis", "PassiveRis", "HrRis")
    hybrid = cells[0].schemes[2]
    assert hybrid.active_set == (3, 6)
    passive_only = build_grid(_config({"surface.k": "0", "sweep.power_dbm": "20"}))
    assert passive_only[0].labels == ("NoRis", "PassiveRis")


def test_result_row_rejects_negative_statistics():
    with pytest.raises(ValueError):
        ResultRow("HrRis", POWER_VAR, 20.0, -0.1, 0.0, 1, 1)
    with pytest.raises(ValueError):
        ResultRow("HrRis", POWER_VAR, 20.0, 0.1, -1e-9, 1, 1)


# ----------------------------------------------------------------- execution


def test_fig2_single_point_row_count(tmp_path):
    config = _config({"experiment": "fig2", "sweep.power_dbm": "20", "mc.n_trials": "1"})
    output = run_experiment(config, out_dir=tmp_path)
    lines = output.csv_path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) - 1 == 3 * len(experiments.FIG2_TRIPLES)
    assert len(output.rows) == len(lines) - 1
    assert not (tmp_path / "fig2.partial.csv").exists()


def test_rerun_is_byte_identical(tmp_path):
    config = _config({"sweep.power_dbm": "10, 20"})
    first = run_experiment(config, out_dir=tmp_path / "a").csv_path.read_bytes()
    second = run_experiment(config, out_dir=tmp_path / "b").csv_path.read_bytes()
    assert first == second
    third = run_experiment(config, out_dir=tmp_path / "a").csv_path.read_bytes()
    assert first == third


def test_threaded_run_matches_serial(tmp_path):
    config = _config({"sweep.power_dbm": "20"})
    serial = run_experiment(config, out_dir=tmp_path / "s").csv_path.read_bytes()
    threaded = run_experiment(config, out_dir=tmp_path / "t", threads=2).csv_path.read_bytes()
    assert serial == threaded


def test_rows_are_sorted_and_statistics_sane(tmp_path):
    config = _config({"sweep.power_dbm": "20, 10"})
    output = run_experiment(config, out_dir=tmp_path)
    keys = [(row.sweep_var, row.sweep_value, row.scheme) for row in output.rows]
    assert keys == sorted(keys)
    assert {row.sweep_value for row in output.rows} == {10.0, 20.0}
    for row in output.rows:
        assert row.mean_cs >= 0.0 and row.std_cs >= 0.0
        assert row.n_trials == 2 and row.seed == 1


def test_cell_failure_flushes_partial_and_names_cell(tmp_path, monkeypatch):
    config = _config({"sweep.power_dbm": "10, 20"})
    real = experiments.monte_carlo
    calls = []

    def explode_on_second(*args, **kwargs):
        calls.append(1)
        if len(calls) == 2:
            raise RuntimeError("boom")
        return real(*args, **kwargs)

    monkeypatch.setattr(experiments, "monte_carlo", explode_on_second)
    with pytest.raises(ExperimentError) as info:
        run_experiment(config, out_dir=tmp_path)
    assert "p_t_dbm=20" in str(info.value)
    partial = (tmp_path / "custom.partial.csv").read_text().splitlines()
    assert partial[0].startswith("# config ")
    assert len(partial) == 1 + 3  # one finished cell, three schemes


def test_interrupted_run_resumes_by_cell(tmp_path, monkeypatch):
    config = _config({"sweep.power_dbm": "10, 20"})
    truth = run_experiment(config, out_dir=tmp_path / "full").csv_path.read_bytes()

    real = experiments.monte_carlo
    calls = []

    def explode_on_second(*args, **kwargs):
        calls.append(1)
        if len(calls) == 2:
            raise RuntimeError("boom")
        return real(*args, **kwargs)

    monkeypatch.setattr(experiments, "monte_carlo", explode_on_second)
    with pytest.raises(ExperimentError):
        run_experiment(config, out_dir=tmp_path / "resumed")

    resumed_calls = []

    def count(*args, **kwargs):
        resumed_calls.append(1)
        return real(*args, **kwargs)

    monkeypatch.setattr(experiments, "monte_carlo", count)
    output = run_experiment(config, out_dir=tmp_path / "resumed")
    assert len(resumed_calls) == 1  # the finished cell was not recomputed
    assert output.csv_path.read_bytes() == truth
    assert not (tmp_path / "resumed" / "custom.partial.csv").exists()


def test_stale_partial_from_other_config_is_ignored(tmp_path, monkeypatch):
    config = _config({"sweep.power_dbm": "10, 20"})
    out = tmp_path / "run"
    out.mkdir()
    (out / "custom.partial.csv").write_text("# config 0000000000000000\nnot,a,row\n")
    real = experiments.monte_carlo
    calls = []

    def count(*args, **kwargs):
        calls.append(1)
        return real(*args, **kwargs)

    monkeypatch.setattr(experiments, "monte_carlo", count)
    output = run_experiment(config, out_dir=out)
    assert len(calls) == 2  # every cell recomputed
    assert output.csv_path.exists()


def test_plot_emitted_when_enabled(tmp_path):
    config = dataclasses.replace(_config({"sweep.power_dbm": "10, 20"}), plots=True)
    output = run_experiment(config, out_dir=tmp_path)
    assert len(output.plot_paths) == 1
    svg = output.plot_paths[0].read_text()
    assert svg.startswith("<svg ") and svg.rstrip().endswith("</svg>")
    assert svg.count("<polyline ") == 3  # one line per scheme

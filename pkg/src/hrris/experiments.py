"""Sweep grids and their execution: Monte Carlo cells to CSV rows and charts.

An experiment is a list of cells, each pairing one scenario (geometry,
array sizes, transmit power) with the schemes evaluated on shared channel
draws. Results land in a fixed-schema CSV; rows are flushed to a partial
file as cells complete so an interrupted sweep resumes where it stopped,
and the finished file is byte-identical for identical config and seed.
"""

from __future__ import annotations

import hashlib
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path

from .ao import AoSettings, Scenario, Scheme, monte_carlo
from .channel import NodeArrays, Topology
from .config import ExperimentConfig, dbm_to_watts, serialize_config
from .errors import ExperimentError
from .plots import write_line_chart
from .swarm import SwarmParams
from .system import SystemParams

CSV_HEADER = "scheme,sweep_var,sweep_value,mean_cs,std_cs,n_trials,seed"

POWER_VAR = "p_t_dbm"
DISTANCE_VAR = "d_ae_m"

# Antenna triples (tx, rx, eve) compared in the power-sweep experiment.
FIG2_TRIPLES = ((4, 2, 2), (2, 4, 2), (2, 2, 4), (2, 2, 2))
# (n_active, budget dBm) variants compared in the distance-sweep experiment.
FIG3_VARIANTS = ((2, 5.0), (2, 10.0), (4, 10.0))
# Element counts and estimation-error levels of the robustness experiment.
FIG4_ELEMENTS = (16, 40)
FIG4_ERROR_STD = (0.1, 0.5)

AXIS_LABELS = {
    POWER_VAR: "transmit power (dBm)",
    DISTANCE_VAR: "transmitter-eavesdropper distance (m)",
}


@dataclass(frozen=True)
class ResultRow:
    """One CSV row: a scheme's statistics at one grid point."""

    scheme: str
    sweep_var: str
    sweep_value: float
    mean_cs: float
    std_cs: float
    n_trials: int
    seed: int

    def __post_init__(self) -> None:
        if self.mean_cs < 0.0 or self.std_cs < 0.0:
            raise ValueError("mean and std must be nonnegative")


@dataclass(frozen=True)
class Cell:
    """One grid point: the schemes share every channel draw."""

    scenario: Scenario
    schemes: tuple[Scheme, ...]
    labels: tuple[str, ...]
    sweep_var: str
    sweep_value: float


@dataclass(frozen=True)
class ExperimentOutput:
    csv_path: Path
    plot_paths: tuple[Path, ...]
    rows: tuple[ResultRow, ...]


def _g9(value: float) -> str:
    return format(float(value), ".9g")


def _render_row(row: ResultRow) -> str:
    return ",".join(
        (
            row.scheme,
            row.sweep_var,
            _g9(row.sweep_value),
            _g9(row.mean_cs),
            _g9(row.std_cs),
            str(row.n_trials),
            str(row.seed),
        )
    )


def _parse_row(line: str) -> ResultRow:
    parts = line.split(",")
    if len(parts) != 7:
        raise ValueError(f"expected 7 columns, got {len(parts)}")
    return ResultRow(
        scheme=parts[0],
        sweep_var=parts[1],
        sweep_value=float(parts[2]),
        mean_cs=float(parts[3]),
        std_cs=float(parts[4]),
        n_trials=int(parts[5]),
        seed=int(parts[6]),
    )


def _row_key(row: ResultRow) -> tuple[str, str, str]:
    # The sweep value is keyed by its rendered form so resume matching never
    # depends on float round-tripping.
    return (row.scheme, row.sweep_var, _g9(row.sweep_value))


def ao_settings(config: ExperimentConfig) -> AoSettings:
    """Optimizer settings derived from the config knobs."""
    swarm = SwarmParams(
        n_particles=config.pso_particles,
        max_iters=config.pso_iters,
        kappa1=config.pso_kappa1,
        kappa2=config.pso_kappa2,
        penalty=config.pso_penalty,
    )
    return AoSettings(max_rounds=config.ao_max_rounds, rel_tol=config.ao_rel_tol, swarm=swarm)


def _scenario(
    config: ExperimentConfig,
    power_dbm: float,
    n_tx: int | None = None,
    n_rx: int | None = None,
    n_eve: int | None = None,
    n_elements: int | None = None,
    csi_error_std: float | None = None,
    eve_position: tuple[float, float] | None = None,
) -> Scenario:
    topology = Topology(
        tx=config.tx_position,
        surface=config.surface_position,
        rx=config.rx_position,
        eve=eve_position if eve_position is not None else config.eve_position,
    )
    arrays = NodeArrays.from_counts(
        n_tx if n_tx is not None else config.n_tx,
        n_rx if n_rx is not None else config.n_rx,
        n_eve if n_eve is not None else config.n_eve,
        n_elements if n_elements is not None else config.n_elements,
    )
    return Scenario(
        topology=topology,
        arrays=arrays,
        n_paths=config.n_paths,
        csi_error_std=csi_error_std if csi_error_std is not None else config.csi_error_std,
        params=SystemParams(dbm_to_watts(power_dbm), config.noise_power),
    )


def _config_hybrid(config: ExperimentConfig) -> Scheme:
    return Scheme.hybrid(config.n_active, config.power_budget, config.resolved_active_set())


def _benchmark_schemes(config: ExperimentConfig) -> tuple[Scheme, ...]:
    # With no active elements configured the hybrid scheme would duplicate
    # the passive one, so it is dropped rather than rejected.
    schemes = [Scheme.none(), Scheme.passive()]
    if config.n_active:
        schemes.append(_config_hybrid(config))
    return tuple(schemes)


def _fig2_grid(config: ExperimentConfig) -> list[Cell]:
    cells = []
    schemes = _benchmark_schemes(config)
    for n_tx, n_rx, n_eve in FIG2_TRIPLES:
        suffix = f"[A{n_tx}-B{n_rx}-E{n_eve}]"
        labels = tuple(s.label + suffix for s in schemes)
        for power in config.power_sweep_dbm:
            scenario = _scenario(config, power, n_tx=n_tx, n_rx=n_rx, n_eve=n_eve)
            cells.append(Cell(scenario, schemes, labels, POWER_VAR, power))
    return cells


def _fig3_grid(config: ExperimentConfig) -> list[Cell]:
    schemes: list[Scheme] = [Scheme.none(), Scheme.passive()]
    labels = [Scheme.none().label, Scheme.passive().label]
    for n_active, budget_dbm in FIG3_VARIANTS:
        schemes.append(Scheme.hybrid(n_active, dbm_to_watts(budget_dbm)))
        labels.append(f"HrRis[K{n_active}-Pmax{budget_dbm:g}dBm]")
    power = config.transmit_power_dbm
    cells = []
    for distance in config.distance_sweep_m:
        # The eavesdropper walks the y = 0 axis; with the transmitter at the
        # origin the swept coordinate equals the transmitter-eavesdropper
        # distance.
        scenario = _scenario(config, power, eve_position=(distance, 0.0))
        cells.append(Cell(scenario, tuple(schemes), tuple(labels), DISTANCE_VAR, distance))
    return cells


def _fig4_grid(config: ExperimentConfig) -> list[Cell]:
    cells = []
    for n_elements in FIG4_ELEMENTS:
        for error_std in FIG4_ERROR_STD:
            suffix = f"[N{n_elements}-s{error_std:g}]"
            schemes = (Scheme.passive(), _config_hybrid(config))
            labels = tuple(s.label + suffix for s in schemes)
            for power in config.power_sweep_dbm:
                scenario = _scenario(
                    config, power, n_elements=n_elements, csi_error_std=error_std
                )
                cells.append(Cell(scenario, schemes, labels, POWER_VAR, power))
    return cells


def _custom_grid(config: ExperimentConfig) -> list[Cell]:
    schemes = _benchmark_schemes(config)
    labels = tuple(s.label for s in schemes)
    return [
        Cell(_scenario(config, power), schemes, labels, POWER_VAR, power)
        for power in config.power_sweep_dbm
    ]


def benchmark_cell(config: ExperimentConfig) -> Cell:
    """The single cell at the config's fixed transmit power, for one-off runs."""
    power = config.transmit_power_dbm
    schemes = _benchmark_schemes(config)
    return Cell(_scenario(config, power), schemes, tuple(s.label for s in schemes), POWER_VAR, power)


def build_grid(config: ExperimentConfig) -> list[Cell]:
    """All grid cells of the configured experiment, in execution order."""
    if config.experiment == "fig2":
        return _fig2_grid(config)
    if config.experiment == "fig3":
        return _fig3_grid(config)
    if config.experiment == "fig4":
        if config.n_active == 0:
            raise ExperimentError("the fig4 experiment needs surface.k >= 1")
        return _fig4_grid(config)
    return _custom_grid(config)


def _config_stamp(config: ExperimentConfig) -> str:
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()[:16]


def _load_partial(path: Path, stamp: str) -> dict[tuple[str, str, str], ResultRow]:
    """Rows of a previous interrupted run, if they match this config."""
    if not path.exists():
        return {}
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != f"# config {stamp}":
        return {}
    rows = {}
    for line in lines[1:]:
        try:
            row = _parse_row(line)
        except ValueError:
            continue  # a line cut off mid-write is recomputed, never trusted
        rows[_row_key(row)] = row
    return rows


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    threads: int = 1,
    progress: Callable[[str], None] | None = None,
) -> ExperimentOutput:
    """Execute the configured sweep and write CSV (and optionally charts).

    Cells already present in a matching partial file are reused. A cell
    failure flushes everything finished so far and raises ExperimentError
    naming the cell.

    Returns the final CSV path, any chart paths, and the sorted rows.
    """
    cells = build_grid(config)
    settings = ao_settings(config)
    directory = Path(out_dir) if out_dir is not None else Path(config.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{config.experiment}.csv"
    partial_path = directory / f"{config.experiment}.partial.csv"
    stamp = _config_stamp(config)
    done = _load_partial(partial_path, stamp)

    rows: list[ResultRow] = []
    mode = "a" if done else "w"
    with open(partial_path, mode, encoding="utf-8") as partial:
        if not done:
            partial.write(f"# config {stamp}\n")
            partial.flush()
        for index, cell in enumerate(cells):
            keys = [(label, cell.sweep_var, _g9(cell.sweep_value)) for label in cell.labels]
            if all(key in done for key in keys):
                rows.extend(done[key] for key in keys)
                continue
            try:
                result = monte_carlo(
                    cell.scenario,
                    list(cell.schemes),
                    n_trials=config.n_trials,
                    base_seed=config.seed,
                    settings=settings,
                    threads=threads,
                )
            except Exception as exc:
                partial.flush()
                raise ExperimentError(
                    f"cell {cell.sweep_var}={cell.sweep_value:g} "
                    f"(schemes {', '.join(cell.labels)}) failed: {exc}"
                ) from exc
            cell_rows = [
                ResultRow(
                    scheme=label,
                    sweep_var=cell.sweep_var,
                    sweep_value=cell.sweep_value,
                    mean_cs=float(mean),
                    std_cs=float(std),
                    n_trials=config.n_trials,
                    seed=config.seed,
                )
                for label, mean, std in zip(
                    cell.labels, result.mean_secrecy, result.std_secrecy
                )
            ]
            partial.write("".join(_render_row(row) + "\n" for row in cell_rows))
            partial.flush()
            rows.extend(cell_rows)
            if progress is not None:
                progress(
                    f"[{index + 1}/{len(cells)}] {cell.sweep_var}={cell.sweep_value:g} done"
                )

    rows.sort(key=lambda r: (r.sweep_var, r.sweep_value, r.scheme))
    lines = [CSV_HEADER]
    lines.extend(_render_row(row) for row in rows)
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    partial_path.unlink()

    plot_paths: tuple[Path, ...] = ()
    if config.plots:
        series = []
        for label in sorted({row.scheme for row in rows}):
            points = sorted(
                (row.sweep_value, row.mean_cs) for row in rows if row.scheme == label
            )
            series.append((label, points))
        sweep_var = rows[0].sweep_var
        path = write_line_chart(
            directory / f"{config.experiment}.svg",
            series,
            title=f"{config.experiment}: mean secrecy capacity",
            x_label=AXIS_LABELS[sweep_var],
            y_label="secrecy capacity (bits/s/Hz)",
        )
        plot_paths = (path,)
    return ExperimentOutput(csv_path, plot_paths, tuple(rows))

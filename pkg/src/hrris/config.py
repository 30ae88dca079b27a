"""Experiment configuration: defaults, text format, and unit conversions.

Configuration files are flat ``key = value`` lines with dotted key names
(``surface.n = 40``). Blank lines are skipped and ``#`` starts a comment,
either on its own line or after a value. List values are comma-separated,
positions are ``x, y`` pairs in meters. Omitted keys take the defaults
below; unknown keys are rejected by name.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

from .errors import ParseError

EXPERIMENTS = ("fig2", "fig3", "fig4", "custom")

Position = tuple[float, float]


def dbm_to_watts(dbm: float) -> float:
    """Convert a power level from dBm to watts."""
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    """Convert a power level from watts to dBm. Requires a positive value."""
    if watts <= 0.0:
        raise ValueError(f"power must be positive to express in dBm, got {watts}")
    return 30.0 + 10.0 * math.log10(watts)


def _fail(key: str, message: str) -> None:
    raise ParseError(message, key=key)


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run: geometry, sizes, sweeps, optimizer knobs, output.

    Field defaults are the reference operating point used throughout:
    20 dBm transmit power (inside the default sweep), a 40-element surface
    with the first 2 elements active under a 10 dBm budget, 4/2/2 antennas,
    3 paths per link, 0.1 estimation error, -80 dBm noise.
    """

    experiment: str = "custom"
    tx_position: Position = (0.0, 0.0)
    surface_position: Position = (80.0, 2.0)
    rx_position: Position = (90.0, 0.0)
    eve_position: Position = (100.0, 0.0)
    n_tx: int = 4
    n_rx: int = 2
    n_eve: int = 2
    n_elements: int = 40
    n_active: int = 2
    active_set: tuple[int, ...] = ()
    p_max_dbm: float = 10.0
    n_paths: int = 3
    csi_error_std: float = 0.1
    noise_dbm: float = -80.0
    power_sweep_dbm: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0)
    distance_sweep_m: tuple[float, ...] = field(
        default=(40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0, 110.0, 120.0, 130.0, 140.0)
    )
    n_trials: int = 200
    seed: int = 1
    pso_particles: int = 20
    pso_iters: int = 30
    pso_penalty: float = 1e3
    pso_kappa1: float = 2.05
    pso_kappa2: float = 2.05
    ao_max_rounds: int = 10
    ao_rel_tol: float = 1e-3
    output_dir: str = "results"
    plots: bool = True

    def __post_init__(self) -> None:
        # Canonicalize container fields so configs compare by value no matter
        # how they were built; validation below reports the offending key.
        object.__setattr__(self, "active_set", tuple(sorted(int(i) for i in self.active_set)))
        object.__setattr__(self, "power_sweep_dbm", tuple(float(p) for p in self.power_sweep_dbm))
        object.__setattr__(
            self, "distance_sweep_m", tuple(float(d) for d in self.distance_sweep_m)
        )
        for name in ("tx_position", "surface_position", "rx_position", "eve_position"):
            x, y = getattr(self, name)
            object.__setattr__(self, name, (float(x), float(y)))
        self._validate()

    def _validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            _fail("experiment", f"must be one of {', '.join(EXPERIMENTS)}, got {self.experiment!r}")
        counts = {
            "antennas.tx": self.n_tx,
            "antennas.rx": self.n_rx,
            "antennas.eve": self.n_eve,
            "surface.n": self.n_elements,
            "channel.n_paths": self.n_paths,
            "mc.n_trials": self.n_trials,
            "pso.n_particles": self.pso_particles,
            "pso.max_iters": self.pso_iters,
            "ao.max_rounds": self.ao_max_rounds,
        }
        for key, value in counts.items():
            if value < 1:
                _fail(key, f"must be >= 1, got {value}")
        if not 0 <= self.n_active <= self.n_elements:
            _fail("surface.k", f"must lie in [0, {self.n_elements}], got {self.n_active}")
        if self.active_set:
            if len(self.active_set) != self.n_active:
                _fail(
                    "surface.active",
                    f"lists {len(self.active_set)} elements but surface.k = {self.n_active}",
                )
            if len(set(self.active_set)) != len(self.active_set):
                _fail("surface.active", "indices must be distinct")
            if self.active_set[0] < 0 or self.active_set[-1] >= self.n_elements:
                _fail(
                    "surface.active",
                    f"indices must lie in [0, {self.n_elements - 1}], got {self.active_set}",
                )
        floats = {
            "surface.p_max_dbm": self.p_max_dbm,
            "noise.power_dbm": self.noise_dbm,
            "channel.csi_error_std": self.csi_error_std,
            "pso.penalty": self.pso_penalty,
            "pso.kappa1": self.pso_kappa1,
            "pso.kappa2": self.pso_kappa2,
            "ao.rel_tol": self.ao_rel_tol,
        }
        for key, value in floats.items():
            if not math.isfinite(value):
                _fail(key, f"must be finite, got {value}")
        for name, key in (("power_sweep_dbm", "sweep.power_dbm"), ("distance_sweep_m", "sweep.distance_m")):
            sweep = getattr(self, name)
            if not sweep:
                _fail(key, "sweep must not be empty")
            if not all(math.isfinite(v) for v in sweep):
                _fail(key, f"entries must be finite, got {sweep}")
        if any(d <= 0.0 for d in self.distance_sweep_m):
            _fail("sweep.distance_m", "distances must be positive")
        if self.csi_error_std < 0.0:
            _fail("channel.csi_error_std", f"must be >= 0, got {self.csi_error_std}")
        if self.pso_penalty <= 0.0:
            _fail("pso.penalty", f"must be > 0, got {self.pso_penalty}")
        if self.pso_kappa1 + self.pso_kappa2 <= 4.0:
            _fail("pso.kappa1", "pso.kappa1 + pso.kappa2 must exceed 4")
        if self.ao_rel_tol < 0.0:
            _fail("ao.rel_tol", f"must be >= 0, got {self.ao_rel_tol}")
        if self.seed < 0:
            _fail("mc.seed", f"must be >= 0, got {self.seed}")
        if not self.output_dir:
            _fail("output.dir", "must not be empty")
        for name, key in (
            ("tx_position", "topology.tx"),
            ("surface_position", "topology.surface"),
            ("rx_position", "topology.rx"),
            ("eve_position", "topology.eve"),
        ):
            x, y = getattr(self, name)
            if not (math.isfinite(x) and math.isfinite(y)):
                _fail(key, f"coordinates must be finite, got ({x}, {y})")
        # Every modeled link needs a nonzero distance for the path loss; the
        # receiver and eavesdropper share no link so they may coincide.
        links = (
            ("topology.surface", self.tx_position, self.surface_position, "topology.tx"),
            ("topology.rx", self.tx_position, self.rx_position, "topology.tx"),
            ("topology.eve", self.tx_position, self.eve_position, "topology.tx"),
            ("topology.rx", self.surface_position, self.rx_position, "topology.surface"),
            ("topology.eve", self.surface_position, self.eve_position, "topology.surface"),
        )
        for key, a, b, other in links:
            if a == b:
                _fail(key, f"must not coincide with {other}")

    @property
    def transmit_power_dbm(self) -> float:
        """Fixed transmit power for distance sweeps: the single configured
        power point, or the 20 dBm reference when the sweep has several."""
        if len(self.power_sweep_dbm) == 1:
            return self.power_sweep_dbm[0]
        return 20.0

    @property
    def noise_power(self) -> float:
        return dbm_to_watts(self.noise_dbm)

    @property
    def power_budget(self) -> float:
        return dbm_to_watts(self.p_max_dbm)

    def resolved_active_set(self) -> tuple[int, ...]:
        """The configured active indices, defaulting to the first k."""
        if self.active_set:
            return self.active_set
        return tuple(range(self.n_active))


def _parse_int(token: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ValueError(f"expected an integer, got {token!r}") from None


def _parse_float(token: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ValueError(f"expected a number, got {token!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {token!r}")
    return value


def _parse_bool(token: str) -> bool:
    lowered = token.lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    raise ValueError(f"expected true or false, got {token!r}")


def _parse_experiment(token: str) -> str:
    if token not in EXPERIMENTS:
        raise ValueError(f"expected one of {', '.join(EXPERIMENTS)}, got {token!r}")
    return token


def _parse_str(token: str) -> str:
    if not token:
        raise ValueError("expected a non-empty value")
    return token


def _split_list(token: str) -> list[str]:
    return [part.strip() for part in token.split(",")]


def _parse_floats(token: str) -> tuple[float, ...]:
    if not token:
        raise ValueError("expected a comma-separated list of numbers")
    return tuple(_parse_float(part) for part in _split_list(token))


def _parse_ints(token: str) -> tuple[int, ...]:
    # An empty list is legal here: it means "use the first k elements".
    if not token:
        return ()
    return tuple(_parse_int(part) for part in _split_list(token))


def _parse_position(token: str) -> Position:
    parts = _split_list(token)
    if len(parts) != 2:
        raise ValueError(f"expected 'x, y', got {token!r}")
    return (_parse_float(parts[0]), _parse_float(parts[1]))


def _fmt_float(value: float) -> str:
    return repr(float(value))


def _fmt_floats(values: tuple[float, ...]) -> str:
    return ", ".join(_fmt_float(v) for v in values)


def _fmt_ints(values: tuple[int, ...]) -> str:
    return ", ".join(str(v) for v in values)


def _fmt_position(value: Position) -> str:
    return f"{_fmt_float(value[0])}, {_fmt_float(value[1])}"


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


@dataclass(frozen=True)
class _KeySpec:
    attr: str
    parse: Callable[[str], object]
    fmt: Callable[[object], str]


KEY_SPECS: dict[str, _KeySpec] = {
    "experiment": _KeySpec("experiment", _parse_experiment, str),
    "topology.tx": _KeySpec("tx_position", _parse_position, _fmt_position),
    "topology.surface": _KeySpec("surface_position", _parse_position, _fmt_position),
    "topology.rx": _KeySpec("rx_position", _parse_position, _fmt_position),
    "topology.eve": _KeySpec("eve_position", _parse_position, _fmt_position),
    "antennas.tx": _KeySpec("n_tx", _parse_int, str),
    "antennas.rx": _KeySpec("n_rx", _parse_int, str),
    "antennas.eve": _KeySpec("n_eve", _parse_int, str),
    "surface.n": _KeySpec("n_elements", _parse_int, str),
    "surface.k": _KeySpec("n_active", _parse_int, str),
    "surface.active": _KeySpec("active_set", _parse_ints, _fmt_ints),
    "surface.p_max_dbm": _KeySpec("p_max_dbm", _parse_float, _fmt_float),
    "channel.n_paths": _KeySpec("n_paths", _parse_int, str),
    "channel.csi_error_std": _KeySpec("csi_error_std", _parse_float, _fmt_float),
    "noise.power_dbm": _KeySpec("noise_dbm", _parse_float, _fmt_float),
    "sweep.power_dbm": _KeySpec("power_sweep_dbm", _parse_floats, _fmt_floats),
    "sweep.distance_m": _KeySpec("distance_sweep_m", _parse_floats, _fmt_floats),
    "mc.n_trials": _KeySpec("n_trials", _parse_int, str),
    "mc.seed": _KeySpec("seed", _parse_int, str),
    "pso.n_particles": _KeySpec("pso_particles", _parse_int, str),
    "pso.max_iters": _KeySpec("pso_iters", _parse_int, str),
    "pso.penalty": _KeySpec("pso_penalty", _parse_float, _fmt_float),
    "pso.kappa1": _KeySpec("pso_kappa1", _parse_float, _fmt_float),
    "pso.kappa2": _KeySpec("pso_kappa2", _parse_float, _fmt_float),
    "ao.max_rounds": _KeySpec("ao_max_rounds", _parse_int, str),
    "ao.rel_tol": _KeySpec("ao_rel_tol", _parse_float, _fmt_float),
    "output.dir": _KeySpec("output_dir", _parse_str, str),
    "output.plots": _KeySpec("plots", _parse_bool, _fmt_bool),
}


def parse_config(text: str) -> ExperimentConfig:
    """Parse configuration text, applying defaults for omitted keys.

    Raises:
        ParseError: malformed line, unknown or duplicate key, bad value, or
            a value combination violating the config invariants. The error
            carries the offending line number and key where known.
    """
    values: dict[str, object] = {}
    first_line: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, token = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ParseError("expected 'key = value'", line=lineno)
        spec = KEY_SPECS.get(key)
        if spec is None:
            raise ParseError("unknown key", line=lineno, key=key)
        if key in first_line:
            raise ParseError(
                f"duplicate key (first set on line {first_line[key]})", line=lineno, key=key
            )
        first_line[key] = lineno
        try:
            values[spec.attr] = spec.parse(token.strip())
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, key=key) from None
    return ExperimentConfig(**values)


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config as parseable text, one line per key in schema order."""
    lines = [f"{key} = {spec.fmt(getattr(config, spec.attr))}" for key, spec in KEY_SPECS.items()]
    return "\n".join(lines) + "\n"


def default_config() -> ExperimentConfig:
    """The reference configuration used when no file is given."""
    return ExperimentConfig()

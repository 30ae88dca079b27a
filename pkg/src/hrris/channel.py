"""Geometric mmWave channel synthesis.

Channels are sums of planar-wavefront paths: a line-of-sight leading path
followed by non-line-of-sight paths, each carrying a complex gain whose
variance follows a log-distance path-loss law with lognormal shadowing.
Array responses are half-wavelength uniform linear or planar arrays.

Randomness contract: every function that draws from the generator documents
its draw order, so that a given seed reproduces a channel set bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError


def ula_response(azimuth: float, n: int) -> np.ndarray:
    """Unit-norm uniform-linear-array response.

    Entry k (0-based) is exp(j*pi*k*sin(azimuth)) / sqrt(n) for
    half-wavelength spacing.
    """
    k = np.arange(n)
    return np.exp(1j * np.pi * k * math.sin(azimuth)) / math.sqrt(n)


def upa_response(azimuth: float, elevation: float, n_x: int, n_y: int) -> np.ndarray:
    """Unit-norm uniform-planar-array response, row-major flattened.

    The element at grid position (m, n), 0-based, lands at flat index
    m * n_y + n and contributes
    exp(j*pi*(m*cos(elevation)*sin(azimuth) + n*sin(elevation))) / sqrt(n_x*n_y).
    """
    m = np.arange(n_x)[:, None]
    n = np.arange(n_y)[None, :]
    phase = m * (math.cos(elevation) * math.sin(azimuth)) + n * math.sin(elevation)
    return (np.exp(1j * np.pi * phase) / math.sqrt(n_x * n_y)).reshape(-1)


def most_square_factorization(count: int) -> tuple[int, int]:
    """Factor a positive element count into the most-square (n_x, n_y) grid."""
    if count < 1:
        raise ValueError(f"element count must be >= 1, got {count}")
    for d in range(int(math.isqrt(count)), 0, -1):
        if count % d == 0:
            return d, count // d
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class ArrayGeometry:
    """Antenna array: a linear array (one angle per path) or a planar array
    (azimuth and elevation per path)."""

    kind: str  # "ula" or "upa"
    shape: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("ula", "upa"):
            raise ValueError(f"unknown array kind {self.kind!r}")
        expected = 1 if self.kind == "ula" else 2
        if len(self.shape) != expected or any(s < 1 for s in self.shape):
            raise ValueError(f"invalid {self.kind} shape {self.shape}")

    @classmethod
    def ula(cls, n: int) -> "ArrayGeometry":
        return cls("ula", (n,))

    @classmethod
    def upa(cls, n_x: int, n_y: int) -> "ArrayGeometry":
        return cls("upa", (n_x, n_y))

    @classmethod
    def upa_from_count(cls, count: int) -> "ArrayGeometry":
        return cls("upa", most_square_factorization(count))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def draw_angles(self, rng: np.random.Generator) -> tuple[float, ...]:
        """Draw the per-path angles, each uniform on [-pi/2, pi/2].

        Consumes one uniform for a linear array (azimuth), two for a planar
        array (azimuth then elevation).
        """
        half = math.pi / 2
        if self.kind == "ula":
            return (float(rng.uniform(-half, half)),)
        return (float(rng.uniform(-half, half)), float(rng.uniform(-half, half)))

    def response(self, angles: tuple[float, ...]) -> np.ndarray:
        if self.kind == "ula":
            return ula_response(angles[0], self.shape[0])
        return upa_response(angles[0], angles[1], self.shape[0], self.shape[1])


@dataclass(frozen=True)
class PathLossParams:
    """Log-distance path-loss parameters, all in dB: loss(d) = a + 10*b*log10(d)
    plus zero-mean lognormal shadowing with standard deviation sigma."""

    los_a: float = 61.4
    los_b: float = 2.0
    los_sigma: float = 5.8
    nlos_a: float = 72.0
    nlos_b: float = 2.92
    nlos_sigma: float = 8.7

    def coefficients(self, los: bool) -> tuple[float, float, float]:
        if los:
            return self.los_a, self.los_b, self.los_sigma
        return self.nlos_a, self.nlos_b, self.nlos_sigma


def path_loss_db(
    los: bool, distance: float, params: PathLossParams, rng: np.random.Generator
) -> float:
    """Path loss in dB including one shadowing draw.

    Consumes exactly one Gaussian from ``rng`` (also when sigma is zero, so
    draw order downstream does not depend on parameter values).
    """
    if distance <= 0:
        raise ValueError(f"distance must be positive, got {distance}")
    a, b, sigma = params.coefficients(los)
    shadow = float(rng.normal(0.0, sigma))
    return a + 10.0 * b * math.log10(distance) + shadow


@dataclass(frozen=True)
class LinkSpec:
    """One point-to-point link to synthesize."""

    tx: ArrayGeometry
    rx: ArrayGeometry
    distance: float
    n_paths: int
    los: bool = True  # leading path line-of-sight, the rest non-line-of-sight

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.distance <= 0:
            raise ValueError(f"distance must be positive, got {self.distance}")


@dataclass(frozen=True)
class PathRecord:
    """Per-path draw, retained so correlated error terms can be rebuilt."""

    gain: complex
    loss_db: float
    rx_angles: tuple[float, ...]
    tx_angles: tuple[float, ...]
    rx_response: np.ndarray
    tx_response: np.ndarray


def synth_channel(
    spec: LinkSpec, params: PathLossParams, rng: np.random.Generator
) -> tuple[np.ndarray, list[PathRecord]]:
    """Synthesize one channel matrix of shape (rx.size, tx.size).

    The matrix is sqrt(n_tx * n_rx / n_paths) times the sum over paths of
    gain * rx_response * tx_response^H, where each gain is complex Gaussian
    with variance 10^(-loss_db / 10).

    Draw order, per path, in path order: one shadowing Gaussian, two gain
    Gaussians (real then imaginary), the receive angles, the transmit angles.
    """
    n_rx, n_tx = spec.rx.size, spec.tx.size
    prefactor = math.sqrt(n_tx * n_rx / spec.n_paths)
    matrix = np.zeros((n_rx, n_tx), dtype=np.complex128)
    paths: list[PathRecord] = []
    for i in range(spec.n_paths):
        los = spec.los and i == 0
        loss_db = path_loss_db(los, spec.distance, params, rng)
        sigma = math.sqrt(10.0 ** (-loss_db / 10.0))
        gain = sigma / math.sqrt(2.0) * complex(rng.standard_normal(), rng.standard_normal())
        rx_angles = spec.rx.draw_angles(rng)
        tx_angles = spec.tx.draw_angles(rng)
        rx_resp = spec.rx.response(rx_angles)
        tx_resp = spec.tx.response(tx_angles)
        matrix += gain * np.outer(rx_resp, tx_resp.conj())
        paths.append(PathRecord(gain, loss_db, rx_angles, tx_angles, rx_resp, tx_resp))
    return prefactor * matrix, paths


def csi_error(
    paths: list[PathRecord], error_std: float, rng: np.random.Generator
) -> np.ndarray:
    """Channel estimation error correlated with the path structure.

    Each path contributes delta * gain * rx_response * tx_response^H where
    delta is complex Gaussian with variance error_std**2, drawn independently
    per path (real then imaginary). The expected squared Frobenius norm of
    the result is error_std**2 times that of the underlying channel.
    """
    if error_std < 0:
        raise ValueError(f"error_std must be >= 0, got {error_std}")
    if not paths:
        raise ValueError("csi_error requires at least one path record")
    n_rx = paths[0].rx_response.size
    n_tx = paths[0].tx_response.size
    prefactor = math.sqrt(n_tx * n_rx / len(paths))
    delta_h = np.zeros((n_rx, n_tx), dtype=np.complex128)
    for p in paths:
        delta = error_std / math.sqrt(2.0) * complex(rng.standard_normal(), rng.standard_normal())
        delta_h += delta * p.gain * np.outer(p.rx_response, p.tx_response.conj())
    return prefactor * delta_h


@dataclass(frozen=True)
class Topology:
    """Planar node positions in meters."""

    tx: tuple[float, float] = (0.0, 0.0)
    surface: tuple[float, float] = (80.0, 2.0)
    rx: tuple[float, float] = (90.0, 0.0)
    eve: tuple[float, float] = (100.0, 0.0)

    @staticmethod
    def _dist(a: tuple[float, float], b: tuple[float, float]) -> float:
        return math.hypot(a[0] - b[0], a[1] - b[1])

    def distance(self, a: str, b: str) -> float:
        return self._dist(getattr(self, a), getattr(self, b))


@dataclass(frozen=True)
class NodeArrays:
    """Array geometry per node."""

    tx: ArrayGeometry
    rx: ArrayGeometry
    eve: ArrayGeometry
    surface: ArrayGeometry

    @classmethod
    def from_counts(cls, n_tx: int, n_rx: int, n_eve: int, n_surface: int) -> "NodeArrays":
        return cls(
            tx=ArrayGeometry.ula(n_tx),
            rx=ArrayGeometry.ula(n_rx),
            eve=ArrayGeometry.ula(n_eve),
            surface=ArrayGeometry.upa_from_count(n_surface),
        )


@dataclass
class ChannelSet:
    """All channels of one trial.

    Eavesdropper links exist in an estimated and a true variant; the true
    matrix is the estimated one plus a correlated error term. Optimization
    consumes the estimated matrices, final reporting the true ones.
    """

    tx_to_surface: np.ndarray  # (n_surface, n_tx)
    surface_to_rx: np.ndarray  # (n_rx, n_surface)
    tx_to_rx: np.ndarray  # (n_rx, n_tx)
    surface_to_eve_est: np.ndarray  # (n_eve, n_surface)
    surface_to_eve_true: np.ndarray
    tx_to_eve_est: np.ndarray  # (n_eve, n_tx)
    tx_to_eve_true: np.ndarray

    def __post_init__(self) -> None:
        n_surface, n_tx = self.tx_to_surface.shape
        n_rx = self.surface_to_rx.shape[0]
        n_eve = self.surface_to_eve_est.shape[0]
        checks = [
            (self.surface_to_rx, (n_rx, n_surface)),
            (self.tx_to_rx, (n_rx, n_tx)),
            (self.surface_to_eve_est, (n_eve, n_surface)),
            (self.surface_to_eve_true, (n_eve, n_surface)),
            (self.tx_to_eve_est, (n_eve, n_tx)),
            (self.tx_to_eve_true, (n_eve, n_tx)),
        ]
        for arr, shape in checks:
            if arr.shape != shape:
                raise DimensionMismatchError(
                    f"channel shape {arr.shape} does not match expected {shape}"
                )

    @property
    def n_surface(self) -> int:
        return self.tx_to_surface.shape[0]


def build_channel_set(
    topology: Topology,
    arrays: NodeArrays,
    n_paths: int,
    csi_error_std: float,
    params: PathLossParams | None = None,
    rng: np.random.Generator | None = None,
) -> ChannelSet:
    """Draw one full channel realization.

    Draw order: tx->surface, surface->rx, tx->rx, surface->eve, tx->eve,
    then the surface->eve error, then the tx->eve error. Only the
    eavesdropper links carry estimation error; the legitimate links are
    assumed perfectly known.
    """
    params = params or PathLossParams()
    rng = rng if rng is not None else np.random.default_rng()

    def link(tx: ArrayGeometry, rx: ArrayGeometry, a: str, b: str):
        spec = LinkSpec(tx=tx, rx=rx, distance=topology.distance(a, b), n_paths=n_paths)
        return synth_channel(spec, params, rng)

    tx_to_surface, _ = link(arrays.tx, arrays.surface, "tx", "surface")
    surface_to_rx, _ = link(arrays.surface, arrays.rx, "surface", "rx")
    tx_to_rx, _ = link(arrays.tx, arrays.rx, "tx", "rx")
    surface_to_eve, se_paths = link(arrays.surface, arrays.eve, "surface", "eve")
    tx_to_eve, te_paths = link(arrays.tx, arrays.eve, "tx", "eve")
    surface_err = csi_error(se_paths, csi_error_std, rng)
    tx_err = csi_error(te_paths, csi_error_std, rng)
    return ChannelSet(
        tx_to_surface=tx_to_surface,
        surface_to_rx=surface_to_rx,
        tx_to_rx=tx_to_rx,
        surface_to_eve_est=surface_to_eve,
        surface_to_eve_true=surface_to_eve + surface_err,
        tx_to_eve_est=tx_to_eve,
        tx_to_eve_true=tx_to_eve + tx_err,
    )

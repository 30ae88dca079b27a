"""Signal model of the surface-assisted wiretap link.

A reconfigurable surface with N elements applies per-element complex
coefficients to the incident signal. A subset of elements ("active") can
amplify (gain >= 1) at the cost of injecting amplified thermal noise and
drawing from a shared power budget; the remaining elements are passive
phase shifters with unit gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .channel import ChannelSet
from .errors import DimensionMismatchError


@dataclass(frozen=True)
class SurfaceConfig:
    """Surface layout: element count, which elements amplify, their power
    budget, and the element-level thermal noise power (watts)."""

    n_elements: int
    active_set: tuple[int, ...] = ()
    power_budget: float = 0.01  # watts available to the active elements
    noise_power: float = 1e-11  # thermal noise re-radiated by active elements

    def __post_init__(self) -> None:
        if self.n_elements < 1:
            raise ValueError(f"n_elements must be >= 1, got {self.n_elements}")
        idx = tuple(sorted(int(i) for i in self.active_set))
        if len(set(idx)) != len(idx):
            raise ValueError(f"active_set has duplicates: {self.active_set}")
        if idx and (idx[0] < 0 or idx[-1] >= self.n_elements):
            raise ValueError(f"active_set {self.active_set} out of range for n={self.n_elements}")
        if self.power_budget < 0:
            raise ValueError(f"power_budget must be >= 0, got {self.power_budget}")
        if self.noise_power <= 0:
            raise ValueError(f"noise_power must be positive, got {self.noise_power}")
        object.__setattr__(self, "active_set", idx)

    @classmethod
    def first_k_active(
        cls, n_elements: int, k: int, power_budget: float, noise_power: float = 1e-11
    ) -> "SurfaceConfig":
        return cls(n_elements, tuple(range(k)), power_budget, noise_power)

    @classmethod
    def all_passive(cls, n_elements: int, noise_power: float = 1e-11) -> "SurfaceConfig":
        return cls(n_elements, (), 0.0, noise_power)

    @property
    def n_active(self) -> int:
        return len(self.active_set)

    @property
    def active_indices(self) -> np.ndarray:
        return np.asarray(self.active_set, dtype=int)


@dataclass
class CoefficientVector:
    """Per-element surface response: amplitudes and phases in radians.

    Passive elements must keep amplitude exactly 1; active elements have
    amplitude >= 1. The all-zero vector is a deliberate escape hatch that
    switches the surface off entirely (used by the surface-free benchmark).
    """

    amplitudes: np.ndarray
    phases: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        self.phases = np.asarray(self.phases, dtype=float)
        if self.amplitudes.shape != self.phases.shape or self.amplitudes.ndim != 1:
            raise DimensionMismatchError(
                f"amplitudes {self.amplitudes.shape} and phases {self.phases.shape} "
                "must be equal-length vectors"
            )

    @classmethod
    def neutral(cls, n: int, rng: np.random.Generator | None = None) -> "CoefficientVector":
        """Unit amplitudes; random phases in (0, 2*pi] when a generator is given."""
        phases = (1.0 - rng.random(n)) * (2.0 * math.pi) if rng is not None else np.zeros(n)
        return cls(np.ones(n), phases)

    @classmethod
    def disabled(cls, n: int) -> "CoefficientVector":
        """All-zero coefficients: the surface contributes nothing."""
        return cls(np.zeros(n), np.zeros(n))

    @property
    def n_elements(self) -> int:
        return self.amplitudes.size

    def values(self) -> np.ndarray:
        """Complex per-element coefficients amplitude * exp(j * phase)."""
        return self.amplitudes * np.exp(1j * self.phases)


@dataclass(frozen=True)
class SystemParams:
    """Link-level scalars, in watts."""

    transmit_power: float
    noise_power: float

    def __post_init__(self) -> None:
        if self.transmit_power <= 0 or self.noise_power <= 0:
            raise ValueError("transmit_power and noise_power must be positive")


@dataclass(frozen=True)
class SecrecyResult:
    """Rates in bits per channel use."""

    legitimate: float
    eavesdropper: float
    secrecy: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.legitimate) and math.isfinite(self.eavesdropper)):
            raise ValueError("rates must be finite")
        if self.legitimate < 0 or self.eavesdropper < 0:
            raise ValueError("rates must be nonnegative")
        if self.secrecy != max(self.legitimate - self.eavesdropper, 0.0):
            raise ValueError("secrecy must equal the clamped rate difference")


def effective_channel(
    direct: np.ndarray,
    from_surface: np.ndarray,
    to_surface: np.ndarray,
    coeffs: CoefficientVector,
) -> np.ndarray:
    """Cascade direct + from_surface @ diag(coeffs) @ to_surface."""
    n = coeffs.n_elements
    if from_surface.shape[1] != n or to_surface.shape[0] != n:
        raise DimensionMismatchError(
            f"surface dimension mismatch: {from_surface.shape} x diag({n}) x {to_surface.shape}"
        )
    return direct + (from_surface * coeffs.values()) @ to_surface


def noise_covariance(
    from_surface: np.ndarray, config: SurfaceConfig, coeffs: CoefficientVector
) -> np.ndarray:
    """Receive-side noise covariance, normalized by the thermal noise power.

    Active elements forward their own thermal noise with power gain
    |amplitude|^2, so the covariance is I plus the amplified outer product of
    the corresponding surface-to-receiver columns. Passive elements add
    nothing beyond the receiver's own noise.
    """
    n_rx = from_surface.shape[0]
    eye = np.eye(n_rx, dtype=np.complex128)
    if config.n_active == 0:
        return eye
    if from_surface.shape[1] != coeffs.n_elements:
        raise DimensionMismatchError(
            f"coefficients ({coeffs.n_elements}) do not match surface ({from_surface.shape[1]})"
        )
    idx = config.active_indices
    cols = from_surface[:, idx]
    gains = coeffs.amplitudes[idx] ** 2
    q = eye + (cols * gains) @ cols.conj().T
    # Matmul kernels leave sub-ulp asymmetry; downstream solvers expect exact.
    return 0.5 * (q + q.conj().T)


def capacity(
    h_eff: np.ndarray, q_noise: np.ndarray, w: np.ndarray, noise_power: float
) -> float:
    """Achievable rate log2(1 + w^H H^H Q^{-1} H w / noise_power).

    Equal to the determinant form log2 det(I + Q^{-1} H w w^H H^H / noise)
    because the transmit side is a single stream.
    """
    if h_eff.shape[1] != w.size or q_noise.shape[0] != h_eff.shape[0]:
        raise DimensionMismatchError(
            f"capacity shapes disagree: H {h_eff.shape}, Q {q_noise.shape}, w {w.shape}"
        )
    y = h_eff @ w
    q_inv = numerics.inverse(q_noise)
    snr = float(np.vdot(y, q_inv @ y).real) / noise_power
    return math.log2(1.0 + max(snr, 0.0))


def secrecy_capacity(c_legitimate: float, c_eavesdropper: float) -> SecrecyResult:
    """Bundle both rates with the clamped, nonnegative rate difference."""
    return SecrecyResult(
        c_legitimate, c_eavesdropper, max(c_legitimate - c_eavesdropper, 0.0)
    )


def active_power(
    coeffs: CoefficientVector,
    config: SurfaceConfig,
    to_surface: np.ndarray,
    w: np.ndarray,
) -> tuple[float, np.ndarray]:
    """Power drawn by the active elements and their per-element loads.

    Each active element n re-radiates the incident signal plus its own
    thermal noise, so its load is xi_n = |row_n(to_surface) @ w|^2 + noise
    and it consumes |amplitude_n|^2 * xi_n.

    Returns:
        (total_power, xi) with xi ordered like ``config.active_set``.
    """
    if to_surface.shape[0] != coeffs.n_elements:
        raise DimensionMismatchError(
            f"coefficients ({coeffs.n_elements}) do not match surface ({to_surface.shape[0]})"
        )
    idx = config.active_indices
    incident = to_surface[idx] @ w
    xi = np.abs(incident) ** 2 + config.noise_power
    total = float(np.sum(coeffs.amplitudes[idx] ** 2 * xi))
    return total, xi


def evaluate(
    channels: ChannelSet,
    coeffs: CoefficientVector,
    w: np.ndarray,
    params: SystemParams,
    config: SurfaceConfig,
    use_true_eve: bool = False,
) -> SecrecyResult:
    """Rates of both receivers and the secrecy rate for one coefficient/beam pair.

    ``use_true_eve`` selects the true eavesdropper channels (final reporting)
    instead of the estimated ones (optimization surface).
    """
    h_rx = effective_channel(
        channels.tx_to_rx, channels.surface_to_rx, channels.tx_to_surface, coeffs
    )
    q_rx = noise_covariance(channels.surface_to_rx, config, coeffs)
    c_rx = capacity(h_rx, q_rx, w, params.noise_power)

    surface_to_eve = channels.surface_to_eve_true if use_true_eve else channels.surface_to_eve_est
    tx_to_eve = channels.tx_to_eve_true if use_true_eve else channels.tx_to_eve_est
    h_eve = effective_channel(tx_to_eve, surface_to_eve, channels.tx_to_surface, coeffs)
    q_eve = noise_covariance(surface_to_eve, config, coeffs)
    c_eve = capacity(h_eve, q_eve, w, params.noise_power)

    return secrecy_capacity(c_rx, c_eve)

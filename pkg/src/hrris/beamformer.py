"""Closed-form transmit beamforming for a fixed surface configuration.

With the surface coefficients held fixed, both receiver rates are
log2(1 + w^H G w) for whitened channel Gram matrices G, and the secrecy
rate difference is maximized over the power ball by the scaled dominant
eigenvector of a ratio of regularized Grams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .channel import ChannelSet
from .errors import DimensionMismatchError
from .system import (
    CoefficientVector,
    SurfaceConfig,
    SystemParams,
    effective_channel,
    noise_covariance,
)


@dataclass(frozen=True)
class BeamformingContext:
    """Quadratic forms seen by the transmitter.

    ``rx_gram`` and ``eve_gram`` are H^H Q^{-1} H / noise_power for the
    legitimate and (estimated) eavesdropper links: the rate of either
    receiver under beam w is log2(1 + w^H G w).
    """

    rx_gram: np.ndarray
    eve_gram: np.ndarray
    transmit_power: float

    def __post_init__(self) -> None:
        if self.rx_gram.shape != self.eve_gram.shape or self.rx_gram.ndim != 2:
            raise DimensionMismatchError(
                f"gram shapes disagree: {self.rx_gram.shape} vs {self.eve_gram.shape}"
            )
        if self.transmit_power <= 0:
            raise ValueError("transmit_power must be positive")


def whitened_gram(h_eff: np.ndarray, q_noise: np.ndarray, noise_power: float) -> np.ndarray:
    """H^H Q^{-1} H / noise_power, symmetrized to be exactly Hermitian."""
    g = h_eff.conj().T @ numerics.inverse(q_noise) @ h_eff / noise_power
    return 0.5 * (g + g.conj().T)


def build_context(
    channels: ChannelSet,
    coeffs: CoefficientVector,
    params: SystemParams,
    config: SurfaceConfig,
    use_true_eve: bool = False,
) -> BeamformingContext:
    """Grams for the current surface state; by default the eavesdropper side
    uses the estimated channels, which is all the transmitter has to
    optimize against."""
    h_rx = effective_channel(
        channels.tx_to_rx, channels.surface_to_rx, channels.tx_to_surface, coeffs
    )
    q_rx = noise_covariance(channels.surface_to_rx, config, coeffs)
    surface_to_eve = channels.surface_to_eve_true if use_true_eve else channels.surface_to_eve_est
    tx_to_eve = channels.tx_to_eve_true if use_true_eve else channels.tx_to_eve_est
    h_eve = effective_channel(tx_to_eve, surface_to_eve, channels.tx_to_surface, coeffs)
    q_eve = noise_covariance(surface_to_eve, config, coeffs)
    return BeamformingContext(
        rx_gram=whitened_gram(h_rx, q_rx, params.noise_power),
        eve_gram=whitened_gram(h_eve, q_eve, params.noise_power),
        transmit_power=params.transmit_power,
    )


def objective_ratio(ctx: BeamformingContext, w: np.ndarray) -> float:
    """(1 + w^H rx_gram w) / (1 + w^H eve_gram w).

    log2 of this ratio is the (estimated) rate difference, so ranking beams
    by the ratio ranks them by secrecy rate before clamping.
    """
    num = 1.0 + max(float(np.vdot(w, ctx.rx_gram @ w).real), 0.0)
    den = 1.0 + max(float(np.vdot(w, ctx.eve_gram @ w).real), 0.0)
    return num / den


def optimal_beamformer(ctx: BeamformingContext) -> np.ndarray:
    """Beam maximizing the rate-difference ratio over the transmit power ball.

    The maximizer is the dominant eigenvector of
    (eve_gram + I/P)^{-1} (rx_gram + I/P), scaled to use the full budget.
    The product of two positive definite matrices has a real positive
    spectrum, so the power iteration applies even though it is not Hermitian.
    """
    n = ctx.rx_gram.shape[0]
    reg = np.eye(n, dtype=np.complex128) / ctx.transmit_power
    m = numerics.inverse(ctx.eve_gram + reg) @ (ctx.rx_gram + reg)
    _, v = numerics.dominant_eigenvector(m)
    return math.sqrt(ctx.transmit_power) * v

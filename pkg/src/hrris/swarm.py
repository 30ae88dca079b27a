"""Constriction-factor particle swarm search over surface coefficients.

Positions are real vectors [amplitudes, phases] of length 2N. Passive
elements are pinned to amplitude 1 through degenerate bounds, so the swarm
only ever moves their phases. The power budget of the active elements
enters the cost as a hinge penalty; the returned optimum is the best
budget-feasible position ever evaluated, not the penalized incumbent.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import numerics
from .channel import ChannelSet
from .errors import (
    DimensionMismatchError,
    FeasibilityFailure,
    InfeasibleBudgetError,
    InvalidKappaError,
)
from .system import CoefficientVector, SurfaceConfig


@dataclass(frozen=True)
class SwarmParams:
    """Swarm size, iteration budget, and the constriction/penalty knobs."""

    n_particles: int = 20
    max_iters: int = 30
    kappa1: float = 2.05
    kappa2: float = 2.05
    penalty: float = 1e3

    def __post_init__(self) -> None:
        if self.n_particles < 1 or self.max_iters < 0:
            raise ValueError("need n_particles >= 1 and max_iters >= 0")
        if self.penalty < 0:
            raise ValueError("penalty must be nonnegative")


def constriction(kappa1: float, kappa2: float) -> tuple[float, float, float]:
    """(inertia, cognitive, social) weights of the constriction mapping.

    Requires kappa1 + kappa2 > 4 for the swarm to contract.
    """
    k = kappa1 + kappa2
    if k <= 4.0:
        raise InvalidKappaError(f"kappa1 + kappa2 must exceed 4, got {k}")
    chi = 2.0 / abs(2.0 - k - math.sqrt(k * k - 4.0 * k))
    return chi, chi * kappa1, chi * kappa2


@dataclass(frozen=True)
class Bounds:
    """Per-dimension box; a pinned dimension has lower == upper."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self) -> None:
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise DimensionMismatchError(
                f"bound shapes disagree: {self.lower.shape} vs {self.upper.shape}"
            )
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")


def make_bounds(config: SurfaceConfig, xi_active: np.ndarray) -> Bounds:
    """Search box for a given surface layout and per-element loads.

    Active amplitudes range from 1 (no gain) to the single-element cap
    sqrt(budget / min load); passive amplitudes are pinned at 1. All phases
    span a full turn. Raises when even unit gains overrun the budget, since
    then no amplitude assignment is feasible.
    """
    n = config.n_elements
    xi_active = np.asarray(xi_active, dtype=float)
    if xi_active.size != config.n_active:
        raise DimensionMismatchError(
            f"got {xi_active.size} loads for {config.n_active} active elements"
        )
    amp_lower = np.ones(n)
    amp_upper = np.ones(n)
    if config.n_active:
        floor = float(np.sum(xi_active))
        if floor > config.power_budget:
            raise InfeasibleBudgetError(
                f"unit-gain active power {floor:.3e} W exceeds budget "
                f"{config.power_budget:.3e} W"
            )
        amp_upper[config.active_indices] = math.sqrt(
            config.power_budget / float(xi_active.min())
        )
    return Bounds(
        lower=np.concatenate([amp_lower, np.zeros(n)]),
        upper=np.concatenate([amp_upper, np.full(n, 2.0 * math.pi)]),
    )


def encode(coeffs: CoefficientVector) -> np.ndarray:
    return np.concatenate([coeffs.amplitudes, coeffs.phases])


def decode(position: np.ndarray) -> CoefficientVector:
    n = position.size // 2
    return CoefficientVector(position[:n].copy(), position[n:].copy())


@dataclass(frozen=True)
class CostContext:
    """Everything the cost needs that does not change while the beam is fixed.

    The cascades are the per-element receive signatures scaled by the signal
    incident on each element, so the received signal under coefficients v is
    direct + cascade @ v.
    """

    rx_cascade: np.ndarray
    eve_cascade: np.ndarray
    rx_direct: np.ndarray
    eve_direct: np.ndarray
    rx_active_cols: np.ndarray
    eve_active_cols: np.ndarray
    xi_active: np.ndarray
    active_idx: np.ndarray
    noise_power: float
    power_budget: float
    penalty: float

    @property
    def n_elements(self) -> int:
        return self.rx_cascade.shape[1]


def make_cost_context(
    channels: ChannelSet,
    config: SurfaceConfig,
    w: np.ndarray,
    penalty: float = 1e3,
) -> CostContext:
    """Precompute the beam-dependent pieces of the swarm cost.

    The eavesdropper side uses the estimated channels, matching what the
    optimizer is allowed to know.
    """
    if channels.tx_to_surface.shape[1] != w.size:
        raise DimensionMismatchError(
            f"beam length {w.size} does not match transmit array "
            f"({channels.tx_to_surface.shape[1]})"
        )
    incident = channels.tx_to_surface @ w
    idx = config.active_indices
    return CostContext(
        rx_cascade=channels.surface_to_rx * incident,
        eve_cascade=channels.surface_to_eve_est * incident,
        rx_direct=channels.tx_to_rx @ w,
        eve_direct=channels.tx_to_eve_est @ w,
        rx_active_cols=channels.surface_to_rx[:, idx],
        eve_active_cols=channels.surface_to_eve_est[:, idx],
        xi_active=np.abs(incident[idx]) ** 2 + config.noise_power,
        active_idx=idx,
        noise_power=config.noise_power,
        power_budget=config.power_budget,
        penalty=penalty,
    )


def _amplified_snr(y: np.ndarray, cols: np.ndarray, gains: np.ndarray) -> float:
    """y^H Q^{-1} y with Q = I + cols diag(gains) cols^H."""
    q = np.eye(cols.shape[0], dtype=np.complex128) + (cols * gains) @ cols.conj().T
    return float(np.vdot(y, numerics.inverse(q) @ y).real)


def cost_batch(positions: np.ndarray, ctx: CostContext) -> tuple[np.ndarray, np.ndarray]:
    """Penalized costs and budget feasibility for a batch of positions.

    The cost is the negated rate-difference ratio plus penalty * overshoot;
    minimizing it maximizes the estimated secrecy rate within the budget.
    """
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    n = ctx.n_elements
    if pos.shape[1] != 2 * n:
        raise DimensionMismatchError(f"position width {pos.shape[1]}, expected {2 * n}")
    amps = pos[:, :n]
    values = amps * np.exp(1j * pos[:, n:])
    y_rx = values @ ctx.rx_cascade.T + ctx.rx_direct
    y_ev = values @ ctx.eve_cascade.T + ctx.eve_direct

    if ctx.active_idx.size:
        gains = amps[:, ctx.active_idx] ** 2
        power = gains @ ctx.xi_active
        snr_rx = np.array([
            _amplified_snr(y_rx[p], ctx.rx_active_cols, gains[p]) for p in range(pos.shape[0])
        ])
        snr_ev = np.array([
            _amplified_snr(y_ev[p], ctx.eve_active_cols, gains[p]) for p in range(pos.shape[0])
        ])
    else:
        power = np.zeros(pos.shape[0])
        snr_rx = np.einsum("pi,pi->p", y_rx.conj(), y_rx).real
        snr_ev = np.einsum("pi,pi->p", y_ev.conj(), y_ev).real

    ratio = (1.0 + np.maximum(snr_rx, 0.0) / ctx.noise_power) / (
        1.0 + np.maximum(snr_ev, 0.0) / ctx.noise_power
    )
    overshoot = np.maximum(power - ctx.power_budget, 0.0)
    return -ratio + ctx.penalty * overshoot, power <= ctx.power_budget


def cost(position: np.ndarray, ctx: CostContext) -> float:
    return float(cost_batch(position, ctx)[0][0])


def batch_cost(ctx: CostContext) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Bind a cost context into the batch evaluator ``optimize`` expects."""
    return lambda positions: cost_batch(positions, ctx)


@dataclass(frozen=True)
class SwarmResult:
    """Best budget-feasible position found, its cost, and the incumbent trace."""

    position: np.ndarray
    cost: float
    history: np.ndarray


def optimize(
    params: SwarmParams,
    bounds: Bounds,
    evaluate_batch: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    rng: np.random.Generator,
    seed_positions: list[np.ndarray] | None = None,
) -> SwarmResult:
    """Synchronous constriction-factor swarm search inside the box.

    ``evaluate_batch`` maps an (n_particles, dim) position block to a pair
    (costs, feasible); the coefficient search passes ``batch_cost(ctx)``, but
    any vectorized objective works. Seed positions (clipped into the box)
    replace the first particles, which lets callers warm-start from an
    incumbent. Velocities start at zero; a particle hitting the box is
    clamped and has the offending velocity component zeroed. Personal and
    global bests update only on strict improvement, so reruns are
    reproducible tie-for-tie.
    """
    inertia, cognitive, social = constriction(params.kappa1, params.kappa2)
    lower, upper = bounds.lower, bounds.upper
    n_particles, dim = params.n_particles, lower.size

    x = lower + (upper - lower) * rng.random((n_particles, dim))
    for i, seed in enumerate((seed_positions or [])[:n_particles]):
        if seed.size != dim:
            raise DimensionMismatchError(f"seed width {seed.size}, expected {dim}")
        x[i] = np.clip(seed, lower, upper)
    v = np.zeros((n_particles, dim))

    best_cost = math.inf
    best_pos: np.ndarray | None = None

    def track(costs: np.ndarray, feasible: np.ndarray) -> None:
        nonlocal best_cost, best_pos
        if np.any(feasible):
            masked = np.where(feasible, costs, math.inf)
            i = int(np.argmin(masked))
            if masked[i] < best_cost:
                best_cost = float(masked[i])
                best_pos = x[i].copy()

    costs, feasible = evaluate_batch(x)
    track(costs, feasible)
    pbest = x.copy()
    pbest_cost = costs.copy()
    g = int(np.argmin(pbest_cost))
    gbest = pbest[g].copy()
    gbest_cost = float(pbest_cost[g])
    history = [gbest_cost]

    for _ in range(params.max_iters):
        r1 = rng.random((n_particles, dim))
        r2 = rng.random((n_particles, dim))
        v = inertia * v + cognitive * r1 * (pbest - x) + social * r2 * (gbest - x)
        x = x + v
        out = (x < lower) | (x > upper)
        if np.any(out):
            x = np.clip(x, lower, upper)
            v = np.where(out, 0.0, v)

        costs, feasible = evaluate_batch(x)
        track(costs, feasible)
        improved = costs < pbest_cost
        pbest[improved] = x[improved]
        pbest_cost[improved] = costs[improved]
        g = int(np.argmin(pbest_cost))
        if pbest_cost[g] < gbest_cost:
            gbest = pbest[g].copy()
            gbest_cost = float(pbest_cost[g])
        history.append(gbest_cost)

    if best_pos is None:
        raise FeasibilityFailure(
            "no evaluated position satisfied the active power budget"
        )
    return SwarmResult(best_pos, best_cost, np.asarray(history))

"""Alternating optimization of the beam and the surface, plus the trial harness.

Each round solves the closed-form beam for the incumbent surface, rebuilds
the active-element load bounds under that beam, then runs the swarm over the
surface coefficients. A candidate pair is adopted only if it improves the
estimated rate difference, which keeps the optimization trace monotone and
the returned pair budget-feasible under its own beam even though the two
subproblems are coupled through the loads. Final results are always scored
against the true eavesdropper channels.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .beamformer import build_context, objective_ratio, optimal_beamformer
from .channel import ChannelSet, NodeArrays, Topology, build_channel_set
from .errors import InfeasibleBudgetError
from .swarm import (
    SwarmParams,
    batch_cost,
    decode,
    encode,
    make_bounds,
    make_cost_context,
    optimize,
)
from .system import (
    CoefficientVector,
    SecrecyResult,
    SurfaceConfig,
    SystemParams,
    active_power,
    evaluate,
)

_SCHEME_LABELS = {"none": "NoRis", "passive": "PassiveRis", "hybrid": "HrRis"}


@dataclass(frozen=True)
class Scheme:
    """Surface operating mode to benchmark.

    kind "none" disables the surface, "passive" uses phase-only elements,
    "hybrid" additionally amplifies on ``n_active`` elements subject to
    ``power_budget`` watts. The amplifying elements are the first
    ``n_active`` unless ``active_set`` picks them explicitly.
    """

    kind: str
    n_active: int = 0
    power_budget: float = 0.0
    active_set: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in _SCHEME_LABELS:
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "hybrid":
            if self.n_active < 1:
                raise ValueError("hybrid scheme needs n_active >= 1")
            if self.power_budget <= 0:
                raise ValueError("hybrid scheme needs a positive power budget")
            if self.active_set and len(self.active_set) != self.n_active:
                raise ValueError(
                    f"active_set lists {len(self.active_set)} elements, expected {self.n_active}"
                )
        elif self.n_active or self.power_budget or self.active_set:
            raise ValueError(f"scheme kind {self.kind!r} takes no active elements")

    @classmethod
    def none(cls) -> "Scheme":
        return cls("none")

    @classmethod
    def passive(cls) -> "Scheme":
        return cls("passive")

    @classmethod
    def hybrid(
        cls, n_active: int, power_budget: float, active_set: tuple[int, ...] = ()
    ) -> "Scheme":
        return cls("hybrid", n_active, power_budget, active_set)

    @property
    def label(self) -> str:
        return _SCHEME_LABELS[self.kind]

    def surface_config(self, n_elements: int, noise_power: float) -> SurfaceConfig:
        if self.kind == "hybrid":
            if self.active_set:
                return SurfaceConfig(
                    n_elements, self.active_set, self.power_budget, noise_power
                )
            return SurfaceConfig.first_k_active(
                n_elements, self.n_active, self.power_budget, noise_power
            )
        return SurfaceConfig.all_passive(n_elements, noise_power)


@dataclass(frozen=True)
class AoSettings:
    """Outer-loop budget and the swarm configuration used inside it."""

    max_rounds: int = 10
    rel_tol: float = 1e-3
    swarm: SwarmParams = SwarmParams()

    def __post_init__(self) -> None:
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")


@dataclass(frozen=True)
class AoResult:
    """Final true-channel rates plus the accepted optimization state."""

    result: SecrecyResult
    beam: np.ndarray
    coefficients: CoefficientVector
    trace: np.ndarray  # estimated rate difference after each accepted round

    @property
    def rounds(self) -> int:
        return self.trace.size


def _incumbent(channels, coeffs, params, config):
    ctx = build_context(channels, coeffs, params, config)
    w = optimal_beamformer(ctx)
    return w, math.log2(objective_ratio(ctx, w))


def run_scheme(
    channels: ChannelSet,
    scheme: Scheme,
    params: SystemParams,
    settings: AoSettings = AoSettings(),
    rng: np.random.Generator | None = None,
) -> AoResult:
    """Optimize one channel realization under the given scheme."""
    n = channels.n_surface
    if scheme.kind == "none":
        coeffs = CoefficientVector.disabled(n)
        config = SurfaceConfig.all_passive(n, params.noise_power)
        w, current = _incumbent(channels, coeffs, params, config)
        final = evaluate(channels, coeffs, w, params, config, use_true_eve=True)
        return AoResult(final, w, coeffs, np.array([current]))

    rng = rng if rng is not None else np.random.default_rng()
    config = scheme.surface_config(n, params.noise_power)
    coeffs = CoefficientVector.neutral(n, rng)
    w, current = _incumbent(channels, coeffs, params, config)

    if config.n_active:
        unit_power, _ = active_power(coeffs, config, channels.tx_to_surface, w)
        if unit_power > config.power_budget:
            # The budget cannot even power unit gains under this beam: run
            # the trial with the amplifiers shut off.
            config = SurfaceConfig.all_passive(n, params.noise_power)
            w, current = _incumbent(channels, coeffs, params, config)

    trace = [current]
    for round_idx in range(settings.max_rounds):
        # Beam step; at round 0 the incumbent beam already solves for coeffs.
        w_cand = (
            w
            if round_idx == 0
            else optimal_beamformer(build_context(channels, coeffs, params, config))
        )
        cost_ctx = make_cost_context(channels, config, w_cand, settings.swarm.penalty)
        try:
            bounds = make_bounds(config, cost_ctx.xi_active)
        except InfeasibleBudgetError:
            break  # the incumbent pair stays feasible under its own beam
        seeds = [encode(coeffs)]
        if config.n_active:
            # A unit-gain particle is feasible whenever the bounds are.
            seeds.append(encode(CoefficientVector(np.ones(n), coeffs.phases)))
        swarm_result = optimize(
            settings.swarm, bounds, batch_cost(cost_ctx), rng, seed_positions=seeds
        )
        cand = math.log2(-swarm_result.cost)
        if cand <= current:
            break  # beam and coefficients only move together, as a checked pair
        gain = cand - current
        coeffs, w, current = decode(swarm_result.position), w_cand, cand
        trace.append(current)
        if gain < settings.rel_tol * max(abs(current), 1.0):
            break

    final = evaluate(channels, coeffs, w, params, config, use_true_eve=True)
    return AoResult(final, w, coeffs, np.asarray(trace))


@dataclass(frozen=True)
class Scenario:
    """Everything defining one Monte Carlo cell except the scheme."""

    topology: Topology
    arrays: NodeArrays
    n_paths: int
    csi_error_std: float
    params: SystemParams


@dataclass(frozen=True)
class MonteCarloResult:
    """Per-trial rates, rows aligned with the scheme list passed in."""

    secrecy: np.ndarray
    legitimate: np.ndarray
    eavesdropper: np.ndarray
    rounds: np.ndarray

    @property
    def n_trials(self) -> int:
        return self.secrecy.shape[1]

    @property
    def mean_secrecy(self) -> np.ndarray:
        return self.secrecy.mean(axis=1)

    @property
    def std_secrecy(self) -> np.ndarray:
        if self.n_trials < 2:
            return np.zeros(self.secrecy.shape[0])
        return self.secrecy.std(axis=1, ddof=1)


def _run_trial(
    scenario: Scenario,
    schemes: list[Scheme],
    settings: AoSettings,
    base_seed: int,
    trial: int,
) -> list[AoResult]:
    """One paired trial: all schemes see the same channel realization."""
    channel_rng = np.random.default_rng(base_seed ^ trial)
    channels = build_channel_set(
        scenario.topology,
        scenario.arrays,
        scenario.n_paths,
        scenario.csi_error_std,
        rng=channel_rng,
    )
    outputs = []
    for scheme_idx, scheme in enumerate(schemes):
        opt_rng = np.random.default_rng((base_seed, trial, scheme_idx))
        outputs.append(run_scheme(channels, scheme, scenario.params, settings, opt_rng))
    return outputs


def monte_carlo(
    scenario: Scenario,
    schemes: list[Scheme],
    n_trials: int,
    base_seed: int,
    settings: AoSettings = AoSettings(),
    threads: int = 1,
) -> MonteCarloResult:
    """Paired Monte Carlo over channel realizations.

    Trial t draws its channels from seed ``base_seed ^ t`` and each scheme
    gets its own optimizer stream, so results do not depend on execution
    order or the number of threads.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    shape = (len(schemes), n_trials)
    secrecy = np.zeros(shape)
    legit = np.zeros(shape)
    eve = np.zeros(shape)
    rounds = np.zeros(shape, dtype=int)

    def fill(trial: int, outputs: list[AoResult]) -> None:
        for s, out in enumerate(outputs):
            secrecy[s, trial] = out.result.secrecy
            legit[s, trial] = out.result.legitimate
            eve[s, trial] = out.result.eavesdropper
            rounds[s, trial] = out.rounds

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {
                pool.submit(_run_trial, scenario, schemes, settings, base_seed, t): t
                for t in range(n_trials)
            }
            for future, trial in futures.items():
                fill(trial, future.result())
    else:
        for trial in range(n_trials):
            fill(trial, _run_trial(scenario, schemes, settings, base_seed, trial))

    return MonteCarloResult(secrecy, legit, eve, rounds)

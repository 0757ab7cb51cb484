"""
Monte Carlo simulation of asynchronous gossip with forceful agents.

Time is discretized into meeting slots. In each slot an initiator i is
drawn uniformly, a partner j from row i of the meeting matrix, and the
outcome from (beta_ij, alpha_ij, gamma_ij):
- average:   x_i, x_j <- (x_i + x_j) / 2
- influence: x_i <- eps x_i + (1 - eps) x_j, x_j unchanged
- disagree:  nothing changes

Randomness: every trial owns a generator derived from the master seed and
a spawn key, (0, h, t) for consensus weights, (1, t) for runs from a fixed
x(0), (2, t) for the decay profile. Uniforms are consumed in blocks of
block_size triples (u_initiator, u_partner, u_outcome), so a trial's path
does not depend on how trials are batched or scheduled on threads.

Used by: analysis_report, experiments, cli
Related: src/interaction_kernel.py (the expected update this process samples)
"""

import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import SETTINGS
from src.interaction_kernel import averaging_matrix, convergence_window_constants, influence_update_matrix
from src.models import SocialNetwork, as_vector

AVERAGE, INFLUENCE, DISAGREE = 0, 1, 2
OUTCOME_NAMES = ("average", "influence", "disagree")

WEIGHTS_STREAM, RUNS_STREAM, DECAY_STREAM, FREQUENCY_STREAM = 0, 1, 2, 3
TRIALS_PER_BATCH = 512


@dataclass(frozen=True)
class SimulationConfig:
    """
    Knobs for one simulation request. Defaults come from the environment
    settings; the seed only from the caller.
    """

    seed: int = 0
    tolerance: float = SETTINGS.tolerance
    max_events: int = SETTINGS.max_events
    trials: int = SETTINGS.trials
    block_size: int = SETTINGS.block_size
    workers: int = SETTINGS.workers
    decimation: int = SETTINGS.decimation

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        for name in ("max_events", "trials", "block_size", "workers", "decimation"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")

    def to_dict(self) -> Dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> "SimulationConfig":
        return cls(**{k: v for k, v in data.items() if k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class MeetingEvent:
    slot: int
    initiator: int
    partner: int
    outcome: int

    @property
    def outcome_name(self) -> str:
        return OUTCOME_NAMES[self.outcome]


@dataclass(frozen=True, eq=False)
class BeliefState:
    """Beliefs after `events` meeting slots."""

    x: np.ndarray
    events: int = 0

    @property
    def spread(self) -> float:
        return float(self.x.max() - self.x.min())


class MeetingSampler:
    """
    Maps uniform triples to meeting events for one network.

    Partner lookup is a search in the cumulative meeting row; the entry of
    the last positive probability and everything after it are pinned to 1
    so rounding in the row sum can never select a zero-probability partner.
    """

    def __init__(self, network: SocialNetwork):
        self.n = network.n
        self.epsilon = network.epsilon
        cumulative = np.cumsum(network.meeting, axis=1)
        for i in range(self.n):
            positive = np.flatnonzero(network.meeting[i] > 0)
            if positive.size:
                cumulative[i, positive[-1]:] = 1.0
        self.cumulative = cumulative
        self.alpha = np.array(network.alpha)
        self.beta = np.array(network.beta)

    def sample(self, U: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return sample_events(self, U)


def sample_events(sampler: MeetingSampler, U: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorized event sampling from an (m, 3) array of uniforms.

    Returns:
        (initiators, partners, outcomes), each of length m
    """
    U = np.asarray(U, dtype=float).reshape(-1, 3)
    i = np.minimum((U[:, 0] * sampler.n).astype(np.int64), sampler.n - 1)
    j = (sampler.cumulative[i] <= U[:, 1:2]).sum(axis=1)
    j = np.minimum(j, sampler.n - 1)
    beta = sampler.beta[i, j]
    alpha = sampler.alpha[i, j]
    outcome = np.where(U[:, 2] < beta, AVERAGE, np.where(U[:, 2] < beta + alpha, INFLUENCE, DISAGREE))
    return i, j, outcome


def apply_events(X: np.ndarray, rows: np.ndarray, i: np.ndarray, j: np.ndarray, outcome: np.ndarray,
                 epsilon: float) -> None:
    """Apply one event per listed row of X in place."""
    xi = X[rows, i]
    xj = X[rows, j]
    mid = (xi + xj) / 2.0
    pulled = np.clip(epsilon * xi + (1.0 - epsilon) * xj, np.minimum(xi, xj), np.maximum(xi, xj))
    average = outcome == AVERAGE
    X[rows, i] = np.where(average, mid, np.where(outcome == INFLUENCE, pulled, xi))
    X[rows, j] = np.where(average, mid, xj)


def apply_event(x: np.ndarray, event: MeetingEvent, epsilon: float) -> np.ndarray:
    """Return the beliefs after one event; x is not modified."""
    X = np.array(x, dtype=float)[None, :]
    apply_events(X, np.array([0]), np.array([event.initiator]), np.array([event.partner]),
                 np.array([event.outcome]), epsilon)
    return X[0]


def trial_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream identified by key."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))))


def step(state: BeliefState, network: SocialNetwork, rng: np.random.Generator,
         sampler: Optional[MeetingSampler] = None) -> Tuple[BeliefState, MeetingEvent]:
    """Draw and apply exactly one meeting event."""
    sampler = sampler or MeetingSampler(network)
    i, j, outcome = sample_events(sampler, rng.random((1, 3)))
    event = MeetingEvent(slot=state.events, initiator=int(i[0]), partner=int(j[0]), outcome=int(outcome[0]))
    return BeliefState(x=apply_event(state.x, event, network.epsilon), events=state.events + 1), event


@dataclass
class _Batch:
    X: np.ndarray
    events: np.ndarray
    converged: np.ndarray
    records: List[np.ndarray]
    monotone: bool


def _simulate_batch(sampler: MeetingSampler, X0: np.ndarray, rngs: Sequence[np.random.Generator], max_events: int,
                    tolerance: Optional[float], block_size: int, record_every: int = 0) -> _Batch:
    """
    Run several trials in lockstep, one event per active trial per slot.

    tolerance=None runs every trial for exactly max_events slots.
    record_every > 0 keeps the spread of every trial every that many slots.
    """
    X = np.array(X0, dtype=float)
    count = X.shape[0]
    events = np.zeros(count, dtype=np.int64)
    spread = X.max(axis=1) - X.min(axis=1)
    active = spread > tolerance if tolerance is not None else np.ones(count, dtype=bool)
    records = [spread.copy()] if record_every else []
    monotone = True
    I = J = O = None

    slot = 0
    while slot < max_events and active.any():
        offset = slot % block_size
        if offset == 0:
            U = np.zeros((count, block_size, 3))
            for r in np.flatnonzero(active):
                U[r] = rngs[r].random((block_size, 3))
            I, J, O = (a.reshape(count, block_size) for a in sample_events(sampler, U))
        rows = np.flatnonzero(active)
        apply_events(X, rows, I[rows, offset], J[rows, offset], O[rows, offset], sampler.epsilon)
        events[rows] += 1
        updated = X[rows].max(axis=1) - X[rows].min(axis=1)
        if np.any(updated > spread[rows]):
            monotone = False
        spread[rows] = updated
        if tolerance is not None:
            active[rows] = updated > tolerance
        slot += 1
        if record_every and slot % record_every == 0:
            records.append(spread.copy())

    converged = spread <= tolerance if tolerance is not None else np.zeros(count, dtype=bool)
    return _Batch(X=X, events=events, converged=converged, records=records, monotone=monotone)


@dataclass(frozen=True, eq=False)
class RunResult:
    """Outcome of one run: consensus value (mean of final beliefs) and a decimated spread trace."""

    value: float
    events: int
    status: str  # "converged" | "max_events"
    trace: List[float]
    x: np.ndarray

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_dict(self) -> Dict:
        return {
            "value": self.value,
            "events": self.events,
            "status": self.status,
            "trace": list(self.trace),
            "x": self.x.tolist(),
        }


def run_to_consensus(network: SocialNetwork, x0: Sequence[float], config: Optional[SimulationConfig] = None,
                     rng: Optional[np.random.Generator] = None) -> RunResult:
    """
    Apply meeting events until the spread is within tolerance or max_events.

    Args:
        network: Valid network
        x0: Initial beliefs
        config: Seed, tolerance, event cap and trace decimation
        rng: Generator to use; defaults to the first fixed-x(0) stream

    Returns:
        RunResult; reaching max_events is a status, not an error
    """
    config = config or SimulationConfig()
    x = as_vector(x0, network.n)
    rng = rng or trial_rng(config.seed, RUNS_STREAM, 0)
    batch = _simulate_batch(MeetingSampler(network), x[None, :], [rng], config.max_events, config.tolerance,
                            config.block_size, record_every=config.decimation)
    trace = [float(r[0]) for r in batch.records]
    final = float(batch.X[0].max() - batch.X[0].min())
    if batch.events[0] % config.decimation:
        trace.append(final)
    return RunResult(
        value=float(batch.X[0].mean()),
        events=int(batch.events[0]),
        status="converged" if batch.converged[0] else "max_events",
        trace=trace,
        x=batch.X[0],
    )


def _run_trials(sampler: MeetingSampler, X0: np.ndarray, keys: Sequence[Tuple[int, ...]], config: SimulationConfig,
                pool: Optional[ThreadPoolExecutor] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Consensus values and convergence flags for one initial vector per key."""
    values = np.empty(len(keys))
    converged = np.empty(len(keys), dtype=bool)

    def run(start: int) -> None:
        stop = min(start + TRIALS_PER_BATCH, len(keys))
        rngs = [trial_rng(config.seed, *key) for key in keys[start:stop]]
        batch = _simulate_batch(sampler, X0[start:stop], rngs, config.max_events, config.tolerance, config.block_size)
        values[start:stop] = batch.X.mean(axis=1)
        converged[start:stop] = batch.converged

    starts = range(0, len(keys), TRIALS_PER_BATCH)
    if pool is None:
        for start in starts:
            run(start)
    else:
        list(pool.map(run, starts))
    return values, converged


def sample_consensus(network: SocialNetwork, x0: Sequence[float], config: Optional[SimulationConfig] = None) -> np.ndarray:
    """Consensus values of config.trials independent runs from x0 (streams (1, t))."""
    config = config or SimulationConfig()
    x = as_vector(x0, network.n)
    keys = [(RUNS_STREAM, t) for t in range(config.trials)]
    X0 = np.tile(x, (config.trials, 1))
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        values, _ = _run_trials(MeetingSampler(network), X0, keys, config, pool if config.workers > 1 else None)
    return values


@dataclass(frozen=True, eq=False)
class ConsensusEstimate:
    """
    Estimated consensus weights: pi_hat[h] is the mean consensus from
    x(0) = e_h, with standard errors from the sample variance.
    """

    pi_hat: np.ndarray
    se: np.ndarray
    trials: int
    unconverged: int = 0

    def to_dict(self) -> Dict:
        return {
            "pi_hat": self.pi_hat.tolist(),
            "se": self.se.tolist(),
            "trials": self.trials,
            "unconverged": self.unconverged,
        }


def estimate_consensus_weights(network: SocialNetwork, config: Optional[SimulationConfig] = None,
                               verbose: bool = False) -> ConsensusEstimate:
    """
    Estimate the consensus distribution by simulation.

    For every agent h, config.trials runs start from e_h; their mean
    consensus value estimates pi_bar_h. Agents are processed on a thread
    pool of config.workers; every (h, t) has its own stream so the estimate
    does not depend on scheduling.

    Raises:
        ValueError: If fewer than 2 trials are requested
    """
    config = config or SimulationConfig()
    if config.trials < 2:
        raise ValueError(f"trials must be >= 2 to estimate standard errors, got {config.trials}")
    n = network.n
    sampler = MeetingSampler(network)
    means = np.empty(n)
    ses = np.empty(n)
    unconverged = np.zeros(n, dtype=np.int64)

    if verbose:
        print("=" * 60, file=sys.stderr)
        print(f"Estimating consensus weights: n={n}, trials={config.trials}, seed={config.seed}", file=sys.stderr)
        print("=" * 60, file=sys.stderr)

    def agent(h: int) -> None:
        X0 = np.zeros((config.trials, n))
        X0[:, h] = 1.0
        keys = [(WEIGHTS_STREAM, h, t) for t in range(config.trials)]
        values, converged = _run_trials(sampler, X0, keys, config)
        means[h] = values.mean()
        ses[h] = values.std(ddof=1) / np.sqrt(config.trials)
        unconverged[h] = int((~converged).sum())
        if verbose:
            print(f"[{h + 1}/{n}] agent {h}: {means[h]:.4f} ± {ses[h]:.4f}", file=sys.stderr)

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        list(pool.map(agent, range(n)))

    if verbose:
        marker = "✓" if not unconverged.any() else "❌"
        print(f"{marker} {int(unconverged.sum())} run(s) hit max_events", file=sys.stderr)
    return ConsensusEstimate(pi_hat=means, se=ses, trials=config.trials, unconverged=int(unconverged.sum()))


@dataclass(frozen=True)
class DecayProfile:
    """
    Mean spread at window boundaries over config.trials paths.

    ratios[k] = mean_spread[k + 1] / mean_spread[k] (None once the mean is
    zero); monotone is True when no path ever increased its spread.
    """

    window: int
    mean_spread: List[float]
    ratios: List[Optional[float]]
    monotone: bool
    trials: int
    guarantee: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return asdict(self)


def spread_decay_profile(network: SocialNetwork, x0: Sequence[float], config: Optional[SimulationConfig] = None,
                         windows: int = 10, window: Optional[int] = None) -> DecayProfile:
    """
    Spread decay over `windows` windows of `window` slots (default n^2).

    Runs do not stop at the tolerance so every path covers the same slots.
    """
    config = config or SimulationConfig()
    x = as_vector(x0, network.n)
    window = window or network.n * network.n
    if windows < 1 or window < 1:
        raise ValueError(f"windows and window must be >= 1, got {windows}, {window}")
    keys = [(DECAY_STREAM, t) for t in range(config.trials)]
    rngs = [trial_rng(config.seed, *key) for key in keys]
    batch = _simulate_batch(MeetingSampler(network), np.tile(x, (config.trials, 1)), rngs, windows * window,
                            None, config.block_size, record_every=window)
    mean_spread = [float(r.mean()) for r in batch.records]
    ratios = [
        (mean_spread[k + 1] / mean_spread[k]) if mean_spread[k] > 0 else None
        for k in range(len(mean_spread) - 1)
    ]
    return DecayProfile(
        window=window,
        mean_spread=mean_spread,
        ratios=ratios,
        monotone=batch.monotone,
        trials=config.trials,
        guarantee=convergence_window_constants(network).to_dict(),
    )


@dataclass(frozen=True, eq=False)
class FrequencyCheck:
    """Empirical vs expected probability of every (initiator, partner, outcome) cell."""

    empirical: np.ndarray  # (n, n, 3)
    expected: np.ndarray
    se: np.ndarray
    draws: int

    @property
    def max_z(self) -> float:
        mask = self.se > 0
        if not mask.any():
            return 0.0
        return float(np.max(np.abs(self.empirical - self.expected)[mask] / self.se[mask]))


def _event_counts(network: SocialNetwork, draws: int, seed: int) -> np.ndarray:
    sampler = MeetingSampler(network)
    i, j, outcome = sample_events(sampler, trial_rng(seed, FREQUENCY_STREAM).random((draws, 3)))
    counts = np.zeros((network.n, network.n, 3))
    np.add.at(counts, (i, j, outcome), 1.0)
    return counts


def event_frequencies(network: SocialNetwork, draws: int, seed: int = 0) -> FrequencyCheck:
    """Compare sampled event frequencies with p_ij * (beta, alpha, gamma)_ij / n."""
    counts = _event_counts(network, draws, seed)
    P = network.meeting * network.support
    expected = np.stack([P * network.beta, P * network.alpha, P * network.gamma], axis=-1) / network.n
    se = np.sqrt(expected * (1.0 - expected) / draws)
    return FrequencyCheck(empirical=counts / draws, expected=expected, se=se, draws=draws)


def sample_mean_update(network: SocialNetwork, draws: int, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Average of the realized update matrices W(k) over `draws` events.

    Returns:
        (mean, se): entrywise sample mean and its standard error
    """
    n = network.n
    counts = _event_counts(network, draws, seed)
    first = np.zeros((n, n))
    second = np.zeros((n, n))
    identity = np.eye(n)
    for i, j, outcome in zip(*np.nonzero(counts)):
        if outcome == AVERAGE:
            M = averaging_matrix(int(i), int(j), n).matrix
        elif outcome == INFLUENCE:
            M = influence_update_matrix(int(i), int(j), n, network.epsilon).matrix
        else:
            M = identity
        c = counts[i, j, outcome]
        first += c * M
        second += c * M * M
    mean = first / draws
    variance = np.maximum(second / draws - mean * mean, 0.0)
    return mean, np.sqrt(variance / draws)

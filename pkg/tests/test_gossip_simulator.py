import numpy as np
import pytest

from src.generators import complete, example2, ring
from src.gossip_simulator import (
    AVERAGE,
    DISAGREE,
    INFLUENCE,
    BeliefState,
    MeetingEvent,
    MeetingSampler,
    SimulationConfig,
    apply_event,
    estimate_consensus_weights,
    event_frequencies,
    run_to_consensus,
    sample_consensus,
    sample_events,
    sample_mean_update,
    spread_decay_profile,
    step,
    trial_rng,
)
from src.interaction_kernel import mean_interaction_matrix
from src.markov_analysis import stationary


def test_average_event():
    x = apply_event(np.array([0.0, 1.0, 4.0]), MeetingEvent(0, 0, 1, AVERAGE), 0.5)
    np.testing.assert_array_equal(x, [0.5, 0.5, 4.0])


def test_influence_event_moves_only_initiator():
    x = apply_event(np.array([0.0, 1.0, 4.0]), MeetingEvent(0, 2, 0, INFLUENCE), 0.25)
    np.testing.assert_array_equal(x, [0.0, 1.0, 1.0])


def test_disagree_event_changes_nothing():
    x0 = np.array([0.0, 1.0])
    np.testing.assert_array_equal(apply_event(x0, MeetingEvent(0, 0, 1, DISAGREE), 0.5), x0)


def test_influence_stays_between_beliefs():
    rng = np.random.default_rng(3)
    for _ in range(200):
        x = rng.normal(size=2) * 10.0 ** rng.integers(-8, 8)
        eps = float(rng.uniform(1e-6, 0.5))
        updated = apply_event(x, MeetingEvent(0, 0, 1, INFLUENCE), eps)
        assert min(x) <= updated[0] <= max(x)


def test_sample_events_mapping(forceful_dyad):
    sampler = MeetingSampler(forceful_dyad)
    i, j, outcome = sample_events(sampler, np.array([[0.1, 0.5, 0.3], [0.9, 0.2, 0.99]]))
    assert i.tolist() == [0, 1]
    assert j.tolist() == [1, 0]
    assert outcome.tolist() == [INFLUENCE, AVERAGE]


def test_sampler_never_picks_non_neighbour():
    network = ring(7)
    sampler = MeetingSampler(network)
    i, j, _ = sample_events(sampler, trial_rng(0, 9).random((20000, 3)))
    assert np.all(network.meeting[i, j] > 0)


def test_step_is_reproducible(example2a):
    state = BeliefState(x=np.arange(6, dtype=float))
    first = step(state, example2a, trial_rng(4, 1, 0))
    second = step(state, example2a, trial_rng(4, 1, 0))
    assert first[1] == second[1]
    np.testing.assert_array_equal(first[0].x, second[0].x)
    assert first[0].events == 1


def test_streams_are_independent():
    assert trial_rng(0, 1, 0).random() != trial_rng(0, 1, 1).random()
    assert trial_rng(0, 1, 0).random() != trial_rng(1, 1, 0).random()


def test_averaging_conserves_sum():
    network = complete(5)
    rng = trial_rng(0, 1, 0)
    sampler = MeetingSampler(network)
    state = BeliefState(x=np.array([3.0, -1.0, 0.5, 2.0, 7.0]))
    total = state.x.sum()
    for _ in range(500):
        state, _ = step(state, network, rng, sampler)
        assert abs(state.x.sum() - total) <= 1e-12


def test_run_converges_to_average_without_forceful():
    x0 = [1.0, 0.0, 0.0, 2.0]
    run = run_to_consensus(complete(4), x0, SimulationConfig(seed=1))
    assert run.converged
    assert run.value == pytest.approx(0.75, abs=1e-12)
    assert run.trace[0] == pytest.approx(2.0)
    assert run.trace[-1] <= 1e-10


def test_run_is_reproducible(example2a):
    config = SimulationConfig(seed=7)
    first = run_to_consensus(example2a, [1.0, 0, 0, 0, 0, 0], config)
    second = run_to_consensus(example2a, [1.0, 0, 0, 0, 0, 0], config)
    assert first.value == second.value
    assert first.events == second.events


def test_run_stops_at_max_events():
    run = run_to_consensus(ring(5), [1.0, 0, 0, 0, 0], SimulationConfig(max_events=3))
    assert run.status == "max_events"
    assert run.events == 3
    assert not run.converged


def test_trace_decimation(example2a):
    run = run_to_consensus(example2a, [1.0, 0, 0, 0, 0, 0], SimulationConfig(decimation=10))
    expected = run.events // 10 + 1 + (1 if run.events % 10 else 0)
    assert len(run.trace) == expected
    assert run.trace[-1] == pytest.approx(float(run.x.max() - run.x.min()))


def test_results_do_not_depend_on_batching_or_threads(forceful_dyad):
    x0 = [1.0, 0.0]
    base = sample_consensus(forceful_dyad, x0, SimulationConfig(trials=600))
    np.testing.assert_array_equal(sample_consensus(forceful_dyad, x0, SimulationConfig(trials=5)), base[:5])
    np.testing.assert_array_equal(sample_consensus(forceful_dyad, x0, SimulationConfig(trials=600, workers=3)), base)
    np.testing.assert_array_equal(sample_consensus(forceful_dyad, x0, SimulationConfig(trials=600, block_size=7)), base)


def test_spread_never_increases(example2a):
    x0 = np.random.default_rng(2).uniform(-1, 1, size=6)
    profile = spread_decay_profile(example2a, x0, SimulationConfig(trials=100), windows=5)
    assert profile.monotone
    assert profile.window == 36
    assert len(profile.mean_spread) == 6
    assert all(b <= a for a, b in zip(profile.mean_spread, profile.mean_spread[1:]))
    assert profile.guarantee["window"] == 36 * 3


def test_event_frequencies(example2a):
    check = event_frequencies(example2a, draws=200_000, seed=0)
    assert check.max_z < 5.0
    assert check.empirical.sum() == pytest.approx(1.0)


def test_sample_mean_update(example2a):
    mean, se = sample_mean_update(example2a, draws=100_000, seed=1)
    W = mean_interaction_matrix(example2a)
    assert np.all(np.abs(mean - W) <= 5.0 * se + 1e-12)


def test_config_validation():
    with pytest.raises(ValueError, match="seed"):
        SimulationConfig(seed=-1)
    with pytest.raises(ValueError, match="tolerance"):
        SimulationConfig(tolerance=0.0)
    with pytest.raises(ValueError, match="trials"):
        SimulationConfig(trials=0)
    config = SimulationConfig.from_dict({"seed": 3, "trials": 20, "unknown": True})
    assert config.seed == 3
    assert config.to_dict()["trials"] == 20


def test_estimate_needs_two_trials(forceful_dyad):
    with pytest.raises(ValueError, match="trials"):
        estimate_consensus_weights(forceful_dyad, SimulationConfig(trials=1))


def test_estimate_reports_progress(forceful_dyad, capsys):
    estimate = estimate_consensus_weights(forceful_dyad, SimulationConfig(trials=50), verbose=True)
    assert estimate.unconverged == 0
    err = capsys.readouterr().err
    assert "[2/2]" in err


@pytest.mark.slow
@pytest.mark.parametrize("network", [complete(2, forceful=[(0, 1, 1.0)]), example2("a")], ids=["dyad", "example2a"])
def test_consensus_weights_match_analytic(network):
    estimate = estimate_consensus_weights(network, SimulationConfig(seed=0, trials=10_000))
    pi_bar = stationary(mean_interaction_matrix(network)).pi
    assert estimate.unconverged == 0
    tolerance = np.maximum(3.0 * estimate.se, 0.02)
    assert np.all(np.abs(estimate.pi_hat - pi_bar) <= tolerance)

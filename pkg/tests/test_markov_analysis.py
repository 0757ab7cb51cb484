import numpy as np
import pytest

from src.generators import complete, path, ring
from src.interaction_kernel import decompose, social_matrix
from src.markov_analysis import (
    DisconnectedGraph,
    NotPrimitive,
    NotSymmetric,
    analyze_chain,
    commute_time_electrical,
    dirichlet_form,
    effective_resistance,
    fundamental_matrix,
    fundamental_series,
    harmonic_potential,
    is_primitive,
    kemeny_constant,
    mean_first_passage,
    mfpt_matrix_absorbing,
    perturbed_stationary,
    second_eigenvalue,
    stationary,
    stationary_power,
)


def test_stationary_two_state():
    dist = stationary(np.array([[0.5, 0.5], [0.25, 0.75]]))
    np.testing.assert_allclose(dist.pi, [1 / 3, 2 / 3], atol=1e-14)
    assert dist.residual < 1e-14


def test_stationary_of_doubly_stochastic_is_uniform(example2a):
    T = social_matrix(example2a)
    np.testing.assert_allclose(stationary(T).pi, np.full(6, 1 / 6), atol=1e-14)


def test_periodic_chain_rejected():
    Z = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert not is_primitive(Z)
    with pytest.raises(NotPrimitive):
        stationary(Z)


def test_power_iteration_oracle(random_networks):
    for network in random_networks[:20]:
        W = decompose(network).W
        np.testing.assert_allclose(stationary(W).pi, stationary_power(W).pi, atol=1e-10)


def test_fundamental_matrix_matches_series():
    T = social_matrix(ring(3))
    pi = stationary(T).pi
    np.testing.assert_allclose(fundamental_matrix(T, pi).Y, fundamental_series(T, pi), atol=1e-8)


def test_fundamental_rows_sum_to_zero(example2a):
    W = decompose(example2a).W
    pi = stationary(W).pi
    Y = fundamental_matrix(W, pi).Y
    np.testing.assert_allclose(Y.sum(axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(pi @ Y, 0.0, atol=1e-12)


def test_passage_times_match_absorbing_chain(random_networks, example2a):
    for network in random_networks[:20] + [example2a]:
        T = social_matrix(network)
        chain = analyze_chain(T)
        np.testing.assert_allclose(chain.passage.M, mfpt_matrix_absorbing(T), rtol=1e-8, atol=1e-8)


def test_passage_times_conventions():
    Z = np.array([[0.5, 0.5], [0.25, 0.75]])
    pi = stationary(Z).pi
    passage = mean_first_passage(fundamental_matrix(Z, pi).Y, pi)
    assert passage.M[0, 0] == 0.0
    assert passage.M[0, 1] == pytest.approx(2.0)
    assert passage.M[1, 0] == pytest.approx(4.0)
    np.testing.assert_allclose(passage.return_times, [3.0, 1.5])


def test_kemeny_constant(example2a):
    chain = analyze_chain(social_matrix(example2a))
    K = kemeny_constant(chain.fundamental.Y)
    np.testing.assert_allclose(chain.passage.M @ chain.stationary.pi, K, rtol=1e-10)


def test_second_eigenvalue_complete_graph():
    spectral = second_eigenvalue(social_matrix(complete(4)))
    assert spectral.eigenvalues[0] == pytest.approx(1.0)
    assert spectral.lambda2 == pytest.approx(2 / 3)
    assert spectral.gap == pytest.approx(1 / 3)


def test_second_eigenvalue_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        second_eigenvalue(np.array([[0.5, 0.5], [0.25, 0.75]]))


def test_perturbation_identity(random_networks):
    for network in random_networks:
        parts = decompose(network)
        direct = stationary(parts.W).pi
        np.testing.assert_allclose(perturbed_stationary(parts.T, parts.D).pi, direct, atol=1e-10)


def test_commute_time_matches_effective_resistance(random_networks):
    for network in random_networks[:20]:
        T = social_matrix(network)
        passage = analyze_chain(T).passage
        for a, b in [(0, 1), (0, network.n - 1)]:
            expected = network.n * effective_resistance(T, a, b)
            assert passage.commute(a, b) == pytest.approx(expected, rel=1e-8)
            assert commute_time_electrical(T, a, b) == pytest.approx(expected, rel=1e-12)


def test_commute_time_dyad():
    assert commute_time_electrical(np.array([[0.5, 0.5], [0.5, 0.5]]), 0, 1) == pytest.approx(4.0)


def test_harmonic_potential_on_path():
    W = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
    np.testing.assert_allclose(harmonic_potential(W, 0, 2), [0.0, 0.5, 1.0])


def test_dirichlet_principle(example2a):
    W = social_matrix(example2a)
    a, b = 0, 5
    commute = commute_time_electrical(W, a, b)
    g = harmonic_potential(W, a, b)
    assert 1.0 / dirichlet_form(W, g) == pytest.approx(commute, rel=1e-10)
    rng = np.random.default_rng(7)
    for _ in range(50):
        trial = rng.uniform(size=6)
        trial[a], trial[b] = 0.0, 1.0
        assert 1.0 / dirichlet_form(W, trial) <= commute * (1.0 + 1e-12)


def test_monotonicity_law(example2a):
    T = np.array(social_matrix(example2a))
    before = commute_time_electrical(T, 0, 5)
    weaker = T.copy()
    cut = weaker[0, 1] / 2
    weaker[0, 1] -= cut
    weaker[1, 0] -= cut
    weaker[0, 0] += cut
    weaker[1, 1] += cut
    assert commute_time_electrical(weaker, 0, 5) >= before


def test_disconnected_weights_rejected():
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 0] = W[2, 3] = W[3, 2] = 1.0
    with pytest.raises(DisconnectedGraph):
        effective_resistance(W, 0, 3)


def test_same_endpoint_rejected():
    with pytest.raises(ValueError):
        effective_resistance(social_matrix(path(3)), 1, 1)

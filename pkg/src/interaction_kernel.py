"""
Single-meeting update matrices and the mean interaction matrix.

A meeting of initiator i with partner j applies one of three row-stochastic
matrices to the belief vector:
- A_ij = I - (e_i - e_j)(e_i - e_j)'/2  (both move to the midpoint)
- J_ij = I - (1 - eps) e_i (e_i - e_j)'  (i moves toward j, j unchanged)
- I                                      (disagreement)

Its expectation W = (1/n) sum_ij p_ij [beta A + alpha J + gamma I] splits
into the symmetric doubly stochastic social matrix T and the zero-row-sum
influence matrix D = W - T. Closed-form entries are used throughout; the
event sum is kept as an oracle.

Used by: markov_analysis callers, influence_analysis, gossip_simulator tests
Related: src/models.py (SocialNetwork)
"""

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from src.models import AnalysisError, MeetingDigraph, SocialNetwork
from src.network_model import meeting_digraph


class IndexOutOfRange(AnalysisError):
    """Raised when a meeting pair is not two distinct agents in [0, n)."""
    pass


class BadEpsilon(AnalysisError):
    """Raised when the self-weight is outside (0, 1/2]."""
    pass


class DegenerateDelta(AnalysisError):
    """Raised when n * chi^d > 1 so the contraction constant delta is undefined."""

    def __init__(self, eta: float, chi: float, diameter: int, value: float):
        self.eta = eta
        self.chi = chi
        self.diameter = diameter
        self.value = value
        super().__init__(f"n * chi^d = {value!r} exceeds 1; delta bound is vacuous")


@dataclass(frozen=True, eq=False)
class UpdateMatrix:
    """Dense realization of one meeting outcome."""

    kind: str  # "average" | "influence" | "identity"
    i: Optional[int]
    j: Optional[int]
    matrix: np.ndarray


def _check_pair(i: int, j: int, n: int) -> None:
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise IndexOutOfRange(f"pair ({i}, {j}) must be distinct agents in [0, {n})")


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon <= 0.5:
        raise BadEpsilon(f"epsilon must be in (0, 1/2], got {epsilon}")


def averaging_matrix(i: int, j: int, n: int) -> UpdateMatrix:
    """A_ij: rows i and j become the 50/50 mix of e_i and e_j."""
    _check_pair(i, j, n)
    M = np.eye(n)
    M[[i, i, j, j], [i, j, i, j]] = 0.5
    return UpdateMatrix("average", i, j, M)


def influence_update_matrix(i: int, j: int, n: int, epsilon: float) -> UpdateMatrix:
    """J_ij: row i becomes eps e_i + (1 - eps) e_j; every other row is the identity."""
    _check_pair(i, j, n)
    _check_epsilon(epsilon)
    M = np.eye(n)
    M[i, i] = epsilon
    M[i, j] = 1.0 - epsilon
    return UpdateMatrix("influence", i, j, M)


def identity_update(n: int) -> UpdateMatrix:
    return UpdateMatrix("identity", None, None, np.eye(n))


def mean_interaction_matrix(network: SocialNetwork) -> np.ndarray:
    """
    Closed-form mean interaction matrix W.

    Off the diagonal
        W_ij = (1/n)[p_ij (beta_ij/2 + alpha_ij (1 - eps)) + p_ji beta_ji/2]
    and the diagonal completes each row to 1, which equals the closed-form
    diagonal whenever meeting rows sum to 1.
    """
    n, eps = network.n, network.epsilon
    P = network.meeting
    W = (P * (network.beta / 2.0 + network.alpha * (1.0 - eps)) + (P * network.beta).T / 2.0) / n
    np.fill_diagonal(W, 0.0)
    np.fill_diagonal(W, 1.0 - W.sum(axis=1))
    return W


def mean_interaction_by_events(network: SocialNetwork) -> np.ndarray:
    """Event-sum definition of W; O(n^2) dense matrices, test oracle only."""
    n = network.n
    W = np.zeros((n, n))
    for i, j in network.edges():
        if i == j:
            continue
        p = network.meeting[i, j]
        W += p * network.beta[i, j] * averaging_matrix(i, j, n).matrix
        if network.alpha[i, j] > 0:
            W += p * network.alpha[i, j] * influence_update_matrix(i, j, n, network.epsilon).matrix
        W += p * network.gamma[i, j] * np.eye(n)
    return W / n


def social_matrix(network: SocialNetwork) -> np.ndarray:
    """T_ij = (1/n)[p_ij (1 - gamma_ij)/2 + p_ji (1 - gamma_ji)/2], diagonal completing rows."""
    exchange = network.meeting * (1.0 - network.gamma) * network.support
    T = (exchange + exchange.T) / (2.0 * network.n)
    np.fill_diagonal(T, 0.0)
    np.fill_diagonal(T, 1.0 - T.sum(axis=1))
    return T


@dataclass(frozen=True, eq=False)
class InteractionDecomposition:
    """W = T + D with T symmetric doubly stochastic and D zero-row-sum."""

    W: np.ndarray
    T: np.ndarray
    D: np.ndarray

    def to_dict(self) -> Dict:
        return {"W": self.W.tolist(), "T": self.T.tolist(), "D": self.D.tolist()}


def decompose(network: SocialNetwork) -> InteractionDecomposition:
    W = mean_interaction_matrix(network)
    T = social_matrix(network)
    return InteractionDecomposition(W=W, T=T, D=W - T)


@dataclass(frozen=True)
class EtaConstants:
    """
    Positivity constants of the mean interaction matrix.

    eta: smallest diagonal or link entry of W
    chi: smallest link entry of T
    delta: (1 - n chi^d)^(1/d); one_minus_delta is kept separately since
        delta rounds to 1 for long diameters
    """

    eta: float
    chi: float
    diameter: int
    delta: float
    one_minus_delta: float

    def to_dict(self) -> Dict:
        return {
            "eta": self.eta,
            "chi": self.chi,
            "diameter": self.diameter,
            "delta": self.delta,
            "one_minus_delta": self.one_minus_delta,
        }


def _eta_chi(network: SocialNetwork, decomposition: InteractionDecomposition):
    links = network.support & ~np.eye(network.n, dtype=bool)
    eta = float(min(np.diag(decomposition.W).min(), decomposition.W[links].min()))
    chi = float(decomposition.T[links].min())
    return eta, chi


def eta_constants(network: SocialNetwork, digraph: Optional[MeetingDigraph] = None,
                  decomposition: Optional[InteractionDecomposition] = None) -> EtaConstants:
    """
    Compute eta, chi and delta for a valid network.

    Raises:
        DegenerateDelta: If n chi^d > 1
    """
    digraph = digraph or meeting_digraph(network)
    eta, chi = _eta_chi(network, decomposition or decompose(network))
    d = digraph.diameter
    value = network.n * chi ** d
    if value > 1.0 + 1e-12:
        raise DegenerateDelta(eta, chi, d, value)
    if value >= 1.0:
        one_minus_delta = 1.0
    else:
        one_minus_delta = float(-np.expm1(np.log1p(-value) / d))
    return EtaConstants(eta=eta, chi=chi, diameter=d, delta=1.0 - one_minus_delta, one_minus_delta=one_minus_delta)


@dataclass(frozen=True)
class WindowConstants:
    """
    Pathwise spread contraction guarantee over windows of n^2 d meetings.

    With probability at least (eta^d/2)^(n^2) a window contracts the spread
    by the factor 1 - n eta^d eps^(n^2 - 1)/2. Both numbers underflow for
    moderate n, so their logarithms are reported too.
    """

    window: int
    contraction: float
    probability: float
    log_shrink: float
    log_probability: float

    def to_dict(self) -> Dict:
        return {
            "window": self.window,
            "contraction": self.contraction,
            "probability": self.probability,
            "log_shrink": self.log_shrink,
            "log_probability": self.log_probability,
        }


def convergence_window_constants(network: SocialNetwork, constants: Optional[EtaConstants] = None) -> WindowConstants:
    digraph = meeting_digraph(network)
    eta = constants.eta if constants is not None else _eta_chi(network, decompose(network))[0]
    n, d, eps = network.n, digraph.diameter, network.epsilon
    log_shrink = np.log(n / 2.0) + d * np.log(eta) + (n * n - 1) * np.log(eps)
    log_probability = n * n * (d * np.log(eta) - np.log(2.0))
    return WindowConstants(
        window=n * n * d,
        contraction=float(1.0 - np.exp(log_shrink)),
        probability=float(np.exp(log_probability)),
        log_shrink=float(log_shrink),
        log_probability=float(log_probability),
    )

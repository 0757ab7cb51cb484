"""
Markov chain machinery for consensus analysis.

Provides the stationary distribution of a row-stochastic matrix, the
fundamental matrix Y = (I - Z + e pi')^-1 - e pi', mean first passage
times, the spectrum of the symmetric social matrix, the exact perturbation
identity for pi of T + D, and commute times through effective resistance.

Every routine has an independent oracle kept next to it:
- stationary (direct solve)      <-> stationary_power (power iteration)
- fundamental_matrix             <-> fundamental_series (truncated sum)
- mean_first_passage             <-> mfpt_absorbing (absorbing-chain solve)
- commute_time_electrical        <-> M[a, b] + M[b, a]

Conventions:
- m_ii = 0 (first passage counts time t >= 0); return times are 1/pi_i
- weight matrices for the electrical routines may carry self-loops;
  self-loops add to the total weight w but never carry current

Used by: influence_analysis, cuts_clustering, analysis_report, experiments
"""

from dataclasses import dataclass
from typing import Dict, Optional

import networkx as nx
import numpy as np
from scipy import linalg

from src.models import AnalysisError

SYMMETRY_TOLERANCE = 1e-12


class NotPrimitive(AnalysisError):
    """Raised when no power of the chain (up to n^2) is entrywise positive."""
    pass


class NoConvergence(AnalysisError):
    """Raised when an iterative oracle exhausts its iteration budget."""
    pass


class SingularSystem(AnalysisError):
    """Raised when a linear system that should be regular is singular."""
    pass


class NotSymmetric(AnalysisError):
    """Raised when a spectral routine receives a non-symmetric matrix."""
    pass


class SingularIminusDY(AnalysisError):
    """Raised when I - DY cannot be inverted (perturbed chain not regular)."""
    pass


class DisconnectedGraph(AnalysisError):
    """Raised when effective resistance is requested on a disconnected graph."""
    pass


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """Left fixed point pi of a chain Z with residual max |pi'Z - pi'|."""

    pi: np.ndarray
    residual: float
    method: str = "direct"

    def to_dict(self) -> Dict:
        return {"pi": self.pi.tolist(), "residual": self.residual, "method": self.method}


@dataclass(frozen=True, eq=False)
class FundamentalMatrix:
    Y: np.ndarray
    Z: np.ndarray
    pi: np.ndarray


@dataclass(frozen=True, eq=False)
class PassageTimes:
    """Mean first passage times M (zero diagonal) and mean return times."""

    M: np.ndarray
    return_times: np.ndarray

    def commute(self, a: int, b: int) -> float:
        return float(self.M[a, b] + self.M[b, a])


@dataclass(frozen=True, eq=False)
class SpectralInfo:
    eigenvalues: np.ndarray  # descending
    lambda2: float
    gap: float

    def to_dict(self) -> Dict:
        return {"eigenvalues": self.eigenvalues.tolist(), "lambda2": self.lambda2, "gap": self.gap}


@dataclass(frozen=True, eq=False)
class ChainAnalysis:
    """Everything derived from one chain: pi, Y, passage times, spectrum."""

    stationary: StationaryDistribution
    fundamental: FundamentalMatrix
    passage: PassageTimes
    spectral: Optional[SpectralInfo]


def _residual(Z: np.ndarray, pi: np.ndarray) -> float:
    return float(np.max(np.abs(pi @ Z - pi)))


def is_primitive(Z: np.ndarray) -> bool:
    """
    Check primitivity by repeated boolean squaring.

    Once B^k > 0 every higher power stays positive, so squaring until the
    exponent reaches n^2 decides primitivity for any irreducible or
    reducible pattern.
    """
    n = Z.shape[0]
    B = (Z > 0).astype(float)
    exponent = 1
    while True:
        if np.all(B > 0):
            return True
        if exponent >= n * n:
            return False
        B = ((B @ B) > 0).astype(float)
        exponent *= 2


def stationary(Z: np.ndarray, check_primitive: bool = True) -> StationaryDistribution:
    """
    Stationary distribution by a direct linear solve.

    Solves (Z' - I) pi = 0 with the last equation replaced by sum(pi) = 1.

    Args:
        Z: Row-stochastic primitive matrix
        check_primitive: Verify primitivity first (O(n^3 log n))

    Returns:
        StationaryDistribution with the solve residual

    Raises:
        NotPrimitive: If Z is not primitive
        SingularSystem: If the normalized system cannot be solved

    Example:
        >>> stationary(np.array([[.5, .5], [.25, .75]])).pi
        array([0.33333333, 0.66666667])
    """
    Z = np.asarray(Z, dtype=float)
    if check_primitive and not is_primitive(Z):
        raise NotPrimitive("chain is not primitive: no power up to n^2 is positive")
    n = Z.shape[0]
    A = Z.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = linalg.solve(A, b)
    except linalg.LinAlgError as e:
        raise SingularSystem(f"stationary system is singular: {e}")
    pi = pi / pi.sum()
    return StationaryDistribution(pi=pi, residual=_residual(Z, pi), method="direct")


def stationary_power(Z: np.ndarray, tol: float = 1e-14, max_iter: int = 1_000_000) -> StationaryDistribution:
    """Power-iteration oracle for the stationary distribution."""
    Z = np.asarray(Z, dtype=float)
    n = Z.shape[0]
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = pi @ Z
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) <= tol:
            return StationaryDistribution(pi=nxt, residual=_residual(Z, nxt), method="power")
        pi = nxt
    raise NoConvergence(f"power iteration did not reach {tol} in {max_iter} iterations")


def fundamental_matrix(Z: np.ndarray, pi: np.ndarray) -> FundamentalMatrix:
    """
    Y = (I - Z + e pi')^-1 - e pi'.

    Raises:
        SingularSystem: If I - Z + e pi' is singular (chain not regular)
    """
    n = Z.shape[0]
    limit = np.outer(np.ones(n), pi)
    try:
        Y = linalg.inv(np.eye(n) - Z + limit) - limit
    except linalg.LinAlgError as e:
        raise SingularSystem(f"I - Z + e pi' is singular: {e}")
    return FundamentalMatrix(Y=Y, Z=np.asarray(Z, dtype=float), pi=np.asarray(pi, dtype=float))


def fundamental_series(Z: np.ndarray, pi: np.ndarray, tol: float = 1e-9, max_terms: int = 1_000_000) -> np.ndarray:
    """Truncated series sum_{k<=K} (Z^k - e pi') with ||Z^K - e pi'||_inf <= tol."""
    n = Z.shape[0]
    limit = np.outer(np.ones(n), pi)
    power = np.eye(n)
    total = np.zeros((n, n))
    for _ in range(max_terms):
        term = power - limit
        total += term
        if np.max(np.abs(term).sum(axis=1)) <= tol:
            return total
        power = power @ Z
    raise NoConvergence(f"fundamental series did not reach {tol} in {max_terms} terms")


def mean_first_passage(Y: np.ndarray, pi: np.ndarray) -> PassageTimes:
    """m_ij = (Y_jj - Y_ij)/pi_j with m_ii = 0; return times 1/pi_i."""
    M = (np.diag(Y)[None, :] - Y) / pi[None, :]
    np.fill_diagonal(M, 0.0)
    return PassageTimes(M=M, return_times=1.0 / pi)


def mfpt_absorbing(Z: np.ndarray, target: int) -> np.ndarray:
    """
    Mean first passage times to `target` from every state.

    Makes the target absorbing and solves (I - Z) m = 1 off the target.
    """
    n = Z.shape[0]
    A = np.eye(n) - Z
    A[target, :] = 0.0
    A[target, target] = 1.0
    b = np.ones(n)
    b[target] = 0.0
    return linalg.solve(A, b)


def mfpt_matrix_absorbing(Z: np.ndarray) -> np.ndarray:
    return np.column_stack([mfpt_absorbing(Z, target) for target in range(Z.shape[0])])


def kemeny_constant(Y: np.ndarray) -> float:
    """trace(Y), equal to sum_j pi_j m_ij for every starting state i."""
    return float(np.trace(Y))


def second_eigenvalue(T: np.ndarray) -> SpectralInfo:
    """
    Full spectrum of a symmetric matrix, sorted descending.

    Raises:
        NotSymmetric: If max |T - T'| exceeds 1e-12
    """
    T = np.asarray(T, dtype=float)
    asymmetry = float(np.max(np.abs(T - T.T)))
    if asymmetry > SYMMETRY_TOLERANCE:
        raise NotSymmetric(f"matrix is not symmetric (max |T - T'| = {asymmetry!r})")
    eigenvalues = linalg.eigh((T + T.T) / 2.0, eigvals_only=True)[::-1]
    lambda2 = float(eigenvalues[1])
    return SpectralInfo(eigenvalues=eigenvalues, lambda2=lambda2, gap=1.0 - lambda2)


def analyze_chain(Z: np.ndarray, symmetric: bool = True) -> ChainAnalysis:
    """Stationary distribution, fundamental matrix, passage times and (if symmetric) spectrum."""
    dist = stationary(Z)
    fundamental = fundamental_matrix(Z, dist.pi)
    return ChainAnalysis(
        stationary=dist,
        fundamental=fundamental,
        passage=mean_first_passage(fundamental.Y, dist.pi),
        spectral=second_eigenvalue(Z) if symmetric else None,
    )


def perturbed_stationary(T: np.ndarray, D: np.ndarray, pi: Optional[np.ndarray] = None,
                         Y: Optional[np.ndarray] = None) -> StationaryDistribution:
    """
    Stationary distribution of T + D through the perturbation identity.

    pi_bar' = pi' + pi' D Y (I - D Y)^-1, where pi and Y belong to T.

    Raises:
        SingularIminusDY: If I - DY is singular
    """
    T = np.asarray(T, dtype=float)
    n = T.shape[0]
    if pi is None:
        pi = stationary(T).pi
    if Y is None:
        Y = fundamental_matrix(T, pi).Y
    DY = D @ Y
    rhs = pi @ DY
    try:
        shift = linalg.solve((np.eye(n) - DY).T, rhs)
    except linalg.LinAlgError as e:
        raise SingularIminusDY(f"I - DY is singular: {e}")
    pi_bar = pi + shift
    pi_bar = pi_bar / pi_bar.sum()
    return StationaryDistribution(pi=pi_bar, residual=_residual(T + D, pi_bar), method="perturbation")


def _offdiagonal(W: np.ndarray) -> np.ndarray:
    off = np.array(W, dtype=float)
    np.fill_diagonal(off, 0.0)
    return off


def _require_connected(off: np.ndarray) -> None:
    graph = nx.from_numpy_array((off > 0).astype(int))
    if not nx.is_connected(graph):
        raise DisconnectedGraph("weighted graph is not connected")


def harmonic_potential(W: np.ndarray, a: int, b: int) -> np.ndarray:
    """
    Potential g with g(a) = 0, g(b) = 1 that is harmonic at every other node.

    Raises:
        DisconnectedGraph: If the off-diagonal weights do not connect the graph
    """
    if a == b:
        raise ValueError(f"a and b must differ, got {a}")
    off = _offdiagonal(W)
    _require_connected(off)
    n = off.shape[0]
    L = np.diag(off.sum(axis=1)) - off
    interior = [k for k in range(n) if k not in (a, b)]
    g = np.zeros(n)
    g[b] = 1.0
    if interior:
        g[interior] = linalg.solve(L[np.ix_(interior, interior)], -L[interior, b])
    return g


def dirichlet_form(W: np.ndarray, g: np.ndarray) -> float:
    """E(g, g) = (1/2) sum_ij (w_ij / w) (g_i - g_j)^2 with w the total weight."""
    W = np.asarray(W, dtype=float)
    diff = g[:, None] - g[None, :]
    return float(0.5 * np.sum(W * diff * diff) / W.sum())


def effective_resistance(W: np.ndarray, a: int, b: int) -> float:
    """R_eff between a and b with conductances w_ij; node b grounded, unit current at a."""
    if a == b:
        raise ValueError(f"a and b must differ, got {a}")
    off = _offdiagonal(W)
    _require_connected(off)
    n = off.shape[0]
    L = np.diag(off.sum(axis=1)) - off
    keep = [k for k in range(n) if k != b]
    rhs = np.zeros(n - 1)
    rhs[keep.index(a)] = 1.0
    potential = linalg.solve(L[np.ix_(keep, keep)], rhs, assume_a="pos")
    return float(potential[keep.index(a)])


def commute_time_electrical(W: np.ndarray, a: int, b: int) -> float:
    """
    Commute time w R_eff(a, b) of the random walk on weights W.

    Works for any symmetric nonnegative weights; for a social matrix T the
    total weight is n.

    Example:
        >>> commute_time_electrical(np.array([[.5, .5], [.5, .5]]), 0, 1)
        4.0
    """
    W = np.asarray(W, dtype=float)
    return float(W.sum() * effective_resistance(W, a, b))

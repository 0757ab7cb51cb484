"""
Data models for misinformation analysis on gossip networks.

This module defines the core data structures used throughout the toolkit:
- SocialNetwork: agents, meeting probabilities, interaction probabilities
  (alpha = influence, beta = averaging, gamma = disagreement) and the
  global self-weight epsilon
- Violation / ValidationReport: structured results of assumption checks
- MeetingDigraph: directed links with BFS distances and diameter
- ForcefulLink: a directed pair along which one agent influences another

These models are used by:
- network_model (validation, JSON load/save)
- generators (example topologies)
- interaction_kernel, markov_analysis, influence_analysis (analytics)
- gossip_simulator (event sampling)

Critical: SocialNetwork is immutable. Its arrays are marked read-only so a
network can be shared across threads and cached analyses stay valid.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np


class AnalysisError(Exception):
    """Base class for domain errors raised by the analysis toolkit."""
    pass


INTERACTION_TOLERANCE = 1e-9


def _frozen_matrix(values, n: int, name: str) -> np.ndarray:
    matrix = np.array(values, dtype=float)
    if matrix.shape != (n, n):
        raise ValueError(f"{name} must have shape ({n}, {n}), got {matrix.shape}")
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class SocialNetwork:
    """
    A gossip network of n agents with forceful interactions.

    When agent i is recognized (probability 1/n) it meets j with probability
    p_ij. Conditional on the meeting, i is influenced by j with probability
    alpha_ij, the two average with probability beta_ij, and nothing happens
    with probability gamma_ij. Entries of alpha/beta/gamma are only
    meaningful where p_ij > 0; elsewhere they are stored as zero.

    Construction only checks shapes and n >= 2. The modelling assumptions
    (row sums, strong connectivity, alpha + beta > 0) are checked by
    network_model.validate so that broken inputs can be reported.

    Used by: every analysis module, the simulator and the CLI
    """

    n: int
    epsilon: float
    meeting: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        for name in ("meeting", "alpha", "beta", "gamma"):
            object.__setattr__(self, name, _frozen_matrix(getattr(self, name), self.n, name))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SocialNetwork):
            return NotImplemented
        return (
            self.n == other.n
            and self.epsilon == other.epsilon
            and all(
                np.array_equal(getattr(self, name), getattr(other, name))
                for name in ("meeting", "alpha", "beta", "gamma")
            )
        )

    __hash__ = None

    @property
    def support(self) -> np.ndarray:
        """Boolean matrix of ordered pairs (i, j) with p_ij > 0."""
        return self.meeting > 0

    def edges(self) -> List[Tuple[int, int]]:
        """Ordered pairs with positive meeting probability, row-major."""
        rows, cols = np.nonzero(self.meeting > 0)
        return [(int(i), int(j)) for i, j in zip(rows, cols)]

    def has_forceful(self) -> bool:
        return bool(np.any((self.alpha > 0) & self.support))

    def to_dict(self) -> Dict:
        """Convert to the JSON network document {n, epsilon, edges}."""
        return {
            "n": self.n,
            "epsilon": self.epsilon,
            "edges": [
                {
                    "i": i,
                    "j": j,
                    "p": float(self.meeting[i, j]),
                    "alpha": float(self.alpha[i, j]),
                    "beta": float(self.beta[i, j]),
                    "gamma": float(self.gamma[i, j]),
                }
                for i, j in self.edges()
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "SocialNetwork":
        """
        Reconstruct a network from its JSON document.

        Interaction fields are optional per edge. Missing fields default to
        pure averaging (beta = 1); gamma may be omitted and derived as
        1 - alpha - beta.

        Raises:
            ValueError: With the offending field path in the message
        """
        if not isinstance(data, dict):
            raise ValueError("document: expected a JSON object")
        for key in ("n", "epsilon", "edges"):
            if key not in data:
                raise ValueError(f"{key}: missing required field")
        n = data["n"]
        if isinstance(n, bool) or not isinstance(n, int):
            raise ValueError(f"n: expected an integer, got {n!r}")
        if n < 2:
            raise ValueError(f"n must be ≥ 2, got {n}")
        epsilon = _number(data["epsilon"], "epsilon")
        if not isinstance(data["edges"], list):
            raise ValueError("edges: expected a list")

        meeting = np.zeros((n, n))
        alpha = np.zeros((n, n))
        beta = np.zeros((n, n))
        gamma = np.zeros((n, n))
        seen = set()
        for idx, edge in enumerate(data["edges"]):
            where = f"edges[{idx}]"
            if not isinstance(edge, dict):
                raise ValueError(f"{where}: expected an object")
            for key in ("i", "j", "p"):
                if key not in edge:
                    raise ValueError(f"{where}.{key}: missing required field")
            i, j = edge["i"], edge["j"]
            for key, value in (("i", i), ("j", j)):
                if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value < n:
                    raise ValueError(f"{where}.{key}: expected an agent index in [0, {n}), got {value!r}")
            if (i, j) in seen:
                raise ValueError(f"{where}: duplicate pair ({i}, {j})")
            seen.add((i, j))

            a = _number(edge.get("alpha", 0.0), f"{where}.alpha")
            has_beta = "beta" in edge
            has_gamma = "gamma" in edge
            b = _number(edge["beta"], f"{where}.beta") if has_beta else None
            g = _number(edge["gamma"], f"{where}.gamma") if has_gamma else None
            if b is None and g is None:
                b, g = 1.0 - a, 0.0
            elif b is None:
                b = 1.0 - a - g
            elif g is None:
                g = 1.0 - a - b
                if -1e-12 < g < 0.0:
                    g = 0.0
            elif abs(a + b + g - 1.0) > INTERACTION_TOLERANCE:
                raise ValueError(
                    f"{where}: alpha + beta + gamma = {a + b + g!r}, inconsistent beyond {INTERACTION_TOLERANCE}"
                )
            meeting[i, j] = _number(edge["p"], f"{where}.p")
            alpha[i, j], beta[i, j], gamma[i, j] = a, b, g

        return cls(n=n, epsilon=epsilon, meeting=meeting, alpha=alpha, beta=beta, gamma=gamma)


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{where}: expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class Violation:
    """One broken modelling assumption, with the indices that break it."""

    code: str
    message: str
    indices: Tuple[int, ...] = ()

    def to_dict(self) -> Dict:
        return {"code": self.code, "message": self.message, "indices": list(self.indices)}


@dataclass
class ValidationReport:
    """
    Every violated assumption of a network.

    An empty report means meeting rows are stochastic without self-meetings,
    interaction probabilities are consistent with alpha + beta > 0 on every
    link, and the meeting digraph is strongly connected.
    """

    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> List[str]:
        return [v.code for v in self.violations]

    def messages(self) -> List[str]:
        return [v.message for v in self.violations]

    def to_dict(self) -> Dict:
        return {"ok": self.ok, "violations": [v.to_dict() for v in self.violations]}


@dataclass(frozen=True, eq=False)
class MeetingDigraph:
    """
    Directed meeting links E = {(i, j) | p_ij > 0} with BFS distances.

    distances[i, j] is the number of links on a shortest directed path from
    i to j; diameter is the maximum over all ordered pairs.
    """

    n: int
    links: Tuple[Tuple[int, int], ...]
    distances: np.ndarray
    diameter: int

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "links": [list(link) for link in self.links],
            "diameter": self.diameter,
        }


@dataclass(frozen=True)
class ForcefulLink:
    """Agent `source` influences agent `target`; strength is p_target,source * alpha."""

    source: int
    target: int
    strength: float

    def to_dict(self) -> Dict:
        return {"source": self.source, "target": self.target, "strength": self.strength}

    @classmethod
    def from_dict(cls, data: Dict) -> "ForcefulLink":
        return cls(source=int(data["source"]), target=int(data["target"]), strength=float(data["strength"]))


def as_vector(values: Optional[List[float]], n: int, name: str = "x0") -> Optional[np.ndarray]:
    """Coerce an optional per-agent list into a float vector of length n."""
    if values is None:
        return None
    vector = np.asarray(values, dtype=float)
    if vector.shape != (n,):
        raise ValueError(f"{name} must have {n} entries, got shape {vector.shape}")
    return vector

"""Bipartite states of two identical polygon systems.

A state is stored as the 3x3 matrix ``M`` of the linear map sending one of
Alice's effects ``e`` to Bob's unnormalised conditional state ``M @ e``; the
probability of the joint outcome ``(e, f)`` is ``f @ M @ e``.  In the 9-vector
form the basis order is row-major over (Alice) x (Bob), so that
``vec[3*i + j] = M[j, i]``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .theory import DEFAULT_TOL, Observable, Theory, build_theory, contains_state, symmetry_group


class NotNormalized(ValueError):
    pass


class NotPositive(ValueError):
    pass


class BadMixture(ValueError):
    pass


class NotSymmetry(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BipartiteState:
    map: np.ndarray
    n: int
    validated: bool = False
    label: str | None = None

    @property
    def theory(self) -> Theory:
        return build_theory(self.n)

    def vector(self) -> np.ndarray:
        """The 9-component tensor form (Alice index major)."""
        return self.map.T.ravel().copy()

    @classmethod
    def from_vector(cls, n: int, vec) -> "BipartiteState":
        return cls(np.asarray(vec, dtype=float).reshape(3, 3).T.copy(), n)

    def to_json(self) -> dict:
        return {"n": self.n, "map": self.map.tolist()}


def positivity_values(theory: Theory, matrix) -> np.ndarray:
    """``f @ M @ e`` for every pair of stored pure effects (rows: f, cols: e)."""
    E = theory.pure_effects
    return E @ np.asarray(matrix, dtype=float) @ E.T


def in_max_tensor(theory: Theory, matrix, tol: float = DEFAULT_TOL) -> bool:
    M = np.asarray(matrix, dtype=float)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        return False
    if abs(M[2, 2] - 1.0) > tol:
        return False
    return bool(positivity_values(theory, M).min() >= -tol)


def state_from_map(theory: Theory, matrix, tol: float = DEFAULT_TOL, label=None) -> BipartiteState:
    """Validate ``matrix`` as a member of the maximal tensor product."""
    M = np.array(matrix, dtype=float)
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        raise ValueError("a bipartite state needs a finite 3x3 matrix")
    if abs(M[2, 2] - 1.0) > tol:
        raise NotNormalized(f"<u, M u> = {M[2, 2]:.6g}, expected 1")
    worst = positivity_values(theory, M).min()
    if worst < -tol:
        raise NotPositive(f"an effect pair has probability {worst:.3g} < 0")
    M.setflags(write=False)
    return BipartiteState(M, theory.n, True, label)


def product_map(alice_state, bob_state) -> np.ndarray:
    """Map of the product state: ``e -> <e, alice_state> * bob_state``."""
    return np.outer(np.asarray(bob_state, dtype=float), np.asarray(alice_state, dtype=float))


def separable_state(theory: Theory, mixture, tol: float = DEFAULT_TOL) -> BipartiteState:
    """Convex mixture of product states given as ``[(weight, alice, bob), ...]``."""
    if len(mixture) == 0:
        raise BadMixture("empty mixture")
    weights = np.array([float(w) for w, _, _ in mixture])
    if np.any(weights < -tol) or abs(weights.sum() - 1.0) > tol:
        raise BadMixture("weights must be nonnegative and sum to 1")
    M = np.zeros((3, 3))
    for w, wa, wb in mixture:
        if not (contains_state(theory, wa, tol) and contains_state(theory, wb, tol)):
            raise BadMixture("mixture component outside the state space")
        M += w * product_map(wa, wb)
    M.setflags(write=False)
    return BipartiteState(M, theory.n, True, "separable")


def _group_index(theory: Theory, g, tol=1e-9) -> int:
    g = np.asarray(g, dtype=float)
    for idx, h in enumerate(symmetry_group(theory)):
        if np.max(np.abs(h - g)) <= tol:
            return idx
    raise NotSymmetry("matrix is not a symmetry of the polygon")


def max_entangled(theory: Theory, g) -> BipartiteState:
    """The state whose map is ``T @ g`` for a polygon symmetry ``g``."""
    idx = _group_index(theory, g)
    g = symmetry_group(theory)[idx]
    return state_from_map(theory, theory.T @ g, tol=1e-10, label=f"ME[{idx}]")


def enumerate_max_entangled(theory: Theory) -> list[BipartiteState]:
    """One maximally entangled state per symmetry, in group order."""
    return [state_from_map(theory, theory.T @ g, tol=1e-10, label=f"ME[{k}]")
            for k, g in enumerate(symmetry_group(theory))]


def transpose_state(state: BipartiteState) -> BipartiteState:
    M = state.map.T.copy()
    M.setflags(write=False)
    return BipartiteState(M, state.n, state.validated, state.label)


@dataclass(frozen=True)
class Assemblage:
    """Bob's conditional states for one of Alice's settings."""

    probs: np.ndarray
    states: np.ndarray
    s: int = 0
    degenerate: tuple = (False, False)

    @property
    def average(self) -> np.ndarray:
        return self.probs @ self.states


@dataclass(frozen=True)
class AssemblagePair:
    first: Assemblage
    second: Assemblage

    @property
    def average(self) -> np.ndarray:
        return self.first.average

    def signaling_gap(self) -> float:
        return float(np.max(np.abs(self.first.average - self.second.average)))

    def __iter__(self):
        return iter((self.first, self.second))


def conditional_assemblage(state: BipartiteState, alice_obs: Observable, s: int = 0,
                           zero_tol: float = 1e-14) -> Assemblage:
    """Bob's ensemble ``{(p(a|s), omega_s^a)}`` after Alice measures ``alice_obs``.

    Outcomes with zero probability get the maximally mixed state and a
    ``degenerate`` flag.
    """
    probs = np.zeros(2)
    states = np.zeros((2, 3))
    flags = [False, False]
    for a in (0, 1):
        v = state.map @ alice_obs.effect(a)
        p = v[2]
        probs[a] = p
        if p > zero_tol:
            states[a] = v / p
        else:
            states[a] = np.array([0.0, 0.0, 1.0])
            flags[a] = True
    return Assemblage(probs, states, s, tuple(flags))


def assemblage_pair(state: BipartiteState, a0: Observable, a1: Observable) -> AssemblagePair:
    return AssemblagePair(conditional_assemblage(state, a0, 0), conditional_assemblage(state, a1, 1))

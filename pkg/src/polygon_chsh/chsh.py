"""CHSH game arithmetic.

Outcomes are labelled 0/1.  The game is won when ``a XOR b == s AND t`` and
settings are drawn uniformly, so ``C = 4 (2 P_win - 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import odd_case_data
from .bipartite import AssemblagePair, BipartiteState, transpose_state
from .theory import Observable, build_theory, rotation

SIGN = np.array([[1.0, 1.0], [1.0, -1.0]])  # weight of correlator E(s, t)


class InvalidProbability(ValueError):
    pass


@dataclass(frozen=True)
class ChshSetting:
    state: BipartiteState
    a0: Observable
    a1: Observable
    b0: Observable
    b1: Observable

    @property
    def alice(self):
        return (self.a0, self.a1)

    @property
    def bob(self):
        return (self.b0, self.b1)


def game_predicate(a: int, b: int, s: int, t: int) -> int:
    return int((a ^ b) == (s & t))


def prob_table(setting: ChshSetting, tol: float = 1e-9) -> np.ndarray:
    """Array ``p[a, b, s, t]`` of joint outcome probabilities."""
    M = setting.state.map
    p = np.empty((2, 2, 2, 2))
    for s, A in enumerate(setting.alice):
        for t, B in enumerate(setting.bob):
            for a in (0, 1):
                v = M @ A.effect(a)
                for b in (0, 1):
                    p[a, b, s, t] = B.effect(b) @ v
    if p.min() < -tol:
        raise InvalidProbability(f"negative probability {p.min():.3g}; not a valid state")
    return p


def table_to_json(p: np.ndarray) -> list:
    """4x4 nested list: rows indexed by (s, t), columns by (a, b)."""
    return [[float(p[a, b, s, t]) for a in (0, 1) for b in (0, 1)] for s in (0, 1) for t in (0, 1)]


def correlators(p: np.ndarray) -> np.ndarray:
    w = np.array([[1.0, -1.0], [-1.0, 1.0]])
    return np.einsum("ab,abst->st", w, p)


def chsh_value(p: np.ndarray) -> float:
    return float(np.sum(SIGN * correlators(p)))


def winning_probability(p: np.ndarray) -> float:
    total = 0.0
    for a in (0, 1):
        for b in (0, 1):
            for s in (0, 1):
                for t in (0, 1):
                    total += game_predicate(a, b, s, t) * p[a, b, s, t]
    return total / 4


def chsh_from_win(P: float) -> float:
    return 4 * (2 * P - 1)


def q_effects(b0: Observable, b1: Observable) -> np.ndarray:
    """Bob-side averaged effects ``Q[s, a]`` (rows sum to the unit effect)."""
    B = [[b0.effect0, b0.effect1], [b1.effect0, b1.effect1]]
    Q = np.zeros((2, 2, 3))
    for s in (0, 1):
        for a in (0, 1):
            for t in (0, 1):
                for b in (0, 1):
                    if game_predicate(a, b, s, t):
                        Q[s, a] += 0.5 * B[t][b]
    return Q


def r_effects(a0: Observable, a1: Observable) -> np.ndarray:
    """Alice-side averaged effects ``R[t, b]``."""
    A = [[a0.effect0, a0.effect1], [a1.effect0, a1.effect1]]
    Rm = np.zeros((2, 2, 3))
    for t in (0, 1):
        for b in (0, 1):
            for s in (0, 1):
                for a in (0, 1):
                    if game_predicate(a, b, s, t):
                        Rm[t, b] += 0.5 * A[s][a]
    return Rm


def win_via_q(setting: ChshSetting) -> float:
    """``P_win = 1/2 sum_{s,a} <Q_s^a, M A_s^a>``."""
    Q = q_effects(setting.b0, setting.b1)
    M = setting.state.map
    return 0.5 * sum(Q[s, a] @ (M @ A.effect(a)) for s, A in enumerate(setting.alice) for a in (0, 1))


def win_via_r(setting: ChshSetting) -> float:
    """The same quantity with the roles of the parties exchanged."""
    swapped = transpose_state(setting.state)
    Rm = r_effects(setting.a0, setting.a1)
    M = swapped.map
    return 0.5 * sum(Rm[t, b] @ (M @ B.effect(b)) for t, B in enumerate(setting.bob) for b in (0, 1))


def win_via_assemblage(pair: AssemblagePair, Q: np.ndarray) -> float:
    total = 0.0
    for s, asm in enumerate(pair):
        for a in (0, 1):
            if asm.probs[a] > 0:
                total += asm.probs[a] * (Q[s, a] @ asm.states[a])
    return 0.5 * total


def chsh_functional(a0, a1, b0, b1) -> np.ndarray:
    """Matrix ``F`` with ``C = sum(F * M)`` for a state map ``M``."""
    F = np.zeros((3, 3))
    for s, A in enumerate((a0, a1)):
        for t, B in enumerate((b0, b1)):
            F += SIGN[s, t] * np.outer(B.effect0 - B.effect1, A.effect0 - A.effect1)
    return F


def chsh_of(setting: ChshSetting) -> float:
    return float(np.sum(chsh_functional(*setting.alice, *setting.bob) * setting.state.map))


# ---------------------------------------------------------------------------
# self-adjoint parametrisation in the rotated frame


@dataclass(frozen=True)
class SymmetricParams:
    a: float
    b: float
    c: float
    d: float
    e: float
    n: int

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d, self.e])

    def frame_matrix(self) -> np.ndarray:
        """The map written in the rotated frame."""
        a, b, c, d, e = self.vector
        return np.array([[a, b, c], [b, d, e], [c, e, 1.0]])

    def canonical_matrix(self) -> np.ndarray:
        """The same map in the standard frame."""
        W = frame_rotation(self.n)
        return W @ self.frame_matrix() @ W.T


def frame_rotation(n: int) -> np.ndarray:
    """Rotation by ``n_star * pi / n`` defining the rotated frame for odd ``n``."""
    return rotation(odd_case_data(n).n_star * np.pi / n)


def chsh_direction(n: int) -> np.ndarray:
    """Coefficient vector of the CHSH value in ``(a, b, c, d, e)``."""
    th = build_theory(n)
    ns = odd_case_data(n).n_star
    t, r = th.theta, th.r
    return np.array([
        r * (1 + np.cos(2 * ns * t)),
        2 * r * np.sin(2 * ns * t),
        2 * (1 - r * r) * np.cos(ns * t),
        r * (-1 + np.cos(2 * ns * t)),
        2 * (1 - r * r) * np.sin(ns * t),
    ])


def symmetric_offset(n: int) -> tuple[float, float]:
    """``(scale, offset)`` with ``C = scale * (direction . params) + offset``."""
    th = build_theory(n)
    R = th.R
    return 4 * R * R * th.r, 2 * (1 - 2 * R) ** 2


def symmetric_chsh(params: SymmetricParams) -> float:
    """CHSH value with both parties measuring ``(E(n_star), E(0))``."""
    scale, offset = symmetric_offset(params.n)
    return float(scale * (chsh_direction(params.n) @ params.vector) + offset)


def me_params(n: int) -> SymmetricParams:
    """Parameters of the optimal maximally entangled map in the rotated frame."""
    d = odd_case_data(n)
    ang = 2 * (d.K_n - d.n_star) * np.pi / n
    return SymmetricParams(np.cos(ang), np.sin(ang), 0.0, -np.cos(ang), 0.0, n)

"""Regular polygon state spaces and their effect cones.

States live on the plane ``z = 1`` in R^3.  Vertex ``i`` sits at angle
``2*pi*i/n`` on a circle of radius ``r = sqrt(1/cos(pi/n))``, a radius
chosen so that the polygon is (weakly) self-dual with respect to the
standard inner product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DEFAULT_TOL = 1e-9


def rotation(angle: float) -> np.ndarray:
    """Rotation about the z-axis by ``angle`` (counter-clockwise)."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def reflection(angle: float) -> np.ndarray:
    """Reflection across the line through the origin at ``angle/2``.

    Equivalent to ``rotation(angle) @ diag(1, -1, 1)``.
    """
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s, 0.0], [s, -c, 0.0], [0.0, 0.0, 1.0]])


REFLECT_X = np.diag([1.0, -1.0, 1.0])


@dataclass(frozen=True)
class Observable:
    """A two-outcome measurement ``{effect0, effect1}`` with ``effect0 + effect1 = u``."""

    effect0: np.ndarray
    effect1: np.ndarray
    index: int | None = None

    def effect(self, outcome: int) -> np.ndarray:
        return self.effect1 if outcome else self.effect0


@dataclass(frozen=True, eq=False)
class Theory:
    """A regular polygon theory with ``n`` pure states.

    Attributes
    ----------
    n : int
        Number of vertices.
    r : float
        Circumradius of the polygon.
    theta : float
        ``pi / n``.
    pure_states : ndarray, shape (n, 3)
    pure_effects : ndarray, shape (n, 3) for even n, (2n, 3) for odd n
        Generators of the effect cone.  For odd ``n`` rows ``n..2n-1`` are the
        complements ``u - e(i)``.
    T : ndarray, shape (3, 3)
        Orthogonal map sending every pure effect onto a positive multiple of
        the pure state with the same index.
    """

    n: int
    r: float = field(init=False)
    theta: float = field(init=False)
    pure_states: np.ndarray = field(init=False, repr=False)
    pure_effects: np.ndarray = field(init=False, repr=False)
    T: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = self.n
        if int(n) != n or n < 3:
            raise ValueError(f"a polygon theory needs an integer n >= 3, got {n!r}")
        theta = np.pi / n
        r = np.sqrt(1.0 / np.cos(theta))
        ang = 2 * np.pi * np.arange(n) / n
        states = np.column_stack([r * np.cos(ang), r * np.sin(ang), np.ones(n)])
        if n % 2 == 0:
            ea = (2 * np.arange(n) + 1) * theta
            effects = 0.5 * np.column_stack([r * np.cos(ea), r * np.sin(ea), np.ones(n)])
            T = rotation(-theta)
        else:
            R = 1.0 / (1.0 + r * r)
            e = R * states
            effects = np.vstack([e, np.array([0.0, 0.0, 1.0]) - e])
            T = np.eye(3)
        for name, val in (("r", r), ("theta", theta), ("pure_states", states),
                          ("pure_effects", effects), ("T", T)):
            if isinstance(val, np.ndarray):
                val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def R(self) -> float:
        """Scale ``1/(1+r^2)`` of the odd-n pure effects."""
        return 1.0 / (1.0 + self.r ** 2)

    @property
    def unit(self) -> np.ndarray:
        return np.array([0.0, 0.0, 1.0])

    @property
    def max_mixed(self) -> np.ndarray:
        return np.array([0.0, 0.0, 1.0])

    @property
    def effect_scale(self) -> float:
        """Factor ``c`` with ``T e(i) = c * omega(i)``."""
        return 0.5 if self.n % 2 == 0 else self.R


@lru_cache(maxsize=256)
def build_theory(n: int) -> Theory:
    """Return the (cached, immutable) polygon theory with ``n`` vertices."""
    return Theory(int(n))


def pure_state(theory: Theory, i: int) -> np.ndarray:
    return theory.pure_states[int(i) % theory.n].copy()


def pure_effect(theory: Theory, i: int) -> np.ndarray:
    """The extremal effect ``e(i)``; index taken mod n."""
    return theory.pure_effects[int(i) % theory.n].copy()


def binary_observable(theory: Theory, i: int) -> Observable:
    """The observable ``{e(i), u - e(i)}``."""
    i = int(i) % theory.n
    e = pure_effect(theory, i)
    return Observable(e, theory.unit - e, i)


def contains_state(theory: Theory, v, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``v`` lies in the polygon (within ``tol``).

    Each edge of the polygon is the zero set of an even-n style pure effect,
    so the test is ``<edge normal, v> >= 0`` for all edges plus ``z = 1``.
    """
    v = np.asarray(v, dtype=float)
    if abs(v[2] - 1.0) > tol:
        return False
    return bool(np.all(_edge_functionals(theory.n) @ v >= -tol))


@lru_cache(maxsize=256)
def _edge_functionals(n: int) -> np.ndarray:
    # edge between vertex i and i+1 has outward direction at angle (2i+1)pi/n
    # and lies at distance r*cos(pi/n) = 1/r from the centre
    theta = np.pi / n
    r = np.sqrt(1.0 / np.cos(theta))
    a = (2 * np.arange(n) + 1) * theta
    out = np.column_stack([-r * np.cos(a), -r * np.sin(a), np.ones(n)])
    out.setflags(write=False)
    return out


def contains_effect(theory: Theory, v, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``0 <= <v, w> <= 1`` on every vertex ``w`` (within ``tol``)."""
    vals = theory.pure_states @ np.asarray(v, dtype=float)
    return bool(np.all(vals >= -tol) and np.all(vals <= 1 + tol))


def symmetry_group(theory: Theory) -> list[np.ndarray]:
    """The dihedral group of the polygon.

    Elements ``0..n-1`` are rotations by ``2*pi*k/n``; elements ``n..2n-1``
    are the reflections ``rotation(2*pi*k/n) @ diag(1,-1,1)``.
    """
    n = theory.n
    rots = [rotation(2 * np.pi * k / n) for k in range(n)]
    refl = [reflection(2 * np.pi * k / n) for k in range(n)]
    return rots + refl


def group_label(theory: Theory, index: int) -> str:
    """Human-readable name of ``symmetry_group(theory)[index]``."""
    n = theory.n
    return f"rot{index}" if index < n else f"ref{index - n}"


def order_isomorphism(theory: Theory) -> np.ndarray:
    return theory.T.copy()

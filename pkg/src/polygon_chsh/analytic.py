"""Closed-form CHSH bounds for polygon theories.

Even ``n`` (``n % 8`` in {2, 6}) has a one-parameter family of bounds on
``2 P_win - 1``.  Odd ``n`` has per-setting bounds ``G(k)`` over all
no-signalling assemblages and ``H(k)`` over those produced by maximally
entangled states, built from segment-wise linear coefficients ``beta`` and
``beta_hat`` along the polygon boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class WrongResidue(ValueError):
    """The requested closed form does not exist for this ``n``."""


class OutOfRange(ValueError):
    pass


def _consts(n):
    t = np.pi / n
    r2 = 1.0 / np.cos(t)
    return t, np.sqrt(r2), r2, 1.0 / (1.0 + r2)


# ---------------------------------------------------------------------------
# even n


def even_bound(n: int, l: int) -> float:
    """Upper bound on ``2 P_win - 1`` for Bob's settings separated by ``2l+1``.

    Multiply by 4 for the corresponding CHSH value.
    """
    if n % 2 or n % 8 not in (2, 6):
        raise WrongResidue(f"no closed form for n = {n} (n mod 8 = {n % 8})")
    if not 0 <= l <= (n - 2) // 4:
        raise ValueError(f"l must lie in 0..{(n - 2) // 4}")
    t, _, r2, _ = _consts(n)
    a = (2 * l + 1) * t
    return 0.5 * r2 * (np.cos(a) + np.cos(t) * np.sin(a))


def even_optimum(n: int) -> tuple[int, float]:
    """``(l, CHSH)`` maximising ``4 * even_bound(n, l)``; lowest ``l`` on ties."""
    vals = [4 * even_bound(n, l) for l in range((n - 2) // 4 + 1)]
    best = int(np.argmax(vals))
    return best, float(vals[best])


def even_alt_bound(n: int) -> tuple[int, float]:
    """Alternative closed-form maximum of ``even_bound`` and its argmax ``l``.

    Kept for comparison only: it does not agree with direct maximisation
    (see ``compare_even_forms``).
    """
    if n % 8 not in (2, 6):
        raise WrongResidue(f"no closed form for n = {n}")
    t, _, r2, _ = _consts(n)
    p1, p2 = (n + 2) * np.pi / (4 * n), (n + 6) * np.pi / (4 * n)
    if n % 8 == 2:
        return (n - 2) // 8, 0.5 * r2 * (3 * np.cos(p1) + np.sin(p2))
    return (n - 6) // 8, 0.5 * r2 * (3 * np.sin(p1) + np.cos(p2))


def compare_even_forms(n: int) -> dict:
    """Side-by-side values of the alternative form and direct maximisation."""
    l_direct, chsh = even_optimum(n)
    l_alt, alt = even_alt_bound(n)
    direct = chsh / 4
    return {"n": n, "direct": direct, "direct_l": l_direct, "alternative": alt,
            "alternative_l": l_alt, "ratio": alt / direct, "agree": abs(alt - direct) <= 1e-9}


# ---------------------------------------------------------------------------
# odd n bookkeeping


@dataclass(frozen=True)
class OddCaseData:
    n: int
    n_star: int
    M0: int
    K_n: int
    k_n: int  # carried along for completeness; no formula uses it
    residue: int

    @property
    def sign_x(self) -> int:
        """+1 if the optimum maximises ``P_win`` (n = 1, 7 mod 8), else -1."""
        return 1 if self.residue in (1, 7) else -1


def odd_case_data(n: int) -> OddCaseData:
    if n % 2 == 0 or n < 5:
        raise WrongResidue(f"odd n >= 5 required, got {n}")
    res = n % 8
    table = {
        1: ((n - 1) // 4, (n - 1) // 4, (3 * n - 3) // 8, -(n - 1) // 8),
        3: ((n + 1) // 4, (n - 3) // 4, -(n - 3) // 8, (3 * n - 1) // 8),
        5: ((n - 1) // 4, (n - 1) // 4, -(n + 3) // 8, (3 * n + 1) // 8),
        7: ((n + 1) // 4, (n - 3) // 4, (3 * n + 3) // 8, -(n + 1) // 8),
    }
    ns, M0, K, k = table[res]
    return OddCaseData(n, ns, M0, K, k, res)


def n_star(n: int) -> int:
    return odd_case_data(n).n_star


# ---------------------------------------------------------------------------
# boundary and coefficients


def boundary_f(n: int, x: float) -> float:
    """Upper half of the odd polygon's boundary as a function of ``x``."""
    if n % 2 == 0:
        raise WrongResidue("boundary_f is defined for odd n")
    t, r, _, _ = _consts(n)
    lo, hi = -1.0 / r, r
    eps = 1e-12
    if not lo - eps <= x <= hi + eps:
        raise OutOfRange(f"x = {x} outside [{lo}, {hi}]")
    M = _segment(n, x)
    a = (2 * M + 1) * t
    return float(-x / np.tan(a) + r * np.cos(t) / np.sin(a))


def _segment(n, x):
    t, r, _, _ = _consts(n)
    for M in range((n - 3) // 2 + 1):
        if x >= r * np.cos((2 * M + 2) * t) - 1e-15:
            return M
    return (n - 3) // 2


@dataclass(frozen=True)
class BoundCoefficients:
    beta: float
    beta_hat: float
    parity: str
    k: int
    M: int


def beta_coefficients(n: int, k: int, M: int) -> BoundCoefficients:
    """Slope and intercept of the CHSH bound on boundary segment ``M``.

    The even-``k`` branch is used for even ``k`` and the odd branch for odd
    ``k``; the bound reads ``|C| <= 4 (beta x + beta_hat) - 2``.
    """
    t, r, r2, R = _consts(n)
    ck, sk = np.cos(k * t), np.sin(k * t)
    a = (2 * M + 1) * t
    head = R * (2 * R * r2 * ck + sk / np.sin(a))
    if k % 2 == 0:
        beta = R * r * (R * (r2 - 1) * (ck - 1) - sk / np.tan(a))
        return BoundCoefficients(beta, head + R * R * (1 + r2 * r2), "even", k, M)
    beta = R * r * (R * (r2 - 1) * (-ck - 1) + sk / np.tan(a))
    return BoundCoefficients(beta, head + 2 * R * R * r2, "odd", k, M)


def i_value(n: int, k: int) -> float:
    """Largest ``beta x + beta_hat`` over all boundary segments."""
    d = odd_case_data(n)
    _, r, _, _ = _consts(n)
    c = beta_coefficients(n, k, d.M0)
    x = r * np.sin(np.pi / (2 * n)) * (1 if d.residue in (1, 5) else -1)
    if k % 2:
        x = -x
    return c.beta * x + c.beta_hat


def i_value_expanded(n: int, k: int) -> float:
    """Same quantity as :func:`i_value` from the fully expanded expression."""
    d = odd_case_data(n)
    t, r, r2, R = _consts(n)
    h = t / 2
    sg = 1 if d.residue in (1, 5) else -1
    s3 = r2 * np.sin(h) ** 3
    cos_term = R / np.cos(h) ** 2 * (sg * s3 + 1) * np.cos(k * t)
    sin_term = R / np.cos(h) * (r2 * np.sin(h) ** 2 + 1) * np.sin(k * t)
    if k % 2 == 0:
        return cos_term + sin_term - sg * R * s3 / np.cos(h) ** 2 + R * R * (1 + r2 * r2)
    return cos_term + sin_term + sg * R * s3 / np.cos(h) ** 2 + 2 * R * R * r2


def i_hat_value(n: int, k: int) -> float:
    """``beta_hat`` at the central segment (the average state is centred)."""
    return beta_coefficients(n, k, odd_case_data(n).M0).beta_hat


def g_table(n: int) -> np.ndarray:
    """``G(k) = 4 I(k) - 2`` for ``k = 0..(n-1)/2``."""
    return np.array([4 * i_value(n, k) - 2 for k in range((n - 1) // 2 + 1)])


def h_table(n: int) -> np.ndarray:
    """``H(k) = 4 I_hat(k) - 2`` for ``k = 0..(n-1)/2``."""
    return np.array([4 * i_hat_value(n, k) - 2 for k in range((n - 1) // 2 + 1)])


def h_opt(n: int) -> tuple[int, int, float]:
    """``(n_star, K_n, H)`` from the residue-specific closed form."""
    d = odd_case_data(n)
    t, _, r2, R = _consts(n)
    q = np.pi / 4
    c3, s3 = np.cos(q + 3 * t / 4), np.sin(q + 3 * t / 4)
    c1, s1 = np.cos(q + t / 4), np.sin(q + t / 4)
    if d.residue == 1:
        inner = 1 + r2 * (2 * c3 + 6 * s1 + r2 - 2)
    elif d.residue == 3:
        inner = -1 + r2 * (2 * s3 + 6 * c1 + 2 - r2)
    elif d.residue == 5:
        inner = -1 + r2 * (2 * c3 + 6 * s1 + 2 - r2)
    else:
        inner = 1 + r2 * (2 * s3 + 6 * c1 + r2 - 2)
    return d.n_star, d.K_n, float(2 * R * R * inner)


def segment_ordering_check(n: int) -> dict:
    """Ordering ``max_{k != n*} G(k) < H(n*) < G(n*)`` and the argmax sets."""
    d = odd_case_data(n)
    G, H = g_table(n), h_table(n)
    ns = d.n_star
    others = np.delete(G, ns)
    argG = set(np.flatnonzero(np.isclose(G, G.max(), rtol=0, atol=1e-12)).tolist())
    argH = set(np.flatnonzero(np.isclose(H, H.max(), rtol=0, atol=1e-12)).tolist())
    ok = bool(others.max() < H[ns] < G[ns]) and argG == {ns} and argH == {ns}
    return {"n": n, "n_star": ns, "max_other_G": float(others.max()), "H": float(H[ns]),
            "G": float(G[ns]), "argmax_G": sorted(argG), "argmax_H": sorted(argH), "pass": ok}


def closed_form_optimum(n: int) -> tuple[float, str]:
    """Best CHSH value from the shipped closed forms, with a method tag.

    Returns ``(nan, "LP")`` when no closed form exists (n = 0, 4 mod 8).
    """
    if n == 3:
        return 2.0, "classical"
    if n % 2:
        return h_opt(n)[2], "Hopt"
    if n % 8 in (2, 6):
        return even_optimum(n)[1], "even_bound"
    return float("nan"), "LP"


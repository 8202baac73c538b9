"""Optimisation drivers and optimality certificates.

Global optimum
    For fixed observables the CHSH value is linear in the state map, so the
    best value over the maximal tensor product is a small LP.  Sweeping the
    LP over observable quadruples gives the global optimum.

ME optimum
    Direct evaluation over every maximally entangled state and quadruple.

Certificates (odd n)
    In a rotated frame the optimal maximally entangled map is symmetric and
    depends on five numbers ``(a, b, c, d, e)``.  Four positivity constraints
    of the max tensor product, each pairing a polygon edge normal with a pure
    effect, cut out a polyhedron on which the ME parameters maximise (or
    minimise) the CHSH value.  A dual vector certifies this through
    complementary slackness.  A second program of the same shape bounds the
    opposite-sign side.
"""
from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analytic import WrongResidue, h_opt, odd_case_data
from .bipartite import BipartiteState, enumerate_max_entangled, state_from_map
from .chsh import chsh_direction, me_params, symmetric_offset
from .lp import (
    LinearProgram,
    Status,
    check_complementary_slackness,
    solve,
)
from .theory import DEFAULT_TOL, Theory, build_theory, rotation

LP_CAP = 15
THREADS_ENV = "POLYGON_CHSH_THREADS"
TIE_TOL = 1e-9


class CapExceeded(ValueError):
    """The requested LP sweep is larger than the configured cap."""


def worker_count(threads: int | None = None) -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    if threads:
        return max(1, int(threads))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# helpers shared by the LP and the enumeration


def effect_rays(theory: Theory, tol: float = 1e-9) -> np.ndarray:
    """Stored pure effects that vanish on two pure states (extreme rays of the effect cone).

    Positivity of a map on these rays is equivalent to positivity on all effects.
    """
    vals = theory.pure_effects @ theory.pure_states.T
    keep = (np.abs(vals) <= tol).sum(axis=1) >= 2
    return theory.pure_effects[keep]


def effect_differences(theory: Theory) -> np.ndarray:
    """Row ``i`` is ``e(i) - (u - e(i))`` for the observable with index ``i``."""
    E = theory.pure_effects[: theory.n]
    return 2 * E - theory.unit


def chsh_grid(theory: Theory, M) -> np.ndarray:
    """CHSH value for every quadruple, indexed ``[i, j, k, l]``."""
    D = effect_differences(theory)
    P = D @ np.asarray(M, dtype=float) @ D.T  # P[k, i] = <D_k, M D_i>
    Pi = P.T  # Pi[i, k]
    return (Pi[:, None, :, None] + Pi[None, :, :, None]
            + Pi[:, None, None, :] - Pi[None, :, None, :])


def objective_matrix(theory: Theory, quad) -> np.ndarray:
    """``F`` with ``C = sum(F * M)`` for observables ``quad = (i, j, k, l)``."""
    D = effect_differences(theory)
    i, j, k, l = (q % theory.n for q in quad)
    return (np.outer(D[k], D[i]) + np.outer(D[k], D[j])
            + np.outer(D[l], D[i]) - np.outer(D[l], D[j]))


# ---------------------------------------------------------------------------
# fixed observables


@dataclass
class OptimumReport:
    n: int
    best_value: float
    signed_value: float
    quadruple: tuple
    state: BipartiteState | None
    is_max_entangled: bool | None = None
    wall_time: float = 0.0
    group_element: int | None = None
    sense: str | None = None
    lp_count: int = 0

    def to_json(self) -> dict:
        out = {"value": self.best_value, "signed_value": self.signed_value,
               "quadruple": list(self.quadruple)}
        if self.state is not None:
            out["matrix"] = self.state.map.tolist()
        if self.group_element is not None:
            out["group_element"] = self.group_element
        return out


def fixed_obs_program(theory: Theory, quad, sense: str = "max") -> LinearProgram:
    """LP over the entries of ``M`` (row-major) for a fixed quadruple."""
    rays = effect_rays(theory)
    A = -np.einsum("fj,ei->feji", rays, rays).reshape(-1, 9)
    E = np.zeros((1, 9))
    E[0, 8] = 1.0
    return LinearProgram(objective_matrix(theory, quad).ravel(), A, np.zeros(A.shape[0]),
                         E, np.ones(1), np.zeros(9, dtype=int), sense)


def max_chsh_fixed_obs(theory: Theory, i: int, j: int, k: int, l: int,
                       sense: str = "max", tol: float = DEFAULT_TOL):
    """Exact optimum of ``C`` over the max tensor product with fixed observables.

    Returns
    -------
    (value, state)
        ``state`` is validated against ``tol``.
    """
    quad = tuple(int(q) % theory.n for q in (i, j, k, l))
    sol = solve(fixed_obs_program(theory, quad, sense))
    if sol.status is not Status.OPTIMAL:
        raise RuntimeError(f"fixed-observable LP ended with status {sol.status}")
    M = sol.primal.reshape(3, 3)
    state = state_from_map(theory, M, tol=max(tol, 1e-9), label=f"LP{quad}")
    return float(sol.value), state


def _quadruples(n: int, reduce: bool):
    if reduce:
        return [(i, j, k, 0) for k in range((n - 1) // 2 + 1) for i in range(n) for j in range(n)]
    return [(i, j, k, l) for i in range(n) for j in range(n) for k in range(n) for l in range(n)]


def _better(cand, best):
    """Larger ``|C|``; within ``TIE_TOL`` the lexicographically smaller key wins."""
    if best is None:
        return True
    if cand[0] > best[0] + TIE_TOL:
        return True
    if cand[0] < best[0] - TIE_TOL:
        return False
    return cand[1] < best[1]


def global_optimum(theory: Theory, reduce: bool = True, threads: int | None = None,
                   cap: int = LP_CAP, tol: float = DEFAULT_TOL,
                   senses=("max", "min")) -> OptimumReport:
    """Largest ``|C|`` over all quadruples of pure-effect observables and all states.

    With ``reduce`` Bob's second setting is fixed to index 0 and his first
    to ``0..(n-1)//2``; the rotation and reflection symmetries of the
    polygon map every quadruple into this set.
    """
    n = theory.n
    if n > cap:
        raise CapExceeded(f"n = {n} exceeds the LP cap {cap}")
    t0 = time.perf_counter()
    quads = _quadruples(n, reduce)
    order = {"max": 0, "min": 1}
    tasks = [(q, s) for q in quads for s in senses]

    def run(task):
        q, s = task
        sol = solve(fixed_obs_program(theory, q, s))
        return abs(sol.value), (q, order[s]), sol

    best = None
    workers = worker_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, tasks, chunksize=max(1, len(tasks) // (8 * workers))))
    else:
        results = [run(t) for t in tasks]
    for res in results:
        if _better(res[:2], best and best[:2]):
            best = res
    value, (quad, s_idx), sol = best
    state = state_from_map(theory, sol.primal.reshape(3, 3), tol=max(tol, 1e-9), label=f"LP{quad}")
    me = me_optimum(theory)
    return OptimumReport(n, float(value), float(sol.value), quad, state,
                         abs(value - me.best_value) <= 1e-7, time.perf_counter() - t0,
                         sense=("max", "min")[s_idx], lp_count=len(tasks))


# ---------------------------------------------------------------------------
# maximally entangled states


def me_optimum(theory: Theory, states=None) -> OptimumReport:
    """Largest ``|C|`` over maximally entangled states and all quadruples.

    ``states`` defaults to one state per polygon symmetry.
    """
    t0 = time.perf_counter()
    if states is None:
        states = enumerate_max_entangled(theory)
    best = None
    for g, st in enumerate(states):
        grid = chsh_grid(theory, st.map)
        flat = np.abs(grid).ravel()
        top = flat.max()
        idx = int(np.flatnonzero(flat >= top - TIE_TOL)[0])
        quad = tuple(int(v) for v in np.unravel_index(idx, grid.shape))
        cand = (float(top), (g, quad))
        if _better(cand, best and best[:2]):
            best = (cand[0], cand[1], float(grid[quad]), st)
    value, (g, quad), signed, st = best
    return OptimumReport(theory.n, value, signed, quad, st, True,
                         time.perf_counter() - t0, group_element=g)


@dataclass
class TheoremReport:
    n: int
    passed: bool
    global_value: float
    me_value: float
    global_report: OptimumReport
    me_report: OptimumReport
    closed_form: float | None = None

    def to_json(self) -> dict:
        return {"n": self.n, "global": self.global_report.to_json(),
                "me": self.me_report.to_json(), "theorem_pass": self.passed}


def tampered_states(theory: Theory, weight: float = 1e-3) -> list[BipartiteState]:
    """ME states mixed with the maximally mixed product state.

    Dropping group elements is not a usable negative control: every element
    reaches the ME optimum once Alice's observables are relabelled.
    """
    mixed = np.zeros((3, 3))
    mixed[2, 2] = 1.0
    return [state_from_map(theory, (1 - weight) * s.map + weight * mixed, label=f"{s.label}~")
            for s in enumerate_max_entangled(theory)]


def verify_theorem(theory: Theory, tamper: bool = False, reduce: bool = True,
                   threads: int | None = None, cap: int = LP_CAP, tol: float = 1e-6,
                   lp_tol: float = DEFAULT_TOL) -> TheoremReport:
    """Compare the LP global optimum with the ME optimum.

    ``tamper`` replaces the ME states by slightly depolarised copies (see
    :func:`tampered_states`); it exists as a negative control.  ``tol`` is
    the agreement tolerance, ``lp_tol`` is handed to the LP layer.
    """
    glob = global_optimum(theory, reduce=reduce, threads=threads, cap=cap, tol=lp_tol)
    states = tampered_states(theory) if tamper else enumerate_max_entangled(theory)
    me = me_optimum(theory, states)
    ok = abs(glob.best_value - me.best_value) <= tol
    closed = None
    if theory.n % 2 and theory.n >= 5:
        closed = h_opt(theory.n)[2]
        ok = ok and abs(glob.best_value - closed) <= tol
    return TheoremReport(theory.n, bool(ok), glob.best_value, me.best_value, glob, me, closed)


# ---------------------------------------------------------------------------
# certificate programs (odd n)


def edge_normals(n: int) -> tuple[float, dict]:
    """Anchor angle and the two base edge normals in the rotated frame.

    The base normals belong to the two edges meeting at the vertex at the
    anchor; rotating one by ``2 * alpha * theta`` moves it ``alpha`` edges on.
    """
    th = build_theory(n)
    t, r = th.theta, th.r
    if n % 8 in (1, 7):
        return 0.0, {1: np.array([1.0, np.tan(t), -r]), 2: np.array([1.0, -np.tan(t), -r])}
    return np.pi, {1: np.array([-1.0, np.tan(t), -r]), 2: np.array([-1.0, -np.tan(t), -r])}


def constraint_row(n: int, normal, effect, me_map) -> np.ndarray:
    """Linear form in ``(a, b, c, d, e)`` of ``<normal, X me_map effect> <= -normal[2]``.

    ``X`` is the symmetric matrix with first row ``(a, b, c)``, second row
    ``(b, d, e)`` and last entry 1.  The returned row is normalised by the
    last component of ``me_map @ effect`` so the right-hand side is
    ``-normal[2]``.
    """
    v = np.asarray(me_map, dtype=float) @ np.asarray(effect, dtype=float)
    l1, l2, l3 = np.asarray(normal, dtype=float)
    co = np.array([l1 * v[0], l1 * v[1] + l2 * v[0], l1 * v[2] + l3 * v[0],
                   l2 * v[1], l2 * v[2] + l3 * v[1]])
    return co / v[2]


def frame_effect(n: int, angle: float) -> np.ndarray:
    th = build_theory(n)
    return th.R * np.array([th.r * np.cos(angle), th.r * np.sin(angle), 1.0])


@dataclass(frozen=True)
class CertificateSpec:
    n: int
    residue: int
    kind: str  # "theorem" or "delta"
    offsets: tuple  # ((normal index, alpha), ...)
    sense: str
    signs: tuple  # signs of (a, b, c, d, e)
    me_map: np.ndarray = field(repr=False)
    expected: np.ndarray = field(repr=False)

    @property
    def normals(self) -> dict:
        return edge_normals(self.n)[1]

    def rows(self) -> np.ndarray:
        return np.array([constraint_row(self.n, *self.constraint(j, a), self.me_map)
                         for j, a in self.offsets])

    def constraint(self, j: int, alpha: int):
        """Normal and effect for the row with normal ``j`` moved by ``alpha`` edges."""
        anchor, base = edge_normals(self.n)
        t = np.pi / self.n
        return rotation(2 * alpha * t) @ base[j], frame_effect(self.n, anchor + 2 * alpha * t)

    @property
    def rhs(self) -> np.ndarray:
        return np.full(len(self.offsets), build_theory(self.n).r)


def _frame_map(a, b, d):
    return np.array([[a, b, 0.0], [b, d, 0.0], [0.0, 0.0, 1.0]])


def theorem_spec(n: int) -> CertificateSpec:
    """Program whose optimum is the CHSH value of the optimal ME state."""
    if n % 2 == 0 or n < 5:
        raise WrongResidue(f"certificates exist for odd n >= 5, got {n}")
    res = n % 8
    if res == 1:
        m = (n - 1) // 8
        offs, sense, sg = [(1, 0), (2, 0), (2, 2 * m), (1, n - 2 * m)], "max", (1, 1, 1, -1)
    elif res == 7:
        m = (n - 7) // 8
        offs, sense, sg = [(1, 0), (2, 0), (1, 3 * m + 2), (2, -m - 3)], "max", (1, 1, -1, -1)
    elif n == 5:
        offs, sense, sg = [(1, 0), (2, 0), (2, 2), (2, -1)], "min", (-1, -1, -1, 1)
    elif res == 3:
        m = (n - 3) // 8
        offs, sense, sg = [(1, 2 * m + 1), (2, 2 * m + 1), (1, 0), (1, -3 * m - 1)], "min", (-1, -1, 1, 1)
    else:
        m = (n - 5) // 8
        offs, sense, sg = [(1, 2 * m + 1), (2, 2 * m + 1), (1, 0), (2, -3 * m - 2)], "min", (-1, -1, -1, 1)
    p = me_params(n)
    return CertificateSpec(n, res, "theorem", tuple(offs), sense, sg + (0,),
                           _frame_map(p.a, p.b, p.d), p.vector)


def delta_spec(n: int) -> CertificateSpec:
    """Program bounding the CHSH value of opposite sign.

    Its optimum sits at the reflected ME map with entries
    ``(cos 2K theta, -sin 2K theta, 0, -cos 2K theta, 0)``.
    """
    if n % 2 == 0 or n < 5:
        raise WrongResidue(f"certificates exist for odd n >= 5, got {n}")
    res = n % 8
    if res == 1:
        i, j, al = 2, 2, ((n + 1) // 2, (n + 3) // 4, (n - 1) // 8)
    elif res == 7:
        i, j, al = 1, 1, ((-3 * n - 3) // 8, (n + 1) // 4, (n - 7) // 8)
    elif n == 5:
        i, j, al = 1, 1, (-1, 1, 2)
    elif res == 3:
        i, j, al = 2, 2, (-(n + 5) // 8, (n - 3) // 8, (3 * n - 1) // 8)
    else:
        i, j, al = 1, 1, (-(n + 11) // 8, (n + 3) // 8, (n + 3) // 4)
    offs = ((1, al[0]), (2, al[0]), (i, al[1]), (j, al[2]))
    ang = 2 * odd_case_data(n).K_n * np.pi / n
    x = np.array([np.cos(ang), -np.sin(ang), 0.0, -np.cos(ang), 0.0])
    c_sign = 1 if res in (1, 3) else -1
    signs = (int(np.sign(x[0])), int(np.sign(x[1])), c_sign, int(np.sign(x[3])), 0)
    sense = "min" if res in (1, 7) else "max"
    return CertificateSpec(n, res, "delta", offs, sense, signs, _frame_map(x[0], x[1], x[3]), x)


def build_certificate(n: int, kind: str = "theorem"):
    """The certificate LP over ``(a, b, c, d, e)`` and its expected optimal point."""
    spec = theorem_spec(n) if kind == "theorem" else delta_spec(n)
    prog = LinearProgram(chsh_direction(n), spec.rows(), spec.rhs, sign=np.array(spec.signs),
                         sense=spec.sense)
    return prog, spec.expected.copy()


def to_nonnegative(prog: LinearProgram, x=None, y=None):
    """Rewrite as ``max c.z, A z <= b, z >= 0`` by flipping and splitting variables.

    Returns ``(A, b, c, z, y)``; ``z`` and ``y`` are the transformed primal
    and dual points when given (``y`` in the stated-sense convention of
    :func:`polygon_chsh.lp.solve`).
    """
    cols, obj, zs = [], [], []
    flip = 1.0 if prog.sense == "max" else -1.0
    for j, s in enumerate(prog.sign):
        parts = [1.0, -1.0] if s == 0 else [float(s)]
        for p in parts:
            cols.append(p * prog.A[:, j])
            obj.append(flip * p * prog.objective[j])
            if x is not None:
                zs.append(max(p * x[j], 0.0) if s == 0 else p * x[j])
    A = np.column_stack(cols)
    z = np.array(zs) if x is not None else None
    yy = None if y is None else flip * np.asarray(y, dtype=float)
    return A, prog.b.copy(), np.array(obj), z, yy


@dataclass
class ProgramCheck:
    kind: str
    passed: bool
    lp_value: float
    expected_value: float
    chsh_value: float
    dual: np.ndarray
    residuals: dict
    failures: list

    def to_json(self) -> dict:
        return {"kind": self.kind, "pass": self.passed, "lp_value": self.lp_value,
                "expected_value": self.expected_value, "chsh_value": self.chsh_value,
                "dual": self.dual.tolist(), "residuals": self.residuals, "failures": self.failures}


def check_program(n: int, prog: LinearProgram, expected, dual, tol: float = 1e-8,
                  kind: str = "theorem", lp_value=float("nan")) -> ProgramCheck:
    """Certificate check of ``expected`` with multipliers ``dual``."""
    A, b, c, z, y = to_nonnegative(prog, expected, dual)
    verdict = check_complementary_slackness(A, b, c, z, y, tol)
    res = dict(verdict.residuals)
    res["value_gap"] = abs(lp_value - prog.objective @ expected) if np.isfinite(lp_value) else 0.0
    res["dual_min"] = float(y.min())
    failures = list(verdict.failures)
    if res["value_gap"] > tol:
        failures.append(f"LP value differs from expected point by {res['value_gap']:.3g}")
    scale, offset = symmetric_offset(n)
    return ProgramCheck(kind, not failures, float(lp_value), float(prog.objective @ expected),
                        float(scale * prog.objective @ expected + offset), y, res, failures)


def closed_form_dual(n: int) -> np.ndarray:
    """Hand-derived multipliers for the ``n = 1 (mod 8)`` theorem program."""
    if n % 8 != 1:
        raise WrongResidue("closed-form multipliers are available for n = 1 (mod 8)")
    th = build_theory(n)
    t, r = th.theta, th.r
    m = (n - 1) // 8
    s, c = np.sin, np.cos
    F = 2 * s(2 * m * t) / (r * r * (s(2 * m * t) + s(6 * m * t)))
    y3 = F * (s(2 * m * t) / s((4 * m - 1) * t) - s(6 * m * t) * c(4 * m * t) / s(t))
    y4 = F * (s(2 * m * t) / s((4 * m - 1) * t) + s(2 * m * t) * c(4 * m * t) / s(t))
    y1 = 2 * c(2 * m * t) - (r * r * s((2 * m - 1) * t) * y3 + r * r * s((2 * m + 1) * t) * y4) / (2 * s(2 * m * t))
    return np.array([y1, y1, y3, y4])


def closed_form_dual_check(n: int, tol: float = 1e-8) -> dict:
    """Positivity of the hand-derived multipliers and their tight dual columns.

    Only the ``a``, ``b`` and ``d`` columns are claimed tight; the ``e``
    column is reported separately (it is not satisfied).
    """
    prog, x = build_certificate(n)
    y = closed_form_dual(n)
    gap = prog.A.T @ y - prog.objective
    return {"y": y.tolist(), "positive": bool(np.all(y > 0)),
            "tight_columns": bool(np.all(np.abs(gap[[0, 1, 3]]) <= tol)),
            "column_gaps": gap.tolist(),
            "fully_dual_feasible": bool(gap[2] >= -tol and abs(gap[4]) <= tol),
            "objective_match": bool(abs(prog.b @ y - prog.objective @ x) <= tol)}


@dataclass
class CertificateReport:
    n: int
    passed: bool
    theorem: ProgramCheck
    delta: ProgramCheck
    h_value: float
    dominance_margin: float
    closed_form: dict | None = None

    def to_json(self) -> dict:
        out = {"n": self.n, "pass": self.passed, "H": self.h_value,
               "dominance_margin": self.dominance_margin,
               "theorem": self.theorem.to_json(), "delta": self.delta.to_json(),
               "residuals": {**{f"theorem.{k}": v for k, v in self.theorem.residuals.items()},
                             **{f"delta.{k}": v for k, v in self.delta.residuals.items()}}}
        if self.closed_form is not None:
            out["closed_form_dual"] = self.closed_form
        return out


def _solve_and_check(n, prog, x, kind, tol):
    sol = solve(prog)
    if sol.status is not Status.OPTIMAL:
        y = np.full(prog.A.shape[0], np.nan)
        return ProgramCheck(kind, False, float("nan"), float(prog.objective @ x), float("nan"), y,
                            {}, [f"LP status {sol.status.value}"])
    return check_program(n, prog, x, sol.dual, tol, kind, sol.value)


def certify(n: int, tol: float = 1e-8) -> CertificateReport:
    """Verify both certificate programs for odd ``n``.

    The theorem program must be optimal at the ME parameters, the opposite
    program at the reflected ME parameters, and the opposite-sign CHSH value
    must stay strictly below ``H``.
    """
    prog, x = build_certificate(n, "theorem")
    thm = _solve_and_check(n, prog, x, "theorem", tol)
    dprog, dx = build_certificate(n, "delta")
    dlt = _solve_and_check(n, dprog, dx, "delta", tol)
    H = h_opt(n)[2]
    margin = H - abs(dlt.chsh_value) if np.isfinite(dlt.chsh_value) else float("-inf")
    if margin <= 1e-4:
        dlt.failures.append(f"opposite-sign value not dominated (margin {margin:.3g})")
        dlt.passed = False
    if abs(abs(thm.chsh_value) - H) > 1e-8:
        thm.failures.append("theorem program value differs from H")
        thm.passed = False
    closed = closed_form_dual_check(n, tol) if n % 8 == 1 else None
    ok = thm.passed and dlt.passed and (closed is None or (closed["positive"] and closed["tight_columns"]))
    return CertificateReport(n, bool(ok), thm, dlt, H, float(margin), closed)


def sensitivity_check(n: int, i: int, j: int, delta: float = 1e-3, kind: str = "theorem",
                      tol: float = 1e-8) -> ProgramCheck:
    """Re-check the unperturbed certificate against a program with one entry moved."""
    prog, x = build_certificate(n, kind)
    sol = solve(prog)
    A = prog.A.copy()
    A[i, j] += delta
    bent = LinearProgram(prog.objective, A, prog.b, sign=prog.sign, sense=prog.sense)
    return check_program(n, bent, x, sol.dual, tol, kind)


# ---------------------------------------------------------------------------
# sweeps and the triangle


def separable_decomposition(theory: Theory, M, tol: float = 1e-8):
    """Weights over products of pure states reproducing ``M`` (triangle only).

    Returns ``(weights, residual)``; ``weights`` is ``None`` when no
    decomposition exists.
    """
    if theory.n != 3:
        raise ValueError("vertex decomposition is implemented for the triangle")
    S = theory.pure_states
    cols = [np.outer(S[b], S[a]).ravel() for a in range(3) for b in range(3)]
    E = np.column_stack(cols)
    sol = solve(LinearProgram(np.zeros(9), E=E, d=np.asarray(M, dtype=float).ravel()), check=False)
    if sol.status is not Status.OPTIMAL:
        return None, float("inf")
    w = sol.primal
    return w, float(np.max(np.abs(E @ w - np.asarray(M, dtype=float).ravel())))


def sweep(parity: str, n_max: int, lp: bool = True, lp_cap: int = LP_CAP,
          threads: int | None = None, n_min: int = 3):
    """Per-``n`` best CHSH value with the method used.

    Odd ``n`` and even ``n = 2, 6 (mod 8)`` use closed forms.  Other even
    ``n`` use the LP when ``lp`` is set and ``n <= lp_cap``; otherwise they
    are skipped.
    """
    from .analytic import closed_form_optimum

    if parity not in ("even", "odd", "both"):
        raise ValueError("parity must be even, odd or both")
    rows = []
    for n in range(max(3, n_min), n_max + 1):
        if parity == "even" and n % 2 or parity == "odd" and not n % 2:
            continue
        value, method = closed_form_optimum(n)
        if method == "LP":
            if not lp or n > lp_cap:
                continue
            value = global_optimum(build_theory(n), threads=threads, cap=lp_cap).best_value
        rows.append((n, float(value), method))
    return rows

"""Small dense simplex solver with Bland's anti-cycling rule.

The solver is deterministic: entering variables are chosen by lowest index
among improving columns, and ratio-test ties go to the basic variable with
the lowest index.  Each iteration works from the original data and the
current basis (a revised simplex step), so degenerate pivots do not build up
round-off.  Programs with many more rows than columns are solved
through their dual, which keeps the tableau small for the tall programs
produced by cone-membership constraints.

Tableau dump format
-------------------
``dump_program`` writes a plain-text description that other tools can read::

    sense max
    vars 3
    sign + - 0
    objective c1 c2 c3
    le a11 a12 a13 <= b1
    eq e11 e12 e13 == d1

``sign`` uses ``+`` for x >= 0, ``-`` for x <= 0 and ``0`` for free.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

PIVOT_TOL = 1e-9
OPT_TOL = 1e-10
FEAS_TOL = 1e-9
DRIVE_TOL = 1e-7
BREAKDOWN_TOL = 1e-6


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class NumericBreakdown(RuntimeError):
    """Raised when a reported optimum fails its own residual checks."""


@dataclass
class LinearProgram:
    """``sense`` c.x subject to A x <= b, E x = d and per-variable signs.

    ``sign[j]`` is +1 (x_j >= 0), -1 (x_j <= 0) or 0 (free).
    """

    objective: np.ndarray
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    E: np.ndarray | None = None
    d: np.ndarray | None = None
    sign: np.ndarray | None = None
    sense: str = "max"

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        nv = c.size
        self.objective = c
        self.A = np.zeros((0, nv)) if self.A is None else np.asarray(self.A, dtype=float).reshape(-1, nv)
        self.b = np.zeros(0) if self.b is None else np.asarray(self.b, dtype=float).ravel()
        self.E = np.zeros((0, nv)) if self.E is None else np.asarray(self.E, dtype=float).reshape(-1, nv)
        self.d = np.zeros(0) if self.d is None else np.asarray(self.d, dtype=float).ravel()
        self.sign = np.ones(nv, dtype=int) if self.sign is None else np.asarray(self.sign, dtype=int).ravel()
        if self.sense not in ("max", "min"):
            raise ValueError("sense must be 'max' or 'min'")
        if self.A.shape[0] != self.b.size or self.E.shape[0] != self.d.size or self.sign.size != nv:
            raise ValueError("inconsistent program dimensions")
        if not set(np.unique(self.sign)).issubset({-1, 0, 1}):
            raise ValueError("sign entries must be -1, 0 or +1")
        for arr in (c, self.A, self.b, self.E, self.d):
            if not np.all(np.isfinite(arr)):
                raise ValueError("program data must be finite")

    @property
    def n_vars(self) -> int:
        return self.objective.size


@dataclass
class LpSolution:
    status: Status
    value: float = float("nan")
    primal: np.ndarray | None = None
    dual: np.ndarray | None = None
    dual_eq: np.ndarray | None = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


# ---------------------------------------------------------------------------
# core: max c.x  s.t.  A x <= b, x >= 0


@dataclass
class _Core:
    status: Status
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    pivots: int = 0


def _run_phase(full, b, basis, cost, allowed, max_iter):
    """Bland-rule iterations for ``max cost.z, full z = b, z >= 0``.

    The basic solution, multipliers and entering column are recomputed from
    the original data at every step, so round-off cannot accumulate across
    degenerate pivots.  Returns (status, pivots, xb).
    """
    pivots = 0
    scale = max(1.0, float(np.abs(cost).max(initial=0.0)))
    while True:
        B = full[:, basis]
        try:
            xb = np.linalg.solve(B, b)
            y = np.linalg.solve(B.T, cost[basis])
        except np.linalg.LinAlgError as exc:
            raise NumericBreakdown("singular basis") from exc
        red = cost - y @ full
        red[basis] = 0.0
        cand = np.nonzero((red > OPT_TOL * scale) & allowed)[0]
        if cand.size == 0:
            return Status.OPTIMAL, pivots, xb
        if pivots >= max_iter:
            raise NumericBreakdown("simplex iteration limit reached")
        col = int(cand[0])
        d = np.linalg.solve(B, full[:, col])
        pos = np.nonzero(d > PIVOT_TOL)[0]
        if pos.size == 0:
            return Status.UNBOUNDED, pivots, xb
        ratios = np.maximum(xb[pos], 0.0) / d[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        basis[row] = col
        pivots += 1


def _simplex_core(A: np.ndarray, b: np.ndarray, c: np.ndarray, phase1_only: bool = False) -> _Core:
    """Two-phase simplex for ``max c.x, A x <= b, x >= 0``."""
    m, n = A.shape
    sgn = np.where(b < 0, -1.0, 1.0)
    art_rows = np.nonzero(b < 0)[0]
    k = art_rows.size
    ncol = n + m + k
    full = np.zeros((m, ncol))
    full[:, :n] = A * sgn[:, None]
    full[:, n:n + m] = np.diag(sgn)
    full[art_rows, n + m + np.arange(k)] = 1.0
    rhs = b * sgn
    basis = np.arange(n, n + m)
    basis[art_rows] = n + m + np.arange(k)
    max_iter = 50 * (m + ncol) + 1000
    pivots = 0
    allowed = np.ones(ncol, dtype=bool)
    if k:
        cost1 = np.zeros(ncol)
        cost1[n + m:] = -1.0
        _, p, xb = _run_phase(full, rhs, basis, cost1, allowed, max_iter)
        pivots += p
        if -cost1[basis] @ xb > FEAS_TOL * max(1.0, np.abs(b).max()):
            return _Core(Status.INFEASIBLE, pivots=pivots)
        allowed[n + m:] = False
        # swap zero-level artificials for real columns; rows with nothing
        # left to pivot on are redundant and keep their artificial
        for r in range(m):
            if basis[r] >= n + m:
                e = np.zeros(m)
                e[r] = 1.0
                row = np.abs(np.linalg.solve(full[:, basis].T, e) @ full[:, :n + m])
                row[basis[basis < n + m]] = 0.0
                j = int(np.argmax(row))
                if row[j] > DRIVE_TOL:
                    basis[r] = j
                    pivots += 1
    if phase1_only:
        return _Core(Status.OPTIMAL, pivots=pivots)
    cost = np.zeros(ncol)
    cost[:n] = c
    st, p, xb = _run_phase(full, rhs, basis, cost, allowed, max_iter)
    pivots += p
    if st is Status.UNBOUNDED:
        return _Core(st, pivots=pivots)
    y = sgn * np.linalg.solve(full[:, basis].T, cost[basis])
    xfull = np.zeros(ncol)
    xfull[basis] = xb
    return _Core(Status.OPTIMAL, xfull[:n], y, pivots)


def _solve_canonical(A, b, c) -> _Core:
    """max c.x, A x <= b, x >= 0; dualises tall programs."""
    m, n = A.shape
    if m <= 2 * n + 4:
        return _simplex_core(A, b, c)
    dual = _simplex_core(-A.T, -c, -b)
    if dual.status is Status.OPTIMAL:
        # the multipliers of the dual are the primal solution
        return _Core(Status.OPTIMAL, dual.y, dual.x, dual.pivots)
    if dual.status is Status.UNBOUNDED:
        return _Core(Status.INFEASIBLE, pivots=dual.pivots)
    feas = _simplex_core(A, b, np.zeros(n), phase1_only=True)
    status = Status.INFEASIBLE if feas.status is Status.INFEASIBLE else Status.UNBOUNDED
    return _Core(status, pivots=dual.pivots + feas.pivots)


def _to_canonical(prog: LinearProgram):
    """Map to max c'.z, A' z <= b', z >= 0 and return the back-transform."""
    cols = []
    for j, s in enumerate(prog.sign):
        if s == 1:
            cols.append((j, 1.0))
        elif s == -1:
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    S = np.zeros((prog.n_vars, len(cols)))
    for k, (j, f) in enumerate(cols):
        S[j, k] = f
    c = prog.objective if prog.sense == "max" else -prog.objective
    A = np.vstack([prog.A, prog.E, -prog.E]) @ S
    b = np.concatenate([prog.b, prog.d, -prog.d])
    return A, b, c @ S, S


def solve(prog: LinearProgram, check: bool = True) -> LpSolution:
    """Solve ``prog`` with the deterministic dense simplex method.

    Returns an :class:`LpSolution` whose ``dual`` holds the multipliers of the
    ``A x <= b`` rows and ``dual_eq`` those of ``E x = d`` (both in the sign
    convention of the stated ``sense``: for ``max`` the row multipliers are
    nonnegative, for ``min`` they are nonpositive).

    Raises
    ------
    NumericBreakdown
        If the optimum violates feasibility or strong duality by more than
        ``1e-6`` after refinement from the final basis.
    """
    A, b, c, S = _to_canonical(prog)
    core = _solve_canonical(A, b, c)
    if core.status is not Status.OPTIMAL:
        return LpSolution(core.status, pivots=core.pivots)
    x = S @ core.x
    mi, me = prog.A.shape[0], prog.E.shape[0]
    y = core.y[:mi]
    lam = core.y[mi:mi + me] - core.y[mi + me:]
    flip = 1.0 if prog.sense == "max" else -1.0
    sol = LpSolution(Status.OPTIMAL, float(prog.objective @ x), x, flip * y, flip * lam, core.pivots)
    if check:
        res = residuals(prog, sol)
        if max(res.values()) > BREAKDOWN_TOL:
            raise NumericBreakdown(f"residuals too large: {res}")
    return sol


def residuals(prog: LinearProgram, sol: LpSolution) -> dict:
    """Primal infeasibility, sign violation and duality gap of ``sol``."""
    x = sol.primal
    r = {}
    r["rows"] = float(max(0.0, np.max(prog.A @ x - prog.b))) if prog.b.size else 0.0
    r["eq"] = float(np.max(np.abs(prog.E @ x - prog.d))) if prog.d.size else 0.0
    r["sign"] = float(max(0.0, np.max(-prog.sign * x))) if x.size else 0.0
    dual_obj = prog.b @ sol.dual + prog.d @ sol.dual_eq
    r["gap"] = float(abs(prog.objective @ x - dual_obj))
    return r


# ---------------------------------------------------------------------------
# certificates


@dataclass
class CertificateVerdict:
    passed: bool
    residuals: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)


def check_complementary_slackness(A, b, c, x, y, tol: float = 1e-9) -> CertificateVerdict:
    """Check an optimality certificate for ``max c.x, A x <= b, x >= 0``.

    The dual is ``min b.y, A^T y >= c, y >= 0``.  The verdict lists every
    violated condition by name: primal feasibility, dual feasibility, and the
    two families of complementary slackness products.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slack = b - A @ x
    reduced = A.T @ y - c
    checks = {
        "primal_rows": float(max(0.0, -slack.min())) if slack.size else 0.0,
        "primal_sign": float(max(0.0, -x.min())) if x.size else 0.0,
        "dual_sign": float(max(0.0, -y.min())) if y.size else 0.0,
        "dual_rows": float(max(0.0, -reduced.min())) if reduced.size else 0.0,
        "slack_primal": float(np.max(np.abs(x * reduced))) if x.size else 0.0,
        "slack_dual": float(np.max(np.abs(y * slack))) if y.size else 0.0,
    }
    failures = []
    for name, val in checks.items():
        if val > tol:
            failures.append(name)
    for i, (yi, si) in enumerate(zip(y, slack)):
        if abs(yi * si) > tol:
            failures.append(f"row {i}: y={yi:.3g} with slack {si:.3g}")
    for j, (xj, rj) in enumerate(zip(x, reduced)):
        if abs(xj * rj) > tol:
            failures.append(f"column {j}: x={xj:.3g} with reduced cost {rj:.3g}")
    return CertificateVerdict(not failures, checks, failures)


# ---------------------------------------------------------------------------
# text dump


def dump_program(prog: LinearProgram, digits: int = 17) -> str:
    fmt = f"{{:.{digits}g}}"
    sym = {1: "+", -1: "-", 0: "0"}
    lines = [f"sense {prog.sense}", f"vars {prog.n_vars}",
             "sign " + " ".join(sym[int(s)] for s in prog.sign),
             "objective " + " ".join(fmt.format(v) for v in prog.objective)]
    for row, rhs in zip(prog.A, prog.b):
        lines.append("le " + " ".join(fmt.format(v) for v in row) + " <= " + fmt.format(rhs))
    for row, rhs in zip(prog.E, prog.d):
        lines.append("eq " + " ".join(fmt.format(v) for v in row) + " == " + fmt.format(rhs))
    return "\n".join(lines) + "\n"


def load_program(text: str) -> LinearProgram:
    """Inverse of :func:`dump_program`."""
    sense, sign, obj = "max", None, None
    A, b, E, d = [], [], [], []
    inv = {"+": 1, "-": -1, "0": 0}
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        key, rest = parts[0], parts[1:]
        if key == "sense":
            sense = rest[0]
        elif key == "sign":
            sign = [inv[s] for s in rest]
        elif key == "objective":
            obj = [float(v) for v in rest]
        elif key == "le":
            A.append([float(v) for v in rest[:-2]])
            b.append(float(rest[-1]))
        elif key == "eq":
            E.append([float(v) for v in rest[:-2]])
            d.append(float(rest[-1]))
    nv = len(obj)
    return LinearProgram(np.array(obj), np.array(A).reshape(-1, nv), np.array(b),
                         np.array(E).reshape(-1, nv), np.array(d), np.array(sign), sense)

import numpy as np
import pytest
from scipy.optimize import linprog

from conftest import cached_global, cached_verify
from polygon_chsh.analytic import WrongResidue, even_optimum, h_opt
from polygon_chsh.bipartite import enumerate_max_entangled, in_max_tensor
from polygon_chsh.chsh import ChshSetting, chsh_value, prob_table
from polygon_chsh.lp import Status, solve
from polygon_chsh.search import (
    CapExceeded,
    build_certificate,
    certify,
    chsh_grid,
    closed_form_dual_check,
    constraint_row,
    delta_spec,
    effect_rays,
    global_optimum,
    max_chsh_fixed_obs,
    me_optimum,
    objective_matrix,
    sensitivity_check,
    sweep,
    theorem_spec,
    to_nonnegative,
    verify_theorem,
    worker_count,
)
from polygon_chsh.theory import binary_observable, build_theory

s, c = np.sin, np.cos


# ---------------------------------------------------------------------------
# fixed observables and sweeps


def test_triangle_vertex_quadruple_minimum():
    val, state = max_chsh_fixed_obs(build_theory(3), 1, 0, 2, 0, sense="min")
    assert val == pytest.approx(-2.0, abs=1e-9)
    assert state.validated


def test_pentagon_minimum_dominates():
    th = build_theory(5)
    hi, _ = max_chsh_fixed_obs(th, 1, 0, 1, 0, "max")
    lo, st = max_chsh_fixed_obs(th, 1, 0, 1, 0, "min")
    assert abs(lo) > abs(hi)
    assert abs(lo) == pytest.approx(h_opt(5)[2], abs=1e-9)
    # the LP vertex reproduces its own value
    setting = ChshSetting(st, *(binary_observable(th, q) for q in (1, 0, 1, 0)))
    assert chsh_value(prob_table(setting)) == pytest.approx(lo, abs=1e-8)


def test_hexagon_quadruple_reaches_even_bound():
    val, _ = max_chsh_fixed_obs(build_theory(6), 0, 1, 1, 0, "max")
    assert val == pytest.approx(3.0, abs=1e-9)


def test_objective_matrix_matches_grid():
    th = build_theory(7)
    M = enumerate_max_entangled(th)[3].map
    grid = chsh_grid(th, M)
    for quad in [(0, 1, 2, 3), (6, 6, 0, 4), (2, 5, 5, 1)]:
        assert np.sum(objective_matrix(th, quad) * M) == pytest.approx(grid[quad])


@pytest.mark.parametrize("n", range(3, 10))
def test_effect_rays_suffice_for_positivity(n):
    th = build_theory(n)
    assert effect_rays(th).shape[0] == n
    # every stored effect is a nonnegative combination of the rays
    R = effect_rays(th)
    for e in th.pure_effects:
        res = linprog(np.zeros(n), A_eq=R.T, b_eq=e, bounds=[(0, None)] * n, method="highs")
        assert res.status == 0


@pytest.mark.parametrize("n,expected", [(3, 2.0), (4, 4.0), (5, h_opt(5)[2]), (6, 3.0)])
def test_global_optimum_small(n, expected):
    rep = cached_global(n)
    assert rep.best_value == pytest.approx(expected, abs=1e-6)
    assert rep.is_max_entangled
    assert in_max_tensor(build_theory(n), rep.state.map)
    setting = ChshSetting(rep.state, *(binary_observable(rep.state.theory, q) for q in rep.quadruple))
    assert chsh_value(prob_table(setting)) == pytest.approx(rep.signed_value, abs=1e-8)


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_symmetry_reduction_is_sound(n):
    assert cached_global(n, True).best_value == pytest.approx(cached_global(n, False).best_value, abs=1e-8)


@pytest.mark.parametrize("n", [6, 10, 14])
def test_even_closed_form_matches_lp(n):
    assert cached_global(n).best_value == pytest.approx(even_optimum(n)[1], abs=1e-6)


def test_cap_and_threads(monkeypatch):
    with pytest.raises(CapExceeded):
        global_optimum(build_theory(17))
    monkeypatch.setenv("POLYGON_CHSH_THREADS", "3")
    assert worker_count(8) == 3
    monkeypatch.delenv("POLYGON_CHSH_THREADS")
    assert worker_count(2) == 2


def test_threaded_sweep_is_deterministic():
    th = build_theory(5)
    a = global_optimum(th, threads=1)
    b = global_optimum(th, threads=4)
    assert a.quadruple == b.quadruple and a.signed_value == b.signed_value
    assert np.array_equal(a.state.map, b.state.map)


@pytest.mark.parametrize("n,expected", [(3, 2.0), (4, 4.0), (5, h_opt(5)[2])])
def test_me_optimum(n, expected):
    rep = me_optimum(build_theory(n))
    assert rep.best_value == pytest.approx(expected, abs=1e-9)


def test_pentagon_me_optimum_uses_symmetric_pair():
    th = build_theory(5)
    best = max(abs(chsh_grid(th, s.map)[1, 0, 1, 0]) for s in enumerate_max_entangled(th))
    assert best == pytest.approx(h_opt(5)[2], abs=1e-12)


def test_triangle_identity_state_reaches_classical_bound():
    th = build_theory(3)
    grid = chsh_grid(th, enumerate_max_entangled(th)[0].map)
    assert grid[1, 0, 2, 0] == pytest.approx(-2.0)


@pytest.mark.parametrize("n", range(3, 10))
def test_lp_optimum_matches_max_entangled(n):
    rep = cached_verify(n)
    assert rep.passed
    assert rep.global_value == pytest.approx(rep.me_value, abs=1e-6)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_tampered_states_fail(n):
    assert not verify_theorem(build_theory(n), tamper=True).passed


@pytest.mark.parametrize("n", [4, 5, 7])
def test_dropping_half_the_group_keeps_the_optimum(n):
    th = build_theory(n)
    states = enumerate_max_entangled(th)
    full = me_optimum(th).best_value
    assert me_optimum(th, states[:n]).best_value == pytest.approx(full)
    assert me_optimum(th, states[n:]).best_value == pytest.approx(full)


def test_sweep_rows():
    rows = sweep("even", 14, lp=False)
    assert [r[0] for r in rows] == [6, 10, 14]
    assert rows[0] == (6, pytest.approx(3.0), "even_bound")
    rows = sweep("even", 4)
    assert rows == [(4, pytest.approx(4.0, abs=1e-6), "LP")]
    odd = sweep("odd", 41)
    vals = [v for n, v, _ in odd if n >= 5]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        sweep("prime", 10)


# ---------------------------------------------------------------------------
# certificate rows


def printed_rows(n):
    """Rows as displayed for each residue class, including their misprints."""
    t = np.pi / n
    r = build_theory(n).r
    res = n % 8
    if res == 1:
        m = (n - 1) // 8
        return np.array([
            [r * c(2 * m * t), r**3 * s((2 * m + 1) * t), 1 - r**2 * c(2 * m * t), r**3 * s(2 * m * t) * s(t), -r**2 * (s(2 * m * t) - s(t))],
            [r * c(2 * m * t), r**3 * s((2 * m - 1) * t), 1 - r**2 * c(2 * m * t), -r**3 * s(2 * m * t) * s(t), -r**2 * (s(2 * m * t) + s(t))],
            [r**3 * c((4 * m - 1) * t) * c(2 * m * t), r**3 * s((2 * m - 1) * t), r**2 * (c((4 * m - 1) * t) - c(2 * m * t)), -r**3 * s((4 * m - 1) * t) * s(2 * m * t), r**2 * (s((4 * m - 1) * t) + s(2 * m * t))],
            [r**3 * c(6 * m * t) * c((4 * m - 1) * t), r**3 * s((2 * m + 1) * t), r**2 * (c((4 * m - 1) * t) - c(6 * m * t)), -r**3 * s((4 * m - 1) * t) * s(6 * m * t), -r**2 * (s((4 * m - 1) * t) + s(6 * m * t))]])
    if res == 7:
        m = (n - 7) // 8
        return np.array([
            [r * c((2 * m + 2) * t), r**3 * s((2 * m + 3) * t), 1 - r**2 * c((2 * m + 2) * t), r**3 * s((2 * m + 2) * t) * s(t), -r**2 * (s((2 * m + 2) * t) - s(t))],
            [r * c((2 * m + 2) * t), r**3 * s((2 * m + 1) * t), 1 - r**2 * c((2 * m + 2) * t), -r**3 * s((2 * m + 2) * t) * s(t), -r**2 * (s((2 * m + 2) * t) + s(t))],
            [-r**3 * c((4 * m + 2) * t) * c((2 * m + 2) * t), r**3 * s((2 * m + 3) * t), -r**2 * (c((4 * m + 2) * t) + c((2 * m + 2) * t)), -r**3 * s((4 * m + 2) * t) * s((2 * m + 2) * t), r**2 * (s((4 * m + 2) * t) + s((2 * m + 2) * t))],
            [-r**3 * c((4 * m - 1) * t) * c((2 * m + 7) * t), r**3 * s((2 * m + 1) * t), r**2 * (c((4 * m - 1) * t) + c((2 * m + 7) * t)), -r**3 * s((4 * m - 1) * t) * s((2 * m + 7) * t), -r**2 * (s((4 * m - 1) * t) + s((2 * m + 7) * t))]])
    if n == 5:
        return np.array([
            [-r * c(t), 0, -1 - r**2 * c(t), 0, 0],
            [-r * c(t), -r**3 * s(2 * t), -1 - r**2 * c(t), 0, -2 * r**2 * s(t)],
            [-r**3 * c(3 * t), -r**3 * s(3 * t), r**2 * (1 - c(3 * t)), 0, r**2 * s(3 * t)],
            [r**3 * c(2 * t) * c(t), -r**3 * s(3 * t), r**2 * (c(2 * t) - c(t)), -r**3 * s(2 * t) * s(t), -r**2 * (s(2 * t) - s(t))]])
    m = (n - 3) // 8 if res == 3 else (n - 5) // 8
    q = 4 * m if res == 3 else 4 * m + 2
    w = 2 * m if res == 3 else 2 * m + 2
    return np.array([
        [-r**3 * c((4 * m + 1) * t) * c((2 * m + 1) * t), -r**3 * s((2 * m + 1) * t) if res == 3 else -r**3 * s(2 * m * t), -r**2 * (c((4 * m + 1) * t) + c((2 * m + 1) * t)), r**3 * s((4 * m + 1) * t) * s((2 * m + 1) * t), -r**2 * (s((4 * m + 1) * t) - s((2 * m + 1) * t))],
        [r**3 * c(q * t) * c((2 * m + 1) * t), -r**3 * s((2 * m + 2) * t), -r**2 * (c(q * t) + c((2 * m + 1) * t)), r**3 * s(q * t) * s((2 * m + 1) * t), -r**2 * (s(q * t) - s((2 * m + 1) * t))],
        [-r * c((2 * m + 1) * t), -r**3 * s(2 * m * t), -1 - r**2 * c((2 * m + 1) * t), r**3 * s((2 * m + 1) * t) * s(t), -r**2 * (s((2 * m + 1) * t) - s(t))],
        [-r**3 * c(w * t), -r**3 * s(w * t), r**2 * (1 + c(w * t)), 0, r**2 * s(w * t)]])


# components of the displayed rows that disagree with the geometry
MISPRINTS = {1: set(), 7: set(), 3: {(0, 1), (1, 2)}, 5: {(1, 2)}}
PENTAGON_MISPRINTS = {(0, 3), (1, 3), (2, 0), (3, 3)}


@pytest.mark.parametrize("n", range(5, 60, 2))
def test_generated_rows_match_display(n):
    G = theorem_spec(n).rows()
    P = printed_rows(n)
    skip = PENTAGON_MISPRINTS if n == 5 else MISPRINTS[n % 8]
    for i in range(4):
        for j in range(5):
            if (i, j) in skip:
                assert abs(G[i, j] - P[i, j]) > 1e-6
            else:
                assert G[i, j] == pytest.approx(P[i, j], abs=1e-10)


@pytest.mark.parametrize("n", [11, 19, 27, 35])
def test_corrected_components_three_mod_eight(n):
    t, r, m = np.pi / n, build_theory(n).r, (n - 3) // 8
    G = theorem_spec(n).rows()
    assert G[0, 1] == pytest.approx(-r**3 * s(2 * m * t), abs=1e-12)
    assert G[1, 2] == pytest.approx(r**2 * (c(4 * m * t) - c((2 * m + 1) * t)), abs=1e-12)


@pytest.mark.parametrize("n", [13, 21, 29, 37])
def test_corrected_component_five_mod_eight(n):
    t, r, m = np.pi / n, build_theory(n).r, (n - 5) // 8
    G = theorem_spec(n).rows()
    assert G[1, 2] == pytest.approx(r**2 * (c((4 * m + 2) * t) - c((2 * m + 1) * t)), abs=1e-12)


@pytest.mark.parametrize("n", range(5, 40, 2))
@pytest.mark.parametrize("kind", ["theorem", "delta"])
def test_rows_are_tight_at_expected_point(n, kind):
    prog, x = build_certificate(n, kind)
    assert np.allclose(prog.A @ x, build_theory(n).r, atol=1e-12)


@pytest.mark.parametrize("n", range(5, 30, 2))
def test_rows_come_from_max_tensor_positivity(n):
    # each row restates f @ M @ e >= 0 for the map M rebuilt from (a, b, c, d, e)
    spec = theorem_spec(n)
    rng = np.random.default_rng(n)
    for j, alpha in spec.offsets:
        normal, effect = spec.constraint(j, alpha)
        row = constraint_row(n, normal, effect, spec.me_map)
        for _ in range(5):
            a, b, cc, d, e = rng.normal(size=5)
            X = np.array([[a, b, cc], [b, d, e], [cc, e, 1.0]])
            lhs = normal @ X @ spec.me_map @ effect / (spec.me_map @ effect)[2]
            assert row @ [a, b, cc, d, e] + normal[2] == pytest.approx(lhs, abs=1e-10)


def test_certificate_shape_and_errors():
    prog, x = build_certificate(9)
    A, b, cvec, z, _ = to_nonnegative(prog, x)
    assert prog.A.shape == (4, 5) and A.shape == (4, 6)
    assert solve(prog).value == pytest.approx(prog.objective @ x, abs=1e-12)
    with pytest.raises(WrongResidue):
        build_certificate(8)
    assert theorem_spec(11).sense == "min"
    assert delta_spec(7).sense == "min" and delta_spec(11).sense == "max"


@pytest.mark.parametrize("n", range(5, 42, 2))
@pytest.mark.parametrize("kind", ["theorem", "delta"])
def test_certificate_lp_agrees_with_reference(n, kind):
    prog, x = build_certificate(n, kind)
    bounds = [(0, None) if g > 0 else (None, 0) if g < 0 else (None, None) for g in prog.sign]
    flip = -1 if prog.sense == "max" else 1
    ref = linprog(flip * prog.objective, A_ub=prog.A, b_ub=prog.b, bounds=bounds, method="highs")
    assert ref.status == 0
    assert flip * ref.fun == pytest.approx(prog.objective @ x, abs=1e-9)
    assert np.allclose(ref.x, x, atol=1e-7)


@pytest.mark.parametrize("n", range(5, 18, 2))
def test_certify_passes(n):
    rep = certify(n)
    assert rep.passed, (rep.theorem.failures, rep.delta.failures)
    for part in (rep.theorem, rep.delta):
        assert max(v for k, v in part.residuals.items() if k != "dual_min") <= 1e-8
        assert np.all(part.dual > 0)


@pytest.mark.parametrize("n", range(5, 14, 2))
def test_opposite_sign_dominated(n):
    assert certify(n).dominance_margin > 1e-4


@pytest.mark.parametrize("n", [9, 17, 25, 33])
def test_hand_derived_multipliers(n):
    res = closed_form_dual_check(n)
    assert res["positive"] and res["tight_columns"] and res["objective_match"]
    # they do not satisfy the column of the free variable
    assert not res["fully_dual_feasible"]


@pytest.mark.parametrize("n", range(5, 18, 2))
@pytest.mark.parametrize("kind", ["theorem", "delta"])
def test_sensitivity_to_row_entries(n, kind):
    for i in range(4):
        for j in (0, 1, 3, 4):
            for delta in (1e-3, -1e-3):
                assert not sensitivity_check(n, i, j, delta, kind).passed, (i, j, delta)


@pytest.mark.parametrize("n", [7, 9, 11, 13])
def test_insensitive_column_is_genuinely_slack(n):
    # the c variable sits at zero with a slack reduced cost, so small changes
    # in its column leave the same point optimal
    prog, x = build_certificate(n)
    assert x[2] == 0
    for i in range(4):
        A = prog.A.copy()
        A[i, 2] += 1e-3
        bounds = [(0, None) if g > 0 else (None, 0) if g < 0 else (None, None) for g in prog.sign]
        flip = -1 if prog.sense == "max" else 1
        ref = linprog(flip * prog.objective, A_ub=A, b_ub=prog.b, bounds=bounds, method="highs")
        assert np.allclose(ref.x, x, atol=1e-7)
        assert sensitivity_check(n, i, 2, 1e-3).passed


def test_status_of_certificate_lp():
    prog, _ = build_certificate(13, "delta")
    assert solve(prog).status is Status.OPTIMAL

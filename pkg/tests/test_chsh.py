import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_max_tensor_state, random_state_point
from polygon_chsh.analytic import h_opt, odd_case_data
from polygon_chsh.bipartite import assemblage_pair, enumerate_max_entangled, separable_state
from polygon_chsh.chsh import (
    ChshSetting,
    InvalidProbability,
    SymmetricParams,
    chsh_direction,
    chsh_from_win,
    chsh_functional,
    chsh_of,
    chsh_value,
    correlators,
    game_predicate,
    me_params,
    prob_table,
    q_effects,
    r_effects,
    symmetric_chsh,
    table_to_json,
    win_via_assemblage,
    win_via_q,
    win_via_r,
    winning_probability,
)
from polygon_chsh.bipartite import BipartiteState
from polygon_chsh.theory import binary_observable, build_theory, pure_state


def vertex_mixture_setting():
    th = build_theory(3)
    mix = [(1 / 3, pure_state(th, i), pure_state(th, i)) for i in range(3)]
    state = separable_state(th, mix)
    return ChshSetting(state, *(binary_observable(th, q) for q in (1, 0, 2, 0)))


def test_game_predicate_truth_table():
    wins = {(a, b, s, t) for a in (0, 1) for b in (0, 1) for s in (0, 1) for t in (0, 1)
            if game_predicate(a, b, s, t)}
    assert len(wins) == 8
    assert (0, 0, 0, 0) in wins and (0, 1, 1, 1) in wins and (0, 0, 1, 1) not in wins


def test_triangle_vertex_mixture_table():
    p = prob_table(vertex_mixture_setting())
    assert chsh_value(p) == pytest.approx(-2.0, abs=1e-12)
    assert winning_probability(p) == pytest.approx(0.25, abs=1e-12)
    # every setting pair sums to one
    assert np.allclose(p.sum(axis=(0, 1)), 1.0)
    rows = table_to_json(p)
    assert len(rows) == 4 and all(len(r) == 4 for r in rows)


def test_deterministic_local_strategy_reaches_two():
    th = build_theory(4)
    w = pure_state(th, 0)
    state = separable_state(th, [(1.0, w, w)])
    # pick effects that take value 1 on w so every outcome is 0
    idx = [i for i in range(4) if th.pure_effects[i] @ w > 1 - 1e-12]
    setting = ChshSetting(state, *(binary_observable(th, idx[0]) for _ in range(4)))
    assert chsh_value(prob_table(setting)) == pytest.approx(2.0)


def test_invalid_probabilities_raise():
    th = build_theory(4)
    bad = BipartiteState(np.diag([3.0, 3.0, 1.0]), 4)
    setting = ChshSetting(bad, *(binary_observable(th, q) for q in (0, 1, 2, 3)))
    with pytest.raises(InvalidProbability):
        prob_table(setting)


def test_q_and_r_effects_are_observables():
    th = build_theory(7)
    obs = [binary_observable(th, q) for q in (0, 3)]
    for E in (q_effects(*obs), r_effects(*obs)):
        for s in (0, 1):
            assert np.allclose(E[s, 0] + E[s, 1], th.unit)


@settings(max_examples=1000)
@given(st.integers(3, 12), st.integers(0, 2**31), st.lists(st.integers(0, 60), min_size=4, max_size=4))
def test_four_routes_agree(n, seed, quad):
    th = build_theory(n)
    rng = np.random.default_rng(seed)
    state = random_max_tensor_state(th, rng, boundary=bool(seed % 2))
    obs = [binary_observable(th, q) for q in quad]
    setting = ChshSetting(state, *obs)
    p = prob_table(setting)
    c_table = chsh_value(p)
    routes = [
        chsh_from_win(winning_probability(p)),
        chsh_from_win(win_via_q(setting)),
        chsh_from_win(win_via_r(setting)),
        chsh_from_win(win_via_assemblage(assemblage_pair(state, obs[0], obs[1]), q_effects(obs[2], obs[3]))),
        chsh_of(setting),
    ]
    for v in routes:
        assert abs(v - c_table) <= 1e-10


@settings(max_examples=1000)
@given(st.integers(3, 12), st.integers(0, 2**31), st.lists(st.integers(0, 60), min_size=4, max_size=4))
def test_separable_states_obey_classical_bound(n, seed, quad):
    th = build_theory(n)
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    w = rng.dirichlet(np.ones(k))
    mix = [(w[a], random_state_point(th, rng), random_state_point(th, rng)) for a in range(k)]
    state = separable_state(th, mix)
    setting = ChshSetting(state, *(binary_observable(th, q) for q in quad))
    assert abs(chsh_value(prob_table(setting))) <= 2 + 1e-9


def test_correlators_of_uniform_table_vanish():
    p = np.full((2, 2, 2, 2), 0.25)
    assert np.allclose(correlators(p), 0)
    assert chsh_value(p) == 0.0


def test_functional_matches_bilinear_form():
    th = build_theory(6)
    obs = [binary_observable(th, q) for q in (0, 1, 4, 5)]
    F = chsh_functional(*obs)
    for s in enumerate_max_entangled(th)[:4]:
        assert np.sum(F * s.map) == pytest.approx(chsh_value(prob_table(ChshSetting(s, *obs))))


@pytest.mark.parametrize("n", range(5, 30, 2))
def test_symmetric_value_at_me_parameters_is_table_optimum(n):
    expected = h_opt(n)[2] * odd_case_data(n).sign_x
    assert symmetric_chsh(me_params(n)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [5, 7, 9, 11, 13])
def test_symmetric_value_matches_direct_evaluation(n):
    th = build_theory(n)
    p = me_params(n)
    state = BipartiteState(p.canonical_matrix(), n)
    ns = odd_case_data(n).n_star
    setting = ChshSetting(state, *(binary_observable(th, q) for q in (ns, 0, ns, 0)))
    assert chsh_value(prob_table(setting)) == pytest.approx(symmetric_chsh(p), abs=1e-12)


@pytest.mark.parametrize("n", [5, 7, 9, 11, 13])
def test_frame_me_map_is_an_enumerated_state(n):
    th = build_theory(n)
    M = me_params(n).canonical_matrix()
    assert any(np.allclose(s.map, M, atol=1e-12) for s in enumerate_max_entangled(th))


def test_symmetric_params_layout():
    p = SymmetricParams(1, 2, 3, 4, 5, 7)
    assert np.array_equal(p.frame_matrix(), [[1, 2, 3], [2, 4, 5], [3, 5, 1]])
    assert chsh_direction(7).shape == (5,)

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from hyperact.action import (
    ActionError, BudgetExceeded, GroupAction, RaySpec, bounded_generation_diameter, classify_isometry,
    cycle_rotation, displacements, horoball_translation, invert_word, line_shift, pseudocharacter,
    quasi_horofunction, quasicharacter, ray_is_monotone, stable_translation_length,
)
from hyperact.coarse import MatrixGroup, build_space, four_point_delta, four_point_delta_table, path_graph, random_tree


def test_words_act_right_to_left():
    A = line_shift(10)
    assert A.apply("a", 3) == 4
    assert A.apply("A", 3) == 2
    assert A.apply("aaA", 3) == 4
    assert A.apply("a", 9) == -1
    assert A.apply("aa", 8) == -1
    assert A.power("a", -3) == "AAA"


@settings(max_examples=50)
@given(st.text(alphabet="abAB", max_size=12))
def test_invert_word_is_involution(w):
    assert invert_word(invert_word(w)) == w
    A = GroupAction(path_graph(1), [[0], [0]])
    assert A.apply(w + invert_word(w), 0) == 0


def test_generator_validation():
    with pytest.raises(ActionError):
        GroupAction(path_graph(3), [[0, 0, 1]])
    with pytest.raises(ActionError):
        GroupAction(path_graph(3), [[0, 1, 5]])
    with pytest.raises(ActionError):
        line_shift(5).apply("z", 0)


def test_isometry_audit():
    assert line_shift(8).isometry_audit() == [None]
    X = path_graph(4)
    bad = GroupAction(X, [[0, 2, 1, 3]])
    assert bad.isometry_audit()[0] is not None


def test_displacements_and_translation_length():
    A = line_shift(30, step=2)
    disp = displacements(A, "a", 0, 10)
    assert disp.values == list(range(2, 21, 2))
    assert displacements(A, "a", 0, 20).partial
    tl = stable_translation_length(A, "a", 0, 10)
    assert tl.estimate == 2 and tl.upper == 2
    with pytest.raises(ActionError):
        stable_translation_length(A, "a", 0, 20)


def test_classification_of_the_corpus():
    assert classify_isometry(line_shift(60), "a", 0, 40, 0).label == "hyperbolic"
    C = cycle_rotation(12)
    d = four_point_delta(C.space).delta4
    cls = classify_isometry(C, "a", 0, 30, d)
    assert cls.label == "elliptic"
    assert cls.max_displacement == 6
    H = horoball_translation(64, 6)
    dH = four_point_delta_table(H.space.dist, "sampled", samples=200_000, seed=0).delta4
    cls = classify_isometry(H, "a", 0, 50, dH)
    assert cls.label == "unbounded-nonhyperbolic"
    assert cls.late_growth <= cls.ceiling < cls.max_displacement


def test_partial_orbit_is_inconclusive():
    cls = classify_isometry(line_shift(10), "a", 0, 20)
    assert cls.label == "inconclusive"


def test_classification_thresholds():
    # rate = min (d_n + ceiling)/n, compared with min_rate
    cls = classify_isometry(line_shift(200), "a", 0, 100, 0, min_rate=Fraction(2))
    assert cls.rate == Fraction(102, 100)
    assert cls.label == "inconclusive"


def test_tree_horofunction_matches_oracle():
    rng = np.random.default_rng(4)
    T = random_tree(40, rng)
    far = int(np.argmax(T.dist[0]))
    path = [0]
    while path[-1] != far:
        path.append(next(u for u in T.adjacency[path[-1]] if T.dist[u, far] == T.dist[path[-1], far] - 1))
    ray = RaySpec(path, tail=min(3, len(path) - 1))
    assert ray_is_monotone(T, ray)
    start = len(path) - ray.tail
    for a in range(T.n):
        h = quasi_horofunction(T, ray, a, 0)
        # index on the ray where a's branch attaches
        foot = (T.dist[a, path[0]] + T.dist[path[0], far] - T.dist[a, far]) // 2
        assert h.stable == (foot <= start)
        if h.stable:
            assert h.value == oracles.tree_horofunction(T.dist.tolist(), path, a)


def test_tail_window_bounds():
    with pytest.raises(ActionError):
        RaySpec([0, 1], tail=2).window()


def test_line_quasicharacter_is_a_homomorphism():
    A = line_shift(80)
    ray = RaySpec(list(range(80)), tail=5)
    rep = quasicharacter(A, ray, ["a", "aa", "aaa", ""], 0)
    assert rep.defect_observed == 0
    assert rep.q["aa"] == -2
    assert all(rep.stable.values())


def test_pseudocharacter_consistency_on_line_and_cycle():
    A = line_shift(80)
    ray = RaySpec(list(range(80)), tail=5)
    rep = pseudocharacter(A, ray, "a", 40, 0)
    assert rep.p == -1 and rep.classification == "hyperbolic" and rep.consistent
    C = cycle_rotation(16)
    d = four_point_delta(C.space).delta4
    rep = pseudocharacter(C, RaySpec(list(range(9)), tail=2), "a", 32, d)
    assert rep.classification == "elliptic" and rep.consistent
    assert rep.defect_observed <= 16 * d


def test_pseudocharacter_rejects_escaping_basepoint():
    with pytest.raises(ActionError):
        pseudocharacter(line_shift(10), RaySpec(list(range(10)), 2), "a", 20)


def _sl2_gens(p):
    G = MatrixGroup(2, p)
    up = G.element([[1, 1], [0, 1]])
    lo = G.element([[1, 0], [1, 1]])
    return G, up, lo


@pytest.mark.parametrize("p", [3, 5, 7])
def test_bounded_generation_matches_oracle(p):
    G, up, lo = _sl2_gens(p)
    rep = bounded_generation_diameter(G, [up, lo], [[up], [lo]])
    assert rep.group_order == len(oracles.sl2_mod_p(p))
    assert rep.subgroup_orders == [p, p]
    assert rep.diameter == oracles.unipotent_diameter(p)
    assert sum(rep.sphere_sizes) == rep.group_order


def test_bounded_generation_detects_proper_subgroup():
    G, up, lo = _sl2_gens(5)
    rep = bounded_generation_diameter(G, [up, lo], [[up]])
    assert rep.diameter is None


def test_budget_is_enforced():
    G, up, lo = _sl2_gens(7)
    with pytest.raises(BudgetExceeded):
        bounded_generation_diameter(G, [up, lo], [[up], [lo]], budget=50)


def test_action_on_disconnected_space_still_applies():
    X = build_space([(0, 1)], 4)
    A = GroupAction(X, [[1, 0, 3, 2]])
    assert A.apply("aa", 2) == 2

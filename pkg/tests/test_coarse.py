from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from hyperact.coarse import (
    EdgeListError, MatrixGroup, PermGroup, SpaceError, build_space, check_iota_bounds, cayley_ball,
    coned_space, cycle_graph, fiber_space, format_edge_list, four_point_delta, four_point_delta_table,
    grid_graph, gromov_product, parse_edge_list, path_graph, qi_constants, random_tree,
    tripod_thinness, two_lines_instance,
)


def test_distances_match_bfs_oracle():
    rng = np.random.default_rng(3)
    n = 30
    edges = {(int(a), int(b)) for a, b in rng.integers(0, n, size=(50, 2)) if a != b}
    X = build_space(edges, n)
    ref = oracles.bfs_distances(n, edges)
    for u in range(n):
        for v in range(n):
            assert X.d(u, v) == ref[u][v]


def test_parse_edge_list_numeric_and_named():
    X = parse_edge_list("# path\n0 1\n1 2\n\n4\n")
    assert X.n == 5 and X.edges() == [(0, 1), (1, 2)]
    assert not X.connected
    Y = parse_edge_list("a b\nb c  # tail\n")
    assert Y.labels == ("a", "b", "c")
    assert Y.d(Y.index("a"), Y.index("c")) == 2


@pytest.mark.parametrize("text, line", [("0 1\n1 1\n", 2), ("0 1 2\n", 1), ("0 -1\n", 1)])
def test_parse_edge_list_errors_carry_line(text, line):
    with pytest.raises(EdgeListError) as err:
        parse_edge_list(text)
    assert err.value.lineno == line


def test_format_roundtrip():
    X = grid_graph(3, 4)
    Y = parse_edge_list(format_edge_list(X))
    assert np.array_equal(X.dist, Y.dist)


def test_gromov_product_on_path():
    X = path_graph(10)
    assert gromov_product(X, 2, 7, 0) == 2
    assert gromov_product(X, 0, 9, 5) == 0
    assert gromov_product(grid_graph(2, 2), 1, 3, 0) == Fraction(1)


def test_trees_have_zero_delta():
    rng = np.random.default_rng(11)
    for _ in range(10):
        T = random_tree(int(rng.integers(4, 40)), rng)
        assert four_point_delta(T).delta2 == 0
        assert tripod_thinness(T) == 0


@pytest.mark.parametrize("n", [4, 5, 8, 9, 12, 16])
def test_cycle_delta_matches_brute_force(n):
    C = cycle_graph(n)
    ref = oracles.brute_delta2(oracles.bfs_distances(n, oracles.cycle_edges(n)))
    rep = four_point_delta(C)
    assert rep.delta2 == ref
    i, j, k, l = rep.witness
    s = sorted((C.dist[i, j] + C.dist[k, l], C.dist[i, k] + C.dist[j, l], C.dist[i, l] + C.dist[j, k]))
    assert s[2] - s[1] == rep.delta2


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 14), st.integers(0, 2 ** 32 - 1))
def test_random_graph_delta_matches_brute_force(n, seed):
    rng = np.random.default_rng(seed)
    edges = oracles.path_edges(n) + [(int(a), int(b)) for a, b in rng.integers(0, n, size=(n // 2, 2)) if a != b]
    X = build_space(edges, n)
    assert four_point_delta(X).delta2 == oracles.brute_delta2(X.dist.tolist())


@settings(max_examples=20, deadline=None)
@given(st.integers(6, 20), st.integers(0, 1000))
def test_sampled_is_a_lower_bound(n, seed):
    G = grid_graph(2, n // 2)
    exact = four_point_delta(G).delta2
    samp = four_point_delta(G, "sampled", samples=500, seed=seed)
    assert samp.delta2 <= exact


def test_sampled_is_deterministic_and_needs_seed():
    G = grid_graph(6, 6)
    a = four_point_delta(G, "sampled", samples=20_000, seed=5)
    b = four_point_delta(G, "sampled", samples=20_000, seed=5)
    assert (a.delta2, a.witness) == (b.delta2, b.witness)
    with pytest.raises(SpaceError):
        four_point_delta(G, "sampled", samples=10)


def test_worker_count_does_not_change_result():
    G = grid_graph(5, 6)
    r1 = four_point_delta_table(G.dist, workers=1)
    r4 = four_point_delta_table(G.dist, workers=4)
    assert (r1.delta2, r1.witness) == (r4.delta2, r4.witness)


def test_disconnected_delta_rejected():
    with pytest.raises(SpaceError):
        four_point_delta(build_space([(0, 1), (2, 3)], 4))


def test_qi_identity_and_scaling():
    X = path_graph(12)
    rep = qi_constants(list(range(12)), X, X)
    assert (rep.K, rep.C) == (1, 0)
    assert rep.embedding
    Y = path_graph(23)
    rep2 = qi_constants([2 * i for i in range(12)], X, Y)
    assert rep2.K == 2 and rep2.C == 0
    assert rep2.onto_C == 1


def test_qi_collapse_is_not_embedding():
    X = path_graph(8)
    rep = qi_constants([0] * 8, X, path_graph(3))
    assert not rep.embedding


def test_cayley_balls_of_small_groups():
    # the unipotent copy of Z inside SL(2, Z), and a 5-cycle from permutations
    G = MatrixGroup(2)
    gens = [G.element([[1, 1], [0, 1]]), G.element([[1, -1], [0, 1]])]
    ball = cayley_ball(G, gens, 6)
    assert ball.space.n == 13
    P = PermGroup(5)
    rot = (1, 2, 3, 4, 0)
    ball = cayley_ball(P, [rot, P.inv(rot)], 10)
    assert ball.space.n == 5
    assert four_point_delta(ball.space).delta2 == oracles.brute_delta2(
        oracles.bfs_distances(5, oracles.cycle_edges(5)))


def test_cayley_ball_requires_symmetric_generators():
    G = MatrixGroup(2)
    with pytest.raises(SpaceError):
        cayley_ball(G, [G.element([[1, 1], [0, 1]])], 3)


def test_coning_everything_gives_diameter_two():
    G = MatrixGroup(2, 3)
    gens = [G.element(m) for m in ([[1, 1], [0, 1]], [[1, 2], [0, 1]], [[1, 0], [1, 1]], [[1, 0], [2, 1]])]
    ball = cayley_ball(G, gens, 10)
    assert ball.space.n == len(oracles.sl2_mod_p(3))
    cone = coned_space(ball, [lambda g: True])
    assert cone.diameter == 2
    assert len(cone.cones) == 1


def test_fiber_two_lines():
    inst = two_lines_instance(length=16, offset=1)
    F = fiber_space(**inst)
    # the reflection commutes with the shifted map only up to the offset
    assert F.equivariance_defect == F.C == 1
    assert F.J1 == F.J0 + 2 * F.C
    iota = check_iota_bounds(F)
    assert iota.ok
    dA1 = four_point_delta_table(F.metric).delta4
    assert dA1 <= 2 * inst["delta"] + 4 * F.J1


def test_fiber_rejects_far_images():
    inst = two_lines_instance(length=6, offset=1, symmetric=False)
    inst["psi"] = [w + 100 for w in range(6)]
    inst["X"] = path_graph(110)
    with pytest.raises(SpaceError):
        fiber_space(**inst)

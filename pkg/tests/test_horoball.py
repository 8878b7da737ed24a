import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from hyperact.coarse import build_space, cycle_graph, four_point_delta_table, grid_graph, path_graph
from hyperact.horoball import (
    HoroballError, admissible_check, build_exponential_family, build_horoball, build_orbit_family,
    delta_profile, distance_formula_check, format_custom_family, formula_bracket, formula_k,
    horoball_source_distances, orbit_base_graph, parse_custom_family, sample_pairs,
    shift_orbit_in_horoball, shift_orbit_on_line,
)


@pytest.mark.parametrize("base, D", [(path_graph(9), 3), (cycle_graph(10), 4), (grid_graph(3, 3), 2)])
def test_horoball_matches_definition(base, D):
    fam = build_exponential_family(base, D)
    H = build_horoball(base, fam, D)
    radii = [1] + [2 ** (n - 1) for n in range(1, D + 1)]
    n, edges = oracles.horoball_edges_from_definition(base.dist.tolist(), radii)
    ref = oracles.bfs_distances(n, edges)
    assert H.space.n == n
    assert H.space.dist.tolist() == ref


def test_vertex_ids():
    base = path_graph(5)
    H = build_horoball(base, build_exponential_family(base, 2), 2)
    assert H.vid(3, 2) == 13 and H.vertex(13) == (3, 2)
    assert H.d((0, 0), (0, 2)) == 2
    # level 2 joins vertices at base distance <= 2
    assert H.d((0, 2), (4, 2)) == 2


def test_exponential_family_is_admissible():
    X = grid_graph(4, 5)
    rep = admissible_check(X, build_exponential_family(X, 5))
    assert rep.ok
    assert {a.name for a in rep.axioms} == {"connectedness", "exponential_growth", "symmetry", "equivariance"}


def test_cycle_rotation_is_equivariant():
    X = cycle_graph(12)
    rot = [(v + 1) % 12 for v in range(12)]
    assert admissible_check(X, build_exponential_family(X, 3), generators=[rot]).ok


def test_broken_equivariance_is_reported():
    X = path_graph(8)
    fam = build_exponential_family(X, 3)
    fam.balls[2, 0, 6] = fam.balls[2, 6, 0] = True     # B_3(0) now reaches 6 but B_3(1) not 7
    shift = [v + 1 if v < 7 else -1 for v in range(8)]
    rep = admissible_check(X, fam, generators=[shift])
    assert not rep.axiom("equivariance").ok
    assert rep.axiom("symmetry").ok


def test_asymmetric_family_fails_symmetry():
    X = path_graph(6)
    fam = build_exponential_family(X, 2)
    fam.balls[1, 0, 5] = True
    rep = admissible_check(X, fam)
    assert rep.axiom("symmetry").witness == (2, 0, 5)


def test_linear_orbit_family_fails_growth():
    # radii 3, 5, 7, ... grow too slowly: B_1 o B_1 reaches distance 6
    d = shift_orbit_on_line(20)
    fam = build_orbit_family(d, 1, 4)
    X = orbit_base_graph(fam)
    rep = admissible_check(X, fam)
    assert rep.axiom("connectedness").ok
    growth = rep.axiom("exponential_growth")
    assert not growth.ok
    n, w, v, u = growth.witness
    assert d[w, v] <= 3 and d[v, u] <= 3 and d[w, u] > 5
    with pytest.raises(HoroballError):
        build_horoball(X, fam, 3)
    assert build_horoball(X, fam, 3, force=True).space.connected


def test_parabolic_orbit_family_passes_and_matches_formula():
    W = 40
    d = shift_orbit_in_horoball(W)
    fam = build_orbit_family(d, 2, 4)
    X = orbit_base_graph(fam)
    shift = [g + 1 if g + 1 < W else -1 for g in range(W)]
    assert admissible_check(X, fam, generators=[shift]).ok
    pairs = sample_pairs(W, 4, 150, seed=1)
    rep = distance_formula_check(W, fam, 4, d, 2, pairs)
    assert rep.checked == 150
    assert rep.ok, rep.mismatches[:3]


def test_formula_k_intervals():
    assert [formula_k(d, 1) for d in range(1, 8)] == [0, 1, 1, 2, 2, 3, 3]
    assert [formula_k(d, 3) for d in (3, 4, 9, 10)] == [0, 1, 1, 2]
    assert formula_bracket(2, 1, 0, 0) == {2, 3}
    assert formula_bracket(2, 1, 1, 3) == {3}


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 500), st.integers(1, 6))
def test_formula_k_is_unique(d, C1):
    k = formula_k(d, C1)
    assert (2 * k - 1) * C1 < d <= (2 * k + 1) * C1


def test_custom_family_roundtrip_and_errors():
    X = path_graph(5)
    fam = build_exponential_family(X, 3)
    back = parse_custom_family(format_custom_family(fam), 5)
    assert np.array_equal(back.balls, fam.balls)
    for bad, line in [("1 0 1 2\n", 1), ("# ok\n1 9: 0\n", 2), ("1 x: 0\n", 1)]:
        with pytest.raises(HoroballError, match=f"line {line}"):
            parse_custom_family(bad, 5)


def test_source_distances_agree_with_full_table():
    X = cycle_graph(9)
    fam = build_exponential_family(X, 3)
    H = build_horoball(X, fam, 3)
    src = [0, 10, 35]
    assert np.array_equal(horoball_source_distances(9, fam, 3, src), H.space.dist[src])


def test_delta_profile_on_small_line_is_exact_and_stable():
    X = path_graph(24)
    prof = delta_profile(X, build_exponential_family(X, 5), [3, 4, 5])
    assert all(rep.mode == "exact" for _, rep in prof.rows)
    assert prof.value(4).delta2 == prof.value(5).delta2
    assert prof.csv().splitlines()[0] == "depth,delta4"


def test_horoball_is_thinner_than_grid():
    X = grid_graph(7, 7)
    H = build_horoball(X, build_exponential_family(X, 4), 4)
    assert four_point_delta_table(H.space.dist).delta2 < four_point_delta_table(X.dist).delta2


def test_size_mismatch_rejected():
    fam = build_exponential_family(path_graph(4), 2)
    with pytest.raises(HoroballError):
        build_horoball(build_space([(0, 1)], 2), fam, 2)
    with pytest.raises(HoroballError):
        build_horoball(path_graph(4), fam, 5)

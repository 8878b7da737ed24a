"""Combinatorial horoballs over finite base graphs and their hyperbolicity profiles.

A ball family stores B_n(v) for n = 1..D as boolean matrices.  Horoball
vertex (v, n) has id n*N + v for levels n = 0..D; level 0 uses B_1, so it
carries exactly the base graph's edges when axiom 1 holds.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .coarse import INF, FiniteGraphSpace, DeltaReport, SpaceError, build_space, four_point_delta_table


class HoroballError(ValueError):
    pass


@dataclass(eq=False)
class BallFamily:
    kind: str                          # "exponential" | "orbit" | "custom"
    balls: np.ndarray = field(repr=False)   # bool [D, N, N]; balls[n-1, w, v] <=> v in B_n(w)
    params: dict = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return self.balls.shape[0]

    @property
    def size(self) -> int:
        return self.balls.shape[1]

    def ball(self, n: int, w: int) -> list[int]:
        return [int(v) for v in np.flatnonzero(self.balls[n - 1, w])]

    def level_matrix(self, level: int) -> np.ndarray:
        return self.balls[max(level, 1) - 1]


def build_exponential_family(X: FiniteGraphSpace, D: int) -> BallFamily:
    """B_n(v) = metric ball of radius 2^(n-1)."""
    if not X.connected:
        raise SpaceError("exponential family needs a connected base")
    radii = [2 ** (n - 1) for n in range(1, D + 1)]
    balls = np.stack([X.dist <= r for r in radii]) if D else np.zeros((0, X.n, X.n), bool)
    return BallFamily("exponential", balls, {"radii": radii})


def build_orbit_family(orbit_dist: np.ndarray, C1: int, D: int, labels: Sequence | None = None) -> BallFamily:
    """B_n(g) = {h : d(h x0, g x0) <= (2n+1) C1}, from a table of orbit distances."""
    d = np.asarray(orbit_dist, dtype=np.int64)
    if C1 <= 0:
        raise HoroballError("C1 must be positive")
    radii = [(2 * n + 1) * C1 for n in range(1, D + 1)]
    balls = np.stack([d <= r for r in radii])
    return BallFamily("orbit", balls, {"C1": C1, "radii": radii,
                                        "labels": None if labels is None else list(labels)})


def orbit_base_graph(family: BallFamily, labels: Sequence | None = None) -> FiniteGraphSpace:
    """Graph on the orbit whose edges are B_1, so axiom 1 holds by construction."""
    b1 = family.balls[0]
    iu = np.argwhere(np.triu(b1 | b1.T, 1))
    return build_space([(int(a), int(b)) for a, b in iu], family.size, labels)


def parse_custom_family(text: str, n_vertices: int) -> BallFamily:
    """Lines 'n v: w1 w2 ...' give B_n(v); unspecified balls are empty."""
    entries = {}
    top = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, tail = line.partition(":")
        parts = head.split()
        if not sep or len(parts) != 2:
            raise HoroballError(f"line {lineno}: expected 'n v: w1 w2 ...'")
        try:
            n, v = int(parts[0]), int(parts[1])
            ws = [int(w) for w in tail.split()]
        except ValueError:
            raise HoroballError(f"line {lineno}: non-integer entry") from None
        if n < 1 or not (0 <= v < n_vertices) or any(not (0 <= w < n_vertices) for w in ws):
            raise HoroballError(f"line {lineno}: index out of range")
        entries[(n, v)] = ws
        top = max(top, n)
    balls = np.zeros((top, n_vertices, n_vertices), dtype=bool)
    for (n, v), ws in entries.items():
        balls[n - 1, v, ws] = True
    return BallFamily("custom", balls, {})


def format_custom_family(family: BallFamily) -> str:
    lines = []
    for n in range(1, family.depth + 1):
        for v in range(family.size):
            lines.append(f"{n} {v}: " + " ".join(map(str, family.ball(n, v))))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- admissibility

@dataclass
class AxiomResult:
    name: str
    ok: bool
    checked: int
    witness: tuple | None = None

    def as_dict(self) -> dict:
        return {"axiom": self.name, "ok": self.ok, "checked": self.checked,
                "witness": None if self.witness is None else list(self.witness)}


@dataclass
class AdmissibilityReport:
    axioms: list

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.axioms)

    def axiom(self, name: str) -> AxiomResult:
        return next(a for a in self.axioms if a.name == name)

    def as_dict(self) -> dict:
        return {"ok": self.ok, "axioms": [a.as_dict() for a in self.axioms]}


def admissible_check(X: FiniteGraphSpace, family: BallFamily, D: int | None = None,
                     generators: Sequence[Sequence[int]] = ()) -> AdmissibilityReport:
    """Exhaustive check of the four axioms for B_1..B_D.

    Generators are vertex maps given as integer arrays; -1 marks an
    undefined image (for finite windows of an infinite orbit), and such
    balls are skipped in the equivariance check.
    """
    D = family.depth if D is None else D
    if D > family.depth:
        raise HoroballError(f"family covers only {family.depth} levels")
    B = family.balls[:D]
    N = family.size
    out = []

    want = X.dist <= 1
    bad = np.argwhere(B[0] != want) if D else np.zeros((0, 2), int)
    out.append(AxiomResult("connectedness", len(bad) == 0, N,
                           None if len(bad) == 0 else (1, int(bad[0][0]), int(bad[0][1]))))

    witness, checked = None, 0
    for n in range(1, D):
        m = B[n - 1].astype(np.int64)
        reach = (m @ m) > 0                 # u in B_n(v) for some v in B_n(w)
        viol = reach & ~B[n]
        checked += N * N
        if viol.any():
            w, u = map(int, np.argwhere(viol)[0])
            v = int(np.flatnonzero(B[n - 1][w] & B[n - 1][:, u])[0])
            witness = (n, w, v, u)
            break
    out.append(AxiomResult("exponential_growth", witness is None, checked, witness))

    witness = None
    for n in range(1, D + 1):
        asym = B[n - 1] & ~B[n - 1].T
        if asym.any():
            w, v = map(int, np.argwhere(asym)[0])
            witness = (n, w, v)
            break
    out.append(AxiomResult("symmetry", witness is None, D * N * N, witness))

    witness, checked = None, 0
    for gi, g in enumerate(generators):
        g = np.asarray(g, dtype=np.int64)
        inside = g >= 0
        mapped = np.zeros(N, dtype=bool)
        mapped[g[inside]] = True
        for n in range(1, D + 1):
            for w in np.flatnonzero(inside):
                ball = np.flatnonzero(B[n - 1, w])
                if not inside[ball].all():
                    continue
                image = np.zeros(N, dtype=bool)
                image[g[ball]] = True
                checked += 1
                # target vertices outside the window's image cannot be compared
                if not np.array_equal(image, B[n - 1, g[w]] & mapped):
                    witness = (gi, n, int(w))
                    break
            if witness:
                break
        if witness:
            break
    out.append(AxiomResult("equivariance", witness is None, checked, witness))
    return AdmissibilityReport(out)


# ---------------------------------------------------------------- horoball graphs

@dataclass(eq=False)
class HoroballGraph:
    base: FiniteGraphSpace
    family: BallFamily
    depth: int
    space: FiniteGraphSpace = field(repr=False)

    @property
    def N(self) -> int:
        return self.base.n

    def vid(self, v: int, level: int) -> int:
        return level * self.N + v

    def vertex(self, i: int) -> tuple[int, int]:
        return i % self.N, i // self.N

    def d(self, a: tuple[int, int], b: tuple[int, int]) -> int:
        return int(self.space.dist[self.vid(*a), self.vid(*b)])


def horoball_edges(N: int, family: BallFamily, D: int) -> list[tuple[int, int]]:
    edges = []
    for level in range(D + 1):
        m = np.triu(family.level_matrix(level) | family.level_matrix(level).T, 1)
        w, v = np.nonzero(m)
        off = level * N
        edges.extend(zip((w + off).tolist(), (v + off).tolist()))
        if level < D:
            edges.extend((off + x, off + N + x) for x in range(N))
    return edges


def build_horoball(X: FiniteGraphSpace, family: BallFamily, D: int, force: bool = False,
                   generators: Sequence[Sequence[int]] = ()) -> HoroballGraph:
    if family.size != X.n:
        raise HoroballError("family and base sizes differ")
    if D > family.depth:
        raise HoroballError(f"family covers only {family.depth} levels, depth {D} requested")
    if not force:
        rep = admissible_check(X, family, max(D, 1), generators)
        if not rep.ok:
            failing = [a.name for a in rep.axioms if not a.ok]
            raise HoroballError(f"family is not admissible ({', '.join(failing)}); pass force to build anyway")
    N = X.n
    space = build_space(horoball_edges(N, family, D), N * (D + 1), [(v, n) for n in range(D + 1) for v in range(N)])
    return HoroballGraph(X, family, D, space)


def horoball_source_distances(N: int, family: BallFamily, D: int, sources: Sequence[int]) -> np.ndarray:
    """BFS distances from selected horoball vertices without the full distance table."""
    e = horoball_edges(N, family, D)
    u = np.array([a for a, _ in e] + [b for _, b in e])
    v = np.array([b for _, b in e] + [a for a, _ in e])
    g = csr_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(N * (D + 1),) * 2)
    d = shortest_path(g, method="D", unweighted=True, directed=False, indices=list(sources))
    out = np.full(d.shape, INF, dtype=np.int64)
    fin = np.isfinite(d)
    out[fin] = d[fin].astype(np.int64)
    return out


# ---------------------------------------------------------------- profiles

@dataclass
class DeltaProfile:
    rows: list                          # (depth, DeltaReport)

    def csv(self) -> str:
        lines = ["depth,delta4"]
        for D, rep in self.rows:
            lines.append(f"{D},{rep.as_dict()['delta4']}")
        return "\n".join(lines) + "\n"

    def value(self, D: int) -> DeltaReport:
        return next(r for d, r in self.rows if d == D)


def delta_profile(X: FiniteGraphSpace, family: BallFamily, depths: Sequence[int],
                  exact_limit: float = 1e9, samples: int = 1_000_000, seed: int = 0,
                  workers: int | None = None, force: bool = False) -> DeltaProfile:
    """Four-point delta of each truncation; exact when n^4 <= exact_limit, else sampled."""
    rows = []
    for D in depths:
        H = build_horoball(X, family, D, force=force)
        n = H.space.n
        mode = "exact" if float(n) ** 4 <= exact_limit else "sampled"
        rows.append((D, four_point_delta_table(H.space.dist, mode, samples, seed, workers)))
    return DeltaProfile(rows)


# ---------------------------------------------------------------- the distance formula

def formula_k(d_ab: int, C1: int) -> int:
    """Unique k with (2k-1) C1 < d <= (2k+1) C1."""
    k = 0
    while not ((2 * k - 1) * C1 < d_ab <= (2 * k + 1) * C1):
        k += 1
    return k


def formula_bracket(d_ab: int, C1: int, m: int, n: int) -> set[int]:
    k = formula_k(d_ab, C1)
    if max(m, n) >= k:
        return {abs(m - n) + 1}
    return {2 * k - (m + n), 2 * k - (m + n) + 1}


@dataclass
class FormulaReport:
    checked: int
    mismatches: list
    min_level: int

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict:
        return {"checked": self.checked, "mismatches": len(self.mismatches), "min_level": self.min_level,
                "examples": [list(m) for m in self.mismatches[:20]]}


def distance_formula_check(base_size: int, family: BallFamily, D: int, orbit_dist: np.ndarray, C1: int,
                           pairs: Sequence[tuple[int, int, int, int]], min_level: int = 1) -> FormulaReport:
    """Compare BFS distances d((a,n),(b,m)) with the bracket predicted from d(a x0, b x0).

    Pairs are (a, n, b, m).  Levels below min_level are skipped: level 0
    repeats B_1 and is a truncation artefact, not part of the family.
    Distances come from single-source BFS, so large truncations fit in memory.
    """
    N = base_size
    keep = [(a, n, b, m) for a, n, b, m in pairs if a != b and min(n, m) >= min_level]
    srcs = sorted({n * N + a for a, n, _, _ in keep})
    dist = horoball_source_distances(N, family, D, srcs) if srcs else np.zeros((0, 0), np.int64)
    row = {s: i for i, s in enumerate(srcs)}
    mism = []
    for a, n, b, m in keep:
        got = int(dist[row[n * N + a], m * N + b])
        want = formula_bracket(int(orbit_dist[a, b]), C1, m, n)
        if got not in want:
            mism.append((a, n, b, m, int(orbit_dist[a, b]), got, sorted(want)))
    return FormulaReport(len(keep), mism, min_level)


def sample_pairs(N: int, D: int, count: int, seed: int, min_level: int = 1) -> list[tuple[int, int, int, int]]:
    """Distinct-base vertex pairs with levels in [min_level, D], from a seeded PCG64 stream."""
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    while len(out) < count:
        a, b = (int(x) for x in rng.integers(0, N, 2))
        n, m = (int(x) for x in rng.integers(min_level, D + 1, 2))
        if a != b:
            out.append((a, n, b, m))
    return out


# ---------------------------------------------------------------- standard instances

def shift_orbit_in_horoball(window: int, ambient_depth: int | None = None, margin: int | None = None):
    """Orbit distances of Z acting parabolically: the shift of the exponential horoball over a line.

    The orbit of x0 = (0, 0) is {(g, 0)}; distances are measured in a
    truncated horoball over a longer path so that the window sees no
    boundary effects.
    """
    from .coarse import path_graph
    margin = window if margin is None else margin
    L = window + 2 * margin
    D = ambient_depth if ambient_depth is not None else max(2, int(np.ceil(np.log2(L))) + 2)
    base = path_graph(L)
    fam = build_exponential_family(base, D)
    src = [margin + g for g in range(window)]
    d = horoball_source_distances(L, fam, D, src)
    return d[:, src]


def shift_orbit_on_line(window: int) -> np.ndarray:
    g = np.arange(window)
    return np.abs(g[:, None] - g[None, :])

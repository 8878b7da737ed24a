"""Exact metric geometry of finite graphs and pseudo-metric tables."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

import numba
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

INF = np.iinfo(np.int64).max // 4


class EdgeListError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class SpaceError(ValueError):
    pass


# ---------------------------------------------------------------- spaces

@dataclass(frozen=True, eq=False)
class FiniteGraphSpace:
    n: int
    adjacency: tuple
    dist: np.ndarray = field(repr=False)
    labels: tuple | None = None

    @property
    def connected(self) -> bool:
        return bool((self.dist < INF).all())

    @property
    def diameter(self) -> int | None:
        return int(self.dist.max()) if self.connected and self.n else (0 if self.n == 0 else None)

    def d(self, u: int, v: int) -> int | None:
        x = int(self.dist[u, v])
        return None if x >= INF else x

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def index(self, label) -> int:
        if self.labels is None:
            return int(label)
        return self.labels.index(label)

    def relabel(self, perm: Sequence[int]) -> "FiniteGraphSpace":
        """Space with vertex perm[i] playing the role of old vertex i."""
        inv = np.argsort(perm)
        edges = [(perm[u], perm[v]) for u, v in self.edges()]
        labels = None if self.labels is None else tuple(self.labels[i] for i in inv)
        return build_space(edges, self.n, labels)


def all_pairs_distances(n: int, edges: Iterable[tuple[int, int]]) -> np.ndarray:
    edges = list(edges)
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if not edges:
        d = np.full((n, n), INF, dtype=np.int64)
        np.fill_diagonal(d, 0)
        return d
    u = np.array([e[0] for e in edges] + [e[1] for e in edges])
    v = np.array([e[1] for e in edges] + [e[0] for e in edges])
    g = csr_matrix((np.ones(len(u), dtype=np.int8), (u, v)), shape=(n, n))
    d = shortest_path(g, method="D", unweighted=True, directed=False)
    out = np.full((n, n), INF, dtype=np.int64)
    fin = np.isfinite(d)
    out[fin] = d[fin].astype(np.int64)
    return out


def build_space(edges: Iterable[tuple[int, int]], n: int | None = None,
                labels: Sequence | None = None) -> FiniteGraphSpace:
    edges = {(min(u, v), max(u, v)) for u, v in edges}
    for u, v in edges:
        if u == v:
            raise SpaceError(f"self-loop at {u}")
        if u < 0:
            raise SpaceError("negative vertex id")
    top = max((v for _, v in edges), default=-1) + 1
    n = top if n is None else n
    if top > n:
        raise SpaceError(f"edge endpoint {top - 1} outside 0..{n - 1}")
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in sorted(edges):
        adj[u].append(v)
        adj[v].append(u)
    adjacency = tuple(tuple(sorted(a)) for a in adj)
    return FiniteGraphSpace(n, adjacency, all_pairs_distances(n, sorted(edges)),
                            None if labels is None else tuple(labels))


def parse_edge_list(text: str) -> FiniteGraphSpace:
    """One 'u v' pair per line; a lone token declares an isolated vertex; '#' starts a comment.

    Integer tokens are used as vertex ids directly; otherwise names are
    numbered in order of first appearance and kept as labels.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (1, 2):
            raise EdgeListError(lineno, f"expected 'u v', got {raw.strip()!r}")
        if len(parts) == 2 and parts[0] == parts[1]:
            raise EdgeListError(lineno, "self-loop")
        rows.append((lineno, parts))
    tokens = [t for _, p in rows for t in p]
    numeric = all(t.lstrip("-").isdigit() for t in tokens)
    if numeric:
        for lineno, p in rows:
            if any(int(t) < 0 for t in p):
                raise EdgeListError(lineno, "negative vertex id")
        n = max((int(t) for t in tokens), default=-1) + 1
        edges = [(int(p[0]), int(p[1])) for _, p in rows if len(p) == 2]
        return build_space(edges, n)
    names: dict[str, int] = {}
    for t in tokens:
        names.setdefault(t, len(names))
    edges = [(names[p[0]], names[p[1]]) for _, p in rows if len(p) == 2]
    return build_space(edges, len(names), list(names))


def format_edge_list(space: FiniteGraphSpace) -> str:
    lines = [f"# {space.n} vertices"]
    lines += [f"{u} {v}" for u, v in space.edges()]
    isolated = [u for u in range(space.n) if not space.adjacency[u]]
    lines += [str(u) for u in isolated]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- standard graphs

def path_graph(n: int) -> FiniteGraphSpace:
    return build_space([(i, i + 1) for i in range(n - 1)], n)


def cycle_graph(n: int) -> FiniteGraphSpace:
    return build_space([(i, (i + 1) % n) for i in range(n)], n)


def grid_graph(rows: int, cols: int) -> FiniteGraphSpace:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return build_space(edges, rows * cols)


def random_tree(n: int, rng: np.random.Generator) -> FiniteGraphSpace:
    """Uniform random recursive tree: vertex i attaches to a uniform earlier vertex."""
    edges = [(int(rng.integers(0, i)), i) for i in range(1, n)]
    return build_space(edges, n)


# ---------------------------------------------------------------- Gromov products and delta

def gromov_product2(space_or_dist, x: int, y: int, z: int) -> int:
    """Twice the Gromov product (x|y)_z."""
    d = space_or_dist.dist if isinstance(space_or_dist, FiniteGraphSpace) else space_or_dist
    a, b, c = int(d[x, z]), int(d[y, z]), int(d[x, y])
    if max(a, b, c) >= INF:
        raise SpaceError("Gromov product of points at infinite distance")
    return a + b - c


def gromov_product(space_or_dist, x: int, y: int, z: int) -> Fraction:
    return Fraction(gromov_product2(space_or_dist, x, y, z), 2)


@dataclass
class DeltaReport:
    delta2: int                     # twice the four-point constant
    witness: tuple | None
    mode: str                       # "exact" or "sampled"
    samples: int = 0
    seed: int | None = None
    n: int = 0

    @property
    def delta4(self) -> Fraction:
        return Fraction(self.delta2, 2)

    def as_dict(self) -> dict:
        return {"delta4": _half(self.delta2), "delta4_doubled": self.delta2, "mode": self.mode,
                "samples": self.samples, "seed": self.seed, "n": self.n,
                "witness": None if self.witness is None else list(self.witness)}


def _half(x2: int) -> str:
    return str(Fraction(x2, 2))


@numba.njit(cache=True, inline="always")
def _quad_defect(dij, dkl, dik, djl, dil, djk):
    s1 = dij + dkl
    s2 = dik + djl
    s3 = dil + djk
    if s1 >= s2:
        hi, lo = s1, s2
    else:
        hi, lo = s2, s1
    if s3 >= hi:
        return s3 - hi
    if s3 >= lo:
        return hi - s3
    return hi - lo


@numba.njit(parallel=True, cache=True)
def _exact_scan(d):
    n = d.shape[0]
    best = np.full(n, -1, dtype=np.int64)
    wit = np.zeros((n, 3), dtype=np.int64)
    # rows are visited in an interleaved order to balance the triangular workload
    for t in numba.prange(n):
        i = t // 2 if t % 2 == 0 else n - 1 - t // 2
        b = -1
        wj = wk = wl = 0
        for j in range(i + 1, n):
            dij = d[i, j]
            for k in range(j + 1, n):
                dik = d[i, k]
                djk = d[j, k]
                for l in range(k + 1, n):
                    v = _quad_defect(dij, d[k, l], dik, d[j, l], d[i, l], djk)
                    if v > b:
                        b = v
                        wj, wk, wl = j, k, l
        best[i] = b
        wit[i, 0] = wj
        wit[i, 1] = wk
        wit[i, 2] = wl
    return best, wit


def set_workers(workers: int) -> None:
    numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))


def _defects_at(d: np.ndarray, quad: list[int], p: int) -> np.ndarray:
    """Doubled defect of quad with slot p replaced by every vertex."""
    a, b, c = (quad[t] for t in range(4) if t != p)
    x = d[:, a], d[:, b], d[:, c]
    # pairings of {x, a, b, c}
    s = np.stack([x[0] + d[b, c], x[1] + d[a, c], x[2] + d[a, b]], axis=1)
    s.sort(axis=1)
    return s[:, 2] - s[:, 1]


def _climb(d: np.ndarray, quad: list[int], value: int) -> tuple[int, list[int]]:
    """Greedy single-slot improvement until no slot can be changed for a strict gain."""
    improved = True
    while improved:
        improved = False
        for p in range(4):
            v = _defects_at(d, quad, p)
            x = int(np.argmax(v))
            if v[x] > value:
                value, quad = int(v[x]), quad[:p] + [x] + quad[p + 1:]
                improved = True
    return value, quad


def four_point_delta_table(dist: np.ndarray, mode: str = "exact", samples: int = 1_000_000,
                           seed: int | None = None, workers: int | None = None,
                           refine: int = 64) -> DeltaReport:
    """Four-point constant of a finite (pseudo)metric given as an integer table.

    Sampled mode draws uniform quadruples, then hill-climbs from the
    ``refine`` best draws by swapping one point at a time.  Every value it
    reports is attained by a real quadruple, so it stays a lower bound.
    """
    d = np.ascontiguousarray(np.asarray(dist, dtype=np.int64))
    n = d.shape[0]
    if n and (d >= INF).any():
        raise SpaceError("four-point delta needs a connected space")
    if workers is not None:
        set_workers(workers)
    if mode == "exact":
        if n < 4:
            return DeltaReport(0, None, "exact", n=n)
        best, wit = _exact_scan(d)
        top = int(best.max())
        i = int(np.flatnonzero(best == top)[0])   # smallest i, then the scan's lex-first (j,k,l)
        return DeltaReport(top, (i, *map(int, wit[i])), "exact", n=n)
    if mode == "sampled":
        if seed is None:
            raise SpaceError("sampled mode needs an explicit seed")
        if n < 4:
            return DeltaReport(0, None, "sampled", samples, seed, n)
        rng = np.random.Generator(np.random.PCG64(seed))
        pool_v = np.zeros(0, dtype=np.int64)
        pool_q = np.zeros((0, 4), dtype=np.int64)
        done = 0
        chunk = 1 << 18
        while done < samples:
            m = min(chunk, samples - done)
            q = rng.integers(0, n, size=(m, 4))
            i, j, k, l = q.T
            s = np.stack([d[i, j] + d[k, l], d[i, k] + d[j, l], d[i, l] + d[j, k]], axis=1)
            s.sort(axis=1)
            pool_v = np.concatenate([pool_v, s[:, 2] - s[:, 1]])
            pool_q = np.concatenate([pool_q, q])
            keep = np.argsort(-pool_v, kind="stable")[:max(refine, 1)]
            pool_v, pool_q = pool_v[keep], pool_q[keep]
            done += m
        top, witness = int(pool_v[0]), [int(x) for x in pool_q[0]]
        for v0, q0 in zip(pool_v[:refine], pool_q[:refine]):
            v, q = _climb(d, [int(x) for x in q0], int(v0))
            if v > top:
                top, witness = v, q
        return DeltaReport(max(top, 0), tuple(witness), "sampled", samples, seed, n)
    raise ValueError(f"unknown mode {mode!r}")


def four_point_delta(space: FiniteGraphSpace, mode: str = "exact", samples: int = 1_000_000,
                     seed: int | None = None, workers: int | None = None) -> DeltaReport:
    if not space.connected:
        raise SpaceError("four-point delta needs a connected space")
    return four_point_delta_table(space.dist, mode, samples, seed, workers)


def geodesic(space: FiniteGraphSpace, x: int, y: int) -> list[int]:
    """Lexicographically least geodesic from x to y."""
    if space.d(x, y) is None:
        raise SpaceError("no path")
    path = [x]
    cur = x
    while cur != y:
        cur = next(u for u in space.adjacency[cur] if space.dist[u, y] == space.dist[cur, y] - 1)
        path.append(cur)
    return path


def tripod_thinness(space: FiniteGraphSpace, triples: Iterable[tuple[int, int, int]] | None = None) -> int:
    """Largest fibre diameter of the tripod map over canonical geodesic triangles (vertices only)."""
    triples = itertools.combinations(range(space.n), 3) if triples is None else triples
    worst = 0
    for x, y, z in triples:
        sides = {}
        for a, b in ((x, y), (y, z), (x, z)):
            p = geodesic(space, a, b)
            sides[(a, b)] = p
            sides[(b, a)] = p[::-1]
        for c, a, b in ((x, y, z), (y, x, z), (z, x, y)):
            reach = gromov_product2(space, a, b, c) // 2
            p, q = sides[(c, a)], sides[(c, b)]
            for t in range(reach + 1):
                worst = max(worst, int(space.dist[p[t], q[t]]))
    return worst


# ---------------------------------------------------------------- quasi-isometries

def default_k_grid() -> list[Fraction]:
    base = [Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(7, 4)]
    return sorted({b * 2 ** j for j in range(7) for b in base})


@dataclass
class QIReport:
    K: Fraction
    C: Fraction
    onto_C: Fraction | None
    grid: list
    embedding: bool

    def as_dict(self) -> dict:
        return {"K": str(self.K), "C": str(self.C),
                "onto_C": "inf" if self.onto_C is None else str(self.onto_C),
                "embedding": self.embedding, "k_grid": [str(k) for k in self.grid]}


def qi_constants(f: Sequence[int], X: FiniteGraphSpace, Y: FiniteGraphSpace,
                 grid: Sequence[Fraction] | None = None) -> QIReport:
    """Best (K, C) on a grid of K: C is minimal for each K, K chosen to minimise C (then K)."""
    grid = default_k_grid() if grid is None else [Fraction(k) for k in grid]
    f = np.asarray(f, dtype=np.int64)
    if len(f) != X.n:
        raise SpaceError("map must be defined on every vertex")
    if not X.connected or not Y.connected:
        raise SpaceError("quasi-isometry constants need connected spaces")
    dx = X.dist
    dy = Y.dist[np.ix_(f, f)]
    best = None
    for k in grid:
        p, q = k.numerator, k.denominator
        up = Fraction(int((q * dy - p * dx).max()), q) if X.n else Fraction(0)
        lo = Fraction(int((q * dx - p * dy).max()), p) if X.n else Fraction(0)
        c = max(up, lo, Fraction(0))
        if best is None or c < best[1]:
            best = (k, c)
    k, c = best
    image = np.unique(f)
    onto = Fraction(int(Y.dist[:, image].min(axis=1).max())) if Y.n else Fraction(0)
    diam = X.diameter or 0
    embedding = diam == 0 or Fraction(diam) / k - c > 0
    return QIReport(k, c, onto, list(grid), bool(embedding))


# ---------------------------------------------------------------- groups, Cayley balls, cones

class GroupOps:
    """Multiplication, inversion and identity on hashable element encodings."""

    identity: Hashable

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError


class PermGroup(GroupOps):
    def __init__(self, n: int):
        self.identity = tuple(range(n))

    def mul(self, a, b):
        # (a*b)(i) = a(b(i)): apply b first
        return tuple(a[i] for i in b)

    def inv(self, a):
        out = [0] * len(a)
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)


class MatrixGroup(GroupOps):
    """Invertible integer matrices (row-major tuples), optionally reduced mod m."""

    def __init__(self, size: int, modulus: int | None = None):
        self.size = size
        self.modulus = modulus
        self.identity = tuple(int(i == j) for i in range(size) for j in range(size))

    def reduce(self, a):
        return tuple(x % self.modulus for x in a) if self.modulus else tuple(a)

    def element(self, rows) -> tuple:
        return self.reduce(int(x) for row in rows for x in row)

    def mul(self, a, b):
        n = self.size
        out = [sum(a[i * n + k] * b[k * n + j] for k in range(n)) for i in range(n) for j in range(n)]
        return self.reduce(out)

    def inv(self, a):
        n = self.size
        if n == 2:
            det = a[0] * a[3] - a[1] * a[2]
            if self.modulus:
                di = pow(det % self.modulus, -1, self.modulus)
                return self.reduce((a[3] * di, -a[1] * di, -a[2] * di, a[0] * di))
            if abs(det) != 1:
                raise SpaceError("matrix is not invertible over Z")
            return (a[3] * det, -a[1] * det, -a[2] * det, a[0] * det)
        from sympy import Matrix
        m = Matrix(n, n, list(a))
        inv = m.inv_mod(self.modulus) if self.modulus else m.inv()
        if any(x.q != 1 for x in inv):
            raise SpaceError("matrix is not invertible over Z")
        return self.reduce(int(x) for x in inv)


@dataclass
class CayleyBall:
    space: FiniteGraphSpace
    elements: list
    word_length: list
    partial: bool
    group: GroupOps = field(repr=False)


def cayley_ball(group: GroupOps, generators: Sequence, radius: int,
                max_vertices: int = 2_000_000) -> CayleyBall:
    """Ball of the Cayley graph (right multiplication by generators)."""
    gens = [tuple(g) for g in generators]
    invs = {group.inv(g) for g in gens}
    if not invs <= set(gens):
        raise SpaceError("generating set must be closed under inverses")
    index = {group.identity: 0}
    elements = [group.identity]
    length = [0]
    frontier = [group.identity]
    partial = False
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in gens:
                h = group.mul(g, s)
                if h not in index:
                    index[h] = len(elements)
                    elements.append(h)
                    length.append(r)
                    nxt.append(h)
        frontier = nxt
        if len(elements) > max_vertices:
            partial = True
            break
        if not frontier:
            break
    edges = set()
    for i, g in enumerate(elements):
        for s in gens:
            j = index.get(group.mul(g, s))
            if j is not None and j != i:
                edges.add((min(i, j), max(i, j)))
    space = build_space(sorted(edges), len(elements), elements)
    return CayleyBall(space, elements, length, partial, group)


@dataclass
class ConedSpace:
    space: FiniteGraphSpace
    cones: list                     # (subgroup index, members)
    diameter: int | None


def coned_space(ball: CayleyBall, members: Sequence[Callable[[Hashable], bool]]) -> ConedSpace:
    """Cone off each left coset gP (intersected with the ball) to a new vertex."""
    group = ball.group
    elems = ball.elements
    n = len(elems)
    edges = set(ball.space.edges())
    cones = []
    for pi, member in enumerate(members):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        invs = [group.inv(g) for g in elems]
        for i in range(n):
            for j in range(i + 1, n):
                if find(i) != find(j) and member(group.mul(invs[i], elems[j])):
                    parent[find(j)] = find(i)
        classes: dict[int, list[int]] = {}
        for i in range(n):
            classes.setdefault(find(i), []).append(i)
        for root in sorted(classes):
            cls = classes[root]
            c = n + len(cones)
            cones.append((pi, cls))
            edges.update((v, c) for v in cls)
    labels = list(ball.space.labels or range(n)) + [f"cone{k}" for k in range(len(cones))]
    space = build_space(sorted(edges), n + len(cones), labels)
    return ConedSpace(space, cones, space.diameter)


# ---------------------------------------------------------------- fiber construction

@dataclass
class FiberSpace:
    A0: list
    A1: list
    metric: np.ndarray = field(repr=False)
    graph: FiniteGraphSpace = field(repr=False)
    J0: Fraction = Fraction(0)
    J1: Fraction = Fraction(0)
    J2: Fraction = Fraction(0)
    B_param: Fraction = Fraction(0)
    delta: Fraction = Fraction(0)
    K: Fraction = Fraction(1)
    C: Fraction = Fraction(0)
    action_size: int = 1
    equivariance_defect: int = 0

    def as_dict(self) -> dict:
        return {"J0": str(self.J0), "J1": str(self.J1), "J2": str(self.J2), "B": str(self.B_param),
                "delta": str(self.delta), "K": str(self.K), "C": str(self.C),
                "A0": len(self.A0), "A1": len(self.A1), "action_size": self.action_size,
                "equivariance_defect": self.equivariance_defect}


def close_permutations(generators: Sequence[tuple], degree_hint: Sequence[int] | None = None,
                       limit: int = 100_000) -> list[tuple]:
    """All products of the given permutation tuples (each element a tuple of per-space perms)."""
    if not generators:
        if degree_hint is None:
            raise SpaceError("need generators or sizes")
        return [tuple(tuple(range(k)) for k in degree_hint)]
    ident = tuple(tuple(range(len(p))) for p in generators[0])
    seen = {ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in generators:
            h = tuple(tuple(a[i] for i in b) for a, b in zip(s, g))
            if h not in seen:
                seen.add(h)
                order.append(h)
                queue.append(h)
                if len(order) > limit:
                    raise SpaceError("action set too large")
    return order


def fiber_space(V: FiniteGraphSpace, W: FiniteGraphSpace, X: FiniteGraphSpace,
                phi: Sequence[int], psi: Sequence[int], actions: Sequence[tuple],
                B_param, delta, K, C) -> FiberSpace:
    """A0, its orbit closure A1 with the sum pseudo-metric, and the threshold graph A.

    ``actions`` are generators given as (perm of V, perm of W, perm of X); the
    edge rule of A quantifies over the finite group they generate.
    """
    B_param, delta, K, C = (Fraction(x) for x in (B_param, delta, K, C))
    J0 = 2 * B_param + 2 * delta
    J1 = J0 + 2 * C
    J2 = 4 * J1
    group = close_permutations([tuple(map(tuple, a)) for a in actions], (V.n, W.n, X.n))
    phi = np.asarray(phi, dtype=np.int64)
    psi = np.asarray(psi, dtype=np.int64)
    defect = 0
    for gv, gw, gx in group:
        gv, gw, gx = map(np.asarray, (gv, gw, gx))
        defect = max(defect, int(X.dist[phi[gv], gx[phi]].max()), int(X.dist[psi[gw], gx[psi]].max()))
    cross = X.dist[np.ix_(phi, psi)]
    A0 = [(int(v), int(w)) for v, w in zip(*np.nonzero(cross <= J0))]
    if not A0:
        raise SpaceError("A0 is empty: the images are farther apart than J0")
    A1set = {(g[0][v], g[1][w]) for g in group for v, w in A0}
    A1 = sorted(A1set)
    pv = phi[[v for v, _ in A1]]
    pw = psi[[w for _, w in A1]]
    metric = X.dist[np.ix_(pv, pv)] + X.dist[np.ix_(pw, pw)]
    pos = {p: i for i, p in enumerate(A1)}
    edges = set()
    for g in group:
        img = np.array([pos[(g[0][v], g[1][w])] for v, w in A1])
        close = metric[np.ix_(img, img)] <= J2
        for i, j in zip(*np.nonzero(np.triu(close, 1))):
            edges.add((int(i), int(j)))
    graph = build_space(sorted(edges), len(A1), A1)
    return FiberSpace(A0, A1, metric, graph, J0, J1, J2, B_param, delta, K, C, len(group), defect)


@dataclass
class IotaCheck:
    pairs: int
    lower_violations: int
    upper_violations: int
    worst_lower: Fraction
    worst_upper: Fraction

    @property
    def ok(self) -> bool:
        return self.lower_violations == 0 and self.upper_violations == 0

    def as_dict(self) -> dict:
        return {"pairs": self.pairs, "lower_violations": self.lower_violations,
                "upper_violations": self.upper_violations, "ok": self.ok,
                "worst_lower_slack": str(self.worst_lower), "worst_upper_slack": str(self.worst_upper)}


def check_iota_bounds(F: FiberSpace) -> IotaCheck:
    """d_A >= 2 d / (3 J2) and d_A <= d / J1 + 2 on all pairs of A1."""
    dA = F.graph.dist
    d = F.metric
    n = len(F.A1)
    iu = np.triu_indices(n, 1)
    da, dd = dA[iu], d[iu]
    if (da >= INF).any():
        unreachable = int((da >= INF).sum())
        return IotaCheck(len(da), unreachable, unreachable, Fraction(-1), Fraction(-1))
    j2, j1 = F.J2, F.J1
    # lower: 3*J2*dA - 2*d >= 0, upper: J1*(dA - 2) - d <= 0, in exact rationals
    low_num = 3 * j2.numerator * da - 2 * dd * j2.denominator
    up = (j1.numerator * (da - 2)) - dd * j1.denominator
    lower_viol = int((low_num < 0).sum())
    upper_viol = int((up > 0).sum())
    worst_lower = Fraction(int(low_num.min()), j2.denominator) if len(da) else Fraction(0)
    worst_upper = Fraction(int(-up.min() if len(da) else 0), j1.denominator)
    return IotaCheck(len(da), lower_viol, upper_viol, worst_lower, worst_upper)


def two_lines_instance(length: int = 30, offset: int = 1, B_param=1, symmetric: bool = True):
    """Two copies of a path mapped isometrically into a longer path, shifted by offset.

    The optional action is the reflection of all three paths, which commutes
    with both maps.
    """
    V = path_graph(length)
    W = path_graph(length)
    X = path_graph(length + offset)
    phi = list(range(length))
    psi = [w + offset for w in range(length)]
    actions = []
    if symmetric:
        rv = tuple(length - 1 - i for i in range(length))
        rx = tuple(length + offset - 1 - i for i in range(length + offset))
        # psi(r w) = length - 1 - w + offset and r psi(w) = length + offset - 1 - w - offset
        actions.append((rv, rv, rx))
    delta_x = Fraction(four_point_delta(X).delta2, 2)
    return dict(V=V, W=W, X=X, phi=phi, psi=psi, actions=actions, B_param=B_param,
                delta=delta_x, K=1, C=offset if symmetric else 0)

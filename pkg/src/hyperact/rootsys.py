"""Reduced root systems with exact integer coordinates.

Classical realizations are used throughout: A_n lives in the sum-zero
hyperplane of Z^{n+1}, B_n/C_n/D_n in Z^n, and G_2 in the A_2 plane with
short roots of squared length 2 and long roots of squared length 6.  Every
coordinate is an integer, so inner products and Cartan integers are exact.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

Root = tuple[int, ...]


class RootSystemError(ValueError):
    """Unsupported family/rank or a vector that is not a root."""


class InternalContradiction(RuntimeError):
    """Raised when an exhaustive search that cannot fail does fail."""


class Rank2Class(str, enum.Enum):
    A1 = "A1"
    A1xA1 = "A1xA1"
    A2 = "A2"
    B2 = "B2"
    G2 = "G2"


_KIND_BY_SIZE = {2: Rank2Class.A1, 4: Rank2Class.A1xA1, 6: Rank2Class.A2,
                 8: Rank2Class.B2, 12: Rank2Class.G2}


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def add(u: Root, v: Root) -> Root:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Root, v: Root) -> Root:
    return tuple(a - b for a, b in zip(u, v))


def neg(u: Root) -> Root:
    return tuple(-a for a in u)


def scale(c: int, u: Root) -> Root:
    return tuple(c * a for a in u)


def fmt_root(r: Root) -> str:
    return "(" + ",".join(str(c) for c in r) + ")"


def parse_root(text: str) -> Root:
    body = text.strip().strip("()[]")
    return tuple(int(tok) for tok in body.replace(" ", "").split(",") if tok)


def _unit(n: int, i: int, c: int = 1) -> list[int]:
    v = [0] * n
    v[i] = c
    return v


def _classical(family: str, rank: int) -> tuple[list[Root], list[Root]]:
    n = rank
    roots: set[Root] = set()
    if family == "A":
        dim = n + 1
        for i, j in itertools.permutations(range(dim), 2):
            v = [0] * dim
            v[i], v[j] = 1, -1
            roots.add(tuple(v))
        simple = []
        for i in range(n):
            v = [0] * dim
            v[i], v[i + 1] = 1, -1
            simple.append(tuple(v))
        return sorted(roots), simple
    if family == "G":
        short = [(1, -1, 0), (-1, 1, 0), (1, 0, -1), (-1, 0, 1), (0, 1, -1), (0, -1, 1)]
        long_ = []
        for i in range(3):
            v = [-1, -1, -1]
            v[i] = 2
            long_ += [tuple(v), neg(tuple(v))]
        return sorted(short + long_), [(1, -1, 0), (-2, 1, 1)]
    # B, C, D share the +-e_i +- e_j roots
    for i, j in itertools.combinations(range(n), 2):
        for si, sj in itertools.product((1, -1), repeat=2):
            v = [0] * n
            v[i], v[j] = si, sj
            roots.add(tuple(v))
    simple = []
    for i in range(n - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        simple.append(tuple(v))
    if family == "B":
        for i in range(n):
            roots.add(tuple(_unit(n, i)))
            roots.add(tuple(_unit(n, i, -1)))
        simple.append(tuple(_unit(n, n - 1)))
    elif family == "C":
        for i in range(n):
            roots.add(tuple(_unit(n, i, 2)))
            roots.add(tuple(_unit(n, i, -2)))
        simple.append(tuple(_unit(n, n - 1, 2)))
    elif family == "D":
        v = [0] * n
        v[n - 2], v[n - 1] = 1, 1
        simple.append(tuple(v))
    return sorted(roots), simple


_COUNTS = {
    "A": lambda n: n * (n + 1),
    "B": lambda n: 2 * n * n,
    "C": lambda n: 2 * n * n,
    "D": lambda n: 2 * n * (n - 1),
    "G": lambda n: 12,
}


def classical_count(family: str, rank: int) -> int:
    return _COUNTS[family](rank)


def _supported(family: str, rank: int) -> bool:
    return ((family == "A" and rank >= 1) or (family in "BC" and rank >= 2)
            or (family == "D" and rank >= 4) or (family == "G" and rank == 2))


def gram_det(vectors: Sequence[Root]) -> int:
    """Exact Gram determinant (zero iff the vectors are linearly dependent)."""
    from fractions import Fraction
    k = len(vectors)
    m = [[Fraction(dot(u, v)) for v in vectors] for u in vectors]
    det = Fraction(1)
    for c in range(k):
        piv = next((r for r in range(c, k) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, k):
            f = m[r][c] / m[c][c]
            if f:
                for cc in range(c, k):
                    m[r][cc] -= f * m[c][cc]
    return int(det)


@dataclass(frozen=True, eq=False)
class RootSystem:
    family: str
    rank: int
    roots: tuple[Root, ...]
    simple_roots: tuple[Root, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {r: i for i, r in enumerate(self.roots)})

    def __contains__(self, v) -> bool:
        return tuple(v) in self._index

    def __iter__(self) -> Iterator[Root]:
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def label(self) -> str:
        return f"{self.family}{self.rank}" if self.family in "ABCDG" else self.family

    def index(self, r: Root) -> int:
        return self._index[tuple(r)]

    def require(self, *vs: Root) -> None:
        for v in vs:
            if tuple(v) not in self._index:
                raise RootSystemError(f"{fmt_root(tuple(v))} is not a root of {self.label}")

    @cached_property
    def simple_coords(self) -> dict[Root, tuple[int, ...]]:
        """Coefficients of every root in the simple-root basis."""
        coords: dict[Root, tuple[int, ...]] = {}
        k = len(self.simple_roots)
        frontier = []
        for i, a in enumerate(self.simple_roots):
            c = tuple(1 if j == i else 0 for j in range(k))
            coords[a] = c
            frontier.append(a)
        while frontier:
            nxt = []
            for r in frontier:
                for i, a in enumerate(self.simple_roots):
                    s = add(r, a)
                    if s in self._index and s not in coords:
                        coords[s] = tuple(x + (1 if j == i else 0) for j, x in enumerate(coords[r]))
                        nxt.append(s)
            frontier = nxt
        for r in list(coords):
            coords[neg(r)] = tuple(-x for x in coords[r])
        if len(coords) != len(self.roots):
            raise InternalContradiction(f"{self.label}: simple roots do not generate all roots")
        return coords

    @cached_property
    def positive_roots(self) -> tuple[Root, ...]:
        pos = [r for r in self.roots if sum(self.simple_coords[r]) > 0]
        return tuple(sorted(pos, key=lambda r: (self.height(r), r)))

    def height(self, r: Root) -> int:
        return sum(self.simple_coords[tuple(r)])

    def is_positive(self, r: Root) -> bool:
        return self.height(r) > 0

    def norm2(self, r: Root) -> int:
        return dot(r, r)

    @cached_property
    def cartan(self) -> dict[tuple[Root, Root], int]:
        return {(a, b): cartan_int(self, a, b) for a in self.roots for b in self.roots}

    @cached_property
    def cartan_matrix(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(cartan_int(self, a, b) for b in self.simple_roots)
                     for a in self.simple_roots)


def build_root_system(family: str, rank: int) -> RootSystem:
    family = family.upper()
    if not _supported(family, rank):
        raise RootSystemError(f"unsupported root system {family}{rank}")
    roots, simple = _classical(family, rank)
    phi = RootSystem(family, rank, tuple(roots), tuple(simple))
    if len(phi) != classical_count(family, rank):
        raise InternalContradiction(f"{phi.label}: {len(phi)} roots")
    return phi


def parse_system(name: str) -> RootSystem:
    name = name.strip().upper()
    try:
        return build_root_system(name[0], int(name[1:]))
    except (IndexError, ValueError) as exc:
        if isinstance(exc, RootSystemError):
            raise
        raise RootSystemError(f"cannot parse root system name {name!r}") from None


def cartan_int(phi: RootSystem, alpha: Root, beta: Root) -> int:
    """A(alpha, beta) = 2(beta, alpha)/(alpha, alpha)."""
    phi.require(alpha, beta)
    q, r = divmod(2 * dot(beta, alpha), dot(alpha, alpha))
    if r:
        raise InternalContradiction("non-integral Cartan pairing")
    return q


def root_string(phi: RootSystem, beta: Root, alpha: Root) -> tuple[int, int]:
    """(r, q) with beta - r alpha, ..., beta + q alpha the alpha-string through beta."""
    phi.require(alpha, beta)
    if tuple(beta) in (tuple(alpha), neg(tuple(alpha))):
        raise RootSystemError("root string undefined for proportional roots")
    r = 0
    while sub(beta, scale(r + 1, alpha)) in phi:
        r += 1
    q = 0
    while add(beta, scale(q + 1, alpha)) in phi:
        q += 1
    return r, q


def reflect(phi: RootSystem, alpha: Root, v: Root) -> Root:
    phi.require(alpha)
    q, r = divmod(2 * dot(v, alpha), dot(alpha, alpha))
    if r:
        raise RootSystemError("reflection leaves the root lattice")
    return sub(tuple(v), scale(q, alpha))


def span_roots(phi: RootSystem, vectors: Sequence[Root]) -> list[Root]:
    """All roots of phi lying in the linear span of the given vectors."""
    base = [tuple(v) for v in vectors]
    if gram_det(base) == 0 and len(base) == 2:
        base = base[:1]
    return [g for g in phi.roots if gram_det(base + [g]) == 0]


def _indecomposable(pos: Iterable[Root]) -> list[Root]:
    pos = list(pos)
    sums = {add(a, b) for a in pos for b in pos}
    return [r for r in pos if r not in sums]


def subsystem(phi: RootSystem, roots: Sequence[Root]) -> RootSystem:
    """Wrap a closed subset as a RootSystem, with simple roots induced from phi's positive system."""
    rs = sorted(set(tuple(r) for r in roots))
    kind = _KIND_BY_SIZE.get(len(rs)) if len(rs) <= 12 else None
    pos = [r for r in rs if phi.is_positive(r)]
    simple = sorted(_indecomposable(pos), key=lambda r: (phi.height(r), r))
    label = kind.value if kind is not None else f"rank{len(simple)}"
    return RootSystem(label, len(simple), tuple(rs), tuple(simple))


def rank2_subsystem(phi: RootSystem, alpha: Root, beta: Root) -> Rank2Class:
    phi.require(alpha, beta)
    alpha, beta = tuple(alpha), tuple(beta)
    if beta in (alpha, neg(alpha)):
        return Rank2Class.A1
    return _KIND_BY_SIZE[len(span_roots(phi, [alpha, beta]))]


def embed_pair(phi: RootSystem, alpha: Root, beta: Root) -> RootSystem:
    """A subsystem span(Phi') & Phi of rank 2 containing alpha and beta.

    For beta = +-alpha the subsystem is found by scanning every gamma; an
    A1xA1 witness is never returned in that case.
    """
    phi.require(alpha, beta)
    alpha, beta = tuple(alpha), tuple(beta)
    if len(phi.simple_roots) < 2:
        raise RootSystemError("embed_pair needs rank >= 2")
    if beta not in (alpha, neg(alpha)):
        return subsystem(phi, span_roots(phi, [alpha, beta]))
    for gamma in phi.roots:
        if gamma in (alpha, neg(alpha)):
            continue
        if rank2_subsystem(phi, alpha, gamma) is not Rank2Class.A1xA1:
            return subsystem(phi, span_roots(phi, [alpha, gamma]))
    raise InternalContradiction(f"no non-A1xA1 rank-2 subsystem contains {fmt_root(alpha)}")


def rank2_kind(sub: RootSystem) -> Rank2Class:
    return _KIND_BY_SIZE[len(sub.roots)]


def pair_table(phi: RootSystem) -> list[tuple[Root, Root, Rank2Class]]:
    return [(a, b, rank2_subsystem(phi, a, b)) for a in phi.roots for b in phi.roots]


SUPPORTED_EXAMPLES = ("A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "D5", "G2")

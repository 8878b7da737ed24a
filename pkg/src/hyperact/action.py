"""Group actions on finite graphs: displacement growth, classification and quasicharacters.

Generators are vertex maps stored as integer arrays.  On truncated spaces a
generator may be partial; -1 marks a vertex whose image leaves the space.
Words are strings over 'a', 'b', ... with upper case for inverses.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np

from .coarse import FiniteGraphSpace, GroupOps, cycle_graph, path_graph


class ActionError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


def _invert_map(g: np.ndarray) -> np.ndarray:
    inv = np.full(len(g), -1, dtype=np.int64)
    dom = np.flatnonzero(g >= 0)
    if len(np.unique(g[dom])) != len(dom):
        raise ActionError("generator is not injective")
    inv[g[dom]] = dom
    return inv


@dataclass(eq=False)
class GroupAction:
    space: FiniteGraphSpace
    generators: list = field(repr=False)
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        gens = [np.asarray(g, dtype=np.int64) for g in self.generators]
        for g in gens:
            if g.shape != (self.space.n,) or (g >= self.space.n).any() or (g < -1).any():
                raise ActionError("generator must map vertices to vertices (or -1)")
        self.generators = gens
        self._inverses = [_invert_map(g) for g in gens]
        if not self.labels:
            self.labels = [chr(97 + i) for i in range(len(gens))]

    def letter(self, ch: str) -> np.ndarray:
        i = ord(ch.lower()) - 97
        if not 0 <= i < len(self.generators):
            raise ActionError(f"unknown generator letter {ch!r}")
        return self._inverses[i] if ch.isupper() else self.generators[i]

    def apply(self, word: str, v: int) -> int:
        """Image of v under the word (rightmost letter acts first); -1 once the orbit leaves the space."""
        for ch in reversed(word):
            if v < 0:
                return -1
            v = int(self.letter(ch)[v])
        return v

    def power(self, word: str, k: int) -> str:
        if k >= 0:
            return word * k
        return invert_word(word) * (-k)

    def isometry_audit(self) -> list[tuple[int, int, int] | None]:
        """Per generator: None if d(gu,gv) = d(u,v) on all defined pairs, else a witness (gen, u, v)."""
        out = []
        d = self.space.dist
        for gi, g in enumerate(self.generators):
            dom = np.flatnonzero(g >= 0)
            img = g[dom]
            bad = d[np.ix_(img, img)] != d[np.ix_(dom, dom)]
            if bad.any():
                u, v = np.argwhere(bad)[0]
                out.append((gi, int(dom[u]), int(dom[v])))
            else:
                out.append(None)
        return out


def invert_word(word: str) -> str:
    return word[::-1].swapcase()


# ---------------------------------------------------------------- displacement growth

@dataclass
class Displacements:
    values: list[int]           # d(x0, g^n x0) for n = 1..len(values)
    requested: int

    @property
    def partial(self) -> bool:
        return len(self.values) < self.requested


def displacements(A: GroupAction, g: str, x0: int, N: int) -> Displacements:
    out = []
    v = x0
    for _ in range(N):
        v = A.apply(g, v)
        if v < 0:
            break
        out.append(int(A.space.dist[x0, v]))
    return Displacements(out, N)


@dataclass
class TranslationLength:
    estimate: Fraction          # d(x0, g^N x0) / N
    upper: Fraction             # min_n d(x0, g^n x0) / n
    N: int


def stable_translation_length(A: GroupAction, g: str, x0: int, N: int) -> TranslationLength:
    if N <= 0:
        raise ActionError("N must be positive")
    disp = displacements(A, g, x0, N)
    if disp.partial:
        raise ActionError(f"orbit leaves the space after {len(disp.values)} steps")
    vals = disp.values
    return TranslationLength(Fraction(vals[-1], N), min(Fraction(v, n) for n, v in enumerate(vals, 1)), N)


@dataclass
class Classification:
    label: str                  # elliptic | hyperbolic | unbounded-nonhyperbolic | inconclusive
    max_displacement: int
    ceiling: Fraction
    rate: Fraction              # best eps with d_n >= eps*n - ceiling for all n
    min_rate: Fraction
    late_growth: int            # d_N - d_ceil(N/2)
    N: int

    def as_dict(self) -> dict:
        return {"label": self.label, "max_displacement": str(self.max_displacement), "ceiling": str(self.ceiling),
                "rate": str(self.rate), "min_rate": str(self.min_rate), "late_growth": str(self.late_growth),
                "N": str(self.N)}


def classify_isometry(A: GroupAction, g: str, x0: int, N: int, delta4: Fraction | int = 0,
                      ceiling: Fraction | None = None, min_rate: Fraction | None = None) -> Classification:
    """Finite-scale isometry type.

    elliptic: every displacement stays under the ceiling (default 2*delta4 + 2).
    unbounded-nonhyperbolic: not elliptic, yet the second half of the orbit
    adds at most the ceiling to the displacement.
    hyperbolic: otherwise, when the largest eps with d_n >= eps*n - ceiling for
    all n is at least min_rate (default 1 / (4*delta4 + 4)).  That eps is the
    exact optimum of the two-variable linear program with the intercept capped
    at the ceiling.  Anything else is inconclusive.
    """
    if N <= 0:
        raise ActionError("N must be positive")
    delta4 = Fraction(delta4)
    ceiling = 2 * delta4 + 2 if ceiling is None else Fraction(ceiling)
    min_rate = Fraction(1) / (4 * delta4 + 4) if min_rate is None else Fraction(min_rate)
    disp = displacements(A, g, x0, N)
    vals = disp.values
    if disp.partial or not vals:
        return Classification("inconclusive", max(vals, default=0), ceiling, Fraction(0), min_rate, 0, N)
    top = max(vals)
    rate = min(Fraction(v + ceiling, n) for n, v in enumerate(vals, 1))
    late = vals[-1] - vals[(N + 1) // 2 - 1]
    if top <= ceiling:
        label = "elliptic"
    elif late <= ceiling:
        label = "unbounded-nonhyperbolic"
    elif rate >= min_rate:
        label = "hyperbolic"
    else:
        label = "inconclusive"
    return Classification(label, top, ceiling, rate, min_rate, late, N)


# ---------------------------------------------------------------- horofunctions and quasicharacters

@dataclass
class RaySpec:
    points: list[int]           # x_0, x_1, ..., x_M
    tail: int                   # number of final points forming the limsup window

    def window(self) -> list[int]:
        if not 1 <= self.tail <= len(self.points) - 1:
            raise ActionError("tail window must lie inside the ray")
        return self.points[-self.tail:]


def ray_is_monotone(space: FiniteGraphSpace, ray: RaySpec) -> bool:
    """Gromov products (x_i | x_j)_{x_0} nondecreasing along the tail window (doubled, exact)."""
    d = space.dist
    x0 = ray.points[0]
    start = len(ray.points) - ray.tail
    prods = []
    for i in range(start, len(ray.points) - 1):
        a, b = ray.points[i], ray.points[i + 1]
        prods.append(d[a, x0] + d[b, x0] - d[a, b])
    return all(p <= q for p, q in zip(prods, prods[1:]))


@dataclass
class HorofunctionValue:
    value: Fraction
    spread: int                 # max - min of the tail differences
    stable: bool


def quasi_horofunction(space: FiniteGraphSpace, ray: RaySpec, a: int, delta4: Fraction | int = 0) -> HorofunctionValue:
    """max over the tail window of d(a, x_n) - d(x_0, x_n), gated on a spread of at most 4*delta4."""
    d = space.dist
    x0 = ray.points[0]
    diffs = [int(d[a, x]) - int(d[x0, x]) for x in ray.window()]
    spread = max(diffs) - min(diffs)
    return HorofunctionValue(Fraction(max(diffs)), spread, spread <= 4 * Fraction(delta4))


@dataclass
class QuasicharReport:
    q: dict                     # word -> Fraction
    stable: dict                # word -> bool
    defect_observed: Fraction
    defect_witness: tuple | None
    delta4: Fraction

    @property
    def within_bound(self) -> bool:
        return self.defect_observed <= 16 * self.delta4


def quasicharacter_value(A: GroupAction, ray: RaySpec, g: str, delta4: Fraction | int = 0) -> HorofunctionValue:
    v = A.apply(g, ray.points[0])
    if v < 0:
        raise ActionError(f"{g!r} moves the basepoint out of the space")
    return quasi_horofunction(A.space, ray, v, delta4)


def quasicharacter(A: GroupAction, ray: RaySpec, elements: Sequence[str], delta4: Fraction | int = 0) -> QuasicharReport:
    """q(g) = eta(g x0) on the given elements and every pairwise product; defect audited on all pairs."""
    delta4 = Fraction(delta4)
    q, stable = {}, {}

    def val(w: str) -> Fraction:
        if w not in q:
            h = quasicharacter_value(A, ray, w, delta4)
            q[w], stable[w] = h.value, h.stable
        return q[w]

    worst, wit = Fraction(0), None
    for g in elements:
        for h in elements:
            gap = abs(val(g + h) - val(g) - val(h))
            if gap > worst:
                worst, wit = gap, (g, h)
    for g in elements:
        val(g)
    return QuasicharReport(q, stable, worst, wit, delta4)


@dataclass
class PseudocharReport:
    word: str
    N: int
    p: Fraction                 # q(g^N) / N
    error_bound: Fraction       # 16 delta4 / N
    classification: str
    consistent: bool
    eta: dict
    q: dict
    defect_observed: Fraction
    delta4: Fraction

    def as_dict(self) -> dict:
        return {"word": self.word, "N": str(self.N), "p": str(self.p), "error_bound": str(self.error_bound),
                "classification": self.classification, "consistent": self.consistent,
                "eta": {str(k): str(v) for k, v in sorted(self.eta.items())},
                "q": {k: str(v) for k, v in sorted(self.q.items())},
                "defect_observed": str(self.defect_observed), "delta": str(self.delta4)}


def pseudocharacter(A: GroupAction, ray: RaySpec, g: str, N: int, delta4: Fraction | int = 0,
                    audit: Sequence[str] | None = None, **classify_kw) -> PseudocharReport:
    """p = q(g^N)/N with error bound 16 delta4 / N, cross-checked against classify_isometry.

    Consistency means: hyperbolic exactly when |p| exceeds the error bound.
    """
    if N <= 0:
        raise ActionError("N must be positive")
    delta4 = Fraction(delta4)
    gN = A.power(g, N)
    if A.apply(gN, ray.points[0]) < 0:
        raise ActionError("g^N moves the basepoint out of the space")
    audit = list(audit) if audit is not None else [A.power(g, k) for k in (1, 2, N // 2) if k > 0]
    rep = quasicharacter(A, ray, sorted(set(audit)), delta4)
    qN = quasicharacter_value(A, ray, gN, delta4).value
    p = qN / N
    bound = 16 * delta4 / N
    cls = classify_isometry(A, g, ray.points[0], N, delta4, **classify_kw).label
    consistent = (abs(p) > bound) == (cls == "hyperbolic")
    eta = {A.apply(A.power(g, k), ray.points[0]): quasi_horofunction(A.space, ray, A.apply(A.power(g, k), ray.points[0]), delta4).value
           for k in range(0, min(N, 8) + 1)}
    q = dict(rep.q)
    q[gN if len(gN) <= 16 else f"{g}^{N}"] = qN
    return PseudocharReport(g, N, p, bound, cls, consistent, eta, q, rep.defect_observed, delta4)


# ---------------------------------------------------------------- bounded generation

def _closure(group: GroupOps, gens: Sequence[Hashable], budget: int) -> list:
    e = group.identity
    seen = {e}
    order = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for s in gens:
            for y in (group.mul(x, s), group.mul(x, group.inv(s))):
                if y not in seen:
                    seen.add(y)
                    order.append(y)
                    queue.append(y)
                    if len(seen) > budget:
                        raise BudgetExceeded(f"more than {budget} elements")
    return order


@dataclass
class BoundedGeneration:
    diameter: int | None        # None: the subgroups do not generate the group
    group_order: int
    subgroup_orders: list[int]
    sphere_sizes: list[int]

    def as_dict(self) -> dict:
        return {"diameter": None if self.diameter is None else str(self.diameter),
                "infinite": self.diameter is None, "group_order": str(self.group_order),
                "subgroup_orders": [str(o) for o in self.subgroup_orders],
                "sphere_sizes": [str(s) for s in self.sphere_sizes]}


def bounded_generation_diameter(group: GroupOps, group_generators: Sequence[Hashable],
                                subgroups: Sequence[Sequence[Hashable]], budget: int = 1_000_000) -> BoundedGeneration:
    """Diameter of the Cayley graph for the union of the listed subgroups.

    Each subgroup is given by generators and contributes all of its
    nontrivial elements.  The graph is vertex-transitive, so the identity's
    eccentricity is the diameter.
    """
    whole = _closure(group, group_generators, budget)
    subs = [_closure(group, gens, budget) for gens in subgroups]
    letters = sorted({x for s in subs for x in s if x != group.identity}, key=repr)
    dist = {group.identity: 0}
    frontier = [group.identity]
    spheres = [1]
    while frontier:
        nxt = []
        for x in frontier:
            for s in letters:
                y = group.mul(x, s)
                if y not in dist:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        if nxt:
            spheres.append(len(nxt))
        frontier = nxt
    diam = len(spheres) - 1 if len(dist) == len(whole) else None
    return BoundedGeneration(diam, len(whole), [len(s) for s in subs], spheres)


# ---------------------------------------------------------------- corpus instances

def line_shift(length: int, step: int = 1) -> GroupAction:
    X = path_graph(length)
    g = np.arange(length) + step
    g[(g < 0) | (g >= length)] = -1
    return GroupAction(X, [g], ["shift"])


def cycle_rotation(n: int, step: int = 1) -> GroupAction:
    X = cycle_graph(n)
    return GroupAction(X, [(np.arange(n) + step) % n], ["rotate"])


def horoball_translation(length: int, depth: int, step: int = 1) -> GroupAction:
    """Base translation of the exponential horoball over a path, acting level by level."""
    from .horoball import build_exponential_family, build_horoball
    base = path_graph(length)
    H = build_horoball(base, build_exponential_family(base, depth), depth)
    g = np.full(H.space.n, -1, dtype=np.int64)
    for n in range(depth + 1):
        for v in range(length - step if step > 0 else length):
            w = v + step
            if 0 <= w < length:
                g[H.vid(v, n)] = H.vid(w, n)
    return GroupAction(H.space, [g], ["translate"])

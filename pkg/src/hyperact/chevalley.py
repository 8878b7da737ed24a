"""Chevalley Z-forms, adjoint root elements and the identities they satisfy.

Structure constants are produced from the extraspecial-pair recipe: every
extraspecial pair gets the sign +, and all remaining N_{a,b} follow from the
standard relations between structure constants.  ``verify_basis`` re-checks
the result against the bracket rules and the full Jacobi identity, so a bad
sign anywhere shows up as a nonzero residual.

Group elements live in the adjoint representation on the Z-span of the
basis; matrices are numpy object arrays of Python ints so nothing overflows.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .rootsys import (
    InternalContradiction, Root, RootSystem, RootSystemError, add, cartan_int, dot,
    embed_pair, fmt_root, neg, reflect, root_string, sub,
)

Letter = tuple[Root, int]
COMMUTATOR_ORDERS = ("ghGH", "GHgh")


# ---------------------------------------------------------------- structure constants

def structure_constants(phi: RootSystem) -> dict[tuple[Root, Root], int]:
    """N_{a,b} for every pair of roots with a + b a root."""
    pos = phi.positive_roots
    order = {r: i for i, r in enumerate(pos)}
    table: dict[tuple[Root, Root], int] = {}

    def n_of(a: Root, b: Root) -> int:
        s = add(a, b)
        if s not in phi or not any(s):
            return 0
        pa, pb = phi.is_positive(a), phi.is_positive(b)
        if pa and pb:
            return table[(a, b)]
        if not pa and not pb:
            return -table[(neg(a), neg(b))]
        c = neg(s)  # a + b + c = 0, two of the three share a sign
        if phi.is_positive(b) == phi.is_positive(c):
            return Fraction(dot(c, c), dot(a, a)) * n_of(b, c)
        return Fraction(dot(c, c), dot(b, b)) * n_of(c, a)

    by_sum: dict[Root, list[tuple[Root, Root]]] = {}
    for a, b in itertools.permutations(pos, 2):
        if order[a] < order[b] and add(a, b) in phi:
            by_sum.setdefault(add(a, b), []).append((a, b))
    for xi in sorted(by_sum, key=lambda r: (phi.height(r), r)):
        pairs = sorted(by_sum[xi], key=lambda p: order[p[0]])
        a1, b1 = pairs[0]
        r1 = root_string(phi, b1, a1)[0]
        table[(a1, b1)] = r1 + 1
        table[(b1, a1)] = -(r1 + 1)
        for a, b in pairs[1:]:
            g, d = neg(a1), neg(b1)
            val = Fraction(0)
            if add(b, g) in phi:
                val += Fraction(n_of(b, g) * n_of(a, d), dot(add(b, g), add(b, g)))
            if add(g, a) in phi:
                val += Fraction(n_of(g, a) * n_of(b, d), dot(add(g, a), add(g, a)))
            nab = Fraction(dot(xi, xi), r1 + 1) * val
            if nab.denominator != 1 or nab == 0:
                raise InternalContradiction(f"bad structure constant for {fmt_root(a)},{fmt_root(b)}")
            table[(a, b)] = int(nab)
            table[(b, a)] = -int(nab)

    full = {}
    for a, b in itertools.permutations(phi.roots, 2):
        if add(a, b) in phi:
            v = n_of(a, b)
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise InternalContradiction("non-integral structure constant")
                v = int(v)
            full[(a, b)] = v
    return full


def coroot_coords(phi: RootSystem, alpha: Root) -> tuple[int, ...]:
    """H_alpha in the basis H_{alpha_1}, ..., H_{alpha_l} of simple coroots."""
    a = phi.simple_coords[alpha]
    out = []
    for ai, s in zip(a, phi.simple_roots):
        q, r = divmod(ai * dot(s, s), dot(alpha, alpha))
        if r:
            raise InternalContradiction("non-integral coroot")
        out.append(q)
    return tuple(out)


@dataclass(eq=False)
class ChevalleyZForm:
    system: RootSystem
    basis_labels: list[str]
    brackets: np.ndarray            # c[i, j, k]: [b_i, b_j] = sum_k c[i,j,k] b_k
    root_index: dict = field(repr=False)
    n_table: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def rank(self) -> int:
        return len(self.system.simple_roots)

    def x_index(self, alpha: Root) -> int:
        try:
            return self.root_index[tuple(alpha)]
        except KeyError:
            raise RootSystemError(f"{fmt_root(tuple(alpha))} is not a root") from None

    def h_index(self, i: int) -> int:
        return len(self.system.roots) + i

    def bracket(self, i: int, j: int) -> np.ndarray:
        return self.brackets[i, j]

    def h_vector(self, alpha: Root) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        for i, c in enumerate(coroot_coords(self.system, alpha)):
            v[self.h_index(i)] = c
        return v

    def bracket_vec(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", u, v, self.brackets)

    @cached_property
    def ad(self) -> np.ndarray:
        """ad[i] is the matrix of ad(b_i); column j holds [b_i, b_j]."""
        return np.ascontiguousarray(np.transpose(self.brackets, (0, 2, 1)))

    @cached_property
    def _divided_powers(self) -> dict[Root, list[np.ndarray]]:
        out = {}
        for alpha in self.system.roots:
            a = self.ad[self.x_index(alpha)]
            powers = [np.eye(self.dim, dtype=np.int64)]
            m, cur = 1, a.copy()
            while cur.any():
                q, r = np.divmod(cur, math.factorial(m))
                if r.any():
                    raise InternalContradiction("ad^m/m! not integral")
                powers.append(q)
                m += 1
                cur = cur @ a
                if m > self.dim + 1:
                    raise InternalContradiction("ad X_alpha is not nilpotent")
            out[alpha] = powers
        return out

    def nilpotency(self, alpha: Root) -> int:
        """Smallest m with ad(X_alpha)^m = 0."""
        return len(self._divided_powers[tuple(alpha)])

    def with_bracket(self, i: int, j: int, vec: Sequence[int]) -> "ChevalleyZForm":
        """Copy with [b_i, b_j] replaced (and [b_j, b_i] = -vec); used for fault injection."""
        c = self.brackets.copy()
        c[i, j] = np.asarray(vec, dtype=np.int64)
        c[j, i] = -np.asarray(vec, dtype=np.int64)
        return ChevalleyZForm(self.system, list(self.basis_labels), c, dict(self.root_index),
                              dict(self.n_table))


def chevalley_basis(phi: RootSystem) -> ChevalleyZForm:
    n_table = structure_constants(phi)
    roots = list(phi.roots)
    labels = [f"X{fmt_root(r)}" for r in roots] + [f"H{i + 1}" for i in range(len(phi.simple_roots))]
    dim = len(labels)
    index = {r: i for i, r in enumerate(roots)}
    c = np.zeros((dim, dim, dim), dtype=np.int64)
    nr = len(roots)
    for a in roots:
        ia = index[a]
        for b in roots:
            ib = index[b]
            s = add(a, b)
            if not any(s):
                for k, v in enumerate(coroot_coords(phi, a)):
                    c[ia, ib, nr + k] = v
            elif s in phi:
                c[ia, ib, index[s]] = n_table[(a, b)]
        for k, simple in enumerate(phi.simple_roots):
            v = cartan_int(phi, simple, a)
            c[nr + k, ia, ia] = v
            c[ia, nr + k, ia] = -v
    return ChevalleyZForm(phi, labels, c, index, n_table)


# ---------------------------------------------------------------- verification

@dataclass
class BasisReport:
    system: str
    dim: int
    antisymmetry: bool
    rule1: bool
    rule2: bool
    rule3: bool
    integral: bool
    jacobi_triples: int
    jacobi_failures: list = field(default_factory=list)
    n_values: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.antisymmetry and self.rule1 and self.rule2 and self.rule3 and self.integral
                and not self.jacobi_failures)


def verify_basis(L: ChevalleyZForm, max_failures: int = 20) -> BasisReport:
    phi = L.system
    c = L.brackets
    antisym = bool((c == -np.transpose(c, (1, 0, 2))).all())
    rule1 = all((c[L.x_index(a), L.x_index(neg(a))] == L.h_vector(a)).all() for a in phi.roots)
    rule2 = True
    for a in phi.roots:
        h = L.h_vector(a)
        for b in phi.roots:
            e = np.zeros(L.dim, dtype=np.int64)
            e[L.x_index(b)] = 1
            want = cartan_int(phi, a, b) * e
            if not (L.bracket_vec(h, e) == want).all():
                rule2 = False
    rule3 = True
    nvals = set()
    for a, b in itertools.permutations(phi.roots, 2):
        if b == neg(a):
            continue
        vec = c[L.x_index(a), L.x_index(b)]
        s = add(a, b)
        if s in phi:
            coef = int(vec[L.x_index(s)])
            other = vec.copy()
            other[L.x_index(s)] = 0
            r = root_string(phi, b, a)[0]
            nvals.add(coef)
            if abs(coef) != r + 1 or other.any():
                rule3 = False
        elif vec.any():
            rule3 = False
    # Jacobi: [x,[y,z]] + [y,[z,x]] + [z,[x,y]] over all basis triples
    yz = c                                              # [b_j, b_k] = c[j,k,:]
    t1 = np.einsum("jkm,imn->ijkn", yz, c)              # [b_i, [b_j, b_k]]
    jac = t1 + np.transpose(t1, (1, 2, 0, 3)) + np.transpose(t1, (2, 0, 1, 3))
    bad = np.argwhere(jac.any(axis=3))
    failures = [(tuple(int(x) for x in t), [int(v) for v in jac[tuple(t)]]) for t in bad[:max_failures]]
    return BasisReport(phi.label, L.dim, antisym, rule1, rule2, rule3,
                       bool(np.issubdtype(c.dtype, np.integer)), L.dim ** 3, failures, sorted(nvals))


# ---------------------------------------------------------------- group elements

def identity(n: int) -> np.ndarray:
    m = np.zeros((n, n), dtype=object)
    for i in range(n):
        m[i, i] = 1
    return m


def as_exact(m: np.ndarray) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in m], dtype=object)


def exp_root(L: ChevalleyZForm, alpha: Root, t: int) -> np.ndarray:
    """x_alpha(t) = sum_m t^m ad(X_alpha)^m / m! as an exact integer matrix."""
    powers = L._divided_powers[tuple(alpha)] if tuple(alpha) in L.root_index else None
    if powers is None:
        raise RootSystemError(f"{fmt_root(tuple(alpha))} is not a root")
    t = int(t)
    out = as_exact(powers[0])
    tm = 1
    for p in powers[1:]:
        tm *= t
        if tm:
            out = out + tm * as_exact(p)
    return out


def eval_word(L: ChevalleyZForm, word: Sequence[Letter]) -> np.ndarray:
    g = identity(L.dim)
    cache: dict[Letter, np.ndarray] = {}
    for root, t in word:
        key = (tuple(root), int(t))
        if key not in cache:
            cache[key] = exp_root(L, root, t)
        g = g @ cache[key]
    return g


def invert_word(word: Sequence[Letter]) -> list[Letter]:
    return [(r, -t) for r, t in reversed(word)]


def word_length(word: Sequence[Letter]) -> int:
    """Length in the alphabet {x_gamma(+-1)}."""
    return sum(abs(int(t)) for _, t in word)


def unit_letters(word: Sequence[Letter]) -> list[Letter]:
    out = []
    for r, t in word:
        s = 1 if t > 0 else -1
        out += [(tuple(r), s)] * abs(int(t))
    return out


def free_reduce(word: Sequence[Letter]) -> list[Letter]:
    out: list[Letter] = []
    for r, t in word:
        if out and out[-1][0] == r and out[-1][1] == -t:
            out.pop()
        else:
            out.append((tuple(r), t))
    return out


def determinant(m: np.ndarray) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [[int(x) for x in row] for row in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def commutator(g: np.ndarray, h: np.ndarray, order: str = "ghGH",
               g_inv: np.ndarray | None = None, h_inv: np.ndarray | None = None) -> np.ndarray:
    """ghg^-1h^-1 (order 'ghGH') or g^-1h^-1gh (order 'GHgh')."""
    if order not in COMMUTATOR_ORDERS:
        raise ValueError(f"unknown commutator order {order!r}")
    gi = g_inv if g_inv is not None else _unipotent_inverse(g)
    hi = h_inv if h_inv is not None else _unipotent_inverse(h)
    return g @ h @ gi @ hi if order == "ghGH" else gi @ hi @ g @ h


def _unipotent_inverse(g: np.ndarray) -> np.ndarray:
    # exact inverse via the adjugate is overkill; every element here has det 1, use sympy-free Gauss-Jordan
    n = g.shape[0]
    a = [[Fraction(int(x)) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(g)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            v = a[i][n + j]
            if v.denominator != 1:
                raise InternalContradiction("inverse is not integral")
            out[i, j] = int(v)
    return out


# ---------------------------------------------------------------- peeling into root factors

class FactorizationError(RuntimeError):
    def __init__(self, msg: str, residual: np.ndarray | None = None):
        super().__init__(msg)
        self.residual = residual


def leading_coefficient(L: ChevalleyZForm, g: np.ndarray, gamma: Root) -> int:
    """Coefficient c of x_gamma(c) read from the image of a simple coroot."""
    phi = L.system
    for j, s in enumerate(phi.simple_roots):
        a = cartan_int(phi, s, gamma)
        if a:
            entry = int(g[L.x_index(gamma), L.h_index(j)])
            q, r = divmod(-entry, a)
            if r:
                raise FactorizationError(f"non-integral coefficient for {fmt_root(gamma)}")
            return q
    raise InternalContradiction("root orthogonal to every simple root")


def peel(L: ChevalleyZForm, g: np.ndarray, roots: Sequence[Root]) -> list[int]:
    """Write g = prod_{gamma in roots} x_gamma(c_gamma) in the given order.

    ``roots`` must be ordered so that sums of two listed roots come later.
    Raises FactorizationError (carrying the leftover matrix) if g is not of
    that form.
    """
    coeffs = []
    rest = g
    for gamma in roots:
        c = leading_coefficient(L, rest, gamma)
        coeffs.append(c)
        if c:
            rest = exp_root(L, gamma, -c) @ rest
    if not _is_identity(rest):
        raise FactorizationError("matrix is not a product over the given roots", rest)
    return coeffs


def _is_identity(m: np.ndarray) -> bool:
    n = m.shape[0]
    return all(m[i, j] == (1 if i == j else 0) for i in range(n) for j in range(n))


def matrices_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and bool((a == b).all())


# ---------------------------------------------------------------- Steinberg relations

@dataclass
class SteinbergReport:
    system: str
    alpha: Root
    beta: Root
    order: str
    factors: list            # [(i, j, root)] in product order
    n_values: dict           # (i, j) -> N
    grid: int
    checked: int
    ok: bool
    message: str = ""
    residual: list | None = None

    def as_dict(self) -> dict:
        return {
            "system": self.system, "alpha": fmt_root(self.alpha), "beta": fmt_root(self.beta),
            "order": self.order, "grid": self.grid, "checked": self.checked, "ok": self.ok,
            "factors": [{"i": i, "j": j, "root": fmt_root(r), "N": self.n_values.get((i, j))}
                        for i, j, r in self.factors],
            "message": self.message,
        }


def steinberg_factors(phi: RootSystem, alpha: Root, beta: Root) -> list[tuple[int, int, Root]]:
    """(i, j, i alpha + j beta) for i, j > 0, ordered by height i + j then by i."""
    out = []
    for i in range(1, 4):
        for j in range(1, 4):
            r = add(tuple(i * x for x in alpha), tuple(j * x for x in beta))
            if r in phi:
                out.append((i, j, r))
    return sorted(out, key=lambda f: (f[0] + f[1], f[0]))


def steinberg_commutator(L: ChevalleyZForm, alpha: Root, beta: Root, grid: int = 3,
                         order: str = "ghGH", t: int | None = None, u: int | None = None
                         ) -> SteinbergReport:
    """Extract N_{alpha,beta,i,j} from [x_alpha(t), x_beta(u)] over t, u in [-grid, grid].

    Passing t and u checks a single point instead of the grid.
    """
    phi = L.system
    alpha, beta = tuple(alpha), tuple(beta)
    phi.require(alpha, beta)
    if beta in (alpha, neg(alpha)):
        raise RootSystemError("Steinberg relation needs beta != +-alpha")
    if order not in COMMUTATOR_ORDERS:
        raise ValueError(f"unknown commutator order {order!r}")
    factors = steinberg_factors(phi, alpha, beta)
    roots = [f[2] for f in factors]
    points = [(t, u)] if t is not None and u is not None else \
        [(a, b) for a in range(-grid, grid + 1) for b in range(-grid, grid + 1)]
    nvals: dict[tuple[int, int], int] = {}
    report = SteinbergReport(phi.label, alpha, beta, order, factors, nvals, grid, 0, True)
    for tt, uu in points:
        g, h = exp_root(L, alpha, tt), exp_root(L, beta, uu)
        comm = commutator(g, h, order, exp_root(L, alpha, -tt), exp_root(L, beta, -uu))
        try:
            coeffs = peel(L, comm, roots)
        except FactorizationError as exc:
            report.ok = False
            report.message = f"t={tt}, u={uu}: {exc}"
            report.residual = None if exc.residual is None else exc.residual.tolist()
            return report
        rhs = identity(L.dim)
        for (i, j, r), c in zip(factors, coeffs):
            rhs = rhs @ exp_root(L, r, c)
        if not matrices_equal(rhs, comm):
            report.ok = False
            report.message = f"t={tt}, u={uu}: recomposed product differs"
            return report
        report.checked += 1
        if tt == 0 or uu == 0:
            if any(coeffs):
                report.ok = False
                report.message = f"t={tt}, u={uu}: nontrivial commutator"
                return report
            continue
        for (i, j, r), c in zip(factors, coeffs):
            q, rem = divmod(c, tt ** i * uu ** j)
            if rem:
                report.ok = False
                report.message = f"t={tt}, u={uu}: {c} not divisible by t^{i}u^{j}"
                return report
            if nvals.setdefault((i, j), q) != q:
                report.ok = False
                report.message = f"N_{{{i},{j}}} depends on (t,u): {nvals[(i, j)]} vs {q}"
                return report
    return report


# ---------------------------------------------------------------- Weyl conjugation

@dataclass
class WeylReport:
    alpha: Root
    beta: Root
    t: int
    image: Root
    sign: int
    ok: bool

    def as_dict(self) -> dict:
        return {"alpha": fmt_root(self.alpha), "beta": fmt_root(self.beta), "t": self.t,
                "image": fmt_root(self.image), "sign": self.sign, "ok": self.ok}


def weyl_element(L: ChevalleyZForm, beta: Root) -> list[Letter]:
    return [(tuple(beta), 1), (neg(tuple(beta)), -1), (tuple(beta), 1)]


def weyl_conjugation_check(L: ChevalleyZForm, alpha: Root, beta: Root, t: int) -> WeylReport:
    """Check w_beta x_alpha(t) w_beta^-1 = x_{s_beta(alpha)}(+-t)."""
    phi = L.system
    alpha, beta = tuple(alpha), tuple(beta)
    phi.require(alpha, beta)
    w = weyl_element(L, beta)
    conj = eval_word(L, w) @ exp_root(L, alpha, t) @ eval_word(L, invert_word(w))
    image = reflect(phi, beta, alpha)
    for sign in (1, -1):
        if matrices_equal(conj, exp_root(L, image, sign * t)):
            return WeylReport(alpha, beta, t, image, sign if t else 0, True)
    return WeylReport(alpha, beta, t, image, 0, False)


# ---------------------------------------------------------------- distortion witnesses

def phi_expansion(n: int) -> dict[int, int]:
    """Greedy base-golden-ratio expansion of a nonnegative integer: n = sum_j phi^j over the keys.

    Elements of Z[phi] are pairs (a, b) meaning a + b*phi; comparisons are exact.
    """
    if n < 0:
        raise ValueError("expansion of a negative integer")

    def fib(k: int) -> int:
        if k < 0:
            return (-1) ** (-k + 1) * fib(-k)
        a, b = 0, 1
        for _ in range(k):
            a, b = b, a + b
        return a

    def power(j: int) -> tuple[int, int]:
        return fib(j - 1), fib(j)

    def sign(x: tuple[int, int]) -> int:
        # a + b phi = (2a + b + b sqrt5) / 2
        p, q = 2 * x[0] + x[1], x[1]
        if q == 0:
            return (p > 0) - (p < 0)
        if p >= 0 and q >= 0:
            return 1 if p or q else 0
        if p <= 0 and q <= 0:
            return -1
        lhs, rhs = p * p, 5 * q * q
        if lhs == rhs:
            return 0
        return (1 if p > 0 else -1) if lhs > rhs else (1 if q > 0 else -1)

    digits: dict[int, int] = {}
    rest = (n, 0)
    j = max(1, n.bit_length() * 2)
    while sign(rest) > 0:
        while sign((rest[0] - power(j)[0], rest[1] - power(j)[1])) < 0:
            j -= 1
        p = power(j)
        rest = (rest[0] - p[0], rest[1] - p[1])
        digits[j] = 1
        if len(digits) > 8 * (n.bit_length() + 4):
            raise InternalContradiction("base-phi expansion did not terminate")
    return digits


@dataclass
class LogWord:
    system: str
    alpha: Root
    n: int
    word: list
    length: int
    verified: bool
    subsystem: str
    strategy: str
    constants: tuple[int, int] = (8, 4)

    def as_dict(self) -> dict:
        return {"system": self.system, "alpha": fmt_root(self.alpha), "n": str(self.n),
                "length": self.length, "verified": self.verified, "subsystem": self.subsystem,
                "strategy": self.strategy, "c": self.constants[0], "c0": self.constants[1],
                "word": [[fmt_root(r), t] for r, t in self.word]}


class _WordBuilder:
    """Builds short words for x_gamma(c) inside one rank-2 subsystem.

    Roots with an A2 partner use a golden-ratio Horner scheme: conjugation by
    M = x_beta(e1) x_{-beta}(e2) acts on U = <x_gamma, x_{gamma+beta}> by a
    trace-3 matrix T, and Z^2 = Z[T] e_gamma is identified with Z[phi] so the
    base-phi expansion of c gives a word of length O(log c).  When U is not
    abelian (short roots of B2/G2) the same scheme fixes the abelianization
    and the leftover in [U, U] is cleared layer by layer with commutators of
    Horner elements, whose own leftovers are central one layer down.
    """

    DIRECT = 4

    def __init__(self, L: ChevalleyZForm, sub: RootSystem):
        self.L = L
        self.phi = L.system
        self.sub = sub
        self._t_cache: dict = {}

    # --- helpers
    def _in_sub(self, r: Root) -> bool:
        return r in self.sub

    def _string_partner(self, gamma: Root, abelian: bool | None = None) -> Root | None:
        """beta in sub with beta-string through gamma equal to {gamma, gamma+beta}."""
        cands = []
        for beta in self.sub.roots:
            if beta in (gamma, neg(gamma)):
                continue
            if root_string(self.phi, gamma, beta) != (0, 1):
                continue
            ab = add(add(gamma, gamma), beta) not in self.phi
            if abelian is None or ab == abelian:
                cands.append((not ab, beta))
        return min(cands)[1] if cands else None

    def _layer_roots(self, p: Root, q: Root) -> list[tuple[int, int, Root]]:
        out = []
        for i in range(0, 4):
            for j in range(0, 4):
                if i + j == 0:
                    continue
                r = add(tuple(i * x for x in p), tuple(j * x for x in q))
                if r in self.phi:
                    out.append((i, j, r))
        return sorted(out, key=lambda f: (f[0] + f[1], f[0]))

    def _setup(self, gamma: Root, beta: Root):
        key = (gamma, beta)
        if key in self._t_cache:
            return self._t_cache[key]
        L = self.L
        q = add(gamma, beta)
        layers = self._layer_roots(gamma, q)
        roots = [f[2] for f in layers]
        # action of x_beta(1) and x_{-beta}(1) on the abelianization
        def act(word):
            g = eval_word(L, word)
            gi = eval_word(L, invert_word(word))
            cols = []
            for r in (gamma, q):
                c = dict(zip(((i, j) for i, j, _ in layers), peel(L, g @ exp_root(L, r, 1) @ gi, roots)))
                cols.append((c[(1, 0)], c[(0, 1)]))
            return cols
        chosen = None
        for e1, e2 in itertools.product((1, -1), repeat=2):
            m = [(beta, e1), (neg(beta), e2)]
            cols = act(m)
            t11, t21 = cols[0]
            t12, t22 = cols[1]
            if t11 + t22 == 3 and abs(t21) == 1 and t11 == 1:
                chosen = (m, ((t11, t12), (t21, t22)))
                break
        if chosen is None:
            raise InternalContradiction(f"no hyperbolic conjugator for {fmt_root(gamma)}")
        self._t_cache[key] = (chosen[0], chosen[1], layers)
        return self._t_cache[key]

    def horner(self, gamma: Root, beta: Root, c: int) -> list[Letter]:
        """Word whose image in U/[U,U] is c * e_gamma."""
        if c == 0:
            return []
        m, t, _ = self._setup(gamma, beta)
        q = add(gamma, beta)
        s1 = t[1][0]
        digits = phi_expansion(abs(c))
        sgn = 1 if c > 0 else -1
        by_pow: dict[int, list[Letter]] = {}
        for j in digits:
            i = j // 2
            letter = (gamma, sgn) if j % 2 == 0 else (q, sgn * s1)
            by_pow.setdefault(i, []).append(letter)
        lo, hi = min(by_pow), max(by_pow)
        minv = invert_word(m)
        word: list[Letter] = []
        for _ in range(-lo):
            word += minv
        for i in range(lo, hi + 1):
            word += sorted(by_pow.get(i, []), key=lambda x: x[0] != gamma)
            if i < hi:
                word += m
        for _ in range(hi):
            word += minv
        return free_reduce(word)

    def a2_partner(self, gamma: Root) -> Root | None:
        """A partner beta for which U = <x_gamma, x_{gamma+beta}> is abelian."""
        for beta in self.phi.roots:
            if beta in (gamma, neg(gamma)) or root_string(self.phi, gamma, beta) != (0, 1):
                continue
            if all(i + j < 2 for i, j, _ in self._layer_roots(gamma, add(gamma, beta))):
                return beta
        return None

    # --- realizations
    def realize(self, gamma: Root, c: int, depth: int = 0) -> tuple[list[Letter], str]:
        gamma = tuple(gamma)
        if depth > 6:
            raise InternalContradiction("word construction recursed too deeply")
        if c == 0:
            return [], "empty"
        direct = [(gamma, c)]
        if abs(c) <= self.DIRECT:
            return direct, "direct"
        beta = self.a2_partner(gamma)
        if beta is not None:
            w = self.horner(gamma, beta, c)
            strat = "a2-horner"
        else:
            beta = self._string_partner(gamma)
            if beta is not None:
                w = self._layered(gamma, beta, c, depth)
                strat = "layered-horner"
            else:
                w = self._commutator_root(gamma, c, depth)
                strat = "commutator"
        if word_length(w) >= abs(c):
            return direct, "direct"
        return w, strat

    def _layered(self, gamma: Root, beta: Root, c: int, depth: int) -> list[Letter]:
        L = self.L
        _, _, layers = self._setup(gamma, beta)
        roots = [f[2] for f in layers]
        word = self.horner(gamma, beta, c)
        target = exp_root(L, gamma, c)
        for _ in range(4 * len(layers)):
            rest = _unipotent_inverse(eval_word(L, word)) @ target
            coeffs = peel(L, rest, roots)
            todo = [(f, k) for f, k in zip(layers, coeffs) if k]
            if not todo:
                return word
            (i, j, delta), k = todo[0]
            if i + j < 2:
                raise InternalContradiction("abelianization not matched")
            word += self._derived(gamma, beta, i, j, delta, k, depth)
        raise InternalContradiction("layer clearing did not converge")

    def _derived(self, gamma: Root, beta: Root, i: int, j: int, delta: Root, k: int,
                 depth: int) -> list[Letter]:
        """x_delta(k) modulo deeper layers, delta = i gamma + j (gamma + beta)."""
        if self.a2_partner(delta) is not None or abs(k) <= self.DIRECT:
            return self.realize(delta, k, depth + 1)[0]
        # delta = gamma + (gamma + beta): [H(m), x_{gamma+beta}(1)] = x_delta(N m) mod deeper
        if (i, j) != (1, 1):
            return self.realize(delta, k, depth + 1)[0]
        q = add(gamma, beta)
        n = self._commutator_n(gamma, q)
        m, rem = divmod(k, n)
        h = self.horner(gamma, beta, m)
        word = h + [(q, 1)] + invert_word(h) + [(q, -1)] if m else []
        word += [(delta, 1 if rem > 0 else -1)] * abs(rem)
        return word

    def _commutator_n(self, p: Root, q: Root) -> int:
        L = self.L
        rep = steinberg_commutator(L, p, q, t=1, u=1)
        return rep.n_values[(1, 1)]

    def _commutator_root(self, gamma: Root, c: int, depth: int) -> list[Letter]:
        # gamma = p + q with p, q short spanning a Heisenberg-type U over beta = q - p
        for p in self.sub.roots:
            q = sub(gamma, p)
            if q not in self.phi or p == q:
                continue
            beta = sub(q, p)
            if beta not in self.phi or root_string(self.phi, p, beta) != (0, 1):
                continue
            layers = self._layer_roots(p, q)
            if any(f[2] == gamma and (f[0], f[1]) == (1, 1) for f in layers):
                n = self._commutator_n(p, q)
                m, rem = divmod(c, n)
                h = self.horner(p, beta, m)
                word = (h + [(q, 1)] + invert_word(h) + [(q, -1)]) if m else []
                word += [(gamma, 1 if rem > 0 else -1)] * abs(rem)
                L = self.L
                rest = _unipotent_inverse(eval_word(L, word)) @ exp_root(L, gamma, c)
                roots = [f[2] for f in layers]
                coeffs = peel(L, rest, roots)
                for (i, j, delta), k in zip(layers, coeffs):
                    if k:
                        word += self.realize(delta, k, depth + 1)[0]
                return word
        raise InternalContradiction(f"no commutator decomposition for {fmt_root(gamma)}")


def logword(L: ChevalleyZForm, alpha: Root, n: int, verify: bool = True) -> LogWord:
    """Word in {x_gamma(+-1)} of length O(log n) evaluating to x_alpha(n)."""
    phi = L.system
    alpha = tuple(alpha)
    phi.require(alpha)
    if len(phi.simple_roots) < 2:
        raise RootSystemError("logword needs a root system of rank >= 2")
    if n <= 0:
        raise ValueError("n must be a positive integer")
    sub_sys = embed_pair(phi, alpha, neg(alpha))
    builder = _WordBuilder(L, sub_sys)
    word, strategy = builder.realize(alpha, n)
    word = unit_letters(free_reduce(word))
    ok = matrices_equal(eval_word(L, word), exp_root(L, alpha, n)) if verify else False
    if verify and not ok:
        raise InternalContradiction(f"logword for {fmt_root(alpha)}({n}) does not evaluate correctly")
    return LogWord(phi.label, alpha, n, word, len(word), ok, sub_sys.family, strategy)


# ---------------------------------------------------------------- BFS word metric

@dataclass
class BFSResult:
    length: int | None
    radius: int
    explored: int
    partial: bool

    @property
    def found(self) -> bool:
        return self.length is not None


def _keys(a: np.ndarray) -> np.ndarray:
    """Row keys (one opaque byte string per matrix) that sort and compare exactly."""
    flat = a.reshape(a.shape[0], -1)
    bound = int(np.abs(flat).max()) if flat.size else 0
    dt = np.int16 if bound < 2 ** 15 else np.int32 if bound < 2 ** 31 else np.int64
    flat = np.ascontiguousarray(flat.astype(">" + np.dtype(dt).str[1:]))
    return flat.view(np.dtype((np.void, flat.dtype.itemsize * flat.shape[1]))).ravel()


def _member(keys: np.ndarray, sorted_keys: np.ndarray) -> np.ndarray:
    if sorted_keys.size == 0 or keys.size == 0:
        return np.zeros(keys.shape, dtype=bool)
    if keys.dtype != sorted_keys.dtype:
        return np.zeros(keys.shape, dtype=bool)
    pos = np.searchsorted(sorted_keys, keys)
    pos[pos == sorted_keys.size] = 0
    return sorted_keys[pos] == keys


def bfs_spheres(generators: Sequence[np.ndarray], radius: int, max_states: int = 20_000_000,
                chunk: int = 250_000):
    """Spheres S_0..S_radius of the Cayley graph for a symmetric generating set.

    Returns (spheres, sorted sphere keys, partial).  Matrices are int64 and
    checked for overflow; keys are exact byte strings of the entries.
    """
    gens = np.stack([np.asarray(np.array(g, dtype=object).astype(np.int64)) for g in generators])
    n = gens.shape[1]
    spheres = [np.eye(n, dtype=np.int64)[None]]
    keys = [np.sort(_keys(spheres[0]))]
    total, partial = 1, False
    for _ in range(radius):
        cur = spheres[-1]
        if np.abs(cur).max() > 2 ** 20:
            raise OverflowError("entries too large for int64 BFS")
        parts = []
        for lo in range(0, len(cur), chunk):
            c = np.matmul(cur[lo:lo + chunk, None], gens[None]).reshape(-1, n, n)
            _, i = np.unique(_keys(c), return_index=True)
            parts.append(c[i])
        cand = np.concatenate(parts)
        uniq, idx = np.unique(_keys(cand), return_index=True)
        cand = cand[idx]
        fresh = ~_member(uniq, keys[-1])
        if len(keys) > 1:
            fresh &= ~_member(uniq, keys[-2])
        spheres.append(cand[fresh])
        keys.append(uniq[fresh])
        total += int(fresh.sum())
        if total > max_states:
            partial = True
            break
    return spheres, keys, partial


def bfs_word_lengths(generators: Sequence[np.ndarray], targets: Sequence[np.ndarray], radius: int,
                     max_states: int = 20_000_000) -> list[BFSResult]:
    """Exact word lengths of several targets, each reported only if at most radius.

    Meet in the middle: d(T) = min{a + b : S_a meets T * S_b}, so spheres up
    to radius/2 suffice and are shared across targets.  If the state budget
    runs out first, unresolved targets are flagged partial.
    """
    half = (radius + 1) // 2
    spheres, keys, partial = bfs_spheres(generators, half, max_states)
    explored = sum(len(s) for s in spheres)
    h = len(spheres) - 1
    out = []
    for target in targets:
        t = np.asarray(np.array(target, dtype=object).astype(np.int64))
        shifted: dict[int, np.ndarray] = {}

        def meets(a: int, b: int) -> bool:
            if b not in shifted:
                shifted[b] = _keys(np.matmul(t[None], spheres[b]))
            return bool(_member(shifted[b], keys[a]).any())

        found = None
        for r in range(radius + 1):
            if any(r - a <= h and meets(a, r - a) for a in range(min(r, h) + 1)):
                found = r
                break
        out.append(BFSResult(found, radius, explored, partial and found is None))
    return out


def bfs_word_length(generators: Sequence[np.ndarray], target: np.ndarray, radius: int,
                    max_states: int = 20_000_000) -> BFSResult:
    return bfs_word_lengths(generators, [target], radius, max_states)[0]


def root_generators(L: ChevalleyZForm, roots: Sequence[Root] | None = None) -> list[np.ndarray]:
    roots = L.system.roots if roots is None else roots
    return [exp_root(L, r, s) for r in roots for s in (1, -1)]

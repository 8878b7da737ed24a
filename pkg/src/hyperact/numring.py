"""Exact arithmetic in real and imaginary quadratic orders and SL(2, O) identities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form


class RingError(ValueError):
    pass


def is_squarefree(d: int) -> bool:
    n = abs(d)
    if n < 2:
        return n == 1
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


@dataclass(frozen=True)
class QuadOrder:
    """Ring of integers of Q(sqrt d) with integral basis (1, omega)."""
    d: int

    def __post_init__(self):
        if self.d in (0, 1) or not is_squarefree(self.d):
            raise RingError(f"d={self.d} must be a squarefree integer other than 0, 1")

    @property
    def half(self) -> bool:
        """True when omega = (1 + sqrt d)/2."""
        return self.d % 4 == 1

    @property
    def trace_omega(self) -> int:
        return 1 if self.half else 0

    @property
    def norm_omega(self) -> int:
        return (1 - self.d) // 4 if self.half else -self.d

    def __call__(self, a: int, b: int = 0) -> "QuadInt":
        return QuadInt(self, int(a), int(b))

    @property
    def one(self) -> "QuadInt":
        return self(1)

    @property
    def zero(self) -> "QuadInt":
        return self(0)

    @property
    def omega(self) -> "QuadInt":
        return self(0, 1)

    @property
    def integral_basis(self) -> tuple["QuadInt", "QuadInt"]:
        return self.one, self.omega

    def label(self) -> str:
        return f"O(sqrt {self.d})"

    def real(self, x: "QuadInt") -> float:
        s = math.sqrt(self.d) if self.d > 0 else float("nan")
        w = (1 + s) / 2 if self.half else s
        return x.a + x.b * w


@dataclass(frozen=True)
class QuadInt:
    """a + b*omega."""
    ring: QuadOrder
    a: int
    b: int

    def _lift(self, other) -> "QuadInt":
        if isinstance(other, QuadInt):
            if other.ring != self.ring:
                raise RingError("elements of different rings")
            return other
        if isinstance(other, int):
            return QuadInt(self.ring, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return QuadInt(self.ring, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(self.ring, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        # omega^2 = tr*omega - nm
        tr, nm = self.ring.trace_omega, self.ring.norm_omega
        bb = self.b * o.b
        return QuadInt(self.ring, self.a * o.a - nm * bb, self.a * o.b + self.b * o.a + tr * bb)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.ring.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "QuadInt":
        # conj(omega) = tr - omega
        return QuadInt(self.ring, self.a + self.b * self.ring.trace_omega, -self.b)

    def norm(self) -> int:
        tr, nm = self.ring.trace_omega, self.ring.norm_omega
        return self.a * self.a + tr * self.a * self.b + nm * self.b * self.b

    def trace(self) -> int:
        return 2 * self.a + self.ring.trace_omega * self.b

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def inverse(self) -> "QuadInt":
        n = self.norm()
        if abs(n) != 1:
            raise RingError(f"{self} is not a unit (norm {n})")
        c = self.conj()
        return QuadInt(self.ring, c.a * n, c.b * n)

    def divide(self, other: "QuadInt") -> "QuadInt | None":
        """Exact quotient self/other in O, or None if it is not integral."""
        o = self._lift(other)
        n = o.norm()
        if n == 0:
            raise RingError("division by zero")
        num = self * o.conj()
        if num.a % n or num.b % n:
            return None
        return QuadInt(self.ring, num.a // n, num.b // n)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        w = "w"
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}{w}"
        return f"{self.a}{'+' if self.b > 0 else '-'}{abs(self.b)}{w}"

    def as_pair(self) -> list[str]:
        return [str(self.a), str(self.b)]


def parse_quadint(ring: QuadOrder, text: str) -> QuadInt:
    """Accepts 'a,b' (a + b*omega) or a plain integer."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return ring(int(parts[0]))
    if len(parts) == 2:
        return ring(int(parts[0]), int(parts[1]))
    raise RingError(f"cannot parse ring element {text!r}")


# ---------------------------------------------------------------- units

def _cf_convergents(d: int, p0: int, q0: int):
    """Convergents of the quadratic irrational (p0 + sqrt d)/q0 with q0 | d - p0^2."""
    s = math.isqrt(d)
    P, Q = p0, q0
    h_prev, h = 1, 0
    k_prev, k = 0, 1
    while True:
        a = (P + s) // Q
        h_prev, h = a * h_prev + h, h_prev
        k_prev, k = a * k_prev + k, k_prev
        yield h_prev, k_prev
        P = a * Q - P
        Q = (d - P * P) // Q


def fundamental_unit(d: int, max_terms: int = 100_000) -> QuadInt:
    """Smallest unit > 1 of the real quadratic order, from the continued fraction of omega."""
    if d < 2:
        raise RingError("fundamental unit needs a real quadratic field (d >= 2)")
    ring = QuadOrder(d)
    p0, q0 = (1, 2) if ring.half else (0, 1)
    for i, (p, q) in enumerate(_cf_convergents(d, p0, q0)):
        # p - q*conj(omega) is large when p/q is close to omega
        x = QuadInt(ring, p - q * ring.trace_omega, q)
        if abs(x.norm()) == 1 and ring.real(x) > 1:
            return x
        if i > max_terms:
            break
    raise RingError(f"no unit found for d={d}")


def unit_powers(u: QuadInt, exps: Iterable[int], signs: Iterable[int] = (1, -1)) -> list[QuadInt]:
    return [s * u ** e for e in exps for s in signs]


# ---------------------------------------------------------------- 2x2 matrices

@dataclass(frozen=True)
class Mat2:
    a: QuadInt
    b: QuadInt
    c: QuadInt
    d: QuadInt

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def det(self) -> QuadInt:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mat2":
        det = self.det()
        if det != det.ring.one:
            raise RingError("only determinant-one matrices are inverted")
        return Mat2(self.d, -self.b, -self.c, self.a)

    def as_lists(self) -> list:
        return [[self.a.as_pair(), self.b.as_pair()], [self.c.as_pair(), self.d.as_pair()]]


def upper(x: QuadInt) -> Mat2:
    r = x.ring
    return Mat2(r.one, x, r.zero, r.one)


def lower(x: QuadInt) -> Mat2:
    r = x.ring
    return Mat2(r.one, r.zero, x, r.one)


def diag(t: QuadInt) -> Mat2:
    r = t.ring
    return Mat2(t, r.zero, r.zero, t.inverse())


def identity2(ring: QuadOrder) -> Mat2:
    return Mat2(ring.one, ring.zero, ring.zero, ring.one)


def commutator2(g: Mat2, h: Mat2) -> Mat2:
    """g h g^-1 h^-1."""
    return g @ h @ g.inverse() @ h.inverse()


ElemLetter = tuple[str, QuadInt]   # ("U", x) is upper(x), ("L", x) is lower(x)


def eval_elementary(ring: QuadOrder, word: Sequence[ElemLetter]) -> Mat2:
    m = identity2(ring)
    for kind, x in word:
        m = m @ (upper(x) if kind == "U" else lower(x))
    return m


def antidiag_word(lam: QuadInt) -> list[ElemLetter]:
    """[[0, lam], [-lam^-1, 0]] as upper(lam) lower(-lam^-1) upper(lam)."""
    return [("U", lam), ("L", -lam.inverse()), ("U", lam)]


@dataclass
class DiagDecomposition:
    t: QuadInt
    word: list
    ok: bool

    def as_dict(self) -> dict:
        return {"t": self.t.as_pair(), "ok": self.ok,
                "word": [[k, x.as_pair()] for k, x in self.word]}


def verify_diag_decomposition(ring: QuadOrder, t: QuadInt) -> DiagDecomposition:
    """diag(t, t^-1) = antidiag(t) * antidiag(-1) written with six elementary letters."""
    if not t.is_unit():
        raise RingError(f"{t} is not a unit")
    word = antidiag_word(t) + antidiag_word(-ring.one)
    return DiagDecomposition(t, word, eval_elementary(ring, word) == diag(t))


@dataclass
class UnitCommutator:
    omega: QuadInt
    lam: QuadInt
    value: QuadInt          # (1 - omega^2) lam
    ok: bool
    reverse_value: QuadInt  # entry of [diag, upper] in the same convention

    def as_dict(self) -> dict:
        return {"omega": self.omega.as_pair(), "lambda": self.lam.as_pair(),
                "entry": self.value.as_pair(), "reverse_entry": self.reverse_value.as_pair(),
                "ok": self.ok}


def verify_unit_commutator(ring: QuadOrder, omega: QuadInt, lam: QuadInt) -> UnitCommutator:
    """Check [upper(lam), diag(omega, omega^-1)] = upper((1 - omega^2) lam) with [g,h] = ghg^-1h^-1.

    The opposite order gives the inverse, upper((omega^2 - 1) lam); both are
    computed and reported.
    """
    if not omega.is_unit():
        raise RingError(f"{omega} is not a unit")
    want = (1 - omega * omega) * lam
    c = commutator2(upper(lam), diag(omega))
    rev = commutator2(diag(omega), upper(lam))
    ok = c == upper(want) and rev == upper(-want)
    return UnitCommutator(omega, lam, want, ok, rev.b)


# ---------------------------------------------------------------- ideals

@dataclass
class IdealZModule:
    ring: QuadOrder
    generators: list
    z_basis: list            # 2x2 integer matrix, columns are basis vectors in (1, omega) coordinates

    @property
    def norm(self) -> int:
        (a, b), (c, d) = self.z_basis
        return abs(a * d - b * c)

    def contains(self, x: QuadInt) -> bool:
        (a, b), (c, d) = self.z_basis
        det = a * d - b * c
        # solve [[a, b], [c, d]] (u, v) = (x.a, x.b)
        u = Fraction(d * x.a - b * x.b, det)
        v = Fraction(-c * x.a + a * x.b, det)
        return u.denominator == 1 and v.denominator == 1

    def conductor_of(self, x: QuadInt) -> int:
        """Smallest k > 0 with k*x in the ideal."""
        (a, b), (c, d) = self.z_basis
        det = a * d - b * c
        u = Fraction(d * x.a - b * x.b, det)
        v = Fraction(-c * x.a + a * x.b, det)
        return math.lcm(u.denominator, v.denominator)


def ideal(ring: QuadOrder, gens: Sequence[QuadInt]) -> IdealZModule:
    gens = [g for g in gens]
    cols = []
    for g in gens:
        for h in (g, g * ring.omega):
            cols.append([h.a, h.b])
    if not any(c[0] or c[1] for c in cols):
        raise RingError("the zero ideal has infinite index")
    hnf = hermite_normal_form(Matrix(cols).T)
    if hnf.shape[1] < 2:
        raise InternalRankError("ideal spans a rank-1 lattice")
    basis = [[int(hnf[i, j]) for j in range(2)] for i in range(2)]
    return IdealZModule(ring, gens, basis)


class InternalRankError(RuntimeError):
    pass


def ideal_norm(ring: QuadOrder, gens: Sequence[QuadInt]) -> int:
    """|O/I| for the ideal generated by gens, from the canonical form of its Z-module."""
    return ideal(ring, gens).norm


# ---------------------------------------------------------------- stubborn elements

@dataclass
class StubbornWitness:
    lam: QuadInt
    unit: QuadInt
    k: int                    # norm of the ideal (2(1 - u^2))
    witnessed_k: int          # smallest k' with upper(k' lam) a commutator of the listed generators
    r: QuadInt                # upper(witnessed_k lam) = [upper(2r), diag(u^2, u^-2)]
    word: list
    evaluates: bool

    @property
    def claim_witnessed(self) -> bool:
        return self.witnessed_k > 0 and self.k % self.witnessed_k == 0

    def as_dict(self) -> dict:
        return {"lambda": self.lam.as_pair(), "unit": self.unit.as_pair(), "k": str(self.k),
                "witnessed_k": str(self.witnessed_k), "claim_witnessed": self.claim_witnessed,
                "r": self.r.as_pair(), "evaluates": self.evaluates,
                "word": [[kind, x.as_pair()] for kind, x in self.word]}


def stubborn_witness(ring: QuadOrder, lam: QuadInt, unit: QuadInt | None = None) -> StubbornWitness:
    """Exponent k and a commutator word for upper(k lam) in <diag(u^2,u^-2), upper(2O)>.

    k is the norm of (2(1 - u^2)).  Commutators of the listed generators reach
    exactly upper(2(1 - u^4) O), so the word certifies the smallest k' with
    k' lam in that ideal; claim_witnessed records whether k' divides k.
    """
    if ring.d < 2:
        raise RingError("stubborn witnesses need infinitely many units")
    u = fundamental_unit(ring.d) if unit is None else unit
    if lam.is_zero():
        return StubbornWitness(lam, u, 1, 1, ring.zero, [], True)
    k = ideal_norm(ring, [2 * (1 - u * u)])
    u2 = u * u
    reach = 2 * (1 - u2 * u2)
    kw = ideal(ring, [reach]).conductor_of(lam)
    r = (kw * lam).divide(reach)
    if r is None:
        raise RingError("conductor computation is inconsistent")
    two_r = 2 * r
    word = [("U", two_r), ("D", u2), ("U", -two_r), ("D", u2.inverse())]
    m = identity2(ring)
    for kind, x in word:
        m = m @ (upper(x) if kind == "U" else diag(x))
    return StubbornWitness(lam, u, k, kw, r, word, m == upper(kw * lam))

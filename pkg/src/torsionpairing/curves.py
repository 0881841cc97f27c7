"""Exact elliptic curve arithmetic over Q on the long Weierstrass model

    y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6.

The group law is the standard chord-tangent law; torsion is computed
completely using Mazur's bound: reduction counts at a few good primes bound
the order, then rational roots of division polynomials (in terms of the
b-invariants, valid on the long model directly) locate the points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (
    AmbiguousModel,
    NonTorsion,
    OrderTooSmall,
    WildPrime,
)
from .polroots import rational_roots
from .qtensor import SMALL_PRIMES, factor_int

MAZUR_ORDERS = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 12)
# the 15 groups (d1, d2) allowed over Q
MAZUR_STRUCTURES = tuple((d, 1) for d in MAZUR_ORDERS) + tuple(
    (2 * k, 2) for k in (1, 2, 3, 4)
)


@dataclass(frozen=True)
class Point:
    """A rational point: affine (x, y) or the point at infinity O."""

    x: Fraction | None
    y: Fraction | None

    @staticmethod
    def infinity() -> "Point":
        return Point(None, None)

    @staticmethod
    def of(x, y) -> "Point":
        return Point(Fraction(x), Fraction(y))

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


O = Point.infinity()


class Curve:
    """Immutable long Weierstrass curve over Q with nonzero discriminant."""

    __slots__ = ("a1", "a2", "a3", "a4", "a6", "b2", "b4", "b6", "b8", "c4", "c6", "disc")

    def __init__(self, a1, a2, a3, a4, a6):
        self.a1 = Fraction(a1)
        self.a2 = Fraction(a2)
        self.a3 = Fraction(a3)
        self.a4 = Fraction(a4)
        self.a6 = Fraction(a6)
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        self.c4 = self.b2 * self.b2 - 24 * self.b4
        self.c6 = -self.b2**3 + 36 * self.b2 * self.b4 - 216 * self.b6
        self.disc = (
            -self.b2 * self.b2 * self.b8
            - 8 * self.b4**3
            - 27 * self.b6 * self.b6
            + 9 * self.b2 * self.b4 * self.b6
        )
        if self.disc == 0:
            raise ValueError("singular Weierstrass equation")

    @property
    def a_invariants(self) -> tuple[Fraction, ...]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def j(self) -> Fraction:
        return self.c4**3 / self.disc

    def __eq__(self, other) -> bool:
        return isinstance(other, Curve) and self.a_invariants == other.a_invariants

    def __hash__(self) -> int:
        return hash(self.a_invariants)

    def __repr__(self) -> str:
        return "Curve(" + ", ".join(str(a) for a in self.a_invariants) + ")"

    # -- point predicates -------------------------------------------------

    def on_curve(self, P: Point) -> bool:
        if P.is_infinity:
            return True
        x, y = P.x, P.y
        return (
            y * y + self.a1 * x * y + self.a3 * y
            == x**3 + self.a2 * x * x + self.a4 * x + self.a6
        )

    def partial_y(self, P: Point) -> Fraction:
        return 2 * P.y + self.a1 * P.x + self.a3

    def partial_x(self, P: Point) -> Fraction:
        return self.a1 * P.y - 3 * P.x * P.x - 2 * self.a2 * P.x - self.a4

    def is_two_torsion(self, P: Point) -> bool:
        return (not P.is_infinity) and self.partial_y(P) == 0

    # -- group law --------------------------------------------------------

    def neg(self, P: Point) -> Point:
        if P.is_infinity:
            return P
        return Point(P.x, -P.y - self.a1 * P.x - self.a3)

    def add(self, P: Point, Q: Point) -> Point:
        if P.is_infinity:
            return Q
        if Q.is_infinity:
            return P
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if x1 == x2:
            if y1 + y2 + self.a1 * x2 + self.a3 == 0:
                return O
            lam = self.tangent_slope(P)
            nu = y1 - lam * x1
        else:
            lam = (y2 - y1) / (x2 - x1)
            nu = (y1 * x2 - y2 * x1) / (x2 - x1)
        x3 = lam * lam + self.a1 * lam - self.a2 - x1 - x2
        y3 = -(lam + self.a1) * x3 - nu - self.a3
        return Point(x3, y3)

    def tangent_slope(self, P: Point) -> Fraction:
        """Slope of the tangent at a non-2-torsion affine point."""
        return -self.partial_x(P) / self.partial_y(P)

    def mul(self, n: int, P: Point) -> Point:
        if n < 0:
            return self.mul(-n, self.neg(P))
        R = O
        Q = P
        while n:
            if n & 1:
                R = self.add(R, Q)
            Q = self.add(Q, Q)
            n >>= 1
        return R

    def point_order(self, P: Point, bound: int = 12) -> int:
        """Least n <= bound with n*P = O; NonTorsion otherwise (complete
        over Q for bound = 12 by Mazur's theorem)."""
        if not self.on_curve(P):
            raise ValueError(f"{P} is not on {self}")
        R = P
        for n in range(1, bound + 1):
            if R.is_infinity:
                return n
            R = self.add(R, P)
        raise NonTorsion(f"{P} has order > {bound}")


def group_law(op: str, curve: Curve, *args):
    """Functional surface over the chord-tangent law: add, negate, scalar_mul."""
    if op == "add":
        P, Q = args
        return curve.add(P, Q)
    if op == "negate":
        (P,) = args
        return curve.neg(P)
    if op == "scalar_mul":
        n, P = args
        return curve.mul(n, P)
    raise ValueError(f"unknown op {op!r}")


def point_order(curve: Curve, P: Point) -> int:
    return curve.point_order(P)


# -- polynomials over Q (dense, low-to-high coefficient lists) -------------


def _pmul(f: list[Fraction], g: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] += a * b
    return out


def _padd(f, g):
    n = max(len(f), len(g))
    return [
        (f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0) for i in range(n)
    ]


def _psub(f, g):
    return _padd(f, [-c for c in g])


def _pscale(f, c):
    return [a * c for a in f]


@lru_cache(maxsize=None)
def _division_tables(curve: Curve, upto: int):
    """psi_n as (odd part, y-part) data: for odd n the polynomial psi_n(x);
    for even n the polynomial g_n with psi_n = psi_2 * g_n, where
    psi_2^2 = B2(x) = 4x^3 + b2 x^2 + 2 b4 x + b6."""
    b2, b4, b6, b8 = curve.b2, curve.b4, curve.b6, curve.b8
    B2 = [b6, 2 * b4, b2, Fraction(4)]
    B2sq = _pmul(B2, B2)
    psi: dict[int, list[Fraction]] = {}  # odd index -> poly
    g: dict[int, list[Fraction]] = {}  # even index -> poly
    psi[1] = [Fraction(1)]
    psi[3] = [b8, 3 * b6, 3 * b4, b2, Fraction(3)]
    g[0] = [Fraction(0)]
    g[2] = [Fraction(1)]
    g[4] = [
        b4 * b8 - b6 * b6,
        b2 * b8 - b4 * b6,
        10 * b8,
        10 * b6,
        5 * b4,
        b2,
        Fraction(2),
    ]

    def P(n):  # psi_n as (poly, parity) accessor helpers
        return psi[n] if n % 2 else g[n]

    for n in range(5, upto + 1):
        if n % 2:
            m = (n - 1) // 2
            if m % 2 == 0:
                # psi_{m+2} psi_m^3 = B2^2 g_{m+2} g_m^3 ; second term odd*odd
                t1 = _pmul(B2sq, _pmul(g[m + 2], _pmul(g[m], _pmul(g[m], g[m]))))
                t2 = _pmul(psi[m - 1], _pmul(psi[m + 1], _pmul(psi[m + 1], psi[m + 1])))
            else:
                t1 = _pmul(psi[m + 2], _pmul(psi[m], _pmul(psi[m], psi[m])))
                t2 = _pmul(B2sq, _pmul(g[m - 1], _pmul(g[m + 1], _pmul(g[m + 1], g[m + 1]))))
            psi[n] = _psub(t1, t2)
        else:
            m = n // 2
            if m % 2 == 0:
                inner = _psub(
                    _pmul(g[m + 2], _pmul(psi[m - 1], psi[m - 1])),
                    _pmul(g[m - 2], _pmul(psi[m + 1], psi[m + 1])),
                )
                g[n] = _pmul(g[m], inner)
            else:
                inner = _psub(
                    _pmul(psi[m + 2], _pmul(g[m - 1], g[m - 1])),
                    _pmul(psi[m - 2], _pmul(g[m + 1], g[m + 1])),
                )
                g[n] = _pmul(psi[m], inner)
    return psi, g, B2


def division_polynomial(curve: Curve, n: int) -> list[Fraction]:
    """Polynomial in x (low-to-high) whose rational roots are exactly the
    x-coordinates of the affine points of order dividing n.

    For odd n this is psi_n; for even n it is B2 * g_n where psi_n =
    psi_2 * g_n and psi_2^2 = B2 = 4x^3 + b2 x^2 + 2 b4 x + b6.
    """
    if not 2 <= n <= 12:
        raise ValueError("n must be in 2..12")
    psi, g, B2 = _division_tables(curve, n)
    if n % 2:
        return list(psi[n])
    return _pmul(B2, g[n])


def _duplication_numerator(curve: Curve) -> list[Fraction]:
    # x(2P) = (x^4 - b4 x^2 - 2 b6 x - b8) / B2(x)
    return [-curve.b8, -2 * curve.b6, -curve.b4, Fraction(0), Fraction(1)]


def _y_candidates(curve: Curve, x: Fraction) -> list[Point]:
    """Rational points of the curve with the given x-coordinate."""
    # y^2 + (a1 x + a3) y - (x^3 + a2 x^2 + a4 x + a6) = 0
    b = curve.a1 * x + curve.a3
    c = -(x**3 + curve.a2 * x * x + curve.a4 * x + curve.a6)
    disc = b * b - 4 * c
    if disc < 0:
        return []
    num, den = disc.numerator, disc.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return []
    root = Fraction(rn, rd)
    ys = {(-b + root) / 2, (-b - root) / 2}
    return [Point(x, y) for y in ys]


def _integral_model(curve: Curve) -> tuple[Curve, Fraction]:
    """Scale (x,y) -> (u^2 x, u^3 y) so all a-invariants become integers."""
    den = 1
    for i, a in zip((1, 2, 3, 4, 6), curve.a_invariants):
        d = a.denominator
        # need den^i divisible by d; den = lcm of all denominators suffices
        den = den * d // math.gcd(den, d)
    u = Fraction(1, den)
    scaled = Curve(*(a / u**i for i, a in zip((1, 2, 3, 4, 6), curve.a_invariants)))
    return scaled, u


def _count_points_mod_p(curve: Curve, p: int) -> int:
    """|E(F_p)| for an odd good prime p on an integral model."""
    b2 = int(curve.b2) % p
    b4 = int(curve.b4) % p
    b6 = int(curve.b6) % p
    count = 1 + p
    e = (p - 1) // 2
    for x in range(p):
        v = (((4 * x + b2) * x + 2 * b4) * x + b6) % p
        if v == 0:
            continue
        count += 1 if pow(v, e, p) == 1 else -1
    return count


def torsion_order_bound(curve: Curve, primes: int = 6) -> int:
    """gcd of |E(F_p)| over several good primes; a multiple of |E(Q)_tors|."""
    model, _ = _integral_model(curve)
    disc_num = abs(model.disc.numerator)
    bound = 0
    used = 0
    for p in SMALL_PRIMES:
        if p < 5 or disc_num % p == 0:
            continue
        bound = math.gcd(bound, _count_points_mod_p(model, p))
        used += 1
        if used >= primes or bound == 1:
            break
    return bound


@dataclass(frozen=True)
class TorsionGroup:
    d1: int
    d2: int
    gen1: Point
    gen2: Point | None
    elements: tuple[Point, ...]

    @property
    def order(self) -> int:
        return self.d1 * self.d2

    def label(self) -> str:
        return f"{self.d1}x2" if self.d2 == 2 else str(self.d1)


def _halve(curve: Curve, T: Point) -> list[Point]:
    """All rational points Q with 2Q = T (T affine)."""
    dup = _duplication_numerator(curve)
    b2, b4, b6 = curve.b2, curve.b4, curve.b6
    B2 = [b6, 2 * b4, b2, Fraction(4)]
    poly = _psub(dup, _pscale(B2, T.x))
    out = []
    for x in rational_roots(poly):
        for Q in _y_candidates(curve, x):
            if curve.add(Q, Q) == T:
                out.append(Q)
    return out


def _trisect(curve: Curve, R: Point) -> list[Point]:
    """All rational points Q with 3Q = R (R affine of order 3)."""
    psi, g, B2 = _division_tables(curve, 4)
    psi3 = psi[3]
    # phi_3 = x psi_3^2 - psi_4 psi_2 = x psi_3^2 - B2 g_4
    phi3 = _psub(_pmul([Fraction(0), Fraction(1)], _pmul(psi3, psi3)), _pmul(B2, g[4]))
    poly = _psub(phi3, _pscale(_pmul(psi3, psi3), R.x))
    out = []
    for x in rational_roots(poly):
        for Q in _y_candidates(curve, x):
            if curve.mul(3, Q) == R:
                out.append(Q)
    return out


def torsion_subgroup(curve: Curve) -> TorsionGroup:
    """The full rational torsion subgroup with verified structure.

    Candidate orders are pruned by reduction counts; points of 2-power order
    come from the 2-division cubic and successive halvings, odd-order points
    from psi_p (p = 3, 5, 7) and trisection for 9.  Completeness within each
    step: every point of order 4 (resp. 8) halves to a rational 2-torsion
    (resp. order-4) point, and every order-9 point trisects to an order-3 one.
    """
    bound = torsion_order_bound(curve)
    found: set[Point] = {O}

    if bound % 2 == 0:
        b2, b4, b6 = curve.b2, curve.b4, curve.b6
        cubic = [b6, 2 * b4, b2, Fraction(4)]
        two_tors = []
        for x in rational_roots(cubic):
            for P in _y_candidates(curve, x):
                if curve.is_two_torsion(P):
                    two_tors.append(P)
        found.update(two_tors)
        if bound % 4 == 0:
            four_tors = [Q for T in two_tors for Q in _halve(curve, T)]
            found.update(four_tors)
            if bound % 8 == 0:
                found.update(Q for S in four_tors for Q in _halve(curve, S))

    odd_ps = [p for p in (3, 5, 7) if bound % p == 0]
    for p in odd_ps:
        pts = []
        for x in rational_roots(division_polynomial(curve, p)):
            pts.extend(_y_candidates(curve, x))
        found.update(pts)
        if p == 3 and bound % 9 == 0:
            for R in pts:
                found.update(_trisect(curve, R))

    # close under the group law (Mazur caps the size at 16)
    elements = {O}
    frontier = set(found)
    while frontier:
        P = frontier.pop()
        new = {curve.add(P, Q) for Q in elements} | {P}
        fresh = new - elements
        elements |= fresh
        frontier |= fresh
        if len(elements) > 16:
            raise NonTorsion("torsion closure exceeded Mazur's bound (bug)")

    orders = {P: curve.point_order(P) for P in elements}
    n = len(elements)
    d1 = max(orders.values())
    assert n % d1 == 0
    d2 = n // d1
    if (d1, d2) not in MAZUR_STRUCTURES:
        raise NonTorsion(f"structure ({d1},{d2}) outside Mazur's list (bug)")
    gen1 = min((P for P, o in orders.items() if o == d1), key=_point_key)
    gen2 = None
    if d2 == 2:
        cyc = {curve.mul(k, gen1) for k in range(d1)}
        gen2 = min(
            (P for P, o in orders.items() if o == 2 and P not in cyc), key=_point_key
        )
    return TorsionGroup(d1, d2, gen1, gen2, tuple(sorted(elements, key=_point_key)))


def _point_key(P: Point):
    if P.is_infinity:
        return (0, 0, 0)
    return (1, P.x, P.y)


# -- model transformations ---------------------------------------------------


@dataclass(frozen=True)
class Transform:
    """Change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + w."""

    u: Fraction
    r: Fraction
    s: Fraction
    w: Fraction

    @staticmethod
    def identity() -> "Transform":
        return Transform(Fraction(1), Fraction(0), Fraction(0), Fraction(0))

    def compose(self, other: "Transform") -> "Transform":
        """self followed by other (both in source-to-target direction)."""
        u1, r1, s1, w1 = self.u, self.r, self.s, self.w
        u2, r2, s2, w2 = other.u, other.r, other.s, other.w
        return Transform(
            u1 * u2,
            r1 + u1 * u1 * r2,
            s1 + u1 * s2,
            w1 + u1 * u1 * s1 * r2 + u1**3 * w2,
        )

    def apply_curve(self, curve: Curve) -> Curve:
        u, r, s, w = self.u, self.r, self.s, self.w
        a1, a2, a3, a4, a6 = curve.a_invariants
        return Curve(
            (a1 + 2 * s) / u,
            (a2 - s * a1 + 3 * r - s * s) / u**2,
            (a3 + r * a1 + 2 * w) / u**3,
            (a4 - s * a3 + 2 * r * a2 - (w + r * s) * a1 + 3 * r * r - 2 * s * w) / u**4,
            (a6 + r * a4 + r * r * a2 + r**3 - w * a3 - w * w - r * w * a1) / u**6,
        )

    def apply_point(self, P: Point) -> Point:
        if P.is_infinity:
            return P
        u, r, s, w = self.u, self.r, self.s, self.w
        x = (P.x - r) / u**2
        y = (P.y - s * (P.x - r) - w) / u**3
        return Point(x, y)

    def invert_point(self, P: Point) -> Point:
        if P.is_infinity:
            return P
        u, r, s, w = self.u, self.r, self.s, self.w
        x = u * u * P.x + r
        y = u**3 * P.y + s * u * u * P.x + w
        return Point(x, y)


def tate_normal_form(curve: Curve, P: Point) -> tuple[Fraction, Fraction, Transform]:
    """Unique (a, b) with (curve, P) isomorphic to
    (y^2 + (1+a)xy + by = x^3 + bx^2, (0,0)); P must have order >= 4."""
    order = curve.point_order(P)
    if order <= 3:
        raise OrderTooSmall(f"point has order {order} <= 3")
    t1 = Transform(Fraction(1), P.x, Fraction(0), P.y)
    c1 = t1.apply_curve(curve)
    assert c1.a6 == 0 and c1.a3 != 0
    t2 = Transform(Fraction(1), Fraction(0), c1.a4 / c1.a3, Fraction(0))
    c2 = t2.apply_curve(c1)
    assert c2.a4 == 0 and c2.a2 != 0
    t3 = Transform(c2.a3 / c2.a2, Fraction(0), Fraction(0), Fraction(0))
    c3 = t3.apply_curve(c2)
    assert c3.a2 == c3.a3 and c3.a4 == 0 and c3.a6 == 0
    tr = t1.compose(t2).compose(t3)
    return c3.a1 - 1, c3.a2, tr


def tate_curve_of(a, b) -> Curve:
    """The Tate normal form y^2 + (1+a)xy + by = x^3 + bx^2."""
    a, b = Fraction(a), Fraction(b)
    return Curve(1 + a, b, b, 0, 0)


# -- invariants and reduction ------------------------------------------------


def val_p(r: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if r == 0:
        raise ValueError("valuation of zero")
    v = 0
    num = r.numerator
    while num % p == 0:
        num //= p
        v += 1
    den = r.denominator
    while den % p == 0:
        den //= p
        v -= 1
    return v


def model_invariants(curve: Curve) -> tuple[Fraction, Fraction, list[int]]:
    """(j, disc, bad_prime_superset); the superset is the set of primes
    dividing the discriminant of the integer-scaled model."""
    model, _ = _integral_model(curve)
    primes = sorted(factor_int(abs(model.disc.numerator)))
    return curve.j, curve.disc, primes


def divides_integral_disc(curve: Curve, p: int) -> bool:
    """Whether p lies in the bad-prime superset, without factoring."""
    model, _ = _integral_model(curve)
    return model.disc.numerator % p == 0


def p_integral_model(curve: Curve, p: int) -> Curve:
    """Rescale so all a-invariants are p-integral."""
    m = 0
    for i, a in zip((1, 2, 3, 4, 6), curve.a_invariants):
        if a != 0:
            v = val_p(a, p)
            if v < 0:
                m = max(m, (-v + i - 1) // i)
    if m == 0:
        return curve
    u = Fraction(1, p**m)
    return Transform(u, Fraction(0), Fraction(0), Fraction(0)).apply_curve(curve)


def reduce_model_at(curve: Curve, p: int) -> Curve:
    """p-integralize, then strip factors of p^12 from the discriminant while
    (c4, c6, disc) valuations permit; for p >= 5 the result is p-minimal."""
    cur = p_integral_model(curve, p)
    while True:
        vc4 = val_p(cur.c4, p) if cur.c4 != 0 else 10**9
        vc6 = val_p(cur.c6, p) if cur.c6 != 0 else 10**9
        vd = val_p(cur.disc, p)
        if vc4 >= 4 and vc6 >= 6 and vd >= 12:
            cur = Transform(Fraction(p), Fraction(0), Fraction(0), Fraction(0)).apply_curve(cur)
        else:
            return cur


@dataclass(frozen=True)
class MultiplicativeReduction:
    n: int
    split: bool


def multiplicative_reduction_data(curve: Curve, p: int) -> MultiplicativeReduction | None:
    """Certify multiplicative reduction from the given model (p >= 5).

    Returns None for NotMultiplicative (v_p(j) >= 0).  With v_p(j) < 0 the
    model certifies type I_n, n = -v_p(j), exactly when v_p(c4) = 0; a model
    with v_p(c4) > 0 cannot decide I_n against its quadratic twist, so
    AmbiguousModel is raised and the caller must supply a better model
    (see reduce_model_at).
    """
    if p < 5:
        raise WildPrime(f"p = {p} is not handled (need p >= 5)")
    model = p_integral_model(curve, p)
    j = model.j
    if j == 0 or val_p(j, p) >= 0:
        return None
    if val_p(model.c4, p) > 0:
        raise AmbiguousModel(f"v_{p}(c4) > 0 on the given model")
    n = -val_p(j, p)
    c6_unit = -model.c6 / Fraction(p) ** val_p(model.c6, p)
    assert val_p(c6_unit, p) == 0
    num = c6_unit.numerator % p
    den_inv = pow(c6_unit.denominator % p, p - 2, p)
    residue = num * den_inv % p
    split = pow(residue, (p - 1) // 2, p) == 1
    return MultiplicativeReduction(n=n, split=split)

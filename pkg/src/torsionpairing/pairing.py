"""The divisor-theoretic pairing oracle.

Given rational torsion points P, Q on E/Q, builds f with div(f) = n(P)-n(O)
by Miller's double-and-add, extracts leading coefficients at Q and O with
respect to canonical uniformizers, and assembles

    <P, Q> = tensor_of( lc_Q(f) / lc_O(f), 1/n )  in  Q^x (x) Q/Z.

f is never expanded: it is kept as a formal product of lines, verticals and
constants, and the leading coefficient of a product is the product of the
factors' leading coefficients at a common uniformizer.  Leading coefficients
at a point where a factor vanishes come from a short local expansion of the
curve; at O the canonical uniformizer x/y gives every line and vertical the
leading coefficient 1, so no expansion is needed there.

Canonical uniformizers: x - x0 at a finite point unless it is 2-torsion
(where the curve's y-partial vanishes), then y - y0; x/y at O.  Alternate
choices are available for the well-definedness cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import Curve, O, Point, TorsionGroup, torsion_subgroup
from .errors import (
    DivisibilityViolation,
    NonTorsion,
    NonTorsionClass,
    NonZeroDegree,
    NotAnnihilated,
)
from .qtensor import (
    FactoredRational,
    QmodZ,
    TensorClass,
    factor_rational,
    tensor_of,
)

# factor keys: ("v", c) is x - c; ("l", lam, nu) is y - lam*x - nu;
# ("c", k) is the constant k


class FactoredFunction:
    """A rational function on a curve as a formal product of degree <= 1
    factors with integer exponents."""

    __slots__ = ("factors",)

    def __init__(self, factors: dict | None = None):
        self.factors = {k: e for k, e in (factors or {}).items() if e}

    def times(self, key, exp: int = 1) -> "FactoredFunction":
        out = dict(self.factors)
        out[key] = out.get(key, 0) + exp
        return FactoredFunction(out)

    def mul(self, other: "FactoredFunction") -> "FactoredFunction":
        out = dict(self.factors)
        for k, e in other.factors.items():
            out[k] = out.get(k, 0) + e
        return FactoredFunction(out)

    def pow(self, n: int) -> "FactoredFunction":
        return FactoredFunction({k: e * n for k, e in self.factors.items()})

    def inv(self) -> "FactoredFunction":
        return self.pow(-1)

    def __repr__(self) -> str:
        return f"FactoredFunction({self.factors})"


ONE = FactoredFunction()


def vertical(c) -> tuple:
    return ("v", Fraction(c))

def line(lam, nu) -> tuple:
    return ("l", Fraction(lam), Fraction(nu))

def constant(k) -> tuple:
    return ("c", Fraction(k))


def _line_through(curve: Curve, A: Point, B: Point):
    """Key of the chord/tangent through A, B (both affine, A+B != O)."""
    if A == B:
        lam = curve.tangent_slope(A)
    else:
        lam = (B.y - A.y) / (B.x - A.x)
    return line(lam, A.y - lam * A.x)


def _addition_factors(curve: Curve, f: FactoredFunction, V: Point, W: Point):
    """Multiply f by l_{V,W} / v_{V+W} and return (f', V+W)."""
    if V.is_infinity:
        return f, W
    if W.is_infinity:
        return f, V
    S = curve.add(V, W)
    if S.is_infinity:
        return f.times(vertical(V.x)), S
    if V == W and curve.is_two_torsion(V):
        # tangent at 2-torsion is the vertical; S = O handled above
        raise AssertionError("unreachable: doubling 2-torsion lands at O")
    key = _line_through(curve, V, W)
    return f.times(key).times(vertical(S.x), -1), S


def miller_function(curve: Curve, P: Point, n: int) -> FactoredFunction:
    """Formal factored f with div(f) = n(P) - n(O); requires nP = O."""
    if n < 1:
        raise ValueError("n must be positive")
    if not curve.on_curve(P):
        raise ValueError(f"{P} is not on the curve")
    if not curve.mul(n, P).is_infinity:
        raise NotAnnihilated(f"{n}*P is not O")
    if P.is_infinity or n == 1:
        return ONE
    f = ONE
    V = P
    for bit in bin(n)[3:]:
        f, V = _addition_factors(curve, f.pow(2), V, V)
        if bit == "1":
            f, V = _addition_factors(curve, f, V, P)
    assert V.is_infinity
    return f


# -- local expansions --------------------------------------------------------


def _y_series(curve: Curve, Q: Point) -> tuple[Fraction, Fraction, Fraction]:
    """(c1, c2, c3) with y - y0 = c1 t + c2 t^2 + c3 t^3 + O(t^4),
    t = x - x0; needs Fy != 0 at Q."""
    Fy = curve.partial_y(Q)
    Fx = curve.partial_x(Q)
    c1 = -Fx / Fy
    c2 = -(c1 * c1 + curve.a1 * c1 - 3 * Q.x - curve.a2) / Fy
    c3 = -(2 * c1 * c2 + curve.a1 * c2 - 1) / Fy
    return c1, c2, c3


def _x_series(curve: Curve, Q: Point) -> tuple[Fraction, Fraction, Fraction]:
    """(d1, d2, d3) with x - x0 = d1 s + d2 s^2 + d3 s^3 + O(s^4),
    s = y - y0; needs Fx != 0 at Q."""
    Fy = curve.partial_y(Q)
    Fx = curve.partial_x(Q)
    d1 = -Fy / Fx
    d2 = -(1 + curve.a1 * d1 + (-3 * Q.x - curve.a2) * d1 * d1) / Fx
    d3 = -(curve.a1 * d2 + 2 * (-3 * Q.x - curve.a2) * d1 * d2 - d1**3) / Fx
    return d1, d2, d3


def _factor_ord_lc_finite(curve, key, Q: Point, use_x: bool):
    """(ord, lc) of one factor at an affine point, with uniformizer
    x - x0 (use_x) or y - y0."""
    kind = key[0]
    if kind == "c":
        return 0, key[1]
    if kind == "v":
        val = Q.x - key[1]
        if val != 0:
            return 0, val
        if use_x:
            return 1, Fraction(1)
        d1, d2, _ = _x_series(curve, Q)
        if d1 != 0:
            return 1, d1
        return 2, d2
    lam, nu = key[1], key[2]
    val = Q.y - lam * Q.x - nu
    if val != 0:
        return 0, val
    if use_x:
        c1, c2, c3 = _y_series(curve, Q)
        if c1 != lam:
            return 1, c1 - lam
        if c2 != 0:
            return 2, c2
        return 3, c3
    d1, d2, d3 = _x_series(curve, Q)
    if 1 - lam * d1 != 0:
        return 1, 1 - lam * d1
    if lam * d2 != 0:
        return 2, -lam * d2
    return 3, -lam * d3


_ORD_AT_O = {"v": -2, "l": -3, "c": 0}


def ord_and_lc_at(
    curve: Curve,
    f: FactoredFunction,
    Q: Point,
    n: int | None = None,
    finite_uniformizer: str = "canonical",
    o_scale=Fraction(1),
) -> tuple[int, Fraction]:
    """Valuation and leading coefficient of f at Q.

    lc = (f / pi^ord)(Q) for the chosen uniformizer pi.  When n is given,
    n | ord is asserted (guaranteed when div(f) = n*D) and the returned lc
    represents the well-defined class lc (x) 1/n.
    """
    if Q.is_infinity:
        ordv = sum(_ORD_AT_O[k[0]] * e for k, e in f.factors.items())
        lc = Fraction(1)
        for k, e in f.factors.items():
            if k[0] == "c":
                lc *= k[1] ** e
        if o_scale != 1:
            lc *= Fraction(o_scale) ** (-ordv)
    else:
        if not curve.on_curve(Q):
            raise ValueError(f"{Q} is not on the curve")
        if finite_uniformizer == "canonical":
            use_x = curve.partial_y(Q) != 0
        elif finite_uniformizer == "alternate":
            use_x = curve.partial_x(Q) == 0
            if use_x and curve.partial_y(Q) == 0:
                raise ValueError("singular point")
        else:
            raise ValueError(f"unknown uniformizer policy {finite_uniformizer!r}")
        ordv = 0
        lc = Fraction(1)
        for k, e in f.factors.items():
            o, c = _factor_ord_lc_finite(curve, k, Q, use_x)
            ordv += o * e
            lc *= c**e
    if n is not None and ordv % n != 0:
        raise DivisibilityViolation(f"ord = {ordv} not divisible by n = {n}")
    return ordv, lc


# -- the pairing -------------------------------------------------------------


def pairing_points(
    curve: Curve,
    P: Point,
    Q: Point,
    n: int | None = None,
    finite_uniformizer: str = "canonical",
    o_scale=Fraction(1),
) -> TensorClass:
    """<[P - O], [Q - O]> in Q^x (x) Q/Z for rational torsion P, Q."""
    order = curve.point_order(P)  # NonTorsion if not
    curve.point_order(Q)
    if n is None:
        n = order
    elif n % order != 0:
        raise NotAnnihilated(f"n = {n} does not annihilate P (order {order})")
    f = miller_function(curve, P, n)
    _, lc_q = ord_and_lc_at(curve, f, Q, n, finite_uniformizer, o_scale)
    _, lc_o = ord_and_lc_at(curve, f, O, n, finite_uniformizer, o_scale)
    return tensor_of(lc_q / lc_o, QmodZ.of(Fraction(1, n)))


def _reduce_divisor(curve: Curve, D: list[tuple[Point, int]]):
    """(S, g) with D = (S) - (O) + div(g) for a degree-0 divisor D."""
    g = ONE
    A = O
    for P, e in D:
        if e == 0 or P.is_infinity:
            continue
        steps, R = (e, P) if e > 0 else (-e, curve.neg(P))
        if e < 0:
            g = g.times(vertical(P.x), e)  # (P)+(-P)-2(O) = div(v_P)
        for _ in range(steps):
            g, A = _addition_factors(curve, g, A, R)
    return A, g


def pairing_divisors(
    curve: Curve, D: list[tuple[Point, int]], E: list[tuple[Point, int]]
) -> TensorClass:
    """The pairing on Div_t x Div^0 for divisors of rational points."""
    for P, _ in D + E:
        if not curve.on_curve(P):
            raise ValueError(f"{P} is not on the curve")
    if sum(e for _, e in D) != 0:
        raise NonTorsionClass("deg D != 0, class cannot be torsion")
    if sum(e for _, e in E) != 0:
        raise NonZeroDegree("deg E != 0")
    S, g = _reduce_divisor(curve, D)
    try:
        n = curve.point_order(S)
    except NonTorsion as exc:
        raise NonTorsionClass(str(exc)) from exc
    f = miller_function(curve, S, n).mul(g.pow(n))
    acc = Fraction(1)
    for Q, e in E:
        if e == 0:
            continue
        _, lc = ord_and_lc_at(curve, f, Q, n)
        acc *= lc**e
    return tensor_of(acc, QmodZ.of(Fraction(1, n)))


@dataclass(frozen=True)
class IntrinsicSubgroup:
    elements: tuple[Point, ...]
    d1: int
    d2: int

    @property
    def order(self) -> int:
        return self.d1 * self.d2

    def label(self) -> str:
        return f"{self.d1}x2" if self.d2 == 2 else str(self.d1)


def gram_and_intrinsic(
    curve: Curve, torsion: TorsionGroup | None = None
) -> tuple[TorsionGroup, list[list[TensorClass]], IntrinsicSubgroup]:
    """Pairing values on torsion generators and the kernel subgroup.

    The intrinsic subgroup is computed on generators and extended by
    biadditivity: i*g1 + j*g2 lies in the kernel iff its pairing against
    each generator vanishes.
    """
    tors = torsion if torsion is not None else torsion_subgroup(curve)
    gens = [tors.gen1] + ([tors.gen2] if tors.gen2 is not None else [])
    gram = [[pairing_points(curve, A, B) for B in gens] for A in gens]
    members: list[Point] = []
    ranges = [range(tors.d1)] + ([range(tors.d2)] if tors.gen2 is not None else [])
    coefs: list[tuple[int, ...]] = [()]
    for r in ranges:
        coefs = [c + (i,) for c in coefs for i in r]
    for c in coefs:
        if all(
            _tensor_comb(gram, c, k).is_zero() for k in range(len(gens))
        ):
            pt = O
            for i, gp in zip(c, gens):
                pt = curve.add(pt, curve.mul(i, gp))
            members.append(pt)
    members = sorted(set(members), key=_pt_key)
    orders = [curve.point_order(P) for P in members]
    d1 = max(orders)
    d2 = len(members) // d1
    return tors, gram, IntrinsicSubgroup(tuple(members), d1, d2)


def _tensor_comb(gram, coeffs, k) -> TensorClass:
    out = TensorClass()
    for i, c in enumerate(coeffs):
        out = out + gram[i][k].scale(c)
    return out


def _pt_key(P: Point):
    return (0, 0, 0) if P.is_infinity else (1, P.x, P.y)


def frey_ruck(curve: Curve, P: Point, Q: Point, n: int) -> FactoredRational:
    """The finite-coefficient pairing <P, Q>_n in Q^x/(Q^x)^n: the class of
    lc_Q(f) * lc_O(f)^-1, sign retained and exponents reduced mod n."""
    if not curve.mul(n, P).is_infinity:
        raise NotAnnihilated(f"{n}*P is not O")
    curve.point_order(Q)
    f = miller_function(curve, P, n)
    _, lc_q = ord_and_lc_at(curve, f, Q, n)
    _, lc_o = ord_and_lc_at(curve, f, O, n)
    return factor_rational(lc_q / lc_o).reduce_mod(n)


def weil_pairing(curve: Curve, P: Point, Q: Point, n: int) -> int:
    """Weil_n(P, Q) in mu_n(Q), i.e. +1 or -1.

    Primary route: move (P)-(O) to a disjoint-support representative
    (P+R)-(R) by a rational torsion translate R and evaluate the quotient of
    plain function values.  When no translate separates the supports (tiny
    torsion groups), falls back to the finite-pairing quotient
    <P,Q>_n / <Q,P>_n which represents the same root of unity.
    """
    if not (curve.mul(n, P).is_infinity and curve.mul(n, Q).is_infinity):
        raise NotAnnihilated("both points must be killed by n")
    if P.is_infinity or Q.is_infinity:
        return 1
    translates = []
    for i in range(n):
        for j in range(n):
            translates.append(curve.add(curve.mul(i, P), curve.mul(j, Q)))
    for R in translates:
        PR = curve.add(P, R)
        if R.is_infinity or PR.is_infinity or R == Q or PR == Q:
            continue
        g_mid = ONE.times(vertical(PR.x)).times(_line_through(curve, P, R), -1)
        f = miller_function(curve, P, n).mul(g_mid.pow(n))
        w = _plain_value(curve, f, Q) / _plain_value(curve, f, O)
        g = miller_function(curve, Q, n)
        w /= _plain_value(curve, g, PR) / _plain_value(curve, g, R)
        if w not in (1, -1):
            raise AssertionError(f"Weil value {w} is not a root of unity (bug)")
        return int(w)
    # no auxiliary point: quotient of finite pairings
    a = frey_ruck(curve, P, Q, n)
    b = frey_ruck(curve, Q, P, n)
    quot = {p: e for p, e in a.exponent_map().items()}
    for p, e in b.exponent_map().items():
        quot[p] = quot.get(p, 0) - e
    if any(e % n for e in quot.values()):
        raise AssertionError("Frey-Rueck quotient is not +-1 mod n-th powers (bug)")
    if n % 2:
        return 1
    return a.sign * b.sign


def _plain_value(curve: Curve, f: FactoredFunction, Q: Point) -> Fraction:
    ordv, lc = ord_and_lc_at(curve, f, Q)
    if ordv != 0:
        raise AssertionError("evaluation at a zero/pole (bug)")
    return lc

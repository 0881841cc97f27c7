"""Parameterized curves with prescribed torsion and their predicted pairings.

Cyclic families E_{N,t} (N = 4..10, 12) in Tate normal form, the ambiguous
low-order forms E_{2,t,a} / E_{3,t} / E_{3,-1,a}, and the bicyclic families
E'_{N,u} (N = 4, 6, 8) with marked 2-torsion Q', plus E'_{2,u,a}.

Prediction tables are stored fully factored and predictions are assembled
factor by factor through tensor_of, so only small integers ever reach the
factoring layer.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .curves import Curve, O, Point, Transform, tate_curve_of, tate_normal_form
from .errors import DegenerateParameter, OrderOutOfRange
from .pairing import pairing_points
from .qtensor import QmodZ, TensorClass, tensor_of

F = Fraction

CYCLIC_NS = (2, 3, 4, 5, 6, 7, 8, 9, 10, 12)
BICYCLIC_NS = (2, 4, 6, 8)


@dataclass(frozen=True)
class FamilyId:
    kind: str  # "cyclic" | "bicyclic"
    N: int
    param: Fraction  # t for cyclic, u for bicyclic
    a: Fraction | None = None  # extra parameter for the N in {2,3} forms

    def __str__(self) -> str:
        suffix = "x2" if self.kind == "bicyclic" else ""
        var = "u" if self.kind == "bicyclic" else "t"
        s = f"E{self.N}{suffix}@{var}={self.param}"
        if self.a is not None:
            if self.kind == "cyclic" and self.N == 3:
                return f"E3@a={self.a}"
            s += f",a={self.a}"
        return s


# factored polynomials: list of (coefficients low-to-high, exponent)
_T = [F(0), F(1)]
_ONE_MINUS = [F(1), F(-1)]
_ONE_PLUS = [F(1), F(1)]

F_N_TABLE: dict[int, list[tuple[list[Fraction], int]]] = {
    4: [(_T, 1)],
    5: [(_T, 1)],
    6: [(_T, 1), (_ONE_MINUS, 2)],
    7: [(_T, 1), (_ONE_MINUS, 4)],
    8: [(_T, 1), (_ONE_MINUS, 2), (_ONE_PLUS, 4)],
    9: [(_T, 1), (_ONE_MINUS, 4), ([F(1), F(-1), F(1)], 3)],
    10: [(_T, 1), (_ONE_MINUS, 2), (_ONE_PLUS, 8), ([F(1), F(1), F(-1)], 5)],
    12: [
        (_T, 1),
        (_ONE_MINUS, 2),
        ([F(1), F(-1), F(1)], 3),
        ([F(1), F(0), F(1)], 4),
        (_ONE_PLUS, 6),
    ],
}

G_N_TABLE: dict[int, dict[int, list[tuple[list[Fraction], int]]]] = {
    4: {
        1: [([F(4)], 1), (_T, 1), (_ONE_PLUS, 2)],
        2: [(_ONE_MINUS, 1), (_ONE_PLUS, 1)],
        3: [(_ONE_PLUS, 1)],
    },
    # N = 6, nu = 1: the source prints (1+u)^1, but its own cyclic-case
    # formula composed with the t-u relation forces (1+u)^4 (the two differ
    # by (1+u)^3, which is not a 6th power); the oracle confirms (1+u)^4.
    6: {
        1: [(_T, 1), (_ONE_MINUS, 1), ([F(1), F(3)], 3), (_ONE_PLUS, 4)],
        2: [(_ONE_MINUS, 1), (_ONE_PLUS, 1), ([F(1), F(-3)], 1), ([F(1), F(3)], 1)],
        3: [(_ONE_MINUS, 1), ([F(1), F(3)], 1)],
    },
    8: {
        1: [
            (_T, 1),
            (_ONE_MINUS, 1),
            (_ONE_PLUS, 1),
            ([F(1), F(0), F(1)], 2),
            ([F(1), F(2), F(-1)], 4),
        ],
        2: [([F(1), F(-2), F(-1)], 1), ([F(1), F(2), F(-1)], 1)],
        3: [
            (_ONE_MINUS, 1),
            (_ONE_PLUS, 1),
            ([F(1), F(0), F(1)], 1),
            ([F(1), F(2), F(-1)], 1),
        ],
    },
}


def _poly_eval(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = F(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def eval_factored(table: list[tuple[list[Fraction], int]], x: Fraction) -> Fraction:
    out = F(1)
    for coeffs, e in table:
        out *= _poly_eval(coeffs, x) ** e
    return out


def tensor_of_factored(
    table: list[tuple[list[Fraction], int]], x: Fraction, r: QmodZ
) -> TensorClass:
    """tensor_of of the product, one printed factor at a time."""
    out = TensorClass()
    for coeffs, e in table:
        v = _poly_eval(coeffs, x)
        if v == 0:
            raise DegenerateParameter(f"factor {coeffs} vanishes at {x}")
        out = out + tensor_of(v, r).scale(e)
    return out


def tate_ab(N: int, t: Fraction) -> tuple[Fraction, Fraction]:
    """The (a(t), b(t)) of the Tate-normal family with a point of order N."""
    if N == 4:
        return F(0), t
    if N == 5:
        return t, t
    if N == 6:
        return t, t - t * t
    if N == 7:
        return t - t * t, t * (1 - t) ** 2
    if N == 8:
        return t * (1 - t) / (1 + t), t * (1 - t) / (1 + t) ** 2
    if N == 9:
        return t * (1 - t) ** 2, t * (1 - t) ** 2 * (1 - t + t * t)
    if N == 10:
        d = (1 + t) * (1 + t - t * t)
        return t * (1 - t) / d, t * (1 - t) / ((1 + t) * (1 + t - t * t) ** 2)
    if N == 12:
        return (
            t * (1 - t) * (1 - t + t * t) / (1 + t),
            t * (1 - t) * (1 - t + t * t) * (1 + t * t) / (1 + t) ** 2,
        )
    raise OrderOutOfRange(f"no cyclic Tate family for N = {N}")


def bicyclic_ab(N: int, u: Fraction) -> tuple[Fraction, Fraction]:
    if N == 4:
        return F(0), u / (4 * (1 + u) ** 2)
    if N == 6:
        return u * (1 - u) / (1 + 3 * u), u * (1 - u) * (1 + u) ** 2 / (1 + 3 * u) ** 2
    if N == 8:
        return (
            u * (1 - u) * (1 + u * u) / ((1 + u) * (1 + 2 * u - u * u)),
            u * (1 - u) * (1 + u * u) / (1 + 2 * u - u * u) ** 2,
        )
    raise OrderOutOfRange(f"no bicyclic family for N = {N}")


def bicyclic_q(N: int, u: Fraction) -> Point:
    if N == 4:
        return Point.of(-1 / (4 * (1 + u)), 1 / (8 * (1 + u) ** 2))
    if N == 6:
        return Point.of(
            -(1 - u) * (1 + u) ** 2 / (4 * (1 + 3 * u)),
            (1 - u) ** 2 * (1 + u) ** 3 / (8 * (1 + 3 * u) ** 2),
        )
    if N == 8:
        return Point.of(
            -(1 - u) * (1 + u) * (1 + u * u) / (4 * (1 + 2 * u - u * u)),
            (1 - u) ** 2 * (1 + u) * (1 + u * u) ** 2 / (8 * (1 + 2 * u - u * u) ** 2),
        )
    raise OrderOutOfRange(f"no bicyclic family for N = {N}")


def t_of_u(N: int, u: Fraction) -> Fraction:
    """The covering X_1^0(N,2) -> X_1(N) in hauptmodul coordinates."""
    if N == 2:
        return 4 * u / (1 - u) ** 2
    if N == 4:
        return u / (4 * (1 + u) ** 2)
    if N == 6:
        return u * (1 - u) / (1 + 3 * u)
    if N == 8:
        return u * (1 - u) / (1 + u)
    raise OrderOutOfRange(f"no t-u relation for N = {N}")


def build_curve(fid: FamilyId) -> tuple[Curve, dict[str, Point]]:
    """The family member with its marked points, orders verified."""
    try:
        curve, marked = _build_raw(fid)
    except ZeroDivisionError as exc:
        raise DegenerateParameter(f"{fid}: denominator vanishes") from exc
    except ValueError as exc:
        raise DegenerateParameter(f"{fid}: {exc}") from exc
    P = marked["P"]
    if curve.point_order(P) != fid.N:
        raise DegenerateParameter(f"{fid}: marked point does not have order {fid.N}")
    if fid.kind == "bicyclic":
        Q = marked["Q"]
        if curve.point_order(Q) != 2 or Q in {curve.mul(k, P) for k in range(fid.N)}:
            raise DegenerateParameter(f"{fid}: Q is not an independent 2-torsion point")
    return curve, marked


def _build_raw(fid: FamilyId):
    N, p, a = fid.N, fid.param, fid.a
    if fid.kind == "cyclic":
        if N in (4, 5, 6, 7, 8, 9, 10, 12):
            at, bt = tate_ab(N, p)
            if bt == 0:
                raise DegenerateParameter(f"{fid}: b(t) = 0")
            return tate_curve_of(at, bt), {"P": Point.of(0, 0)}
        if N == 2:
            if a is None or a == 0:
                raise DegenerateParameter(f"{fid}: requires a != 0")
            if p == -1:
                return Curve(0, 0, 0, a, 0), {"P": Point.of(0, 0)}
            if p == 0:
                raise DegenerateParameter(f"{fid}: t = 0")
            b = a * a * p / (4 * (p + 1))
            return Curve(0, a, 0, b, 0), {"P": Point.of(0, 0)}
        if N == 3:
            if p == -1:
                if a is None or a == 0:
                    raise DegenerateParameter(f"{fid}: t = -1 requires a != 0")
                return Curve(0, 0, a, 0, 0), {"P": Point.of(0, 0)}
            if p == 0:
                raise DegenerateParameter(f"{fid}: t = 0")
            return Curve(1, 0, p / (27 * (p + 1)), 0, 0), {"P": Point.of(0, 0)}
        raise OrderOutOfRange(f"no cyclic family for N = {N}")
    if fid.kind == "bicyclic":
        if N == 2:
            if a is None or a == 0 or p in (0, 1):
                raise DegenerateParameter(f"{fid}: need a != 0, u not in {{0,1}}")
            return (
                Curve(0, -a * (1 + p), 0, a * a * p, 0),
                {"P": Point.of(0, 0), "Q": Point.of(a, 0)},
            )
        if N in (4, 6, 8):
            au, bu = bicyclic_ab(N, p)
            if bu == 0:
                raise DegenerateParameter(f"{fid}: b(u) = 0")
            return tate_curve_of(au, bu), {"P": Point.of(0, 0), "Q": bicyclic_q(N, p)}
        raise OrderOutOfRange(f"no bicyclic family for N = {N}")
    raise ValueError(f"unknown family kind {fid.kind!r}")


# The order-3 self-pairing: the source's statement and its derivation carry
# opposite signs; the oracle (pairing.py) settles it as
#     <P,P> = -( t(1+t)^2 (x) 1/3 )   resp.  -( a (x) 1/3 )  at t = -1,
# frozen here and regression-locked in the tests.
_N3_SIGN = -1


def predicted_pairings(fid: FamilyId) -> list[tuple[str, TensorClass]]:
    """Closed-form pairing values for the marked points of the family."""
    N, p, a = fid.N, fid.param, fid.a
    build_curve(fid)  # validates non-degeneracy
    if fid.kind == "cyclic":
        if N in F_N_TABLE:
            val = tensor_of_factored(F_N_TABLE[N], p, QmodZ.of(F(1, N)))
            return [("P,P", -val)]
        if N == 2:
            half = QmodZ.of(F(1, 2))
            if p == -1:
                return [("P,P", tensor_of(a, half))]
            return [("P,P", tensor_of(p, half) + tensor_of(1 + p, half))]
        if N == 3:
            third = QmodZ.of(F(1, 3))
            if p == -1:
                val = tensor_of(a, third)
            else:
                val = tensor_of(p, third) + tensor_of(1 + p, third).scale(2)
            return [("P,P", val if _N3_SIGN == 1 else -val)]
    if fid.kind == "bicyclic":
        half = QmodZ.of(F(1, 2))
        if N == 2:
            return [
                ("P,P", tensor_of(p, half)),
                ("Q,Q", tensor_of(1 - p, half)),
                ("P,Q", tensor_of(a, half)),
            ]
        table = G_N_TABLE[N]
        return [
            ("P,P", -tensor_of_factored(table[1], p, QmodZ.of(F(1, N)))),
            ("Q,Q", tensor_of_factored(table[2], p, half)),
            ("P,Q", tensor_of_factored(table[3], p, half)),
        ]
    raise ValueError(f"unknown family kind {fid.kind!r}")


def recognize_parameters(curve: Curve, P: Point) -> FamilyId:
    """The unique t with (curve, P) isomorphic to (E_{N,t}, (0,0))."""
    N = curve.point_order(P)
    if N not in (4, 5, 6, 7, 8, 9, 10, 12):
        raise OrderOutOfRange(f"order {N} not in 4..10, 12")
    a, b, _ = tate_normal_form(curve, P)
    if N in (4, 5):
        t = b
    elif N in (6, 7):
        t = 1 - b / a
    elif N == 8:
        t = a / b - 1
    elif N == 9:
        t = (a - a * a - b) / (a - b)
    elif N == 10:
        t = (a - a * a - b) / (a * a)
    else:
        t = -(a**3 - a * b + b * b) / (a - b) ** 2
    if tate_ab(N, t) != (a, b):
        raise AssertionError(f"parameter recovery failed for N={N} (bug)")
    return FamilyId("cyclic", N, t)


def recognize_u(curve: Curve, P: Point, Q: Point) -> Fraction:
    """The u with (curve, P, Q) isomorphic to (E'_{N,u}, (0,0), Q')."""
    N = curve.point_order(P)
    if N not in (4, 6, 8):
        raise OrderOutOfRange(f"order {N} not in {{4, 6, 8}}")
    if curve.point_order(Q) != 2 or Q in {curve.mul(k, P) for k in range(N)}:
        raise DegenerateParameter("Q must be 2-torsion outside <P>")
    t = recognize_parameters(curve, P).param
    if N == 4:
        qa, qb, qc = 4 * t, 8 * t - 1, 4 * t
    elif N == 6:
        qa, qb, qc = F(1), 3 * t - 1, t
    else:
        qa, qb, qc = F(1), t - 1, t
    disc = qb * qb - 4 * qa * qc
    root = _sqrt_fraction(disc)
    if root is None:
        raise DegenerateParameter("(E, P, Q) is not in the bicyclic family")
    _, _, tr = tate_normal_form(curve, P)
    q_image = tr.apply_point(Q)
    for u in {(-qb + root) / (2 * qa), (-qb - root) / (2 * qa)}:
        if bicyclic_q(N, u) == q_image:
            return u
    raise AssertionError("no u-branch matches the marked 2-torsion point (bug)")


def _sqrt_fraction(r: Fraction) -> Fraction | None:
    if r < 0:
        return None
    import math

    rn, rd = math.isqrt(r.numerator), math.isqrt(r.denominator)
    if rn * rn == r.numerator and rd * rd == r.denominator:
        return F(rn, rd)
    return None


def family_j(fid: FamilyId) -> Fraction:
    """Exact j-invariant of the family member."""
    N, p = fid.N, fid.param
    if fid.kind == "cyclic" and N == 2:
        # forced by the model y^2 = x(x^2 + ax + a^2 t / 4(t+1)): independent
        # of a, and -> 1728 at t = -1
        if p == -1:
            return F(1728)
        if p == 0:
            raise DegenerateParameter("t = 0")
        return 64 * (p + 4) ** 3 / (p * p)
    if fid.kind == "cyclic" and N == 3:
        if p == -1:
            return F(0)
        if p == 0:
            raise DegenerateParameter("t = 0")
        return 27 * (p + 1) * (p + 9) ** 3 / p**3
    if fid.kind == "bicyclic" and N == 2:
        if p in (0, 1):
            raise DegenerateParameter("u in {0, 1}")
        return 256 * (1 - p + p * p) ** 3 / (p * p * (1 - p) ** 2)
    curve, _ = build_curve(fid)
    return curve.j


# -- family grammar (CLI / service) ------------------------------------------


def family_from_string(s: str) -> FamilyId:
    """Parse 'E<N>@t=r', 'E<N>x2@u=r', 'E2@t=r,a=r', 'E3@t=r', 'E3@a=r',
    'E2x2@u=r,a=r'."""
    try:
        head, _, args = s.partition("@")
        if not head.startswith("E") or not args:
            raise ValueError
        bicyclic = head.endswith("x2")
        N = int(head[1 : -2 if bicyclic else len(head)])
        kv = {}
        for item in args.split(","):
            k, _, v = item.partition("=")
            kv[k.strip()] = Fraction(v.strip())
        kind = "bicyclic" if bicyclic else "cyclic"
        var = "u" if bicyclic else "t"
        if kind == "cyclic" and N == 3 and "a" in kv and "t" not in kv:
            return FamilyId(kind, 3, F(-1), kv["a"])
        return FamilyId(kind, N, kv[var], kv.get("a"))
    except (ValueError, KeyError, ZeroDivisionError) as exc:
        raise ValueError(f"bad family spec {s!r}") from exc


FAMILY_KINDS = tuple(f"E{n}" for n in CYCLIC_NS) + tuple(
    f"E{n}x2" for n in BICYCLIC_NS
)


def kind_from_string(s: str) -> tuple[str, int]:
    if s not in FAMILY_KINDS:
        raise ValueError(f"unknown family kind {s!r} (expected one of {FAMILY_KINDS})")
    if s.endswith("x2"):
        return "bicyclic", int(s[1:-2])
    return "cyclic", int(s[1:])


# -- oracle agreement sweeps --------------------------------------------------


def sample_family(kind: str, N: int, rng: random.Random, height: int) -> FamilyId:
    """A random non-degenerate member with parameter height <= height."""
    needs_a = N in (2, 3) or (kind == "bicyclic" and N == 2)
    while True:
        p = F(rng.randint(-height, height), rng.randint(1, height))
        a = None
        if needs_a:
            a = F(rng.randint(-height, height), rng.randint(1, height))
            if kind == "cyclic" and N == 3:
                # exercise the t = -1 branch regularly
                if rng.random() < 0.15:
                    p = F(-1)
                else:
                    a = None
        fid = FamilyId(kind, N, p, a)
        try:
            build_curve(fid)
            return fid
        except DegenerateParameter:
            continue


def verify_universal(kind_str: str, samples: int, height: int, seed: int = 0) -> dict:
    """Check predicted_pairings against the divisor-theoretic oracle on
    pseudo-random family members; the artifact's core theorem check."""
    kind, N = kind_from_string(kind_str)
    rng = random.Random(seed)
    mismatches = []
    for _ in range(samples):
        fid = sample_family(kind, N, rng, height)
        curve, marked = build_curve(fid)
        pts = {"P": marked["P"], "Q": marked.get("Q"), "O": O}
        for label, predicted in predicted_pairings(fid):
            l1, l2 = label.split(",")
            got = pairing_points(curve, pts[l1], pts[l2])
            if got != predicted:
                mismatches.append(
                    {
                        "family": str(fid),
                        "pair": label,
                        "predicted": predicted.to_json(),
                        "oracle": got.to_json(),
                    }
                )
    return {
        "family": kind_str,
        "checked": samples,
        "pass": not mismatches,
        "mismatches": mismatches,
    }

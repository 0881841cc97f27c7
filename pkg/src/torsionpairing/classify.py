"""Classification of (E(Q)_tors, intrinsic subgroup) and the family census.

classify() computes the torsion group and the pairing kernel outright (never
inferred from a family: special parameters can acquire extra torsion) and
checks the resulting row against the admissible table; a row outside the
table is a theorem violation and raises InadmissibleRow.

family_search() sweeps a family over bounded-height rationals in a fixed
deterministic order (denominator, then numerator), classifies every member,
counts rows with j-invariant de-duplication and keeps one witness per row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import Pool

from .curves import Curve, divides_integral_disc, torsion_subgroup
from .errors import FactorTooHard, InadmissibleRow, MissingRow, OrderOutOfRange
from .families import (
    BICYCLIC_NS,
    CYCLIC_NS,
    F_N_TABLE,
    FAMILY_KINDS,
    G_N_TABLE,
    FamilyId,
    build_curve,
    eval_factored,
    kind_from_string,
    recognize_parameters,
    recognize_u,
)
from .pairing import gram_and_intrinsic
from .qtensor import is_power_up_to_sign

# admissible |B| per torsion structure label, from the classification theorem
ADMISSIBLE: dict[str, tuple[int, ...]] = {
    "1": (1,),
    "2": (1, 2),
    "3": (1, 3),
    "4": (1, 2, 4),
    "5": (1, 5),
    "6": (1, 2, 3),
    "7": (1,),
    "8": (1, 2),
    "9": (1,),
    "10": (1,),
    "12": (1,),
    "2x2": (1, 2),
    "4x2": (1, 2),
    "6x2": (1,),
    "8x2": (1,),
}

# every (A, |B|, orbit) combination the family sweeps must witness; the
# trivial group row (A=1, |B|=1) cannot arise from a family with marked
# torsion and is excluded
REQUIRED_COMBINATIONS: tuple[tuple[str, int, str | None], ...] = tuple(
    (label, b, orbit)
    for label, bs in ADMISSIBLE.items()
    if label != "1"
    for b in bs
    for orbit in (("2P", "Q") if (label, b) == ("4x2", 2) else (None,))
)


@dataclass(frozen=True)
class ClassificationRow:
    A: str  # torsion structure label: "6", "4x2", ...
    B_order: int
    B_label: str  # structure of the kernel subgroup
    orbit: str | None  # for A = 4x2 with |B| = 2: "2P" or "Q"

    def key(self) -> tuple:
        return (self.A, self.B_order, self.orbit)

    def to_json(self) -> dict:
        return {
            "A": self.A,
            "B": self.B_order,
            "B_structure": self.B_label,
            "orbit": self.orbit,
        }


def classify(curve: Curve) -> ClassificationRow:
    """The (A, B) row of the curve; InadmissibleRow is a theorem violation."""
    tors, _, intrinsic = gram_and_intrinsic(curve)
    orbit = None
    if (tors.d1, tors.d2) == (4, 2) and intrinsic.order == 2:
        beta = next(P for P in intrinsic.elements if not P.is_infinity)
        orbit = "2P" if beta == curve.mul(2, tors.gen1) else "Q"
    row = ClassificationRow(tors.label(), intrinsic.order, intrinsic.label(), orbit)
    allowed = ADMISSIBLE.get(row.A)
    if allowed is None or row.B_order not in allowed:
        raise InadmissibleRow(
            f"(A, |B|) = ({row.A}, {row.B_order}) is outside the admissible table"
        )
    return row


def membership_cyclic(curve: Curve, P, M: int) -> bool:
    """Whether <P, (N/M)P> = 0, via the +-s^M criterion on f_N(t)."""
    fid = recognize_parameters(curve, P)  # OrderOutOfRange if order < 4
    N = fid.N
    if N % M != 0:
        raise OrderOutOfRange(f"M = {M} does not divide N = {N}")
    return is_power_up_to_sign(eval_factored(F_N_TABLE[N], fid.param), M)


def membership_bicyclic(curve: Curve, P, Q, Mvec: tuple[int, int, int]) -> bool:
    """Whether <P,(N/M1)P> = <Q,(2/M2)Q> = <P,(2/M3)Q> = 0 via g_N^(nu)."""
    M1, M2, M3 = Mvec
    N = curve.point_order(P)
    if N not in (4, 6, 8):
        raise OrderOutOfRange(f"order {N} not in {{4, 6, 8}}")
    if N % M1 != 0 or M2 not in (1, 2) or M3 not in (1, 2):
        raise OrderOutOfRange(f"bad M-vector {Mvec} for N = {N}")
    u = recognize_u(curve, P, Q)
    table = G_N_TABLE[N]
    return all(
        is_power_up_to_sign(eval_factored(table[nu], u), M)
        for nu, M in ((1, M1), (2, M2), (3, M3))
    )


# -- census -------------------------------------------------------------------


def farey_parameters(height: int) -> list[Fraction]:
    """Nonzero rationals p/q with |p|, q <= height, gcd(p, q) = 1, in a
    fixed (q, p) order for reproducibility."""
    out = []
    for q in range(1, height + 1):
        for p in range(-height, height + 1):
            if p != 0 and math.gcd(abs(p), q) == 1:
                out.append(Fraction(p, q))
    return out


# small palette for the extra parameter of the 2-parameter families; rows
# depend on a only through square classes and accidental torsion, so a short
# signed list of distinct square classes suffices for witnesses
_A_PALETTE = tuple(Fraction(v) for v in (1, -1, 2, -2, 3, -3))


def family_parameter_grid(kind: str, N: int, height: int) -> list[FamilyId]:
    params = farey_parameters(height)
    if kind == "cyclic" and N == 2:
        return [FamilyId(kind, 2, t, a) for t in params for a in _A_PALETTE]
    if kind == "cyclic" and N == 3:
        return [FamilyId(kind, 3, t) for t in params if t != -1] + [
            FamilyId(kind, 3, Fraction(-1), a) for a in params
        ]
    if kind == "bicyclic" and N == 2:
        return [FamilyId(kind, 2, u, a) for u in params for a in _A_PALETTE]
    return [FamilyId(kind, N, t) for t in params]


def _classify_member(fid: FamilyId):
    """Worker: classify one family member.

    Returns (kind, payload): 'skip' (degenerate), 'hard' (FactorTooHard),
    or 'row' with the row key, j-invariant, support-containment flag and
    witness data.
    """
    from .errors import DegenerateParameter

    try:
        curve, marked = build_curve(fid)
    except DegenerateParameter:
        return ("skip", None)
    try:
        tors, gram, intrinsic = gram_and_intrinsic(curve)
        row = classify(curve)
        j = curve.j
        support_ok = all(
            divides_integral_disc(curve, p)
            for line in gram
            for val in line
            for p in val.support
        )
    except FactorTooHard:
        return ("hard", str(fid))
    witness = {
        "family": str(fid),
        "curve": [str(a) for a in curve.a_invariants],
        "j": str(j),
        "torsion": tors.label(),
    }
    return ("row", (row.key(), str(j), support_ok, witness))


def family_search(
    kind_str: str, height: int, jobs: int = 1, grid: list[FamilyId] | None = None
) -> dict:
    """Census of one family: per-row counts (j-deduplicated), one witness
    per row, a skipped counter, and the bad-prime support check tally."""
    kind, N = kind_from_string(kind_str)
    fids = grid if grid is not None else family_parameter_grid(kind, N, height)
    if jobs > 1:
        with Pool(jobs) as pool:
            results = pool.map(_classify_member, fids, chunksize=16)
    else:
        results = [_classify_member(fid) for fid in fids]
    rows: dict[tuple, dict] = {}
    skipped = 0
    support_violations = 0
    for status, payload in results:
        if status == "skip":
            continue
        if status == "hard":
            skipped += 1
            continue
        key, j, support_ok, witness = payload
        if not support_ok:
            support_violations += 1
        slot = rows.setdefault(key, {"js": set(), "witness": witness})
        slot["js"].add(j)
    return {
        "family": kind_str,
        "H": height,
        "rows": [
            {
                "A": key[0],
                "B": key[1],
                "orbit": key[2],
                "count": len(slot["js"]),
                "witness": slot["witness"],
            }
            for key, slot in sorted(
                rows.items(), key=lambda kv: (_label_rank(kv[0][0]), kv[0][1], str(kv[0][2]))
            )
        ],
        "skipped": skipped,
        "support_violations": support_violations,
        "parameters": len(fids),
    }


def _label_rank(label: str) -> tuple:
    if label.endswith("x2"):
        return (1, int(label[:-2]))
    return (0, int(label))


def run_full_census(height: int, jobs: int = 1) -> list[dict]:
    return [family_search(k, height, jobs=jobs) for k in FAMILY_KINDS]


def table_check(censuses: list[dict]) -> dict:
    """Assert every admissible (A, |B|, orbit) combination is witnessed and
    no inadmissible one occurs; reproduce the classification table."""
    seen: dict[tuple, int] = {}
    witnesses: dict[tuple, dict] = {}
    for census in censuses:
        for row in census["rows"]:
            key = (row["A"], row["B"], row["orbit"])
            if row["B"] not in ADMISSIBLE.get(row["A"], ()):
                raise InadmissibleRow(f"census contains inadmissible row {key}")
            seen[key] = seen.get(key, 0) + row["count"]
            witnesses.setdefault(key, row["witness"])
    missing = [c for c in REQUIRED_COMBINATIONS if c not in seen]
    if missing:
        raise MissingRow(f"unwitnessed combinations: {missing}")
    table = [
        {
            "A": label,
            "B_orders": list(bs),
            "witnessed": {
                str(b): sum(n for (a, bb, _), n in seen.items() if a == label and bb == b)
                for b in bs
            },
        }
        for label, bs in ADMISSIBLE.items()
    ]
    return {
        "combinations_required": len(REQUIRED_COMBINATIONS),
        "combinations_witnessed": len([c for c in REQUIRED_COMBINATIONS if c in seen]),
        "table": table,
        "support_violations": sum(c["support_violations"] for c in censuses),
        "skipped": sum(c["skipped"] for c in censuses),
    }

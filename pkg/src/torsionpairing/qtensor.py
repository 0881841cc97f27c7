"""Exact arithmetic in Q^x (x) Q/Z.

An element is represented by its support: a finite map prime -> Q/Z, since
Q^x = {+-1} (+) (+)_p p^Z and the {+-1} summand dies in the tensor product
(Q/Z is divisible, so torsion (x) Q/Z = 0).  Consequently two nonzero
rationals define the same class iff their prime valuations agree modulo the
relevant denominators; the sign carries no information.

Everything here is backed by integer factorization: trial division to 10^4
followed by Brent's variant of Pollard rho, with primality certified by
Miller-Rabin on a deterministic witness set.  A composite that survives the
budget raises FactorTooHard; there is no silent approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import FactorTooHard

_TRIAL_BOUND = 10_000
_RHO_BUDGET = 3_000_000

# Miller-Rabin with these witnesses is deterministic below this bound
# (Sorenson-Webster).
_MR_BOUND = 3_317_044_064_679_887_385_961_981
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _small_primes(bound: int) -> list[int]:
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(bound + 1) if sieve[i]]


SMALL_PRIMES = _small_primes(_TRIAL_BOUND)


def is_certified_prime(n: int) -> bool:
    """Deterministic primality for n below the Miller-Rabin witness bound.

    Raises FactorTooHard for larger inputs that pass all witnesses, since we
    then have only a probable prime and this module never guesses.
    """
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    if n >= _MR_BOUND:
        raise FactorTooHard(f"cannot certify primality of {n}")
    return True


def _pollard_brent(n: int, budget: int) -> int | None:
    # n odd composite, not a prime power of a small prime
    if n % 2 == 0:
        return 2
    for seed in range(1, 10):
        y, c, m = seed, seed + 6, 128
        g, r, q = 1, 1, 1
        spent = 0
        x = ys = y
        while g == 1 and spent < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def _as_perfect_power(n: int) -> tuple[int, int]:
    """Return (m, k) with n = m^k and k maximal."""
    for k in range(n.bit_length(), 1, -1):
        root = round(n ** (1.0 / k))
        for m in (root - 1, root, root + 1):
            if m > 1 and m**k == n:
                return m, k
    return n, 1


def factor_int(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 as {prime: exponent}.

    Raises FactorTooHard when a cofactor beyond the rho budget remains
    composite or cannot be certified prime.
    """
    if n < 1:
        raise ValueError("factor_int expects a positive integer")
    out: dict[int, int] = {}
    for p in SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [(n, 1)]
    while stack:
        m, mult = stack.pop()
        if m == 1:
            continue
        if is_certified_prime(m):
            out[m] = out.get(m, 0) + mult
            continue
        base, k = _as_perfect_power(m)
        if k > 1:
            stack.append((base, mult * k))
            continue
        d = _pollard_brent(m, _RHO_BUDGET)
        if d is None:
            raise FactorTooHard(f"could not split composite {m}")
        stack.append((d, mult))
        stack.append((m // d, mult))
    return out


@dataclass(frozen=True)
class FactoredRational:
    """A nonzero rational as sign * prod p^e with certified prime keys."""

    sign: int
    exponents: tuple[tuple[int, int], ...]

    def exponent_map(self) -> dict[int, int]:
        return dict(self.exponents)

    def value(self) -> Fraction:
        v = Fraction(self.sign)
        for p, e in self.exponents:
            v *= Fraction(p) ** e
        return v

    def reduce_mod(self, n: int) -> "FactoredRational":
        """Class in Q^x/(Q^x)^n: exponents reduced into [0, n), sign kept."""
        exps = tuple(sorted((p, e % n) for p, e in self.exponents if e % n))
        return FactoredRational(self.sign, exps)

    def to_json(self) -> dict:
        return {
            "sign": self.sign,
            "exponents": {str(p): e for p, e in self.exponents},
        }


def factor_rational(r) -> FactoredRational:
    """Exact factorization of a nonzero rational."""
    r = Fraction(r)
    if r == 0:
        raise ValueError("cannot factor zero")
    sign = 1 if r > 0 else -1
    num = factor_int(abs(r.numerator))
    den = factor_int(r.denominator)
    exps = dict(num)
    for p, e in den.items():
        exps[p] = exps.get(p, 0) - e
    items = tuple(sorted((p, e) for p, e in exps.items() if e))
    return FactoredRational(sign, items)


@dataclass(frozen=True)
class QmodZ:
    """An element of Q/Z, stored as num/den with 0 <= num < den, gcd = 1."""

    num: int
    den: int

    @staticmethod
    def of(r) -> "QmodZ":
        f = Fraction(r)
        f = f - (f.numerator // f.denominator)  # reduce mod 1 into [0, 1)
        return QmodZ(f.numerator, f.denominator)

    def __add__(self, other: "QmodZ") -> "QmodZ":
        return QmodZ.of(Fraction(self.num, self.den) + Fraction(other.num, other.den))

    def __neg__(self) -> "QmodZ":
        return QmodZ.of(-Fraction(self.num, self.den))

    def scale(self, k: int) -> "QmodZ":
        return QmodZ.of(k * Fraction(self.num, self.den))

    def is_zero(self) -> bool:
        return self.num == 0

    def order(self) -> int:
        return self.den

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def __str__(self) -> str:
        return f"{self.num}/{self.den}"


ZERO_QMODZ = QmodZ(0, 1)


class TensorClass:
    """An element of Q^x (x) Q/Z as a finitely supported map prime -> Q/Z.

    Immutable; equality is literal map equality, which is sound because the
    representation is canonical (no zero entries, QmodZ normalized).
    """

    __slots__ = ("_support",)

    def __init__(self, support: dict[int, QmodZ] | None = None):
        cleaned = {p: v for p, v in (support or {}).items() if not v.is_zero()}
        object.__setattr__(self, "_support", tuple(sorted(cleaned.items())))

    @property
    def support(self) -> dict[int, QmodZ]:
        return dict(self._support)

    def is_zero(self) -> bool:
        return not self._support

    def __eq__(self, other) -> bool:
        return isinstance(other, TensorClass) and self._support == other._support

    def __hash__(self) -> int:
        return hash(self._support)

    def __add__(self, other: "TensorClass") -> "TensorClass":
        out = self.support
        for p, v in other._support:
            out[p] = out.get(p, ZERO_QMODZ) + v
        return TensorClass(out)

    def __neg__(self) -> "TensorClass":
        return TensorClass({p: -v for p, v in self._support})

    def scale(self, k: int) -> "TensorClass":
        return TensorClass({p: v.scale(k) for p, v in self._support})

    def order(self) -> int:
        out = 1
        for _, v in self._support:
            out = out * v.den // math.gcd(out, v.den)
        return out

    def to_json(self) -> dict[str, str]:
        return {str(p): str(v) for p, v in self._support}

    def __repr__(self) -> str:
        if self.is_zero():
            return "TensorClass(0)"
        body = ", ".join(f"{p}: {v}" for p, v in self._support)
        return f"TensorClass({{{body}}})"


ZERO_TENSOR = TensorClass()


def combine(op: str, *args) -> TensorClass:
    """Group operations on tensor classes: add, negate, scale."""
    if op == "add":
        out = ZERO_TENSOR
        for a in args:
            out = out + a
        return out
    if op == "negate":
        (a,) = args
        return -a
    if op == "scale":
        k, a = args
        return a.scale(k)
    raise ValueError(f"unknown op {op!r}")


def tensor_of(z, r) -> TensorClass:
    """The class of z (x) r in Q^x (x) Q/Z for a nonzero rational z.

    Each prime p dividing z contributes v_p(z) * r mod 1; the sign of z is
    discarded (it is torsion, killed by divisibility of Q/Z).
    """
    if not isinstance(r, QmodZ):
        r = QmodZ.of(r)
    fr = factor_rational(z)
    return TensorClass({p: r.scale(e) for p, e in fr.exponents})


def is_power_up_to_sign(z, m: int) -> bool:
    """True iff z = +-s^m for some rational s, i.e. z (x) 1/m = 0."""
    if m < 1:
        raise ValueError("m must be >= 1")
    fr = factor_rational(z)
    return all(e % m == 0 for _, e in fr.exponents)


def order_of(c: TensorClass) -> int:
    """Least n >= 1 with n*c = 0; the lcm of the support denominators."""
    return c.order()


def tensor_from_json(data: dict) -> TensorClass:
    return TensorClass({int(p): QmodZ.of(Fraction(v)) for p, v in data.items()})

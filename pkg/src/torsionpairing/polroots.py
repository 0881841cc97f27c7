"""Rational roots of integer polynomials, exactly and fast.

Primary engine: pick a small prime l not dividing the leading coefficient,
find the roots of f mod l by brute force, Hensel-lift every simple one to
precision l^k beyond 2*|a0|*|an| (any rational root p/q has p | a0, q | an),
reconstruct p/q by the continued-fraction bound of rational reconstruction,
and keep candidates that verify exactly over Q.

Completeness: a rational root reduces mod l to some root r (l never divides
its denominator since l does not divide the leading coefficient); if f'(r)
vanishes mod l the prime is discarded, and when a prime with no such suspect
roots is found, every rational root is recovered.  Distinct rational roots
colliding mod l force f'(r) = 0 there, so collisions also just discard the
prime.  A polynomial with genuinely multiple rational roots makes every
prime suspect; then the exact squarefree part is taken and the engine
re-runs.  mpmath isolation remains as a last-resort fallback.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

_LIFT_PRIMES = (331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397,
                401, 409, 419, 421, 431, 433, 439, 443, 449, 457, 461, 463)


def _horner(coeffs: list[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _horner_mod(coeffs: list[int], x: int, m: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % m
    return acc


def _modular_roots(coeffs: list[int]) -> list[Fraction] | None:
    """Hensel-lift engine; None when every tried prime has a suspect root."""
    a0, an = coeffs[0], coeffs[-1]
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    # a root p/q has p | a0 and q | an, so y = an * (p/q) is an integer
    # with |y| <= |a0 * an|; lift past twice that and read y symmetrically
    target = 2 * abs(a0) * abs(an) + 1
    for ell in _LIFT_PRIMES:
        if an % ell == 0:
            continue
        residues = [x for x in range(ell) if _horner_mod(coeffs, x, ell) == 0]
        if any(_horner_mod(deriv, r, ell) == 0 for r in residues):
            continue
        roots: list[Fraction] = []
        m = ell
        lifted = residues
        while m < target:
            m2 = m * m
            lifted = [
                (r - _horner_mod(coeffs, r, m2) * pow(_horner_mod(deriv, r, m2), -1, m2))
                % m2
                for r in lifted
            ]
            m = m2
        for r in lifted:
            y = an * r % m
            if y > m // 2:
                y -= m
            cand = Fraction(y, an)
            if _horner(coeffs, cand) == 0 and cand not in roots:
                roots.append(cand)
        return roots
    return None


def _exact_squarefree(coeffs: list[int]) -> list[int]:
    """f / gcd(f, f') as a primitive integer polynomial."""
    f = [Fraction(c) for c in coeffs]
    g = [Fraction(i * c) for i, c in enumerate(coeffs)][1:]
    a, b = f, g
    while any(b):
        a, b = b, _poly_mod(a, b)
    gcd = a
    if len(gcd) <= 1:
        return coeffs
    quo = _poly_div(f, gcd)
    den = 1
    for c in quo:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in quo]
    content = 0
    for c in ints:
        content = math.gcd(content, c)
    return [c // (content or 1) for c in ints]


def _poly_mod(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    b = _trim(b)
    r = list(a)
    while len(_trim(r)) >= len(b):
        r = _trim(r)
        k = len(r) - len(b)
        factor = r[-1] / b[-1]
        for i, c in enumerate(b):
            r[i + k] -= factor * c
        r = r[:-1]
    return _trim(r)


def _poly_div(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    b = _trim(b)
    r = list(a)
    out = [Fraction(0)] * (len(a) - len(b) + 1)
    while len(_trim(r)) >= len(b):
        r = _trim(r)
        k = len(r) - len(b)
        factor = r[-1] / b[-1]
        out[k] = factor
        for i, c in enumerate(b):
            r[i + k] -= factor * c
        r = r[:-1]
    return out


def _trim(f):
    f = list(f)
    while f and f[-1] == 0:
        f.pop()
    return f or [Fraction(0)]


def _roots_by_isolation(coeffs: list[int]) -> list[Fraction]:
    n = len(coeffs) - 1
    height = max(abs(c) for c in coeffs)
    digits = len(str(height))
    # reconstruction needs error << 1/(2*den^2); den divides the leading coeff
    dps = max(40, 2 * digits + n + 25)
    den_bound = abs(coeffs[-1])
    roots: list[Fraction] = []
    with mpmath.workdps(dps):
        poly = [mpmath.mpf(c) for c in reversed(coeffs)]
        try:
            approx = mpmath.polyroots(poly, maxsteps=200, extraprec=2 * dps)
        except mpmath.libmp.NoConvergence:
            approx = mpmath.polyroots(poly, maxsteps=2000, extraprec=6 * dps)
        for z in approx:
            if abs(mpmath.im(z)) > mpmath.mpf(10) ** (-dps // 4):
                continue
            cand = _reconstruct(mpmath.re(z), den_bound, dps)
            if cand is not None and cand not in roots and _horner(coeffs, cand) == 0:
                roots.append(cand)
    return roots


def _reconstruct(x, den_bound: int, dps: int) -> Fraction | None:
    man = mpmath.nint(x * 2 ** (dps * 3))
    target = Fraction(int(man), 2 ** (dps * 3))
    p0, q0, p1, q1 = 0, 1, 1, 0
    t = target
    while True:
        a = t.numerator // t.denominator
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > den_bound:
            return Fraction(p0, q0) if 0 < q0 <= den_bound else None
        frac = t - a
        if frac == 0:
            return Fraction(p1, q1)
        t = 1 / frac


def rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    """All rational roots of the polynomial with the given low-to-high
    coefficients (each root listed once, multiplicity ignored)."""
    den = 1
    for c in coeffs:
        c = Fraction(c)
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(Fraction(c) * den) for c in coeffs]
    while ints and ints[-1] == 0:
        ints.pop()
    if not ints:
        raise ValueError("zero polynomial has every root")
    roots: list[Fraction] = []
    shift = 0
    while ints[shift] == 0:
        shift += 1
    if shift:
        roots.append(Fraction(0))
        ints = ints[shift:]
    if len(ints) <= 1:
        return roots
    content = 0
    for c in ints:
        content = math.gcd(content, c)
    ints = [c // content for c in ints]
    if len(ints) == 2:
        return roots + [Fraction(-ints[0], ints[1])]
    if len(ints) == 3:
        c, b, a = ints
        disc = b * b - 4 * a * c
        if disc < 0:
            return roots
        r = math.isqrt(disc)
        if r * r != disc:
            return roots
        return roots + sorted({Fraction(-b + r, 2 * a), Fraction(-b - r, 2 * a)})
    found = _modular_roots(ints)
    if found is None:
        squarefree = _exact_squarefree(ints)
        if squarefree != ints:
            found = _modular_roots(squarefree)
        if found is None:
            found = _roots_by_isolation(ints)
    return roots + found

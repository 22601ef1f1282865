"""p-adic valuations, quadratic residue and Hilbert symbols, and the small
integer-arithmetic helpers (factorization, Moebius, totients) used
throughout the package.

All inputs are ints or Fractions; all outputs are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction

INFINITY = math.inf  # valuation of 0


def _check_prime(p):
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"not a prime: {p!r}")
    if not is_prime(p):
        raise ValueError(f"not a prime: {p}")


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division, as {p: exponent}."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for q in (f, f + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int) -> list[int]:
    return sorted(factorize(n))


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius needs n >= 1")
    mu = 1
    for e in factorize(n).values() if n > 1 else []:
        if e > 1:
            return 0
        mu = -mu
    return mu


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    out = n
    for p in factorize(n) if n > 1 else []:
        out = out // p * (p - 1)
    return out


def psi_index(n: int) -> int:
    """Index of the level-n congruence subgroup: n * prod_{p|n} (1 + 1/p)."""
    if n < 1:
        raise ValueError("psi_index needs n >= 1")
    out = n
    for p in factorize(n) if n > 1 else []:
        out = out // p * (p + 1)
    return out


def squarefree_part(n: int) -> int:
    """The squarefree integer m with n = m * (square), keeping the sign."""
    if n == 0:
        raise ValueError("squarefree_part of 0")
    m = 1 if n > 0 else -1
    for p, e in factorize(n).items():
        if e % 2:
            m *= p
    return m


def valuation(x, p: int):
    """Largest e with p^e dividing x (negative for denominators); inf at 0."""
    _check_prime(p)
    x = Fraction(x)
    if x == 0:
        return INFINITY
    num, den = x.numerator, x.denominator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    """x / p^valuation(x), a p-adic unit, as an exact Fraction."""
    v = valuation(x, p)
    if v is INFINITY or v == INFINITY:
        raise ValueError("unit_part of 0")
    return Fraction(x) / Fraction(p) ** v


def rational_mod(x, p: int, e: int) -> int:
    """Reduce a p-integral rational mod p^e (denominator must be a p-unit)."""
    x = Fraction(x)
    m = p**e
    if m == 1:
        return 0
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not p-integral at p={p}")
    return x.numerator * pow(x.denominator, -1, m) % m


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for odd prime p, with value 0 when p | a."""
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else 1


def quad_residue_symbol(u, p: int) -> int:
    """Extended quadratic residue symbol on Q_p^x for odd p.

    +1 on squares times even powers of p, -1 on nonsquare-unit classes with
    even valuation, 0 when the valuation is odd.
    """
    _check_prime(p)
    if p == 2:
        raise ValueError("quad_residue_symbol is only defined for odd p")
    u = Fraction(u)
    if u == 0:
        raise ValueError("quad_residue_symbol of 0")
    v = valuation(u, p)
    if v % 2:
        return 0
    w = unit_part(u, p)
    return legendre(rational_mod(w, p, 1), p)


def _two_adic_unit_residue(x: Fraction, e: int) -> int:
    """Unit part of x mod 2^e (x nonzero rational)."""
    v = valuation(x, 2)
    u = x / Fraction(2) ** v
    return rational_mod(u, 2, e)


def hilbert_symbol(a, b, v) -> int:
    """Hilbert symbol (a, b)_v for v a prime or the archimedean place.

    Pass v = "inf" (or math.inf) for the real place, where the symbol is -1
    exactly when both arguments are negative.
    """
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("hilbert_symbol needs nonzero arguments")
    if v in ("inf", INFINITY):
        return -1 if (a < 0 and b < 0) else 1
    p = v
    _check_prime(p)
    alpha = valuation(a, p)
    beta = valuation(b, p)
    if p != 2:
        u = rational_mod(unit_part(a, p), p, 1)
        w = rational_mod(unit_part(b, p), p, 1)
        sign = 1
        if (alpha * beta) % 2 and (p - 1) // 2 % 2:
            sign = -sign
        if beta % 2 and legendre(u, p) == -1:
            sign = -sign
        if alpha % 2 and legendre(w, p) == -1:
            sign = -sign
        return sign
    # p = 2: standard formula via the unit invariants eps(u) = (u-1)/2,
    # omega(u) = (u^2-1)/8 mod 2.
    u = _two_adic_unit_residue(a, 3)
    w = _two_adic_unit_residue(b, 3)
    eps_u = (u - 1) // 2 % 2
    eps_w = (w - 1) // 2 % 2
    om_u = (u * u - 1) // 8 % 2
    om_w = (w * w - 1) // 8 % 2
    exponent = eps_u * eps_w + alpha * om_w + beta * om_u
    return -1 if exponent % 2 else 1


def kronecker_symbol(D: int, p: int) -> int:
    """Kronecker symbol (D/p) at a prime p (p = 2 allowed)."""
    _check_prime(p)
    if p == 2:
        if D % 2 == 0:
            return 0
        r = D % 8
        return 1 if r == 1 else (-1 if r == 5 else 0)
    return legendre(D % p, p)


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of a mod an odd prime p, or None (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    s, e = p - 1, 0
    while s % 2 == 0:
        s //= 2
        e += 1
    n = 2
    while legendre(n, p) != -1:
        n += 1
    x = pow(a, (s + 1) // 2, p)
    b = pow(a, s, p)
    g = pow(n, s, p)
    r = e
    while True:
        t = b
        m = 0
        while t != 1:
            t = t * t % p
            m += 1
        if m == 0:
            return x
        gs = pow(g, 1 << (r - m - 1), p)
        g = gs * gs % p
        x = x * gs % p
        b = b * g % p
        r = m


def smallest_nonresidue(p: int) -> int:
    """Smallest positive quadratic nonresidue mod an odd prime."""
    if p == 2:
        raise ValueError("no canonical nonresidue at p=2")
    n = 2
    while legendre(n, p) != -1:
        n += 1
    return n

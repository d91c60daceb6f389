"""Modular arithmetic over F_p: inverses, Legendre symbols, square roots and
quadratic congruences."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

__all__ = [
    "AllZeroError",
    "NonResidueError",
    "NotPrimeError",
    "QuadKind",
    "ResidueClassification",
    "is_prime",
    "legendre",
    "legendre_reciprocity",
    "mod_inverse",
    "primes_between",
    "require_prime",
    "solve_quadratic",
    "sqrt_mod",
    "squarefree_part",
]

# Deterministic for every n < 3.3e24, which covers 64-bit inputs.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class NotPrimeError(ValueError):
    pass


class NonResidueError(ValueError):
    pass


class AllZeroError(ValueError):
    """Every residue solves 0*x^2 + 0*x + 0 = 0."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for q in _MR_WITNESSES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def require_prime(p: int) -> int:
    """Return ``p`` unchanged if it is an odd prime, else raise NotPrimeError."""
    if isinstance(p, bool) or not isinstance(p, int):
        raise NotPrimeError(f"expected an integer prime, got {p!r}")
    if p < 3 or not is_prime(p):
        raise NotPrimeError(f"{p} is not an odd prime")
    return p


def primes_between(lo: int, hi: int) -> list[int]:
    """Odd primes in the closed interval [lo, hi]."""
    return [n for n in range(max(lo, 3), hi + 1) if is_prime(n)]


def mod_inverse(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion."""
    require_prime(p)
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def legendre_reciprocity(a: int, p: int) -> int:
    """Legendre symbol (a/p) computed without exponentiation.

    Strips the sign with the (-1/p) law, factors of two with the (2/p) law,
    and flips odd numerators with quadratic reciprocity (in its Jacobi form,
    so the odd part need not be factored).
    """
    require_prime(p)
    a %= p
    if a == 0:
        return 0
    n = p
    sign = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a, n = n % a, a
    return sign if n == 1 else 0


def sqrt_mod(a: int, p: int) -> list[int]:
    """All square roots of ``a`` mod ``p`` in ascending order (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return [0]
    if legendre(a, p) != 1:
        raise NonResidueError(f"{a} is not a quadratic residue mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while legendre(z, p) != -1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return sorted({r, p - r})


class QuadKind(enum.Enum):
    TWO_SOLUTIONS = "two"
    NO_SOLUTION = "none"
    LINEAR_UNIQUE = "linear"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class ResidueClassification:
    """Solution set of a quadratic congruence.

    ``DEGENERATE`` covers a double root (one entry in ``solutions``) and the
    all-zero polynomial (``all_zero`` set, no solutions listed).
    """

    kind: QuadKind
    solutions: tuple[int, ...] = ()
    all_zero: bool = field(default=False)

    def __post_init__(self):
        n = len(self.solutions)
        expected = {
            QuadKind.TWO_SOLUTIONS: n == 2 and self.solutions[0] != self.solutions[1],
            QuadKind.NO_SOLUTION: n == 0,
            QuadKind.LINEAR_UNIQUE: n == 1,
            QuadKind.DEGENERATE: n == (0 if self.all_zero else 1),
        }[self.kind]
        if not expected:
            raise ValueError(f"{self.kind} inconsistent with solutions {self.solutions}")


def solve_quadratic(a: int, b: int, c: int, p: int) -> ResidueClassification:
    """Solve a*x^2 + b*x + c = 0 (mod p)."""
    require_prime(p)
    a, b, c = a % p, b % p, c % p
    if a == 0:
        if b == 0:
            if c == 0:
                raise AllZeroError("a = b = c = 0 mod p")
            return ResidueClassification(QuadKind.NO_SOLUTION)
        return ResidueClassification(QuadKind.LINEAR_UNIQUE, ((-c * mod_inverse(b, p)) % p,))
    disc = (b * b - 4 * a * c) % p
    inv2a = mod_inverse(2 * a, p)
    if disc == 0:
        return ResidueClassification(QuadKind.DEGENERATE, ((-b * inv2a) % p,))
    if legendre(disc, p) == -1:
        return ResidueClassification(QuadKind.NO_SOLUTION)
    roots = sorted(((-b + y) * inv2a) % p for y in sqrt_mod(disc, p))
    return ResidueClassification(QuadKind.TWO_SOLUTIONS, tuple(roots))


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: n = squarefree_part(n) * k^2 for some integer k."""
    if n == 0:
        return 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    out, f = 1, 2
    while f * f <= n:
        while n % (f * f) == 0:
            n //= f * f
        if n % f == 0:
            out *= f
            n //= f
        f += 1
    return sign * out * n

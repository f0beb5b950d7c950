"""Prime fields, the quadratic character and Weil character sums."""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Sequence


class FieldError(ValueError):
    pass


def is_prime(q: int) -> bool:
    """Deterministic trial division; meant for q below 2**32."""
    if q < 2:
        return False
    if q % 2 == 0:
        return q == 2
    for d in range(3, isqrt(q) + 1, 2):
        if q % d == 0:
            return False
    return True


def primes_below(limit: int) -> list[int]:
    return [q for q in range(2, limit) if is_prime(q)]


@dataclass(frozen=True)
class PrimeField:
    """The field of integers modulo an odd prime ``q``."""

    q: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise FieldError(f"{self.q} is not prime")
        if self.q == 2:
            raise FieldError("characteristic 2 is not supported")

    def reduce(self, x: int) -> int:
        return x % self.q

    def inv(self, x: int) -> int:
        if x % self.q == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.q)

    def residues(self) -> list[int]:
        """Nonzero squares, sorted."""
        return sorted({x * x % self.q for x in range(1, self.q)})

    def character_table(self) -> list[int]:
        """``table[x] == quadratic_character(self, x)`` for ``0 <= x < q``."""
        table = [-1] * self.q
        table[0] = 0
        for x in range(1, (self.q + 1) // 2):
            table[x * x % self.q] = 1
        return table


def quadratic_character(field: PrimeField, x: int) -> int:
    """Legendre symbol via Euler's criterion: 0, +1 or -1."""
    x %= field.q
    if x == 0:
        return 0
    r = pow(x, (field.q - 1) // 2, field.q)
    return 1 if r == 1 else -1


def is_residue(field: PrimeField, x: int) -> bool:
    return quadratic_character(field, x) == 1


def is_nonresidue(field: PrimeField, x: int) -> bool:
    return quadratic_character(field, x) == -1


def minus_three_is_nonresidue(field: PrimeField) -> bool:
    if field.q < 5:
        raise FieldError("need q >= 5")
    return quadratic_character(field, field.q - 3) == -1


# -- polynomials over F_q, coefficient lists in ascending degree --------------

def normalize_poly(field: PrimeField, coeffs: Sequence[int]) -> list[int]:
    out = [c % field.q for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return out


def poly_mul(field: PrimeField, a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    q = field.q
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % q
    return normalize_poly(field, out)


def poly_eval(field: PrimeField, coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % field.q
    return acc


def scaled_square_root(field: PrimeField, coeffs: Sequence[int]) -> tuple[int, list[int]] | None:
    """Return ``(c, g)`` with ``f == c * g**2`` and ``g`` monic, or None.

    The square root of the monic part is extracted coefficient by
    coefficient from the top down and then checked by squaring.
    """
    f = normalize_poly(field, coeffs)
    if not f:
        return None
    deg = len(f) - 1
    if deg % 2:
        return None
    q = field.q
    lead = f[-1]
    inv_lead = field.inv(lead)
    h = [c * inv_lead % q for c in f]
    k = deg // 2
    g = [0] * (k + 1)
    g[k] = 1
    inv2 = field.inv(2)
    for j in range(1, k + 1):
        # coefficient of x^(2k-j) in g^2 is 2*g[k-j] + sum of products of known terms
        s = 0
        for a in range(k - j + 1, k + 1):
            b = 2 * k - j - a
            if k - j < b <= k:
                s += g[a] * g[b]
        g[k - j] = (h[2 * k - j] - s) * inv2 % q
    if poly_mul(field, g, g) != h:
        return None
    return lead, g


def weil_sum(field: PrimeField, coeffs: Sequence[int]) -> int:
    """``sum over x in F_q of chi(f(x))`` for ``f`` given in ascending order.

    Raises :class:`FieldError` for constant polynomials and for polynomials of
    the form ``c * g**2``, where the Weil estimate does not apply.
    """
    f = normalize_poly(field, coeffs)
    if len(f) < 2:
        raise FieldError("polynomial must have degree >= 1")
    if scaled_square_root(field, f) is not None:
        raise FieldError("polynomial is a constant multiple of a square")
    table = field.character_table()
    return sum(table[poly_eval(field, f, x)] for x in range(field.q))


def weil_holds(field: PrimeField, coeffs: Sequence[int]) -> bool:
    """Check ``|sum chi(f(x))| <= (deg f - 1) sqrt(q)`` in exact arithmetic."""
    s = weil_sum(field, coeffs)
    d = len(normalize_poly(field, coeffs)) - 1
    return s * s <= (d - 1) ** 2 * field.q

"""Multiplicative characters of local fields.

A character is lambda_{s,n}(x) = |x|^s (x/|x|)^n.  Over the reals the twist
only matters mod 2, over the complex numbers it is any integer, and in the
nonarchimedean case only unramified powers nu^s are represented.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

from .errors import (EvenRootOverReal, FieldMismatch, SingularInput,
                     UnsupportedField, ZeroArgument)

Exponent = Union[Fraction, complex]


def _is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = 2
    while p * p <= q:
        if q % p == 0:
            while q % p == 0:
                q //= p
            return q == 1
        p += 1
    return True


@dataclass(frozen=True)
class LocalField:
    kind: str  # "R", "C" or "NonArch"
    q: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("R", "C", "NonArch"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "NonArch":
            if self.q is None or not _is_prime_power(self.q):
                raise ValueError(f"residue field size must be a prime power, got {self.q}")
        elif self.q is not None:
            raise ValueError("q is only meaningful for nonarchimedean fields")

    @property
    def is_archimedean(self) -> bool:
        return self.kind != "NonArch"

    def to_json(self):
        if self.kind == "NonArch":
            return {"NonArch": self.q}
        return self.kind

    @staticmethod
    def from_json(obj) -> "LocalField":
        if isinstance(obj, dict):
            return LocalField("NonArch", int(obj["NonArch"]))
        return LocalField(str(obj))

    def __repr__(self):
        return f"Q_{self.q}-like(q={self.q})" if self.kind == "NonArch" else self.kind


REAL = LocalField("R")
COMPLEX = LocalField("C")


def nonarch(q: int) -> LocalField:
    return LocalField("NonArch", q)


def as_exponent(s) -> Exponent:
    """Exact rationals stay exact; anything else becomes a complex number."""
    if isinstance(s, Fraction):
        return s
    if isinstance(s, (int, Rational)) and not isinstance(s, bool):
        return Fraction(s)
    if isinstance(s, str):
        return Fraction(s)
    if isinstance(s, float):
        return complex(s)
    return complex(s)


def _reduce_twist(field: LocalField, n: int) -> int:
    if field.kind == "R":
        return n % 2
    if field.kind == "NonArch":
        if n != 0:
            raise UnsupportedField("only unramified characters nu^s are represented")
        return 0
    return n


@dataclass(frozen=True)
class Character:
    field: LocalField
    s: Exponent
    n: int = 0

    def __post_init__(self):
        object.__setattr__(self, "s", as_exponent(self.s))
        object.__setattr__(self, "n", _reduce_twist(self.field, int(self.n)))

    @property
    def exact(self) -> bool:
        return isinstance(self.s, Fraction)

    def __mul__(self, other: "Character") -> "Character":
        return mul(self, other)

    def __truediv__(self, other: "Character") -> "Character":
        return mul(self, inv(other))

    def __pow__(self, k: int) -> "Character":
        return power(self, k)

    def __call__(self, x) -> complex:
        return evaluate(self, x)

    def to_json(self) -> dict:
        if not self.exact:
            raise ValueError("only exact characters serialize")
        return {"field": self.field.to_json(), "s": _frac_str(self.s), "n": self.n}

    @staticmethod
    def from_json(obj: dict) -> "Character":
        return Character(LocalField.from_json(obj["field"]), Fraction(obj["s"]), int(obj["n"]))

    def __repr__(self):
        s = _frac_str(self.s) if self.exact else repr(self.s)
        return f"lam[{self.field.kind}]({s},{self.n})"


def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _add(a: Exponent, b: Exponent) -> Exponent:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    return complex(a) + complex(b)


def trivial(field: LocalField) -> Character:
    return Character(field, Fraction(0), 0)


def nu(field: LocalField) -> Character:
    """The normalized absolute value nu_F."""
    if field.kind == "C":
        return Character(field, Fraction(2), 0)
    return Character(field, Fraction(1), 0)


def norm_char(field: LocalField) -> Character:
    """Nm: x -> x over R, |x|^2 over C."""
    if field.kind == "R":
        return Character(field, Fraction(1), 1)
    if field.kind == "C":
        return Character(field, Fraction(2), 0)
    raise UnsupportedField("Nm is only used for archimedean fields")


def mul(a: Character, b: Character) -> Character:
    if a.field != b.field:
        raise FieldMismatch(f"{a.field} vs {b.field}")
    return Character(a.field, _add(a.s, b.s), a.n + b.n)


def inv(a: Character) -> Character:
    return Character(a.field, -a.s, -a.n)


def power(a: Character, k: int) -> Character:
    return Character(a.field, a.s * k, a.n * k)


def nm_power(field: LocalField, r) -> Character:
    """Nm^r for a rational r; over R the denominator of r has to be odd."""
    r = Fraction(r)
    if field.kind == "R":
        if r.denominator % 2 == 0:
            raise EvenRootOverReal(f"Nm^{r} has no canonical meaning over R")
        return Character(field, r, r.numerator)
    if field.kind == "C":
        return Character(field, 2 * r, 0)
    return Character(field, r, 0)


def real_part(a: Character):
    """Re(lambda): |lambda(x)| = nu(x)^{Re lambda}."""
    s = a.s if a.exact else complex(a.s).real
    return s / 2 if a.field.kind == "C" else s


def _as_int(x) -> Optional[int]:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else None
    x = complex(x)
    if abs(x.imag) > 1e-12:
        return None
    k = round(x.real)
    return k if abs(x.real - k) < 1e-12 else None


def is_singular(a: Character) -> bool:
    """Singular characters are nu^{-1} x^{-m} (R) or nu^{-1} x^{-a} xbar^{-b} (C), m, a, b >= 0."""
    if a.field.kind == "NonArch":
        raise UnsupportedField("the only nonarchimedean singular character is nu^{-1}")
    if a.field.kind == "R":
        m = _as_int(a.s + 1)
        return m is not None and m <= 0 and (m - a.n) % 2 == 0
    u = _as_int((a.s + a.n) / 2 if a.exact else (complex(a.s) + a.n) / 2)
    v = _as_int((a.s - a.n) / 2 if a.exact else (complex(a.s) - a.n) / 2)
    return u is not None and v is not None and u <= -1 and v <= -1


def is_strongly_regular(a: Character) -> bool:
    if a.field.kind == "NonArch":
        raise UnsupportedField("strong regularity is an archimedean notion")
    if is_singular(a):
        raise SingularInput(repr(a))
    if a.field.kind == "R":
        m = _as_int(a.s)
        if m is None:
            return True
        # x^k/|x| has s = k-1 and twist k; x^k with k < 0 has s = k, twist k
        if (m + 1 - a.n) % 2 == 0:
            return False
        if m < 0 and (m - a.n) % 2 == 0:
            return False
        return True
    u = _as_int((a.s + a.n) / 2 if a.exact else (complex(a.s) + a.n) / 2)
    v = _as_int((a.s - a.n) / 2 if a.exact else (complex(a.s) - a.n) / 2)
    if u is None or v is None:
        return True
    return min(u, v) >= 0


@dataclass(frozen=True)
class NonArchElement:
    """An element of a nonarchimedean field seen through its valuation."""
    valuation: int
    unit: object = None


def evaluate(a: Character, x) -> complex:
    field = a.field
    s = complex(a.s) if not a.exact else a.s
    if field.kind == "NonArch":
        v = x.valuation if isinstance(x, NonArchElement) else int(x[0])
        return complex(field.q) ** (-v * complex(s))
    x = complex(x)
    if x == 0:
        raise ZeroArgument("characters are evaluated on F*")
    r = abs(x)
    phase = x / r
    if field.kind == "R":
        if abs(x.imag) > 1e-14 * r:
            raise ValueError("real character evaluated off the real line")
        sign = 1.0 if x.real > 0 else -1.0
        return cmath.exp(complex(s) * math.log(r)) * (sign ** a.n)
    return cmath.exp(complex(s) * math.log(r)) * phase ** a.n

"""Gamma functions of local fields.

Gamma^F(lambda) is the factor in  FT(lambda nu^{-1}) = Gamma^F(lambda) lambda^{-1},
with psi(x) = exp(i Re x) and the self-dual measure.  Closed forms:

    R:        (2 pi)^{-1/2} 2 i^n Gamma(s) cos(pi (s - n) / 2)
    C:        2^{s-1} i^n Gamma((s + n)/2) / Gamma(1 + (n - s)/2)
    NonArch:  (1 - q^{s-1}) / (1 - q^{-s})

The Euler Gamma function is a Lanczos approximation so that nothing here
depends on scipy or mpmath (those are only used by the tests).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .characters import (Character, LocalField, evaluate, mul, nu,
                         power)
from .errors import NotConstant, PoleError, UnsupportedCase

# Lanczos coefficients for g = 7, n = 9
_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2 * math.pi)
POLE_TOL = 1e-9


def _near_nonpositive_int(z: complex, tol: float = 0.0) -> bool:
    k = round(z.real)
    return k <= 0 and abs(z - k) <= tol


def _lanczos(z: complex) -> complex:
    # valid for Re z >= 0.5
    z -= 1
    x = _LANCZOS[0]
    for i in range(1, _G + 2):
        x += _LANCZOS[i] / (z + i)
    t = z + _G + 0.5
    return _SQRT_2PI * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


def cgamma(z) -> complex:
    """Euler Gamma for complex z; raises PoleError at nonpositive integers."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
        raise PoleError(f"Gamma has a pole at {z.real}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * _lanczos(1 - z))
    return _lanczos(z)


def rgamma(z) -> complex:
    """1/Gamma(z), entire; exactly zero at nonpositive integers."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == int(z.real):
        return 0j
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * _lanczos(1 - z) / math.pi
    return 1 / _lanczos(z)


@dataclass(frozen=True)
class GammaValue:
    value: complex
    at_pole: bool


def is_pole(field: LocalField, s, n: int = 0, tol: float = POLE_TOL) -> bool:
    """Poles sit at lambda nu with lambda singular."""
    s = complex(s)
    if field.kind == "R":
        k = round(s.real)
        return k <= 0 and abs(s - k) < tol and (k - n) % 2 == 0
    if field.kind == "C":
        return (_near_nonpositive_int((s + n) / 2, tol)
                and _near_nonpositive_int((s - n) / 2, tol))
    period = 2 * math.pi / math.log(field.q)
    k = round(s.imag / period)
    return abs(s - 1j * k * period) < tol


def _gamma_value(field: LocalField, s: complex, n: int) -> complex:
    if field.kind == "R":
        n %= 2
        if s.real >= 0.5:
            trig = cmath.cos(math.pi * (s - n) / 2)
            return 2 * (1j ** n) * cgamma(s) * trig / _SQRT_2PI
        # reflected form, finite through the removable points
        if n == 0:
            return math.pi * rgamma(1 - s) / (cmath.sin(math.pi * s / 2) * _SQRT_2PI)
        return 1j * math.pi * rgamma(1 - s) / (cmath.cos(math.pi * s / 2) * _SQRT_2PI)
    if field.kind == "C":
        m = abs(n)
        val = cgamma((s + m) / 2) * rgamma(1 - (s - m) / 2)
        if n < 0 and m % 2:
            val = -val
        return 2 ** (s - 1) * (1j ** (n % 4)) * val
    if n != 0:
        raise UnsupportedCase("nonarchimedean Gamma is only implemented for nu^s")
    q = field.q
    return (1 - q ** (s - 1)) / (1 - q ** (-s))


def gamma(field: LocalField, s, n: int = 0, finite: bool = False) -> GammaValue:
    s = complex(s)
    if is_pole(field, s, n):
        if finite:
            raise PoleError(f"Gamma^{field.kind} has a pole at s={s}, n={n}")
        return GammaValue(complex("inf"), True)
    return GammaValue(_gamma_value(field, s, n), False)


def gamma_char(chi: Character) -> complex:
    """Finite value of Gamma^F at a character; raises PoleError at poles."""
    return gamma(chi.field, chi.s, chi.n, finite=True).value


def _char_at(field: LocalField, s: complex, n: int, x) -> complex:
    return evaluate(Character(field, complex(s), n), x)


def gamma_generalized(field: LocalField, d: int, a, s, n: int = 0) -> complex:
    """Gamma_{d,a}(lambda_{s,n}) = d^{-1} sum over mu^d = lambda of Gamma(mu) mu^{-1}(a)."""
    s = complex(s)
    if d < 1:
        raise ValueError("d must be positive")
    if d == 1:
        return gamma(field, s, n, finite=True).value * _char_at(field, -s, -n, a)
    if field.kind == "C":
        if n % d:
            return 0j  # lambda has no d-th root
        s1, n1 = s / d, n // d
        return gamma(field, s1, n1, finite=True).value * _char_at(field, -s1, -n1, a) / d
    if field.kind == "R":
        if d % 2 == 1:
            s1 = s / d
            return gamma(field, s1, n, finite=True).value * _char_at(field, -s1, -n, a) / d
        a = complex(a)
        if n % 2 != 0 or abs(a.imag) > 0:
            raise UnsupportedCase("even d over R needs a real shift and zero twist")
        k = d // 2
        t = s / d
        sign = 1 if a.real > 0 else -1
        return (cgamma(t) * cmath.exp(sign * 1j * math.pi * s / (4 * k))
                * abs(a.real) ** (-t) / (k * _SQRT_2PI))
    raise UnsupportedCase("generalized Gamma is archimedean here")


def gamma_generalized_sum(field: LocalField, d: int, a, s, n: int = 0) -> complex:
    """The defining root sum, used to cross-check the closed forms."""
    s = complex(s)
    roots = []
    if field.kind == "R":
        for t in (0, 1):
            if (d * t - n) % 2 == 0:
                roots.append((s / d, t))
    elif field.kind == "C":
        if n % d == 0:
            roots.append((s / d, n // d))
    else:
        raise UnsupportedCase("archimedean only")
    total = 0j
    for s1, n1 in roots:
        total += gamma(field, s1, n1, finite=True).value * _char_at(field, -s1, -n1, a)
    return total / d


def multiplication_constant(field: LocalField, N: int) -> complex:
    if field.kind == "C":
        return 1 / N
    if N % 2 == 0:
        raise UnsupportedCase("the real multiplication formula needs odd N")
    return (1j ** (-(((N - 2) * (N - 1) // 2) % 4))) / math.sqrt(N)


# ---------------------------------------------------------------------------
# the constant of a monomial identity

SAMPLE_S = (0.3, 0.7, 1.1, 1.9, 2.3)


def _twists(field: LocalField) -> Sequence[int]:
    return (0, 1) if field.kind == "R" else (0, 1, -1)


def _shift_char(chi: Character) -> Character:
    return Character(chi.field, complex(chi.s), chi.n)


def identity_gamma_sides(ident, u: Character, gamma_v: Optional[Sequence[Optional[Callable]]] = None):
    """LHS and RHS (without C) of the Gamma relation attached to an identity.

    ``gamma_v[i]`` optionally replaces Gamma^F for slot i by the Gamma function
    of a prehomogeneous space (called with a character).
    """
    field = ident.field
    d = math.gcd(*[abs(k) for k in ident.exponents])
    nuF = nu(field)
    ud = power(u, d)
    lhs = gamma_generalized(field, d, ident.a, ud.s, ud.n)
    spaces = getattr(ident, "spaces", None) or [None] * len(ident.exponents)
    for i, (k, lam) in enumerate(zip(ident.exponents, ident.lambdas)):
        ratio = Fraction(spaces[i].M, spaces[i].D) if spaces[i] is not None else 1
        shift = Character(field, complex(nuF.s * ratio), 0)
        chi = mul(mul(power(u, -k), _shift_char(lam)), shift)
        g = gamma_v[i] if gamma_v and gamma_v[i] else gamma_char
        lhs *= g(chi)
    gam = _shift_char(ident.gamma)
    if ident.case == "Sum2":
        w = mul(power(u, -d), power(gam, d))
    else:
        w = mul(power(u, d), power(gam, -d))
    rhs = gamma_generalized(field, d, ident.b, w.s, w.n)
    return lhs, rhs


def identity_constant(ident, samples: Sequence[float] = SAMPLE_S, rtol: float = 1e-6,
                      gamma_v: Optional[Sequence[Optional[Callable]]] = None) -> complex:
    """The common ratio LHS/RHS at several sample characters u."""
    field = ident.field
    ratios = []
    for t in _twists(field):
        for s in samples:
            val = None
            for shift in (0.0, 0.05, 0.11, 0.17, 0.23):
                u = Character(field, complex(s + shift), t)
                try:
                    lhs, rhs = identity_gamma_sides(ident, u, gamma_v)
                except PoleError:
                    continue
                if abs(rhs) < 1e-300 or not cmath.isfinite(lhs) or abs(lhs) < 1e-300:
                    continue
                val = lhs / rhs
                break
            if val is not None:
                ratios.append(val)
    if len(ratios) < 3:
        raise NotConstant("too few usable sample characters")
    ref = ratios[0]
    for r in ratios[1:]:
        if abs(r - ref) > rtol * max(abs(ref), abs(r)):
            raise NotConstant(f"sample ratios disagree: {ref} vs {r}")
    return ref

"""Hermite-Gaussian test functions with closed-form Fourier transforms.

Everything lives in real coordinates.  A real variable is one coordinate, a
complex variable z = u + iv is two, and the pairing is <x, xi> = x^T J xi with
J = +1 on real parts and -1 on imaginary parts (Re(z w) = u a - v b).

Functions are represented as p(x) exp(-|x|^2/2) with p a polynomial, so

    FT[x_j f] = -i J_jj d/dxi_j FT[f],    FT[d_j f] = -i J_jj xi_j FT[f],

and the Gaussian is its own transform for the self-dual measure
(2 pi)^{-dim/2} dx.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Sequence, Tuple

import numpy as np
import sympy as sp

from .characters import LocalField
from .errors import NonMonomialFactor


def coordinates(field: LocalField, nvars: int) -> Tuple[List[sp.Symbol], List[int]]:
    """Real coordinate symbols and the diagonal of J."""
    if field.kind == "R":
        return list(sp.symbols(f"t0:{nvars}", real=True)), [1] * nvars
    syms, J = [], []
    for k in range(nvars):
        syms += [sp.Symbol(f"u{k}", real=True), sp.Symbol(f"v{k}", real=True)]
        J += [1, -1]
    return syms, J


def _exponents_of(factor: Sequence[int], nvars: int) -> Tuple[int, ...]:
    e = tuple(int(k) for k in factor)
    if len(e) != nvars or any(k < 0 for k in e):
        raise NonMonomialFactor(f"{factor} is not a monomial exponent vector on {nvars} variables")
    return e


def monomial_factor(expr, variables: Sequence[str]) -> Tuple[int, ...]:
    """Exponent vector of a monomial given as text ("x*y^2") or sympy expression."""
    from .polynomials import parse
    if isinstance(expr, (tuple, list)):
        return _exponents_of(expr, len(variables))
    poly = parse(expr, variables) if isinstance(expr, str) else expr
    terms = poly.terms() if hasattr(poly, "terms") else sp.Poly(poly, *sp.symbols(variables)).terms()
    if len(terms) != 1:
        raise NonMonomialFactor(f"{expr} is not a single monomial")
    return tuple(int(k) for k in terms[0][0])


def _abs2(field: LocalField, syms, exps: Sequence[int]) -> sp.Expr:
    """|P|^2 in real coordinates for P = prod z_k^{e_k}."""
    out = sp.Integer(1)
    for k, e in enumerate(exps):
        if e == 0:
            continue
        if field.kind == "R":
            out *= syms[k] ** (2 * e)
        else:
            u, v = syms[2 * k], syms[2 * k + 1]
            out *= (u ** 2 + v ** 2) ** e
    return sp.expand(out)


def _apply_operator(op: sp.Poly, p: sp.Poly, syms) -> sp.Poly:
    """op(d) applied to p exp(-|x|^2/2); returns the new polynomial part."""
    result = sp.Poly(0, *syms, domain=p.domain)
    for monom, coeff in op.terms():
        q = p
        for j, m in enumerate(monom):
            for _ in range(m):
                # d_j (q e^{-|x|^2/2}) = (d_j q - x_j q) e^{-|x|^2/2}
                q = q.diff(syms[j]) - q * sp.Poly(syms[j], *syms)
        result += q * coeff
    return result


def fourier_poly(p: sp.Poly, syms, J) -> sp.Poly:
    """Polynomial part of FT[p exp(-|x|^2/2)], i.e. p(-i J d) applied to the Gaussian."""
    if p.is_zero:
        return sp.Poly(0, *syms, domain="QQ_I")
    sub = {s: -sp.I * j * s for s, j in zip(syms, J)}
    op = sp.Poly(p.as_expr().subs(sub, simultaneous=True), *syms, domain="QQ_I")
    return _apply_operator(op, sp.Poly(1, *syms, domain="QQ_I"), syms)


@dataclass
class TestFunction:
    """phi(x) = poly(x) exp(-|x|^2/2) and its transform fpoly(xi) exp(-|xi|^2/2)."""
    __test__ = False  # not a pytest class

    field: LocalField
    nvars: int
    syms: List[sp.Symbol]
    J: List[int]
    poly: sp.Poly
    fpoly: sp.Poly
    N: int = 0
    P: Tuple[int, ...] = ()
    R: Tuple[int, ...] = ()
    seed: int = 0
    _cache: Dict[str, object] = dc_field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.syms)

    def _fn(self, which: str):
        if which not in self._cache:
            p = self.poly if which == "f" else self.fpoly
            self._cache[which] = sp.lambdify(self.syms, p.as_expr(), "numpy")
        return self._cache[which]

    @staticmethod
    def _gauss(xs) -> np.ndarray:
        return np.exp(-sum(np.asarray(x) ** 2 for x in xs) / 2)

    def value(self, *xs) -> np.ndarray:
        """phi at real coordinates (complex values allowed for contour work)."""
        return np.asarray(self._fn("f")(*xs)) * self._gauss(xs)

    def fourier(self, *xs) -> np.ndarray:
        return np.asarray(self._fn("F")(*xs)) * self._gauss(xs)

    def transform(self) -> "TestFunction":
        """The transform as a test function; its transform is phi(-x)."""
        back = fourier_poly(self.fpoly, self.syms, self.J)
        # the roles of P and R swap under the transform
        return TestFunction(self.field, self.nvars, self.syms, self.J, self.fpoly, back,
                            self.N, self.R, self.P, self.seed)

    def scaled(self, c) -> "TestFunction":
        c = sp.nsimplify(c)
        return TestFunction(self.field, self.nvars, self.syms, self.J, self.poly * c,
                            self.fpoly * c, self.N, self.P, self.R, self.seed)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        return TestFunction(self.field, self.nvars, self.syms, self.J, self.poly + other.poly,
                            self.fpoly + other.fpoly, min(self.N, other.N), self.P, self.R)

    def vanishing_order(self, k: int, transform: bool = False) -> int:
        """Order of vanishing on the k-th variable hyperplane (complex: on z_k = 0)."""
        p = self.fpoly if transform else self.poly
        if p.is_zero:
            return 10 ** 9
        if self.field.kind == "R":
            return min(m[k] for m in p.monoms())
        # total degree in (u, v) of the lowest homogeneous piece
        return min(m[2 * k] + m[2 * k + 1] for m in p.monoms())

    def in_space(self) -> bool:
        """Membership in S_N^{P,R}: phi vanishes to order 2N on P = 0, phi-hat on R = 0."""
        need = 2 * self.N
        for k, e in enumerate(self.P):
            if e and self.vanishing_order(k) < need:
                return False
        for k, e in enumerate(self.R):
            if e and self.vanishing_order(k, transform=True) < need:
                return False
        return True

    def describe(self) -> dict:
        return {"N": self.N, "P": list(self.P), "R": list(self.R), "seed": self.seed,
                "degree": self.poly.total_degree()}


def hermite_core(syms, seed: int, degree: int = 2) -> sp.Poly:
    """A seeded random polynomial with small integer coefficients and constant term 1..3."""
    rng = random.Random(seed)
    p = sp.Integer(rng.randint(1, 3))
    for d in range(1, degree + 1):
        for monom in _monomials(len(syms), d):
            c = rng.randint(-2, 2)
            if c:
                term = sp.Integer(c)
                for s, m in zip(syms, monom):
                    term *= s ** m
                p += term
    return sp.Poly(p, *syms, domain="QQ")


def _monomials(n: int, d: int):
    if n == 1:
        yield (d,)
        return
    for k in range(d, -1, -1):
        for rest in _monomials(n - 1, d - k):
            yield (k,) + rest


def make_test_function(field: LocalField, P: Sequence[int], R: Sequence[int], N: int,
                       seed: int = 0, degree: int = 2) -> TestFunction:
    """|R|^{2N}(d) applied to |P|^{2N'} h, with h a seeded Hermite-Gaussian.

    P and R are monomials given by exponent vectors.  N' = N when R is trivial
    and 2N otherwise, which is the least power keeping phi divisible by P^{2N}.
    """
    nvars = len(P)
    P = _exponents_of(P, nvars)
    R = _exponents_of(R, nvars)
    syms, J = coordinates(field, nvars)
    core = hermite_core(syms, seed, degree) if degree >= 0 else sp.Poly(1, *syms, domain="QQ")
    Np = N if not any(R) else 2 * N
    base = sp.Poly(_abs2(field, syms, P), *syms, domain="QQ") ** Np * core if any(P) else core
    op = sp.Poly(_abs2(field, syms, R), *syms, domain="QQ") ** N if any(R) else sp.Poly(1, *syms)
    phi = _apply_operator(op, base, syms)
    fphi = fourier_poly(phi, syms, J)
    return TestFunction(field, nvars, syms, J, phi, fphi, N, P, R, seed)


def gaussian(field: LocalField, nvars: int = 1) -> TestFunction:
    return make_test_function(field, (0,) * nvars, (0,) * nvars, 0, degree=-1)

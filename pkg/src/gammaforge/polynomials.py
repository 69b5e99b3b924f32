"""Exact polynomials, rational functions and truncated power series.

Thin wrappers over sympy's Poly (domain QQ).  Evaluation returns Fractions so
callers never see sympy numbers.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import sympy as sp

Number = Union[int, Fraction]


def _to_fraction(x) -> Fraction:
    x = sp.Rational(x)
    return Fraction(int(x.p), int(x.q))


def _to_rational(x) -> sp.Rational:
    x = Fraction(x)
    return sp.Rational(x.numerator, x.denominator)


def symbols(names: Iterable[str]) -> Tuple[sp.Symbol, ...]:
    return tuple(sp.Symbol(n) for n in names)


class Polynomial:
    """Multivariate polynomial with rational coefficients over named variables."""

    __slots__ = ("poly", "_terms", "_grad")

    def __init__(self, expr, gens: Sequence[sp.Symbol]):
        self._terms = None
        self._grad = None
        if isinstance(expr, sp.Poly):
            self.poly = sp.Poly(expr.as_expr(), *gens, domain=sp.QQ)
        else:
            self.poly = sp.Poly(sp.sympify(expr), *gens, domain=sp.QQ)

    @property
    def gens(self) -> Tuple[sp.Symbol, ...]:
        return tuple(self.poly.gens)

    @property
    def nvars(self) -> int:
        return len(self.poly.gens)

    def expr(self):
        return self.poly.as_expr()

    def degree(self) -> int:
        return self.poly.total_degree()

    def is_zero(self) -> bool:
        return self.poly.is_zero

    def is_homogeneous(self) -> bool:
        return self.poly.is_zero or self.poly.is_homogeneous

    def diff(self, i: int) -> "Polynomial":
        return Polynomial(self.poly.diff(self.poly.gens[i]), self.gens)

    def gradient(self) -> List["Polynomial"]:
        return [self.diff(i) for i in range(self.nvars)]

    def hessian_at(self, point: Sequence[Number]) -> sp.Matrix:
        n = self.nvars
        pt = [Fraction(v) for v in point]
        H = [[Fraction(0)] * n for _ in range(n)]
        for m, c in self.terms():
            for i in range(n):
                if not m[i]:
                    continue
                for j in range(i, n):
                    e = list(m)
                    k = c * e[i]
                    e[i] -= 1
                    if not e[j]:
                        continue
                    k *= e[j]
                    e[j] -= 1
                    val = _eval_terms([(tuple(e), k)], pt)
                    H[i][j] += val
                    if i != j:
                        H[j][i] += val
        return sp.Matrix(n, n, lambda i, j: _to_rational(H[i][j]))

    def __call__(self, point: Sequence[Number]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError("wrong number of coordinates")
        return _eval_terms(self.terms(), [Fraction(v) for v in point])

    def terms(self):
        if self._terms is None:
            self._terms = [(m, _to_fraction(c)) for m, c in self.poly.terms()]
        return self._terms

    def gradient_at(self, point: Sequence[Number]) -> List[Fraction]:
        """The gradient at a point, from cached sparse derivative terms."""
        if self._grad is None:
            grad = []
            for i in range(self.nvars):
                g = []
                for m, c in self.terms():
                    if m[i]:
                        m2 = m[:i] + (m[i] - 1,) + m[i + 1:]
                        g.append((m2, c * m[i]))
                grad.append(g)
            self._grad = grad
        pt = [Fraction(v) for v in point]
        return [_eval_terms(g, pt) for g in self._grad]

    def compose(self, polys: Sequence["Polynomial"]) -> "Polynomial":
        """self(p_1, ..., p_n) as a polynomial in the variables of the p_i."""
        if len(polys) != self.nvars:
            raise ValueError("one polynomial per variable")
        gens = polys[0].gens
        sub = {g: p.expr() for g, p in zip(self.gens, polys)}
        return Polynomial(sp.expand(self.expr().xreplace(sub)), gens)

    def rename(self, gens: Sequence[sp.Symbol]) -> "Polynomial":
        return Polynomial(self.expr().xreplace(dict(zip(self.gens, gens))), gens)

    def __add__(self, other):
        return Polynomial(self.poly + _poly_of(other, self.gens), self.gens)

    def __sub__(self, other):
        return Polynomial(self.poly - _poly_of(other, self.gens), self.gens)

    def __mul__(self, other):
        return Polynomial(self.poly * _poly_of(other, self.gens), self.gens)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial(-self.poly, self.gens)

    def __pow__(self, k: int):
        return Polynomial(self.poly ** k, self.gens)

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.gens == other.gens and self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"Polynomial({self.expr()})"


def _eval_terms(terms, pt) -> Fraction:
    total = Fraction(0)
    for mono, c in terms:
        t = c
        for v, e in zip(pt, mono):
            if e:
                t *= v if e == 1 else v ** e
        total += t
    return total


def _poly_of(x, gens):
    if isinstance(x, Polynomial):
        return x.poly
    if isinstance(x, Fraction):
        x = _to_rational(x)
    return sp.Poly(x, *gens, domain=sp.QQ)


class RationalFunc:
    """num/den, reduced (gcd removed, den has positive leading coefficient)."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Optional[Polynomial] = None):
        gens = num.gens
        den = den if den is not None else Polynomial(1, gens)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if den.degree() == 0:
            n, d = num.poly, den.poly
        else:
            g = sp.gcd(num.poly, den.poly)
            n, d = sp.div(num.poly, g)[0], sp.div(den.poly, g)[0]
        lc = d.LC()
        if lc == 1:
            self.num, self.den = (num, den) if den.degree() == 0 else (Polynomial(n, gens), Polynomial(d, gens))
        else:
            self.num = Polynomial(n * (1 / lc), gens)
            self.den = Polynomial(d * (1 / lc), gens)

    @property
    def gens(self):
        return self.num.gens

    @property
    def nvars(self):
        return self.num.nvars

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def degree(self) -> int:
        return self.num.degree() - self.den.degree()

    def is_homogeneous(self) -> bool:
        return self.num.is_homogeneous() and self.den.is_homogeneous()

    def __call__(self, point: Sequence[Number]) -> Fraction:
        d = self.den(point)
        if d == 0:
            raise ZeroDivisionError("evaluated at a pole")
        return self.num(point) / d

    def gradient_at(self, point: Sequence[Number]) -> List[Fraction]:
        n, d = self.num(point), self.den(point)
        gn = self.num.gradient_at(point)
        if self.den.degree() == 0:
            return [g / d for g in gn]
        gd = self.den.gradient_at(point)
        return [(a * d - n * b) / (d * d) for a, b in zip(gn, gd)]

    def compose(self, funcs: Sequence["RationalFunc"]) -> "RationalFunc":
        gens = funcs[0].gens
        sub = {g: f.num.expr() / f.den.expr() for g, f in zip(self.gens, funcs)}
        e = sp.cancel(sp.together((self.num.expr() / self.den.expr()).xreplace(sub)))
        n, d = sp.fraction(e)
        return RationalFunc(Polynomial(sp.expand(n), gens), Polynomial(sp.expand(d), gens))

    def expr(self):
        return self.num.expr() / self.den.expr()

    def __repr__(self):
        return f"RationalFunc({self.expr()})"


def as_rational(f) -> RationalFunc:
    return f if isinstance(f, RationalFunc) else RationalFunc(f)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def parse(text: str, variables: Optional[Sequence[str]] = None) -> Polynomial:
    """Parse a polynomial: variables, + - *, ^ or ** with integer powers, rational literals.

    Division is only allowed by a rational literal.  Variables default to the
    names in order of first appearance.
    """
    pos, tokens = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad character at {pos} in {text!r}")
        tokens.append(m.groups())
        pos = m.end()
    seen: List[str] = []
    for num, name, op in tokens:
        if name and name not in seen:
            seen.append(name)
    names = list(variables) if variables is not None else seen
    for v in seen:
        if v not in names:
            raise ValueError(f"unknown variable {v}")
    syms = {n: sp.Symbol(n) for n in names}
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None, None)

    def take():
        nonlocal i
        i += 1
        return tokens[i - 1]

    def expr():
        val = term()
        while peek()[2] in ("+", "-"):
            op = take()[2]
            val = val + term() if op == "+" else val - term()
        return val

    def term():
        val = factor()
        while peek()[2] in ("*", "/"):
            op = take()[2]
            rhs = factor()
            if op == "/":
                if not rhs.is_Rational or rhs == 0:
                    raise ValueError("division only by nonzero rational literals")
                val = val / rhs
            else:
                val = val * rhs
        return val

    def factor():
        if peek()[2] in ("+", "-"):
            op = take()[2]
            v = factor()
            return v if op == "+" else -v
        base = atom()
        if peek()[2] in ("^", "**"):
            take()
            num = take()[0]
            if num is None:
                raise ValueError("exponents must be nonnegative integer literals")
            base = base ** int(num)
        return base

    def atom():
        num, name, op = take() if i < len(tokens) else (None, None, None)
        if num is not None:
            return sp.Rational(num)
        if name is not None:
            return syms[name]
        if op == "(":
            v = expr()
            if take()[2] != ")":
                raise ValueError("missing )")
            return v
        raise ValueError("unexpected end of input" if op is None else f"unexpected {op}")

    result = expr()
    if i != len(tokens):
        raise ValueError("trailing input")
    gens = tuple(syms[n] for n in names)
    if not gens:
        gens = (sp.Symbol("x"),)
    return Polynomial(sp.expand(result), gens)


# ---------------------------------------------------------------------------
# truncated power series

class PowerSeries:
    """Truncated power series sum c_a h^a, |a| <= order, at a base point.

    ``gens`` are the local coordinates h = v - base.
    """

    __slots__ = ("poly", "base", "order")

    def __init__(self, poly: Polynomial, base: Sequence[Number], order: int):
        self.base = tuple(Fraction(b) for b in base)
        self.order = order
        self.poly = _truncate(poly, order)

    @property
    def gens(self):
        return self.poly.gens

    @property
    def nvars(self):
        return self.poly.nvars

    def coeffs(self) -> Dict[Tuple[int, ...], Fraction]:
        return {m: _to_fraction(c) for m, c in self.poly.poly.terms()}

    def coeff(self, mono: Tuple[int, ...]) -> Fraction:
        return _to_fraction(self.poly.poly.coeff_monomial(mono))

    def value(self) -> Fraction:
        return self.coeff((0,) * self.nvars)

    def linear(self) -> List[Fraction]:
        n = self.nvars
        return [self.coeff(tuple(1 if j == i else 0 for j in range(n))) for i in range(n)]

    def hessian(self) -> sp.Matrix:
        n = self.nvars
        H = sp.zeros(n, n)
        for i in range(n):
            for j in range(n):
                m = [0] * n
                m[i] += 1
                m[j] += 1
                c = self.poly.poly.coeff_monomial(tuple(m))
                H[i, j] = c * (2 if i == j else 1)
        return H

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        return PowerSeries(self.poly + other.poly, self.base, min(self.order, other.order))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        return PowerSeries(self.poly - other.poly, self.base, min(self.order, other.order))

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        return PowerSeries(self.poly * other.poly, self.base, min(self.order, other.order))

    def diff(self, i: int) -> "PowerSeries":
        return PowerSeries(self.poly.diff(i), self.base, self.order - 1)

    def compose(self, series: Sequence[Polynomial], order: int, gens) -> Polynomial:
        """self(s_1, ..., s_n) truncated, where the s_i have no constant term."""
        sub = {g: s.expr() for g, s in zip(self.gens, series)}
        return _truncate(Polynomial(sp.expand(self.poly.expr().xreplace(sub)), gens), order)

    def __eq__(self, other):
        return (isinstance(other, PowerSeries) and self.base == other.base
                and self.order == other.order and self.coeffs() == other.coeffs())

    def __repr__(self):
        return f"PowerSeries(base={self.base}, order={self.order}, {self.poly.expr()})"

    @staticmethod
    def from_function(f, base: Sequence[Number], order: int,
                      names: Optional[Sequence[str]] = None) -> "PowerSeries":
        """Taylor expansion of a Polynomial or RationalFunc at base."""
        rf = as_rational(f)
        n = rf.nvars
        gens = symbols(names or [f"h{i + 1}" for i in range(n)])
        shift = {g: _to_rational(b) + h for g, b, h in zip(rf.gens, base, gens)}
        num = _truncate(Polynomial(sp.expand(rf.num.expr().xreplace(shift)), gens), order)
        den = Polynomial(sp.expand(rf.den.expr().xreplace(shift)), gens)
        d0 = den.poly.coeff_monomial((0,) * n)
        if d0 == 0:
            raise ZeroDivisionError("base point is a pole")
        e = _truncate(Polynomial(den.poly * (1 / d0) - 1, gens), order)
        inv = Polynomial(1, gens)
        term = Polynomial(1, gens)
        for _ in range(order):
            term = _truncate(term * (-e), order)
            inv = inv + term
        res = _truncate(num * inv, order) * Polynomial(1 / d0, gens)
        return PowerSeries(res, base, order)


def _truncate(p: Polynomial, order: int) -> Polynomial:
    terms = {m: c for m, c in p.poly.terms() if sum(m) <= order}
    gens = p.gens
    if not terms:
        return Polynomial(0, gens)
    return Polynomial(sp.Poly.from_dict(terms, *gens, domain=sp.QQ), gens)


# sparse truncated arithmetic on {exponent tuple: Fraction}

def series_mul(a: dict, b: dict, order: int) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        d1 = sum(m1)
        for m2, c2 in b.items():
            if d1 + sum(m2) > order:
                continue
            key = tuple(x + y for x, y in zip(m1, m2))
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v != 0}


def series_add(a: dict, b: dict, scale=1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
    return {k: v for k, v in out.items() if v != 0}


def series_diff(a: dict, i: int) -> dict:
    out = {}
    for m, c in a.items():
        if m[i]:
            out[m[:i] + (m[i] - 1,) + m[i + 1:]] = c * m[i]
    return out


def series_compose(p: dict, subs: Sequence[dict], order: int, nout: int) -> dict:
    """p(s_1, ..., s_n) truncated; the s_i must have no constant term."""
    cache: Dict[Tuple[int, int], dict] = {}
    one = {(0,) * nout: Fraction(1)}

    def pw(i, e):
        if e == 0:
            return one
        key = (i, e)
        if key not in cache:
            cache[key] = series_mul(pw(i, e - 1), subs[i], order)
        return cache[key]

    out: dict = {}
    for m, c in p.items():
        if sum(m) > order:
            continue
        term = {k: c * v for k, v in one.items()}
        for i, e in enumerate(m):
            if e:
                term = series_mul(term, pw(i, e), order)
                if not term:
                    break
        out = series_add(out, term)
    return out


def poly_from_dict(d: dict, gens) -> Polynomial:
    if not d:
        return Polynomial(0, gens)
    return Polynomial(sp.Poly.from_dict({k: _to_rational(v) for k, v in d.items()}, *gens, domain=sp.QQ), gens)

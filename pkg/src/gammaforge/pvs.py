"""Legendre and multiplicative Legendre transforms, prehomogeneous spaces.

The multiplicative Legendre transform f_* of a homogeneous f is defined by
f_*(f'/f) = 1/f.  Builtin relative invariants come with an explicit dual
invariant; mlt_verify discovers the constant c with f_*(f'/f) f = c.
"""

from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import sympy as sp

from .characters import COMPLEX, Character, mul, nu
from .divisors import MonomialIdentity, ab_relation, check_relation
from .errors import (AssumptionViolated, DegenerateHessian, DegreeMismatch,
                     SingularHessian, UnknownName)
from .gamma import gamma_char
from .polynomials import (Polynomial, PowerSeries, RationalFunc, _eval_terms, _to_fraction,
                          poly_from_dict, series_add, series_compose, series_diff, series_mul,
                          as_rational, symbols)


# ---------------------------------------------------------------------------
# multiplicative Legendre transform

@dataclass(frozen=True)
class MLTResult:
    ok: bool
    scale: Optional[Fraction]
    exact: bool = False  # verified as a rational-function identity

    def __bool__(self):
        return self.ok


def random_point(n: int, rng: random.Random, lo: int = -9, hi: int = 9) -> List[Fraction]:
    return [Fraction(rng.randint(lo, hi), rng.randint(1, 5)) for _ in range(n)]


def _hessian_nondegenerate(f, rng: random.Random, tries: int = 3) -> bool:
    rf = as_rational(f)
    if not rf.is_polynomial():
        return True  # all rational inputs here come from mlt_pair on good data
    for _ in range(tries):
        pt = random_point(rf.nvars, rng)
        if rf.num.hessian_at(pt).det() != 0:
            return True
    return False


def _log_gradient(rf: RationalFunc, pt) -> Optional[List[Fraction]]:
    try:
        val = rf(pt)
    except ZeroDivisionError:
        return None
    if val == 0:
        return None
    return [g / val for g in rf.gradient_at(pt)], val


def mlt_verify(f, f_star, points: int = 20, seed: int = 0, check_hessian: bool = True,
               exact: Optional[bool] = None) -> MLTResult:
    """Is f_star the multiplicative Legendre transform of f up to a constant?

    Checks f_star(f'(x)/f(x)) f(x) = c at random rational points.  For
    polynomials of degree <= 3 in <= 10 variables the identity
    f_star(f') = c f^{d-1} is also checked exactly.
    """
    rf, rs = as_rational(f), as_rational(f_star)
    if not (rf.is_homogeneous() and rs.is_homogeneous()):
        raise DegreeMismatch("inputs must be homogeneous")
    d = rf.degree()
    if rs.degree() != d:
        raise DegreeMismatch(f"degrees {d} and {rs.degree()} differ")
    if rf.nvars != rs.nvars:
        raise DegreeMismatch("different numbers of variables")
    rng = random.Random(seed)
    if check_hessian and not _hessian_nondegenerate(rf, rng):
        raise DegenerateHessian("det f'' vanishes at random points")
    scale = None
    done = 0
    attempts = 0
    while done < points and attempts < 10 * points:
        attempts += 1
        pt = random_point(rf.nvars, rng)
        lg = _log_gradient(rf, pt)
        if lg is None:
            continue
        g, val = lg
        try:
            c = rs(g) * val
        except ZeroDivisionError:
            continue
        if scale is None:
            scale = c
        elif c != scale:
            return MLTResult(False, None)
        done += 1
    if scale is None or scale == 0:
        return MLTResult(False, None)
    want_exact = exact if exact is not None else (d <= 3 and rf.nvars <= 10)
    if want_exact and rf.is_polynomial() and rs.is_polynomial():
        fp = rf.num * Fraction(1) * _to_fraction(1 / rf.den.poly.LC())
        fsp = rs.num * _to_fraction(1 / rs.den.poly.LC())
        lhs = fsp.compose(fp.gradient())
        rhs = (fp ** (d - 1)) * scale
        if lhs.poly != rhs.poly:
            return MLTResult(False, None)
        return MLTResult(True, scale, exact=True)
    return MLTResult(True, scale)


def composition_check(f, f_star, points: int = 20, seed: int = 1) -> bool:
    """(f_*'/f_*) o (f'/f) = identity at random rational points."""
    rf, rs = as_rational(f), as_rational(f_star)
    rng = random.Random(seed)
    done = attempts = 0
    while done < points and attempts < 10 * points:
        attempts += 1
        pt = random_point(rf.nvars, rng)
        lg = _log_gradient(rf, pt)
        if lg is None:
            continue
        lg2 = _log_gradient(rs, lg[0])
        if lg2 is None:
            continue
        if lg2[0] != pt:
            return False
        done += 1
    return done == points


def mlt_monomial(ns: Sequence[int]) -> Tuple[Fraction, Tuple[int, ...]]:
    """(prod x_i^{n_i})_* = prod n_i^{-n_i} prod x_i^{n_i}: (scale, exponents)."""
    scale = Fraction(1)
    for k in ns:
        if k == 0:
            raise ValueError("exponents must be nonzero")
        scale *= Fraction(k) ** (-k)
    return scale, tuple(ns)


def mlt_pair(f: Polynomial, f_star: Polynomial, d: Optional[int] = None,
             check: bool = True) -> Tuple[RationalFunc, RationalFunc]:
    """F(x, y) = f'(x).y + f(x) and its transform.

    F_*(xi, eta) = (d-1)^{1-d} (f_*'(eta).xi - f_*(eta))^{d-1} f_*(eta)^{2-d}, with
    xi dual to x and eta dual to y (0^0 = 1 when d = 1).
    """
    d = f.degree() if d is None else d
    if check:
        res = mlt_verify(f, f_star, check_hessian=d > 1)
        if not res.ok or res.scale != 1:
            raise AssumptionViolated("f_star must be the exact transform of f")
    M = f.nvars
    xs = symbols([f"x{i + 1}" for i in range(M)] + [f"y{i + 1}" for i in range(M)])
    duals = symbols([f"xi{i + 1}" for i in range(M)] + [f"eta{i + 1}" for i in range(M)])
    x, y = xs[:M], xs[M:]
    xi, eta = duals[:M], duals[M:]
    fx = f.expr().xreplace(dict(zip(f.gens, x)))
    F = sum(sp.diff(fx, x[i]) * y[i] for i in range(M)) + fx
    fs_eta = f_star.expr().xreplace(dict(zip(f_star.gens, eta)))
    inner = sum(sp.diff(fs_eta, eta[i]) * xi[i] for i in range(M)) - fs_eta
    if d == 1:
        Fs = fs_eta
    else:
        Fs = sp.Rational(d - 1) ** (1 - d) * inner ** (d - 1) * fs_eta ** (2 - d)
    num, den = sp.fraction(sp.together(Fs))
    return (RationalFunc(Polynomial(sp.expand(F), xs)),
            RationalFunc(Polynomial(sp.expand(num), duals), Polynomial(sp.expand(den), duals)))


# ---------------------------------------------------------------------------
# formal Legendre transform

def legendre_series(Q: PowerSeries, order: Optional[int] = None,
                    names: Optional[Sequence[str]] = None) -> PowerSeries:
    """L(Q)(p) = p.v_p - Q(v_p) near p_0 = Q'(v_0), exact to the truncation order.

    v_p is found by the chord iteration w <- H^{-1}(delta - R(w)), where R is
    the nonlinear part of Q'; each pass fixes one more order.
    """
    K = Q.order if order is None else order
    n = Q.nvars
    H = Q.hessian()
    if H.det() == 0:
        raise SingularHessian("the quadratic part of Q is degenerate")
    Hinv = [[_to_fraction(c) for c in row] for row in H.inv().tolist()]
    Hf = [[_to_fraction(c) for c in row] for row in H.tolist()]
    p0 = Q.linear()
    v0 = Q.base
    delta = symbols(names or [f"p{i + 1}" for i in range(n)])
    q = Q.coeffs()
    unit = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    nonlin = []
    for i in range(n):
        g = series_diff(q, i)
        g = series_add(g, {(0,) * n: p0[i]}, -1)
        g = series_add(g, {unit[j]: Hf[i][j] for j in range(n) if Hf[i][j]}, -1)
        nonlin.append(g)
    w = [dict() for _ in range(n)]
    for _ in range(K + 1):
        R = [series_compose(g, w, K, n) for g in nonlin]
        w = []
        for i in range(n):
            acc: dict = {}
            for j in range(n):
                if Hinv[i][j]:
                    rhs = series_add({unit[j]: Fraction(1)}, R[j], -1)
                    acc = series_add(acc, rhs, Hinv[i][j])
            w.append(acc)
    qw = series_compose(q, w, K, n)
    G: dict = {}
    for i in range(n):
        vi = series_add({(0,) * n: v0[i]}, w[i])
        pi = {(0,) * n: p0[i], unit[i]: Fraction(1)}
        G = series_add(G, series_mul(pi, vi, K))
    G = series_add(G, qw, -1)
    return PowerSeries(poly_from_dict(G, delta), p0, K)


def legendre_numeric(grad: Callable, value: Callable, p, v_start, tol: float = 1e-12,
                     max_iter: int = 100, hess: Optional[Callable] = None):
    """Numeric L(Q)(p) by Newton on Q'(v) = p; returns (L, v, residual)."""
    import numpy as np
    v = np.array(v_start, dtype=float)
    p = np.array(p, dtype=float)
    for _ in range(max_iter):
        r = np.array(grad(v)) - p
        if np.linalg.norm(r) < tol:
            break
        J = np.array(hess(v))
        v = v - np.linalg.solve(J, r)
    r = float(np.linalg.norm(np.array(grad(v)) - p))
    return float(p @ v - value(v)), v, r


# ---------------------------------------------------------------------------
# prehomogeneous spaces

@dataclass
class PVSDescriptor:
    name: str
    M: int
    D: int
    f: Polynomial
    f_star: Polynomial
    b_roots: Tuple[Fraction, ...]
    scale: Optional[Fraction] = None
    irreducible: bool = True

    def __post_init__(self):
        self.b_roots = tuple(Fraction(r) for r in self.b_roots)
        if len(self.b_roots) != self.D:
            raise ValueError("one root per degree")
        if self.f.nvars != self.M or self.f_star.nvars != self.M:
            raise ValueError("f and f_star must have M variables")

    def b(self, s) -> Fraction:
        out = Fraction(1)
        for r in self.b_roots:
            out *= Fraction(s) + r
        return out

    def roots_symmetric(self) -> bool:
        """Roots symmetric about (1 + M/D)/2."""
        c2 = 1 + Fraction(self.M, self.D)
        return sorted(self.b_roots) == sorted(c2 - r for r in self.b_roots)


def _det_poly(n: int, prefix: str = "x") -> Tuple[Polynomial, Polynomial]:
    xs = symbols([f"{prefix}{i + 1}{j + 1}" for i in range(n) for j in range(n)])
    ys = symbols([f"y{i + 1}{j + 1}" for i in range(n) for j in range(n)])
    X = sp.Matrix(n, n, xs)
    Y = sp.Matrix(n, n, ys)
    return Polynomial(sp.expand(X.det()), xs), Polynomial(sp.expand(Y.det()), ys)


def _sym_det(n: int):
    idx = [(i, j) for i in range(n) for j in range(i, n)]
    xs = symbols([f"x{i + 1}{j + 1}" for i, j in idx])
    ys = symbols([f"y{i + 1}{j + 1}" for i, j in idx])
    X, Y = sp.zeros(n, n), sp.zeros(n, n)
    for (i, j), a, b in zip(idx, xs, ys):
        X[i, j] = X[j, i] = a
        # the gradient doubles off-diagonal cofactors; undo that in the dual
        Y[i, j] = Y[j, i] = b if i == j else b / 2
    return Polynomial(sp.expand(X.det()), xs), Polynomial(sp.expand(Y.det()), ys)


def _pfaffian_expr(A: sp.Matrix):
    n = A.shape[0]
    if n == 0:
        return sp.Integer(1)
    total = sp.Integer(0)
    for j in range(1, n):
        keep = [k for k in range(n) if k not in (0, j)]
        sub = A.extract(keep, keep)
        total += (-1) ** (j + 1) * A[0, j] * _pfaffian_expr(sub)
    return total


def _pfaffian(n: int):
    if n % 2:
        raise UnknownName("pfaffian needs an even size")
    idx = [(i, j) for i in range(n) for j in range(i + 1, n)]
    xs = symbols([f"x{i + 1}{j + 1}" for i, j in idx])
    ys = symbols([f"y{i + 1}{j + 1}" for i, j in idx])
    X, Y = sp.zeros(n, n), sp.zeros(n, n)
    for (i, j), a, b in zip(idx, xs, ys):
        X[i, j], X[j, i] = a, -a
        Y[i, j], Y[j, i] = b, -b
    return Polynomial(sp.expand(_pfaffian_expr(X)), xs), Polynomial(sp.expand(_pfaffian_expr(Y)), ys)


# split octonions by Cayley-Dickson doubling: (a,b)(c,d) = (ac + g conj(d) b, d a + b conj(c))
_CD_SIGNS = (-1, -1, 1)  # C, H, then the split step


def _oct_conj(p):
    if len(p) == 1:
        return list(p)
    h = len(p) // 2
    return _oct_conj(p[:h]) + [-t for t in p[h:]]


def _oct_mul(p, q, level: int = 3):
    if level == 0:
        return [p[0] * q[0]]
    h = len(p) // 2
    a, b, c, d = p[:h], p[h:], q[:h], q[h:]
    g = _CD_SIGNS[level - 1]
    ac = _oct_mul(a, c, level - 1)
    db = _oct_mul(_oct_conj(d), b, level - 1)
    da = _oct_mul(d, a, level - 1)
    bc = _oct_mul(b, _oct_conj(c), level - 1)
    return [u + g * v for u, v in zip(ac, db)] + [u + v for u, v in zip(da, bc)]


def octonion_norm_signs() -> Tuple[int, ...]:
    """n(e_i) for the basis vectors of the split octonions."""
    out = []
    for i in range(8):
        e = [0] * 8
        e[i] = 1
        out.append(_oct_mul(e, _oct_conj(e))[0])
    return tuple(out)


def _albert_norm(a, b, c, x, y, z):
    """abc - a n(x) - b n(y) - c n(z) + T(xyz) for [[a,z,ybar],[zbar,b,x],[y,xbar,c]]."""
    def n(w):
        return _oct_mul(w, _oct_conj(w))[0]
    xyz = _oct_mul(_oct_mul(x, y), z)
    return a * b * c - a * n(x) - b * n(y) - c * n(z) + 2 * xyz[0]


def _e6_cubic():
    names = ["a", "b", "c"] + [f"{v}{i}" for v in "xyz" for i in range(8)]
    xs = symbols(names)
    ys = symbols(["d" + nm for nm in names])
    f = sp.expand(_albert_norm(xs[0], xs[1], xs[2], list(xs[3:11]), list(xs[11:19]), list(xs[19:27])))
    # grad N = T(X#, .): off-diagonal coordinates pick up 2 n(e_i)
    signs = octonion_norm_signs()
    scaled = list(ys[:3]) + [ys[3 + 8 * k + i] / (2 * signs[i]) for k in range(3) for i in range(8)]
    fs = sp.expand(_albert_norm(scaled[0], scaled[1], scaled[2], scaled[3:11], scaled[11:19], scaled[19:27]))
    return Polynomial(f, xs), Polynomial(fs, ys)


_BUILTIN_RE = re.compile(r"^\s*([a-z_0-9]+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def builtin(name: str) -> PVSDescriptor:
    """power(n), monomial(k), det(n<=4), sym_det(n<=4), pfaffian(2m<=8), e6_cubic, quad_times_linear(N)."""
    m = _BUILTIN_RE.match(name)
    if not m:
        raise UnknownName(name)
    kind, arg = m.group(1), m.group(2)
    k = int(arg) if arg else None
    if kind in ("e6", "e6_cubic"):
        f, fs = _e6_cubic()
        return PVSDescriptor("e6_cubic", 27, 3, f, fs, (1, 5, 9), scale=Fraction(1))
    if k is None or k < 1:
        raise UnknownName(name)
    if kind == "power":
        x, y = sp.Symbol("x"), sp.Symbol("y")
        f = Polynomial(x ** k, (x,))
        fs = Polynomial(y ** k / sp.Integer(k) ** k, (y,))
        return PVSDescriptor(f"power({k})", 1, k, f, fs,
                             tuple(Fraction(k - j, k) for j in range(k)), scale=Fraction(1))
    if kind == "monomial":
        xs = symbols([f"x{i + 1}" for i in range(k)])
        ys = symbols([f"y{i + 1}" for i in range(k)])
        return PVSDescriptor(f"monomial({k})", k, k, Polynomial(sp.Mul(*xs), xs),
                             Polynomial(sp.Mul(*ys), ys), (1,) * k, scale=Fraction(1))
    if kind == "det" and k <= 4:
        f, fs = _det_poly(k)
        return PVSDescriptor(f"det({k})", k * k, k, f, fs, tuple(range(1, k + 1)), scale=Fraction(1))
    if kind == "sym_det" and k <= 4:
        f, fs = _sym_det(k)
        return PVSDescriptor(f"sym_det({k})", k * (k + 1) // 2, k, f, fs,
                             tuple(Fraction(j + 2, 2) for j in range(k)), scale=Fraction(1))
    if kind == "pfaffian" and k % 2 == 0 and k <= 8:
        f, fs = _pfaffian(k)
        h = k // 2
        return PVSDescriptor(f"pfaffian({k})", k * (k - 1) // 2, h, f, fs,
                             tuple(range(1, k, 2)), scale=None)
    if kind == "quad_times_linear":
        vs = symbols([f"v{i + 1}" for i in range(k)] + ["x"])
        ws = symbols([f"w{i + 1}" for i in range(k)] + ["xi"])
        f = Polynomial(sum(v ** 2 for v in vs[:-1]) * vs[-1], vs)
        fs = Polynomial(sum(w ** 2 for w in ws[:-1]) * ws[-1], ws)
        return PVSDescriptor(f"quad_times_linear({k})", k + 1, 3, f, fs,
                             (1, 1, Fraction(k, 2)), scale=Fraction(4), irreducible=False)
    raise UnknownName(name)


BUILTIN_NAMES = ("power(n)", "monomial(k)", "det(n)", "sym_det(n)", "pfaffian(2m)",
                 "e6_cubic", "quad_times_linear(N)")


def b_function_value(V: PVSDescriptor, s: int) -> Fraction:
    """c b(s) from f_*(d) f^{s+1} = c b(s) f^s, for a nonnegative integer s.

    Evaluates the ratio at a random point; c depends on the normalization of f_*.
    """
    f_terms = V.f.terms()
    g = {(0,) * V.M: Fraction(1)}
    for _ in range(s + 1):
        g = _sparse_mul(g, f_terms)
    out: dict = {}
    for alpha, c in V.f_star.terms():
        for mono, coeff in g.items():
            k = coeff * c
            new = []
            for e, a in zip(mono, alpha):
                if a > e:
                    k = 0
                    break
                k *= math.perm(e, a)
                new.append(e - a)
            if k:
                key = tuple(new)
                out[key] = out.get(key, 0) + k
    rng = random.Random(7)
    while True:
        pt = random_point(V.M, rng)
        fv = V.f(pt)
        if fv != 0:
            return _eval_terms(list(out.items()), pt) / fv ** s


def _sparse_mul(a: dict, terms) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in terms:
            key = tuple(x + y for x, y in zip(m1, m2))
            out[key] = out.get(key, 0) + c1 * c2
    return out


# ---------------------------------------------------------------------------
# Gamma functions and identities

def _check_assumptions(V: PVSDescriptor):
    if V.M % V.D:
        raise AssumptionViolated(f"M/D = {V.M}/{V.D} is not an integer")
    for r in V.b_roots:
        if (2 * r).denominator != 1:
            raise AssumptionViolated(f"b root {r} is not a half integer")


def gamma_pvs(V: PVSDescriptor, s, n: int = 0) -> complex:
    """prod_j Gamma^C(lambda_{s + 2(s_j - M/D), n}), i.e. Gamma^V with C_V = 1."""
    _check_assumptions(V)
    md = Fraction(V.M, V.D)
    val = 1 + 0j
    for r in V.b_roots:
        chi = Character(COMPLEX, complex(s) + float(2 * (r - md)), n)
        val *= gamma_char(chi)
    return val


def gamma_pvs_char(V: PVSDescriptor) -> Callable[[Character], complex]:
    return lambda chi: gamma_pvs(V, chi.s, chi.n)


def _nu_pow(e) -> Character:
    return Character(COMPLEX, 2 * Fraction(e), 0)


def arrangements(roots: Sequence[Fraction]) -> List[Tuple[Fraction, ...]]:
    return sorted(set(itertools.permutations(roots)))


def pvs_identities(V: PVSDescriptor) -> List[MonomialIdentity]:
    """Identities for FT of psi(a f(x)/y) lambda_W(f(x)) lambda_t(y) on W + C.

    One per arrangement sigma of the b-function roots:
        lambda_t = nu^{s1-s2-1}, lambda_W = nu^{s2-M/D},
        eta_t = nu^{s3-s1-1},    eta_W = nu^{1-s3},  gamma = nu^{1+s2-s3}.
    """
    _check_assumptions(V)
    if V.D != 3:
        raise AssumptionViolated("only invariants of degree 3 (one auxiliary variable)")
    if not V.roots_symmetric():
        # the Gamma^V product and its functional equation need the symmetry
        raise AssumptionViolated(f"b-function roots of {V.name} are not symmetric")
    md = Fraction(V.M, V.D)
    exps, degs = (-1, 1), (1, V.D)
    out = []
    for s1, s2, s3 in arrangements(V.b_roots):
        lam = (_nu_pow(s1 - s2 - 1), _nu_pow(s2 - md))
        eta = (_nu_pow(s3 - s1 - 1), _nu_pow(1 - s3))
        gam = _nu_pow(1 + s2 - s3)
        ident = MonomialIdentity(
            field=COMPLEX, exponents=exps, degrees=degs, lambdas=lam, etas=eta, gamma=gam,
            case="Sum2", a=Fraction(1), b=ab_relation(exps, degs, "Sum2"),
            spaces=(None, V), variables=("y", "x"),
        )
        q, p = qp(lam)
        q2, p2 = qp(eta)
        ident.label = f"({q},{p})->({q2},{p2})"
        if not ident.check_invariants() or not check_pvs_relation(ident):
            raise AssertionError("identity invariants failed")
        out.append(ident)
    return out


def qp(chars: Sequence[Character]) -> Tuple[Fraction, Fraction]:
    """(q, p) with the distribution |y|^q |f|^p, i.e. lambda_t = nu^{q/2}, lambda_W = nu^{p/2}."""
    return chars[0].s, chars[1].s


def expanded_relation(ident: MonomialIdentity):
    """Split each PVS slot into D scalar slots of exponent n_i via the Gamma^V product.

    Returns (exponents, mu, xi, case) for divisors.check_relation.
    """
    F = ident.field
    ns, mus = [], []
    for k, lam, V in zip(ident.exponents, ident.lambdas, ident.spaces or [None] * len(ident.exponents)):
        if V is None:
            ns.append(k)
            mus.append(mul(lam, nu(F)))
            continue
        if abs(k) != 1:
            raise AssumptionViolated("PVS slots carry exponent +-1")
        for r in V.b_roots:
            ns.append(k)
            mus.append(mul(lam, _nu_pow(r)))
    mu, xi, case = ident.relation_data()
    return tuple(ns), tuple(mus), xi, case


def check_pvs_relation(ident: MonomialIdentity) -> bool:
    ns, mus, xi, case = expanded_relation(ident)
    return check_relation(ident.field, ns, mus, xi, case, exact=True)


def pvs_involution(idents: Sequence[MonomialIdentity]):
    """The map (q,p) -> (q',p') and its fixed points."""
    pairs = {qp(i.lambdas): qp(i.etas) for i in idents}
    return pairs, sorted(k for k, v in pairs.items() if k == v)

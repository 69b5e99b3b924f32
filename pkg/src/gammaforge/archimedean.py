"""Numerical weak-sense verification of identities over R and C.

Both sides of FT(G_1) = C G_2 are paired with Hermite-Gaussian test functions:
left = <G_1, phi-hat>, right = <G_2, phi>, with psi(x) = exp(i Re x) and the
self-dual measure (2 pi)^{-dim/2} dx.  Only one numerical integral per side is
needed because phi-hat is known in closed form.

Two quadrature schemes are used.

* tensor: polynomial phases.  Gauss-Legendre panels on the box where the
  Gaussian envelope exceeds 1e-14, each panel shorter than half a local period
  of the phase.
* ray: the phase a x^m / y over R with m odd.  For fixed y the x-integral is
  moved onto the two rays where x^m is i sign(a/y) times a positive number;
  the phase becomes a decaying exponential.  The outer y-integral uses panels
  graded geometrically towards y = 0.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .characters import Character, LocalField, trivial
from .errors import ToleranceNotMet, UnsupportedCase
from .hermite import TestFunction, gaussian, make_test_function

ENVELOPE = 1e-14
_GL_CACHE = {}


def _gl(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def threads() -> int:
    try:
        return max(1, int(os.environ.get("GAMMAFORGE_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# elementary functions

def _char_values(chi: Character, x: np.ndarray) -> np.ndarray:
    """lambda_{s,n} on an array of nonzero real or complex numbers."""
    s = complex(chi.s)
    r = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(s * np.log(r)) if s != 0 else np.ones_like(r, dtype=complex)
        if chi.n:
            out = out * (x / r) ** chi.n
    return out


def _polynomial_power(chi: Character) -> Optional[int]:
    """k when chi(x) = x^k over R with k >= 0 an integer, else None."""
    s = chi.s
    if isinstance(s, complex):
        if s.imag:
            return None
        s = s.real
    if float(s) != int(float(s)) or s < 0:
        return None
    k = int(float(s))
    return k if (k - chi.n) % 2 == 0 else None


@dataclass
class ElementaryFunction:
    """c psi(a prod x_i^{n_i}) prod lambda_i(x_i)."""
    field: LocalField
    exponents: Tuple[int, ...]
    chars: Tuple[Character, ...]
    a: complex = 1
    c: complex = 1

    @property
    def nvars(self) -> int:
        return len(self.exponents)

    def _complex_coords(self, xs):
        if self.field.kind == "R":
            return [np.asarray(x) for x in xs]
        return [np.asarray(xs[2 * k]) + 1j * np.asarray(xs[2 * k + 1]) for k in range(self.nvars)]

    def phase(self, *xs) -> np.ndarray:
        zs = self._complex_coords(xs)
        mono = complex(self.a)
        for z, n in zip(zs, self.exponents):
            mono = mono * z.astype(complex) ** n
        return np.real(mono) if self.field.kind == "C" else mono

    def __call__(self, *xs) -> np.ndarray:
        zs = self._complex_coords(xs)
        val = complex(self.c) * np.exp(1j * self.phase(*xs))
        for z, chi in zip(zs, self.chars):
            val = val * _char_values(chi, z)
        return val


def identity_sides(ident, b=None) -> Tuple[ElementaryFunction, ElementaryFunction]:
    """(G_1, G_2) with FT(G_1) = C G_2; b overrides the right-hand coefficient."""
    F = ident.field
    lhs = ElementaryFunction(F, tuple(ident.exponents), tuple(ident.lambdas), complex(ident.a))
    bb = ident.b if b is None else b
    rhs = ElementaryFunction(F, tuple(ident.ms), tuple(ident.etas), complex(bb))
    return lhs, rhs


# ---------------------------------------------------------------------------
# pairing

@dataclass
class PairResult:
    value: complex
    error: float
    method: str
    nodes: int

    @property
    def rel_error(self) -> float:
        return self.error / max(abs(self.value), 1e-300)


def _check_integrable(G: ElementaryFunction, phi: TestFunction, use_fourier: bool):
    for k, chi in enumerate(G.chars):
        order = phi.vanishing_order(k, transform=use_fourier)
        re_s = complex(chi.s).real
        limit = -1 if G.field.kind == "R" else -2
        if re_s + order <= limit:
            raise ToleranceNotMet(
                f"integrand not locally integrable on variable {k}: "
                f"Re(s) = {re_s} with vanishing order {order}")


def _radius(phi: TestFunction) -> float:
    deg = max(phi.poly.total_degree(), phi.fpoly.total_degree())
    # |x|^deg exp(-|x|^2/2) < 1e-14 well inside this radius
    return math.sqrt(2 * math.log(1 / ENVELOPE)) + math.sqrt(max(deg, 1)) + 1.0


def _breakpoints(lo: float, hi: float, slope, max_width: float = 1.0) -> np.ndarray:
    """Panel endpoints with width bounded by half a local period and max_width."""
    pts = [lo]
    x = lo
    while x < hi - 1e-12:
        w = max_width
        for _ in range(3):
            g = slope(x, min(x + w, hi))
            w = min(max_width, math.pi / max(g, 1e-12))
        x = min(x + max(w, 1e-3), hi)
        pts.append(x)
    if 0.0 > lo and 0.0 < hi and not np.any(np.isclose(pts, 0.0)):
        pts.append(0.0)
    return np.array(sorted(pts))


def _panel_nodes(bps: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    t, w = _gl(n)
    a, b = bps[:-1, None], bps[1:, None]
    x = (a + b) / 2 + (b - a) / 2 * t[None, :]
    ww = (b - a) / 2 * w[None, :]
    return x.ravel(), ww.ravel()


def _slope_functions(G: ElementaryFunction, L: float):
    """Bounds for |d phase / d x_j| on slabs, from a sampled gradient."""
    dim = G.nvars if G.field.kind == "R" else 2 * G.nvars
    m = 161 if dim <= 2 else 21
    grid = np.linspace(-L, L, m)
    mesh = np.meshgrid(*([grid] * dim), indexing="ij")
    ph = np.asarray(G.phase(*mesh), dtype=complex).real
    grads = np.gradient(ph, *([grid] * dim)) if dim > 1 else [np.gradient(ph, grid)]
    out = []
    for j in range(dim):
        g = np.abs(np.moveaxis(grads[j], j, 0)).reshape(m, -1).max(axis=1)
        h = grid[1] - grid[0]

        def slope(a, b, g=g, h=h):
            i0 = max(0, int((a + L) / h) - 1)
            i1 = min(m, int((b + L) / h) + 2)
            return float(g[i0:i1].max()) * 1.1 + 1e-9
        out.append(slope)
    return out


def _tensor_pair(G: ElementaryFunction, f, dim: int, L: float, n: int, slopes) -> Tuple[complex, int]:
    axes = []
    for j in range(dim):
        bps = _breakpoints(-L, L, slopes[j])
        axes.append(_panel_nodes(bps, n))
    norm = (2 * math.pi) ** (-dim / 2)
    if dim == 1:
        x, w = axes[0]
        return complex(np.sum(G(x) * f(x) * w)) * norm, len(x)
    if dim == 2:
        (x, wx), (y, wy) = axes
        total = 0j
        for i in range(0, len(x), 256):
            X, Y = np.meshgrid(x[i:i + 256], y, indexing="ij")
            W = np.outer(wx[i:i + 256], wy)
            total += np.sum(G(X, Y) * f(X, Y) * W)
        return total * norm, len(x) * len(y)
    raise UnsupportedCase("tensor quadrature is limited to two real dimensions")


def _ray_pattern(G: ElementaryFunction) -> Optional[Tuple[int, int, int, int]]:
    """(iy, ix, m, k) when G = psi(a x^m / y) lambda(y) x^k over R, m odd."""
    if G.field.kind != "R" or G.nvars != 2:
        return None
    for iy, ix in ((0, 1), (1, 0)):
        if G.exponents[iy] == -1 and G.exponents[ix] > 0 and G.exponents[ix] % 2 == 1:
            k = _polynomial_power(G.chars[ix])
            if k is not None:
                return iy, ix, G.exponents[ix], k
    return None


def _graded_breakpoints(L: float, width: float = 0.5, levels: int = 24) -> np.ndarray:
    fine = [L * 2.0 ** (-j) for j in range(levels, 0, -1) if L * 2.0 ** (-j) < 1.0]
    start = fine[-1] if fine else 0.0
    coarse = list(np.arange(max(start, 1.0), L, width)) + [L]
    pts = [0.0] + fine + coarse
    return np.unique(np.array(pts))


def _ray_pair(G: ElementaryFunction, f, L: float, n: int, pattern) -> Tuple[complex, int]:
    iy, ix, m, k = pattern
    a = complex(G.a).real
    if a == 0 or complex(G.a).imag:
        raise UnsupportedCase("ray quadrature needs a nonzero real coefficient")
    half = _graded_breakpoints(L)
    yh, wh = _panel_nodes(half, n)
    ys = np.concatenate([-yh[::-1], yh])
    wy = np.concatenate([wh[::-1], wh])
    lam_y = _char_values(G.chars[iy], ys.astype(complex))
    tn, tw = _gl(n)
    total = 0j
    count = 0
    cosm = math.cos(math.pi / m)
    for sigma in (1, -1):
        mask = np.sign(a / ys) == sigma
        y = ys[mask]
        w1 = np.exp(1j * sigma * math.pi / (2 * m))
        w2 = -np.exp(-1j * sigma * math.pi / (2 * m))
        # truncation: exp(-t^m |a/y|) and the rotated Gaussian both below 1e-16
        T = np.minimum((40 * np.abs(y / a)) ** (1.0 / m), math.sqrt(80 / cosm)) + 0.5
        panels = 8
        edges = np.linspace(0, 1, panels + 1)
        u = ((edges[:-1, None] + edges[1:, None]) / 2 + (edges[1:, None] - edges[:-1, None]) / 2 * tn).ravel()
        uw = ((edges[1:, None] - edges[:-1, None]) / 2 * tw).ravel()
        t = T[:, None] * u[None, :]
        wt = T[:, None] * uw[None, :]
        Y = np.broadcast_to(y[:, None], t.shape)
        inner = 0j
        for omega, sgn in ((w1, 1), (w2, -1)):
            x = omega * t
            args = [None, None]
            args[iy], args[ix] = Y, x
            # exp(i a x^m / y) = exp(-|a/y| t^m) on the ray
            val = np.exp(-np.abs(a / Y) * t ** m) * x ** k * f(*args)
            inner = inner + sgn * omega * np.sum(val * wt, axis=1)
        total += complex(G.c) * np.sum(inner * lam_y[mask] * wy[mask])
        count += t.size * 2
    return total / (2 * math.pi), count


def pair(G: ElementaryFunction, phi: TestFunction, fourier: bool = False,
         tol: float = 1e-8, n: int = 20) -> PairResult:
    """Integral of G against phi (or against phi-hat when fourier is set)."""
    if G.field != phi.field or G.nvars != phi.nvars:
        raise UnsupportedCase("function and test function live on different spaces")
    _check_integrable(G, phi, fourier)
    f = phi.fourier if fourier else phi.value
    L = _radius(phi)
    pattern = _ray_pattern(G)
    if pattern is not None:
        v1, c1 = _ray_pair(G, f, L, n, pattern)
        v2, c2 = _ray_pair(G, f, L, n + n // 2, pattern)
        method = "ray"
    elif all(e >= 0 for e in G.exponents):
        dim = phi.dim
        slopes = _slope_functions(G, L)
        v1, c1 = _tensor_pair(G, f, dim, L, n, slopes)
        v2, c2 = _tensor_pair(G, f, dim, L, n + n // 2, slopes)
        method = "tensor"
    else:
        raise UnsupportedCase(f"no quadrature scheme for exponents {G.exponents}")
    err = abs(v2 - v1) + 1e-15 * max(1.0, abs(v2))
    if not (cmath.isfinite(v2) and err <= max(tol * abs(v2), 1e-13)):
        raise ToleranceNotMet(f"quadrature error {err:.3g} exceeds tolerance {tol:g}")
    return PairResult(v2, err, method, c1 + c2)


def monte_carlo_pair(G: ElementaryFunction, phi: TestFunction, fourier: bool = False,
                     samples: int = 400_000, seed: int = 0) -> Tuple[complex, float]:
    """Crude cross-check: phi = p exp(-|x|^2/2), so the pairing is E[G p] under N(0, I)."""
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((phi.dim, samples))
    p = phi._fn("F" if fourier else "f")(*xs)
    vals = G(*xs) * np.asarray(p)
    return complex(vals.mean()), float(vals.std() / math.sqrt(samples))


# ---------------------------------------------------------------------------
# reports

@dataclass
class VerificationReport:
    identity: str
    tests: List[dict]
    left: List[complex]
    right: List[complex]
    constants: List[complex]
    C: complex
    deviation: float
    quad_error: float
    tol: float
    N: int
    seeds: List[int]
    fitted: bool
    passed: bool = dc_field(init=False)

    def __post_init__(self):
        self.passed = bool(self.deviation < self.tol and self.quad_error < self.tol / 10)

    @property
    def unimodular_deviation(self) -> float:
        return abs(abs(self.C) - 1)

    def to_json(self) -> dict:
        cj = lambda z: [float(complex(z).real), float(complex(z).imag)]
        return {
            "schema": "1",
            "identity": self.identity,
            "tests": self.tests,
            "left": [cj(z) for z in self.left],
            "right": [cj(z) for z in self.right],
            "constants": [cj(z) for z in self.constants],
            "C": cj(self.C),
            "abs_C": abs(self.C),
            "deviation": self.deviation,
            "quad_error": self.quad_error,
            "tol": self.tol,
            "N": self.N,
            "seeds": self.seeds,
            "fitted": self.fitted,
            "pass": self.passed,
        }


def _singular_vars(G: ElementaryFunction) -> Tuple[int, ...]:
    """Monomial exponent vector marking variables where G is not smooth."""
    out = []
    for e, chi in zip(G.exponents, G.chars):
        smooth = e >= 0 and (G.field.kind == "C" and chi.s == 0 and chi.n == 0
                             or G.field.kind == "R" and _polynomial_power(chi) is not None)
        out.append(0 if smooth else 1)
    return tuple(out)


def _run(jobs):
    if threads() == 1 or len(jobs) == 1:
        return [j() for j in jobs]
    with ThreadPoolExecutor(threads()) as ex:
        futures = [ex.submit(j) for j in jobs]
        return [fu.result() for fu in futures]


def verify_pair(lhs: ElementaryFunction, rhs: ElementaryFunction, tests: Sequence[TestFunction],
                tol: float, C: Optional[complex] = None, label: str = "") -> VerificationReport:
    """left_k = <lhs, phi_k-hat>, right_k = <rhs, phi_k>; C fitted on the first test if absent."""
    qtol = tol / 100
    jobs = []
    for phi in tests:
        jobs.append(lambda phi=phi: pair(lhs, phi, fourier=True, tol=qtol))
        jobs.append(lambda phi=phi: pair(rhs, phi, fourier=False, tol=qtol))
    res = _run(jobs)
    left = [r.value for r in res[0::2]]
    right = [r.value for r in res[1::2]]
    consts = [l / r for l, r in zip(left, right)]
    fitted = C is None
    CC = consts[0] if fitted else complex(C)
    dev = max(abs(l - CC * r) / abs(l) for l, r in zip(left, right))
    qerr = max(r.rel_error for r in res)
    return VerificationReport(label, [t.describe() for t in tests], left, right, consts, CC,
                              dev, qerr, tol, max(t.N for t in tests),
                              [t.seed for t in tests], fitted)


def verify_identity(ident, num_tests: int = 3, tol: float = 1e-2, seed: int = 0, N: int = 2,
                    C: Optional[complex] = None, b=None, degree: int = 2,
                    max_N: int = 4) -> VerificationReport:
    """Weak-sense check of FT(G_1) = C G_2 against num_tests test functions.

    phi vanishes on the singular locus of G_2 and phi-hat on that of G_1.  N is
    raised (up to max_N) when an integrand is not locally integrable.
    """
    lhs, rhs = identity_sides(ident, b)
    P = _singular_vars(rhs)
    R = _singular_vars(lhs)
    label = ident.label or "identity"
    while True:
        tests = [make_test_function(ident.field, P, R, N, seed + k, degree) for k in range(num_tests)]
        try:
            return verify_pair(lhs, rhs, tests, tol, C, label)
        except ToleranceNotMet as exc:
            if "integrable" not in str(exc) or N >= max_N:
                raise
            N += 1


# ---------------------------------------------------------------------------
# the Gauss identity  FT(psi(-Q)) = eps(Q) psi(Q^{-1}),  Q(x) = a x^2 / 2

def fresnel_epsilon(field: LocalField, a) -> complex:
    """The constant for Q = a x^2/2 (magnitude |a|_F^{-1/2} included)."""
    a = complex(a)
    if field.kind == "R":
        if a.imag:
            raise ValueError("a must be real over R")
        return abs(a.real) ** -0.5 * cmath.exp(-1j * math.pi * math.copysign(1, a.real) / 4)
    return 1 / abs(a)


def fresnel_gaussian_pairing(a) -> complex:
    """Closed form of the integral of psi(a x^2/2) exp(-x^2/2) over R, self-dual measure."""
    return (1 - 1j * complex(a)) ** -0.5


def gauss_sides(field: LocalField, a) -> Tuple[ElementaryFunction, ElementaryFunction]:
    a = complex(a) if field.kind == "C" else float(a)
    one = (trivial(field),)
    return (ElementaryFunction(field, (2,), one, -a / 2),
            ElementaryFunction(field, (2,), one, 1 / (2 * a)))


def gauss_check(field: LocalField, a=1, num_tests: int = 3, tol: float = 1e-6,
                seed: int = 0, degree: int = 2) -> VerificationReport:
    """Fit eps(Q) against a plain Gaussian and Hermite-Gaussians; C is the fitted eps."""
    lhs, rhs = gauss_sides(field, a)
    tests = [gaussian(field)] + [make_test_function(field, (0,), (0,), 0, seed + k, degree)
                                 for k in range(1, num_tests)]
    return verify_pair(lhs, rhs, tests, tol, None, f"gauss({field.kind}, a={a})")

"""Exact finite-sum verification over Q_p and its unramified extensions.

psi(x) = exp(2 pi i {x}_p) is trivial on O and not on p^{-1} O.  On an
unramified extension E we use psi_E = psi o Tr; O_E is then self-dual, and the
self-dual measure gives O_E volume 1.

Elements of E are integer coefficient vectors in the basis 1, X, ..., X^{f-1}
of O_E = Z_p[X]/(g), where g is the first monic polynomial (in lexicographic
order) that is irreducible mod p.  A point of E is p^e * xi with xi integral,
so everything reduces to integer arithmetic modulo powers of p.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .errors import LevelTooCoarse, PoleError, PrecisionTooLow

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# the unramified extension

@lru_cache(maxsize=None)
def _first_irreducible(p: int, f: int) -> Tuple[int, ...]:
    """Coefficients (low to high, monic) of the first irreducible of degree f mod p."""
    if f == 1:
        return (0, 1)
    X = sp.Symbol("X")
    for tail in itertools.product(range(p), repeat=f):
        coeffs = tuple(reversed(tail)) + (1,)
        # coeffs[0] is the constant term; skip X | g
        if coeffs[0] == 0:
            continue
        poly = sp.Poly(sum(c * X ** i for i, c in enumerate(coeffs)), X, modulus=p)
        if poly.is_irreducible:
            return coeffs
    raise ValueError(f"no irreducible polynomial of degree {f} mod {p}")


@dataclass(frozen=True)
class UnramifiedExt:
    """E = Q_p[X]/(g), g irreducible mod p of degree f."""
    p: int
    f: int
    modulus: Tuple[int, ...]

    @staticmethod
    def build(p: int, f: int) -> "UnramifiedExt":
        return UnramifiedExt(p, f, _first_irreducible(p, f))

    @property
    def q(self) -> int:
        return self.p ** self.f

    def companion(self) -> np.ndarray:
        f = self.f
        C = np.zeros((f, f), dtype=object)
        for i in range(1, f):
            C[i, i - 1] = 1
        for i in range(f):
            C[i, f - 1] = -self.modulus[i]
        return C

    @property
    def trace_table(self) -> Tuple[int, ...]:
        """Tr(X^k) for k < 2f, as exact integers."""
        return _trace_table(self)

    def trace_matrix(self) -> np.ndarray:
        """T[i, j] = Tr(X^{i+j}), so Tr(a b) = a^T T b."""
        tt = self.trace_table
        f = self.f
        return np.array([[tt[i + j] for j in range(f)] for i in range(f)], dtype=np.int64)

    def trace(self, xs: np.ndarray) -> np.ndarray:
        """Tr of integral vectors (shape (..., f))."""
        t = np.array(self.trace_table[:self.f], dtype=np.int64)
        return xs @ t

    def trace_with(self, x0: Sequence[int], xs: np.ndarray) -> np.ndarray:
        v = self.trace_matrix() @ np.array(x0, dtype=np.int64)
        return xs @ v

    def mult_matrix(self, x: Sequence[int]) -> np.ndarray:
        """Matrix of multiplication by x in the power basis (exact integers)."""
        C = self.companion()
        M = np.zeros((self.f, self.f), dtype=object)
        P = np.identity(self.f, dtype=object)
        for c in x:
            M = M + int(c) * P
            P = C.dot(P)
        return M

    def mul(self, a: Sequence[int], b: Sequence[int]) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.mult_matrix(a).dot(np.array(b, dtype=object)))

    def norm_exact(self, x: Sequence[int]) -> int:
        return int(sp.Matrix(self.mult_matrix(x).tolist()).det())

    def norm(self, xs: np.ndarray, mod: int) -> np.ndarray:
        """Norms of integral vectors modulo mod (mod < 2^21 keeps int64 exact)."""
        xs = np.asarray(xs, dtype=np.int64) % mod
        f = self.f
        if f == 1:
            return xs[..., 0] % mod
        # entries of the multiplication matrix, each reduced mod `mod`
        C = self.companion()
        powers = [np.identity(f, dtype=object)]
        for _ in range(f - 1):
            powers.append(C.dot(powers[-1]))
        ent = [[None] * f for _ in range(f)]
        for i in range(f):
            for j in range(f):
                acc = np.zeros(xs.shape[:-1], dtype=np.int64)
                for k in range(f):
                    c = int(powers[k][i, j]) % mod
                    if c:
                        acc = (acc + c * xs[..., k]) % mod
                ent[i][j] = acc
        total = np.zeros(xs.shape[:-1], dtype=np.int64)
        for perm in itertools.permutations(range(f)):
            sign = _perm_sign(perm)
            term = np.ones(xs.shape[:-1], dtype=np.int64)
            for i, j in enumerate(perm):
                term = (term * ent[i][j]) % mod
            total = (total + sign * term) % mod
        return total

    def residues(self, level: int) -> np.ndarray:
        """All integral vectors modulo p^level, shape (q^level, f)."""
        m = self.p ** level
        axes = [np.arange(m, dtype=np.int64)] * self.f
        grid = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grid], axis=-1)

    def valuation(self, x: Sequence[int]) -> float:
        """v_E(x) for an integral vector, with v_E(p) = 1."""
        vals = [_vp(int(c), self.p) for c in x]
        return min(vals)


@lru_cache(maxsize=None)
def _trace_table(E: UnramifiedExt) -> Tuple[int, ...]:
    C = sp.Matrix(E.companion().tolist())
    out, P = [], sp.eye(E.f)
    for _ in range(2 * E.f):
        out.append(int(P.trace()))
        P = C * P
    return tuple(out)


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _vp(n: int, p: int) -> float:
    if n == 0:
        return math.inf
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def e_p(num: np.ndarray, k: int, p: int) -> np.ndarray:
    """psi(num * p^k) for integer arrays num: exp(2 pi i (num mod p^{-k}) / p^{-k})."""
    num = np.asarray(num)
    if k >= 0:
        return np.ones(num.shape, dtype=complex)
    m = p ** (-k)
    return np.exp(TWO_PI_I * (num % m) / m)


# ---------------------------------------------------------------------------
# integration of locally constant functions on p^{-K} O

@dataclass
class Points:
    """A batch of points x = r p^{-K} of Q_p (r integers)."""
    r: np.ndarray
    K: int
    p: int

    def valuation(self) -> np.ndarray:
        r = self.r.astype(np.int64)
        v = np.zeros(r.shape, dtype=float)
        zero = r == 0
        rr = np.where(zero, 1, r)
        while True:
            div = (rr % self.p == 0)
            if not div.any():
                break
            v += div
            rr = np.where(div, rr // self.p, rr)
        v = v - self.K
        v[zero] = math.inf
        return v

    def psi(self) -> np.ndarray:
        return e_p(self.r, -self.K, self.p)


def integrate(f: Callable[[Points], np.ndarray], p: int, level: int, K: int = 0,
              check: bool = True, seed: int = 0) -> complex:
    """Integral of f over p^{-K} O, f constant on cosets of p^level O.

    Each coset r p^{-K} + p^level O has measure p^{-level}.
    """
    n = p ** (K + level)
    r = np.arange(n, dtype=np.int64)
    vals = np.asarray(f(Points(r, K, p)), dtype=complex)
    if check:
        rng = np.random.default_rng(seed)
        # one step to the next coset representative, then random multiples
        for k in range(3):
            shift = (rng.integers(1, p ** 3, size=n) if k else 1) * n
            other = np.asarray(f(Points(r + shift, K, p)), dtype=complex)
            ok = np.isclose(vals, other, rtol=1e-12, atol=1e-12) | (~np.isfinite(vals) & ~np.isfinite(other))
            if not ok.all():
                raise LevelTooCoarse(f"function is not constant on cosets of p^{level} O")
    if not np.all(np.isfinite(vals)):
        raise LevelTooCoarse("function is singular inside a cell")
    return complex(vals.sum()) * float(p) ** (-level)


def shell_psi_integral(E: UnramifiedExt, n: int, extra: int = 0) -> complex:
    """Integral of psi_E over {v_E(x) = n} by enumeration of unit residues."""
    L = max(0, -n) + extra
    xi = E.residues(max(L, 1)) if L else E.residues(1)
    level = max(L, 1)
    units = np.any(xi % E.p != 0, axis=1)
    xi = xi[units]
    vals = e_p(E.trace(xi), n, E.p)
    return complex(vals.sum()) * float(E.q) ** (-n - level)


# ---------------------------------------------------------------------------
# Gamma over Q_p and E via shell sums

def gamma_closed(q: int, s) -> complex:
    """(1 - q^{s-1}) / (1 - q^{-s})."""
    s = complex(s)
    den = 1 - q ** (-s)
    if abs(den) < 1e-12:
        raise PoleError(f"pole of Gamma at s={s} (q={q})")
    return (1 - q ** (s - 1)) / den


def gamma_shell(E: UnramifiedExt, s, zeta: complex = 1.0, K: int = 1, top: int = 2) -> complex:
    """Gamma^E(chi) for chi(x) = zeta^{v(x)} |x|^s, as a sum over shells.

    Shells with v in [-K, top] are enumerated; the shells above top are a
    geometric series, summed in closed form (its analytic continuation).
    """
    s = complex(s)
    q = E.q
    r = zeta * q ** (-s)  # chi(x) |x|^{-1} q^{-n} on shell n, divided by its volume factor
    if abs(1 - r) < 1e-12:
        raise PoleError(f"pole of the shell sum at s={s}")
    total = 0j
    for n in range(-K, top + 1):
        weight = zeta ** n * q ** (-n * (s - 1))
        total += weight * shell_psi_integral(E, n)
    # shells n > top: integral of psi is q^{-n} (1 - 1/q)
    total += (1 - 1 / q) * r ** (top + 1) / (1 - r)
    return total


@dataclass
class GammaReport:
    p: int
    points: List[complex]
    shell: List[complex]
    closed: List[complex]
    max_error: float
    stationarity: float
    passed: bool

    def to_json(self) -> dict:
        cj = lambda z: [z.real, z.imag]
        return {"schema": "1", "p": self.p, "s": [cj(complex(z)) for z in self.points],
                "shell": [cj(z) for z in self.shell], "closed": [cj(z) for z in self.closed],
                "max_error": self.max_error, "stationarity": self.stationarity,
                "pass": self.passed}


def default_grid(n: int = 20) -> List[complex]:
    """Rational points in (-2, 3) avoiding the pole at 0, two of them off the real axis."""
    pts = [complex(k, 0) / 8 for k in range(-15, 25, 2)][:n - 2]
    return pts + [0.5 + 0.75j, 1.25 - 0.4j]


def shell_stationarity(E: UnramifiedExt, K: int = 1, top: int = 2, reach: int = 3) -> float:
    """Largest deviation of the shells outside [-K, top] from what the truncation assumes.

    Shells below -K are dropped, so their psi-integrals must vanish; shells above
    top are summed as q^{-n}(1 - 1/q).  Both are checked by enumeration.
    """
    q = float(E.q)
    dev = 0.0
    for n in range(-K - reach, -K):
        dev = max(dev, abs(shell_psi_integral(E, n)))
    for n in range(top + 1, top + 1 + reach):
        dev = max(dev, abs(shell_psi_integral(E, n) - q ** (-n) * (1 - 1 / q)) * q ** n)
    return dev


def cyclic_grid(n: int = 12) -> List[complex]:
    """Points with Re s in (0, 3); negative s makes the products cancel badly in floats."""
    pts = [complex(k, 0) / 4 + 0.125 for k in range(n - 2)]
    return pts + [0.5 + 0.75j, 1.25 - 0.4j]


def check_gamma_nonarch(p: int, grid: Optional[Sequence] = None, tol: float = 1e-10) -> GammaReport:
    E = UnramifiedExt.build(p, 1)
    pts = list(default_grid() if grid is None else grid)
    shell, closed = [], []
    for s in pts:
        if abs(1 - p ** (-complex(s))) < 1e-12:
            raise PoleError(f"s={s} is a pole")
        shell.append(gamma_shell(E, s))
        closed.append(gamma_closed(p, s))
    statio = shell_stationarity(E)
    err = max(abs(a - b) / max(1.0, abs(b)) for a, b in zip(shell, closed))
    return GammaReport(p, pts, shell, closed, err, statio, err < tol and statio < tol)


# ---------------------------------------------------------------------------
# the cyclic-extension identity

@dataclass
class CyclicReport:
    p: int
    f: int
    points: List[complex]
    constants: List[complex]
    constant: complex
    spread: float
    passed: bool

    def to_json(self) -> dict:
        cj = lambda z: [z.real, z.imag]
        return {"schema": "1", "p": self.p, "degree": self.f,
                "s": [cj(complex(z)) for z in self.points],
                "constants": [cj(z) for z in self.constants], "constant": cj(self.constant),
                "spread": self.spread, "pass": self.passed}


def verify_cyclic_gamma(p: int, f_ext: int, grid: Optional[Sequence] = None,
                        tol: float = 1e-10) -> CyclicReport:
    """lambda(E/F) Gamma^E(lambda o Nm) = prod over chi of Gamma^F(chi lambda), lambda = nu^s.

    The chi are the f_ext characters zeta^{v(x)} of F*/Nm(E*).  Both sides are
    shell sums; the constant lambda(E/F) is fitted and must not depend on s.
    """
    E = UnramifiedExt.build(p, f_ext)
    F = UnramifiedExt.build(p, 1)
    pts = list(cyclic_grid() if grid is None else grid)
    consts = []
    for s in pts:
        lhs = gamma_shell(E, s)  # lambda o Nm = nu_E^s
        rhs = 1 + 0j
        for j in range(f_ext):
            zeta = cmath.exp(TWO_PI_I * j / f_ext)
            rhs *= gamma_shell(F, s, zeta)
        consts.append(rhs / lhs)
    c0 = consts[0]
    spread = max(abs(c - c0) for c in consts)
    return CyclicReport(p, f_ext, pts, consts, c0, spread, spread < tol)


# ---------------------------------------------------------------------------
# the cubic identity  FT(phi) = eps phi,  phi(t, x) = E(t) |t|^{-1} psi(Nm(x)/t)

@dataclass(frozen=True)
class TPart:
    """h(t) = 1[p^e (tau0 + p^w O)] with tau0 a unit.

    h vanishes near t = 0.  Its transform is
    p^{-e-w} psi(p^e tau0 t*) on p^{-e-w} O, which reaches t* = 0.
    """
    e: int
    w: int
    tau0: int = 1


@dataclass(frozen=True)
class XPart:
    """g(x) = 1[p^beta (x0 + p^b O_E)] with x0 a unit, or x0 = 0 and b = 0 for a ball."""
    x0: Tuple[int, ...]
    beta: int
    b: int


@dataclass(frozen=True)
class CubicTest:
    t: TPart
    x: XPart

    def describe(self) -> dict:
        return {"e": self.t.e, "w": self.t.w, "tau0": self.t.tau0,
                "x0": list(self.x.x0), "beta": self.x.beta, "b": self.x.b}


def _unit_residues(p: int, L: int) -> np.ndarray:
    r = np.arange(p ** L, dtype=np.int64)
    return r[r % p != 0] if L > 0 else np.array([1], dtype=np.int64)


def _inverse_mod(r: np.ndarray, m: int) -> np.ndarray:
    return np.array([pow(int(v), -1, m) for v in r], dtype=np.int64)


class CubicPairing:
    """Pairings of phi(t, x) = E(t) |t|^{-1} psi(Nm(x)/t) against h(t) g(x) and its transform.

    The x-support is cut into pieces p^rho (xi0 + p^m O_E) with xi0 a unit and
    m >= 1.  On such a piece Nm is equidistributed on Nm(xi0)(1 + p^m O), since
    the norm maps 1 + p^m O_E onto 1 + p^m O.  So the x-integral of
    psi(Nm(x)/t) over a piece is its volume times psi(p^{3 rho} Nm(xi0)/t)
    when 3 rho + m >= v(t), and 0 otherwise.  What is left is a short sum over
    t-cells.  `brute=True` enumerates the x-cells instead (small cases only).

    The dual pairing is a sum over shells v(t*) = j >= -e-w.  Past a threshold
    every live piece has weight 1 and the shell terms satisfy
    c_{j+3} = c_j / q_E exactly, so the tail is summed in closed form after
    checking that relation on the last computed shells.
    """

    def __init__(self, p: int, chi_order: int = 3, trivial_char: bool = False):
        self.p = p
        self.E = UnramifiedExt.build(p, 3)
        self.omega = 1.0 if trivial_char else cmath.exp(TWO_PI_I / chi_order)
        self._cache: Dict[tuple, tuple] = {}

    # -- x side ---------------------------------------------------------------
    def _units(self, m: int) -> np.ndarray:
        xi = self.E.residues(m)
        return xi[np.any(xi % self.p != 0, axis=1)]

    def _pieces(self, kind: str, x0, beta: int, b: int, jmax: int, extra: int):
        """Arrays (rho, m, Nm(xi0) mod p^big, weight * volume) tiling the x-support."""
        key = (kind, tuple(x0), beta, b, jmax, extra)
        if key in self._cache:
            return self._cache[key]
        E, p = self.E, self.p
        big = p ** 16
        rhos, ms, norms, ws = [], [], [], []

        def add(rho, m, xi, w):
            rhos.append(np.full(len(xi), rho))
            ms.append(np.full(len(xi), m))
            norms.append(E.norm(xi, big))
            ws.append(w * float(E.q) ** (-rho - m))

        if kind == "g" and any(x0):
            # p^beta (x0 + p^b O_E), x0 a unit
            m = max(b, 1) + extra
            xi = E.residues(m)
            xi = xi[np.all((xi - np.array(x0)) % (p ** b) == 0, axis=1)]
            add(beta, m, xi, np.ones(len(xi), dtype=complex))
            tail = None
        else:
            # a ball p^beta O_E, x = p^beta xi, with weight psi(p^{-b} Tr(x0 xi))
            # (the transform side, or the direct side when x0 = 0 and b = 0)
            R = max(b, -(-jmax // 3) - beta, 0)
            for r in range(R):
                m = max(1, b - r) + extra
                xi = self._units(m)
                w = e_p(E.trace_with(x0, xi), r - b, p)
                add(beta + r, m, xi, w)
            tail = (beta + R, float(E.q) ** (-beta - R))
        if not rhos:
            add(0, 1, np.zeros((0, 3), dtype=np.int64), np.zeros(0, dtype=complex))
        out = (np.concatenate(rhos), np.concatenate(ms), np.concatenate(norms),
               np.concatenate(ws), tail)
        self._cache[key] = out
        return out

    @staticmethod
    def _phase_level(j: int, pieces) -> int:
        """Level of tau on which psi(Nm(x)/t) depends, over the live pieces."""
        rho, m = pieces[0], pieces[1]
        live = 3 * rho + m >= j
        return int(max(0, (j - 3 * rho[live]).max())) if live.any() else 0

    def _t_sum(self, j: int, taus: np.ndarray, tw: np.ndarray, Lt: int, pieces) -> complex:
        """Sum over t = p^j tau, tau a unit mod p^Lt, of tw E(t)|t|^{-1} (x-integral)."""
        p = self.p
        rho, m, N, w, tail = pieces
        live = 3 * rho + m >= j
        k = j - 3 * rho[live]  # psi(p^{-k} Nm(xi0)/tau)
        Nl, wl = N[live], w[live]
        inner = np.zeros(len(taus), dtype=complex)
        if len(k):
            kmax = int(max(k.max(), 0))
            if kmax > Lt:
                raise PrecisionTooLow("t-cells coarser than the phase")
            mod = p ** max(kmax, 1)
            tinv = _inverse_mod(taus % mod, mod)
            for kk in np.unique(k):
                sel = k == kk
                if kk <= 0:
                    inner += wl[sel].sum()
                    continue
                mm = p ** int(kk)
                ph = np.exp(TWO_PI_I * (np.outer(tinv % mm, Nl[sel] % mm) % mm) / mm)
                inner += ph @ wl[sel]
        if tail is not None:
            rho_t, vol = tail
            if 3 * rho_t < j:
                raise PrecisionTooLow("x-tail too large for the phase")
            inner += vol
        chi = self.omega ** j * float(p) ** j  # E(t) |t|^{-1}
        mu = float(p) ** (-j - Lt)
        return complex(chi * mu * np.sum(tw * inner))

    # -- t side ---------------------------------------------------------------
    def _t_direct(self, T: TPart, Lt: int):
        taus = _unit_residues(self.p, Lt)
        m = self.p ** T.w
        return taus, np.where(taus % m == T.tau0 % m, 1.0, 0.0).astype(complex)

    def _t_dual(self, T: TPart, j: int, Lt: int):
        p = self.p
        taus = _unit_residues(p, Lt)
        return taus, float(p) ** (-T.e - T.w) * e_p(T.tau0 * taus, j + T.e, p)

    def direct(self, test: CubicTest, extra: int = 0, brute: bool = False) -> complex:
        """<phi, h g>."""
        T, X = test.t, test.x
        j = T.e
        if brute:
            return self._brute(j, T, X, extra, dual=False)
        pieces = self._pieces("g", X.x0, X.beta, X.b, j, extra)
        Lt = max(T.w, self._phase_level(j, pieces), 1) + extra
        taus, tw = self._t_direct(T, Lt)
        return self._t_sum(j, taus, tw, Lt, pieces)

    def dual_shell(self, test: CubicTest, j: int, extra: int = 0,
                   brute: bool = False) -> complex:
        """Contribution of v(t*) = j to <phi, (h g)^>.

        g-hat(x*) = q^{-beta-b} psi(Tr(p^beta x0 x*)) on p^{-beta-b} O_E.
        """
        T, X = test.t, test.x
        if j < -T.e - T.w:
            return 0j
        if brute:
            return self._brute(j, T, X, extra, dual=True)
        pieces = self._pieces("ghat", X.x0, -X.beta - X.b, X.b, j, extra)
        Lt = max(-(j + T.e), self._phase_level(j, pieces), 1) + extra
        taus, tw = self._t_dual(T, j, Lt)
        return float(self.E.q) ** (-X.beta - X.b) * self._t_sum(j, taus, tw, Lt, pieces)

    def self_similar_from(self, test: CubicTest, extra: int = 0) -> int:
        """First shell past which c_{j+3} = c_j / q_E holds by construction."""
        T, X = test.t, test.x
        beta = -X.beta - X.b
        return max(-T.e, 3 * (beta + X.b) + X.b + 1 + extra, -T.e - T.w)

    def dual(self, test: CubicTest, M: int = 3, extra: int = 0) -> complex:
        """<phi, (h g)^>: shells up to j0 + 3M, then the geometric tail."""
        j_lo = -test.t.e - test.t.w
        J = self.self_similar_from(test, extra) + 3 * max(M, 2)
        c = [self.dual_shell(test, j, extra) for j in range(j_lo, J + 1)]
        if len(c) < 6:
            raise PrecisionTooLow("too few dual shells to test the tail")
        q = float(self.E.q)
        last, prev = np.array(c[-3:]), np.array(c[-6:-3])
        scale = max(np.abs(c).max(), 1e-300)
        if np.abs(prev - q * last).max() > 1e-12 * scale:
            raise PrecisionTooLow("dual shells not yet self-similar; raise the precision")
        return complex(sum(c) + last.sum() / (q - 1))

    # -- brute force: enumerate all x-cells -------------------------------------
    def _brute(self, j: int, T: TPart, X: XPart, extra: int, dual: bool) -> complex:
        E, p = self.E, self.p
        beta = -X.beta - X.b if dual else X.beta
        k = max(0, j - 3 * beta)
        Lx = max(X.b, k, 1) + extra
        Lt = max(T.w if not dual else -(j + T.e), k, 1) + extra
        xi = E.residues(Lx)
        if dual:
            w = e_p(E.trace_with(X.x0, xi), -X.b, p) * float(E.q) ** (-X.beta - X.b)
            taus, tw = self._t_dual(T, j, Lt)
        else:
            sel = np.all((xi - np.array(X.x0)) % (p ** X.b) == 0, axis=1)
            xi = xi[sel]
            w = np.ones(len(xi), dtype=complex)
            taus, tw = self._t_direct(T, Lt)
        if k > 0:
            mod = p ** k
            N = E.norm(xi, mod)
            tinv = _inverse_mod(taus % mod, mod)
            inner = np.exp(TWO_PI_I * (np.outer(tinv, N) % mod) / mod) @ w
        else:
            inner = np.full(len(taus), w.sum())
        chi = self.omega ** j * float(p) ** j
        mu = float(p) ** (-j - Lt) * float(E.q) ** (-beta - Lx)
        return complex(chi * mu * np.sum(tw * inner))


_X0 = ((1, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1), (1, 1, 1))


def cubic_tests(p: int, M: int) -> List[CubicTest]:
    """Products of t-balls and x-cells with parameters bounded in terms of M."""
    r = max(M - 2, 0)
    out = []
    for e in range(-r, r + 1):
        for w in range(1, M):
            for tau0 in _unit_residues(p, w):
                T = TPart(e, w, int(tau0))
                out.append(CubicTest(T, XPart((0, 0, 0), 0, 0)))
                for beta in range(-r, r + 1):
                    for b in range(1, M):
                        for x0 in _X0:
                            out.append(CubicTest(T, XPart(x0, beta, b)))
    return out


@dataclass
class CubicReport:
    p: int
    M: int
    tests: List[dict]
    direct: List[complex]
    dual: List[complex]
    ratios: List[complex]
    eps: complex
    sign_error: float
    spread: float
    stabilization: float
    trivial_character: bool
    passed: bool

    def to_json(self) -> dict:
        cj = lambda z: [z.real, z.imag]
        return {"schema": "1", "p": self.p, "precision": self.M, "tests": self.tests,
                "direct": [cj(z) for z in self.direct], "dual": [cj(z) for z in self.dual],
                "ratios": [cj(z) for z in self.ratios], "eps": cj(self.eps),
                "sign_error": self.sign_error, "spread": self.spread,
                "stabilization": self.stabilization,
                "trivial_character": self.trivial_character, "pass": self.passed}


def verify_cubic_identity(p: int = 2, M: int = 3, trivial_char: bool = False,
                          tol: float = 1e-8, max_tests: Optional[int] = None) -> CubicReport:
    """Weak-sense check of FT(phi_E) = eps phi_E on F + E, E the unramified cubic extension.

    Each pairing is recomputed one level finer and with the dual shells taken
    to precision M + 1; any change beyond 1e-10 means the cells or the shell
    cutoff were too coarse (PrecisionTooLow).
    """
    pairing = CubicPairing(p, trivial_char=trivial_char)
    tests = cubic_tests(p, M)
    if max_tests:
        tests = tests[:max_tests]
    direct, dual, ratios = [], [], []
    stab = 0.0
    for t in tests:
        a0, b0 = pairing.direct(t), pairing.dual(t, M)
        a1, b1 = pairing.direct(t, extra=1), pairing.dual(t, M + 1, extra=1)
        stab = max(stab, abs(a1 - a0), abs(b1 - b0))
        direct.append(a0)
        dual.append(b0)
        if abs(a0) > 1e-9:
            ratios.append(b0 / a0)
        elif abs(b0) > 1e-9:
            ratios.append(complex("inf"))
    if stab > 1e-10:
        raise PrecisionTooLow(f"pairings moved by {stab:.3g} under refinement")
    if not ratios:
        raise PrecisionTooLow("all pairings vanish at this precision")
    finite = [r for r in ratios if cmath.isfinite(r)]
    eps = finite[0] if finite else complex("nan")
    spread = max((abs(r - eps) if cmath.isfinite(r) else math.inf) for r in ratios)
    sign_err = min(abs(eps - 1), abs(eps + 1)) if finite else math.inf
    passed = spread < tol and sign_err < tol
    return CubicReport(p, M, [t.describe() for t in tests], direct, dual, ratios, eps,
                       sign_err, spread, stab, trivial_char, passed)


# ---------------------------------------------------------------------------
# finite Fourier analysis on p^{-A} O / p^{B} O

def finite_fourier(values: np.ndarray, p: int, A: int, B: int) -> np.ndarray:
    """FT of a function on p^{-A} O / p^B O (index r means x = r p^{-A}).

    The result lives on p^{-B} O / p^A O (index s means y = s p^{-B}):
    f-hat(y) = sum_x f(x) psi(x y) p^{-B}.
    """
    n = p ** (A + B)
    r = np.arange(n)
    # x y = r s p^{-A-B}
    kernel = np.exp(TWO_PI_I * (np.outer(r, r) % n) / n)
    return (values @ kernel) * float(p) ** (-B)


def norm_surjective(E: UnramifiedExt, M: int) -> bool:
    """Every unit class mod p^M is a norm of a unit of E."""
    mod = E.p ** M
    xi = E.residues(M)
    units = np.any(xi % E.p != 0, axis=1)
    norms = set(int(v) for v in E.norm(xi[units], mod))
    return norms == {u for u in range(mod) if u % E.p}

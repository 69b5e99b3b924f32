"""End-to-end check battery, shared by `gammaforge selftest` and the acceptance tests.

Each function runs one check at the given tolerances and returns a Check
with a pass flag, the measured quantities and the wall time.
"""

from __future__ import annotations

import io
import json
import random
import time
from contextlib import redirect_stdout
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List

from .characters import COMPLEX, REAL, Character, evaluate, nm_power, nonarch, nu


@dataclass
class Check:
    name: str
    passed: bool
    seconds: float
    details: Dict[str, object] = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "seconds": round(self.seconds, 3),
                "details": self.details}

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} ({self.seconds:.1f}s)"


def _timed(name: str, fn) -> Check:
    t0 = time.perf_counter()
    passed, details = fn()
    return Check(name, bool(passed), time.perf_counter() - t0, details)


def _cli_json(argv: List[str]):
    from .cli import run
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(argv)
    return code, buf.getvalue()


# ---------------------------------------------------------------------------
# the x^3/y table

# (s, twist) on y, then on x, for G_1..G_6
CUBIC_EXPECTED = {
    1: ((Fraction(-1, 3), 0), (Fraction(0), 0)),
    2: ((Fraction(-2, 3), 1), (Fraction(0), 0)),
    3: ((Fraction(-4, 3), 1), (Fraction(1), 1)),
    4: ((Fraction(-5, 3), 0), (Fraction(2), 0)),
    5: ((Fraction(-2, 3), 1), (Fraction(1), 1)),
    6: ((Fraction(-4, 3), 1), (Fraction(2), 0)),
}
CUBIC_PAIRING = {1: 3, 3: 1, 4: 5, 5: 4, 2: 2, 6: 6}


def _label_of(chars) -> int:
    key = tuple((Fraction(c["s"]), int(c["n"])) for c in chars)
    for j, v in CUBIC_EXPECTED.items():
        if v == key:
            return j
    return 0


def covering_table() -> Check:
    def go():
        code, text = _cli_json(["identities", "covering", "--n", "3", "--type", "1,1,1",
                                "--field", "R"])
        rep = json.loads(text)
        pairs = {}
        for ident in rep["identities"]:
            pairs[_label_of(ident["lambda"])] = _label_of(ident["eta"])
        fixed = sorted(k for k, v in pairs.items() if k == v)
        ok = (code == 0 and rep["count"] == 6 and sorted(pairs) == [1, 2, 3, 4, 5, 6]
              and pairs == CUBIC_PAIRING and fixed == [2, 6])
        return ok, {"count": rep["count"], "pairing": pairs, "fixed_points": fixed}
    return _timed("covering n=3 type 1,1,1: six identities, involution (13)(45)", go)


PVS_EXPECTED = {(-10, -8): (14, -16), (14, -16): (-10, -8), (-18, 0): (6, -8),
                (6, -8): (-18, 0), (6, -16): (6, -16), (-10, 0): (-10, 0)}


def pvs_table() -> Check:
    def go():
        code, text = _cli_json(["identities", "pvs", "--space", "e6"])
        rep = json.loads(text)
        pairs = {tuple(int(Fraction(v)) for v in k): tuple(int(Fraction(v)) for v in w)
                 for k, w in rep["involution"]}
        fixed = sorted(tuple(int(Fraction(v)) for v in k) for k in rep["fixed_points"])
        ok = code == 0 and rep["count"] == 6 and pairs == PVS_EXPECTED and \
            fixed == sorted([(6, -16), (-10, 0)])
        return ok, {"count": rep["count"], "pairs": {str(k): list(v) for k, v in pairs.items()},
                    "fixed_points": fixed}
    return _timed("e6 table: six (q,p) identities and involution", go)


# ---------------------------------------------------------------------------
# archimedean numerics

def cubic_weak_identity(num_tests: int = 3, tol: float = 1e-2) -> Check:
    """G1 -> G3 against num_tests test functions, plus the doubled-b control."""
    from .archimedean import verify_identity
    from .covering import cubic_identities

    def go():
        ident = next(i for i in cubic_identities() if i.label == "G1->G3")
        rep = verify_identity(ident, num_tests=num_tests, tol=tol)
        consts = rep.constants
        spread = max(abs(c - consts[0]) / abs(consts[0]) for c in consts)
        ctrl = verify_identity(ident, num_tests=num_tests, tol=tol, C=rep.C, b=2 * ident.b)
        details = {"b": str(ident.b), "C": rep.C, "abs_C": abs(rep.C), "deviation": rep.deviation,
                   "quad_error": rep.quad_error, "C_spread": spread,
                   "unimodular_deviation": rep.unimodular_deviation,
                   "control_deviation": ctrl.deviation, "tests": len(rep.tests),
                   "verified": rep.passed and spread < tol and ctrl.deviation > 10 * tol,
                   "unimodular": rep.unimodular_deviation < tol}
        return details["verified"] and details["unimodular"], details
    return _timed("weak-sense G1 -> G3 with falsification control", go)


def gauss_identity(tol_real: float = 1e-6, tol_complex: float = 1e-4) -> Check:
    from .archimedean import fresnel_epsilon, gauss_check

    def go():
        out = {}
        ok = True
        for F, tol in ((REAL, tol_real), (COMPLEX, tol_complex)):
            rep = gauss_check(F, 1, tol=tol)
            err = abs(rep.C - fresnel_epsilon(F, 1))
            out[F.kind] = {"eps": rep.C, "oracle_error": err, "deviation": rep.deviation}
            ok = ok and rep.passed and err < tol
        return ok, out
    return _timed("Gauss identity Q = x^2/2 against the Fresnel oracle", go)


# ---------------------------------------------------------------------------
# Gamma properties

def _random_char(F, rng: random.Random) -> Character:
    s = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
    n = rng.randint(-3, 3) if F.is_archimedean else 0
    return Character(F, s, n)


def functional_equation_error(F, count: int = 200, seed: int = 0) -> float:
    from .gamma import gamma, is_pole
    rng = random.Random(seed)
    worst, done = 0.0, 0
    while done < count:
        lam = _random_char(F, rng)
        dual = Character(F, complex(nu(F).s) - lam.s, -lam.n)
        if is_pole(F, lam.s, lam.n, 0.1) or is_pole(F, dual.s, dual.n, 0.1):
            continue
        g = gamma(F, lam.s, lam.n).value * gamma(F, dual.s, dual.n).value
        sign = (-1) ** (lam.n % 2) if F.is_archimedean else 1
        worst = max(worst, abs(g - sign))
        done += 1
    return worst


def multiplication_error(F, N: int, count: int = 50, seed: int = 0) -> float:
    """Relative error of Gamma(chi^N) = C_{F,N} chi(N^N) prod_j Gamma(chi Nm^{j/N})."""
    from .gamma import gamma, is_pole, multiplication_constant
    rng = random.Random(seed + 97 * N)
    worst, done = 0.0, 0
    CN = multiplication_constant(F, N)
    while done < count:
        chi = Character(F, complex(rng.uniform(-2, 2), rng.uniform(-2, 2)), rng.randint(-3, 3))
        big = Character(F, chi.s * N, chi.n * N)
        shifted = []
        for j in range(N):
            step = nm_power(F, Fraction(j, N))
            shifted.append(Character(F, chi.s + complex(step.s), chi.n + step.n))
        if any(is_pole(F, c.s, c.n, 0.1) for c in [big] + shifted):
            continue
        lhs = gamma(F, big.s, big.n).value
        rhs = CN * evaluate(chi, float(N) ** N)
        for c in shifted:
            rhs *= gamma(F, c.s, c.n).value
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
        done += 1
    return worst


def generalized_error(count: int = 40, seed: int = 0) -> float:
    """Root sum versus closed form for Gamma_{d,a} in every supported case."""
    from .gamma import gamma_generalized, gamma_generalized_sum, is_pole
    rng = random.Random(seed)
    cases = [(COMPLEX, d) for d in (1, 2, 3, 4)] + [(REAL, d) for d in (1, 2, 3, 4, 5)]
    worst = 0.0
    for F, d in cases:
        done = 0
        while done < count:
            s = complex(rng.uniform(-2, 3), rng.uniform(-2, 2))
            if F.kind == "C":
                n = rng.randint(-3, 3) * d + (rng.randint(-1, 1) if d > 1 else 0)
                a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            else:
                n = 0 if d % 2 == 0 else rng.randint(0, 1)
                a = rng.choice([-1, 1]) * rng.uniform(0.3, 2.5)
            nu_s = [s / d + 2 * j / d for j in range(d)] if F.kind == "C" else [s / d]
            if any(is_pole(F, t, k, 0.1) for t in nu_s for k in range(-4, 5)):
                continue
            try:
                closed = gamma_generalized(F, d, a, s, n)
            except Exception:
                continue
            summed = gamma_generalized_sum(F, d, a, s, n)
            scale = max(abs(closed), abs(summed), 1e-300)
            worst = max(worst, abs(closed - summed) / scale)
            done += 1
    return worst


def gamma_battery(tol: float = 1e-9) -> Check:
    def go():
        fields = [REAL, COMPLEX, nonarch(2), nonarch(3), nonarch(5)]
        fe = {repr(F): functional_equation_error(F) for F in fields}
        mult = {f"C,N={N}": multiplication_error(COMPLEX, N) for N in (2, 3, 4, 5)}
        mult.update({f"R,N={N}": multiplication_error(REAL, N) for N in (3, 5)})
        gen = generalized_error()
        ok = max(fe.values()) < tol and max(mult.values()) < tol and gen < tol
        return ok, {"functional_equation": fe, "multiplication": mult, "generalized": gen}
    return _timed("Gamma battery: functional equation, multiplication, Gamma_{d,a}", go)


# ---------------------------------------------------------------------------
# covering systems against the divisor calculus

def covering_cross_check(max_real: int = 11, max_complex: int = 12, max_cosets: int = 5) -> Check:
    from .covering import admissible_types, enumerate_systems, relation_of, to_identity
    from .divisors import check_relation, solve_relation

    def go():
        bad, counted, extra = [], 0, []
        for F, ns in ((REAL, range(3, max_real + 1, 2)), (COMPLEX, range(3, max_complex + 1))):
            for n in ns:
                for t in admissible_types(n, max_cosets):
                    exps = tuple(-p for p in t[:-2]) + (n,)
                    found = set()
                    for cs in enumerate_systems(n, t):
                        ident = to_identity(cs, F)
                        mu, xi, case = ident.relation_data()
                        counted += 1
                        if not check_relation(F, exps, mu, xi, case, exact=True):
                            bad.append((F.kind, n, t))
                        found.add(relation_of(ident))
                    sols = set(solve_relation(F, exps, cases=(1,)))
                    if sols - found:
                        extra.append((F.kind, n, t, len(sols - found)))
        return not bad and not extra, {"identities": counted, "failed": bad, "extra": extra}
    return _timed("covering identities satisfy the divisor relation; no extra solutions", go)


# ---------------------------------------------------------------------------
# multiplicative Legendre transform

def legendre_battery(points: int = 20) -> Check:
    from .polynomials import Polynomial, PowerSeries, RationalFunc, symbols
    from .pvs import builtin, composition_check, legendre_series, mlt_monomial, mlt_verify
    import sympy as sp

    def go():
        out = {}
        ok = True
        # monomial closed form
        mono_ok = True
        for ns in ((2,), (3,), (1, 1), (1, 2), (2, -1), (1, 1, 1), (-1, 3)):
            c, e = mlt_monomial(ns)
            xs = symbols([f"x{i + 1}" for i in range(len(ns))])
            num = sp.Mul(*[x ** k for x, k in zip(xs, ns) if k > 0])
            den = sp.Mul(*[x ** -k for x, k in zip(xs, ns) if k < 0])
            f = RationalFunc(Polynomial(num, xs), Polynomial(den, xs))
            fs = RationalFunc(Polynomial(sp.Rational(c.numerator, c.denominator) * num, xs),
                              Polynomial(den, xs))
            r = mlt_verify(f, fs, points=points, check_hessian=False)
            mono_ok = mono_ok and r.ok and r.scale == 1
        out["monomial"] = mono_ok
        ok = ok and mono_ok
        for name in ("det(3)", "sym_det(3)", "pfaffian(6)", "quad_times_linear(5)", "e6_cubic"):
            V = builtin(name)
            r = mlt_verify(V.f, V.f_star, points=points)
            comp = composition_check(V.f, V.f_star, points=points)
            out[name] = {"mlt": bool(r.ok), "scale": None if r.scale is None else str(r.scale),
                         "composition": comp}
            ok = ok and r.ok and comp
        # legendre round trip to order 6
        rt = True
        x, y = sp.symbols("x y")
        germs = ((x ** 3 / 3 + x ** 2 / 2, (x,), (1,)),
                 (x ** 2 * y + x ** 2 + y ** 2 + y ** 4 / 4, (x, y), (1, 1)),
                 (x ** 4 / 4 + x * y + y ** 2, (x, y), (1, 2)))
        for expr, gens, base in germs:
            f = Polynomial(expr, gens)
            Q = PowerSeries.from_function(f, base, 6)
            LQ = legendre_series(Q, 6)
            back = legendre_series(LQ, 6)
            rt = rt and back.base == Q.base and back.coeffs() == Q.coeffs() \
                and LQ.linear() == list(Q.base)
        out["round_trip"] = rt
        return ok and rt, out
    return _timed("multiplicative Legendre battery", go)


# ---------------------------------------------------------------------------
# p-adic suite

def padic_suite(tol_gamma: float = 1e-10, tol_cyclic: float = 1e-10, tol_eps: float = 1e-8,
                cubic_precision: int = 3) -> Check:
    from .padic import check_gamma_nonarch, verify_cubic_identity, verify_cyclic_gamma

    def go():
        out: Dict[str, object] = {}
        ok = True
        for p in (2, 3, 5):
            r = check_gamma_nonarch(p, tol=tol_gamma)
            out[f"gamma p={p}"] = {"max_error": r.max_error, "stationarity": r.stationarity}
            ok = ok and r.passed
        for p, f in ((2, 2), (2, 3), (3, 2), (3, 3)):
            r = verify_cyclic_gamma(p, f, tol=tol_cyclic)
            out[f"cyclic p={p} f={f}"] = {"constant": r.constant, "spread": r.spread}
            ok = ok and r.passed
        r = verify_cubic_identity(2, cubic_precision, tol=tol_eps)
        ctrl = verify_cubic_identity(2, cubic_precision, trivial_char=True, tol=tol_eps)
        out["cubic"] = {"eps": r.eps, "sign_error": r.sign_error, "spread": r.spread,
                        "stabilization": r.stabilization, "tests": len(r.tests),
                        "control_spread": ctrl.spread, "control_pass": ctrl.passed}
        ok = ok and r.passed and not ctrl.passed
        return ok, out
    return _timed("p-adic suite: Gamma shells, cyclic identity, cubic identity", go)


ALL = (covering_table, pvs_table, cubic_weak_identity, gauss_identity, gamma_battery,
       covering_cross_check, legendre_battery, padic_suite)


def run_selftest(quick: bool = True) -> List[dict]:
    """Every battery check; quick mode skips the 4-d weak-sense quadrature."""
    out = []
    for fn in ALL:
        if quick and fn is cubic_weak_identity:
            continue
        out.append(fn().to_json())
    return out

from fractions import Fraction as Fr

import pytest
import sympy as sp

from gammaforge.characters import COMPLEX, Character
from gammaforge.errors import (AssumptionViolated, DegenerateHessian, DegreeMismatch,
                               SingularHessian, UnknownName)
from gammaforge.gamma import gamma_char
from gammaforge.polynomials import Polynomial, PowerSeries, parse
from gammaforge.pvs import (b_function_value, builtin, composition_check, gamma_pvs,
                            legendre_series, mlt_monomial, mlt_pair, mlt_verify,
                            pvs_identities, pvs_involution, qp)

x, y = sp.symbols("x y")


def test_mlt_monomial_examples():
    assert mlt_monomial((2,)) == (Fr(1, 4), (2,))
    assert mlt_monomial((1, 1)) == (Fr(1), (1, 1))
    assert mlt_monomial((-1, 3)) == (Fr(-1) * Fr(1, 27), (-1, 3))
    with pytest.raises(ValueError):
        mlt_monomial((0,))


def test_mlt_verify_examples():
    r = mlt_verify(parse("x^2"), parse("x^2/4"))
    assert r.ok and r.scale == 1 and r.exact
    r = mlt_verify(parse("x*y"), parse("x*y"))
    assert r.ok and r.scale == 1
    assert not mlt_verify(parse("x^3 + y^3"), parse("x^3 + y^3"))
    with pytest.raises(DegreeMismatch):
        mlt_verify(parse("x^2"), parse("x^3"))
    with pytest.raises(DegenerateHessian):
        mlt_verify(parse("(x + y)^2"), parse("(x + y)^2"))


def test_mlt_pair_is_transform():
    f = Polynomial(x ** 2, (x,))
    fs = Polynomial(y ** 2 / 4, (y,))
    F, Fs = mlt_pair(f, fs)
    r = mlt_verify(F, Fs)
    assert r.ok and r.scale == 1
    assert composition_check(F, Fs)


def test_legendre_examples():
    Q = PowerSeries.from_function(Polynomial(x ** 2 / 2, (x,)), (1,), 4)
    LQ = legendre_series(Q)
    assert LQ.base == (1,)
    assert LQ.value() == Fr(1, 2) and LQ.linear() == [1]
    q2 = {m: c for m, c in LQ.coeffs().items() if sum(m) == 2}
    assert q2 == {(2,): Fr(1, 2)}
    assert legendre_series(LQ) == Q
    with pytest.raises(SingularHessian):
        legendre_series(PowerSeries.from_function(Polynomial(x ** 3, (x,)), (0,), 4))


@pytest.mark.parametrize("name,M,D,roots", [
    ("det(3)", 9, 3, (1, 2, 3)),
    ("sym_det(3)", 6, 3, (1, Fr(3, 2), 2)),
    ("pfaffian(6)", 15, 3, (1, 3, 5)),
    ("e6_cubic", 27, 3, (1, 5, 9)),
    ("quad_times_linear(5)", 6, 3, (1, 1, Fr(5, 2))),
])
def test_builtins(name, M, D, roots):
    V = builtin(name)
    assert (V.M, V.D) == (M, D)
    assert V.b_roots == tuple(Fr(r) for r in roots)
    assert mlt_verify(V.f, V.f_star, points=5).ok


def test_unknown_builtin():
    with pytest.raises(UnknownName):
        builtin("spin(10)")


def test_b_function_values():
    V = builtin("det(2)")
    base = b_function_value(V, 0) / V.b(0)
    for s in (1, 2, 3):
        assert b_function_value(V, s) == base * V.b(s)


def test_gamma_pvs_is_product():
    V = builtin("e6_cubic")
    s = 0.3 + 0.2j
    want = 1
    for r in (1, 5, 9):
        want *= gamma_char(Character(COMPLEX, s + 2 * (r - 9), 0))
    assert abs(gamma_pvs(V, s) - want) < 1e-12 * abs(want)
    with pytest.raises(AssumptionViolated):
        gamma_pvs(builtin("power(2)"), s)


def test_e6_identities_and_involution():
    idents = pvs_identities(builtin("e6_cubic"))
    assert len(idents) == 6
    pairs, fixed = pvs_involution(idents)
    as_int = {tuple(int(v) for v in k): tuple(int(v) for v in w) for k, w in pairs.items()}
    assert as_int == {(-10, -8): (14, -16), (14, -16): (-10, -8), (-18, 0): (6, -8),
                      (6, -8): (-18, 0), (6, -16): (6, -16), (-10, 0): (-10, 0)}
    assert sorted(tuple(int(v) for v in k) for k in fixed) == [(-10, 0), (6, -16)]
    for ident in idents:
        assert ident.check_invariants()
        assert qp(ident.lambdas) in pairs

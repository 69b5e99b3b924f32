import cmath
import math
from dataclasses import replace

import numpy as np
import pytest
import sympy as sp

from gammaforge.archimedean import (ElementaryFunction, fresnel_epsilon,
                                    fresnel_gaussian_pairing, gauss_check, pair, verify_pair)
from gammaforge.characters import COMPLEX, REAL, Character, trivial
from gammaforge.errors import ToleranceNotMet, UnsupportedCase
from gammaforge.hermite import gaussian, make_test_function

GRID = np.linspace(-15, 15, 20001)
DX = GRID[1] - GRID[0]


def riemann_ft(phi, xi):
    return (phi.value(GRID) * np.exp(1j * GRID * xi)).sum() * DX / math.sqrt(2 * math.pi)


def test_gaussian_is_self_dual():
    g = gaussian(REAL)
    assert g.poly.as_expr() == g.fpoly.as_expr()
    for xi in (0.0, 0.4, -2.0):
        assert abs(riemann_ft(g, xi) - g.value(np.array(xi))) < 1e-12
    gc = gaussian(COMPLEX)
    assert gc.poly.as_expr() == gc.fpoly.as_expr()


@pytest.mark.parametrize("seed", [0, 3, 7])
def test_closed_form_transform_matches_quadrature(seed):
    phi = make_test_function(REAL, (0,), (0,), 0, seed=seed)
    for xi in (0.7, -1.3):
        assert abs(riemann_ft(phi, xi) - phi.fourier(np.array(xi))) < 1e-10


@pytest.mark.parametrize("field", [REAL, COMPLEX])
def test_double_transform_is_reflection(field):
    phi = make_test_function(field, (1,), (1,), 1, seed=2)
    back = phi.transform().transform()
    flip = {s: -s for s in phi.syms}
    assert back.poly.as_expr() == sp.expand(phi.poly.as_expr().xreplace(flip))
    assert back.P == phi.P and back.R == phi.R


def test_in_space_and_vanishing_orders():
    phi = make_test_function(REAL, (1,), (0,), 2, seed=1)
    assert phi.vanishing_order(0) >= 4 and phi.in_space()
    phi = make_test_function(REAL, (1,), (1,), 1, seed=1)
    assert phi.vanishing_order(0) >= 2 and phi.vanishing_order(0, transform=True) >= 2
    assert phi.in_space()
    phi = make_test_function(COMPLEX, (1,), (1,), 1, seed=4)
    assert phi.in_space()
    plain = make_test_function(REAL, (0,), (0,), 0, seed=1)
    assert not replace(plain, P=(1,), N=1, _cache={}).in_space()


def test_parseval():
    phi = make_test_function(REAL, (0,), (0,), 0, seed=5)
    a = (np.abs(phi.value(GRID)) ** 2).sum() * DX
    b = (np.abs(phi.fourier(GRID)) ** 2).sum() * DX
    assert abs(a - b) < 1e-10 * a


def test_gaussian_integral_is_one():
    G = ElementaryFunction(REAL, (1,), (trivial(REAL),), a=0)
    assert abs(pair(G, gaussian(REAL)).value - 1) < 1e-12


@pytest.mark.parametrize("a", [1.0, -0.5, 2.5])
def test_fresnel_pairing(a):
    G = ElementaryFunction(REAL, (2,), (trivial(REAL),), a=a / 2)
    r = pair(G, gaussian(REAL))
    assert abs(r.value - fresnel_gaussian_pairing(a)) < 1e-10


def test_non_integrable_raises():
    G = ElementaryFunction(REAL, (1,), (Character(REAL, -2, 0),), a=1)
    with pytest.raises(ToleranceNotMet):
        pair(G, gaussian(REAL))


def test_mismatched_spaces_raise():
    G = ElementaryFunction(REAL, (1, 1), (trivial(REAL),) * 2)
    with pytest.raises(UnsupportedCase):
        pair(G, gaussian(REAL))


def test_pairing_is_linear():
    G = ElementaryFunction(REAL, (2,), (trivial(REAL),), a=0.5)
    p1 = make_test_function(REAL, (0,), (0,), 0, seed=1)
    p2 = make_test_function(REAL, (0,), (0,), 0, seed=2)
    s = pair(G, p1 + p2.scaled(3)).value
    assert abs(s - pair(G, p1).value - 3 * pair(G, p2).value) < 1e-10 * abs(s)


def test_pass_flag_is_scale_invariant():
    G1 = ElementaryFunction(REAL, (2,), (trivial(REAL),), a=-0.5)
    G2 = ElementaryFunction(REAL, (2,), (trivial(REAL),), a=0.5)
    tests = [gaussian(REAL), make_test_function(REAL, (0,), (0,), 0, seed=1)]
    r1 = verify_pair(G1, G2, tests, 1e-6)
    r2 = verify_pair(G1, G2, [t.scaled(7) for t in tests], 1e-6)
    assert r1.passed and r2.passed
    assert abs(r1.deviation - r2.deviation) < 1e-9


def test_gauss_check_real():
    rep = gauss_check(REAL, 1, tol=1e-6)
    assert rep.passed
    assert abs(rep.C - fresnel_epsilon(REAL, 1)) < 1e-4
    assert abs(rep.C - cmath.exp(-1j * math.pi / 4)) < 1e-4
    assert abs(fresnel_epsilon(REAL, 4)) == pytest.approx(0.5)

import cmath
import math
import random
from fractions import Fraction as Fr

import mpmath
import pytest

from gammaforge import battery
from gammaforge.characters import COMPLEX, REAL, Character, nonarch
from gammaforge.covering import cubic_identities
from gammaforge.divisors import MonomialIdentity
from gammaforge.errors import PoleError, UnsupportedCase
from gammaforge.gamma import (cgamma, gamma, gamma_generalized, gamma_generalized_sum,
                              identity_constant, is_pole, rgamma)


def test_lanczos_against_mpmath():
    rng = random.Random(0)
    for _ in range(200):
        z = complex(rng.uniform(-6, 8), rng.uniform(-6, 6))
        ref = complex(mpmath.gamma(z))
        assert abs(cgamma(z) - ref) <= 1e-12 * abs(ref)
        assert abs(rgamma(z) - 1 / ref) <= 1e-12 * abs(1 / ref)
    with pytest.raises(PoleError):
        cgamma(-2)
    assert rgamma(-3) == 0


def test_gamma_examples():
    assert gamma(REAL, 0.5, 0).value == pytest.approx(1.0)
    assert gamma(nonarch(3), 0.5).value == pytest.approx(1.0)
    assert abs(gamma(REAL, 1, 0).value) < 1e-15
    assert gamma(nonarch(2), 2).value == pytest.approx(-4 / 3)


def test_gamma_complex_closed_form():
    # Gamma^C(lambda_{s,n}) = 2^{s-1} i^{|n|} Gamma((s+|n|)/2) / Gamma(1 - (s-|n|)/2)  (n >= 0)
    for s, n in ((0.7, 0), (1.3, 2), (0.4 + 0.5j, 1)):
        ref = 2 ** (s - 1) * (1j ** n) * mpmath.gamma((s + n) / 2) / mpmath.gamma(1 - (s - n) / 2)
        assert gamma(COMPLEX, s, n).value == pytest.approx(complex(ref), rel=1e-12)


def test_poles_flagged():
    g = gamma(REAL, 0, 0)
    assert g.at_pole
    with pytest.raises(PoleError):
        gamma(REAL, 0, 0, finite=True)
    assert gamma(REAL, -1, 1).at_pole and not gamma(REAL, -1, 0).at_pole
    assert gamma(COMPLEX, -1, 1).at_pole and not gamma(COMPLEX, -1, 0).at_pole
    assert gamma(nonarch(3), 0).at_pole


def test_pole_set_matches_singular_shift():
    from gammaforge.characters import is_singular, nu
    for F in (REAL, COMPLEX):
        for k in range(-30, 13):
            for n in range(-3, 4):
                lam_nu = Character(F, Fr(k, 6), n)
                lam = Character(F, lam_nu.s - nu(F).s, n)
                assert is_pole(F, float(lam_nu.s), n) == is_singular(lam)


def test_generalized_examples():
    s, n, a = 0.8 + 0.2j, 1, 1.7
    # d = 1 is Gamma(lambda) lambda^{-1}(a)
    assert gamma_generalized(REAL, 1, a, s, n) == pytest.approx(gamma(REAL, s, n).value * a ** (-s))
    # C: Gamma_{d,a}(lambda_{s,nd}) = Gamma(lambda_{s/d,n}) lambda_{-s/d,-n}(a), after the 1/d average
    d = 3
    az = 0.6 - 1.1j
    closed = gamma_generalized(COMPLEX, d, az, s, n * d)
    assert closed == pytest.approx(gamma_generalized_sum(COMPLEX, d, az, s, n * d), rel=1e-9)
    with pytest.raises(UnsupportedCase):
        gamma_generalized(REAL, 2, 1.0, s, 1)


def test_battery_functional_equation_and_multiplication():
    for F in (REAL, COMPLEX, nonarch(2), nonarch(3), nonarch(5)):
        assert battery.functional_equation_error(F) < 1e-9
    for N in (2, 3, 4, 5):
        assert battery.multiplication_error(COMPLEX, N) < 1e-9
    for N in (3, 5):
        assert battery.multiplication_error(REAL, N) < 1e-9
    assert battery.generalized_error() < 1e-9


def test_identity_constants_of_cubic_family():
    consts = {i.label: identity_constant(i) for i in cubic_identities()}
    expected = {"G1->G3": -1j / (3 * math.sqrt(3)), "G2->G2": 1j / math.sqrt(3),
                "G3->G1": 1j / math.sqrt(3), "G4->G5": -1j / (3 * math.sqrt(3)),
                "G5->G4": 1j / (9 * math.sqrt(3)), "G6->G6": 1j / (9 * math.sqrt(3))}
    for k, v in expected.items():
        assert consts[k] == pytest.approx(v, abs=1e-9)
    # signs: + for 2, 3, 5, 6 and - for 1, 4
    for k, c in consts.items():
        src = int(k[1])
        assert (c.imag > 0) == (src in (2, 3, 5, 6))


def test_gauss_identity_constant_is_unimodular():
    # psi(x^2/2): n = (2), gamma^2 = nu so gamma = nu^{1/2}, and ab = -1/4
    one = Character(REAL, Fr(0), 0)
    ident = MonomialIdentity(REAL, (2,), (one,), (one,), Character(REAL, Fr(1, 2), 0),
                             case="Sum2", a=Fr(1, 2), b=Fr(-1, 2))
    assert ident.check_invariants()
    C = identity_constant(ident)
    assert abs(C) == pytest.approx(1.0)
    # the Fresnel value for psi(+x^2/2)
    assert C == pytest.approx(cmath.exp(1j * math.pi / 4))


def test_cancelling_identity_constant_one():
    # n = (1, -1) with lambda = (1, nu^{-1}): the two Gamma factors cancel
    one = Character(REAL, Fr(0), 0)
    nuinv = Character(REAL, Fr(-1), 0)
    ident = MonomialIdentity(REAL, (1, -1), (one, nuinv), (nuinv, one), one, case="Sum0",
                             b=Fr(-1))
    assert ident.check_invariants()
    assert identity_constant(ident) == pytest.approx(1.0)

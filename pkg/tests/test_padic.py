
import numpy as np
import pytest

from gammaforge.errors import LevelTooCoarse, PoleError, PrecisionTooLow
from gammaforge.padic import (CubicPairing, CubicTest, TPart, UnramifiedExt, XPart,
                              check_gamma_nonarch, cubic_tests, e_p, finite_fourier,
                              gamma_closed, gamma_shell, integrate, norm_surjective,
                              shell_psi_integral, shell_stationarity, verify_cubic_identity,
                              verify_cyclic_gamma)


def test_integrate_examples():
    # volume of Z_p, of p^{-1} Z_p, and of the units
    assert abs(integrate(lambda P: np.ones(P.r.shape), 3, 1) - 1) < 1e-14
    assert abs(integrate(lambda P: np.ones(P.r.shape), 3, 1, K=1) - 3) < 1e-14
    units = lambda P: (P.valuation() == 0).astype(float)
    assert abs(integrate(units, 5, 1) - 0.8) < 1e-14
    # psi integrates to 0 over p^{-1} Z_p
    assert abs(integrate(lambda P: P.psi(), 2, 1, K=1)) < 1e-14
    # |x|^{1/2} on Z_p is (1 - 1/p)/(1 - p^{-3/2}); truncate at level 12
    p = 2
    vals = lambda P: np.where(np.isinf(P.valuation()), 0.0, float(p) ** (-P.valuation() / 2))
    want = (1 - 1 / p) / (1 - p ** -1.5)
    assert abs(integrate(vals, p, 12, check=False) - want) < p ** -6


def test_integrate_level_too_coarse():
    with pytest.raises(LevelTooCoarse):
        integrate(lambda P: P.r % 4 == 0, 2, 1)


def test_e_p():
    assert np.allclose(e_p(np.array([1, 2, 3]), 0, 5), 1)
    assert np.allclose(e_p(np.array([1]), -1, 4), 1j)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_gamma_examples(p):
    E = UnramifiedExt.build(p, 1)
    for s in (0.5, 1.5, 2.25, 0.5 + 0.75j):
        assert abs(gamma_shell(E, s) - gamma_closed(p, s)) < 1e-12
    # Gamma(1/2) = (1 - p^{-1/2}) / (1 - p^{-1/2}) = 1, and Gamma(s) Gamma(1 - s) = 1
    assert abs(gamma_closed(p, 0.5) - 1) < 1e-14
    assert abs(gamma_closed(p, 0.3) * gamma_closed(p, 0.7) - 1) < 1e-14
    with pytest.raises(PoleError):
        gamma_closed(p, 0)
    assert shell_stationarity(E) < 1e-12
    assert check_gamma_nonarch(p).passed


def test_shell_psi_integrals():
    E = UnramifiedExt.build(3, 2)
    q = E.q
    assert abs(shell_psi_integral(E, 0) - (1 - 1 / q)) < 1e-14
    assert abs(shell_psi_integral(E, -1) + 1 / q * q) < 1e-12
    assert abs(shell_psi_integral(E, -2)) < 1e-12


@pytest.mark.parametrize("p,f", [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2)])
def test_cyclic_checks(p, f):
    r = verify_cyclic_gamma(p, f)
    assert r.passed, r.spread
    assert abs(abs(r.constant) - 1) < 1e-10


def test_unramified_extension_basics():
    E = UnramifiedExt.build(2, 3)
    assert E.q == 8
    one = (1, 0, 0)
    assert E.mul(one, (0, 1, 1)) == (0, 1, 1)
    assert E.norm_exact(one) == 1
    assert norm_surjective(E, 3)


def test_finite_fourier_inversion():
    p, A, B = 3, 1, 2
    rng = np.random.default_rng(0)
    f = rng.standard_normal(p ** (A + B)) + 1j * rng.standard_normal(p ** (A + B))
    g = finite_fourier(finite_fourier(f, p, A, B), p, B, A)
    n = p ** (A + B)
    assert np.allclose(g, f[(-np.arange(n)) % n])


def test_cubic_fast_matches_brute():
    pairing = CubicPairing(2)
    tests = cubic_tests(2, 3)[::37]
    for t in tests:
        assert abs(pairing.direct(t) - pairing.direct(t, brute=True)) < 1e-12
        j = -t.t.e - t.t.w
        for jj in range(j, j + 4):
            a = pairing.dual_shell(t, jj)
            b = pairing.dual_shell(t, jj, brute=True)
            assert abs(a - b) < 1e-12


def test_cubic_identity_small():
    r = verify_cubic_identity(2, 3, max_tests=40)
    assert r.passed
    assert min(abs(r.eps - 1), abs(r.eps + 1)) < 1e-8


def test_cubic_trivial_control_fails():
    r = verify_cubic_identity(2, 3, trivial_char=True, max_tests=40)
    assert not r.passed


def test_cubic_precision_too_low(monkeypatch):
    pairing = CubicPairing(2)
    t = CubicTest(TPart(0, 2, 1), XPart((1, 1, 0), 1, 2))
    start = pairing.self_similar_from(t)
    # pretend the shells settle far too early: the tail test must catch it
    monkeypatch.setattr(pairing, "self_similar_from", lambda test, extra=0: start - 3)
    with pytest.raises(PrecisionTooLow, match="self-similar"):
        pairing.dual(t, M=2)

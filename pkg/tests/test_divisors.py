import random
from fractions import Fraction as Fr

import pytest

from gammaforge.characters import COMPLEX, REAL, Character, nu
from gammaforge.covering import cubic_identities, identities_for_exponents, relation_of
from gammaforge.divisors import (CyclicTower, Divisor, MonomialIdentity, ab_relation,
                                 canonical, check_relation, derive_eta, divisor_D,
                                 divisor_D_ext, pole_free, solve_relation, strong_sense)
from gammaforge.errors import BadTower, EvenRootOverReal


def lam(F, s, n=0):
    return Character(F, Fr(s), n)


def test_canonical_examples():
    assert canonical(lam(REAL, Fr(3, 2))) == lam(REAL, Fr(1, 2), 1)
    assert canonical(lam(COMPLEX, 5, 2)) == lam(COMPLEX, 1, 2)
    assert canonical(lam(REAL, 0, 1)) == lam(REAL, 0, 1)
    rng = random.Random(0)
    for _ in range(100):
        c = lam(COMPLEX, Fr(rng.randint(-30, 30), 7), rng.randint(-3, 3))
        assert canonical(canonical(c)) == canonical(c)


def test_divisor_group_laws():
    a = Divisor.point("a", 2) + Divisor.point("b", -1)
    b = Divisor.point("b", 1) + Divisor.point("c", 3)
    assert a + b == b + a
    assert (a + b) - b == a
    assert (a - a).is_zero()
    assert (a + b).degree == a.degree + b.degree


def test_divisor_D_examples():
    one = lam(COMPLEX, 0)
    assert divisor_D(lam(REAL, 0), 1) == Divisor.point(lam(REAL, 0))
    assert divisor_D(one, 2) == Divisor.point(one) + Divisor.point(lam(COMPLEX, 1))
    assert divisor_D(lam(REAL, 0), -1) == -Divisor.point(lam(REAL, 0, 1))
    with pytest.raises(EvenRootOverReal):
        divisor_D(lam(REAL, 0), 2)
    for N in (1, 3, 5):
        assert divisor_D(lam(REAL, Fr(1, 7), 1), N).degree == N
        assert divisor_D(lam(REAL, Fr(1, 7), 1), -N).degree == -N
    for N in (1, 2, 3, 4):
        assert divisor_D(lam(COMPLEX, Fr(1, 7), 2), N).degree == N


def test_divisor_D_ext_examples():
    T = CyclicTower(3)
    triv = T.point(0, 0, 3)
    D = divisor_D_ext(T, 3, triv)
    assert D.degree == 3 and len(D.entries) == 3
    assert divisor_D_ext(T, 1, T.point(0, 0, 1)).degree == 1
    with pytest.raises(BadTower):
        divisor_D_ext(T, 2, triv)
    for lev in (1, 3):
        assert divisor_D_ext(T, lev, T.point(Fr(1, 3), 0, lev)).degree == lev


def test_cubic_divisor_relation_in_tower():
    # D(1_F, 1) + D(E, 1) + D(nu_E, -1) = D(E nu_F, -1), d_E = 3
    T = CyclicTower(3)
    lhs = (divisor_D_ext(T, 1, T.point(0, 0, 1)) + divisor_D_ext(T, 1, T.point(0, 1, 1))
           + divisor_D_ext(T, 3, T.point(1, 0, 3), -1))
    rhs = divisor_D_ext(T, 1, T.point(1, 1, 1), -1)
    assert lhs == rhs


def test_check_relation_examples():
    ident = next(i for i in cubic_identities() if i.label == "G1->G3")
    mu, xi, case = ident.relation_data()
    assert check_relation(REAL, (-1, 3), mu, xi, case)
    assert check_relation(REAL, (-1, 3), mu, xi, case, exact=True)
    assert not check_relation(REAL, (1, 1), mu, xi, 1)
    with pytest.raises(EvenRootOverReal):
        check_relation(REAL, (2, -1), (lam(REAL, 0), lam(REAL, 0)), lam(REAL, 0), 1)


def test_solve_relation_examples():
    sols = solve_relation(REAL, (-1, 3))
    assert len(sols) == 6
    assert {relation_of(i) for i in identities_for_exponents(REAL, (-1, 3))} == set(sols)
    assert solve_relation(COMPLEX, (-1, -1, -1, 3), cases=(1,)) == []
    for s in solve_relation(COMPLEX, (-1, 3)):
        assert check_relation(COMPLEX, (-1, 3), s.mu, s.xi, s.case, exact=True)


def test_solve_relation_rejects_random_candidates():
    sols = set(solve_relation(REAL, (-1, 3)))
    rng = random.Random(4)
    for _ in range(300):
        mu = (lam(REAL, Fr(rng.randint(-6, 6), 3), rng.randint(0, 1)),
              lam(REAL, Fr(rng.randint(-6, 6), 3), rng.randint(0, 1)))
        xi = lam(REAL, Fr(rng.randint(-6, 6), 3), rng.randint(0, 1))
        from gammaforge.divisors import RelationSolution
        cand = RelationSolution(mu, xi, 1)
        if cand not in sols:
            assert not check_relation(REAL, (-1, 3), mu, xi, 1, exact=True)


def test_degree_prefilter():
    rng = random.Random(5)
    for _ in range(20):
        n = [rng.choice([-3, -1, 1, 3, 5]) for _ in range(rng.randint(1, 3))]
        for s in solve_relation(REAL, n):
            assert sum(n) == (2 if s.case == 1 else 0)


def test_derive_eta_examples():
    g = lam(REAL, Fr(2, 3), 1)
    eta = derive_eta([lam(REAL, Fr(-1, 3)), lam(REAL, 0)], g, (-1, 3))
    assert eta == [lam(REAL, Fr(-4, 3), 1), lam(REAL, 1, 1)]
    triv = lam(COMPLEX, 0)
    assert derive_eta([triv], nu(COMPLEX), (1,)) == [triv]


def test_pole_free_examples():
    assert pole_free([lam(REAL, Fr(-1, 3)), lam(REAL, 0)], (-1, 3))
    assert not pole_free([lam(REAL, -1)], (1,))
    assert pole_free([lam(REAL, Fr(1, 2))], (2,))


def test_strong_sense_examples():
    for ident in cubic_identities():
        assert strong_sense(ident.lambdas, ident.etas, ident.exponents)
    for ident in identities_for_exponents(COMPLEX, (-2, 4)):
        assert strong_sense(ident.lambdas, ident.etas, ident.exponents)
    assert not strong_sense([lam(REAL, -1, 1)], [lam(REAL, 0)], (1,))


def test_ab_relation_examples():
    assert ab_relation((-1, 3), (1, 1), "Sum2") == Fr(1, 27)
    assert ab_relation((1, -1), (1, 1), "Sum0") == -1
    assert ab_relation((2,), (1,), "Sum2") == Fr(-1, 4)


def test_identity_json_round_trip():
    for ident in cubic_identities():
        obj = ident.to_json()
        back = MonomialIdentity.from_json(obj)
        assert back.lambdas == ident.lambdas and back.etas == ident.etas
        assert back.b == ident.b and back.gamma == ident.gamma
        assert back.check_invariants()
    assert "\\widehat" in cubic_identities()[0].to_latex()

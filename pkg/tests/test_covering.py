from fractions import Fraction as Fr
from math import gcd

import pytest

from gammaforge.characters import COMPLEX, REAL, Character
from gammaforge.covering import (CoveringSystem, admissible_types, cubic_identities,
                                 enumerate_systems, is_exact, to_identity)
from gammaforge.errors import EvenModulusOverReal, TypeMismatch


def test_enumerate_examples():
    assert len(enumerate_systems(3, (1, 1, 1))) == 6
    assert enumerate_systems(6, (2, 3, 1)) == []
    assert len(enumerate_systems(4, (2, 1, 1))) == 4


def test_is_exact_examples():
    assert is_exact(CoveringSystem.from_sets(3, [[0], [1], [2]]))
    assert not is_exact(CoveringSystem.from_sets(4, [[0, 2], [0], [1]]))
    assert is_exact(CoveringSystem.from_sets(4, [[0, 2], [1], [3]]))
    with pytest.raises(ValueError):
        CoveringSystem.from_sets(4, [[0, 1]])


@pytest.mark.parametrize("n", range(3, 9))
def test_enumerate_outputs_are_exact_and_unit_invariant(n):
    for t in admissible_types(n, 5):
        systems = enumerate_systems(n, t)
        assert systems and all(is_exact(cs) for cs in systems)
        keyset = {tuple(tuple(sorted(cs.coset(i))) for i in range(len(cs.cosets))) for cs in systems}
        for u in range(1, n):
            if gcd(u, n) != 1:
                continue
            moved = {tuple(tuple(sorted((u * x) % n for x in c)) for c in key) for key in keyset}
            assert moved == keyset


def test_g1_to_g3_parameters():
    cs = CoveringSystem.from_sets(3, [[0], [2], [1]])
    assert cs.biggest == (0, 2, 1)
    ident = to_identity(cs, REAL)
    assert ident.lambdas == (Character(REAL, Fr(-1, 3), 0), Character(REAL, Fr(0), 0))
    assert ident.etas == (Character(REAL, Fr(-4, 3), 1), Character(REAL, Fr(1), 1))
    assert ident.b == Fr(1, 27) and ident.sense == "strong"


def test_six_distributions_and_involution():
    idents = cubic_identities()
    pairs = {int(i.label[1]): int(i.label[-1]) for i in idents}
    assert pairs == {1: 3, 3: 1, 4: 5, 5: 4, 2: 2, 6: 6}


def test_to_identity_errors():
    with pytest.raises(EvenModulusOverReal):
        to_identity(enumerate_systems(4, (2, 1, 1))[0], REAL)
    with pytest.raises(TypeMismatch):
        to_identity(CoveringSystem.from_sets(3, [[0], [1], [2]]), REAL, (-1, 2))
    ident = to_identity(enumerate_systems(4, (2, 1, 1))[0], COMPLEX)
    assert ident.check_invariants()


def test_all_outputs_strong_and_invariant():
    for F, ns in ((REAL, (3, 5, 7)), (COMPLEX, (3, 4, 5, 6))):
        for n in ns:
            for t in admissible_types(n, 4):
                for cs in enumerate_systems(n, t):
                    ident = to_identity(cs, F)
                    assert ident.check_invariants()
                    assert ident.sense == "strong"

import random
from fractions import Fraction as Fr

import pytest

from gammaforge.characters import (COMPLEX, REAL, Character, LocalField, NonArchElement,
                                   evaluate, inv, is_singular, is_strongly_regular, mul,
                                   nm_power, nonarch, nu, power, real_part, trivial)
from gammaforge.errors import (EvenRootOverReal, FieldMismatch, SingularInput,
                               UnsupportedField, ZeroArgument)


def lam(F, s, n=0):
    return Character(F, Fr(s), n)


def test_local_field_validation():
    assert nonarch(9).q == 9
    with pytest.raises(ValueError):
        nonarch(6)
    with pytest.raises(ValueError):
        LocalField("R", 3)
    assert LocalField.from_json(nonarch(5).to_json()) == nonarch(5)


def test_real_twist_reduced_mod_two():
    assert lam(REAL, 1, 3).n == 1
    assert lam(COMPLEX, 1, 3).n == 3
    with pytest.raises(UnsupportedField):
        Character(nonarch(3), Fr(1), 1)


def test_mul_examples():
    assert mul(lam(REAL, 1, 1), lam(REAL, 2)) == lam(REAL, 3, 1)
    assert mul(lam(REAL, 1, 1), lam(REAL, 0, 1)) == lam(REAL, 1, 0)
    assert mul(lam(COMPLEX, 1, -2), lam(COMPLEX, 1, 2)) == nu(COMPLEX)
    with pytest.raises(FieldMismatch):
        mul(lam(REAL, 1), lam(COMPLEX, 1))


def test_nm_power_and_power():
    assert nm_power(COMPLEX, Fr(1, 3)) == lam(COMPLEX, Fr(2, 3))
    assert nm_power(REAL, Fr(2, 3)) == lam(REAL, Fr(2, 3), 0)
    assert nm_power(REAL, Fr(1, 3)) == lam(REAL, Fr(1, 3), 1)
    assert power(lam(REAL, Fr(-1, 3)), 3) == inv(nu(REAL))
    assert nm_power(nonarch(3), Fr(1, 2)) == lam(nonarch(3), Fr(1, 2))
    with pytest.raises(EvenRootOverReal):
        nm_power(REAL, Fr(1, 2))


def test_real_part():
    assert real_part(lam(REAL, 1, 1)) == 1
    assert real_part(nu(COMPLEX)) == 1
    assert real_part(lam(COMPLEX, -1, 3)) == Fr(-1, 2)


def test_singular_examples():
    assert is_singular(lam(REAL, -1))
    assert is_singular(lam(REAL, -2, 1))
    assert not is_singular(lam(COMPLEX, -2, 1))
    assert is_singular(lam(COMPLEX, -2, 0))
    assert not is_singular(lam(REAL, -1, 1))
    with pytest.raises(UnsupportedField):
        is_singular(lam(nonarch(2), -1))


def test_strongly_regular_examples():
    assert not is_strongly_regular(lam(REAL, 0, 1))
    assert not is_strongly_regular(lam(REAL, -2, 0))
    assert is_strongly_regular(lam(REAL, Fr(1, 2)))
    assert is_strongly_regular(lam(REAL, 2, 0))
    assert not is_strongly_regular(lam(COMPLEX, -1, 1))  # x^0 xbar^{-1}
    with pytest.raises(SingularInput):
        is_strongly_regular(lam(REAL, -1))


def test_evaluate_examples():
    assert evaluate(lam(REAL, Fr(-1, 3)), -8) == pytest.approx(0.5)
    assert evaluate(lam(COMPLEX, 0, 1), 1j) == pytest.approx(1j)
    assert evaluate(lam(nonarch(3), Fr(1, 2)), NonArchElement(2)) == pytest.approx(1 / 3)
    assert evaluate(lam(REAL, 0, 1), -2.0) == pytest.approx(-1)
    with pytest.raises(ZeroArgument):
        evaluate(nu(REAL), 0)


def test_json_round_trip():
    c = lam(COMPLEX, Fr(-4, 6), -3)
    obj = c.to_json()
    assert obj == {"field": "C", "s": "-2/3", "n": -3}
    assert Character.from_json(obj) == c


def _rand_char(rng, F):
    return Character(F, Fr(rng.randint(-24, 24), rng.randint(1, 6)), rng.randint(-3, 3))


@pytest.mark.parametrize("F", [REAL, COMPLEX])
def test_group_laws(F):
    rng = random.Random(1)
    for _ in range(200):
        a, b, c = (_rand_char(rng, F) for _ in range(3))
        assert mul(mul(a, b), c) == mul(a, mul(b, c))
        assert mul(a, b) == mul(b, a)
        assert mul(inv(a), a) == trivial(F)
        k = rng.randint(-4, 4)
        acc = trivial(F)
        for _ in range(abs(k)):
            acc = mul(acc, a if k > 0 else inv(a))
        assert power(a, k) == acc
        assert real_part(mul(a, b)) == real_part(a) + real_part(b)


@pytest.mark.parametrize("F", [REAL, COMPLEX])
def test_evaluate_multiplicative(F):
    rng = random.Random(2)
    for _ in range(200):
        a = _rand_char(rng, F)
        if F is REAL:
            x, y = rng.choice([-1, 1]) * rng.uniform(0.1, 3), rng.choice([-1, 1]) * rng.uniform(0.1, 3)
        else:
            x = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            y = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        assert abs(evaluate(a, x * y) - evaluate(a, x) * evaluate(a, y)) < 1e-12 * max(
            1, abs(evaluate(a, x * y)))
        assert abs(evaluate(a, x)) == pytest.approx(abs(x) ** (2 * real_part(a) if F is COMPLEX
                                                            else real_part(a)))


@pytest.mark.parametrize("F", [REAL, COMPLEX])
def test_singular_and_strongly_regular_disjoint(F):
    for k in range(-24, 25):
        for n in range(-3, 4):
            c = Character(F, Fr(k, 6), n)
            if is_singular(c):
                continue
            # strongly regular characters are never singular; the call must not raise
            is_strongly_regular(c)

"""Exact covering systems of Z/nZ and the monomial identities they index.

A covering system of type (p_1, ..., p_{k+1}) is an ordered partition of Z/nZ
into cosets of the subgroups of order p_i.  The last two cosets are
singletons; the one before last carries the positive exponent n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .characters import (REAL, Character, LocalField, inv, mul, nm_power,
                         nu, power)
from .divisors import (MonomialIdentity, RelationSolution, ab_relation,
                       strong_sense)
from .errors import EvenModulusOverReal, TypeMismatch


@dataclass(frozen=True)
class CoveringSystem:
    n: int
    cosets: Tuple[Tuple[int, int], ...]  # (size p, residue r): {j : j = r mod n/p}

    def coset(self, i: int) -> frozenset:
        p, r = self.cosets[i]
        step = self.n // p
        return frozenset(range(r % step, self.n, step))

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.cosets)

    @property
    def biggest(self) -> Tuple[int, ...]:
        return tuple(max(self.coset(i)) for i in range(len(self.cosets)))

    @staticmethod
    def from_sets(n: int, sets: Sequence[Sequence[int]]) -> "CoveringSystem":
        """Build from explicit residue sets; each must be a coset of a subgroup."""
        cosets = []
        for s in sets:
            s = sorted(set(x % n for x in s))
            p = len(s)
            if p == 0 or n % p:
                raise ValueError(f"{s} is not a coset in Z/{n}")
            step = n // p
            r = s[0] % step
            if s != list(range(r, n, step)):
                raise ValueError(f"{s} is not a coset in Z/{n}")
            cosets.append((p, r))
        return CoveringSystem(n, tuple(cosets))


def is_exact(cs: CoveringSystem) -> bool:
    seen = set()
    for i in range(len(cs.cosets)):
        c = cs.coset(i)
        if seen & c:
            return False
        seen |= c
    return seen == set(range(cs.n))


def enumerate_systems(n: int, sizes: Sequence[int]) -> List[CoveringSystem]:
    """All ordered exact covering systems of Z/nZ of the given type."""
    sizes = [int(p) for p in sizes]
    if sum(sizes) != n or any(p <= 0 or n % p for p in sizes):
        return []
    out: List[CoveringSystem] = []

    def rec(i: int, used: frozenset, chosen: list):
        if i == len(sizes):
            out.append(CoveringSystem(n, tuple(chosen)))
            return
        p = sizes[i]
        step = n // p
        for r in range(step):
            c = frozenset(range(r, n, step))
            if not (c & used):
                rec(i + 1, used | c, chosen + [(p, r)])

    rec(0, frozenset(), [])
    return out


# short alias; it shadows the builtin only inside this module
enumerate = enumerate_systems


def default_exponents(cs: CoveringSystem) -> Tuple[int, ...]:
    return tuple(-p for p in cs.sizes[:-2]) + (cs.n,)


def to_identity(cs: CoveringSystem, field: LocalField,
                exponents: Optional[Sequence[int]] = None) -> MonomialIdentity:
    """The identity attached to a covering system, with a = 1 and b from the ab relation.

    Slots j < k carry n_j = -p_j; slot k carries n.  Fractional powers of Nm
    appear when a coset has more than one element and are kept exact.
    """
    n = cs.n
    exps = tuple(default_exponents(cs) if exponents is None else exponents)
    k = len(exps)
    if len(cs.cosets) != k + 1 or cs.sizes[-2:] != (1, 1):
        raise TypeMismatch("type must end with two singletons, one per extra slot")
    if exps[-1] != n or any(e != -p for e, p in zip(exps[:-1], cs.sizes[:-2])):
        raise TypeMismatch(f"exponents {exps} do not match type {cs.sizes}")
    if field.kind == "R" and n % 2 == 0:
        raise EvenModulusOverReal("over R the modulus must be odd")
    if not field.is_archimedean:
        raise TypeMismatch("covering identities are archimedean")
    if not is_exact(cs):
        raise TypeMismatch("not an exact covering system")
    p = cs.biggest
    pk, pk1 = p[k - 1], p[k]
    F = field
    nuinv = inv(nu(F))
    lams, etas = [], []
    for j in range(k - 1):
        nj = exps[j]
        lams.append(mul(nuinv, nm_power(F, Fraction((p[j] - pk) * nj, n))))
        # eta_j = nu^{n_j} Nm^{(p_{k+1}-p_j)n_j/n}; equal to nu^{-1} Nm^{...} modulo Nm
        etas.append(mul(power(nu(F), nj), nm_power(F, Fraction((pk1 - p[j]) * nj, n))))
    lams.append(nm_power(F, n - 1 - pk))
    etas.append(nm_power(F, pk1))
    gamma = mul(nu(F), nm_power(F, Fraction(pk1 - pk, n)))
    ident = MonomialIdentity(
        field=F, exponents=exps, lambdas=tuple(lams), etas=tuple(etas), gamma=gamma,
        case="Sum2", a=Fraction(1), b=ab_relation(exps, [1] * k, "Sum2"),
        sense="strong" if strong_sense(lams, etas, exps) else "weak",
    )
    if not ident.check_invariants():
        raise AssertionError("eta lambda nu = gamma^n failed")  # construction bug
    return ident


def relation_of(ident: MonomialIdentity) -> RelationSolution:
    mu, xi, case = ident.relation_data()
    return RelationSolution(mu, xi, case)


def identities_for_exponents(field: LocalField, exps: Sequence[int]) -> List[MonomialIdentity]:
    """All covering identities whose exponent vector is exps = (-p_1, ..., -p_{k-1}, n)."""
    exps = tuple(exps)
    if exps[-1] <= 0 or any(e >= 0 for e in exps[:-1]):
        return []
    sizes = [-e for e in exps[:-1]] + [1, 1]
    return [to_identity(cs, field, exps) for cs in enumerate_systems(exps[-1], sizes)]


def admissible_types(n: int, max_cosets: int = 5) -> List[Tuple[int, ...]]:
    """Ordered types (p_1, ..., p_{k-1}, 1, 1) of Z/n with nonempty coverings."""
    divisors = [d for d in range(1, n + 1) if n % d == 0]
    out = []

    def rec(prefix, remaining):
        if remaining == 0:
            t = tuple(prefix) + (1, 1)
            if prefix and enumerate_systems(n, t):
                out.append(t)
            return
        if len(prefix) + 2 >= max_cosets:
            return
        for d in divisors:
            if d <= remaining:
                rec(prefix + [d], remaining - d)

    if n >= 3:
        rec([], n - 2)
    return out


# the six x^3/y distributions, keyed by (lambda on y, lambda on x) as (s, twist)
CUBIC_TABLE = {
    1: ((Fraction(-1, 3), 0), (Fraction(0), 0)),
    2: ((Fraction(-2, 3), 1), (Fraction(0), 0)),
    3: ((Fraction(-4, 3), 1), (Fraction(1), 1)),
    4: ((Fraction(-5, 3), 0), (Fraction(2), 0)),
    5: ((Fraction(-2, 3), 1), (Fraction(1), 1)),
    6: ((Fraction(-4, 3), 1), (Fraction(2), 0)),
}


def cubic_label(chars: Sequence[Character]) -> Optional[int]:
    key = tuple((c.s, c.n) for c in chars)
    for j, v in CUBIC_TABLE.items():
        if v == key:
            return j
    return None


def cubic_identities() -> List[MonomialIdentity]:
    """The six identities for FT of psi(x^3/y) lambda_2(x) lambda_1(y), sorted by source."""
    out = []
    for ident in identities_for_exponents(REAL, (-1, 3)):
        src, dst = cubic_label(ident.lambdas), cubic_label(ident.etas)
        ident.label = f"G{src}->G{dst}"
        ident.variables = ("y", "x")
        out.append((src, ident))
    out.sort(key=lambda t: t[0])
    return [i for _, i in out]

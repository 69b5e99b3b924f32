"""Divisor calculus on character lattices.

Points of X_F = X(F*)/<Nm> are stored as canonical Characters.  A slot with
exponent -N (N > 0) contributes the block of N-th roots of mu, and a slot with
exponent +N the negated block of N-th roots of nu^N mu^{-1}; both come from
splitting Gamma(u^{-n} mu) with the multiplication formula.  The same
bookkeeping without the quotient by Nm decides the lifted relation in X(F*),
which is what an actual Gamma identity needs.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .characters import (Character, LocalField, inv, is_singular, is_strongly_regular,
                         mul, nm_power, norm_char, nu,
                         power, trivial)
from .errors import BadTower, EvenRootOverReal, SingularInput, UnsupportedField


# ---------------------------------------------------------------------------
# divisors

class Divisor:
    """Finite formal integer combination of hashable lattice points."""

    __slots__ = ("entries",)

    def __init__(self, entries: Optional[Dict[Hashable, int]] = None):
        self.entries = {p: m for p, m in (entries or {}).items() if m != 0}

    @classmethod
    def point(cls, p: Hashable, mult: int = 1) -> "Divisor":
        return cls({p: mult})

    @classmethod
    def sum_of(cls, points: Iterable[Hashable], mult: int = 1) -> "Divisor":
        c = Counter(points)
        return cls({p: mult * m for p, m in c.items()})

    def __add__(self, other: "Divisor") -> "Divisor":
        out = dict(self.entries)
        for p, m in other.entries.items():
            out[p] = out.get(p, 0) + m
        return Divisor(out)

    def __neg__(self) -> "Divisor":
        return Divisor({p: -m for p, m in self.entries.items()})

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, Divisor) and self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    @property
    def degree(self) -> int:
        return sum(self.entries.values())

    def is_zero(self) -> bool:
        return not self.entries

    def __repr__(self):
        items = sorted(self.entries.items(), key=lambda kv: repr(kv[0]))
        return "Div(" + " + ".join(f"{m}*{p!r}" for p, m in items) + ")"


ZERO = Divisor()


# ---------------------------------------------------------------------------
# the archimedean lattice

def canonical(chi: Character) -> Character:
    """Representative of chi modulo <Nm> with s in [0,1) (R) or [0,2) (C)."""
    if not chi.field.is_archimedean:
        raise UnsupportedField("canonical representatives are archimedean")
    if not chi.exact:
        raise ValueError("canonical needs an exact exponent")
    if chi.field.kind == "R":
        k = math.floor(chi.s)
        return Character(chi.field, chi.s - k, chi.n - k)
    k = math.floor(chi.s / 2)
    return Character(chi.field, chi.s - 2 * k, chi.n)


def _char_key(chi: Character):
    return (chi.s, chi.n)


def block(base: Character, N: int) -> List[Character]:
    """The points base * Nm^{j/N}, j = 0..N-1 (exact, not reduced)."""
    if N <= 0:
        raise ValueError("block size must be positive")
    if base.field.kind == "R" and N % 2 == 0:
        raise EvenRootOverReal(f"D_(chi,{N}) needs odd N over R")
    return [mul(base, nm_power(base.field, Fraction(j, N))) for j in range(N)]


def divisor_D(chi: Character, N: int) -> Divisor:
    """D_{chi,N} in Div(X_F); D_{chi,-N} = -D_{chi^{-1} nu, N}."""
    if N == 0:
        raise ValueError("N must be nonzero")
    if N > 0:
        return Divisor.sum_of(canonical(c) for c in block(chi, N))
    return -divisor_D(mul(inv(chi), nu(chi.field)), -N)


def exact_root(chi: Character, N: int) -> Optional[Character]:
    """An N-th root of chi in X(F*), or None (complex twist not divisible by N)."""
    if chi.field.kind == "R":
        if N % 2 == 0:
            raise EvenRootOverReal("even roots are not used over R")
        return Character(chi.field, chi.s / N, chi.n)
    if chi.n % N:
        return None
    return Character(chi.field, chi.s / N, chi.n // N)


def slot_base(mu: Character, n: int) -> Optional[Character]:
    """Lowest point of the block contributed by a slot (exponent n, mu = lambda nu).

    n = -N: the N-th roots of mu.  n = +N: the block b Nm^{j/N} with
    mu = nu^N b^{-N} Nm^{-(N-1)}.
    """
    F = mu.field
    if n < 0:
        return exact_root(mu, -n)
    N = n
    target = mul(mul(power(nu(F), N), inv(mu)), power(norm_char(F), -(N - 1)))
    return exact_root(target, N)


def mu_from_base(base: Character, n: int) -> Character:
    F = base.field
    if n < 0:
        return power(base, -n)
    N = n
    return mul(mul(power(nu(F), N), power(base, -N)), power(norm_char(F), -(N - 1)))


def _sides(field: LocalField, n: Sequence[int], mu: Sequence[Character], xi: Character,
           case: int, reduce_nm: bool):
    """(left, right) multisets of the relation, or None when a root is missing."""
    key = canonical if reduce_nm else (lambda c: c)
    left = [key(trivial(field))]
    right = []
    for k, m in zip(n, mu):
        b = slot_base(m, k)
        if b is None:
            return None
        pts = [key(c) for c in block(b, abs(k))]
        (left if k < 0 else right).extend(pts)
    if case == 1:
        left.append(key(mul(nu(field), inv(xi))))
    else:
        right.append(key(xi))
    return Counter(left), Counter(right)


def relation_divisor(field: LocalField, n: Sequence[int], mu: Sequence[Character],
                     xi: Character, case: int) -> Optional[Divisor]:
    """Left minus right of the relation in Div(X_F)."""
    sides = _sides(field, n, mu, xi, case, reduce_nm=True)
    if sides is None:
        return None
    return Divisor(dict(sides[0])) - Divisor(dict(sides[1]))


def check_relation(field: LocalField, n: Sequence[int], mu: Sequence[Character],
                   xi: Character, case: int, exact: bool = False) -> bool:
    """Case 1: D_{1,1} + sum D_{mu_i,-n_i} = D_{xi,-1}; case 2 with D_{xi,1}.

    With exact=True the points are compared in X(F*) itself (mu_i = lambda_i nu,
    xi = gamma or gamma^{-1}), which is the condition for the Gamma identity.
    """
    if case not in (1, 2):
        raise ValueError("case is 1 or 2")
    if len(n) != len(mu):
        raise ValueError("one character per exponent")
    sides = _sides(field, n, mu, xi, case, reduce_nm=not exact)
    if sides is None:
        return False
    return sides[0] == sides[1]


def check_relation_literal(field: LocalField, n: Sequence[int], mu: Sequence[Character],
                           xi: Character, case: int) -> bool:
    """The relation read with D_{mu,-n} taken verbatim (mu itself, no roots).

    Agrees with check_relation when every |n_i| = 1; kept for comparison.
    """
    lhs = divisor_D(trivial(field), 1)
    for k, m in zip(n, mu):
        lhs = lhs + divisor_D(m, -k)
    rhs = divisor_D(xi, -1 if case == 1 else 1)
    return lhs == rhs


# ---------------------------------------------------------------------------
# solving the relation

@dataclass(frozen=True)
class RelationSolution:
    mu: Tuple[Character, ...]
    xi: Character
    case: int

    @property
    def lambdas(self) -> Tuple[Character, ...]:
        F = self.xi.field
        return tuple(mul(m, inv(nu(F))) for m in self.mu)

    @property
    def gamma(self) -> Character:
        return self.xi if self.case == 1 else inv(self.xi)

    def sort_key(self):
        return (self.case,) + tuple(_char_key(m) for m in self.mu) + (_char_key(self.xi),)


def _grid(field: LocalField, L: int, twist_window: int) -> List[Character]:
    if field.kind == "R":
        return [Character(field, Fraction(j, L), t) for j in range(L) for t in (0, 1)]
    return [Character(field, Fraction(j, L), t) for j in range(2 * L)
            for t in range(-twist_window, twist_window + 1)]


def solve_relation(field: LocalField, n: Sequence[int], cases: Sequence[int] = (1, 2),
                   twist_window: Optional[int] = None) -> List[RelationSolution]:
    """All exact solutions (mu_i, xi) of the lifted relation.

    Every point of the relation is forced once the trivial character is placed
    in a positive block, so the search is a finite exact backtracking.  Slots
    left unconstrained after everything balances (free families, possible
    only with several positive exponents) are sampled from the grid
    (1/L)Z x twists of the canonical window.
    """
    n = [int(k) for k in n]
    if any(k == 0 for k in n):
        raise ValueError("exponents must be nonzero")
    if field.kind == "R" and any(abs(k) % 2 == 0 for k in n):
        raise EvenRootOverReal("over R every |n_i| must be odd")
    L = reduce(lambda x, y: x * y // math.gcd(x, y), [abs(k) for k in n])
    tw = twist_window if twist_window is not None else max(2, 2 * max(abs(k) for k in n))
    grid = _grid(field, L, tw)
    F = field
    one = trivial(F)
    out = set()
    for case in cases:
        if (case == 1 and sum(n) != 2) or (case == 2 and sum(n) != 0):
            continue  # degree count
        k = len(n)

        def finish(bases, xi):
            mu = tuple(mu_from_base(bases[i], n[i]) for i in range(k))
            if check_relation(F, n, mu, xi, case, exact=True):
                out.add(RelationSolution(mu, xi, case))

        def search(bases, xi, delta: Counter):
            # delta: left minus right of the assigned part
            pos = [p for p, m in delta.items() if m > 0]
            neg = [p for p, m in delta.items() if m < 0]
            free = [i for i in range(k) if bases[i] is None]
            if not pos and not neg:
                if not free and xi is not None:
                    finish(bases, xi)
                    return
                # a free family: pin one unknown to the grid
                if xi is None:
                    for g in grid:
                        add_xi(bases, g, delta)
                    return
                i = free[0]
                for g in grid:
                    add_block(bases, i, g, xi, delta)
                return
            if pos:
                x = min(pos, key=_char_key)
                # x (left) must be covered on the right
                for i in free:
                    if n[i] > 0:
                        for j in range(n[i]):
                            add_block(bases, i, mul(x, nm_power(F, Fraction(-j, n[i]))), xi, delta)
                if case == 2 and xi is None:
                    add_xi(bases, x, delta)
                return
            y = min(neg, key=_char_key)
            for i in free:
                if n[i] < 0:
                    N = -n[i]
                    for j in range(N):
                        add_block(bases, i, mul(y, nm_power(F, Fraction(-j, N))), xi, delta)
            if case == 1 and xi is None:
                add_xi(bases, y, delta)

        def add_block(bases, i, base, xi, delta):
            d = Counter(delta)
            sign = 1 if n[i] < 0 else -1
            for c in block(base, abs(n[i])):
                d[c] += sign
            d = Counter({p: m for p, m in d.items() if m != 0})
            nb = list(bases)
            nb[i] = base
            search(nb, xi, d)

        def add_xi(bases, point, delta):
            # case 1: point is nu xi^{-1} on the left; case 2: point is xi on the right
            d = Counter(delta)
            if case == 1:
                xi = mul(nu(F), inv(point))
                d[point] += 1
            else:
                xi = point
                d[point] -= 1
            d = Counter({p: m for p, m in d.items() if m != 0})
            search(bases, xi, d)

        search([None] * k, None, Counter({one: 1}))
    return sorted(out, key=RelationSolution.sort_key)


# ---------------------------------------------------------------------------
# cyclic towers of unramified extensions

@dataclass(frozen=True)
class CyclicTower:
    """X_{F,E}: characters nu^m chi_j of F*, chi_j(x) = zeta_{d_E}^{j v(x)}."""
    d_E: int

    def point(self, m, j: int, level: int = 1) -> Tuple[str, Fraction, int, int]:
        """A point at the degree-``level`` subextension (Galois index mod d_E/level)."""
        if self.d_E % level:
            raise BadTower(f"{level} does not divide {self.d_E}")
        return ("T", Fraction(m), j % (self.d_E // level), level)


def divisor_D_ext(tower: CyclicTower, level: int, chi, e: int = 1) -> Divisor:
    """D(chi, e) for a character chi of the degree-``level`` field.

    D(chi) is the sum over lambda with lambda o Nm = chi; D(chi, -1) = -D(chi^{-1} nu).
    """
    if tower.d_E % level:
        raise BadTower(f"{level} does not divide {tower.d_E}")
    _, m, j, lev = chi
    if lev != level:
        raise BadTower("point lives at a different level")
    if e == -1:
        return -divisor_D_ext(tower, level, tower.point(1 - m, -j, level), 1)
    if e != 1:
        raise ValueError("e is +1 or -1")
    branch = tower.d_E // level
    pts = [("T", m, jj, 1) for jj in range(tower.d_E) if jj % branch == j]
    return Divisor.sum_of(pts)


# ---------------------------------------------------------------------------
# pole and strong-sense predicates

def _nonneg_solutions(A: Fraction, B: Fraction, p: int, q: int):
    """Pairs (x, y) >= 0 of integers with p(A + x) = q(B + y), p < 0 < q."""
    # p(A+x) decreases in x, q(B+y) increases in y
    x = 0
    while True:
        lhs = p * (A + x)
        if lhs < q * B:
            return
        y = lhs / q - B
        if y.denominator == 1 and y >= 0:
            yield x, int(y)
        x += 1


def _pair_collision(lam_j: Character, lam_l: Character, nj: int, nl: int) -> bool:
    """(lam_j r_j^{-1})^{nl} = (lam_l r_l^{-1})^{nj} for singular r_j, r_l."""
    F = lam_j.field
    if F.kind == "R":
        # r = nu^{-1} x^{-m} = lambda_{-1-m, m}
        for mj, ml in _nonneg_solutions(lam_j.s + 1, lam_l.s + 1, nl, nj):
            if (nl * (lam_j.n - mj) - nj * (lam_l.n - ml)) % 2 == 0:
                return True
        return False
    # over C work in the coordinates ((s+n)/2, (s-n)/2); r shifts both by -1-a, -1-b
    for sgn in (1, -1):
        aj = (lam_j.s + sgn * lam_j.n) / 2
        al = (lam_l.s + sgn * lam_l.n) / 2
        if next(_nonneg_solutions(aj + 1, al + 1, nl, nj), None) is None:
            return False
    return True


def _condition_ii(lams: Sequence[Character], ns: Sequence[int]) -> bool:
    for j, (lj, nj) in enumerate(zip(lams, ns)):
        for l, (ll, nl) in enumerate(zip(lams, ns)):
            if nj > 0 > nl and _pair_collision(lj, ll, nj, nl):
                return True
    return False


def pole_free(lams: Sequence[Character], ns: Sequence[int]) -> bool:
    if any(not c.exact for c in lams):
        raise ValueError("rational characters only")
    for lam, k in zip(lams, ns):
        if k > 0 and is_singular(lam):
            return False
    return not _condition_ii(lams, ns)


def _strongly_regular(chi: Character) -> bool:
    try:
        return is_strongly_regular(chi)
    except SingularInput:
        return False


def strong_sense(lams: Sequence[Character], etas: Sequence[Character],
                 ns: Sequence[int], ms: Optional[Sequence[int]] = None) -> bool:
    ms = list(ns) if ms is None else list(ms)
    for lam, k in zip(lams, ns):
        if k > 0 and not _strongly_regular(lam):
            return False
    for eta, k in zip(etas, ms):
        if k > 0 and not _strongly_regular(eta):
            return False
    return not _condition_ii(lams, ns) and not _condition_ii(etas, ms)


def ab_relation(ns: Sequence[int], Ds: Sequence[int], case: str) -> Fraction:
    """ab (case Sum2) or ab^{-1} (case Sum0) forced by the scaling symmetry."""
    prod = Fraction(1)
    for k, D in zip(ns, Ds):
        prod *= Fraction(k) ** (-k * D)
    return -prod if case == "Sum2" else prod


def derive_eta(lams: Sequence[Character], gamma: Character, ns: Sequence[int],
               ratios: Optional[Sequence[Fraction]] = None) -> List[Character]:
    """eta_i = gamma^{n_i} lambda_i^{-1} nu^{-M_i/D_i}."""
    F = gamma.field
    ratios = [Fraction(1)] * len(lams) if ratios is None else [Fraction(r) for r in ratios]
    out = []
    for lam, k, r in zip(lams, ns, ratios):
        nur = Character(F, nu(F).s * r, 0)
        out.append(mul(mul(power(gamma, k), inv(lam)), inv(nur)))
    return out


# ---------------------------------------------------------------------------
# identities

@dataclass
class MonomialIdentity:
    field: LocalField
    exponents: Tuple[int, ...]
    lambdas: Tuple[Character, ...]
    etas: Tuple[Character, ...]
    gamma: Character
    case: str = "Sum2"
    degrees: Tuple[int, ...] = ()
    a: Fraction = Fraction(1)
    b: Fraction = Fraction(1)
    C: Optional[complex] = None
    sense: str = "weak"
    spaces: Optional[Tuple[object, ...]] = None  # PVSDescriptor per slot, or None
    label: str = ""
    variables: Tuple[str, ...] = ()

    def __post_init__(self):
        self.exponents = tuple(int(k) for k in self.exponents)
        self.lambdas = tuple(self.lambdas)
        self.etas = tuple(self.etas)
        if not self.degrees:
            self.degrees = (1,) * len(self.exponents)
        self.degrees = tuple(self.degrees)
        if not self.variables:
            self.variables = tuple(f"x_{i + 1}" for i in range(len(self.exponents)))

    @property
    def ms(self) -> Tuple[int, ...]:
        return self.exponents if self.case == "Sum2" else tuple(-k for k in self.exponents)

    def ratios(self) -> List[Fraction]:
        if not self.spaces:
            return [Fraction(1)] * len(self.exponents)
        return [Fraction(s.M, s.D) if s is not None else Fraction(1) for s in self.spaces]

    def check_invariants(self) -> bool:
        F = self.field
        for lam, eta, k, r in zip(self.lambdas, self.etas, self.exponents, self.ratios()):
            nur = Character(F, nu(F).s * r, 0)
            if mul(mul(eta, lam), nur) != power(self.gamma, k):
                return False
        total = sum(m * D for m, D in zip(self.ms, self.degrees))
        return total == (2 if self.case == "Sum2" else 0)

    def relation_data(self):
        """(mu_i, xi, case number) for the divisor relation (scalar slots only)."""
        F = self.field
        mu = tuple(mul(lam, nu(F)) for lam in self.lambdas)
        xi = self.gamma if self.case == "Sum2" else inv(self.gamma)
        return mu, xi, 1 if self.case == "Sum2" else 2

    def ab(self) -> Fraction:
        return self.a * self.b if self.case == "Sum2" else self.a / self.b

    def to_json(self) -> dict:
        out = {
            "field": self.field.to_json(),
            "exponents": list(self.exponents),
            "degrees": list(self.degrees),
            "lambda": [c.to_json() for c in self.lambdas],
            "eta": [c.to_json() for c in self.etas],
            "gamma": self.gamma.to_json(),
            "case": self.case,
            "a": _fstr(self.a),
            "b": _fstr(self.b),
            "ab": _fstr(self.ab()),
            "C": None if self.C is None else [_num(self.C.real), _num(self.C.imag)],
            "sense": self.sense,
        }
        if self.label:
            out["label"] = self.label
        if self.spaces:
            out["spaces"] = [getattr(s, "name", None) for s in self.spaces]
        out["variables"] = list(self.variables)
        return out

    @staticmethod
    def from_json(obj: dict) -> "MonomialIdentity":
        F = LocalField.from_json(obj["field"])
        C = obj.get("C")
        ident = MonomialIdentity(
            field=F,
            exponents=tuple(obj["exponents"]),
            degrees=tuple(obj.get("degrees") or ()),
            lambdas=tuple(Character.from_json(c) for c in obj["lambda"]),
            etas=tuple(Character.from_json(c) for c in obj["eta"]),
            gamma=Character.from_json(obj["gamma"]),
            case=obj.get("case", "Sum2"),
            a=Fraction(obj.get("a", "1")),
            b=Fraction(obj["b"]) if "b" in obj else Fraction(1),
            C=None if C is None else complex(float(C[0]), float(C[1])),
            sense=obj.get("sense", "weak"),
            label=obj.get("label", ""),
            variables=tuple(obj.get("variables") or ()),
        )
        if "b" not in obj and "ab" in obj:
            ab = Fraction(obj["ab"])
            ident.b = ab / ident.a if ident.case == "Sum2" else ident.a / ab
        return ident

    def to_latex(self) -> str:
        lhs = _latex_side(self.field, self.exponents, self.lambdas, self.a, self.variables)
        rhs = _latex_side(self.field, self.ms, self.etas, self.b, self.variables)
        c = "C" if self.C is None else _latex_complex(self.C)
        return rf"\widehat{{{lhs}}} = {c}\,{rhs}"


def _fstr(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _num(x: float) -> str:
    return format(float(x) + 0.0, ".15g")


def _latex_frac(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    sign = "-" if x < 0 else ""
    return rf"{sign}\frac{{{abs(x.numerator)}}}{{{x.denominator}}}"


def _latex_complex(z: complex) -> str:
    re, im = round(z.real, 12), round(z.imag, 12)
    if im == 0:
        return format(re, ".6g")
    if re == 0:
        return format(im, ".6g") + "i"
    return f"({re:.6g}{im:+.6g}i)"


def _latex_char(F: LocalField, chi: Character, v: str) -> str:
    parts = []
    if chi.s != 0:
        parts.append(rf"|{v}|^{{{_latex_frac(chi.s)}}}")
    if F.kind == "R":
        if chi.n:
            parts.append(rf"\operatorname{{sign}}({v})")
    elif chi.n:
        parts.append(rf"\left(\frac{{{v}}}{{|{v}|}}\right)^{{{chi.n}}}")
    return " ".join(parts)


def _latex_side(F: LocalField, ns, chars, a, vs) -> str:
    num, den = [], []
    for k, v in zip(ns, vs):
        t = v if abs(k) == 1 else f"{v}^{{{abs(k)}}}"
        (num if k > 0 else den).append(t)
    mono = " ".join(num) or "1"
    if den:
        mono = rf"\frac{{{mono}}}{{{' '.join(den)}}}"
    coef = "" if Fraction(a) == 1 else _latex_frac(a) + r"\,"
    chars_tex = " ".join(filter(None, (_latex_char(F, c, v) for c, v in zip(chars, vs))))
    return rf"\psi\!\left({coef}{mono}\right) {chars_tex}".strip()

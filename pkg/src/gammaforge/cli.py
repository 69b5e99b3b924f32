"""Command-line front end.

    gammaforge gamma eval --field R --s 0.5 --n 0 [--d D --a A]
    gammaforge identities monomial --exponents -1,3 --field R
    gammaforge identities covering --n 3 --type 1,1,1 --field R [--latex]
    gammaforge identities pvs --space e6 [--latex]
    gammaforge legendre check --f "x1*x2*x3" --fstar "x1*x2*x3"
    gammaforge verify --identity id.json --tests 3 --tol 1e-2 --field R
    gammaforge verify cubic --p 2 --precision 3
    gammaforge verify gauss --field C --a 1
    gammaforge selftest

Reports are JSON with a "schema" field; floats are written as decimal
strings with 15 significant digits.  Exit codes: 0 pass, 1 fail, 2 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import List, Optional, Sequence

from . import __version__
from .errors import GammaForgeError

SCHEMA = "1"


# ---------------------------------------------------------------------------
# output

def _stringify(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return format(obj + 0.0, ".15g")
    if isinstance(obj, complex):
        return [format(obj.real + 0.0, ".15g"), format(obj.imag + 0.0, ".15g")]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return _stringify(obj.item())
    return str(obj)


def dumps(report: dict) -> str:
    """Deterministic JSON: sorted keys, numbers as 15-digit strings."""
    return json.dumps(_stringify(report), sort_keys=True, indent=2)


class Output:
    def __init__(self, path: Optional[str]):
        self.path = path

    def write(self, text: str):
        if self.path:
            with open(self.path, "w") as fh:
                fh.write(text + "\n")
        else:
            sys.stdout.write(text + "\n")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers

def _field(name: str):
    from .characters import COMPLEX, REAL, nonarch
    name = name.strip()
    if name in ("R", "r", "real"):
        return REAL
    if name in ("C", "c", "complex"):
        return COMPLEX
    if name.lower().startswith("q") or name.isdigit():
        try:
            return nonarch(int(name.lstrip("qQ_")))
        except ValueError as exc:
            raise UsageError(f"bad nonarchimedean field {name!r}: {exc}") from None
    raise UsageError(f"unknown field {name!r}; use R, C or a prime power q (e.g. 3 or Q3)")


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}") from None


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"expected a number, got {text!r}") from None


def _rational(text: str):
    try:
        return Fraction(text)
    except ValueError:
        return _complex(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_gamma(args, out: Output) -> int:
    from .gamma import gamma, gamma_generalized
    F = _field(args.field)
    s = _complex(args.s)
    if args.d is None:
        g = gamma(F, s, args.n)
        report = {"schema": SCHEMA, "field": F.to_json(), "s": s, "n": args.n,
                  "value": None if g.at_pole else g.value, "at_pole": g.at_pole}
    else:
        a = _rational(args.a)
        v = gamma_generalized(F, args.d, a, s, args.n)
        report = {"schema": SCHEMA, "field": F.to_json(), "s": s, "n": args.n, "d": args.d,
                  "a": a, "value": v, "at_pole": False}
    out.write(dumps(report))
    return 0


def identity_from_solution(field, n: Sequence[int], sol):
    """A MonomialIdentity from a solution of the divisor relation."""
    from .divisors import MonomialIdentity, ab_relation, derive_eta, strong_sense
    case = "Sum2" if sol.case == 1 else "Sum0"
    lams = sol.lambdas
    etas = derive_eta(lams, sol.gamma, n, [1] * len(n))
    return MonomialIdentity(field=field, exponents=tuple(n), lambdas=lams, etas=tuple(etas),
                            gamma=sol.gamma, case=case, a=Fraction(1),
                            b=ab_relation(n, [1] * len(n), case),
                            sense="strong" if strong_sense(lams, etas, n) else "weak")


def _with_constant(ident, gamma_v=None):
    from .gamma import identity_constant
    try:
        ident.C = identity_constant(ident, gamma_v=gamma_v)
    except GammaForgeError:
        ident.C = None
    return ident


def _emit_identities(idents, args, out: Output, extra: dict) -> int:
    if args.latex:
        lines = [r"\begin{align*}"]
        for ident in idents:
            tag = rf"\quad\text{{({ident.label})}}" if ident.label else ""
            lines.append(ident.to_latex().replace(" = ", " &= ", 1) + tag + r" \\")
        lines.append(r"\end{align*}")
        out.write("\n".join(lines))
    else:
        report = {"schema": SCHEMA, "count": len(idents),
                  "identities": [i.to_json() for i in idents]}
        report.update(extra)
        out.write(dumps(report))
    return 0


def cmd_identities_monomial(args, out: Output) -> int:
    from .divisors import solve_relation
    F = _field(args.field)
    n = _int_list(args.exponents)
    if not n:
        raise UsageError("--exponents needs at least one integer")
    idents = [_with_constant(identity_from_solution(F, n, sol)) for sol in solve_relation(F, n)]
    return _emit_identities(idents, args, out, {"exponents": n})


def cmd_identities_covering(args, out: Output) -> int:
    from .covering import cubic_label, enumerate_systems, to_identity
    F = _field(args.field)
    sizes = _int_list(args.type)
    if len(sizes) < 3 or sizes[-2:] != [1, 1]:
        raise UsageError("--type must list at least three coset sizes ending in 1,1")
    systems = enumerate_systems(args.n, sizes)
    idents = []
    for cs in systems:
        ident = _with_constant(to_identity(cs, F))
        if args.n == 3 and F.kind == "R" and len(sizes) == 3:
            src, dst = cubic_label(ident.lambdas), cubic_label(ident.etas)
            ident.label = f"G{src}->G{dst}"
            ident.variables = ("y", "x")
        else:
            ident.label = "cosets " + " ".join(
                "{" + ",".join(map(str, sorted(cs.coset(i)))) + "}" for i in range(len(cs.cosets)))
        idents.append(ident)
    if all(i.label.startswith("G") for i in idents):
        idents.sort(key=lambda i: i.label)
    return _emit_identities(idents, args, out, {"n": args.n, "type": sizes})


def cmd_identities_pvs(args, out: Output) -> int:
    from .pvs import builtin, gamma_pvs_char, pvs_identities, pvs_involution, qp
    V = builtin(args.space)
    idents = pvs_identities(V)
    for ident in idents:
        _with_constant(ident, gamma_v=[None, gamma_pvs_char(V)])
    pairs, fixed = pvs_involution(idents)
    extra = {"space": V.name, "b_roots": [str(r) for r in V.b_roots],
             "involution": [[list(map(str, k)), list(map(str, v))] for k, v in sorted(pairs.items())],
             "fixed_points": [list(map(str, k)) for k in fixed],
             "qp": [list(map(str, qp(i.lambdas))) for i in idents]}
    return _emit_identities(idents, args, out, extra)


def cmd_legendre_check(args, out: Output) -> int:
    from .polynomials import parse
    from .pvs import composition_check, mlt_verify
    f = parse(args.f)
    fs = parse(args.fstar)
    res = mlt_verify(f, fs, points=args.points, seed=args.seed)
    ok = bool(res.ok)
    report = {"schema": SCHEMA, "f": args.f, "fstar": args.fstar, "pass": ok,
              "scale": None if res.scale is None else str(res.scale), "seed": args.seed,
              "points": args.points}
    if ok:
        report["composition"] = bool(composition_check(f, fs, points=args.points, seed=args.seed + 1))
        ok = ok and report["composition"]
        report["pass"] = ok
    out.write(dumps(report))
    return 0 if ok else 1


def cmd_verify(args, out: Output) -> int:
    from .archimedean import verify_identity
    from .divisors import MonomialIdentity
    if not args.identity:
        raise UsageError("verify needs --identity FILE (or the 'cubic' / 'gauss' forms)")
    try:
        with open(args.identity) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read identity file: {exc}") from None
    if "identities" in obj:  # a report from `identities ...`
        idx = args.index
        if not 0 <= idx < len(obj["identities"]):
            raise UsageError(f"--index {idx} out of range (file has {len(obj['identities'])})")
        obj = obj["identities"][idx]
    ident = MonomialIdentity.from_json(obj)
    if args.field and _field(args.field) != ident.field:
        raise UsageError(f"--field {args.field} does not match the identity's field")
    C = None if args.fit or ident.C is None else ident.C
    b = Fraction(args.b) if args.b else None
    rep = verify_identity(ident, num_tests=args.tests, tol=args.tol, seed=args.seed, N=args.N,
                          C=C, b=b)
    report = rep.to_json()
    report["config"] = {"tests": args.tests, "tol": args.tol, "seed": args.seed, "N": args.N,
                        "b": None if b is None else str(b)}
    out.write(dumps(report))
    return 0 if rep.passed else 1


def cmd_verify_cubic(args, out: Output) -> int:
    from .padic import verify_cubic_identity
    rep = verify_cubic_identity(args.p, args.precision, trivial_char=args.trivial)
    report = rep.to_json()
    if not args.full:
        report.pop("tests")
        report.pop("direct")
        report.pop("dual")
        report.pop("ratios")
        report["num_tests"] = len(rep.tests)
    out.write(dumps(report))
    return 0 if rep.passed else 1


def cmd_verify_gauss(args, out: Output) -> int:
    from .archimedean import fresnel_epsilon, gauss_check
    F = _field(args.field)
    tol = args.tol if args.tol is not None else (1e-6 if F.kind == "R" else 1e-4)
    a = _rational(args.a)
    rep = gauss_check(F, a, num_tests=args.tests, tol=tol, seed=args.seed)
    oracle = fresnel_epsilon(F, complex(a))
    err = abs(rep.C - oracle)
    report = rep.to_json()
    report.update({"oracle": oracle, "oracle_error": err, "pass": rep.passed and err < tol})
    out.write(dumps(report))
    return 0 if report["pass"] else 1


def cmd_selftest(args, out: Output) -> int:
    from .battery import run_selftest
    results = run_selftest(quick=not args.full)
    report = {"schema": SCHEMA, "checks": results,
              "pass": all(r["pass"] for r in results)}
    out.write(dumps(report))
    return 0 if report["pass"] else 1


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gammaforge", description="Fourier transforms of "
                                 "elementary functions over local fields.")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-o", "--output", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="cmd")

    g = sub.add_parser("gamma", help="evaluate Gamma functions")
    gs = g.add_subparsers(dest="action")
    ge = gs.add_parser("eval")
    ge.add_argument("--field", default="R")
    ge.add_argument("--s", required=True)
    ge.add_argument("--n", type=int, default=0)
    ge.add_argument("--d", type=int)
    ge.add_argument("--a", default="1")
    ge.set_defaults(func=cmd_gamma)

    i = sub.add_parser("identities", help="synthesize identities")
    isub = i.add_subparsers(dest="kind")
    im = isub.add_parser("monomial")
    im.add_argument("--exponents", required=True)
    im.add_argument("--field", default="R")
    im.add_argument("--latex", action="store_true")
    im.set_defaults(func=cmd_identities_monomial)
    ic = isub.add_parser("covering")
    ic.add_argument("--n", type=int, required=True)
    ic.add_argument("--type", required=True)
    ic.add_argument("--field", default="R")
    ic.add_argument("--latex", action="store_true")
    ic.set_defaults(func=cmd_identities_covering)
    ip = isub.add_parser("pvs")
    ip.add_argument("--space", required=True)
    ip.add_argument("--latex", action="store_true")
    ip.set_defaults(func=cmd_identities_pvs)

    lg = sub.add_parser("legendre", help="multiplicative Legendre transform checks")
    lsub = lg.add_subparsers(dest="action")
    lc = lsub.add_parser("check")
    lc.add_argument("--f", required=True)
    lc.add_argument("--fstar", required=True)
    lc.add_argument("--points", type=int, default=20)
    lc.add_argument("--seed", type=int, default=0)
    lc.set_defaults(func=cmd_legendre_check)

    v = sub.add_parser("verify", help="numerical and p-adic verification")
    v.add_argument("--identity")
    v.add_argument("--index", type=int, default=0, help="identity index in a list report")
    v.add_argument("--tests", type=int, default=3)
    v.add_argument("--tol", type=float, default=1e-2)
    v.add_argument("--field")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--N", type=int, default=2)
    v.add_argument("--b", help="override the scale b on the transform side")
    v.add_argument("--fit", action="store_true", help="fit C instead of using the stored one")
    v.set_defaults(func=cmd_verify)
    vsub = v.add_subparsers(dest="kind")
    vc = vsub.add_parser("cubic")
    vc.add_argument("--p", type=int, default=2)
    vc.add_argument("--precision", type=int, default=3)
    vc.add_argument("--trivial", action="store_true", help="control run with the trivial character")
    vc.add_argument("--full", action="store_true", help="include every pairing in the report")
    vc.set_defaults(func=cmd_verify_cubic)
    vg = vsub.add_parser("gauss")
    vg.add_argument("--field", default="R")
    vg.add_argument("--a", default="1")
    vg.add_argument("--tests", type=int, default=3)
    vg.add_argument("--tol", type=float)
    vg.add_argument("--seed", type=int, default=0)
    vg.set_defaults(func=cmd_verify_gauss)

    st = sub.add_parser("selftest", help="run the invariant battery")
    st.add_argument("--full", action="store_true")
    st.set_defaults(func=cmd_selftest)
    return ap


def _glue_negative_lists(argv: List[str]) -> List[str]:
    """Let "--exponents -1,3" through: argparse would read -1,3 as an option."""
    out = []
    for tok in argv:
        if out and out[-1] in ("--exponents", "--type", "--s", "--a", "--b") \
                and tok[:1] == "-" and tok[1:2].isdigit():
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def _hoist_output(argv: List[str]) -> List[str]:
    """Accept -o/--output after the subcommand too: move it to the front."""
    rest, front = [], []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("-o", "--output") and i + 1 < len(argv):
            front += [tok, argv[i + 1]]
            i += 2
            continue
        if tok.startswith("--output="):
            front.append(tok)
        else:
            rest.append(tok)
        i += 1
    return front + rest


def run(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    argv = _hoist_output(_glue_negative_lists(list(sys.argv[1:] if argv is None else argv)))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if not hasattr(args, "func"):
        ap.print_usage(sys.stderr)
        return 2
    out = Output(args.output)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"gammaforge: error: {exc}", file=sys.stderr)
        return 2
    except GammaForgeError as exc:
        print(f"gammaforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Command line front end.

Exit codes: 0 success, 2 usage or parse error, 3 violated mathematical
precondition, 4 insufficient precision.
"""

import argparse
import json
import sys

from . import carlitz, eigencoeff, forms, hecke
from .errors import DGFormsError, ParseError
from .parsing import parse_rat
from .ring_core import THETA, PolyA, check_prime


def _add_common(parser, suppress=False):
    # global flags may come before or after the subcommand; the subcommand
    # copy uses SUPPRESS so it only overrides values actually given there
    def d(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument("--q", type=int, default=d(3), help="the prime q = p (default 3)")
    parser.add_argument("--prec", type=int, default=d(32), help="series precision: work modulo t^PREC (default 32)")
    parser.add_argument("--format", choices=("text", "json"), default=d("text"))
    parser.add_argument("--ascii", action="store_true", default=d(False), help="write θ as T in text output")
    parser.add_argument("--threads", type=int, default=d(1), help="accepted for compatibility; computation is sequential")


class _JoinMultiset(argparse.Action):
    # an unquoted {1,0} reaches us brace-expanded as two words: 1 0
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, ",".join(values) if len(values) > 1 else values[0])


def _multiset_arg(p, flag, required=True, help=None):
    p.add_argument(flag, nargs="+", action=_JoinMultiset, required=required, help=help or 'multiset such as "{2,1,0}"')


def build_parser():
    parent = argparse.ArgumentParser(add_help=False)
    _add_common(parent, suppress=True)
    parser = argparse.ArgumentParser(prog="dgforms", description="Drinfeld modular forms over F_q[θ]: expansions, Hecke operators, eigenform coefficients.")
    _add_common(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[parent], help="t-expansion of a form expression")
    p.add_argument("expr", help='e.g. "Delta", "h^2 g^2", "f_{22,4}"')

    p = sub.add_parser("hecke", parents=[parent], help="apply T_p for p = θ + c")
    p.add_argument("expr")
    p.add_argument("--prime", type=int, default=0, metavar="C", help="the prime θ + C (default 0)")
    p.add_argument("--k", type=int, help="weight (defaults to the expression's weight)")

    p = sub.add_parser("eigen-check", parents=[parent], help="test T_p f = λ f", epilog="--N takes one or more words, so give the expression before it.")
    p.add_argument("expr")
    p.add_argument("--prime", type=int, default=0, metavar="C")
    p.add_argument("--k", type=int)
    lam = p.add_mutually_exclusive_group(required=True)
    lam.add_argument("--eigen", help="eigenvalue as an element of A, e.g. θ^4")
    lam.add_argument("--N", nargs="+", action=_JoinMultiset, help="eigen exponents {N_1,...}: λ = θ^(1 + sum q^N_i)")

    p = sub.add_parser("eigencoeff", parents=[parent], help="closed-form coefficient a_(1+q^nu)")
    _multiset_arg(p, "--nu")
    _multiset_arg(p, "--N")
    p.add_argument("--base", default="1", help="the coefficient a_(1+l) (default 1)")

    p = sub.add_parser("vanish", parents=[parent], help="does a_(1+q^nu) vanish?")
    _multiset_arg(p, "--nu")
    _multiset_arg(p, "--N")

    p = sub.add_parser("universal", parents=[parent], help="symmetrized solution of the generic recurrence")
    _multiset_arg(p, "--nu")
    p.add_argument("--check", action="store_true", help="verify the recurrence and translation invariance")

    p = sub.add_parser("goss", parents=[parent], help="Goss polynomial G_n of the Carlitz lattice")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("search", parents=[parent], help="eigenforms among double-cuspidal forms")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    _multiset_arg(p, "--N")
    p.add_argument("--prime", type=int, default=0, metavar="C")
    return parser


class _Out:
    def __init__(self, args):
        self.json = args.format == "json"
        self.symbol = "T" if args.ascii else THETA

    def series(self, s):
        return s.to_json_obj() if self.json else s.format(self.symbol)

    def rat(self, c):
        return c.to_str("T") if self.json else c.to_str(self.symbol)


def _eigenvalue(args, q):
    if getattr(args, "eigen", None) is not None:
        lam = parse_rat(args.eigen, q)
        if not lam.is_integral():
            raise ParseError("eigenvalue must be a polynomial in θ")
        return lam
    N = eigencoeff.parse_multiset(args.N)
    return PolyA.monomial(q, 1 + sum(q**n for n in N))


def run(args):
    q = args.q
    check_prime(q)
    if args.prec < 2:
        raise ParseError("--prec must be at least 2")
    out = _Out(args)
    cmd = args.command

    if cmd == "expand":
        s = forms.eval_form_expr(forms.parse_form_expr(args.expr, q), args.prec)
        return out.series(s)

    if cmd == "hecke":
        f = forms.eval_form_expr(forms.parse_form_expr(args.expr, q), args.prec)
        k = args.k if args.k is not None else (f.weight if f.weight is not None else 0)
        Tf = hecke.hecke_apply(f, args.prime, k)
        if out.json:
            return Tf.to_json_obj()
        return f"{out.series(Tf)}\ncertified precision: {Tf.prec}"

    if cmd == "eigen-check":
        f = forms.eval_form_expr(forms.parse_form_expr(args.expr, q), args.prec)
        k = args.k if args.k is not None else f.weight
        rep = hecke.eigen_check(f, args.prime, k, _eigenvalue(args, q))
        if out.json:
            obj = {"ok": rep.ok, "prec": rep.prec}
            if not rep.ok:
                obj.update(exponent=rep.exponent, lhs=out.rat(rep.lhs), rhs=out.rat(rep.rhs))
            return obj
        if rep.ok:
            return f"true (certified precision {rep.prec})"
        return f"false at t^{rep.exponent}: T f has {out.rat(rep.lhs)}, λ f has {out.rat(rep.rhs)}"

    if cmd == "eigencoeff":
        nu = eigencoeff.parse_multiset(args.nu)
        N = eigencoeff.parse_multiset(args.N)
        c = eigencoeff.closed_form_coeff(nu, N, parse_rat(args.base, q), q)
        return {"index": eigencoeff.index_of(nu, q), "value": out.rat(c)} if out.json else out.rat(c)

    if cmd == "vanish":
        v = eigencoeff.vanishing_predicate(eigencoeff.parse_multiset(args.nu), eigencoeff.parse_multiset(args.N))
        return {"vanishes": v} if out.json else ("true" if v else "false")

    if cmd == "universal":
        nu = eigencoeff.parse_multiset(args.nu)
        b = eigencoeff.universal_solution(nu, q)
        result = {"poly": str(b)}
        text = [str(b)]
        if args.check:
            ok = eigencoeff.recurrence_check(lambda m: eigencoeff.universal_solution(m, q), nu, q)
            ok = ok and eigencoeff.translation_operator(b, 1).is_zero()
            result["check"] = "PASS" if ok else "FAIL"
            text.append(result["check"])
        return result if out.json else "\n".join(text)

    if cmd == "goss":
        G = carlitz.goss_poly(q, args.n)
        return G.to_json_obj() if out.json else G.format(out.symbol)

    if cmd == "search":
        basis = forms.double_cuspidal_basis(q, args.k, args.m, args.prec)
        found = forms.eigenform_search(basis, _eigenvalue(args, q), args.prime)
        if out.json:
            return [out.series(f) for f in found]
        return "\n".join(out.series(f) for f in found)

    raise ParseError(f"unknown command {cmd!r}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = run(args)
    except DGFormsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if isinstance(result, str):
        if result:
            print(result)
    else:
        print(json.dumps(result, ensure_ascii=False))
    return 0


if __name__ == "__main__":
    sys.exit(main())

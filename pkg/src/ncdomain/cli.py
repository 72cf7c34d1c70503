"""Command-line interface.

Exit codes: 0 for success (and affirmative answers), 1 for negative
mathematical answers (not in a domain, functions differ, evaluation
undefined), 2 for usage or syntax errors, 3 when a resource limit or an
inconclusive verdict stops the computation.

Matrix points are given either as a comma-separated list of rationals (a
scalar point, one per variable) or as JSON {"n": .., "g": .., "X": [[..]]}
with row-major string entries; an argument starting with @ is read from the
named file.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .domain import (
    NotInDomain,
    build_annihilating_point,
    contains,
    find_scalar_point,
    pencil_domain,
    scalar_pencil_det,
    shift_domain_inclusion_check,
    verify_annihilating_point,
    witness,
)
from .expr import (
    Add,
    Const,
    EvalUndefined,
    Expr,
    Inv,
    Mul,
    Neg,
    ParseError,
    Var,
    eval_expr,
    format_expr,
    max_var,
    parse,
)
from .linalg import (
    MatTuple,
    mat_tuple_from_json,
    mat_tuple_to_json,
    qmatrix_to_json,
    rat,
    rat_to_str,
    scalar_tuple,
)
from .realization import (
    NotRegularAtPoint,
    build,
    build_raw,
    equal,
    eval_realization,
    left_shift,
    realization_to_json,
    right_shift,
)
from .series import NotRegularAtZero, expand_series
from .symbolic import (
    DegenerateAtSizeN,
    NotFactored,
    SymbolicSizeLimit,
    ampliation_probe,
    direct_sum_factorization,
    edom_member,
    generic_eval,
    generic_var_names,
)

MAX_PRINTED_NODES = 200_000


class _NoBasePoint(Exception):
    """No scalar expansion point was found automatically."""


def _read_point(spec: str, g: int) -> MatTuple:
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            spec = fh.read()
    spec = spec.strip()
    if spec.startswith("{"):
        return mat_tuple_from_json(json.loads(spec))
    return scalar_tuple([rat(part.strip()) for part in spec.split(",")])


def _read_base(spec: str) -> tuple[Fraction, ...]:
    return tuple(rat(part.strip()) for part in spec.split(","))


def _realization_for(e: Expr, base_spec: str | None, g: int):
    if base_spec is not None:
        alpha = _read_base(base_spec)
        if len(alpha) < g:
            raise ParseError("base point has fewer coordinates than the expression uses")
        return build(e, alpha)
    alpha = find_scalar_point(e, g=g)
    if alpha is None:
        raise _NoBasePoint
    return build(e, alpha)


def _tree_size(e: Expr) -> int:
    """Size of e written out as a tree (shared subterms counted once per use)."""
    memo: dict[int, int] = {}

    def walk(node: Expr) -> int:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, (Const, Var)):
            size = 1
        elif isinstance(node, (Neg, Inv)):
            size = 1 + walk(node.operand)
        else:
            assert isinstance(node, (Add, Mul))
            size = 1 + walk(node.left) + walk(node.right)
        memo[key] = size
        return size

    return walk(e)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _g_for(e: Expr, point_spec: str | None = None) -> int:
    g = max(max_var(e), 1)
    if point_spec is not None and not point_spec.lstrip("@").strip().startswith("{"):
        # scalar CSV fixes the arity explicitly
        spec = point_spec
        if spec.startswith("@"):
            with open(spec[1:]) as fh:
                spec = fh.read()
        g = max(g, len(spec.split(",")))
    return g


#
# Subcommand handlers; each returns the process exit code.
#


def _cmd_parse(args) -> int:
    e = parse(args.expr)
    _emit({"expr": format_expr(e), "variables": max_var(e)})
    return 0


def _cmd_eval(args) -> int:
    e = parse(args.expr)
    g = _g_for(e, args.point)
    x = _read_point(args.point, g)
    if args.pencil:
        r = _realization_for(e, args.base, g)
        value = eval_realization(r, x)
    else:
        value = eval_expr(e, x)
    _emit({"value": qmatrix_to_json(value)})
    return 0


def _cmd_realize(args) -> int:
    e = parse(args.expr)
    g = max(max_var(e), 1)
    r = _realization_for(e, args.base, g)
    out = {"realization": realization_to_json(r)}
    if args.raw:
        out["raw_size"] = build_raw(e, r.base_point).d
    _emit(out)
    return 0


def _cmd_series(args) -> int:
    e = parse(args.expr)
    fs = expand_series(e, args.order)
    terms = [
        {"word": list(w), "coeff": rat_to_str(c)}
        for w, c in sorted(fs.coeffs.items(), key=lambda it: (len(it[0]), it[0]))
    ]
    _emit({"order": args.order, "terms": terms})
    return 0


def _cmd_shift(args) -> int:
    e = parse(args.expr)
    g = max(max_var(e), 1)
    if not 1 <= args.letter <= g:
        raise ParseError(f"letter must be in 1..{g}")
    r = _realization_for(e, args.base, g)
    shifted = left_shift(r, args.letter) if args.side == "left" else right_shift(r, args.letter)
    _emit({"side": args.side, "letter": args.letter, "realization": realization_to_json(shifted)})
    return 0


def _cmd_equal(args) -> int:
    v = equal(parse(args.lhs), parse(args.rhs))
    out = {"status": v.status}
    if v.base_point is not None:
        out["base_point"] = [rat_to_str(a) for a in v.base_point]
    if v.word is not None:
        out["word"] = list(v.word)
        out["lhs_coeff"] = rat_to_str(v.lhs_coeff)
        out["rhs_coeff"] = rat_to_str(v.rhs_coeff)
    _emit(out)
    if v.status == "equal":
        return 0
    return 1 if v.status == "unequal" else 3


def _cmd_domain(args) -> int:
    e = parse(args.expr)
    g = _g_for(e, args.point)
    x = _read_point(args.point, g)
    r = _realization_for(e, args.base, g)
    member = contains(pencil_domain(r), x)
    out = {"member": member}
    if args.det:
        names = [f"x{j}" for j in range(1, g + 1)]
        out["scalar_det"] = scalar_pencil_det(pencil_domain(r)).to_str(names)
    _emit(out)
    return 0 if member else 1


def _cmd_witness(args) -> int:
    e = parse(args.expr)
    g = _g_for(e, args.point)
    x = _read_point(args.point, g)
    r = _realization_for(e, args.base, g)
    w = witness(r, x)
    if _tree_size(w) > MAX_PRINTED_NODES:
        print("witness too large to print in expression form", file=sys.stderr)
        return 3
    _emit({"witness": format_expr(w), "value": qmatrix_to_json(eval_expr(w, x))})
    return 0


def _cmd_edom(args) -> int:
    e = parse(args.expr)
    g = _g_for(e, args.point)
    x = _read_point(args.point, g)
    member = edom_member(e, x)
    _emit({"member": member, "size": x.n})
    return 0 if member else 1


def _cmd_probe(args) -> int:
    e = parse(args.expr)
    g = _g_for(e, args.point)
    x = _read_point(args.point, g)
    levels = ampliation_probe(e, x, args.levels)
    _emit({"levels": levels})
    return 0 if all(levels) else 1


def _cmd_factor(args) -> int:
    e = parse(args.expr)
    g = max(max_var(e), 1)
    n1, n2 = (int(part) for part in args.sizes.split(","))
    ev = generic_eval(e, g, n1 + n2)
    p1, p2 = direct_sum_factorization(ev.denom_lcm, g, n1, n2)
    names = generic_var_names(g, n1 + n2)
    _emit(
        {
            "denominator": ev.denom_lcm.to_str(names),
            "first": p1.to_str(names),
            "second": p2.to_str(names),
        }
    )
    return 0


def _cmd_annihilate(args) -> int:
    f = parse(args.poly)
    cx = build_annihilating_point(f)
    verify_annihilating_point(cx)
    _emit(
        {
            "size": cx.n,
            "degree": cx.degree,
            "permutation": list(cx.permutation),
            "x": mat_tuple_to_json(cx.x),
        }
    )
    return 0


#
# Worked examples
#


def _demo_conjugation() -> int:
    text = "(1 - x1)*x2*(1 - x1)^-1"
    e = parse(text)
    r = build(e, (0, 0))
    raw = build_raw(e, (0, 0))
    print(f"expression: {text}")
    print(f"compositional realization size {raw.d}, minimal size {r.d}")
    det = scalar_pencil_det(pencil_domain(r))
    print(f"scalar pencil determinant: {det.to_str(['x1', 'x2'])}")
    print("so the pencil is invertible exactly where I - X1 is")
    fs = expand_series(e, 3)
    terms = sorted(fs.coeffs.items(), key=lambda it: (len(it[0]), it[0]))
    shown = ", ".join(
        f"{rat_to_str(c)}*x{'*x'.join(str(l) for l in w)}" for w, c in terms
    )
    print(f"series through degree 3: {shown}")
    for j in (1, 2):
        print(f"left shift by letter {j}: minimal size {left_shift(r, j).d}")
    levels = ampliation_probe(e, scalar_tuple([1, 1]), 2)
    print(f"1x1 point (1, 1) under ampliation, sizes 1..2: {levels}")
    print("the 1x1 level is defined (the scalar denominators cancel), the")
    print("doubled point is not -- membership is not stable under ampliation")
    return 0


def _demo_schur() -> int:
    text = "(x4 - x3*x1^-1*x2)^-1"
    base = (1, 0, 0, 1)
    e = parse(text)
    r = build(e, base)
    print(f"expression: {text} about {base}")
    print(f"minimal realization size {r.d}")
    det = scalar_pencil_det(pencil_domain(r))
    print(f"scalar pencil determinant: {det.to_str(['x1', 'x2', 'x3', 'x4'])}")
    x = scalar_tuple([0, 1, 1, 0])
    try:
        eval_expr(e, x)
        raise AssertionError("unreachable")
    except EvalUndefined:
        print("at (0, 1, 1, 0) the written form is undefined: x1 is not invertible")
    print(f"but the pencil is invertible there; realization value: "
          f"{rat_to_str(eval_realization(r, x)[0, 0])}")
    w = witness(r, x)
    print(f"witness (a representative defined at the point):\n  {format_expr(w)}")
    print(f"witness value there: {rat_to_str(eval_expr(w, x)[0, 0])}")
    print(f"witness represents the same function: {equal(w, e).status}")
    return 0


def _demo_shift_domains() -> int:
    text = "x2*(1 - x1*x2)^-1"
    e = parse(text)
    r = build(e, (0, 0))
    print(f"expression: {text}")
    names = ["x1", "x2"]
    print(f"minimal size {r.d}, scalar pencil determinant "
          f"{scalar_pencil_det(pencil_domain(r)).to_str(names)}")
    for side, shifter in (("left", left_shift), ("right", right_shift)):
        for j in (1, 2):
            s = shifter(r, j)
            det = scalar_pencil_det(pencil_domain(s))
            print(f"{side} shift by {j}: size {s.d}, determinant {det.to_str(names)}")
    pts = [scalar_tuple([0, 0]), scalar_tuple([2, -1]), scalar_tuple([1, 1])]
    checked = shift_domain_inclusion_check(r, pts)
    print(f"inclusion of the domain in every shift domain checked on {checked} points")
    return 0


def _cmd_demo(args) -> int:
    return {
        "conjugation": _demo_conjugation,
        "schur-inverse": _demo_schur,
        "shift-domains": _demo_shift_domains,
    }[args.name]()


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ncdomain",
        description="Noncommutative rational expressions, realizations, and their domains.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def base_opt(p):
        p.add_argument("--base", help="scalar expansion point a1,a2,... (found automatically if omitted)")

    p = sub.add_parser("parse", help="echo an expression in canonical form")
    p.add_argument("expr")
    p.set_defaults(fn=_cmd_parse)

    p = sub.add_parser("eval", help="evaluate at a point")
    p.add_argument("expr")
    p.add_argument("--point", required=True)
    p.add_argument("--pencil", action="store_true",
                   help="evaluate through the minimal realization instead of the parse tree")
    base_opt(p)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("realize", help="minimal realization about a scalar point")
    p.add_argument("expr")
    p.add_argument("--raw", action="store_true", help="also report the unminimized size")
    base_opt(p)
    p.set_defaults(fn=_cmd_realize)

    p = sub.add_parser("series", help="expansion about the origin")
    p.add_argument("expr")
    p.add_argument("--order", type=int, default=4)
    p.set_defaults(fn=_cmd_series)

    p = sub.add_parser("shift", help="one-letter shift of the minimal realization")
    p.add_argument("expr")
    p.add_argument("--side", choices=["left", "right"], required=True)
    p.add_argument("--letter", type=int, required=True)
    base_opt(p)
    p.set_defaults(fn=_cmd_shift)

    p = sub.add_parser("equal", help="do two expressions represent the same function?")
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.set_defaults(fn=_cmd_equal)

    p = sub.add_parser("domain", help="pencil-domain membership at a point")
    p.add_argument("expr")
    p.add_argument("--point", required=True)
    p.add_argument("--det", action="store_true", help="also print the scalar pencil determinant")
    base_opt(p)
    p.set_defaults(fn=_cmd_domain)

    p = sub.add_parser("witness", help="representative expression defined at a domain point")
    p.add_argument("expr")
    p.add_argument("--point", required=True)
    base_opt(p)
    p.set_defaults(fn=_cmd_witness)

    p = sub.add_parser("edom", help="extended-domain membership via generic matrices")
    p.add_argument("expr")
    p.add_argument("--point", required=True)
    p.set_defaults(fn=_cmd_edom)

    p = sub.add_parser("probe", help="membership of ampliations of a point, sizes 1..K")
    p.add_argument("expr")
    p.add_argument("--point", required=True)
    p.add_argument("--levels", type=int, default=2)
    p.set_defaults(fn=_cmd_probe)

    p = sub.add_parser("factor", help="split the generic denominator at block-diagonal points")
    p.add_argument("expr")
    p.add_argument("--sizes", required=True, help="block sizes n1,n2")
    p.set_defaults(fn=_cmd_factor)

    p = sub.add_parser("annihilate",
                       help="matrix point in the 2x2 block-determinant domain killing a polynomial")
    p.add_argument("poly")
    p.set_defaults(fn=_cmd_annihilate)

    p = sub.add_parser("demo", help="worked examples")
    p.add_argument("name", choices=["conjugation", "schur-inverse", "shift-domains"])
    p.set_defaults(fn=_cmd_demo)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ParseError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (FileNotFoundError, KeyError, TypeError) as err:
        print(f"error: bad input: {err}", file=sys.stderr)
        return 2
    except _NoBasePoint:
        print("error: no scalar expansion point found; pass --base", file=sys.stderr)
        return 1
    except NotRegularAtPoint as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (EvalUndefined, NotInDomain, NotFactored, DegenerateAtSizeN, NotRegularAtZero) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except SymbolicSizeLimit as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

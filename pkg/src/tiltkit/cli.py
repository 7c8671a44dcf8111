"""Command-line entry point.

Exit status: 0 holds/success, 1 fails-with-witness (and rejected inputs that
come with a witness, such as incompatible sequences), 2 usage or parse errors,
3 enumeration cap or insufficient depth, 4 inconclusive at the search bound.
"""

from __future__ import annotations

import argparse
import json
import sys

from tiltkit import errors as E
from tiltkit.acceptance import run_suite
from tiltkit.arith import ring_make
from tiltkit.closure import (
    DEFAULT_DEGREE_BOUND,
    DEFAULT_POWER_BOUND,
    complete_integral_closure_monoid,
    is_almost_integral,
    is_integral,
    is_p_root_closed,
    is_semiperfect,
    mt1_conclusion_check,
    mt1_mixed_check,
    mt2_hypotheses_audit,
    parse_monomial_ring,
)
from tiltkit.demos import DEMOS, demo
from tiltkit.report import FAILS, HOLDS, INCONCLUSIVE, CheckReport
from tiltkit.tilt import (
    TiltElem,
    sharp,
    tilt_add,
    tilt_frobenius,
    tilt_frobenius_inv,
    tilt_lift,
    tilt_mul,
)
from tiltkit.valuation import (
    krull_grid,
    model,
    val_cic,
    val_completion_check,
    val_height_one_exists,
)
from tiltkit.witt import WittCtx, sharp_equals_teichmuller, teichmuller

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
_VERDICT_EXIT = {HOLDS: EXIT_OK, FAILS: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise E.ParseError(f"{self.prog}: {message}")


def _split_seq(text: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [s.strip() for s in out]


def _read_tilt(ring: str | None, seq: str) -> TiltElem:
    s = seq.strip()
    if s.startswith("{"):
        try:
            obj = json.loads(s)
        except json.JSONDecodeError as exc:
            raise E.ParseError(f"bad JSON tilt element: {exc}") from None
        if ring is not None and ring_make(ring) != ring_make(obj.get("ctx", "")):
            raise E.CtxMismatch("--ring disagrees with the ctx of the JSON element")
        return TiltElem.from_json(obj)
    if ring is None:
        raise E.ParseError("--ring is required for a comma-separated --seq")
    ctx = ring_make(ring)
    if s.startswith("["):
        try:
            items = json.loads(s)
        except json.JSONDecodeError as exc:
            raise E.ParseError(f"bad JSON sequence: {exc}") from None
        from tiltkit.arith import elem_from_json

        return tilt_lift(ctx, [elem_from_json(a, ctx) for a in items])
    return tilt_lift(ctx, [ctx.parse(a) for a in _split_seq(s)])


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _emit_report(args, rep: CheckReport) -> int:
    text = rep.summary()
    if rep.details:
        text += "\n" + "\n".join(f"  {k}: {v}" for k, v in rep.details.items())
    _emit(args, rep.to_json(), text)
    return _VERDICT_EXIT[rep.verdict]


# -- verbs -------------------------------------------------------------------------------------


def _cmd_tilt(args) -> int:
    op = args.op
    if op in ("add", "mul"):
        if len(args.seq or []) != 2:
            raise E.ParseError(f"tilt {op} needs exactly two --seq values")
        x, y = (_read_tilt(args.ring, s) for s in args.seq)
        r = tilt_add(x, y, args.bound) if op == "add" else tilt_mul(x, y)
    else:
        if len(args.seq or []) != 1:
            raise E.ParseError(f"tilt {op} needs exactly one --seq value")
        x = _read_tilt(args.ring, args.seq[0])
        if op == "sharp":
            return _cmd_sharp_value(args, x)
        r = {"lift": lambda v: v, "frob": tilt_frobenius, "frobinv": tilt_frobenius_inv}[op](x)
    _emit(args, r.to_json(), str(r))
    return EXIT_OK


def _cmd_sharp_value(args, x: TiltElem) -> int:
    value, prec = sharp(x)
    _emit(args, {"value": value.to_json(), "text": str(value), "prec": prec, "ctx": x.ctx.descriptor},
          str(value))
    return EXIT_OK


def _cmd_sharp(args) -> int:
    if len(args.seq or []) != 1:
        raise E.ParseError("sharp needs exactly one --seq value")
    return _cmd_sharp_value(args, _read_tilt(args.ring, args.seq[0]))


def _cmd_teich(args) -> int:
    W = WittCtx(args.q, args.M)
    if args.a is None:
        return _emit_report(args, sharp_equals_teichmuller(W))
    w = teichmuller(args.a, W)
    _emit(args, {"q": args.q, "M": args.M, "a": args.a, "teichmuller": w.to_json(), "text": str(w),
                 "realization": W.realization.descriptor, "modulus": list(W.modulus)}, str(w))
    return EXIT_OK


def _is_chain_ring(desc: str) -> bool:
    return desc.lstrip().startswith("Zp")


def _cmd_check(args) -> int:
    kind = args.kind
    if args.ring is None:
        raise E.ParseError("check needs --ring")
    if kind == "semiperfect":
        return _emit_report(args, is_semiperfect(ring_make(args.ring)))
    if kind == "mt2":
        ctx = ring_make(args.ring)
        varpi = ctx.parse(args.uniformizer or ("x" if ctx.kind == "KummerQuot" else "p"))
        return _emit_report(args, mt2_hypotheses_audit(ctx, varpi))
    if kind == "mt1" and _is_chain_ring(args.ring):
        ctx = ring_make(args.ring)
        varpi = ctx.parse(args.uniformizer or ("x" if ctx.kind == "KummerQuot" else "p"))
        return _emit_report(args, mt1_mixed_check(ctx, varpi))
    A = parse_monomial_ring(args.ring, args.uniformizer)
    if kind == "almost-integral":
        return _emit_report(args, is_almost_integral(_need_elem(args), A, args.bound or DEFAULT_POWER_BOUND))
    if kind == "integral":
        return _emit_report(args, is_integral(_need_elem(args), A, args.bound or DEFAULT_DEGREE_BOUND))
    if kind == "proot":
        return _emit_report(args, is_p_root_closed(A))
    if kind == "mt1":
        return _emit_report(args, mt1_conclusion_check(A))
    _, rep = complete_integral_closure_monoid(A)
    return _emit_report(args, rep)


def _need_elem(args) -> str:
    if args.elem is None:
        raise E.ParseError(f"check {args.kind} needs --elem")
    return args.elem


def _cmd_krull(args) -> int:
    if args.mode == "grid":
        return _emit_report(args, krull_grid(args.bound if args.bound is not None else 20))
    m = model(args.rank)
    S, rep = val_cic(m, args.bound if args.bound is not None else 20)
    h = val_height_one_exists(m)
    rep.details["height_one"] = h.details
    return _emit_report(args, rep)


def _cmd_completion(args) -> int:
    return _emit_report(args, val_completion_check(args.p, args.M))


def _cmd_demo(args) -> int:
    lines, data = demo(args.name)
    _emit(args, {"demo": args.name, "data": data}, "\n".join(lines))
    return EXIT_OK


def _cmd_suite(args) -> int:
    res = run_suite(args.seed)
    text = "\n".join(f"[{'PASS' if r['passed'] else 'FAIL'}] {r['id']:>2}. {r['title']}" for r in res["criteria"])
    _emit(args, res, text)
    return EXIT_OK if res["passed"] else EXIT_FAIL


# -- parser ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    ap = _Parser(prog="tiltkit", description="Tilts, sharp maps and closure checks on finite ring models.")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    t = sub.add_parser("tilt", parents=[common], help="tilt arithmetic")
    t.add_argument("op", choices=["lift", "sharp", "add", "mul", "frob", "frobinv"])
    t.add_argument("--ring")
    t.add_argument("--seq", action="append", help="comma-separated a_0,...,a_D or a JSON tilt element")
    t.add_argument("--bound", type=int, help="target precision for add")
    t.set_defaults(func=_cmd_tilt)

    s = sub.add_parser("sharp", parents=[common], help="sharp of a compatible sequence")
    s.add_argument("--ring")
    s.add_argument("--seq", action="append")
    s.set_defaults(func=_cmd_sharp)

    te = sub.add_parser("teich", parents=[common], help="Teichmuller lift in W_M(F_q)")
    te.add_argument("--q", type=int, required=True)
    te.add_argument("--M", type=int, required=True)
    te.add_argument("--a", help="element of F_q; omit to compare sharp and omega on all of F_q")
    te.set_defaults(func=_cmd_teich)

    c = sub.add_parser("check", parents=[common], help="closure predicates and audits")
    c.add_argument("kind", choices=["almost-integral", "integral", "proot", "semiperfect", "mt1", "mt2", "closure"])
    c.add_argument("--ring")
    c.add_argument("--elem")
    c.add_argument("--uniformizer")
    c.add_argument("--bound", type=int)
    c.set_defaults(func=_cmd_check)

    k = sub.add_parser("krull", parents=[common], help="value-group models")
    k.add_argument("mode", nargs="?", choices=["grid"])
    k.add_argument("--rank", type=int, choices=[1, 2], default=2)
    k.add_argument("--bound", type=int)
    k.set_defaults(func=_cmd_krull)

    co = sub.add_parser("completion", parents=[common], help="completion check on Z/p^M")
    co.add_argument("--p", type=int, required=True)
    co.add_argument("--M", type=int, required=True)
    co.set_defaults(func=_cmd_completion)

    d = sub.add_parser("demo", parents=[common], help="narrated walkthroughs")
    d.add_argument("name", help=f"one of: {', '.join(DEMOS)}")
    d.set_defaults(func=_cmd_demo)

    su = sub.add_parser("suite", parents=[common], help="acceptance suite")
    su.add_argument("--seed", type=int, default=42)
    su.set_defaults(func=_cmd_suite)
    return ap


_FAIL_ERRORS = (E.Incompatible, E.NotCauchy, E.NotInImage, E.HypothesisFail, E.NoPreimage)
_CAP_ERRORS = (E.TooLarge, E.InsufficientDepth)


def run(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
    except E.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _CAP_ERRORS as exc:
        extra = f" (max achievable: {exc.max_achievable})" if isinstance(exc, E.InsufficientDepth) else ""
        print(f"error: {type(exc).__name__}: {exc}{extra}", file=sys.stderr)
        return EXIT_CAP
    except _FAIL_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except E.TiltkitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

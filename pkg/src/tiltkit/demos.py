"""Curated walkthroughs printed by ``tiltkit demo <name>``.

Each demo returns ``(lines, data)``: narration for humans and a JSON-ready
dict carrying the same values with their precision certificates.
"""

from __future__ import annotations

from typing import Callable

from tiltkit.arith import kummer, zmod
from tiltkit.closure import mt2_hypotheses_audit
from tiltkit.errors import UnknownDemo
from tiltkit.tilt import limit_pth_powers, sharp, tilt_add, tilt_core, tilt_lift, tilt_one
from tiltkit.valuation import krull_grid, model, val_almost_integral, val_cic
from tiltkit.witt import WittCtx, sharp_of_residue, teichmuller


def demo_monoid_lemma() -> tuple[list[str], dict]:
    z = zmod(5, 2)
    one = tilt_one(z, 1)
    lines = [f"ring {z.descriptor}; 1 in the tilt at depth 1: {one}"]
    steps = []
    for m in range(2):
        approx = [z.from_int(2)] * (m + 1)
        value, prec = limit_pth_powers(z, approx)
        steps.append({"m": m, "approximant": f"(1+1)^(5^{m})", "value": str(value), "certified_mod": f"5^{prec}"})
        lines.append(f"  m={m}: (1+1)^(5^{m}) = {value}  (certified mod 5^{prec})")
    total = tilt_add(one, one)
    s, prec = sharp(total)
    lines.append(f"1 + 1 in the tilt: {total}; sharp = {s} mod 5^{prec}")
    lines.append(f"sharp(1) + sharp(1) = 2, so sharp is not additive ({s} != 2)")
    w = kummer(3, 2, 4)
    x = w.gen()
    vb = tilt_lift(w, [w.from_int(3), x**3, x])
    sv, sp = sharp(vb)
    lines.append(f"in {w.descriptor}: (3, x^3, x) is compatible; sharp = {sv} mod 3^{sp}")
    return lines, {"steps": steps, "sum": total.to_json(), "sharp_of_sum": str(s), "prec": prec,
                   "varpi_flat": vb.to_json(), "sharp_varpi_flat": str(sv), "sharp_varpi_flat_prec": sp}


def demo_teichmuller() -> tuple[list[str], dict]:
    W = WittCtx(5, 2)
    y = W.realization.from_int(2)
    lines = [f"omega(2) in {W.realization.descriptor} by iterating y -> y^5"]
    its = [str(y)]
    while True:
        nxt = y**5
        lines.append(f"  {y}^5 = {nxt}")
        its.append(str(nxt))
        if nxt == y:
            break
        y = nxt
    rows = []
    for a in range(5):
        s = sharp_of_residue(a, W)
        t = teichmuller(a, W)
        rows.append({"a": a, "sharp": str(s), "teichmuller": str(t)})
        lines.append(f"  a={a}: sharp of (.., a^(1/5), a) = {s}, omega(a) = {t}")
    return lines, {"iterates": its, "table": rows, "modulus": list(W.modulus)}


def demo_minus_one() -> tuple[list[str], dict]:
    lines = []
    rows = []
    for M in range(2, 7):
        ctx = zmod(2, M)
        m = 2**M
        image = sorted({sharp(x).value.coeffs[0] for x in tilt_core(ctx)})
        roots = [t for t in range(m) if t * t % m == 1]
        rows.append({"M": M, "image": image, "roots": roots, "minus_one": m - 1})
        lines.append(f"Z/2^{M}: sharp image {image}; roots of t^2 = 1: {roots}; -1 = {m - 1} "
                     f"{'in' if m - 1 in image else 'not in'} the image")
    return lines, {"rows": rows}


def demo_krull_rank2() -> tuple[list[str], dict]:
    m = model(2)
    S, rep = val_cic(m)
    g = krull_grid(20)
    lines = [f"value group Z^2 with lex order, t has value {m.group.fmt(m.t_val)}"]
    for xi in ((0, -3), (1, -100), (-1, 5)):
        r = val_almost_integral(xi, m)
        lines.append(f"  xi={xi}: {r.verdict}" + (f", c = {r.details['c']}" if r.holds else f", witness {r.witness}"))
    sizes = g.details["sizes"]
    lines.append(f"ring {{xi >= 0}}: {sizes['ring']} grid points")
    lines.append(f"closure {S.description}: {sizes['closure']} grid points")
    lines.append(f"group: {sizes['group']} grid points; strict nesting {g.details['strict_nesting']}")
    return lines, {"closure": S.description, "grid": g.details, "cic": rep.to_json()}


def demo_mt2_audit() -> tuple[list[str], dict]:
    out = {}
    lines = []
    for ctx, varpi in ((kummer(3, 2, 4), "x"), (zmod(3, 4), "3")):
        rep = mt2_hypotheses_audit(ctx, ctx.parse(varpi))
        out[ctx.descriptor] = rep.to_json()
        lines.append(f"{ctx.descriptor}, varpi = {varpi}: {rep.verdict}")
        for name, h in rep.details["hypotheses"].items():
            lines.append(f"  {name}: {h}")
    return lines, out


DEMOS: dict[str, Callable[[], tuple[list[str], dict]]] = {
    "monoid-lemma": demo_monoid_lemma,
    "teichmuller": demo_teichmuller,
    "minus-one": demo_minus_one,
    "krull-rank2": demo_krull_rank2,
    "mt2-audit": demo_mt2_audit,
}


def demo(name: str) -> tuple[list[str], dict]:
    try:
        return DEMOS[name]()
    except KeyError:
        raise UnknownDemo(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}") from None

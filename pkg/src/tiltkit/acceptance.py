"""The acceptance suite: eleven criteria, each a deterministic function of a seed.

Every criterion returns a JSON-ready dict ``{"id", "title", "passed", "details"}``.
No timings go into the output so that identical seeds give identical bytes.
"""

from __future__ import annotations

import json
import random
from typing import Callable

from tiltkit.arith import (
    congruent,
    finite_field,
    kummer,
    lift,
    perf_series,
    prime_power,
    pval,
    random_elem,
    residue,
    residue_ctx,
    unramified,
    zmod,
)
from tiltkit.closure import (
    MonomialRing,
    complete_integral_closure_monoid,
    ideal_transfer_check,
    is_almost_integral,
    is_p_root_closed,
    mt1_conclusion_check,
    mt1_mixed_check,
    mt2_hypotheses_audit,
    parse_monomial_ring,
    random_transfer_instance,
)
from tiltkit.tilt import (
    TiltElem,
    limit_pth_powers,
    random_tilt,
    sharp,
    tilt_add,
    tilt_core,
    tilt_from_residues,
    tilt_frobenius,
    tilt_frobenius_inv,
    tilt_mul,
    tilt_one,
    tilt_pow,
    tilt_residues,
    tilt_zero,
)
from tiltkit.valuation import krull_grid, model, val_cic
from tiltkit.witt import (
    WittCtx,
    primes_up_to,
    sharp_equals_teichmuller,
    sharp_image,
    teichmuller,
    unique_p_root_in_sharp_image,
    zmod_unique_roots,
)

CASES = 1000


def _rng(seed: int, cid: int) -> random.Random:
    return random.Random(seed * 1009 + cid)


def _result(cid: int, title: str, passed: bool, **details) -> dict:
    return {"id": cid, "title": title, "passed": bool(passed), "details": details}


# 1 -------------------------------------------------------------------------------------------


def _tight_gain(p: int, M: int) -> list[int]:
    """v_p((1+p)^(p^L) - 1) for L < M - 1: the agreement of two limits after L steps."""
    ctx = zmod(p, M)
    out = []
    for L in range(M - 1):
        approx = [ctx.one()] * L + [ctx.from_int(1 + p)]
        value, _ = limit_pth_powers(ctx, approx)
        out.append(pval(value - ctx.one()))
    return out


def criterion_1(seed: int) -> dict:
    rng = _rng(seed, 1)
    ctxs = [zmod(p, M) for p in (2, 3, 5) for M in range(1, 7)]
    ctxs += [unramified(q, M) for q in (4, 8, 9, 25) for M in range(1, 7)]
    failures = []
    limits = 0
    for case in range(CASES):
        ctx = rng.choice(ctxs)
        p, M = ctx.p, ctx.M
        D = rng.randint(0, M)
        rctx = residue_ctx(ctx)
        top = random_elem(rctx, rng)
        res = [top ** (p ** (D - n)) for n in range(D + 1)]
        canon = tilt_from_residues(ctx, res)
        comps = []
        for n in range(D + 1):
            # arbitrary lifts of the residues a_n, a_{n+1}, ...
            approx = [lift(res[n + k], ctx) + random_elem(ctx, rng) * p for k in range(D - n + 1)]
            certs = []
            for L in range(len(approx)):
                value, prec = limit_pth_powers(ctx, approx[: L + 1])
                limits += 1
                certs.append(prec)
                if prec != min(L + 1, M) or not congruent(value, canon.seq[n], prec):
                    failures.append({"case": case, "ring": ctx.descriptor, "n": n, "L": L})
            steps = [b - a for a, b in zip(certs, certs[1:])]
            if any(s != (1 if c < M else 0) for s, c in zip(steps, certs)):
                failures.append({"case": case, "ring": ctx.descriptor, "n": n, "certificates": certs})
            comps.append(value)
        back = tilt_residues(TiltElem(ctx, tuple(comps), min(1, M)))
        if list(back) != res:
            failures.append({"case": case, "ring": ctx.descriptor, "projection": "mismatch"})
    tight = {str(p): _tight_gain(p, 6) for p in (2, 3, 5)}
    tight_ok = all(v == list(range(1, 6)) for p, v in tight.items() if p != "2")
    return _result(1, "limit round trip and one power of p per refinement step",
                   not failures and tight_ok, cases=CASES, limits_computed=limits,
                   failures=failures[:5], failure_count=len(failures),
                   one_plus_p_agreement=tight)


# 2 -------------------------------------------------------------------------------------------


def criterion_2(seed: int) -> dict:
    rng = _rng(seed, 2)
    ctxs = [zmod(p, M) for p in (2, 3, 5) for M in range(2, 7)]
    ctxs += [unramified(q, M) for q in (4, 9) for M in (2, 3)]
    ctxs += [kummer(2, 1, 3), kummer(3, 1, 2), kummer(3, 2, 4)]
    failures = 0
    for _ in range(CASES):
        ctx = rng.choice(ctxs)
        D = rng.randint(0, ctx.M)
        x, y = random_tilt(ctx, D, rng), random_tilt(ctx, D, rng)
        sxy, r = sharp(tilt_mul(x, y))
        (sx, rx), (sy, ry) = sharp(x), sharp(y)
        if not congruent(sxy, sx * sy, min(r, rx, ry)):
            failures += 1
    z = zmod(5, 2)
    one = tilt_one(z, 1)
    total = tilt_add(one, one)
    s_sum, prec = sharp(total)
    s_one = sharp(one).value
    units_ok = sharp(one).value == z.one() and sharp(tilt_zero(z, 1)).value == z.zero()
    witness_ok = s_sum == z.from_int(7) and s_one + s_one == z.from_int(2) and prec == 2
    return _result(2, "sharp is multiplicative and not additive", failures == 0 and witness_ok and units_ok,
                   pairs=CASES, failures=failures, sharp_of_sum=str(s_sum), sum_of_sharps=str(s_one + s_one),
                   certified_precision=prec)


# 3 -------------------------------------------------------------------------------------------


def criterion_3(seed: int) -> dict:
    qs = [q for q in range(2, 82) if prime_power(q) is not None]
    bad = []
    for q in qs:
        for M in range(1, 7):
            rep = sharp_equals_teichmuller(WittCtx(q, M))
            if not rep.holds:
                bad.append({"q": q, "M": M, "witness": rep.witness})
    # oracle: iterate x -> x^5 mod 25 from 2 with plain integers
    y = 2
    for _ in range(3):
        y = pow(y, 5, 25)
    omega2 = teichmuller(2, WittCtx(5, 2))
    return _result(3, "sharp equals the Teichmuller lift for q <= 81, M <= 6",
                   not bad and omega2.coeffs[0] == y == 7, pairs_checked=len(qs) * 6,
                   mismatches=bad[:5], omega_2_mod_25=omega2.coeffs[0], oracle=y)


# 4 -------------------------------------------------------------------------------------------


def criterion_4(seed: int) -> dict:
    rows = []
    ok = True
    for M in range(2, 7):
        ctx = zmod(2, M)
        m = 2**M
        roots = [t for t in range(m) if t * t % m == 1]
        image = sorted({sharp(x).value.coeffs[0] for x in tilt_core(ctx)})
        image_roots = [t for t in roots if t in image]
        rep = unique_p_root_in_sharp_image(1, WittCtx(2, M))
        good = (len(roots) >= 2 and image == [0, 1] and image_roots == [1] and (m - 1) not in image
                and [r.coeffs[0] for r in rep.image_roots] == [1])
        ok = ok and good
        rows.append({"M": M, "roots_of_t^2=1": roots, "sharp_image": image, "roots_in_image": image_roots,
                     "minus_one_in_image": (m - 1) in image})
    return _result(4, "t^2 = 1 over Z/2^M: several roots, one in the sharp image", ok, rows=rows)


# 5 -------------------------------------------------------------------------------------------

BOUND_5 = 10**5


def criterion_5(seed: int) -> dict:
    checked = 0
    elements = 0
    bad = []
    for p in primes_up_to(BOUND_5):
        M = 1
        while p**M <= BOUND_5:
            r = zmod_unique_roots(p, M)
            checked += 1
            elements += r["image_size"]
            if not r["ok"]:
                bad.append(r)
            M += 1
    # unramified rings with non-prime residue field, q <= 81 and M <= 3
    wbad = []
    wchecked = 0
    for q in range(4, 82):
        pp = prime_power(q)
        if pp is None or pp[1] == 1:
            continue
        for M in (1, 2, 3):
            W = WittCtx(q, M)
            image = sharp_image(W)
            powers = [t**W.p for t in image]
            wchecked += 1
            if any(powers.count(a) != 1 for a in image):
                wbad.append({"q": q, "M": M})
    return _result(5, "unique p-th root inside the sharp image", not bad and not wbad,
                   zmod_rings=checked, image_elements=elements, failures=bad[:5],
                   unramified_rings=wchecked, unramified_failures=wbad)


# 6 -------------------------------------------------------------------------------------------


def _enumerable_ctxs():
    return [zmod(2, 3), zmod(3, 3), zmod(5, 2), unramified(4, 2), unramified(9, 2), kummer(2, 1, 2),
            kummer(3, 1, 2), finite_field(9), perf_series(2, 1, 3), perf_series(3, 1, 2), perf_series(2, 0, 3)]


_DOMAIN_KINDS = ("ZmodPM", "Unramified", "KummerQuot", "FiniteField")


def criterion_6(seed: int) -> dict:
    rng = _rng(seed, 6)
    ctxs = [zmod(p, M) for p in (2, 3, 5) for M in range(1, 6)] + [unramified(9, 3), kummer(3, 1, 3),
                                                                 perf_series(2, 2, 3), perf_series(3, 1, 4)]
    bad_roundtrip = 0
    for _ in range(CASES):
        ctx = rng.choice(ctxs)
        x = random_tilt(ctx, rng.randint(1, 5), rng)
        trunc = x.truncate(x.depth - 1)
        if tilt_frobenius_inv(tilt_frobenius(x)) != trunc or tilt_frobenius(tilt_frobenius_inv(x)) != trunc:
            bad_roundtrip += 1
    nilpotents, zero_divisors, sizes = [], [], {}
    for ctx in _enumerable_ctxs():
        core = tilt_core(ctx)
        sizes[ctx.descriptor] = len(core)
        nonzero = [x for x in core if not x.is_zero()]
        for x in nonzero:
            if any(tilt_pow(x, ctx.p**k).is_zero() for k in range(1, 4)):
                nilpotents.append({"ring": ctx.descriptor, "x": x.to_json()})
        if ctx.kind in _DOMAIN_KINDS:
            for x in nonzero:
                for y in nonzero:
                    if tilt_mul(x, y).is_zero():
                        zero_divisors.append({"ring": ctx.descriptor})
    return _result(6, "tilt perfectness, reducedness and domain transfer",
                   bad_roundtrip == 0 and not nilpotents and not zero_divisors,
                   random_elements=CASES, roundtrip_failures=bad_roundtrip, tilt_sizes=sizes,
                   nilpotents=nilpotents[:5], zero_divisor_pairs=len(zero_divisors))


# 7 -------------------------------------------------------------------------------------------


def criterion_7(seed: int) -> dict:
    rng = _rng(seed, 7)
    A = parse_monomial_ring("Fp[t^2,t^3] p=5")
    proot = is_p_root_closed(A)
    B, cic = complete_integral_closure_monoid(A)
    B2, cic2 = complete_integral_closure_monoid(B)
    ai = is_almost_integral("t", A)
    agree = 0
    disagreements = []
    for _ in range(200):
        a, b, i = random_transfer_instance(rng)
        rep = ideal_transfer_check(a, b, i)
        if rep.holds:
            agree += 1
        else:
            disagreements.append(rep.to_json())
    ok = (proot.fails and proot.witness["b"] == "t" and B.gens == (1,) and B2 == B and cic.holds
          and ai.holds and ai.details["c"] * A.w == 2 and agree == 200)
    return _result(7, "closure suite on F_5[t^2,t^3] and random ideal transfers", ok,
                   p_root_witness=proot.witness, closure=B.descriptor, idempotent=B2 == B,
                   almost_integral_multiplier=ai.details["multiplier_exponent"],
                   transfer_agreements=agree, transfer_disagreements=disagreements[:3])


# 8 -------------------------------------------------------------------------------------------


def criterion_8(seed: int) -> dict:
    S1, rep1 = val_cic(model(1))
    SQ, repq = val_cic(model(1, "Q"))
    S2, rep2 = val_cic(model(2))
    grid = krull_grid(20)
    ok = (rep1.holds and rep1.details["fixed_point"] and repq.holds and repq.details["fixed_point"]
          and rep2.holds and S2.kind == "first_nonneg" and grid.holds)
    return _result(8, "complete integral closure at the value level", ok,
                   rank1=rep1.details["closure"], rank1_Q=repq.details["closure"],
                   rank2=rep2.details["closure"], grid=grid.details)


# 9 -------------------------------------------------------------------------------------------


def criterion_9(seed: int) -> dict:
    rng = _rng(seed, 9)
    rows = []
    ok = True
    for p in (2, 3, 5):
        for K in (1, 2, 3):
            rep = mt1_conclusion_check(MonomialRing(p, K, (1,), p**K))
            good = (rep.holds and rep.details["perf_hypothesis"] and rep.details["A_completely_integrally_closed"]
                    and rep.details["tilt_completely_integrally_closed"])
            ok = ok and good
            rows.append({"p": p, "K": K, "ring": rep.details["ring"], "both_closed": good})
    # random perfected models: the chain t^(w/p^j) is put among the generators
    implications = 0
    for _ in range(50):
        p, K = rng.choice((2, 3)), rng.randint(1, 3)
        a = rng.randint(1, 3)
        w = a * p**K
        gens = [w // p**j for j in range(K + 1)] + [rng.randint(1, 4 * p**K) for _ in range(rng.randint(0, 2))]
        rep = mt1_conclusion_check(MonomialRing(p, K, tuple(gens), w))
        ok = ok and rep.holds and rep.details["perf_hypothesis"]
        implications += rep.holds
    control = mt1_conclusion_check(parse_monomial_ring("Fp[t^2,t^3] p=3"))
    control_ok = (control.details["control_case"] and not control.details["A_completely_integrally_closed"]
                  and control.details["A_witness"]["element"] == "t")
    k = kummer(3, 2, 4)
    shadow = mt1_mixed_check(k, k.gen())
    ok = ok and control_ok and shadow.holds
    return _result(9, "complete integral closedness passes to the tilt on char-p models", ok,
                   saturated=rows, random_models=50, implications_held=implications,
                   control={"ring": control.details["ring"], "flagged": control_ok,
                            "witness": control.details["A_witness"]},
                   kummer_shadow=shadow.details["ring"])


# 10 ------------------------------------------------------------------------------------------


def criterion_10(seed: int) -> dict:
    k = kummer(3, 2, 4)
    a = mt2_hypotheses_audit(k, k.gen())
    h = a.details["hypotheses"]
    z = zmod(3, 4)
    b = mt2_hypotheses_audit(z, z.from_int(3))
    hb = b.details["hypotheses"]
    ok = (h["p_in_varpi^p_A"]["holds"] and h["semiperfect_residue"]["verdict"] == "holds"
          and "at_precision" in h["nonzerodivisor"] and not hb["p_in_varpi^p_A"]["holds"])
    return _result(10, "hypothesis audit for the integral-closedness transfer", ok,
                   kummer=a.to_json(), zmod=b.to_json())


# 11 ------------------------------------------------------------------------------------------


def criterion_11(seed: int) -> dict:
    """Rerun the seeded criteria in-process and compare serialised output."""
    seeded = (criterion_1, criterion_2, criterion_6, criterion_7, criterion_9)
    first = [json.dumps(f(seed), sort_keys=True) for f in seeded]
    second = [json.dumps(f(seed), sort_keys=True) for f in seeded]
    return _result(11, "identical seeds give identical output", first == second,
                   rerun=[f.__name__ for f in seeded])


CRITERIA: dict[int, Callable[[int], dict]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5, 6: criterion_6,
    7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10, 11: criterion_11,
}


def run_suite(seed: int = 42, only: list[int] | None = None) -> dict:
    ids = sorted(CRITERIA) if not only else sorted(only)
    results = [CRITERIA[i](seed) for i in ids]
    return {"seed": seed, "criteria": results, "passed": all(r["passed"] for r in results)}

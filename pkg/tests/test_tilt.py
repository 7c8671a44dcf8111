from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiltkit.arith import (
    congruent,
    finite_field,
    frobenius_preimage,
    kummer,
    perf_series,
    random_elem,
    residue_ctx,
    unramified,
    zmod,
)
from tiltkit.errors import Incompatible, InsufficientDepth, NotCauchy
from tiltkit.tilt import (
    TiltElem,
    limit_pth_powers,
    random_tilt,
    sharp,
    tilt_add,
    tilt_core,
    tilt_equal,
    tilt_from_residues,
    tilt_frobenius,
    tilt_frobenius_inv,
    tilt_is_injective_sharp,
    tilt_lift,
    tilt_mul,
    tilt_one,
    tilt_residues,
    tilt_zero,
)

# rings whose residue ring is perfect, so residue sequences extend to any depth
PERFECT_RESIDUE = [zmod(2, 4), zmod(3, 4), zmod(5, 3), unramified(4, 3), unramified(9, 3)]


def _residue_seq(ctx, abar, depth):
    """abar, abar^(1/p), ..., abar^(1/p^depth) in the residue ring."""
    res = [abar]
    for _ in range(depth):
        res.append(frobenius_preimage(res[-1]))
    return res


@pytest.fixture
def kum():
    k = kummer(3, 2, 4)
    x = k.gen()
    return k, x, tilt_lift(k, [k.from_int(3), x**3, x])


# construction

def test_lift_identity():
    z = zmod(3, 4)
    one = tilt_lift(z, [1, 1, 1])
    assert one.seq == tilt_one(z, 2).seq and one.prec == 4


def test_lift_varpi_flat(kum):
    k, x, v = kum
    assert v.depth == 2 and v.seq[0] == k.from_int(3)


def test_lift_incompatible():
    with pytest.raises(Incompatible) as exc:
        tilt_lift(zmod(5, 2), [2, 2])
    assert exc.value.index == 0 and exc.value.valuation == 1  # 2^5 - 2 = 30


# limits

def test_limit_examples():
    z = zmod(5, 2)
    assert limit_pth_powers(z, [2, 2]) == (z.from_int(7), 2)
    z3 = zmod(3, 4)
    assert limit_pth_powers(z3, [1, 1, 1, 1]) == (z3.one(), 4)
    assert limit_pth_powers(z3, [4, 1]) == (z3.one(), 2)


def test_limit_not_cauchy():
    with pytest.raises(NotCauchy):
        limit_pth_powers(zmod(5, 2), [2, 3])


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(PERFECT_RESIDUE), st.integers(0, 10**6), st.integers(0, 4))
def test_limit_agrees_with_canonical_rep(ctx, seed, D):
    rng = random.Random(seed)
    res = _residue_seq(ctx, random_elem(residue_ctx(ctx), rng), D)
    canon = tilt_from_residues(ctx, res)
    # any lifts of res[0..L], p-power limit at L refinements: certified to p^(L+1)
    for L in range(D + 1):
        approx = [canon.seq[k] + random_elem(ctx, rng) * ctx.p for k in range(L + 1)]
        value, prec = limit_pth_powers(ctx, approx)
        assert prec == min(L + 1, ctx.M)
        assert congruent(value, canon.seq[0], prec)


# sharp

def test_sharp_varpi_flat(kum):
    k, _, v = kum
    assert sharp(v) == (k.from_int(3), 3)


def test_sharp_identity_and_zero():
    z = zmod(3, 4)
    assert sharp(tilt_one(z, 3)).value == z.one()
    assert sharp(tilt_zero(z, 3)).value == z.zero()


def test_sharp_not_additive():
    z = zmod(5, 2)
    one = tilt_one(z, 1)
    s = tilt_add(one, one)
    value, prec = sharp(s)
    assert value == z.from_int(7) and prec == 2
    assert value != sharp(one).value + sharp(one).value


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PERFECT_RESIDUE + [kummer(3, 1, 3)]), st.integers(0, 10**6), st.integers(0, 4))
def test_sharp_multiplicative(ctx, seed, D):
    rng = random.Random(seed)
    x, y = random_tilt(ctx, D, rng), random_tilt(ctx, D, rng)
    sx, sy, sxy = sharp(x), sharp(y), sharp(tilt_mul(x, y))
    r = min(sx.prec, sy.prec, sxy.prec)
    assert congruent(sxy.value, sx.value * sy.value, r)


# precision law: recompute deeper and compare at the certified precision

@settings(max_examples=150, deadline=None)
@given(st.sampled_from(PERFECT_RESIDUE), st.integers(0, 10**6), st.integers(0, 3))
def test_sharp_certificate_survives_deeper_recomputation(ctx, seed, D):
    rng = random.Random(seed)
    abar = random_elem(residue_ctx(ctx), rng)
    shallow = tilt_from_residues(ctx, _residue_seq(ctx, abar, D))
    deep = tilt_from_residues(ctx, _residue_seq(ctx, abar, D + ctx.M))
    v, prec = sharp(shallow)
    assert prec == min(D + 1, ctx.M)
    assert congruent(v, sharp(deep).value, prec)
    for n in range(D + 1):
        assert congruent(shallow.seq[n], deep.seq[n], shallow.component_precision(n))


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(PERFECT_RESIDUE), st.integers(0, 10**6), st.integers(1, 4))
def test_add_certificate_survives_deeper_recomputation(ctx, seed, D):
    rng = random.Random(seed)
    rc = residue_ctx(ctx)
    a, b = random_elem(rc, rng), random_elem(rc, rng)
    big = D + ctx.M
    xs = tilt_from_residues(ctx, _residue_seq(ctx, a, D))
    ys = tilt_from_residues(ctx, _residue_seq(ctx, b, D))
    xd = tilt_from_residues(ctx, _residue_seq(ctx, a, big))
    yd = tilt_from_residues(ctx, _residue_seq(ctx, b, big))
    s, sd = tilt_add(xs, ys), tilt_add(xd, yd)
    r = min(ctx.M, D + 1)
    assert s.prec == r and s.depth == D - r + 1
    for n in range(s.depth + 1):
        assert congruent(s.seq[n], sd.seq[n], r)
    assert congruent(sharp(s).value, sharp(sd).value, sharp(s).prec)


def test_add_target_unreachable():
    z = zmod(5, 2)
    one = tilt_one(z, 1)
    with pytest.raises(InsufficientDepth) as exc:
        tilt_add(one, one, 3)
    assert exc.value.max_achievable == 2


def test_add_zero_keeps_x_at_certified_precision():
    z = zmod(3, 4)
    rng = random.Random(3)
    x = random_tilt(z, 4, rng)
    s = tilt_add(x, tilt_zero(z, 4))
    assert tilt_equal(s, x.truncate(s.depth), s.prec)


def test_char_p_add_is_componentwise():
    P = perf_series(2, 2, 3)
    rng = random.Random(5)
    x, y = random_tilt(P, 3, rng), random_tilt(P, 3, rng)
    s = tilt_add(x, y)
    assert s.seq == tuple(a + b for a, b in zip(x.seq, y.seq))
    with pytest.raises(InsufficientDepth):
        tilt_add(x, y, 2)


# multiplication and Frobenius

def test_mul_examples(kum):
    k, x, v = kum
    assert tilt_mul(v, tilt_one(k, 2)).seq == v.seq
    assert tilt_mul(v, v).seq == (k.from_int(9), x**6, x**2)
    assert tilt_mul(v, tilt_zero(k, 2)).is_zero()


def test_frobenius_of_varpi_flat(kum):
    k, x, v = kum
    assert tilt_frobenius(v).seq == (k.from_int(27), k.from_int(3), x**3)


def test_frobenius_inverse_shifts_exponents():
    P = perf_series(2, 3, 2)
    tflat = tilt_lift(P, ["t", "t^(1/2)", "t^(1/4)", "t^(1/8)"])
    inv = tilt_frobenius_inv(tflat)
    assert [str(a) for a in inv.seq] == ["t^(1/2)", "t^(1/4)", "t^(1/8)"]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PERFECT_RESIDUE + [kummer(2, 2, 3), perf_series(3, 2, 2)]),
       st.integers(0, 10**6), st.integers(1, 4))
def test_frobenius_bijective_at_reduced_depth(ctx, seed, D):
    x = random_tilt(ctx, D, random.Random(seed))
    # inv(frob(x)) drops the top p-th power: equals x at depth D - 1
    assert tilt_frobenius_inv(tilt_frobenius(x)).seq == x.seq[:D]
    # frob(inv(x)) is x truncated to depth D - 1
    assert tilt_frobenius(tilt_frobenius_inv(x)).seq == x.seq[:D]


def test_frobinv_needs_depth():
    with pytest.raises(InsufficientDepth):
        tilt_frobenius_inv(tilt_one(zmod(3, 2), 0))


# the tilt of finite rings

@pytest.mark.parametrize("ctx", [zmod(2, 3), zmod(5, 2), zmod(3, 3), perf_series(3, 0, 2),
                                 finite_field(9), unramified(4, 2), kummer(2, 1, 2)], ids=str)
def test_sharp_injective(ctx):
    rep = tilt_is_injective_sharp(ctx)
    assert rep.holds and rep.details["monoid_lemma_bijection"]


@pytest.mark.parametrize("ctx", [zmod(2, 3), zmod(3, 3), unramified(4, 2), kummer(2, 1, 2),
                                 perf_series(2, 1, 3), finite_field(8)], ids=str)
def test_tilt_reduced_and_domain(ctx):
    core = tilt_core(ctx)
    p = ctx.p
    for x in core:
        if x.is_zero():
            continue
        assert not tilt_residues(x ** (p**3))[0].is_zero()
    nonzero = [x for x in core if not x.is_zero()]
    for x in nonzero:
        for y in nonzero:
            assert not all(r.is_zero() for r in tilt_residues(tilt_mul(x, y)))


def test_tilt_residue_round_trip():
    ctx = unramified(9, 3)
    rng = random.Random(11)
    for _ in range(50):
        res = _residue_seq(ctx, random_elem(residue_ctx(ctx), rng), 3)
        assert list(tilt_residues(tilt_from_residues(ctx, res))) == res


# serialisation

@settings(max_examples=100, deadline=None)
@given(st.sampled_from(PERFECT_RESIDUE + [kummer(3, 1, 3), perf_series(2, 1, 3)]),
       st.integers(0, 10**6), st.integers(0, 3))
def test_json_round_trip(ctx, seed, D):
    x = random_tilt(ctx, D, random.Random(seed))
    assert TiltElem.from_json(x.to_json()) == x


def test_json_round_trip_keeps_certificate():
    z = zmod(5, 2)
    s = tilt_add(tilt_one(z, 1), tilt_one(z, 1))
    back = TiltElem.from_json(s.to_json())
    assert back == s and sharp(back).prec == 2


def test_json_rejects_incompatible():
    with pytest.raises(Incompatible):
        TiltElem.from_json({"ctx": "Zp p=5 M=2", "seq": [[2], [2]], "prec": 2})

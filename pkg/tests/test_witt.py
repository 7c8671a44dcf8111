from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiltkit.arith import finite_field, proj_mod_p
from tiltkit.errors import BadParameter, NotInImage, TooLarge
from tiltkit.witt import (
    WittCtx,
    in_sharp_image,
    primes_up_to,
    primitive_root,
    sharp_equals_teichmuller,
    sharp_image,
    sharp_of_residue,
    teichmuller,
    unique_p_root_in_sharp_image,
    zmod_unique_roots,
)

SMALL = [WittCtx(q, M) for q in (2, 3, 4, 5, 8, 9, 25, 27) for M in (1, 2, 3)]


def test_teichmuller_examples():
    W = WittCtx(5, 2)
    assert teichmuller(1, W) == W.realization.one()
    assert teichmuller(0, W).is_zero()
    assert teichmuller(2, W) == W.realization.from_int(7)


def test_teichmuller_iteration_oracle():
    # iterate y -> y^5 from 2 by hand: 32 = 7 mod 25, then 7^5 = 7 mod 25
    y, seen = 2, []
    while (y**5) % 25 != y:
        y = (y**5) % 25
        seen.append(y)
    assert seen == [7] and teichmuller(2, WittCtx(5, 2)).coeffs == (7,)


@pytest.mark.parametrize("q,M", [(2, 3), (5, 2), (9, 3)])
def test_sharp_equals_teichmuller_examples(q, M):
    rep = sharp_equals_teichmuller(WittCtx(q, M))
    assert rep.holds and rep.details["checked"] == q


def test_sharp_of_residue_two_is_seven():
    W = WittCtx(5, 2)
    assert sharp_of_residue(2, W) == W.realization.from_int(7)


def test_teich_caps():
    with pytest.raises(TooLarge):
        sharp_equals_teichmuller(WittCtx(125, 2))
    with pytest.raises(TooLarge):
        sharp_equals_teichmuller(WittCtx(5, 7))
    with pytest.raises(BadParameter):
        WittCtx(6, 2)


@pytest.mark.parametrize("W", SMALL, ids=lambda W: f"q{W.q}M{W.M}")
def test_teichmuller_multiplicative_section_root_of_unity(W):
    F = list(W.residue.elements())
    omega = {a: teichmuller(a, W) for a in F}
    for a in F:
        w = omega[a]
        assert proj_mod_p(w) == a
        assert w**W.q == w
        for b in F:
            assert omega[a * b] == w * omega[b]


def test_realization_residue_is_fq():
    W = WittCtx(9, 3)
    assert W.realization.kind == "Unramified"
    assert W.residue == finite_field(9)
    assert W.describe()["modulus"] == list(W.modulus)


def test_unique_root_minus_one_example():
    W = WittCtx(2, 4)
    rep = unique_p_root_in_sharp_image(1, W)
    assert rep.root == W.realization.one()
    assert sorted(r.coeffs[0] for r in rep.ambient_roots) == [1, 7, 9, 15]
    assert [r.coeffs[0] for r in rep.image_roots] == [1]


def test_unique_root_zero_and_seven():
    assert unique_p_root_in_sharp_image(0, WittCtx(5, 2)).root.is_zero()
    rep = unique_p_root_in_sharp_image(7, WittCtx(5, 2))
    assert rep.root.coeffs == (7,) and len(rep.image_roots) == 1


def test_not_in_image():
    with pytest.raises(NotInImage):
        unique_p_root_in_sharp_image(2, WittCtx(5, 2))


@pytest.mark.parametrize("W", SMALL, ids=lambda W: f"q{W.q}M{W.M}")
def test_exactly_one_root_in_image(W):
    image = sharp_image(W)
    assert all(in_sharp_image(a, W) for a in image)
    for a in image:
        rep = unique_p_root_in_sharp_image(a, W, enumerate_roots=False)
        assert len(rep.image_roots) == 1 and rep.image_roots[0] == rep.root


def test_zmod_uniqueness_all_higher_powers_up_to_a_million():
    for p in primes_up_to(1000):
        M = 2
        while p**M <= 10**6:
            r = zmod_unique_roots(p, M)
            assert r["ok"], r
            assert r["image_size"] == p
            M += 1


def test_zmod_uniqueness_prime_fields():
    for p in primes_up_to(10**4):
        assert zmod_unique_roots(p, 1)["ok"]


def test_zmod_table_matches_object_level():
    for p, M in [(2, 4), (3, 3), (5, 2), (7, 2)]:
        W = WittCtx(p, M)
        fast = zmod_unique_roots(p, M)
        image = sharp_image(W)
        assert fast["image_size"] == len(set(image))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([p for p in primes_up_to(2000) if p > 2]))
def test_primitive_root_has_full_order(p):
    g = primitive_root(p)
    assert len({pow(g, k, p) for k in range(p - 1)}) == p - 1

from __future__ import annotations

import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tiltkit.arith import kummer, ring_make, zmod
from tiltkit.closure import (
    MonomialRing,
    complete_integral_closure_monoid,
    ideal_transfer_check,
    is_almost_integral,
    is_completely_integrally_closed,
    is_integral,
    is_integrally_closed,
    is_p_root_closed,
    is_semiperfect,
    mt1_conclusion_check,
    mt1_mixed_check,
    mt2_hypotheses_audit,
    parse_laurent,
    parse_monomial_ring,
    random_monomial_ring,
    random_transfer_instance,
    tilt_model,
)
from tiltkit.errors import BadElement, HypothesisFail, TooLarge

# -- brute-force oracles, independent of the conductor table ----------------------------


def naive_monoid(gens, limit):
    """All sums of generators up to ``limit``."""
    S = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for s in frontier:
            for g in gens:
                if s + g <= limit and s + g not in S:
                    S.add(s + g)
                    nxt.append(s + g)
        frontier = nxt
    return S


def naive_frobenius_bound(gens):
    g = 0
    for e in gens:
        g = gcd(g, e)
    m = max(gens)
    return m * m + m  # every multiple of g beyond this is a sum of gens (Schur-type bound)


class Naive:
    def __init__(self, A: MonomialRing):
        self.A = A
        self.g = 0
        for e in A.gens:
            self.g = gcd(self.g, e)
        self.bound = naive_frobenius_bound(A.gens)
        self.S = naive_monoid(A.gens, self.bound + A.p * self.bound)

    def contains(self, e):
        if e < 0 or e % self.g:
            return False
        return e > self.bound or e in self.S

    def gaps(self):
        return [e for e in range(0, self.bound + 1, self.g) if not self.contains(e)]

    def least_c(self, powers_support, n_max):
        """Least c <= C with c w + (support of x^n) inside S for every n <= n_max, else None."""
        C = self.bound // self.A.w + 2
        for c in range(C + 1):
            if all(self.contains(c * self.A.w + e) for n in range(n_max + 1) for e in powers_support(n)):
                return c
        return None


def _mono_powers(e):
    return lambda n: [n * e]


def _rings(count, seed):
    rng = random.Random(seed)
    return [random_monomial_ring(rng) for _ in range(count)]


RINGS = _rings(200, 2024)


# -- examples --------------------------------------------------------------------------


@pytest.fixture
def a23():
    return parse_monomial_ring("Fp[t^2,t^3] p=5", "t^2")


def test_almost_integral_examples(a23):
    r = is_almost_integral("t", a23)
    assert r.holds and r.details["c"] == 1 and r.details["multiplier_exponent"] == "t^2"
    assert is_almost_integral("1", a23).holds
    f = is_almost_integral("t^-1", parse_monomial_ring("Fp[t] p=5"))
    assert f.fails and f.witness["lowest_exponent"] == "t^-1"


def test_integral_examples(a23):
    r = is_integral("t", a23)
    assert r.holds and r.details["relation"] == "X^2 - t^2"
    assert is_integral("t^-1", parse_monomial_ring("Fp[t] p=5")).fails


def test_unrepresentable_exponent():
    with pytest.raises(BadElement):
        is_integral("t^(1/9)", parse_monomial_ring("Fp[t^(1/3)] p=3"))


def test_p_root_examples(a23):
    r = is_p_root_closed(a23)
    assert r.fails and r.witness == {"b": "t", "b^p": "t^5"}
    assert is_p_root_closed(parse_monomial_ring("Fp[t] p=5")).holds
    assert is_p_root_closed(parse_monomial_ring("Fp[t^(1/3)] p=3")).holds


def test_closure_examples(a23):
    B, rep = complete_integral_closure_monoid(a23)
    assert B.descriptor == "Fp[t] p=5" and rep.holds and rep.details["idempotent"]
    A = parse_monomial_ring("Fp[t] p=5")
    B2, _ = complete_integral_closure_monoid(A)
    assert B2 == A
    B3, _ = complete_integral_closure_monoid(parse_monomial_ring("Fp[t^(2/3),t] p=3"))
    assert B3.descriptor == "Fp[t^(1/3)] p=3 K=1"


def test_semiperfect_examples():
    assert is_semiperfect(ring_make("Fq q=7")).holds
    f = is_semiperfect(ring_make("Fp[t]/t^2 p=2"))
    assert f.fails and f.witness["element"] == "t"
    r = is_semiperfect(ring_make("Fp[t^(1/p^1)]/t^2 p=2"))
    assert r.holds and r.bounds["mode"] == "depth-relative"


def test_semiperfect_cap(monkeypatch):
    monkeypatch.setenv("TILTKIT_MAX_ENUM", "1000")
    with pytest.raises(TooLarge):
        is_semiperfect(ring_make("Fp[t^(1/p^2)]/t^3 p=3"))


def test_ideal_transfer_examples():
    r = ideal_transfer_check(MonomialRing(2, 0, (2, 3)), MonomialRing(2, 0, (1,)), (2,))
    assert r.holds
    assert not r.details["left_integrally_closed"] and not r.details["right_integrally_closed"]
    B = MonomialRing(2, 0, (1,))
    t = ideal_transfer_check(B, B, (1,))
    assert t.holds and t.details["left_integrally_closed"] and t.details["right_integrally_closed"]
    assert ideal_transfer_check(MonomialRing(3, 0, (2, 3)), MonomialRing(3, 0, (1,)), (4,)).holds


def test_ideal_transfer_rejects_bad_ideal():
    with pytest.raises(HypothesisFail):
        ideal_transfer_check(MonomialRing(2, 0, (2, 3)), MonomialRing(2, 0, (1,)), (1,))


def test_mt1_examples():
    for K in range(1, 4):
        A = MonomialRing(3, K, (1,), 3**K)
        r = mt1_conclusion_check(A)
        assert r.holds and r.details["perf_hypothesis"]
        assert r.details["A_completely_integrally_closed"] and r.details["tilt_completely_integrally_closed"]
    # depth 0 has no p-th root of t, so it is a control rather than a (Perf) model
    flat = mt1_conclusion_check(MonomialRing(3, 0, (1,)))
    assert flat.holds and flat.details["control_case"]
    ctrl = mt1_conclusion_check(parse_monomial_ring("Fp[t^2,t^3] p=3", "t^2"))
    assert ctrl.details["control_case"] and not ctrl.details["perf_hypothesis"]
    assert not ctrl.details["A_completely_integrally_closed"]
    assert ctrl.details["A_witness"]["element"] == "t"


def test_mt1_mixed_uses_shadow():
    k = kummer(3, 2, 4)
    r = mt1_mixed_check(k, k.gen())
    assert r.holds and r.details["value_monoid_shadow_of"] == k.descriptor


def test_mt2_examples():
    k = kummer(3, 2, 4)
    r = mt2_hypotheses_audit(k, k.gen())
    h = r.details["hypotheses"]
    assert h["p_in_varpi^p_A"]["holds"] and h["p_in_varpi^p_A"]["verified"]
    assert h["semiperfect_residue"]["verdict"] == "holds"
    assert h["nonzerodivisor"]["at_precision"] is False
    assert h["nonzerodivisor"]["untruncated_shadow"] is True
    z = zmod(3, 4)
    r2 = mt2_hypotheses_audit(z, z.from_int(3))
    assert not r2.details["hypotheses"]["p_in_varpi^p_A"]["holds"] and r2.fails
    r3 = mt2_hypotheses_audit(k, k.zero())
    assert r3.fails and "nonzerodivisor" in r3.witness["failing"]


# -- agreement with brute force on 200 random rings ---------------------------------------


@pytest.mark.parametrize("idx", range(0, 200, 20))
def test_conductor_and_gaps_match_brute_force(idx):
    for A in RINGS[idx:idx + 20]:
        N = Naive(A)
        assert A.gaps() == [e for e in N.gaps() if e < A.conductor] == N.gaps()
        assert all(A.contains(e) == N.contains(e) for e in range(-3, N.bound + 10))


@pytest.mark.parametrize("idx", range(0, 200, 20))
def test_monomial_predicates_match_brute_force(idx):
    for A in RINGS[idx:idx + 20]:
        N = Naive(A)
        n_max = max(50, N.bound + 2 * A.w + 2)
        for e in range(-2 * N.g, N.bound + 2 * N.g, N.g):
            x = {e: 1}
            exact = is_almost_integral(x, A)
            c = N.least_c(_mono_powers(e), n_max)
            assert exact.holds == (c is not None), (A, e)
            if c is not None:
                assert exact.details["c"] == c, (A, e)
            m_max = max(50, N.bound // N.g + 2)
            assert is_integral(x, A).holds == any(N.contains(m * e) for m in range(1, m_max + 1)), (A, e)
        naive_proot = not any(N.contains(A.p * e) for e in N.gaps())
        assert is_p_root_closed(A).holds == naive_proot
        assert is_integrally_closed(A).holds == (not N.gaps())


def _naive_power_supports(x, p, n_max, cap):
    out = [{0}]
    cur = {0: 1}
    for _ in range(n_max):
        nxt = {}
        for a, ca in cur.items():
            for b, cb in x.items():
                if a + b < cap:
                    nxt[a + b] = (nxt.get(a + b, 0) + ca * cb) % p
        cur = {e: c for e, c in nxt.items() if c}
        out.append(set(cur))
    return out


@pytest.mark.parametrize("idx", range(0, 200, 40))
def test_polynomial_almost_integral_matches_brute_force(idx):
    rng = random.Random(idx)
    for A in RINGS[idx:idx + 40]:
        N = Naive(A)
        for _ in range(3):
            terms = rng.sample(range(0, N.bound + 3), rng.randint(1, 3))
            x = {N.g * e: rng.randint(1, A.p - 1) for e in terms}
            if rng.random() < 0.3:
                x[-N.g] = 1
            n_max = max(50, N.bound + 2 * A.w + 2)
            supports = _naive_power_supports(x, A.p, n_max, N.bound + 1)
            c = N.least_c(lambda n: supports[n], n_max)
            exact = is_almost_integral(x, A)
            assert exact.holds == (c is not None), (A, x)
            if c is not None:
                assert exact.details["c"] == c, (A, x)


# -- structural properties ---------------------------------------------------------------


@pytest.mark.parametrize("A", RINGS[:60], ids=lambda A: A.descriptor.replace(" ", "_"))
def test_closure_extensive_idempotent_and_almost_integral(A):
    B, rep = complete_integral_closure_monoid(A)
    assert rep.holds
    assert all(B.contains(e) for e in A.gens)
    assert complete_integral_closure_monoid(B)[0] == B
    assert all(is_almost_integral({e: 1}, A).holds for e in B.gens)
    assert is_completely_integrally_closed(B).holds


@pytest.mark.parametrize("A", RINGS, ids=lambda A: A.descriptor.replace(" ", "_"))
def test_cic_implies_p_root_closed(A):
    B, _ = complete_integral_closure_monoid(A)
    if B.gens == A.gens:
        assert is_completely_integrally_closed(A).holds
        assert is_p_root_closed(A).holds


def test_ideal_transfer_agrees_on_random_instances():
    rng = random.Random(99)
    for _ in range(200):
        A, B, I = random_transfer_instance(rng)
        rep = ideal_transfer_check(A, B, I)
        assert rep.holds, rep.to_json()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(1, 3), st.lists(st.integers(1, 9), min_size=1, max_size=3))
def test_mt1_implication_on_perf_models(p, K, gens):
    # scale generators so that t^(w/p^j) sits in A for j <= K
    A = MonomialRing(p, K, tuple(gens) + (1,), p**K)
    r = mt1_conclusion_check(A)
    assert r.holds and r.details["perf_hypothesis"]
    T = tilt_model(A, K)
    assert r.details["tilt_model"] == T.descriptor


def test_parse_laurent_round_trip():
    A = parse_monomial_ring("Fp[t^(1/3),t] p=3")
    x = parse_laurent("2t^(-1/3) + t^(2/3)", A)
    assert x == {-1: 2, 2: 1}

"""Closure predicates on monomial rings F_p[S].

S is a finitely generated submonoid of (1/p^K)Z>=0, stored with exponents
scaled by p^K.  With g = gcd(gens), S is g times a numerical semigroup, so
membership is decided by a table up to the conductor (every multiple of g at
or above it lies in S).  The pseudouniformizer is t^w with w in S, w > 0, and
A[1/t^w] = F_p[t^(gZ)].

Elements of A[1/t^w] are Laurent polynomials, kept as ``{scaled_exp: coeff}``
dicts with coefficients in F_p.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from math import gcd

from tiltkit import report as R
from tiltkit.arith import (
    FIELD,
    KUMMER,
    PERF,
    ZMOD,
    RingCtx,
    RingElem,
    finite_field,
    frobenius,
    is_prime,
    max_enum,
    parse_exponent,
    parse_terms,
    perf_series,
    residue_ctx,
    uniformizer_valuation,
    zero_divisor_check,
)
from tiltkit.errors import BadElement, BadParameter, HypothesisFail, ParseError, TooLarge
from tiltkit.report import FAILS, HOLDS, INCONCLUSIVE, CheckReport

DEFAULT_POWER_BOUND = 50
DEFAULT_DEGREE_BOUND = 12
PERIOD_CAP = 100_000

Laurent = dict  # scaled exponent -> nonzero coefficient mod p


@dataclass(frozen=True)
class MonomialRing:
    p: int
    K: int
    gens: tuple[int, ...]
    w: int | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise BadParameter(f"p={self.p} is not prime")
        if self.K < 0:
            raise BadParameter("K must be >= 0")
        gens = tuple(sorted({int(e) for e in self.gens if e != 0}))
        if not gens or gens[0] < 0:
            raise BadParameter("need at least one positive generator")
        object.__setattr__(self, "gens", gens)
        if self.w is None:
            object.__setattr__(self, "w", gens[0])
        if self.w <= 0 or not self.contains(self.w):
            raise BadParameter(f"uniformizer exponent {self.w} must be a positive element of S")

    @property
    def scale(self) -> int:
        return self.p**self.K

    @property
    def g(self) -> int:
        return reduce(gcd, self.gens)

    @cached_property
    def _table(self) -> tuple[int, tuple[bool, ...]]:
        # membership of g*k in S for k < conductor/g; stops after min(gens)/g consecutive hits
        red = [e // self.g for e in self.gens]
        need = red[0]
        member = [True]
        run = 1 if need == 1 else 0
        k = 0
        while run < need:
            k += 1
            hit = any(k >= r and member[k - r] for r in red)
            member.append(hit)
            run = run + 1 if hit else 0
            if k > 10**7:
                raise TooLarge("conductor search exceeded 10^7")
        cond = len(member) - need  # first index of the final run
        return cond * self.g, tuple(member[:cond])

    @property
    def conductor(self) -> int:
        """Least c such that every multiple of g that is >= c lies in S."""
        return self._table[0]

    def contains(self, e: int) -> bool:
        if e < 0 or e % self.g:
            return False
        cond, member = self._table
        return e >= cond or member[e // self.g]

    def gaps(self) -> list[int]:
        """Multiples of g not in S (all below the conductor)."""
        return [e for e in range(0, self.conductor, self.g) if not self.contains(e)]

    def in_localization(self, e: int) -> bool:
        return e % self.g == 0

    def fmt_exp(self, e: int) -> str:
        return fmt_monomial(e, self.scale)

    @property
    def descriptor(self) -> str:
        inner = ",".join(fmt_monomial(e, self.scale) for e in self.gens)
        return f"Fp[{inner}] p={self.p}" + (f" K={self.K}" if self.K else "")

    def describe(self) -> dict:
        return {
            "ring": self.descriptor,
            "scaled_gens": list(self.gens),
            "scale": self.scale,
            "uniformizer": self.fmt_exp(self.w),
            "g": self.g,
            "conductor": self.conductor,
        }

    def with_gens(self, gens, w=None) -> MonomialRing:
        return MonomialRing(self.p, self.K, tuple(gens), self.w if w is None else w)


def fmt_monomial(e: int, scale: int, coeff: int = 1) -> str:
    f = Fraction(e, scale)
    if f == 0:
        mono = "1"
    elif f == 1:
        mono = "t"
    elif f.denominator == 1:
        mono = f"t^{f.numerator}"
    else:
        mono = f"t^({f.numerator}/{f.denominator})"
    if coeff == 1:
        return mono
    return str(coeff) if mono == "1" else f"{coeff}*{mono}"


def fmt_laurent(x: Laurent, scale: int) -> str:
    if not x:
        return "0"
    return " + ".join(fmt_monomial(e, scale, c) for e, c in sorted(x.items()))


# -- parsing ------------------------------------------------------------------------------

_MONO_HEAD = re.compile(r"^F(?:p|(\d+))\[(?P<gens>[^\]]*)\]$")


def _needed_depth(exps, p: int) -> int:
    K = 0
    for e in exps:
        den = e.denominator
        k = 0
        while den % p == 0:
            den //= p
            k += 1
        if den != 1:
            raise ParseError(f"exponent {e} has a denominator that is not a power of p")
        K = max(K, k)
    return K


def parse_monomial_ring(descriptor: str, uniformizer: str | None = None) -> MonomialRing:
    """Parse 'Fp[t^2,t^3] p=5', 'Fp[t^(1/3)] p=3 K=2' and similar."""
    tokens = descriptor.split()
    if not tokens:
        raise ParseError("empty ring descriptor")
    m = _MONO_HEAD.match(tokens[0])
    if not m:
        raise ParseError(f"not a monomial ring descriptor: {descriptor!r}")
    keys = {}
    for tok in tokens[1:]:
        k, sep, v = tok.partition("=")
        if not sep or k not in ("p", "K") or k in keys:
            raise ParseError(f"bad token {tok!r} in {descriptor!r}")
        try:
            keys[k] = int(v)
        except ValueError:
            raise ParseError(f"bad value in {tok!r}") from None
    if m.group(1):
        keys.setdefault("p", int(m.group(1)))
    if "p" not in keys:
        raise ParseError(f"missing p= in {descriptor!r}")
    p = keys["p"]
    if not is_prime(p):
        raise BadParameter(f"p={p} is not prime")
    exps = []
    for raw in m.group("gens").split(","):
        raw = raw.strip()
        if raw == "t":
            exps.append(Fraction(1))
        elif raw.startswith("t^"):
            exps.append(parse_exponent(raw[2:], p))
        else:
            raise ParseError(f"bad generator {raw!r}")
    if any(e <= 0 for e in exps):
        raise BadParameter("generators must have positive exponents")
    uni = None
    if uniformizer is not None:
        uni = parse_laurent_fraction(uniformizer, p)
    K = max(_needed_depth(exps, p), keys.get("K", 0), _needed_depth(uni, p) if uni else 0)
    scale = p**K
    gens = tuple(int(e * scale) for e in exps)
    w = None
    if uni is not None:
        if len(uni) != 1 or uni[0] <= 0:
            raise BadParameter(f"uniformizer must be a positive monomial t^e, got {uniformizer!r}")
        w = int(uni[0] * scale)
    return MonomialRing(p, K, gens, w)


def parse_laurent_fraction(text: str, p: int) -> list[Fraction]:
    terms = parse_terms(text, p, "t")
    if any(c % p != 1 for c, _ in terms) or len(terms) != 1:
        raise ParseError(f"expected a single monomial t^e, got {text!r}")
    return [terms[0][1]]


def parse_laurent(text: str, A: MonomialRing) -> Laurent:
    """Parse an element of A[1/t^w]; BadElement if an exponent is not representable."""
    out: dict[int, int] = {}
    for c, e in parse_terms(text, A.p, "t"):
        s = e * A.scale
        if s.denominator != 1:
            raise BadElement(f"exponent {e} is not representable at depth K={A.K}")
        s = int(s)
        if not A.in_localization(s):
            raise BadElement(f"t^{e} does not lie in A[1/t^w] (exponents must be multiples of {Fraction(A.g, A.scale)})")
        out[s] = (out.get(s, 0) + c) % A.p
    return {e: c for e, c in out.items() if c}


def laurent_mul(x: Laurent, y: Laurent, p: int, cap: int | None = None) -> Laurent:
    out: dict[int, int] = {}
    for e1, c1 in x.items():
        for e2, c2 in y.items():
            e = e1 + e2
            if cap is not None and e >= cap:
                continue
            out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


def laurent_pow(x: Laurent, n: int, p: int) -> Laurent:
    result: Laurent = {0: 1}
    for _ in range(n):
        result = laurent_mul(result, x, p)
    return result


def _in_ring(x: Laurent, A: MonomialRing) -> bool:
    return all(A.contains(e) for e in x)


# -- almost integrality and integrality -----------------------------------------------------


def _truncated_power_support(x: Laurent, A: MonomialRing, cap: int) -> tuple[set[int], bool]:
    """Union of the supports of x^n truncated below ``cap``, over all n >= 0.

    Truncated powers live in a finite ring, so the sequence is eventually
    periodic; the flag reports whether the cycle was reached within PERIOD_CAP.
    """
    support: set[int] = {0} if cap > 0 else set()
    seen = set()
    cur = {e: c for e, c in x.items() if e < cap}
    for _ in range(PERIOD_CAP):
        key = tuple(sorted(cur.items()))
        if key in seen:
            return support, True
        seen.add(key)
        support.update(cur)
        cur = laurent_mul(cur, x, A.p, cap)
    return support, False


def is_almost_integral(x, A: MonomialRing, N: int = DEFAULT_POWER_BOUND) -> CheckReport:
    """Is there c >= 0 with t^(c w) x^n in A for every n >= 0?

    The lowest term of x^n is (lowest term of x)^n because F_p is a field, so a
    negative lowest exponent diverges; otherwise every power lands in S once
    shifted past the conductor.  Both directions are exact.  The least c is
    found from the eventually periodic truncated powers of x.
    """
    if isinstance(x, str):
        x = parse_laurent(x, A)
    bounds = {"power_bound": N, "conductor": A.conductor}
    refs = (R.REF_ALMOST_INTEGRAL,)
    if not x:
        return CheckReport("is_almost_integral", HOLDS, None, bounds, refs,
                           {**A.describe(), "x": "0", "c": 0, "multiplier_exponent": "1"})
    e_min = min(x)
    if e_min < 0:
        # for any c, n = floor(c w / |e_min|) + 1 pushes the lowest exponent below zero
        c = N
        witness = {"x": fmt_laurent(x, A.scale), "lowest_exponent": A.fmt_exp(e_min),
                   "c": c, "n": c * A.w // -e_min + 1}
        return CheckReport("is_almost_integral", FAILS, witness, bounds, refs,
                           {**A.describe(), "x": fmt_laurent(x, A.scale)})
    support, complete = _truncated_power_support(x, A, A.conductor)
    c = 0
    while not all(A.contains(c * A.w + e) for e in support if c * A.w + e < A.conductor):
        c += 1
    details = {**A.describe(), "x": fmt_laurent(x, A.scale), "c": c,
               "multiplier_exponent": A.fmt_exp(c * A.w), "powers_cycle_found": complete}
    verdict = HOLDS if complete else INCONCLUSIVE
    return CheckReport("is_almost_integral", verdict, None, bounds, refs, details)


def _monic_relation(x: Laurent, A: MonomialRing) -> dict:
    """X^m - t^(m e) for a monomial, else X^(p^k) - x^(p^k) (Frobenius is additive)."""
    if len(x) == 1:
        (e, c), = x.items()
        m = 1
        while not A.contains(m * e):
            m += 1
        coeff = pow(c, m, A.p)
        return {"degree": m, "relation": f"X^{m} - {fmt_monomial(m * e, A.scale, coeff)}"}
    k = 0
    while not all(A.contains(A.p**k * e) for e in x):
        k += 1
    xp = {A.p**k * e: pow(c, A.p**k, A.p) for e, c in x.items()}
    return {"degree": A.p**k, "relation": f"X^{A.p ** k} - ({fmt_laurent(xp, A.scale)})"}


def is_integral(x, A: MonomialRing, d: int = DEFAULT_DEGREE_BOUND) -> CheckReport:
    """Integrality of x over A inside A[1/t^w].

    The integral closure of F_p[S] in F_p[t^(gZ)] is F_p[t^(gZ>=0)], so x is
    integral iff its lowest exponent is >= 0; a monic relation is exhibited.
    """
    if isinstance(x, str):
        x = parse_laurent(x, A)
    refs = (R.REF_INTEGRAL,)
    bounds = {"degree_bound": d}
    details = {**A.describe(), "x": fmt_laurent(x, A.scale)}
    if x and min(x) < 0:
        witness = {"lowest_exponent": A.fmt_exp(min(x)),
                   "reason": "a monic relation would force a nonnegative lowest exponent"}
        return CheckReport("is_integral", FAILS, witness, bounds, refs, details)
    rel = _monic_relation(x, A) if x else {"degree": 1, "relation": "X"}
    details.update(rel)
    details["within_degree_bound"] = rel["degree"] <= d
    return CheckReport("is_integral", HOLDS, None, bounds, refs, details)


def is_integrally_closed(A: MonomialRing) -> CheckReport:
    gaps = A.gaps()
    witness = None
    if gaps:
        e = gaps[0]
        witness = {"element": A.fmt_exp(e), **_monic_relation({e: 1}, A)}
    return CheckReport("is_integrally_closed", not gaps, witness,
                       {"conductor": A.conductor}, (R.REF_INTEGRAL,), A.describe())


def is_p_root_closed(A: MonomialRing) -> CheckReport:
    """b^p in A implies b in A, for b in A[1/t^w].

    b^p = sum c^p t^(p e) by additivity of Frobenius, so only monomials matter
    and only gaps below the conductor can fail: the scan is complete.
    """
    witness = None
    for e in A.gaps():
        if A.contains(A.p * e):
            witness = {"b": A.fmt_exp(e), "b^p": A.fmt_exp(A.p * e)}
            break
    return CheckReport("is_p_root_closed", witness is None, witness,
                       {"scanned_below": A.conductor}, (R.REF_P_ROOT,), A.describe())


def is_completely_integrally_closed(A: MonomialRing) -> CheckReport:
    """Almost integral elements are exactly F_p[t^(gZ>=0)]; closed iff S = gZ>=0."""
    rep = is_integrally_closed(A)
    return CheckReport("is_completely_integrally_closed", rep.verdict,
                       None if rep.holds else {"element": rep.witness["element"],
                                               "c": is_almost_integral({A.gaps()[0]: 1}, A).details["c"]},
                       rep.bounds, (R.REF_ALMOST_INTEGRAL, R.REF_CIC_IDEMPOTENT), rep.details)


def complete_integral_closure_monoid(A: MonomialRing) -> tuple[MonomialRing, CheckReport]:
    """Saturation gZ>=0 of S, with extensivity and idempotence verified."""
    B = A.with_gens((A.g,))
    BB = B.with_gens((B.g,))
    extensive = all(B.contains(e) for e in A.gens)
    gens_ai = all(is_almost_integral({e: 1}, A).holds for e in B.gens)
    idempotent = BB.gens == B.gens and BB.conductor == B.conductor
    ok = extensive and gens_ai and idempotent
    rep = CheckReport(
        "complete_integral_closure_monoid", ok,
        None if ok else {"extensive": extensive, "generators_almost_integral": gens_ai, "idempotent": idempotent},
        {"conductor": A.conductor}, (R.REF_ALMOST_INTEGRAL, R.REF_CIC_IDEMPOTENT),
        {"input": A.descriptor, "closure": B.descriptor, "idempotent": idempotent,
         "extensive": extensive, "generators_almost_integral": gens_ai,
         "changed": B.gens != A.gens},
    )
    return B, rep


# -- semiperfectness ------------------------------------------------------------------------


def is_semiperfect(R_ctx: RingCtx) -> CheckReport:
    """Surjectivity of Frobenius by image enumeration.

    For PerfSeries with K >= 1 the truncated model cannot hold roots of its
    deepest exponents, so the check is depth-relative: every element of the
    depth-(K-1) submodel (scaled exponents divisible by p) must be a p-th power.
    """
    if R_ctx.kind not in (FIELD, PERF):
        R_ctx = residue_ctx(R_ctx)
    if R_ctx.size > max_enum():
        raise TooLarge(f"{R_ctx} has {R_ctx.size} elements", R_ctx.size, max_enum())
    image = {frobenius(a) for a in R_ctx.elements()}
    relative = R_ctx.kind == PERF and R_ctx.K >= 1
    p = R_ctx.p
    witness = None
    checked = 0
    for a in R_ctx.elements():
        if relative and any(c and i % p for i, c in enumerate(a.coeffs)):
            continue
        checked += 1
        if a not in image:
            witness = a
            break
    return CheckReport(
        "is_semiperfect", witness is None,
        None if witness is None else {"element": str(witness), "repr": witness.to_json()},
        {"ring_size": R_ctx.size, "mode": "depth-relative" if relative else "strict"},
        (R.REF_SEMIPERFECT,),
        {"ring": R_ctx.descriptor, "image_size": len(image), "targets_checked": checked},
    )


# -- ideal transfer ---------------------------------------------------------------------------


def _ideal_exponents_valid(A: MonomialRing, B: MonomialRing, I: tuple[int, ...]) -> int | None:
    """Return an exponent of I*B outside A, or None."""
    top = max(A.conductor, B.conductor) + max(I) + 1
    for i in I:
        for e in range(0, top):
            if B.contains(e) and not A.contains(i + e):
                return i + e
    return None


def ideal_transfer_check(A: MonomialRing, B: MonomialRing, I) -> CheckReport:
    """Evaluate both sides of: A integrally closed in B iff A/I integrally closed in B/IB.

    Left side on the monoid level (t^e in B integral over A iff some m e lies
    in S_A).  Right side by enumerating B/IB and exhibiting, for each element
    outside A/I, a monic relation X^(n+L) - X^n from its eventually periodic powers.
    """
    if (A.p, A.K) != (B.p, B.K):
        raise HypothesisFail("A and B must share p and K")
    if isinstance(I, int):
        I = (I,)
    I = tuple(sorted(set(I)))
    if not I or any(not B.contains(i) for i in I):
        raise HypothesisFail("ideal generators must be monomials of B")
    if any(not B.contains(e) for e in A.gens):
        raise HypothesisFail("A is not contained in B")
    bad = _ideal_exponents_valid(A, B, I)
    if bad is not None:
        raise HypothesisFail(f"I*B is not inside A: {A.fmt_exp(bad)}")

    # left side
    left_witness = None
    top = max(A.conductor, B.conductor) + 1
    for e in range(top):
        if B.contains(e) and not A.contains(e):
            m = 1
            while m <= top and not A.contains(m * e):
                m += 1
            if A.contains(m * e):
                left_witness = {"element": B.fmt_exp(e), "relation": f"X^{m} - {B.fmt_exp(m * e)}"}
                break
    left = left_witness is None

    # right side: basis of B/IB are the exponents of S_B outside J = I + S_B
    def in_J(e):
        return any(e >= i and B.contains(e - i) for i in I)

    basis_B = [e for e in range(top + max(I)) if B.contains(e) and not in_J(e)]
    basis_A = {e for e in basis_B if A.contains(e)}
    size = A.p ** len(basis_B)
    if size > max_enum():
        raise TooLarge(f"B/IB has {size} elements", size, max_enum())
    right_witness = None
    integral_outside = 0
    idx = {e: k for k, e in enumerate(basis_B)}

    def mul(u, v):
        out = [0] * len(basis_B)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    if b:
                        e = basis_B[i] + basis_B[j]
                        if e in idx:
                            out[idx[e]] = (out[idx[e]] + a * b) % A.p
        return tuple(out)

    for n in range(size):
        digits, v = [], n
        for _ in basis_B:
            digits.append(v % A.p)
            v //= A.p
        b = tuple(digits)
        if all(not c or basis_B[k] in basis_A for k, c in enumerate(b)):
            continue
        seen = {}
        cur = tuple(1 if e == 0 else 0 for e in basis_B)
        k = 0
        while cur not in seen:
            seen[cur] = k
            cur = mul(cur, b)
            k += 1
        n0 = seen[cur]
        integral_outside += 1
        if right_witness is None:
            elem = " + ".join(fmt_monomial(basis_B[j], B.scale, c) for j, c in enumerate(b) if c)
            right_witness = {"element": elem, "relation": f"X^{k} - X^{n0}"}
    right = right_witness is None
    agree = left == right
    return CheckReport(
        "ideal_transfer_check", agree,
        None if agree else {"left": left_witness, "right": right_witness},
        {"quotient_size": size, "max_enum": max_enum()},
        (R.REF_IDEAL_TRANSFER, R.REF_INTEGRAL),
        {"A": A.descriptor, "B": B.descriptor, "I": [B.fmt_exp(i) for i in I],
         "left_integrally_closed": left, "left_witness": left_witness,
         "right_integrally_closed": right, "right_witness": right_witness,
         "quotient_basis_B": [B.fmt_exp(e) for e in basis_B],
         "quotient_basis_A": [B.fmt_exp(e) for e in sorted(basis_A)],
         "elements_outside_A_mod_I": integral_outside},
    )


# -- tilt transfer checks on monomial and chain-ring models -----------------------------


def perf_chain_ok(A: MonomialRing, depth: int) -> tuple[bool, int | None]:
    """Do t^(w/p^j) lie in A for j = 1..depth?  Returns the first failing j."""
    for j in range(1, depth + 1):
        if A.w % A.p**j or not A.contains(A.w // A.p**j):
            return False, j
    return True, None


def tilt_model(A: MonomialRing, depth: int) -> MonomialRing:
    """Depth-D tilt of a char-p monomial ring, seen through sharp.

    A chain (a_0, ..., a_D) with a_n = a_(n+1)^p is fixed by its top t^s,
    s in S, and sharp sends it to t^(p^D s); the tilt pseudouniformizer maps
    to t^w.  So the model is F_p[p^D S] with uniformizer exponent w.
    """
    return A.with_gens(tuple(A.p**depth * e for e in A.gens), A.w)


def mt1_conclusion_check(A: MonomialRing, depth: int | None = None, shadow_of: str | None = None) -> CheckReport:
    depth = A.K if depth is None else depth
    perf, fail_j = perf_chain_ok(A, max(depth, 1))
    a_cic = is_completely_integrally_closed(A)
    T = tilt_model(A, depth) if perf else None
    t_cic = is_completely_integrally_closed(T) if T is not None else None
    implication_ok = not perf or not a_cic.holds or t_cic.holds
    details = {
        **A.describe(), "depth": depth, "perf_hypothesis": perf,
        "perf_failure": None if perf else f"t^(w/p^{fail_j}) not in A",
        "A_completely_integrally_closed": a_cic.holds, "A_witness": a_cic.witness,
        "tilt_model": T.descriptor if T else None,
        "tilt_completely_integrally_closed": t_cic.holds if t_cic else None,
        "control_case": not perf,
    }
    if shadow_of:
        details["value_monoid_shadow_of"] = shadow_of
        details["note"] = "checked on the exponent shadow, not on the full mixed-characteristic ring"
    return CheckReport("mt1_conclusion_check", implication_ok,
                       None if implication_ok else {"tilt_witness": t_cic.witness},
                       {"depth": depth}, (R.REF_MT1, R.REF_MONOID, R.REF_ALMOST_INTEGRAL), details)


def exponent_shadow(ctx: RingCtx, varpi: RingElem) -> MonomialRing | None:
    """Value-monoid shadow of a chain ring: Z>=0 in units of the uniformizer, w = v(varpi)."""
    v = uniformizer_valuation(varpi)
    if v is None or v == 0:
        return None
    K = ctx.K if ctx.kind == KUMMER else 0
    return MonomialRing(ctx.p, K, (1,), v)


def mt1_mixed_check(ctx: RingCtx, varpi: RingElem) -> CheckReport:
    A = exponent_shadow(ctx, varpi)
    if A is None:
        raise BadElement("the uniformizer must be a nonzero non-unit")
    return mt1_conclusion_check(A, shadow_of=ctx.descriptor)


def _p_in_varpi_p(ctx: RingCtx, varpi: RingElem) -> tuple[bool, dict]:
    v = uniformizer_valuation(varpi)
    if ctx.kind == KUMMER:
        vp_ = ctx.dim  # p = x^N
    else:
        vp_ = 1
    info = {"v(p)": vp_, "v(varpi)": v}
    if v is None:
        info["reason"] = "varpi is zero at this precision"
        return False, info
    info["v(varpi^p)"] = ctx.p * v
    if ctx.p * v > vp_:
        info["reason"] = "valuation of varpi^p exceeds that of p"
        return False, info
    # explicit cofactor b with varpi^p b = p
    from tiltkit.arith import elem_inv, split_uniformizer

    _, u = split_uniformizer(varpi)
    pi = ctx.gen() if ctx.kind == KUMMER else ctx.from_int(ctx.p)
    b = elem_inv(u) ** ctx.p * pi ** (vp_ - ctx.p * v)
    info["cofactor"] = str(b)
    info["verified"] = varpi**ctx.p * b == ctx.from_int(ctx.p)
    return info["verified"], info


def mt2_hypotheses_audit(ctx: RingCtx, varpi: RingElem) -> CheckReport:
    """Audit of: varpi nonzero divisor, p in varpi^p A, A/pA semiperfect, A integrally closed in A[1/varpi].

    (i) is recorded twice: at the working precision (where every non-unit of a
    truncated chain ring kills a power of the uniformizer) and on the untruncated
    shadow, where any nonzero varpi is a nonzero divisor.  The overall verdict
    uses the shadow.
    """
    if ctx.kind not in (ZMOD, KUMMER):
        raise BadParameter("mt2 audit needs a Zp or Kummer ring")
    zd = zero_divisor_check(varpi)
    shadow_nzd = not varpi.is_zero()
    ok_ii, info_ii = _p_in_varpi_p(ctx, varpi)
    if ctx.kind == KUMMER:
        resid = perf_series(ctx.p, ctx.K, 1)  # F_p[x]/(x^N) with x = t^(1/p^K)
    else:
        resid = finite_field(ctx.p)
    semi = is_semiperfect(resid)
    shadow = exponent_shadow(ctx, varpi)
    if shadow is None:
        ic_holds = shadow_nzd  # varpi a unit: A[1/varpi] = A
        ic = {"verdict": HOLDS if ic_holds else FAILS, "note": "varpi is a unit or zero"}
    else:
        rep = is_integrally_closed(shadow)
        ic_holds = rep.holds
        ic = {"verdict": rep.verdict, "shadow": shadow.descriptor, "witness": rep.witness}
    hyps = {
        "nonzerodivisor": {"at_precision": zd.nonzerodivisor,
                           "witness": None if zd.witness is None else str(zd.witness),
                           "untruncated_shadow": shadow_nzd},
        "p_in_varpi^p_A": {"holds": ok_ii, **info_ii},
        "semiperfect_residue": {"verdict": semi.verdict, **semi.bounds, "ring": semi.details["ring"],
                                "witness": semi.witness},
        "integrally_closed": ic,
    }
    ok = shadow_nzd and ok_ii and semi.holds and ic_holds
    failing = [k for k, ok_k in (("nonzerodivisor", shadow_nzd), ("p_in_varpi^p_A", ok_ii),
                                 ("semiperfect_residue", semi.holds), ("integrally_closed", ic_holds)) if not ok_k]
    return CheckReport("mt2_hypotheses_audit", ok, None if ok else {"failing": failing},
                       {"M": ctx.M, "K": ctx.K}, (R.REF_MT2, R.REF_SEMIPERFECT, R.REF_INTEGRAL),
                       {"ring": ctx.descriptor, "varpi": str(varpi), "hypotheses": hyps})


# -- random instances ------------------------------------------------------------------------


def random_monomial_ring(rng: random.Random, p: int | None = None, K: int | None = None,
                         max_gen: int = 12) -> MonomialRing:
    p = p if p is not None else rng.choice([2, 3, 5])
    K = K if K is not None else rng.randint(0, 1)
    k = rng.randint(1, 3)
    gens = tuple(rng.randint(1, max_gen) for _ in range(k))
    A = MonomialRing(p, K, gens)
    return A.with_gens(A.gens, rng.choice(A.gens))


def random_transfer_instance(rng: random.Random, p: int | None = None):
    """A valid (A, B, I): S_A inside S_B with equal gcd and I = t^i B inside A."""
    p = p if p is not None else rng.choice([2, 3])
    while True:
        g = rng.choice([1, 1, 2])
        B = MonomialRing(p, 0, tuple(g * rng.randint(1, 4) for _ in range(rng.randint(1, 2))))
        if rng.random() < 0.25:
            A = B
        else:
            picks = [e for e in range(1, 4 * B.conductor + 3 * max(B.gens) + 8) if B.contains(e)]
            gens = rng.sample(picks, min(len(picks), rng.randint(1, 3)))
            A = MonomialRing(p, 0, tuple(gens))
            if A.g != B.g:
                continue
        i = next(e for e in range(A.conductor, A.conductor + 10 * B.g + 10) if B.contains(e) and e > 0)
        basis = sum(1 for e in range(B.conductor + i + 1) if B.contains(e) and e < i)
        if p**basis > 4096:
            continue
        return A, B, (i,)

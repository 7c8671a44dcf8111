"""Truncated Witt vectors W_M(F_q) and the Teichmuller lift.

W_M(F_q) is realised as the unramified ring Z/p^M[y]/(f), f the integer lift
of the primitive polynomial chosen by ``arith.field_modulus`` (plain Z/p^M
when q = p).  Its residue ring is GF(q) with the same f, so reduction and
lifting are coefficientwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import isqrt
from typing import NamedTuple

import numpy as np

from tiltkit import report as R
from tiltkit.arith import (
    RingCtx,
    RingElem,
    field_modulus,
    finite_field,
    frobenius_preimage,
    lift,
    max_enum,
    prime_factors,
    prime_power,
    proj_mod_p,
    unramified,
)
from tiltkit.errors import BadParameter, CtxMismatch, NotInImage, TooLarge
from tiltkit.report import FAILS, HOLDS, CheckReport
from tiltkit.tilt import sharp, tilt_from_residues

TEICH_Q_MAX = 81
TEICH_M_MAX = 6


@dataclass(frozen=True)
class WittCtx:
    q: int
    M: int

    def __post_init__(self):
        if prime_power(self.q) is None:
            raise BadParameter(f"q={self.q} is not a prime power")
        if self.M < 1:
            raise BadParameter(f"M must be >= 1, got {self.M}")

    @property
    def p(self) -> int:
        return prime_power(self.q)[0]

    @property
    def d(self) -> int:
        return prime_power(self.q)[1]

    @cached_property
    def realization(self) -> RingCtx:
        return unramified(self.q, self.M)

    @cached_property
    def residue(self) -> RingCtx:
        return finite_field(self.q)

    @property
    def modulus(self) -> tuple[int, ...]:
        return field_modulus(self.p, self.d)

    def describe(self) -> dict:
        return {"q": self.q, "M": self.M, "realization": self.realization.descriptor,
                "modulus": list(self.modulus)}


def witt_ctx(q: int, M: int) -> WittCtx:
    return WittCtx(q, M)


def _as_residue(a, ctx: WittCtx) -> RingElem:
    if isinstance(a, int):
        return ctx.residue.from_int(a)
    if isinstance(a, str):
        return ctx.residue.parse(a)
    if a.ctx == ctx.residue:
        return a
    if a.ctx == ctx.realization:
        return proj_mod_p(a)
    raise CtxMismatch(f"{a.ctx} is neither {ctx.residue} nor {ctx.realization}")


def teichmuller(a, ctx: WittCtx) -> RingElem:
    """The multiplicative lift omega(a): iterate y -> y^q from any lift until stable.

    Successive iterates agree modulo one more power of p each time, so at most
    M - 1 steps are needed.
    """
    abar = _as_residue(a, ctx)
    y = lift(abar, ctx.realization)
    for _ in range(ctx.M):
        nxt = y**ctx.q
        if nxt == y:
            return y
        y = nxt
    raise AssertionError("Teichmuller iteration did not stabilise")  # unreachable by the congruence bound


def sharp_of_residue(a, ctx: WittCtx) -> RingElem:
    """sharp of the tilt element (..., a^(1/p^2), a^(1/p), a) at depth M - 1."""
    abar = _as_residue(a, ctx)
    res = [abar]
    for _ in range(ctx.M - 1):
        res.append(frobenius_preimage(res[-1]))
    x = tilt_from_residues(ctx.realization, res)
    value, prec = sharp(x)
    assert prec == ctx.M
    return value


def sharp_equals_teichmuller(ctx: WittCtx) -> CheckReport:
    """Compare sharp (computed through the tilt) with omega on every element of F_q."""
    if ctx.q > TEICH_Q_MAX or ctx.M > TEICH_M_MAX:
        raise TooLarge(f"q={ctx.q}, M={ctx.M} beyond q <= {TEICH_Q_MAX}, M <= {TEICH_M_MAX}")
    mismatches = []
    for a in ctx.residue.elements():
        s = sharp_of_residue(a, ctx)
        w = teichmuller(a, ctx)
        if s != w:
            mismatches.append({"a": a.to_json(), "sharp": s.to_json(), "teichmuller": w.to_json()})
    return CheckReport(
        check="sharp_equals_teichmuller",
        verdict=HOLDS if not mismatches else FAILS,
        witness=mismatches[0] if mismatches else None,
        bounds={"q": ctx.q, "M": ctx.M, "depth": ctx.M - 1},
        refs=(R.REF_TEICHMULLER, R.REF_SHARP, R.REF_MONOID),
        details={**ctx.describe(), "checked": ctx.q, "mismatches": len(mismatches)},
    )


def sharp_image(ctx: WittCtx) -> list[RingElem]:
    return [teichmuller(a, ctx) for a in ctx.residue.elements()]


def in_sharp_image(a: RingElem, ctx: WittCtx) -> bool:
    return a == teichmuller(proj_mod_p(a), ctx)


class RootReport(NamedTuple):
    root: RingElem
    ambient_roots: tuple[RingElem, ...] | None
    image_roots: tuple[RingElem, ...]

    def to_json(self) -> dict:
        return {
            "root": self.root.to_json(),
            "ambient_roots": None if self.ambient_roots is None else [r.to_json() for r in self.ambient_roots],
            "image_roots": [r.to_json() for r in self.image_roots],
        }


def unique_p_root_in_sharp_image(a, ctx: WittCtx, enumerate_roots: bool = True) -> RootReport:
    """The unique p-th root of a inside the sharp image: omega((a mod p)^(1/p)).

    When the ring is small enough, all roots of t^p = a in the ambient ring are
    listed as well, to show that only one of them lies in the image.
    """
    if isinstance(a, (int, str)):
        a = ctx.realization.parse(str(a)) if isinstance(a, str) else ctx.realization.from_int(a)
    if a.ctx != ctx.realization:
        raise CtxMismatch(f"{a.ctx} vs {ctx.realization}")
    if not in_sharp_image(a, ctx):
        raise NotInImage(f"{a} is not a Teichmuller representative")
    root = teichmuller(frobenius_preimage(proj_mod_p(a)), ctx)
    if root ** ctx.p != a:
        raise AssertionError("p-th power of the Teichmuller root differs from a")
    image = sharp_image(ctx)
    image_roots = tuple(t for t in image if t ** ctx.p == a)
    ambient = None
    if enumerate_roots and ctx.realization.size <= max_enum():
        ambient = tuple(t for t in ctx.realization.elements() if t ** ctx.p == a)
    return RootReport(root, ambient, image_roots)


# -- vectorised checks on Z/p^M ---------------------------------------------------------


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    qs = prime_factors(p - 1)
    g = 2
    while any(pow(g, (p - 1) // q, p) == 1 for q in qs):
        g += 1
    return g


def primes_up_to(n: int) -> list[int]:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for k in range(2, isqrt(n) + 1):
        if sieve[k]:
            sieve[k * k :: k] = False
    return np.flatnonzero(sieve).tolist()


def _powmod_vec(base: int, exps: np.ndarray, m: int) -> np.ndarray:
    result = np.ones(len(exps), dtype=np.int64)
    b, e = base % m, exps.copy()
    while e.any():
        result = np.where(e & 1, result * b % m, result)
        e >>= 1
        b = b * b % m
    return result


def _power_table(base: int, n: int, m: int) -> np.ndarray:
    """base^k mod m for k < n, as an outer product of two sqrt(n)-sized tables."""
    B = isqrt(n) + 1
    small = _powmod_vec(base, np.arange(B, dtype=np.int64), m)
    big = _powmod_vec(pow(base, B, m), np.arange(-(-n // B), dtype=np.int64), m)
    return (big[:, None] * small[None, :] % m).ravel()[:n]


def zmod_unique_roots(p: int, M: int) -> dict:
    """Enumerate the sharp image T of Z/p^M and the p-th power of every element of T.

    T is {0} together with G^k (k < p - 1), G = omega(g) for a primitive root g;
    then (G^k)^p = H^k with H = G^p, so each p-th power costs one product.  For
    M >= 2 the table is checked against s^(p^(M-1)) for every residue s.
    Returns counts; ``ok`` means every a in T has exactly one p-th root in T.
    """
    m = p**M
    if m > 3_000_000_000:
        raise TooLarge("modulus too large for int64 products")
    g = primitive_root(p)
    G = pow(g, p ** (M - 1), m)
    H = pow(G, p, m)
    units = _power_table(G, p - 1, m)
    powers = _power_table(H, p - 1, m)
    in_image = np.bincount(units, minlength=m)
    hits = np.bincount(powers, minlength=m)
    distinct = in_image[0] == 0 and in_image.max() == 1
    table_matches = True
    if M >= 2:
        direct = _powmod_array(np.arange(1, p, dtype=np.int64), p ** (M - 1), m)
        table_matches = bool(np.array_equal(np.sort(direct), np.sort(units)))
    # 0 is its own only root; each unit of T must be hit exactly once by a unit of T
    unique = hits[0] == 0 and bool((hits[units] == 1).all())
    return {
        "p": p, "M": M, "image_size": int(len(units) + 1),
        "distinct": bool(distinct), "matches_direct_powers": table_matches,
        "exactly_one_root_each": bool(unique),
        "ok": bool(distinct and table_matches and unique),
    }


def _powmod_array(base: np.ndarray, e: int, m: int) -> np.ndarray:
    result = np.ones_like(base) % m
    b = base % m
    while e:
        if e & 1:
            result = (result * b) % m
        e >>= 1
        if e:
            b = (b * b) % m
    return result

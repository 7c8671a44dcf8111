"""Exact arithmetic in small p-adically truncated rings.

Four ring kinds are exposed through the descriptor mini-language:

    Zp p=<prime> M=<int>                    Z/p^M
    Zp[p^(1/p^<K>)] p=<prime> M=<int>       Z/p^M[x]/(x^(p^K) - p)
    Fq q=<p^d>                              GF(q)
    Fp[t^(1/p^<K>)]/t^<B> p=<prime>         F_p[t^(1/p^K)] truncated at t-degree B

plus ``W(Fq) q=<p^d> M=<int>``, the unramified ring Z/p^M[y]/(f) whose residue
field is GF(q); the Witt-vector checks run on it.

Every element is a tuple of least nonnegative residues.  Polynomial kinds store
the coefficient of x^i (or g^i, the class of the polynomial variable) at index
i.  ``PerfSeries`` stores the coefficient of t^(e/p^K) at index e, so all
exponents are integers scaled by p^K and strictly below B*p^K.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterable, Iterator, NamedTuple, Sequence

from tiltkit.errors import (
    BadParameter,
    CtxMismatch,
    NoPreimage,
    NotInvertible,
    ParseError,
    TooLarge,
)

ZMOD = "ZmodPM"
KUMMER = "KummerQuot"
FIELD = "FiniteField"
PERF = "PerfSeries"
UNRAM = "Unramified"

KINDS = (ZMOD, KUMMER, FIELD, PERF, UNRAM)
MIXED_KINDS = (ZMOD, KUMMER, UNRAM)

DEFAULT_MAX_ENUM = 10**6


def max_enum() -> int:
    """Enumeration cap, overridable through ``TILTKIT_MAX_ENUM``."""
    raw = os.environ.get("TILTKIT_MAX_ENUM")
    if raw is None:
        return DEFAULT_MAX_ENUM
    try:
        return int(raw)
    except ValueError:
        raise BadParameter(f"TILTKIT_MAX_ENUM must be an integer, got {raw!r}") from None


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, d) with q == p**d, or None if q is not a prime power."""
    if q < 2:
        return None
    p = prime_factors(q)
    if len(p) != 1:
        return None
    d = round(math.log(q, p[0]))
    for cand in (d - 1, d, d + 1):
        if cand >= 1 and p[0] ** cand == q:
            return p[0], cand
    return None


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# -- polynomial helpers (low-to-high coefficient lists) ----------------------


def _mulmod_poly(a: Sequence[int], b: Sequence[int], f: Sequence[int], m: int) -> tuple[int, ...]:
    # f is monic of degree n = len(f) - 1; a, b have length n
    n = len(f) - 1
    prod = [0] * (2 * n - 1) if n else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    for i in range(len(prod) - 1, n - 1, -1):
        c = prod[i] % m
        if c:
            base = i - n
            for j in range(n):
                if f[j]:
                    prod[base + j] -= c * f[j]
    return tuple(c % m for c in prod[:n])


def _powmod_poly(a: Sequence[int], e: int, f: Sequence[int], m: int) -> tuple[int, ...]:
    n = len(f) - 1
    result = (1 % m,) + (0,) * (n - 1)
    base = tuple(a)
    while e:
        if e & 1:
            result = _mulmod_poly(result, base, f, m)
        e >>= 1
        if e:
            base = _mulmod_poly(base, base, f, m)
    return result


@lru_cache(maxsize=None)
def field_modulus(p: int, d: int) -> tuple[int, ...]:
    """Monic primitive polynomial of degree d over F_p, low-to-high.

    The first candidate in the order of the integer encoding
    c_0 + c_1 p + ... + c_{d-1} p^(d-1) is chosen, so the choice is
    deterministic.  For d == 1 this is x - g with g the least primitive root.
    """
    q = p**d
    order = q - 1
    cofactors = [order // r for r in prime_factors(order)] if order > 1 else []
    for code in range(p**d):
        low = [(code // p**i) % p for i in range(d)]
        if low[0] == 0:
            continue
        f = tuple(low) + (1,)
        x = (0, 1) + (0,) * (d - 2) if d > 1 else ((-low[0]) % p,)
        one = (1,) + (0,) * (d - 1)
        if _powmod_poly(x, order, f, p) != one:
            continue
        if all(_powmod_poly(x, c, f, p) != one for c in cofactors):
            return f
    raise BadParameter(f"no primitive polynomial of degree {d} over F_{p}")


# -- contexts -----------------------------------------------------------------


@dataclass(frozen=True)
class RingCtx:
    """A finite ring model; see the module docstring for the kinds."""

    kind: str
    p: int
    M: int = 1
    K: int = 0
    B: int = 1
    d: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BadParameter(f"unknown ring kind {self.kind!r}")
        if not is_prime(self.p):
            raise BadParameter(f"p={self.p} is not prime")
        if self.M < 1:
            raise BadParameter(f"M must be >= 1, got {self.M}")
        if self.K < 0:
            raise BadParameter(f"K must be >= 0, got {self.K}")
        if self.B < 1:
            raise BadParameter(f"B must be >= 1, got {self.B}")
        if self.d < 1:
            raise BadParameter(f"d must be >= 1, got {self.d}")

    @property
    def q(self) -> int:
        return self.p**self.d

    @property
    def is_mixed(self) -> bool:
        return self.kind in MIXED_KINDS

    @property
    def prec_cap(self) -> int:
        """Largest meaningful p-adic precision exponent (1 in characteristic p)."""
        return self.M if self.is_mixed else 1

    @cached_property
    def coeff_mod(self) -> int:
        return self.p**self.M if self.is_mixed else self.p

    @cached_property
    def dim(self) -> int:
        if self.kind == ZMOD:
            return 1
        if self.kind == KUMMER:
            return self.p**self.K
        if self.kind in (FIELD, UNRAM):
            return self.d
        return self.B * self.p**self.K

    @cached_property
    def modulus(self) -> tuple[int, ...]:
        """Monic defining polynomial (low-to-high) for the polynomial kinds."""
        if self.kind == KUMMER:
            n = self.dim
            return ((-self.p) % self.coeff_mod,) + (0,) * (n - 1) + (1,)
        if self.kind in (FIELD, UNRAM):
            return field_modulus(self.p, self.d)
        return ()

    @property
    def size(self) -> int:
        return self.coeff_mod**self.dim

    @property
    def var(self) -> str:
        return {ZMOD: "", KUMMER: "x", FIELD: "g", UNRAM: "g", PERF: "t"}[self.kind]

    @property
    def descriptor(self) -> str:
        if self.kind == ZMOD:
            return f"Zp p={self.p} M={self.M}"
        if self.kind == KUMMER:
            return f"Zp[p^(1/p^{self.K})] p={self.p} M={self.M}"
        if self.kind == FIELD:
            return f"Fq q={self.q}"
        if self.kind == UNRAM:
            return f"W(Fq) q={self.q} M={self.M}"
        if self.K == 0:
            return f"Fp[t]/t^{self.B} p={self.p}"
        return f"Fp[t^(1/p^{self.K})]/t^{self.B} p={self.p}"

    def __str__(self) -> str:
        return self.descriptor

    # constructors of elements
    def elem(self, coeffs: Iterable[int]) -> RingElem:
        coeffs = tuple(coeffs)
        if len(coeffs) > self.dim:
            raise BadParameter(f"{len(coeffs)} coefficients for a ring of dimension {self.dim}")
        coeffs = coeffs + (0,) * (self.dim - len(coeffs))
        return RingElem(self, tuple(c % self.coeff_mod for c in coeffs))

    def from_int(self, n: int) -> RingElem:
        return self.elem((n,))

    def zero(self) -> RingElem:
        return self.from_int(0)

    def one(self) -> RingElem:
        return self.from_int(1)

    def gen(self) -> RingElem:
        """The class of the polynomial variable (x, g, or t^(1/p^K))."""
        if self.kind == ZMOD:
            raise CtxMismatch("Z/p^M has no polynomial generator")
        if self.kind == FIELD and self.d == 1:
            return self.from_int(-self.modulus[0])
        if self.dim < 2:
            raise CtxMismatch(f"{self} has no nonconstant generator")
        return self.elem((0, 1))

    def monomial(self, scaled_exp: int, coeff: int = 1) -> RingElem:
        """coeff * var^scaled_exp, reduced by the defining relation."""
        if self.kind == PERF:
            if scaled_exp < 0:
                raise BadParameter("negative exponent")
            c = [0] * self.dim
            if scaled_exp < self.dim:
                c[scaled_exp] = coeff
            return self.elem(c)
        return self.from_int(coeff) * self.gen() ** scaled_exp

    def elements(self) -> Iterator[RingElem]:
        """Enumerate the whole ring, refusing above the enumeration cap."""
        cap = max_enum()
        if self.size > cap:
            raise TooLarge(f"{self} has {self.size} elements (cap {cap})", self.size, cap)
        m = self.coeff_mod
        for coeffs in product(range(m), repeat=self.dim):
            yield RingElem(self, coeffs[::-1])

    def parse(self, text: str) -> RingElem:
        return parse_elem(text, self)


class RingElem:
    """Immutable element of a ``RingCtx`` in canonical reduced form."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: RingCtx, coeffs: tuple[int, ...]):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("RingElem is immutable")

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coeffs == self.ctx.from_int(other).coeffs
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    def _coerce(self, other) -> RingElem:
        if isinstance(other, int):
            return self.ctx.from_int(other)
        if isinstance(other, RingElem):
            if other.ctx != self.ctx:
                raise CtxMismatch(f"{self.ctx} vs {other.ctx}")
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return elem_add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return elem_add(self, elem_neg(other))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return elem_add(other, elem_neg(self))

    def __neg__(self):
        return elem_neg(self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return elem_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return elem_pow(self, n)

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self):
        return format_elem(self)

    def __repr__(self):
        return f"RingElem({format_elem(self)!r} in {self.ctx})"

    def to_json(self):
        """JSON form: residue array, or [scaled exponent, coefficient] pairs."""
        if self.ctx.kind == PERF:
            return [[e, c] for e, c in enumerate(self.coeffs) if c]
        return list(self.coeffs)


# -- ring operations ----------------------------------------------------------


def _check_same(a: RingElem, b: RingElem) -> RingCtx:
    if a.ctx != b.ctx:
        raise CtxMismatch(f"{a.ctx} vs {b.ctx}")
    return a.ctx


def elem_add(a: RingElem, b: RingElem) -> RingElem:
    ctx = _check_same(a, b)
    m = ctx.coeff_mod
    return RingElem(ctx, tuple((x + y) % m for x, y in zip(a.coeffs, b.coeffs)))


def elem_neg(a: RingElem) -> RingElem:
    m = a.ctx.coeff_mod
    return RingElem(a.ctx, tuple((-x) % m for x in a.coeffs))


def elem_mul(a: RingElem, b: RingElem) -> RingElem:
    ctx = _check_same(a, b)
    m = ctx.coeff_mod
    if ctx.kind == ZMOD:
        return RingElem(ctx, ((a.coeffs[0] * b.coeffs[0]) % m,))
    if ctx.kind == PERF:
        n = ctx.dim
        out = [0] * n
        for i, ai in enumerate(a.coeffs):
            if ai:
                for j in range(n - i):
                    bj = b.coeffs[j]
                    if bj:
                        out[i + j] += ai * bj
        return RingElem(ctx, tuple(c % m for c in out))
    return RingElem(ctx, _mulmod_poly(a.coeffs, b.coeffs, ctx.modulus, m))


def elem_pow(a: RingElem, n: int) -> RingElem:
    if n < 0:
        raise BadParameter("negative exponent; use elem_inv")
    ctx = a.ctx
    if ctx.kind == ZMOD:
        return RingElem(ctx, (pow(a.coeffs[0], n, ctx.coeff_mod),))
    result = ctx.one()
    base = a
    while n:
        if n & 1:
            result = elem_mul(result, base)
        n >>= 1
        if n:
            base = elem_mul(base, base)
    return result


def pval(a: RingElem) -> int:
    """Largest r <= prec_cap with every coefficient of a divisible by p^r."""
    cap = a.ctx.prec_cap
    if not a.ctx.is_mixed:
        return cap if a.is_zero() else 0
    best = cap
    for c in a.coeffs:
        if c:
            best = min(best, vp(c, a.ctx.p))
    return best


def congruent(a: RingElem, b: RingElem, r: int) -> bool:
    """a == b modulo p^r (coefficientwise); r >= prec_cap means equality."""
    _check_same(a, b)
    return pval(a - b) >= min(r, a.ctx.prec_cap)


def residue_ctx(ctx: RingCtx) -> RingCtx:
    """The ring A/pA as a context of its own."""
    if ctx.kind == ZMOD:
        return finite_field(ctx.p)
    if ctx.kind == KUMMER:
        return perf_series(ctx.p, 0, ctx.p**ctx.K)
    if ctx.kind == UNRAM:
        return finite_field(ctx.q)
    return ctx


def proj_mod_p(a: RingElem) -> RingElem:
    """Image of a in A/pA.

    Z/p^M maps to F_p; Z/p^M[x]/(x^(p^K) - p) maps to F_p[t]/t^(p^K) with
    t the class of x; the unramified ring maps to GF(q).
    """
    if not a.ctx.is_mixed:
        raise CtxMismatch(f"{a.ctx} already has characteristic p")
    target = residue_ctx(a.ctx)
    return target.elem(c % a.ctx.p for c in a.coeffs)


def residue(a: RingElem) -> RingElem:
    """proj_mod_p for mixed rings, identity in characteristic p."""
    return proj_mod_p(a) if a.ctx.is_mixed else a


def lift(abar: RingElem, ctx: RingCtx) -> RingElem:
    """Canonical lift of a residue class: same coefficient vector."""
    if residue_ctx(ctx) != abar.ctx:
        raise CtxMismatch(f"{abar.ctx} is not the residue ring of {ctx}")
    if not ctx.is_mixed:
        return abar
    return ctx.elem(abar.coeffs)


def frobenius(a: RingElem) -> RingElem:
    if a.ctx.is_mixed:
        raise CtxMismatch(f"Frobenius needs characteristic p, got {a.ctx}")
    ctx = a.ctx
    if ctx.kind == PERF:
        out = [0] * ctx.dim
        for e, c in enumerate(a.coeffs):
            if c and e * ctx.p < ctx.dim:
                out[e * ctx.p] = c
        return RingElem(ctx, tuple(out))
    return elem_pow(a, ctx.p)


def frobenius_preimage(a: RingElem) -> RingElem:
    """Some b with b^p == a; raises NoPreimage if none exists."""
    ctx = a.ctx
    if ctx.is_mixed:
        raise CtxMismatch(f"Frobenius needs characteristic p, got {ctx}")
    if ctx.kind == FIELD:
        return elem_pow(a, ctx.q // ctx.p)
    out = [0] * ctx.dim
    for e, c in enumerate(a.coeffs):
        if c:
            if e % ctx.p:
                raise NoPreimage(
                    f"t^({Fraction(e, ctx.p**ctx.K)}) has no p-th root at depth K={ctx.K}"
                )
            out[e // ctx.p] = c
    return RingElem(ctx, tuple(out))


def _residue_inverse(a: RingElem) -> RingElem:
    # inverse modulo the maximal ideal, lifted back into a.ctx
    ctx = a.ctx
    p = ctx.p
    if ctx.kind in (FIELD, UNRAM):
        fctx = finite_field(ctx.q)
        abar = fctx.elem(c % p for c in a.coeffs)
        if abar.is_zero():
            raise NotInvertible(f"{a} is not a unit")
        inv = elem_pow(abar, ctx.q - 2)
        return ctx.elem(inv.coeffs)
    c0 = a.coeffs[0] % p
    if c0 == 0:
        raise NotInvertible(f"{a} is not a unit")
    return ctx.from_int(pow(c0, -1, p))


def elem_inv(a: RingElem) -> RingElem:
    """Multiplicative inverse (Newton iteration from the residue inverse)."""
    y = _residue_inverse(a)
    one = a.ctx.one()
    two = a.ctx.from_int(2)
    for _ in range(4 * (a.ctx.dim * a.ctx.M).bit_length() + 8):
        if a * y == one:
            return y
        y = y * (two - a * y)
    if a * y == one:
        return y
    raise NotInvertible(f"{a} is not a unit")


def uniformizer_valuation(a: RingElem) -> int | None:
    """Valuation in the chain-ring sense: x-adic for Kummer, t-adic for PerfSeries.

    Z/p^M[x]/(x^N - p) is a chain ring with maximal ideal (x) and x^(NM) = 0,
    so a = x^v * unit with v = min_i (N * v_p(c_i) + i).  For Z/p^M and the
    unramified ring the uniformizer is p.  Returns None for zero.
    """
    ctx = a.ctx
    if a.is_zero():
        return None
    if ctx.kind == KUMMER:
        n = ctx.dim
        return min(n * vp(c, ctx.p) + i for i, c in enumerate(a.coeffs) if c)
    if ctx.kind in (ZMOD, UNRAM):
        return pval(a)
    if ctx.kind == PERF:
        return min(i for i, c in enumerate(a.coeffs) if c)
    return 0


def split_uniformizer(a: RingElem) -> tuple[int, RingElem]:
    """Write a nonzero a as pi^v * u with u a unit, exactly."""
    ctx = a.ctx
    v = uniformizer_valuation(a)
    if v is None:
        raise NotInvertible("zero has no unit part")
    if ctx.kind in (ZMOD, UNRAM):
        return v, ctx.elem(c // ctx.p**v for c in a.coeffs)
    if ctx.kind == PERF:
        return v, ctx.elem(a.coeffs[v:])
    if ctx.kind == FIELD:
        return 0, a
    coeffs = list(a.coeffs)
    for _ in range(v):
        # a = x * (c_1 + ... + c_{N-1} x^{N-2} + (c_0/p) x^{N-1}) since x^N = p
        c0 = coeffs[0]
        coeffs = coeffs[1:] + [c0 // ctx.p]
    return v, ctx.elem(coeffs)


class ZeroDivisorCheck(NamedTuple):
    nonzerodivisor: bool
    witness: RingElem | None
    method: str


def zero_divisor_check(a: RingElem) -> ZeroDivisorCheck:
    """Decide whether a is a nonzero divisor; a failing verdict carries b != 0 with ab == 0.

    All kinds here are local rings whose maximal ideal is generated by one
    nilpotent element (or fields), so a is a nonzero divisor iff it is a unit,
    and pi^(top - v) kills pi^v * unit.
    """
    ctx = a.ctx
    if a.is_zero():
        return ZeroDivisorCheck(False, ctx.one(), "structural")
    v = uniformizer_valuation(a)
    if v == 0:
        return ZeroDivisorCheck(True, None, "structural")
    if ctx.kind == KUMMER:
        top = ctx.dim * ctx.M
        witness = ctx.gen() ** (top - v)
    elif ctx.kind in (ZMOD, UNRAM):
        witness = ctx.from_int(ctx.p ** (ctx.M - v))
    else:
        witness = ctx.monomial(ctx.dim - v)
    if witness.is_zero() or not (a * witness).is_zero():
        # structural rule did not produce a valid witness; fall back to search
        return _zero_divisor_by_enumeration(a)
    return ZeroDivisorCheck(False, witness, "structural")


def _zero_divisor_by_enumeration(a: RingElem) -> ZeroDivisorCheck:
    for b in a.ctx.elements():
        if not b.is_zero() and (a * b).is_zero():
            return ZeroDivisorCheck(False, b, "enumeration")
    return ZeroDivisorCheck(True, None, "enumeration")


def random_elem(ctx: RingCtx, rng) -> RingElem:
    """Uniform random element; ``rng`` is a ``random.Random``."""
    m = ctx.coeff_mod
    return RingElem(ctx, tuple(rng.randrange(m) for _ in range(ctx.dim)))


def is_nonzerodivisor(a: RingElem, method: str = "structural") -> bool:
    if method == "enumeration":
        return _zero_divisor_by_enumeration(a).nonzerodivisor
    return zero_divisor_check(a).nonzerodivisor


# -- context constructors -------------------------------------------------------


def zmod(p: int, M: int) -> RingCtx:
    return RingCtx(ZMOD, p, M=M)


def kummer(p: int, K: int, M: int) -> RingCtx:
    return RingCtx(KUMMER, p, M=M, K=K)


def finite_field(q: int) -> RingCtx:
    pp = prime_power(q)
    if pp is None:
        raise BadParameter(f"q={q} is not a prime power")
    return RingCtx(FIELD, pp[0], d=pp[1])


def perf_series(p: int, K: int, B: int) -> RingCtx:
    return RingCtx(PERF, p, K=K, B=B)


def unramified(q: int, M: int) -> RingCtx:
    pp = prime_power(q)
    if pp is None:
        raise BadParameter(f"q={q} is not a prime power")
    if pp[1] == 1:
        return zmod(pp[0], M)
    return RingCtx(UNRAM, pp[0], M=M, d=pp[1])


# -- descriptor mini-language ------------------------------------------------------

_HEADS = [
    (re.compile(r"^Zp$"), ZMOD),
    (re.compile(r"^Zp\[p\^\(1/p\^(\d+)\)\]$"), KUMMER),
    (re.compile(r"^Fq$"), FIELD),
    (re.compile(r"^Fp\[t\^\(1/p\^(\d+)\)\]/t\^(\d+)$"), PERF),
    (re.compile(r"^Fp\[t\]/t\^(\d+)$"), PERF),
    (re.compile(r"^W\(Fq\)$"), UNRAM),
]

_REQUIRED_KEYS = {ZMOD: {"p", "M"}, KUMMER: {"p", "M"}, FIELD: {"q"}, PERF: {"p"}, UNRAM: {"q", "M"}}


def _parse_keys(tokens: list[str], descriptor: str) -> dict[str, int]:
    out = {}
    for tok in tokens:
        key, sep, val = tok.partition("=")
        if not sep or not val.isdigit() or key in out:
            raise ParseError(f"bad parameter {tok!r} in {descriptor!r}")
        out[key] = int(val)
    return out


def ring_make(descriptor: str) -> RingCtx:
    """Parse a ring descriptor; see the module docstring for the grammar."""
    tokens = descriptor.split()
    if not tokens:
        raise ParseError("empty ring descriptor")
    head, rest = tokens[0], tokens[1:]
    for pattern, kind in _HEADS:
        m = pattern.match(head)
        if m:
            break
    else:
        raise ParseError(f"unrecognised ring {head!r}")
    keys = _parse_keys(rest, descriptor)
    if set(keys) != _REQUIRED_KEYS[kind]:
        raise ParseError(
            f"{descriptor!r}: expected parameters {sorted(_REQUIRED_KEYS[kind])}, got {sorted(keys)}"
        )
    if kind == ZMOD:
        return zmod(keys["p"], keys["M"])
    if kind == KUMMER:
        return kummer(keys["p"], int(m.group(1)), keys["M"])
    if kind == FIELD:
        return finite_field(keys["q"])
    if kind == UNRAM:
        return unramified(keys["q"], keys["M"])
    if len(m.groups()) == 2:
        K, B = int(m.group(1)), int(m.group(2))
    else:
        K, B = 0, int(m.group(1))
    return perf_series(keys["p"], K, B)


# -- element text format ------------------------------------------------------------

_TERM = re.compile(r"^(?P<coef>\d+)?\*?(?:(?P<var>[a-z])(?:\^(?P<exp>.+))?)?$")


def split_terms(text: str) -> list[tuple[int, str]]:
    """Split 'a + b - c' into signed terms, ignoring signs inside parentheses or after '^'."""
    s = text.replace(" ", "")
    if not s:
        raise ParseError("empty element")
    terms, depth, start, sign = [], 0, 0, 1
    i = 0
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        start = i = 1
    while i < len(s):
        ch = s[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > start and s[i - 1] != "^":
            terms.append((sign, s[start:i]))
            sign = -1 if ch == "-" else 1
            start = i + 1
        i += 1
    terms.append((sign, s[start:]))
    if any(not t for _, t in terms):
        raise ParseError(f"malformed element {text!r}")
    return terms


def parse_exponent(raw: str, p: int) -> Fraction:
    """Parse '3', '-1', '(1/2)', '1/p^2', '(2/3)' into a Fraction."""
    s = raw
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    num, sep, den = s.partition("/")
    try:
        numv = int(num)
        if not sep:
            return Fraction(numv)
        if den.startswith("p^"):
            denv = p ** int(den[2:])
        elif "^" in den:
            b, e = den.split("^", 1)
            denv = int(b) ** int(e)
        else:
            denv = int(den)
        return Fraction(numv, denv)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad exponent {raw!r}") from None


def parse_terms(text: str, p: int, var: str) -> list[tuple[int, Fraction]]:
    """Parse a polynomial expression in ``var`` into (coefficient, exponent) terms."""
    out = []
    for sign, term in split_terms(text):
        m = _TERM.match(term)
        if not m or (m.group("coef") is None and m.group("var") is None):
            if term == "p":
                out.append((sign * p, Fraction(0)))
                continue
            raise ParseError(f"bad term {term!r}")
        coef = int(m.group("coef")) if m.group("coef") is not None else 1
        v = m.group("var")
        if v is None:
            out.append((sign * coef, Fraction(0)))
            continue
        if v == "p" and m.group("exp") is None:
            out.append((sign * coef * p, Fraction(0)))
            continue
        if v == "p":
            e = parse_exponent(m.group("exp"), p)
            if e.denominator != 1 or e < 0:
                raise ParseError(f"bad power of p in {term!r}")
            out.append((sign * coef * p ** int(e), Fraction(0)))
            continue
        if v != var:
            raise ParseError(f"unknown variable {v!r} (expected {var!r})")
        e = parse_exponent(m.group("exp"), p) if m.group("exp") is not None else Fraction(1)
        out.append((sign * coef, e))
    return out


def parse_elem(text: str, ctx: RingCtx) -> RingElem:
    """Parse an element like '3', 'x^3', '2 + g', 't^(1/2) + t'."""
    text = text.strip()
    if not text:
        raise ParseError("empty element")
    if ctx.kind == ZMOD:
        total = 0
        for coef, e in parse_terms(text, ctx.p, "_"):
            total += coef
        return ctx.from_int(total)
    result = ctx.zero()
    scale = ctx.p**ctx.K if ctx.kind == PERF else 1
    for coef, e in parse_terms(text, ctx.p, ctx.var):
        scaled = e * scale
        if scaled.denominator != 1 or scaled < 0:
            raise ParseError(f"exponent {e} not representable in {ctx}")
        result = result + ctx.monomial(int(scaled), coef)
    return result


def elem_from_json(obj, ctx: RingCtx) -> RingElem:
    if isinstance(obj, str):
        return parse_elem(obj, ctx)
    if isinstance(obj, int):
        return ctx.from_int(obj)
    if not isinstance(obj, list):
        raise ParseError(f"cannot read element from {obj!r}")
    if ctx.kind == PERF:
        coeffs = [0] * ctx.dim
        for pair in obj:
            if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(v, int) for v in pair)):
                raise ParseError(f"expected [exponent, coefficient] pairs, got {pair!r}")
            e, c = pair
            if not 0 <= e:
                raise ParseError(f"negative exponent {e}")
            if e < ctx.dim:
                coeffs[e] = (coeffs[e] + c) % ctx.coeff_mod
        return ctx.elem(coeffs)
    if not all(isinstance(c, int) for c in obj):
        raise ParseError(f"expected integer residues, got {obj!r}")
    if len(obj) > ctx.dim:
        raise ParseError(f"{len(obj)} residues for a ring of dimension {ctx.dim}")
    return ctx.elem(obj)


def _fmt_exp(e: Fraction) -> str:
    if e == 1:
        return ""
    if e.denominator == 1:
        return f"^{e.numerator}"
    return f"^({e.numerator}/{e.denominator})"


def format_elem(a: RingElem) -> str:
    ctx = a.ctx
    if ctx.kind == ZMOD:
        return str(a.coeffs[0])
    if ctx.kind == FIELD and ctx.d == 1:
        return str(a.coeffs[0])
    scale = ctx.p**ctx.K if ctx.kind == PERF else 1
    parts = []
    for i, c in enumerate(a.coeffs):
        if not c:
            continue
        if i == 0:
            parts.append(str(c))
            continue
        mono = ctx.var + _fmt_exp(Fraction(i, scale))
        parts.append(mono if c == 1 else f"{c}*{mono}")
    return " + ".join(parts) if parts else "0"

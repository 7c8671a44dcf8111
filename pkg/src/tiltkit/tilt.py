"""The tilt at finite depth, via its presentation as p-power compatible sequences.

A ``TiltElem`` stores a_0, a_1, ..., a_D in A itself with a_{n+1}^p == a_n
(modulo p^prec), i.e. the truncated limit of A along x -> x^p, which the
monoid lemma identifies with the tilt lim A/pA along Frobenius.  The 0-th
component of the canonical representative is determined by the residues of
a_0..a_D only modulo p^(D+1): one depth step buys one power of p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from tiltkit import report as R
from tiltkit.arith import (
    RingCtx,
    RingElem,
    congruent,
    elem_from_json,
    elem_pow,
    lift,
    max_enum,
    pval,
    random_elem,
    residue,
    residue_ctx,
    ring_make,
)
from tiltkit.errors import (
    BadParameter,
    CtxMismatch,
    Incompatible,
    InsufficientDepth,
    NotCauchy,
    ParseError,
    TooLarge,
)
from tiltkit.report import FAILS, HOLDS, CheckReport


class Certified(NamedTuple):
    """A ring element known modulo p^prec."""

    value: RingElem
    prec: int


@dataclass(frozen=True)
class TiltElem:
    ctx: RingCtx
    seq: tuple[RingElem, ...]
    prec: int
    cert: int = 1  # every component matches the canonical representative mod p^cert

    def __post_init__(self):
        if not self.seq:
            raise BadParameter("a tilt element needs at least one component")
        if not 1 <= self.prec <= self.ctx.prec_cap:
            raise BadParameter(f"precision {self.prec} outside 1..{self.ctx.prec_cap}")
        if not 1 <= self.cert <= self.ctx.prec_cap:
            raise BadParameter(f"certificate {self.cert} outside 1..{self.ctx.prec_cap}")

    @property
    def depth(self) -> int:
        return len(self.seq) - 1

    def component_precision(self, n: int) -> int:
        """Precision to which a_n agrees with the canonical representative."""
        return min(max(self.depth - n + 1, self.cert), self.ctx.prec_cap)

    def __add__(self, other: TiltElem) -> TiltElem:
        return tilt_add(self, other)

    def __mul__(self, other: TiltElem) -> TiltElem:
        return tilt_mul(self, other)

    def __pow__(self, n: int) -> TiltElem:
        return tilt_pow(self, n)

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.seq)

    def truncate(self, depth: int) -> TiltElem:
        if depth > self.depth:
            raise InsufficientDepth(f"cannot extend depth {self.depth} to {depth}", self.depth)
        return TiltElem(self.ctx, self.seq[: depth + 1], self.prec, self.cert)

    def __str__(self):
        body = ", ".join(str(a) for a in self.seq)
        return f"({body}) mod p^{self.prec}"

    def to_json(self) -> dict:
        out = {"ctx": self.ctx.descriptor, "seq": [a.to_json() for a in self.seq], "prec": self.prec}
        if self.cert > 1:
            out["cert"] = self.cert
        return out

    @classmethod
    def from_json(cls, obj: dict) -> TiltElem:
        try:
            ctx = ring_make(obj["ctx"])
            seq = [elem_from_json(e, ctx) for e in obj["seq"]]
            prec = int(obj.get("prec", ctx.prec_cap))
            cert = int(obj.get("cert", 1))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed tilt element: {exc}") from None
        for n in range(len(seq) - 1):
            if not congruent(seq[n + 1] ** ctx.p, seq[n], prec):
                defect = seq[n + 1] ** ctx.p - seq[n]
                raise Incompatible(f"relation fails at index {n}", n, pval(defect))
        return cls(ctx, tuple(seq), prec, cert)


def _elems(ctx: RingCtx, seq: Iterable) -> tuple[RingElem, ...]:
    out = []
    for a in seq:
        if isinstance(a, str):
            a = ctx.parse(a)
        elif isinstance(a, int):
            a = ctx.from_int(a)
        if a.ctx != ctx:
            raise CtxMismatch(f"{a.ctx} vs {ctx}")
        out.append(a)
    return tuple(out)


def tilt_lift(ctx: RingCtx, seq: Sequence) -> TiltElem:
    """Build a tilt element from a_0, a_1, ..., a_D, checking a_{n+1}^p == a_n exactly."""
    elems = _elems(ctx, seq)
    if not elems:
        raise BadParameter("empty sequence")
    for n in range(len(elems) - 1):
        defect = elems[n + 1] ** ctx.p - elems[n]
        if not defect.is_zero():
            raise Incompatible(
                f"a_{n + 1}^{ctx.p} != a_{n} (defect has p-adic valuation {pval(defect)})",
                n,
                pval(defect),
            )
    return TiltElem(ctx, elems, ctx.prec_cap)


def limit_pth_powers(ctx: RingCtx, approximants: Sequence) -> Certified:
    """Stabilised value c_L^(p^L) of a sequence with c_{k+1}^p == c_k mod p.

    By the p-power congruence the value is certified modulo p^min(L+1, M).
    """
    c = _elems(ctx, approximants)
    if not c:
        raise BadParameter("no approximants")
    for k in range(len(c) - 1):
        if not congruent(c[k + 1] ** ctx.p, c[k], 1):
            raise NotCauchy(f"c_{k + 1}^p is not congruent to c_{k} mod p", k)
    L = len(c) - 1
    return Certified(elem_pow(c[L], ctx.p**L), min(L + 1, ctx.prec_cap))


def sharp(x: TiltElem) -> Certified:
    """The sharp (monoidal) map: 0-th component of the canonical representative.

    Certified to p^min(D+1, M), or further when the components themselves came
    out of a limit (``x.cert``).
    """
    value, prec = limit_pth_powers(x.ctx, x.seq)
    return Certified(value, min(max(prec, x.cert), x.ctx.prec_cap))


def _common(x: TiltElem, y: TiltElem) -> tuple[RingCtx, int]:
    if x.ctx != y.ctx:
        raise CtxMismatch(f"{x.ctx} vs {y.ctx}")
    return x.ctx, min(x.depth, y.depth)


def tilt_add(x: TiltElem, y: TiltElem, target: int | None = None) -> TiltElem:
    """Sum via (lim_m (a_{n+m} + b_{n+m})^(p^m))_n.

    In mixed characteristic each kept component is certified modulo p^target,
    which costs target - 1 components of depth.  ``target`` defaults to the
    best reachable precision min(M, D + 1).  In characteristic p the sum is
    componentwise and exact.
    """
    ctx, D = _common(x, y)
    if not ctx.is_mixed:
        if target is not None and target > 1:
            raise InsufficientDepth("characteristic-p sums are exact at precision 1", 1)
        seq = tuple(x.seq[n] + y.seq[n] for n in range(D + 1))
        return TiltElem(ctx, seq, min(x.prec, y.prec))
    best = min(ctx.prec_cap, D + 1)
    r = best if target is None else target
    if r < 1:
        raise BadParameter(f"target precision must be >= 1, got {r}")
    if r > best:
        raise InsufficientDepth(
            f"precision p^{r} needs depth {r - 1}, inputs have depth {D} (best p^{best})", best
        )
    keep = D - r + 1
    top = x.seq[D] + y.seq[D]
    comps = [top]
    for _ in range(D):
        comps.append(comps[-1] ** ctx.p)
    # comps[j] = top^(p^j) is component D - j
    seq = tuple(comps[D - n] for n in range(keep + 1))
    return TiltElem(ctx, seq, r, r)


def tilt_mul(x: TiltElem, y: TiltElem) -> TiltElem:
    ctx, D = _common(x, y)
    seq = tuple(x.seq[n] * y.seq[n] for n in range(D + 1))
    return TiltElem(ctx, seq, min(x.prec, y.prec), min(x.cert, y.cert))


def tilt_pow(x: TiltElem, n: int) -> TiltElem:
    return TiltElem(x.ctx, tuple(a**n for a in x.seq), x.prec, x.cert)


def tilt_frobenius(x: TiltElem) -> TiltElem:
    """Componentwise p-th power; for exact sequences this is the shift (a_0^p, a_0, ..., a_{D-1})."""
    return tilt_pow(x, x.ctx.p)


def tilt_frobenius_inv(x: TiltElem) -> TiltElem:
    """Inverse Frobenius: drop a_0, giving (a_1, ..., a_D) at depth D - 1."""
    if x.depth < 1:
        raise InsufficientDepth("inverse Frobenius needs depth >= 1", 0)
    return TiltElem(x.ctx, x.seq[1:], x.prec, x.cert)


def tilt_equal(x: TiltElem, y: TiltElem, r: int | None = None) -> bool:
    """Componentwise congruence mod p^r up to the common depth."""
    ctx, D = _common(x, y)
    if r is None:
        r = min(x.prec, y.prec)
    return all(congruent(x.seq[n], y.seq[n], r) for n in range(D + 1))


def tilt_one(ctx: RingCtx, depth: int) -> TiltElem:
    return TiltElem(ctx, (ctx.one(),) * (depth + 1), ctx.prec_cap)


def tilt_zero(ctx: RingCtx, depth: int) -> TiltElem:
    return TiltElem(ctx, (ctx.zero(),) * (depth + 1), ctx.prec_cap)


def tilt_residues(x: TiltElem) -> tuple[RingElem, ...]:
    """Image in lim A/pA: the componentwise residues."""
    return tuple(residue(a) for a in x.seq)


def tilt_from_residues(ctx: RingCtx, residues: Sequence[RingElem]) -> TiltElem:
    """Canonical representative of a Frobenius-compatible residue sequence.

    Component n is lift(abar_D)^(p^(D-n)), the limit of the p-power
    approximants; it is correct modulo p^min(D-n+1, M).
    """
    rctx = residue_ctx(ctx)
    res = tuple(residues)
    if not res:
        raise BadParameter("empty residue sequence")
    for r in res:
        if r.ctx != rctx:
            raise CtxMismatch(f"residues must live in {rctx}, got {r.ctx}")
    for n in range(len(res) - 1):
        if res[n + 1] ** ctx.p != res[n]:
            raise Incompatible(f"residue {n + 1} is not a p-th root of residue {n}", n, 0)
    D = len(res) - 1
    comps = [lift(res[D], ctx)]
    for _ in range(D):
        comps.append(comps[-1] ** ctx.p)
    return TiltElem(ctx, tuple(reversed(comps)), ctx.prec_cap)


def random_tilt(ctx: RingCtx, depth: int, rng) -> TiltElem:
    """Exactly compatible sequence generated by a uniformly random top component."""
    top = random_elem(ctx, rng)
    comps = [top]
    for _ in range(depth):
        comps.append(comps[-1] ** ctx.p)
    return TiltElem(ctx, tuple(reversed(comps)), ctx.prec_cap)


# -- the tilt of a finite ring ------------------------------------------------------


def _stable_image(elements: list, step) -> list:
    current = set(elements)
    while True:
        nxt = {step(a) for a in current}
        if nxt == current:
            return sorted(current, key=lambda a: a.coeffs)
        current = nxt


def perfect_core(ctx: RingCtx) -> list[RingElem]:
    """Elements of A/pA lying in the image of every Frobenius power.

    For a finite ring this set, on which Frobenius is a bijection, is exactly
    the tilt lim A/pA.
    """
    rctx = residue_ctx(ctx)
    p = ctx.p
    return _stable_image(list(rctx.elements()), lambda a: a**p)


def tilt_core(ctx: RingCtx, depth: int | None = None) -> list[TiltElem]:
    """Every element of the tilt of a finite ring, as canonical tilt elements."""
    if depth is None:
        depth = max(ctx.prec_cap - 1, 1)
    core = perfect_core(ctx)
    p = ctx.p
    inverse = {a**p: a for a in core}
    out = []
    for a in core:
        res = [a]
        for _ in range(depth):
            res.append(inverse[res[-1]])
        out.append(tilt_from_residues(ctx, res))
    return out


def tilt_is_injective_sharp(ctx: RingCtx, depth: int | None = None) -> CheckReport:
    """Search for two distinct compatible root systems with the same a_0.

    Compatible systems of the (infinite) limit are the chains that extend
    forever, i.e. whose entries lie in the stable image P of x -> x^p on A.
    Finite chains that do not extend are counted separately: at finite
    precision they can share a_0 without contradicting injectivity.
    """
    if depth is None:
        depth = max(ctx.prec_cap, 1)
    cap = max_enum()
    if ctx.size * (depth + 1) > cap:
        raise TooLarge(f"{ctx} at depth {depth} exceeds the enumeration cap", ctx.size, cap)
    p = ctx.p
    elements = list(ctx.elements())
    stable = set(_stable_image(elements, lambda a: a**p))
    by_head: dict[RingElem, list[tuple[RingElem, ...]]] = {}
    truncated: dict[RingElem, set] = {}
    for top in elements:
        chain = [top]
        for _ in range(depth):
            chain.append(chain[-1] ** p)
        chain = tuple(reversed(chain))
        if top in stable:
            by_head.setdefault(chain[0], []).append(chain)
        truncated.setdefault(chain[0], set()).add(chain)

    witness = None
    for head, chains in sorted(by_head.items(), key=lambda kv: kv[0].coeffs):
        if len(chains) > 1:
            witness = {"a_0": head.to_json(), "systems": [[a.to_json() for a in c] for c in chains[:2]]}
            break
    spurious = sum(1 for chains in truncated.values() if len(chains) > 1)

    core = perfect_core(ctx)
    reduced = sorted({residue(a) for a in stable}, key=lambda a: a.coeffs)
    bijective = len(reduced) == len(stable) and reduced == core

    return CheckReport(
        check="tilt_is_injective_sharp",
        verdict=HOLDS if witness is None else FAILS,
        witness=witness,
        bounds={"depth": depth, "ring_size": ctx.size},
        refs=(R.REF_SHARP_INJECTIVE, R.REF_MONOID),
        details={
            "ring": ctx.descriptor,
            "compatible_systems": sum(len(c) for c in by_head.values()),
            "tilt_size": len(core),
            "monoid_lemma_bijection": bijective,
            "heads_shared_by_non_extendable_chains": spurious,
        },
    )

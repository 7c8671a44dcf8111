"""Valuation rings modelled by their value groups.

Values are tuples: Z^r with lexicographic order (r = 1 or 2) or Q (a single
Fraction).  A model V is the set of values >= 0, together with the value
t_val > 0 of the pseudouniformizer t.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from tiltkit import report as R
from tiltkit.arith import is_prime, vp
from tiltkit.errors import BadParameter, UnsupportedRank
from tiltkit.report import FAILS, HOLDS, CheckReport

Value = tuple


@dataclass(frozen=True)
class ValueGroup:
    kind: str  # "Z" or "Q"
    rank: int = 1

    def __post_init__(self):
        if self.kind not in ("Z", "Q"):
            raise BadParameter(f"unknown value group kind {self.kind!r}")
        if self.kind == "Q" and self.rank != 1:
            raise UnsupportedRank("Q is modelled in rank one only")
        if self.rank not in (1, 2):
            raise UnsupportedRank(f"rank {self.rank} is outside the supported range 1..2")

    @property
    def name(self) -> str:
        if self.kind == "Q":
            return "Q"
        return "Z" if self.rank == 1 else f"Z^{self.rank} lex"

    def zero(self) -> Value:
        return (Fraction(0),) if self.kind == "Q" else (0,) * self.rank

    def make(self, xi) -> Value:
        if not isinstance(xi, (tuple, list)):
            xi = (xi,)
        if len(xi) != self.rank:
            raise BadParameter(f"{xi} does not have rank {self.rank}")
        return tuple(Fraction(v) for v in xi) if self.kind == "Q" else tuple(int(v) for v in xi)

    def add(self, a: Value, b: Value) -> Value:
        return tuple(x + y for x, y in zip(a, b))

    def scale(self, n, a: Value) -> Value:
        return tuple(n * x for x in a)

    # tuples compare lexicographically, which is the order we want
    def nonneg(self, a: Value) -> bool:
        return a >= self.zero()

    def fmt(self, a: Value) -> str:
        return str(a[0]) if self.rank == 1 else "(" + ", ".join(str(v) for v in a) + ")"


@dataclass(frozen=True)
class ValModel:
    group: ValueGroup
    t_val: Value

    def __post_init__(self):
        object.__setattr__(self, "t_val", self.group.make(self.t_val))
        if not self.t_val > self.group.zero():
            raise BadParameter("t_val must be positive")

    def contains(self, xi: Value) -> bool:
        return self.group.nonneg(xi)

    def describe(self) -> dict:
        return {"group": self.group.name, "t_val": self.group.fmt(self.t_val)}


def model(rank: int = 1, kind: str = "Z", t_val=None) -> ValModel:
    G = ValueGroup(kind, rank)
    if t_val is None:
        t_val = (1,) + (0,) * (rank - 1)
    return ValModel(G, t_val)


def _dominant_positive(m: ValModel) -> bool:
    return m.t_val[0] > 0


def _almost_integral_rule(xi: Value, m: ValModel) -> int | None:
    """Least k with k t_val + n xi >= 0 for all n >= 0, or None.

    Rank one is archimedean, so only xi >= 0 works.  In Z^2 lex a vector
    (0, -a) is beaten by any c with positive first coordinate, so k = 1
    works exactly when t_val has one.
    """
    G = m.group
    if G.nonneg(xi):
        return 0
    if G.rank == 2 and xi[0] == 0 and _dominant_positive(m):
        return 1
    return None


def val_almost_integral(xi, m: ValModel) -> CheckReport:
    G = m.group
    xi = G.make(xi)
    k = _almost_integral_rule(xi, m)
    details = {**m.describe(), "xi": G.fmt(xi)}
    if k is not None:
        details["c"] = G.fmt(G.scale(k, m.t_val))
        return CheckReport("val_almost_integral", HOLDS, None, {}, (R.REF_ALMOST_INTEGRAL,), details)
    # every c = k t_val: smallest n with k t_val + n xi < 0, shown for k = 1
    c = m.t_val
    n = 1
    while G.nonneg(G.add(c, G.scale(n, xi))):
        n += 1
    witness = {"c": G.fmt(c), "n": n, "c + n*xi": G.fmt(G.add(c, G.scale(n, xi)))}
    return CheckReport("val_almost_integral", FAILS, witness, {}, (R.REF_ALMOST_INTEGRAL,), details)


@dataclass(frozen=True)
class ValueSet:
    """A value set: 'nonneg' (xi >= 0), 'first_nonneg' (xi_1 >= 0) or 'all'."""

    kind: str
    group: ValueGroup

    def contains(self, xi: Value) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "first_nonneg":
            return xi[0] >= 0
        return self.group.nonneg(xi)

    @property
    def description(self) -> str:
        return {"all": "all values", "first_nonneg": "{xi : xi_1 >= 0}", "nonneg": "{xi : xi >= 0}"}[self.kind]


def almost_integral_over(xi: Value, S: ValueSet, m: ValModel, k_max: int = 20, n_max: int | None = None) -> bool:
    """Brute-force operator: some k <= k_max has k t_val + n xi in S for n <= n_max.

    The default n_max outruns k_max t_val against grid steps of size 1/3.
    """
    G = m.group
    if n_max is None:
        n_max = 3 * (k_max + 1) * int(max(abs(v) for v in m.t_val) + 1) + 1
    return any(all(S.contains(G.add(G.scale(k, m.t_val), G.scale(n, xi))) for n in range(n_max + 1))
               for k in range(k_max + 1))


def grid(G: ValueGroup, bound: int):
    if G.kind == "Q":
        den = 3
        return [(Fraction(a, den),) for a in range(-bound * den, bound * den + 1)]
    return list(product(range(-bound, bound + 1), repeat=G.rank))


def val_cic(m: ValModel, bound: int = 20) -> tuple[ValueSet, CheckReport]:
    """Complete integral closure of V in V[1/t] as a value set, with idempotence checked on a grid."""
    G = m.group
    if G.rank == 1:
        S = ValueSet("nonneg", G)
    elif _dominant_positive(m):
        S = ValueSet("first_nonneg", G)
    else:
        # t lies in the height-one convex subgroup; V[1/t] is then the localisation itself
        S = ValueSet("nonneg", G)
    pts = grid(G, bound)
    V = ValueSet("nonneg", G)
    mismatch = None
    for xi in pts:
        exact = _almost_integral_rule(xi, m) is not None
        if exact != S.contains(xi) or exact != almost_integral_over(xi, V, m):
            mismatch = {"xi": G.fmt(xi), "exact": exact, "set": S.contains(xi)}
            break
    # idempotence: almost integral over S itself gives S back
    idem_bad = None
    for xi in pts:
        if almost_integral_over(xi, S, m) != S.contains(xi):
            idem_bad = G.fmt(xi)
            break
    ok = mismatch is None and idem_bad is None
    strict = [G.fmt(xi) for xi in pts if S.contains(xi) and not V.contains(xi)][:3]
    rep = CheckReport(
        "val_cic", ok, None if ok else {"mismatch": mismatch, "idempotence_failure": idem_bad},
        {"grid_bound": bound, "grid_points": len(pts)},
        (R.REF_KRULL_RANK1, R.REF_KRULL_HEIGHT1, R.REF_CIC_IDEMPOTENT),
        {**m.describe(), "closure": S.description, "fixed_point": S.kind == "nonneg",
         "idempotent": idem_bad is None, "strictly_larger_examples": strict},
    )
    return S, rep


def convex_subgroups(G: ValueGroup, bound: int = 6) -> list[str]:
    """Candidate subgroups that pass the convexity test on a grid."""
    if G.kind == "Q" or G.rank == 1:
        cands = {"0": lambda v: v == G.zero(), G.name: lambda v: True}
    else:
        cands = {"0": lambda v: v == G.zero(), "0 x Z": lambda v: v[0] == 0,
                 "Z x 0": lambda v: v[1] == 0, G.name: lambda v: True}
    pts = grid(G, bound)
    out = []
    for name, member in cands.items():
        convex = all(not (G.zero() <= a <= h) or member(a)
                     for h in pts if member(h) for a in pts)
        if convex:
            out.append(name)
    return out


def val_height_one_exists(m: ValModel) -> CheckReport:
    """Height-one primes correspond to a maximal proper convex subgroup."""
    subs = convex_subgroups(m.group)
    proper = [s for s in subs if s != m.group.name]
    exists = bool(proper)
    height_one = proper[-1] if proper else None
    return CheckReport("val_height_one_exists", exists, None if exists else {"convex_subgroups": subs},
                       {}, (R.REF_KRULL_HEIGHT1,),
                       {**m.describe(), "convex_subgroups": subs, "height_one_subgroup": height_one,
                        "krull_dimension": len(subs) - 1})


def krull_grid(bound: int = 20) -> CheckReport:
    """The nested sets {xi >= 0} < {xi_1 >= 0} < Z^2 on the grid |xi_i| <= bound."""
    m = model(2)
    G = m.group
    S, cic = val_cic(m, bound)
    pts = grid(G, bound)
    ring = [xi for xi in pts if m.contains(xi)]
    loc = [xi for xi in pts if S.contains(xi)]
    ok = cic.holds and set(ring) < set(loc) < set(pts)
    exact = all((_almost_integral_rule(xi, m) is not None) == (xi[0] >= 0) for xi in pts)
    ok = ok and exact
    return CheckReport("krull_grid", ok, None if ok else {"cic": cic.to_json()},
                       {"grid_bound": bound}, (R.REF_KRULL_HEIGHT1,),
                       {"sizes": {"ring": len(ring), "closure": len(loc), "group": len(pts)},
                        "closure_equals_first_coordinate_halfspace": exact,
                        "strict_nesting": set(ring) < set(loc) < set(pts)})


def val_completion_check(p: int, M: int, rng: random.Random | None = None, samples: int = 200) -> CheckReport:
    """Rank-one discrete model: Z_(p) inside the tower Z/p^M."""
    if not is_prime(p):
        raise BadParameter(f"p={p} is not prime")
    if M < 1:
        raise BadParameter("M must be >= 1")
    rng = rng or random.Random(0)
    m = p**M
    # (i) valuations of nonzero classes are < M and independent of the lift
    vals_ok = all(vp(a, p) < M and vp(a + m, p) == vp(a, p) for a in range(1, min(m, 20000)))
    # (ii) principal ideals are exactly the p^k R, a chain of length M + 1
    ideals = sorted({p ** min(vp(a, p), M) if a else m for a in range(0, min(m, 20000))})
    chain_ok = ideals == [p**k for k in range(M + 1)]
    # (iii) injectivity at precision M
    inj_bad = None
    tested = 0
    for _ in range(samples):
        a, b = rng.randint(-50, 50), rng.choice([d for d in range(1, 60) if d % p])
        c, d = rng.randint(-50, 50), rng.choice([d for d in range(1, 60) if d % p])
        x, y = Fraction(a, b), Fraction(c, d)
        diff = x - y
        if diff == 0 or vp(diff.numerator, p) >= M:
            continue
        tested += 1
        if (a * pow(b, -1, m)) % m == (c * pow(d, -1, m)) % m:
            inj_bad = {"x": str(x), "y": str(y)}
            break
    ok = vals_ok and chain_ok and inj_bad is None
    return CheckReport(
        "val_completion_check", ok,
        None if ok else {"valuations": vals_ok, "chain": chain_ok, "injectivity": inj_bad},
        {"p": p, "M": M, "samples": samples},
        (R.REF_COMPLETION,),
        {"certified_precision": M, "valuation_map_ok": vals_ok, "ideal_chain": [f"{p}^{k}" for k in range(M + 1)],
         "ideals_totally_ordered": chain_ok, "injectivity_pairs_tested": tested,
         "one_half": (pow(2, -1, m) if p != 2 else None)},
    )

"""Structured results of predicate and audit runs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

HOLDS = "holds"
FAILS = "fails-with-witness"
INCONCLUSIVE = "inconclusive-at-bound"

VERDICTS = (HOLDS, FAILS, INCONCLUSIVE)


@dataclass
class CheckReport:
    """Verdict of one check.

    ``witness`` and everything in ``details`` must be JSON-serialisable;
    ``refs`` names the mathematical results the check exercises.
    """

    check: str
    verdict: str
    witness: Any = None
    bounds: dict[str, Any] = field(default_factory=dict)
    refs: tuple[str, ...] = ()
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if isinstance(self.verdict, bool):
            self.verdict = HOLDS if self.verdict else FAILS
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == FAILS and self.witness is None:
            raise ValueError(f"{self.check}: a failing verdict needs a witness")
        self.refs = tuple(self.refs)

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict == FAILS

    def to_json(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "witness": self.witness,
            "bounds": self.bounds,
            "refs": list(self.refs),
            "details": self.details,
        }

    def summary(self) -> str:
        line = f"{self.check}: {self.verdict}"
        if self.witness is not None:
            line += f" (witness: {self.witness})"
        return line


# Names of the results a report exercises; these go into ``refs``.
REF_CONGRUENCE = "p-power congruence: a = b mod t and p in tA give a^(p^n) = b^(p^n) mod t^(n+1)"
REF_MONOID = "monoid lemma: lim over x -> x^p of A is the tilt as a multiplicative monoid"
REF_TILT_ADD = "tilt addition: (a_n) + (b_n) = (lim_m (a_(n+m) + b_(n+m))^(p^m))"
REF_TILT_MUL = "tilt multiplication: (a_n)(b_n) = (a_n b_n)"
REF_PERFECT = "the tilt is a perfect F_p-algebra, hence reduced"
REF_DOMAIN = "the tilt of a p-adically complete domain is a domain"
REF_SHARP = "sharp map: tilt -> lim A -> A, projection to the 0-th component"
REF_SHARP_INJECTIVE = "sharp is injective iff compatible root systems with equal a_0 coincide"
REF_UNIQUE_ROOT = "t^p = a has exactly one root in the sharp image when A/pA is perfect"
REF_TEICHMULLER = "sharp is the Teichmuller map when A/pA is perfect and A is p-torsion free"
REF_MINUS_ONE = "-1 in Z_2 is a square root of 1 outside the sharp image"
REF_ALMOST_INTEGRAL = "x almost integral over A in A[1/t] iff t^c x^n in A for all n"
REF_INTEGRAL = "integral closedness of A in A[1/t]"
REF_P_ROOT = "p-root closedness: b^p in A implies b in A"
REF_SEMIPERFECT = "semiperfect: Frobenius on A/pA is surjective"
REF_IDEAL_TRANSFER = "A integrally closed in B iff A/I integrally closed in B/IB when IB = I"
REF_CIC_IDEMPOTENT = "the complete integral closure of A in A[1/t] is completely integrally closed"
REF_MT1 = "A completely integrally closed in A[1/w] with (Perf) gives the same for the tilt"
REF_MT2 = "hypotheses of integral-closedness transfer: w nonzerodivisor, (Perf), p in w^p A, A/pA semiperfect"
REF_KRULL_RANK1 = "a rank-one valuation ring is completely integrally closed"
REF_KRULL_HEIGHT1 = "complete integral closure of V equals V localized at its height-one prime"
REF_COMPLETION = "the t-adic completion of a rank-one valuation ring is a rank-one valuation ring containing V"

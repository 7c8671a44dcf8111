"""Finite-precision tilts, sharp maps and closure checkers on desk-scale ring models."""

from __future__ import annotations

from tiltkit.arith import RingCtx, RingElem, ring_make
from tiltkit.report import CheckReport
from tiltkit.tilt import TiltElem, sharp, tilt_add, tilt_lift, tilt_mul

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "RingCtx",
    "RingElem",
    "TiltElem",
    "ring_make",
    "sharp",
    "tilt_add",
    "tilt_lift",
    "tilt_mul",
]

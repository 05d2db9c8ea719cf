"""Planar vectors, the fixed reference frame, and the scalar backend.

Scalars are either native IEEE doubles (default) or gmpy2 big floats with a
run-level significand width. Every simulation runs all of its arithmetic
under a single :class:`Precision`, so values never mix widths silently.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import gmpy2

from .errors import ZeroDirection

Scalar = Union[float, "gmpy2.mpfr"]


@dataclass(frozen=True)
class Precision:
    """Run-level scalar configuration.

    ``bits is None`` selects the native double backend. Otherwise all
    arithmetic inside :meth:`activate` runs on gmpy2 big floats with the
    given significand width; each operation then carries relative rounding
    error at most 2**(1-bits).
    """

    bits: Optional[int] = None

    def __post_init__(self):
        if self.bits is not None and self.bits < 8:
            raise ValueError("precision must be at least 8 significand bits")

    @property
    def is_native(self) -> bool:
        return self.bits is None

    @property
    def significand_bits(self) -> int:
        return 53 if self.bits is None else self.bits

    def activate(self):
        """Context manager installing this precision for gmpy2 arithmetic."""
        if self.bits is None:
            return contextlib.nullcontext()
        return gmpy2.context(precision=self.bits)

    def number(self, x) -> Scalar:
        """Convert ints, floats, Fractions, or decimal strings to a scalar."""
        if self.bits is None:
            if isinstance(x, Fraction):
                return x.numerator / x.denominator
            return float(x)
        if isinstance(x, Fraction):
            with gmpy2.context(precision=self.bits):
                return gmpy2.mpfr(x.numerator) / gmpy2.mpfr(x.denominator)
        if isinstance(x, str):
            return gmpy2.mpfr(x, self.bits)
        return gmpy2.mpfr(x, self.bits)

    def sqrt(self, x) -> Scalar:
        if self.bits is None:
            return math.sqrt(x)
        with gmpy2.context(precision=self.bits):
            return gmpy2.sqrt(gmpy2.mpfr(x, self.bits))

    @property
    def unit_roundoff(self) -> float:
        """Bound on per-operation relative rounding error, 2**(1-p).

        Floored at 2**-1000 so guard bands stay nonzero as Python floats
        even for multi-thousand-bit runs.
        """
        return 2.0 ** max(1 - self.significand_bits, -1000)

    def format(self, x) -> str:
        """Decimal string that parses back bit-identically at this width."""
        if self.bits is None:
            return repr(float(x))
        digits = math.ceil(self.bits * math.log10(2)) + 2
        return format(x, f".{digits}g")

    def parse(self, s: str) -> Scalar:
        if self.bits is None:
            return float(s)
        return gmpy2.mpfr(s, self.bits)


DOUBLE = Precision()


def sqrt_scalar(x: Scalar) -> Scalar:
    """Square root matching the operand's backend.

    For mpfr operands the ambient gmpy2 context decides the result width,
    so call this inside ``Precision.activate()`` during big-float runs.
    """
    if isinstance(x, (float, int)):
        return math.sqrt(x)
    return gmpy2.sqrt(x)


@dataclass(frozen=True)
class Vec2:
    """Immutable planar vector over the active scalar backend."""

    x: Scalar
    y: Scalar

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def scaled(self, k: Scalar) -> "Vec2":
        return Vec2(k * self.x, k * self.y)

    def dot(self, other: "Vec2") -> Scalar:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> Scalar:
        """z-component of the 3-D cross product; zero iff parallel."""
        return self.x * other.y - self.y * other.x

    def norm2(self) -> Scalar:
        return self.x * self.x + self.y * self.y

    def norm(self) -> Scalar:
        return sqrt_scalar(self.norm2())

    def as_floats(self) -> tuple:
        return (float(self.x), float(self.y))


def project(w: Vec2, z: Vec2) -> Vec2:
    """Orthogonal projection of z onto the line spanned by w.

    Returns (z.w) w / |w|^2. Raises ZeroDirection for w = 0.
    """
    n2 = w.norm2()
    if n2 == 0:
        raise ZeroDirection("cannot project onto the zero vector")
    return w.scaled(z.dot(w) / n2)


@dataclass(frozen=True)
class ReferenceFrame:
    """The six unit vectors used by all two-arm constructions.

    w0 points straight up; w1/w2 point up-left/up-right at 60 degrees from
    vertical; u_k is the left-handed unit normal of w_k (w_k . u_k = 0).
    Useful identities: w1 + w2 = w0, w0.w1 = w0.w2 = 1/2, u1.u2 = 1/2,
    w1.u2 = u1.w2 = sqrt(3)/2.
    """

    w0: Vec2
    u0: Vec2
    w1: Vec2
    w2: Vec2
    u1: Vec2
    u2: Vec2


def frame(precision: Precision = DOUBLE) -> ReferenceFrame:
    """Build the reference frame at the requested scalar precision."""
    one = precision.number(1)
    zero = precision.number(0)
    half = one / 2
    s3h = precision.sqrt(precision.number(3)) / 2  # sqrt(3)/2, correctly rounded
    return ReferenceFrame(
        w0=Vec2(zero, one),
        u0=Vec2(one, zero),
        w1=Vec2(-s3h, half),
        w2=Vec2(s3h, half),
        u1=Vec2(half, s3h),
        u2=Vec2(-half, s3h),
    )

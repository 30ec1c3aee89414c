"""Overflow-safe scaled complex values.

A ScaledValue represents ``significand * 2**exponent2`` with the significand
magnitude normalized into [1, 2) (or exactly 0).  Products of hundreds of
thousands of factors, and partition functions like 2**(512*512), stay finite
this way while ordinary float64 would overflow around 1e308.
"""

from __future__ import annotations

import cmath
import math

_LN2 = math.log(2.0)


class ScaledValue:
    """Complex value stored as significand (|.| in [1,2) or 0) times 2**exponent2."""

    __slots__ = ("significand", "exponent2")

    def __init__(self, significand: complex, exponent2: int = 0) -> None:
        significand = complex(significand)
        mag = abs(significand)
        if mag == 0.0:
            self.significand = 0j
            self.exponent2 = 0
            return
        # frexp puts mag in [0.5, 1) * 2**e; shift by e-1 to land in [1, 2).
        _, e = math.frexp(mag)
        shift = e - 1
        self.significand = complex(
            math.ldexp(significand.real, -shift), math.ldexp(significand.imag, -shift)
        )
        self.exponent2 = exponent2 + shift

    @classmethod
    def zero(cls) -> ScaledValue:
        return cls(0j, 0)

    @classmethod
    def one(cls) -> ScaledValue:
        return cls(1.0 + 0j, 0)

    @classmethod
    def from_log(cls, log_abs: float, phase: float = 0.0) -> ScaledValue:
        """Build exp(log_abs + i*phase) without overflow."""
        e = int(math.floor(log_abs / _LN2))
        resid = log_abs - e * _LN2
        sig = math.exp(resid) * cmath.exp(1j * phase)
        return cls(sig, e)

    @classmethod
    def from_exp(cls, w: complex) -> ScaledValue:
        """exp(w) for complex w, overflow-safe."""
        w = complex(w)
        return cls.from_log(w.real, w.imag)

    @property
    def is_zero(self) -> bool:
        return self.significand == 0

    def __mul__(self, other: ScaledValue | complex | float | int) -> ScaledValue:
        if isinstance(other, ScaledValue):
            return ScaledValue(
                self.significand * other.significand, self.exponent2 + other.exponent2
            )
        return ScaledValue(self.significand * complex(other), self.exponent2)

    __rmul__ = __mul__

    def __truediv__(self, other: ScaledValue) -> ScaledValue:
        if other.is_zero:
            raise ZeroDivisionError("division by zero ScaledValue")
        return ScaledValue(
            self.significand / other.significand, self.exponent2 - other.exponent2
        )

    def __neg__(self) -> ScaledValue:
        return ScaledValue(-self.significand, self.exponent2)

    def ldexp(self, k: int) -> ScaledValue:
        """Multiply by 2**k exactly."""
        return ScaledValue(self.significand, self.exponent2 + k)

    def log_abs(self) -> float:
        """Natural log of the magnitude; -inf for zero."""
        if self.is_zero:
            return -math.inf
        return math.log(abs(self.significand)) + self.exponent2 * _LN2

    def phase(self) -> float:
        return cmath.phase(self.significand)

    def to_complex(self) -> complex:
        """Plain complex value; overflows to inf if exponent2 is too large."""
        if self.is_zero:
            return 0j
        if abs(self.exponent2) < 1000:
            return complex(
                math.ldexp(self.significand.real, self.exponent2),
                math.ldexp(self.significand.imag, self.exponent2),
            )
        return self.significand * cmath.exp(self.exponent2 * _LN2)

    def ratio_minus_one(self, other: ScaledValue) -> float:
        """|self/other - 1|, the residual metric used throughout the tests."""
        if other.is_zero:
            return math.inf if not self.is_zero else 0.0
        r = self / other
        if abs(r.exponent2) > 60:
            return math.inf
        return abs(r.to_complex() - 1.0)

    def real_sign(self, atol_phase: float = 1e-8) -> int:
        """Sign of a (near-)real value: +1, -1, or 0 for zero."""
        if self.is_zero:
            return 0
        ph = abs(self.phase())
        if ph < atol_phase:
            return 1
        if abs(ph - math.pi) < atol_phase:
            return -1
        raise ValueError(f"value is not real (phase {self.phase():g})")

    def __repr__(self) -> str:
        return f"ScaledValue({self.significand!r}, 2**{self.exponent2})"

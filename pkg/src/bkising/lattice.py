"""Brascamp-Kunz lattice: domain types and ground-truth oracles.

Geometry: an M x N cylinder (periodic in the column index k), coupled to a
fixed all-up spin row above (j=0) and a fixed alternating row below
(sigma_{M+1,k} = (-1)^(k+1)).  Fields H=0 and H/kT = i*pi/2 are supported;
the imaginary field enters exactly as the phase i**s with s the integer spin
sum, never through a rounded complex exponential.

Two independent oracles live here: exhaustive enumeration over the 2**(MN)
configurations (numeric and exact-symbolic variants) and a row-to-row
transfer-matrix contraction over 2**N ring states, which extends ground
truth to arbitrary M.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import PreconditionError
from .scaled import ScaledValue

DEFAULT_ENUMERATION_CAP = 24
TRANSFER_STATE_CAP = 14

_PHASES = (1.0 + 0j, 1j, -1.0 + 0j, -1j)  # i**c for c = 0..3


class FieldMode(enum.Enum):
    """The two exactly solvable external fields."""

    ZERO_FIELD = "zero"
    IPI_OVER_TWO = "ipi2"


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice dimensions, M rows by N columns (N even)."""

    m_rows: int
    n_cols: int

    def __post_init__(self) -> None:
        if self.m_rows < 1:
            raise PreconditionError("m_rows_positive", f"m_rows must be >= 1, got {self.m_rows}")
        if self.n_cols < 1:
            raise PreconditionError("n_cols_positive", f"n_cols must be >= 1, got {self.n_cols}")
        if self.n_cols % 2:
            raise PreconditionError(
                "n_cols_even",
                f"n_cols must be even (alternating boundary row has period 2), got {self.n_cols}",
            )

    @property
    def n_sites(self) -> int:
        return self.m_rows * self.n_cols

    @property
    def horizontal_bonds(self) -> int:
        return self.m_rows * self.n_cols

    @property
    def vertical_bonds(self) -> int:
        return (self.m_rows + 1) * self.n_cols

    @property
    def m_even(self) -> bool:
        return self.m_rows % 2 == 0

    def require_enumerable(self, cap: int = DEFAULT_ENUMERATION_CAP) -> None:
        if self.n_sites > cap:
            raise PreconditionError(
                "enumeration_cap",
                f"{self.n_sites} spins exceed the enumeration cap of {cap}",
            )

    def require_m_even(self) -> None:
        if not self.m_even:
            raise PreconditionError("m_rows_even", f"m_rows must be even, got {self.m_rows}")


@dataclass(frozen=True)
class Couplings:
    """Dimensionless couplings K1 (horizontal) and K2 (vertical)."""

    k1: complex | float
    k2: complex | float

    @classmethod
    def isotropic(cls, k: complex | float) -> Couplings:
        return cls(k, k)

    @property
    def is_real(self) -> bool:
        return complex(self.k1).imag == 0.0 and complex(self.k2).imag == 0.0

    def _fn(self, f_real, f_cplx, k):
        kc = complex(k)
        return f_real(kc.real) if kc.imag == 0.0 else f_cplx(kc)

    @property
    def x1(self):
        return self._fn(lambda k: math.exp(-2 * k), lambda k: cmath.exp(-2 * k), self.k1)

    @property
    def x2(self):
        return self._fn(lambda k: math.exp(-2 * k), lambda k: cmath.exp(-2 * k), self.k2)

    @property
    def u1(self):
        return self._fn(lambda k: math.exp(-4 * k), lambda k: cmath.exp(-4 * k), self.k1)

    @property
    def u2(self):
        return self._fn(lambda k: math.exp(-4 * k), lambda k: cmath.exp(-4 * k), self.k2)

    @property
    def z1(self):
        return self._fn(math.tanh, cmath.tanh, self.k1)

    @property
    def z2(self):
        return self._fn(math.tanh, cmath.tanh, self.k2)

    def require_real(self) -> tuple[float, float]:
        if not self.is_real:
            raise PreconditionError("couplings_real", "operation requires real couplings")
        return complex(self.k1).real, complex(self.k2).real


@dataclass(frozen=True)
class SpinConfiguration:
    """One spin state as an MN-bit mask; bit (j-1)*N + (k-1) set means sigma=+1.

    The fixed boundary rows are virtual: they are applied by the energy
    evaluator, never stored.
    """

    bits: int


def bond_sums(spec: LatticeSpec, config: SpinConfiguration) -> tuple[int, int, int]:
    """Exact bond and spin sums (a, b, s) of one configuration.

    a: horizontal nearest-neighbour sum (periodic columns),
    b: vertical sum over bond rows j=0..M including both fixed boundary rows,
    s: plain spin sum.  The reduced energy is -E/kT = a*K1 + b*K2 + h*s.
    """
    m, n = spec.m_rows, spec.n_cols
    if config.bits < 0 or config.bits >> (m * n):
        raise PreconditionError(
            "config_bits_range", f"configuration must have exactly {m * n} bits"
        )
    full = (1 << n) - 1
    alt = _kernels._ALT64 & full
    a = b = 0
    prev = full
    w = prev
    for r in range(m):
        w = (config.bits >> (r * n)) & full
        rot = ((w << 1) | (w >> (n - 1))) & full
        a += n - 2 * (w ^ rot).bit_count()
        b += n - 2 * (w ^ prev).bit_count()
        prev = w
    b += n - 2 * (w ^ alt).bit_count()
    s = 2 * config.bits.bit_count() - m * n
    return a, b, s


def _combine_phase_classes(buckets: np.ndarray, f: FieldMode) -> complex:
    return _kernels.combine_buckets(buckets, f is FieldMode.ZERO_FIELD)


def _exp_shift(spec: LatticeSpec, c: Couplings) -> float:
    """Upper bound for Re(a*K1 + b*K2), factored out of the enumeration."""
    k1, k2 = complex(c.k1), complex(c.k2)
    return abs(k1.real) * spec.horizontal_bonds + abs(k2.real) * spec.vertical_bonds


def brute_force_partition(
    spec: LatticeSpec,
    c: Couplings,
    f: FieldMode,
    cap: int = DEFAULT_ENUMERATION_CAP,
    backend: str | None = None,
) -> ScaledValue:
    """Partition function by exhaustive enumeration (compensated summation)."""
    spec.require_enumerable(cap)
    shift = _exp_shift(spec, c)
    buckets = _kernels.bk_phase_sums(spec.m_rows, spec.n_cols, c.k1, c.k2, shift, backend)
    return ScaledValue.from_exp(shift) * _combine_phase_classes(buckets, f)


@dataclass
class SymbolicPartition:
    """Exact partition function as a map (a, b) -> Gaussian-integer coefficient.

    Z = sum over (a, b) of (re + i*im) * exp(a*K1 + b*K2); the i**s phases of
    the i*pi/2 field are absorbed into the coefficients with exact integer
    arithmetic.
    """

    spec: LatticeSpec
    field_mode: FieldMode
    terms: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)

    def coefficient_sum(self) -> complex:
        re = sum(v[0] for v in self.terms.values())
        im = sum(v[1] for v in self.terms.values())
        return complex(re, im)

    def validate(self) -> None:
        """Raise if any type invariant fails (exact integer checks)."""
        m, n = self.spec.m_rows, self.spec.n_cols
        amax, bmax = m * n, (m + 1) * n
        for (a, b), (re, im) in self.terms.items():
            if abs(a) > amax or abs(b) > bmax:
                raise AssertionError(f"exponent ({a},{b}) out of range")
            if (a - amax) % 2 or (b - bmax) % 2:
                raise AssertionError(f"exponent parity violated at ({a},{b})")
            if self.field_mode is FieldMode.IPI_OVER_TWO and im != 0:
                raise AssertionError(f"nonzero imaginary coefficient at ({a},{b})")
            if self.field_mode is FieldMode.ZERO_FIELD and (im != 0 or re < 0):
                raise AssertionError(f"non-counting coefficient at ({a},{b})")
        if self.field_mode is FieldMode.ZERO_FIELD:
            if self.coefficient_sum() != complex(2 ** (m * n)):
                raise AssertionError("zero-field coefficients do not sum to 2**(MN)")

    def evaluate(self, c: Couplings) -> ScaledValue:
        """Float64 evaluation at given couplings (exactly rounded grouped sum);
        matches brute force closely."""
        shift = _exp_shift(self.spec, c)
        k1, k2 = complex(c.k1), complex(c.k2)
        parts_re: list[float] = []
        parts_im: list[float] = []
        for (a, b), (re, im) in sorted(self.terms.items()):
            t = complex(re, im) * cmath.exp(a * k1 + b * k2 - shift)
            parts_re.append(t.real)
            parts_im.append(t.imag)
        total = complex(math.fsum(parts_re), math.fsum(parts_im))
        return ScaledValue.from_exp(shift) * total

    def evaluate_mp(self, c: Couplings, dps: int = 40) -> ScaledValue:
        """Arbitrary-precision evaluation (mpmath); the bulletproof oracle for
        strongly cancelling parameter corners."""
        import mpmath as mp

        k1, k2 = complex(c.k1), complex(c.k2)
        with mp.workdps(dps):
            total = mp.mpc(0)
            for (a, b), (re, im) in sorted(self.terms.items()):
                total += mp.mpc(re, im) * mp.exp(a * mp.mpc(k1) + b * mp.mpc(k2))
            if total == 0:
                return ScaledValue.zero()
            return ScaledValue.from_log(float(mp.log(abs(total))), float(mp.arg(total)))


def brute_force_symbolic(
    spec: LatticeSpec,
    f: FieldMode,
    cap: int = DEFAULT_ENUMERATION_CAP,
    backend: str | None = None,
) -> SymbolicPartition:
    """Exact coefficient map from exhaustive enumeration."""
    spec.require_enumerable(cap)
    m, n = spec.m_rows, spec.n_cols
    counts = _kernels.bk_symbolic_counts(m, n, backend)
    amax, bmax = m * n, (m + 1) * n
    terms: dict[tuple[int, int], tuple[int, int]] = {}
    nz = np.argwhere(counts.sum(axis=2) > 0)
    for ia, ib in nz:
        c0, c1, c2, c3 = (int(counts[ia, ib, cls]) for cls in range(4))
        if f is FieldMode.ZERO_FIELD:
            re, im = c0 + c1 + c2 + c3, 0
        else:
            re, im = c0 - c2, c1 - c3
        if re or im:
            terms[(2 * int(ia) - amax, 2 * int(ib) - bmax)] = (re, im)
    return SymbolicPartition(spec=spec, field_mode=f, terms=terms)


def transfer_matrix_partition(
    spec: LatticeSpec,
    c: Couplings,
    f: FieldMode,
    state_cap: int = TRANSFER_STATE_CAP,
) -> ScaledValue:
    """Row-to-row transfer contraction over the 2**N ring states.

    Independent of the enumeration oracle and unbounded in M; per-row
    rescaling keeps the accumulation finite for any lattice height.
    """
    m, n = spec.m_rows, spec.n_cols
    if n > state_cap:
        raise PreconditionError("transfer_state_cap", f"N={n} exceeds 2**N state cap (N <= {state_cap})")
    k1, k2 = complex(c.k1), complex(c.k2)

    states = np.arange(1 << n, dtype=np.int64)
    full = (1 << n) - 1
    alt = _kernels._ALT64 & full
    pc = np.bitwise_count(states).astype(np.int64)
    rot = ((states << 1) | (states >> (n - 1))) & full
    h_row = n - 2 * np.bitwise_count(states ^ rot).astype(np.int64)  # horizontal bonds
    s_row = 2 * pc - n
    top = s_row  # bond sum against the all-up row
    bot = n - 2 * np.bitwise_count(states ^ alt).astype(np.int64)

    if f is FieldMode.IPI_OVER_TWO:
        phase = np.asarray(_PHASES, dtype=np.complex128)[s_row & 3]
    else:
        phase = np.ones(1 << n, dtype=np.complex128)

    row_weight = np.exp(h_row * k1) * phase
    u = np.exp(top * k2) * row_weight
    exp2 = 0

    ep, em = cmath.exp(k2), cmath.exp(-k2)
    for _ in range(m - 1):
        # vertical bond layer: N single-site sweeps of exp(K2 s s')
        for kbit in range(n):
            u = ep * u + em * u[states ^ (1 << kbit)]
        u = u * row_weight
        # rescale to keep magnitudes bounded
        peak = np.max(np.abs(u))
        if peak > 0:
            _, e = math.frexp(peak)
            u = np.ldexp(u.real, -e) + 1j * np.ldexp(u.imag, -e)
            exp2 += e

    total = complex(np.sum(u * np.exp(bot * k2)))
    return ScaledValue(total, exp2)

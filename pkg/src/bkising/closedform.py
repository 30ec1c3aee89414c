"""Exact finite-lattice product formulas for both field modes.

Each partition function is a simple prefactor times a product of per-angle
factors over the discrete angle grids theta_j = (2j-1)pi/N,
phi_k = k pi/(M+1) and phi_odd_k = (2k-1)pi/(M+1).  Accumulation is
overflow-safe in two independent ways: a scaled product (default) that
tracks an exact power-of-two exponent, and a log-sum used as a
cross-checking second route and for free-energy densities.

Factor evaluation order is fixed (j outer, k inner) so results are
bit-reproducible.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .lattice import Couplings, LatticeSpec
from .scaled import ScaledValue

_PRODUCT_CHUNK = 128  # normalized-significand chunk product cannot underflow


@dataclass(frozen=True)
class FactorGrid:
    """Angle grids entering the closed-form products."""

    spec: LatticeSpec
    angles_theta: np.ndarray
    angles_phi: np.ndarray
    angles_phi_odd: np.ndarray

    @classmethod
    def from_spec(cls, spec: LatticeSpec) -> FactorGrid:
        m, n = spec.m_rows, spec.n_cols
        theta = (2 * np.arange(1, n // 2 + 1) - 1) * np.pi / n
        phi = np.arange(1, m + 1) * np.pi / (m + 1)
        if spec.m_even:
            phi_odd = (2 * np.arange(1, m // 2 + 1) - 1) * np.pi / (m + 1)
        else:
            phi_odd = np.empty(0)
        return cls(spec=spec, angles_theta=theta, angles_phi=phi, angles_phi_odd=phi_odd)


def factor_h0(c: Couplings, theta: float, phi: float) -> complex:
    """Single zero-field product factor; shared with the zeros module."""
    x1, x2 = complex(c.x1), complex(c.x2)
    return (
        (1 + x1 * x1) * (1 + x2 * x2)
        - 2 * x2 * (1 - x1 * x1) * math.cos(theta)
        - 2 * x1 * (1 - x2 * x2) * math.cos(phi)
    )


def factor_ipi2_u(u1: complex, u2: complex, theta: float, phi: float) -> complex:
    """Single i*pi/2 product factor in the u variables (also consumed by the
    determinant pipeline with u_l = z_l*^2)."""
    return (
        (1 + u1 * u1) * (1 + u2 * u2)
        - 4 * u1 * u2
        - 2 * u2 * (1 - u1) ** 2 * math.cos(2 * theta)
        - 2 * u1 * (1 - u2) ** 2 * math.cos(phi)
    )


def factor_ipi2(c: Couplings, theta: float, phi: float) -> complex:
    return factor_ipi2_u(complex(c.u1), complex(c.u2), theta, phi)


def scaled_product(factors: np.ndarray) -> ScaledValue:
    """Deterministic overflow-free product of a 1-D complex factor array."""
    f = np.asarray(factors, dtype=np.complex128).ravel()
    mag = np.abs(f)
    if np.any(mag == 0.0):
        return ScaledValue.zero()
    _, e = np.frexp(mag)
    norm = np.ldexp(f.real, -e) + 1j * np.ldexp(f.imag, -e)  # magnitudes in [0.5, 1)
    exp2 = int(e.sum(dtype=np.int64))
    acc = ScaledValue.one()
    for i in range(0, len(norm), _PRODUCT_CHUNK):
        acc = acc * complex(np.prod(norm[i : i + _PRODUCT_CHUNK]))
    return acc.ldexp(exp2)


def log_product(factors: np.ndarray) -> ScaledValue:
    """Same product via principal-log accumulation (independent route)."""
    f = np.asarray(factors, dtype=np.complex128).ravel()
    if np.any(f == 0.0):
        return ScaledValue.zero()
    return ScaledValue.from_log(float(np.sum(np.log(np.abs(f)))), float(np.sum(np.angle(f))))


def _accumulate(factors: np.ndarray, mode: str) -> ScaledValue:
    if mode == "scaled":
        return scaled_product(factors)
    if mode == "log":
        return log_product(factors)
    raise PreconditionError("accumulation_mode", f"unknown accumulation mode {mode!r}")


def _pow_prefactor(base: complex | float, exponent: float) -> ScaledValue:
    """base**exponent via the principal logarithm (complex-coupling caveat:
    off the real axis the overall phase is fixed only up to a root of unity)."""
    b = complex(base)
    if b == 0:
        raise PreconditionError("prefactor_zero", "zero base in closed-form prefactor")
    return ScaledValue.from_exp(exponent * cmath.log(b))


def _factor_grid_h0(spec: LatticeSpec, c: Couplings) -> np.ndarray:
    grid = FactorGrid.from_spec(spec)
    x1, x2 = complex(c.x1), complex(c.x2)
    ct = np.cos(grid.angles_theta)[:, None]
    cp = np.cos(grid.angles_phi)[None, :]
    f = (
        (1 + x1 * x1) * (1 + x2 * x2)
        - 2 * x2 * (1 - x1 * x1) * ct
        - 2 * x1 * (1 - x2 * x2) * cp
    )
    return f.ravel()  # j outer, k inner


def z_closed_h0(spec: LatticeSpec, c: Couplings, mode: str = "scaled") -> ScaledValue:
    """Zero-field partition function: x1^(-MN/2) x2^(-MN/2) times the
    (N/2) x M factor product."""
    mn = spec.n_sites
    pre = _pow_prefactor(c.x1, -mn / 2) * _pow_prefactor(c.x2, -mn / 2)
    return pre * _accumulate(_factor_grid_h0(spec, c), mode)


def _factor_grid_ipi2(spec: LatticeSpec, u1: complex, u2: complex) -> np.ndarray:
    grid = FactorGrid.from_spec(spec)
    c2t = np.cos(2 * grid.angles_theta)[:, None]
    cp = np.cos(grid.angles_phi_odd)[None, :]
    f = (
        (1 + u1 * u1) * (1 + u2 * u2)
        - 4 * u1 * u2
        - 2 * u2 * (1 - u1) ** 2 * c2t
        - 2 * u1 * (1 - u2) ** 2 * cp
    )
    return f.ravel()


def z_closed_ipi2(spec: LatticeSpec, c: Couplings, mode: str = "scaled") -> ScaledValue:
    """Field-i*pi/2 partition function (M and N even): u1^(-MN/4) u2^(-MN/4)
    times the (N/2) x (M/2) factor product."""
    spec.require_m_even()
    mn = spec.n_sites
    pre = _pow_prefactor(c.u1, -mn / 4) * _pow_prefactor(c.u2, -mn / 4)
    return pre * _accumulate(_factor_grid_ipi2(spec, complex(c.u1), complex(c.u2)), mode)


def z_closed_ipi2_isotropic(spec: LatticeSpec, k: float, mode: str = "scaled") -> ScaledValue:
    """Isotropic i*pi/2 form: (u^-1 - 1)^(MN/2) times factors
    1 + u^2 + u(6 - 4cos^2(phi_odd/2) - 4cos^2(theta))."""
    spec.require_m_even()
    if complex(k).imag != 0.0:
        raise PreconditionError("k_real", "isotropic form takes a real coupling")
    k = float(complex(k).real)
    if k == 0.0:
        return ScaledValue.zero()  # prefactor (u^-1 - 1) vanishes at u = 1
    grid = FactorGrid.from_spec(spec)
    u = math.exp(-4 * k)
    coeff = (
        6.0
        - 4.0 * np.cos(grid.angles_phi_odd / 2.0)[None, :] ** 2
        - 4.0 * np.cos(grid.angles_theta)[:, None] ** 2
    )
    factors = (1.0 + u * u + u * coeff).ravel()
    pre = _pow_prefactor(1.0 / u - 1.0, spec.n_sites / 2)
    return pre * _accumulate(factors, mode)

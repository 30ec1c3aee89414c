"""Thermodynamic limit: quadrature, magnetization, finite-size diagnostics."""

import math

import numpy as np
import pytest

from bkising.errors import PreconditionError
from bkising.lattice import Couplings, FieldMode, LatticeSpec
from bkising.thermo import (
    finite_size_free_energy,
    free_energy_ipi2,
    magnetization_aniso,
    magnetization_iso,
)


def test_axis_swap_symmetry():
    a = free_energy_ipi2(Couplings(0.3, 0.7), resolution=96)
    b = free_energy_ipi2(Couplings(0.7, 0.3), resolution=96)
    assert abs(a.value - b.value) <= 1e-12


def test_quadrature_convergence_geometric():
    c = Couplings(0.4, 0.5)
    diffs = [free_energy_ipi2(c, resolution=r).estimated_error for r in (8, 16, 32)]
    assert diffs[1] <= diffs[0] / 2
    assert diffs[2] <= 1e-12  # Gauss-Legendre is spectrally accurate here


def test_large_coupling_limit():
    res = free_energy_ipi2(Couplings(3.0, 3.0), resolution=64)
    assert abs(res.value - 6.0) < 1e-9  # integrand -> log 1


def test_free_energy_domain_checks():
    with pytest.raises(PreconditionError):
        free_energy_ipi2(Couplings(-0.1, 0.4))
    with pytest.raises(PreconditionError):
        free_energy_ipi2(Couplings(0.4, 0.5), resolution=1)


def test_finite_size_consistency_richardson():
    # the L -> infinity limit of (1/MN) log Z, removed of its 1/L surface
    # term by Richardson extrapolation, equals the integral to near machine
    # precision; the raw gap at L = 64 is the surface excess ~ 0.0768/L
    c = Couplings(0.4, 0.5)
    f_int = free_energy_ipi2(c, resolution=256).value
    f = {L: finite_size_free_energy(LatticeSpec(L, L), c, FieldMode.IPI_OVER_TWO) for L in (64, 128, 256)}
    extrap = 2 * f[256] - f[128]
    assert abs(extrap - f_int) < 1e-12
    gap64 = abs(f[64] - f_int)
    assert 1.15e-3 < gap64 < 1.25e-3  # measured 1.1996e-3 = 0.0767741/64


def test_finite_size_slope():
    c = Couplings(0.4, 0.5)
    f_int = free_energy_ipi2(c, resolution=256).value
    sizes = np.array([16, 32, 64, 128])
    gaps = np.array(
        [abs(finite_size_free_energy(LatticeSpec(L, L), c, FieldMode.IPI_OVER_TWO) - f_int) for L in sizes]
    )
    slope = np.polyfit(np.log(sizes), np.log(gaps), 1)[0]
    assert slope <= -0.8


def test_finite_size_cauchy_sequences():
    for field, couplings in (
        (FieldMode.IPI_OVER_TWO, Couplings(0.4, 0.4)),
        (FieldMode.ZERO_FIELD, Couplings(0.4, 0.4)),
    ):
        f = [finite_size_free_energy(LatticeSpec(L, L), couplings, field) for L in (8, 16, 32, 64)]
        diffs = [abs(b - a) for a, b in zip(f, f[1:])]
        assert diffs[0] > diffs[1] > diffs[2]


def test_free_spins_log2_at_every_size():
    for L in (8, 32):
        f = finite_size_free_energy(LatticeSpec(L, L), Couplings(0.0, 0.0), FieldMode.ZERO_FIELD)
        assert abs(f - math.log(2.0)) < 1e-12


def test_magnetization_iso_values():
    assert magnetization_iso(1e-8) == pytest.approx(1.0, abs=1e-10)  # x -> 0 limit
    assert magnetization_iso(0.1) > 1.0
    with pytest.raises(PreconditionError):
        magnetization_iso(0.0)
    with pytest.raises(PreconditionError):
        magnetization_iso(1.0)


def test_magnetization_aniso_symmetry_and_limit():
    assert magnetization_aniso(0.3, 0.8) == magnetization_aniso(0.8, 0.3)  # exact
    z = 1.0 - 1e-9
    assert magnetization_aniso(z, z) == pytest.approx(1.0, abs=1e-7)
    with pytest.raises(PreconditionError):
        magnetization_aniso(0.5, 1.2)


@pytest.mark.parametrize("k", [0.3, 0.7, 1.2])
def test_magnetization_diagonal_identity(k):
    iso = magnetization_iso(math.exp(-2 * k))
    aniso = magnetization_aniso(math.tanh(k), math.tanh(k))
    assert abs(aniso - iso) < 1e-10


def test_magnetization_diagonal_identity_grid():
    for k in np.geomspace(0.05, 2.5, 12):
        iso = magnetization_iso(math.exp(-2 * k))
        aniso = magnetization_aniso(math.tanh(k), math.tanh(k))
        assert abs(aniso - iso) < 1e-10

"""Kramers-Wannier duality: dual couplings, lemma, staggered chain."""

import math

import numpy as np
import pytest

from bkising.duality import (
    SELF_DUAL_K,
    BoundaryFieldSpec,
    DualCouplings,
    boundary_phase_sign,
    dual_brute_force,
    dual_coupling,
    staggered_reduced_partition,
    verify_lemma_zb,
    verify_staggered_chain,
)
from bkising.errors import PreconditionError
from bkising.lattice import Couplings, FieldMode, LatticeSpec, brute_force_partition
from bkising.scaled import ScaledValue


def test_self_dual_point():
    assert dual_coupling(SELF_DUAL_K) == pytest.approx(SELF_DUAL_K, abs=1e-14)
    assert math.sinh(2 * SELF_DUAL_K) == pytest.approx(1.0, rel=1e-15)


def test_dual_coupling_k1_product():
    ks = dual_coupling(1.0)
    assert math.sinh(2 * ks) * math.sinh(2.0) == pytest.approx(1.0, rel=1e-13)


@pytest.mark.parametrize("k", np.geomspace(0.05, 3.0, 12))
def test_dual_involution(k):
    assert dual_coupling(dual_coupling(float(k))) == pytest.approx(float(k), rel=1e-12)


def test_dual_coupling_domain():
    with pytest.raises(PreconditionError):
        dual_coupling(0.0)
    with pytest.raises(PreconditionError):
        dual_coupling(-0.4)


@pytest.mark.parametrize("k", np.geomspace(0.08, 2.5, 8))
def test_cosh_ratio_identity(k):
    # cosh(2K*) / cosh(2K) = sinh(2K*) for dual pairs
    ks = dual_coupling(float(k))
    assert math.cosh(2 * ks) / math.cosh(2 * float(k)) == pytest.approx(
        math.sinh(2 * ks), rel=1e-12
    )


def test_dual_couplings_from_primal():
    d = DualCouplings.from_primal(Couplings(0.4, 0.9))
    assert math.sinh(2 * 0.4) * math.sinh(2 * d.k1_star) == pytest.approx(1.0, rel=1e-12)
    assert math.sinh(2 * 0.9) * math.sinh(2 * d.k2_star) == pytest.approx(1.0, rel=1e-12)
    assert d.k2_hat_star == -d.k2_star
    # tanh K* = exp(-2K) is the standard reformulation of the same relation
    assert d.z1_star == pytest.approx(math.exp(-2 * 0.4), rel=1e-13)


def test_boundary_field_spec():
    spec = LatticeSpec(3, 4)
    bf = BoundaryFieldSpec.bottom_row(spec)
    assert bf.row == 4 and bf.value == 0.5j * math.pi
    with pytest.raises(PreconditionError):
        dual_brute_force(spec, DualCouplings(0.4, 0.3), BoundaryFieldSpec(row=2))


def test_dual_free_spins_vanishes():
    spec = LatticeSpec(2, 4)
    z = dual_brute_force(spec, DualCouplings(0.0, 0.0), BoundaryFieldSpec.bottom_row(spec))
    assert z.is_zero


def test_dual_partition_is_real():
    spec = LatticeSpec(2, 4)
    d = DualCouplings.from_primal(Couplings(0.45, 0.3))
    for staggered in (False, True):
        z = dual_brute_force(spec, d, BoundaryFieldSpec.bottom_row(spec), staggered=staggered)
        assert abs(z.to_complex().imag) <= 1e-14 * abs(z.to_complex().real)


@pytest.mark.parametrize(
    "m,n,k1,k2",
    [(1, 2, 0.4, 0.6), (2, 2, 0.3, 0.3), (2, 4, 0.5, 0.2), (3, 2, 0.7, 0.45), (1, 6, 0.25, 0.8)],
)
def test_lemma_zb(m, n, k1, k2):
    assert verify_lemma_zb(LatticeSpec(m, n), Couplings(k1, k2)) < 1e-10


def test_lemma_requires_positive_couplings():
    with pytest.raises(PreconditionError):
        verify_lemma_zb(LatticeSpec(2, 2), Couplings(-0.2, 0.4))


def test_staggered_reduction_identity_exact():
    # Z(K1, K2, i*pi/2) = (sinh K2)^(MN/2) * reduced staggered sum, an exact
    # weight identity checked well below the chain tolerance
    for m, n, k1, k2 in [(2, 2, 0.3, 0.5), (2, 4, 0.2, 0.7), (4, 2, 0.8, 0.35)]:
        spec = LatticeSpec(m, n)
        c = Couplings(k1, k2)
        z = brute_force_partition(spec, c, FieldMode.IPI_OVER_TWO)
        red = staggered_reduced_partition(spec, c)
        rhs = red * ScaledValue.from_log((m * n / 2) * math.log(math.sinh(k2)))
        assert z.ratio_minus_one(rhs) < 1e-13


@pytest.mark.parametrize("m,n", [(2, 2), (2, 4)])
@pytest.mark.parametrize("k1,k2", [(0.3, 0.5), (0.2, 0.7), (0.55, 0.15)])
def test_staggered_chain(m, n, k1, k2):
    assert verify_staggered_chain(LatticeSpec(m, n), Couplings(k1, k2)) < 1e-9


def test_staggered_chain_parity():
    with pytest.raises(PreconditionError):
        verify_staggered_chain(LatticeSpec(3, 2), Couplings(0.3, 0.5))


def test_staggered_row_choice_gauge():
    # which rows carry the negative horizontal coupling is a gauge choice:
    # flipping it multiplies Z by exactly (-1)^(N/2), so |Z| is invariant
    for m, n, k1s, k2s in [(2, 2, 0.55, 0.35), (2, 4, 0.4, 0.3), (4, 2, 0.5, 0.25)]:
        spec = LatticeSpec(m, n)
        bf = BoundaryFieldSpec.bottom_row(spec)
        z1 = dual_brute_force(spec, DualCouplings(k1s, k2s), bf, staggered=True)
        z2 = dual_brute_force(spec, DualCouplings(k1s, -k2s), bf, staggered=True)
        flipped = z2 * boundary_phase_sign(n)
        assert z1.ratio_minus_one(flipped) < 1e-13


def test_column_decoupling_against_1d_chain():
    # K1 = 0 decouples columns; each column is a 1D chain with fixed ends
    # (+1 above, +-1 below depending on column parity), solvable directly
    def chain(m: int, k2: float, bottom: int) -> complex:
        total = 0j
        for bits in range(1 << m):
            s = [1 if (bits >> i) & 1 else -1 for i in range(m)]
            path = [1] + s + [bottom]
            e = k2 * sum(path[i] * path[i + 1] for i in range(m + 1))
            total += (1j) ** (sum(s) % 4) * math.exp(e)
        return total

    for m, n, k2 in [(2, 2, 0.6), (3, 4, 0.4), (4, 2, 0.9)]:
        spec = LatticeSpec(m, n)
        z = brute_force_partition(spec, Couplings(0.0, k2), FieldMode.IPI_OVER_TWO)
        expected = chain(m, k2, +1) ** (n // 2) * chain(m, k2, -1) ** (n // 2)
        assert abs(z.to_complex() - expected) <= 1e-12 * abs(expected)

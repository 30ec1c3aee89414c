"""Exact computation for the 2D Ising lattice with Brascamp-Kunz boundary
conditions: closed-form partition functions at H = 0 and H/kT = i*pi/2,
independent enumeration and transfer-matrix oracles, Kramers-Wannier
duality checks, the determinant pipeline, partition-function zeros, and
thermodynamic-limit quantities."""

__version__ = "0.1.0"

from .errors import BkIsingError, PreconditionError
from .lattice import (
    DEFAULT_ENUMERATION_CAP,
    Couplings,
    FieldMode,
    LatticeSpec,
    SpinConfiguration,
    SymbolicPartition,
    bond_sums,
    brute_force_partition,
    brute_force_symbolic,
    transfer_matrix_partition,
)
from .scaled import ScaledValue
from .closedform import (
    FactorGrid,
    factor_h0,
    factor_ipi2,
    z_closed_h0,
    z_closed_ipi2,
    z_closed_ipi2_isotropic,
)
from .duality import (
    BoundaryFieldSpec,
    DualCouplings,
    SELF_DUAL_K,
    dual_brute_force,
    dual_coupling,
    staggered_reduced_partition,
    verify_lemma_zb,
    verify_staggered_chain,
)
from .mccoywu import (
    CayleyCoefficients,
    EpsilonField,
    TransferP,
    build_c_matrix,
    det_a_limit,
    det_c_recursion,
    dual_staggered_closed_form,
    solve_alpha,
    z_ipi2_via_determinants,
)
from .thermo import (
    FreeEnergyResult,
    finite_size_free_energy,
    free_energy_ipi2,
    magnetization_aniso,
    magnetization_iso,
)
from .zeros import (
    Locus,
    ZeroRecord,
    wood_curve,
    zeros_h0_anisotropic_in_x1,
    zeros_h0_isotropic,
    zeros_ipi2_isotropic,
)

__all__ = [name for name in dir() if not name.startswith("_")]

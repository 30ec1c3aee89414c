"""Deterministic verification suites: oracle equivalence, closed form vs
enumeration, the duality lemma, and the staggered chain.

Each suite returns a list of case records with residuals; the CLI wraps them
into a machine-readable report with a nonzero exit code on any breach.
Couplings are drawn once from a seeded generator, so a given (seed, trials,
max_spins) triple always checks the identical set of cases.
"""

from __future__ import annotations

import numpy as np

from .closedform import z_closed_h0, z_closed_ipi2
from .duality import verify_lemma_zb, verify_staggered_chain
from .lattice import (
    Couplings,
    FieldMode,
    LatticeSpec,
    brute_force_partition,
    brute_force_symbolic,
    transfer_matrix_partition,
    TRANSFER_STATE_CAP,
)

ORACLE_TOL = 1e-10
CLOSED_TOL = 1e-10
LEMMA_TOL = 1e-10
STAGGERED_TOL = 1e-9


def enumerable_sizes(max_spins: int, m_even: bool = False) -> list[LatticeSpec]:
    """All (M, N) with N even, optionally M even, and MN <= max_spins."""
    out = []
    for n in range(2, max_spins + 1, 2):
        for m in range(2 if m_even else 1, max_spins // n + 1, 2 if m_even else 1):
            out.append(LatticeSpec(m, n))
    return out


def dual_enumerable_sizes(max_spins: int) -> list[LatticeSpec]:
    """All (M, N) with N even whose dual (M+1) x N fits the cap."""
    out = []
    for n in range(2, max_spins + 1, 2):
        for m in range(1, max_spins // n):
            if (m + 1) * n <= max_spins:
                out.append(LatticeSpec(m, n))
    return out


def draw_pairs(rng: np.random.Generator, trials: int, low: float, high: float) -> list[tuple[float, float]]:
    """`trials` coupling pairs; (low, high] when low >= 0, [low, high] otherwise."""
    if low >= 0.0:
        raw = high - rng.uniform(0.0, high - low, size=(trials, 2))  # half-open (low, high]
    else:
        raw = rng.uniform(low, high, size=(trials, 2))
    return [(float(a), float(b)) for a, b in raw]


def _case(suite: str, spec: LatticeSpec, k1: float, k2: float, field: str,
          residual: float, tol: float) -> dict:
    return {
        "suite": suite,
        "m": spec.m_rows,
        "n": spec.n_cols,
        "k1": k1,
        "k2": k2,
        "field": field,
        "residual": residual,
        "tol": tol,
        "passed": bool(residual <= tol),
    }


def oracle_agreement_suite(max_spins: int, trials: int, seed: int) -> list[dict]:
    """Brute force vs transfer matrix vs symbolic evaluation, both fields."""
    rng = np.random.default_rng(seed)
    pairs = draw_pairs(rng, trials, -1.0, 1.0)
    cases: list[dict] = []
    for spec in enumerable_sizes(max_spins):
        symbolic = {f: brute_force_symbolic(spec, f) for f in FieldMode}
        for k1, k2 in pairs:
            c = Couplings(k1, k2)
            for f in FieldMode:
                zb = brute_force_partition(spec, c, f)
                r_sym = zb.ratio_minus_one(symbolic[f].evaluate(c))
                cases.append(_case("oracle_symbolic", spec, k1, k2, f.value, r_sym, ORACLE_TOL))
                if spec.n_cols <= TRANSFER_STATE_CAP:
                    r_tm = zb.ratio_minus_one(transfer_matrix_partition(spec, c, f))
                    cases.append(_case("oracle_transfer", spec, k1, k2, f.value, r_tm, ORACLE_TOL))
    return cases


def closed_vs_enum_suite(max_spins: int, trials: int, seed: int) -> list[dict]:
    """Closed products against brute-force enumeration, both field modes,
    seeded coupling pairs in (0, 1]^2."""
    rng = np.random.default_rng(seed)
    pairs = draw_pairs(rng, trials, 0.0, 1.0)
    cases: list[dict] = []
    for spec in enumerable_sizes(max_spins):
        for k1, k2 in pairs:
            c = Couplings(k1, k2)
            zb = brute_force_partition(spec, c, FieldMode.ZERO_FIELD)
            r = zb.ratio_minus_one(z_closed_h0(spec, c))
            cases.append(_case("closed_h0", spec, k1, k2, "zero", r, CLOSED_TOL))
    for spec in enumerable_sizes(max_spins, m_even=True):
        for k1, k2 in pairs:
            c = Couplings(k1, k2)
            zb = brute_force_partition(spec, c, FieldMode.IPI_OVER_TWO)
            r = zb.ratio_minus_one(z_closed_ipi2(spec, c))
            cases.append(_case("closed_ipi2", spec, k1, k2, "ipi2", r, CLOSED_TOL))
    return cases


def lemma_suite(max_spins: int, trials: int, seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    pairs = draw_pairs(rng, trials, 0.0, 1.0)
    cases: list[dict] = []
    for spec in dual_enumerable_sizes(max_spins):
        for k1, k2 in pairs:
            r = verify_lemma_zb(spec, Couplings(k1, k2), cap=max_spins)
            cases.append(_case("lemma_zb", spec, k1, k2, "zero", r, LEMMA_TOL))
    return cases


def staggered_suite(trials: int, seed: int) -> list[dict]:
    rng = np.random.default_rng(seed)
    pairs = draw_pairs(rng, trials, 0.0, 1.0)
    cases: list[dict] = []
    for spec in (LatticeSpec(2, 2), LatticeSpec(2, 4)):
        for k1, k2 in pairs:
            r = verify_staggered_chain(spec, Couplings(k1, k2))
            cases.append(_case("staggered_chain", spec, k1, k2, "ipi2", r, STAGGERED_TOL))
    return cases


def run_verification(max_spins: int = 20, trials: int = 10, seed: int = 42) -> dict:
    """The full suite bundle; deterministic given its arguments."""
    cases = []
    cases += oracle_agreement_suite(max_spins, trials, seed)
    cases += closed_vs_enum_suite(max_spins, trials, seed)
    cases += lemma_suite(max_spins, min(trials, 5), seed)
    cases += staggered_suite(min(trials, 5), seed)
    failures = [c for c in cases if not c["passed"]]
    by_suite: dict[str, dict] = {}
    for c in cases:
        agg = by_suite.setdefault(c["suite"], {"cases": 0, "failed": 0, "max_residual": 0.0})
        agg["cases"] += 1
        agg["failed"] += 0 if c["passed"] else 1
        agg["max_residual"] = max(agg["max_residual"], c["residual"])
    return {
        "passed": not failures,
        "total_cases": len(cases),
        "failed_cases": len(failures),
        "suites": by_suite,
        "cases": cases,
    }

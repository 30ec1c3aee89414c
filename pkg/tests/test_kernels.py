"""Backend plumbing: numba/numpy agreement, determinism, env selection."""

import numpy as np
import pytest

from bkising import _kernels
from bkising.errors import PreconditionError
from bkising.lattice import Couplings, FieldMode, LatticeSpec, brute_force_partition, brute_force_symbolic

BACKENDS = _kernels.available_backends()
CROSS = len(BACKENDS) == 2


def test_resolve_backend_env(monkeypatch):
    monkeypatch.setenv("BKISING_BACKEND", "numpy")
    assert _kernels.resolve_backend() == "numpy"
    monkeypatch.setenv("BKISING_BACKEND", "auto")
    assert _kernels.resolve_backend() in ("numba", "numpy")
    monkeypatch.setenv("BKISING_BACKEND", "cuda")
    with pytest.raises(PreconditionError):
        _kernels.resolve_backend()


def test_explicit_override_beats_env(monkeypatch):
    monkeypatch.setenv("BKISING_BACKEND", "numpy")
    assert _kernels.resolve_backend("numpy") == "numpy"


@pytest.mark.skipif(not CROSS, reason="numba not importable")
@pytest.mark.parametrize("m,n", [(2, 4), (3, 4), (2, 6)])
@pytest.mark.parametrize("k1,k2", [(0.35, 0.6), (-0.4, 0.25), (0.2 + 0.1j, 0.5 - 0.3j)])
def test_bk_phase_sums_backends_agree(m, n, k1, k2):
    shift = abs(complex(k1).real) * m * n + abs(complex(k2).real) * (m + 1) * n
    a = _kernels.bk_phase_sums(m, n, k1, k2, shift, backend="numba")
    b = _kernels.bk_phase_sums(m, n, k1, k2, shift, backend="numpy")
    for zero_field in (True, False):
        za = _kernels.combine_buckets(a, zero_field)
        zb = _kernels.combine_buckets(b, zero_field)
        assert za == pytest.approx(zb, rel=1e-12, abs=1e-13)


@pytest.mark.skipif(not CROSS, reason="numba not importable")
def test_symbolic_counts_backends_identical():
    ca = _kernels.bk_symbolic_counts(3, 4, backend="numba")
    cb = _kernels.bk_symbolic_counts(3, 4, backend="numpy")
    assert np.array_equal(ca, cb)


@pytest.mark.skipif(not CROSS, reason="numba not importable")
@pytest.mark.parametrize("staggered", [False, True])
def test_dual_phase_sums_backends_agree(staggered):
    a = _kernels.dual_phase_sums(3, 4, 0.45, 0.3, staggered, 0.45 * 8 + 0.3 * 12, backend="numba")
    b = _kernels.dual_phase_sums(3, 4, 0.45, 0.3, staggered, 0.45 * 8 + 0.3 * 12, backend="numpy")
    za = _kernels.combine_buckets(a, False)
    zb = _kernels.combine_buckets(b, False)
    assert za == pytest.approx(zb, rel=1e-12, abs=1e-13)


@pytest.mark.skipif(not CROSS, reason="numba not importable")
def test_staggered_reduced_backends_agree():
    args = (4, 4, 0.3, 0.55, 0.3 * 16 + 0.55 * 12)
    assert _kernels.staggered_reduced_sum(*args, backend="numba") == pytest.approx(
        _kernels.staggered_reduced_sum(*args, backend="numpy"), rel=1e-12
    )


@pytest.mark.parametrize("backend", BACKENDS)
def test_repeat_calls_bit_identical(backend):
    a = _kernels.bk_phase_sums(2, 6, 0.3, 0.7, 0.3 * 12 + 0.7 * 18, backend=backend)
    b = _kernels.bk_phase_sums(2, 6, 0.3, 0.7, 0.3 * 12 + 0.7 * 18, backend=backend)
    assert np.array_equal(a, b)


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not importable")
def test_result_independent_of_thread_count():
    import numba

    args = (3, 4, 0.35, 0.6, 0.35 * 12 + 0.6 * 16)
    before = numba.get_num_threads()
    try:
        numba.set_num_threads(1)
        single = _kernels.bk_phase_sums(*args, backend="numba")
        numba.set_num_threads(max(before, 2))
        multi = _kernels.bk_phase_sums(*args, backend="numba")
    finally:
        numba.set_num_threads(before)
    assert np.array_equal(single, multi)  # bit-reproducible block tree


@pytest.mark.parametrize("backend", BACKENDS)
def test_partition_via_backend_param(backend):
    spec = LatticeSpec(2, 4)
    c = Couplings(0.3, 0.5)
    z = brute_force_partition(spec, c, FieldMode.IPI_OVER_TWO, backend=backend)
    sym = brute_force_symbolic(spec, FieldMode.IPI_OVER_TWO, backend=backend)
    assert z.ratio_minus_one(sym.evaluate(c)) < 1e-12


def test_thread_cap_env_rejects_garbage(monkeypatch):
    monkeypatch.setenv("BKISING_THREADS", "lots")
    if _kernels.HAVE_NUMBA:
        with pytest.raises(PreconditionError):
            _kernels._apply_thread_cap()


def test_dd_tree_fold_reduces_exactly():
    parts = np.zeros((8, 1, 1, 2))
    parts[:, 0, 0, 0] = [1e16, 1.0, -1e16, 1.0, 1e16, 1.0, -1e16, 1.0]
    folded = _kernels._dd_tree_fold(parts)
    assert folded[0, 0, 0] + folded[0, 0, 1] == 4.0

"""Enumeration kernels: numba-jitted hot loops with a pure-numpy fallback.

Backend selection
-----------------
The default backend is numba when importable, numpy otherwise.  Set
``BKISING_BACKEND=numpy`` (or ``numba``/``auto``) to override, or pass
``backend=`` explicitly to the public lattice/duality operations.
``BKISING_THREADS`` caps the numba thread count.

Determinism
-----------
Every kernel partitions the 2**bits mask range into fixed-size blocks,
accumulates each block independently, and combines the per-block partials
with a fixed pairwise tree.  The result is bit-identical regardless of the
number of worker threads.

Accuracy
--------
The i*pi/2 field makes the partition function a small difference of large
same-sign phase-class sums, so class totals are never rounded to a single
double: the numba path carries compensated (hi, lo) double-double pairs per
class (TwoSum accumulation), the numpy fallback sums blocks in extended
precision and splits the result into the same (hi, lo) representation, and
the phase combination happens on the pairs.

Spin/bond conventions (shared with the rest of the package): row-major bit
layout, bit index (j-1)*N + (k-1), bit=1 means spin +1; the fixed rows
sigma_{0,k}=+1 and sigma_{M+1,k}=(-1)^(k+1) are applied on the fly.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import PreconditionError

_ALT64 = 0x5555555555555555  # +1 spins of the alternating boundary row (even bit indices)

try:
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on numba-less installs
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore[misc]
        def wrap(f):
            return f

        return wrap

    prange = range  # type: ignore[assignment]


def _apply_thread_cap() -> None:
    if not HAVE_NUMBA:
        return
    raw = os.environ.get("BKISING_THREADS")
    if not raw:
        return
    try:
        want = int(raw)
    except ValueError:
        raise PreconditionError("threads_env", f"BKISING_THREADS={raw!r} is not an integer")
    if want >= 1:
        numba.set_num_threads(min(want, numba.config.NUMBA_NUM_THREADS))


_apply_thread_cap()


def resolve_backend(backend: str | None = None) -> str:
    """Resolve 'numba' or 'numpy' from an explicit override or the env flag."""
    choice = backend or os.environ.get("BKISING_BACKEND", "auto")
    if choice not in ("auto", "numba", "numpy"):
        raise PreconditionError("backend_name", f"unknown backend {choice!r}")
    if choice == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    if choice == "numba" and not HAVE_NUMBA:
        raise PreconditionError("backend_unavailable", "numba backend requested but numba is not importable")
    return choice


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAVE_NUMBA else ("numpy",)


def _block_split(bits: int, block_bits: int = 14) -> tuple[int, int]:
    bb = min(block_bits, bits)
    return bb, 1 << (bits - bb)


# --------------------------------------------------------------------------
# double-double plumbing (hi, lo pairs along the last axis)
# --------------------------------------------------------------------------

def _dd_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized (hi, lo) + (hi, lo) with TwoSum and renormalization."""
    h1, l1 = a[..., 0], a[..., 1]
    h2, l2 = b[..., 0], b[..., 1]
    s = h1 + h2
    bv = s - h1
    err = (h1 - (s - bv)) + (h2 - bv)
    lo = l1 + l2 + err
    hi = s + lo
    lo = lo - (hi - s)
    return np.stack([hi, lo], axis=-1)


def _dd_tree_fold(partials: np.ndarray) -> np.ndarray:
    """Fixed pairwise tree reduction of (hi, lo) pairs along axis 0."""
    arr = partials
    while arr.shape[0] > 1:
        if arr.shape[0] % 2:
            pad = np.zeros((1,) + arr.shape[1:], dtype=arr.dtype)
            arr = np.concatenate([arr, pad], axis=0)
        arr = _dd_add(arr[0::2], arr[1::2])
    return arr[0]


def _dd_value(pair: np.ndarray) -> float:
    return float(pair[..., 0] + pair[..., 1])


def combine_buckets(buckets: np.ndarray, zero_field: bool) -> complex:
    """Collapse folded phase-class pairs (4, re/im, hi/lo) into the partition
    sum: plain total at zero field, (c0 - c2) + i(c1 - c3) at i*pi/2."""

    def neg(p):
        return np.stack([-p[..., 0], -p[..., 1]], axis=-1)

    if zero_field:
        re = _dd_add(_dd_add(buckets[0, 0], buckets[1, 0]), _dd_add(buckets[2, 0], buckets[3, 0]))
        im = _dd_add(_dd_add(buckets[0, 1], buckets[1, 1]), _dd_add(buckets[2, 1], buckets[3, 1]))
    else:
        # sum of i**c * (re_c + i im_c): real part re0 - re2 - im1 + im3,
        # imaginary part im0 - im2 + re1 - re3
        re = _dd_add(buckets[0, 0], neg(buckets[2, 0]))
        re = _dd_add(re, _dd_add(buckets[3, 1], neg(buckets[1, 1])))
        im = _dd_add(buckets[0, 1], neg(buckets[2, 1]))
        im = _dd_add(im, _dd_add(buckets[1, 0], neg(buckets[3, 0])))
    return complex(_dd_value(re), _dd_value(im))


def _split_extended(x: np.ndarray) -> np.ndarray:
    """Split extended-precision values into float64 (hi, lo) pairs."""
    hi = x.astype(np.float64)
    lo = (x - hi.astype(x.dtype)).astype(np.float64)
    return np.stack([hi, lo], axis=-1)


# --------------------------------------------------------------------------
# numba kernels
# --------------------------------------------------------------------------

@njit(cache=True, inline="always")
def _pc(x):
    x = x - ((x >> 1) & 0x5555555555555555)
    x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
    return (x * 0x0101010101010101) >> 56


@njit(cache=True, inline="always")
def _acc(sums, cls, part, x):
    """TwoSum accumulate x into the (hi, lo) slot sums[cls, part]."""
    hi = sums[cls, part, 0]
    s = hi + x
    bv = s - hi
    sums[cls, part, 1] += (hi - (s - bv)) + (x - bv)
    sums[cls, part, 0] = s


@njit(cache=True, parallel=True)
def _bk_phase_sums_nb(m, n, k1, k2, shift, block_bits, out):
    bits = m * n
    full = (1 << n) - 1
    alt = _ALT64 & full
    nblocks = out.shape[0]
    for blk in prange(nblocks):
        sums = np.zeros((4, 2, 2))
        start = blk << block_bits
        for off in range(1 << block_bits):
            mask = start + off
            a = 0
            b = 0
            prev = full  # virtual all-up row above
            w = 0
            for r in range(m):
                w = (mask >> (r * n)) & full
                rot = ((w << 1) | (w >> (n - 1))) & full
                a += n - 2 * _pc(w ^ rot)
                b += n - 2 * _pc(w ^ prev)
                prev = w
            b += n - 2 * _pc(w ^ alt)
            s = 2 * _pc(mask) - bits
            cls = s & 3
            t = np.exp(a * k1 + b * k2 - shift)
            _acc(sums, cls, 0, t.real)
            _acc(sums, cls, 1, t.imag)
        out[blk] = sums


@njit(cache=True, parallel=True)
def _bk_symbolic_counts_nb(m, n, block_bits, slabs):
    bits = m * n
    full = (1 << n) - 1
    alt = _ALT64 & full
    bmax = (m + 1) * n
    nblocks = slabs.shape[0]
    for blk in prange(nblocks):
        start = blk << block_bits
        for off in range(1 << block_bits):
            mask = start + off
            a = 0
            b = 0
            prev = full
            w = 0
            for r in range(m):
                w = (mask >> (r * n)) & full
                rot = ((w << 1) | (w >> (n - 1))) & full
                a += n - 2 * _pc(w ^ rot)
                b += n - 2 * _pc(w ^ prev)
                prev = w
            b += n - 2 * _pc(w ^ alt)
            s = 2 * _pc(mask) - bits
            slabs[blk, (a + bits) // 2, (b + bmax) // 2, s & 3] += 1


@njit(cache=True, parallel=True)
def _dual_phase_sums_nb(rows, n, k1s, k2s, staggered, shift, block_bits, out):
    full = (1 << n) - 1
    nblocks = out.shape[0]
    for blk in prange(nblocks):
        sums = np.zeros((4, 2, 2))
        start = blk << block_bits
        for off in range(1 << block_bits):
            mask = start + off
            h = 0
            v = 0
            prev = -1
            w = 0
            for r in range(rows):
                w = (mask >> (r * n)) & full
                rot = ((w << 1) | (w >> (n - 1))) & full
                hrow = n - 2 * _pc(w ^ rot)
                if staggered and (r & 1):
                    h -= hrow
                else:
                    h += hrow
                if r > 0:
                    v += n - 2 * _pc(w ^ prev)
                prev = w
            s_last = 2 * _pc(w) - n
            cls = s_last & 3
            t = np.exp(v * k1s + h * k2s - shift)
            _acc(sums, cls, 0, t.real)
            _acc(sums, cls, 1, t.imag)
        out[blk] = sums


@njit(cache=True, parallel=True)
def _staggered_reduced_nb(m, n, k1, k2, shift, tp, tm, block_bits, out):
    full = (1 << n) - 1
    alt = _ALT64 & full
    half = (m // 2) * n
    nblocks = out.shape[0]
    for blk in prange(nblocks):
        sums = np.zeros((1, 1, 2))
        start = blk << block_bits
        for off in range(1 << block_bits):
            mask = start + off
            a = 0
            beven = 0
            npl = 0
            prev = full
            w = 0
            for r in range(m):
                w = (mask >> (r * n)) & full
                rot = ((w << 1) | (w >> (n - 1))) & full
                a += n - 2 * _pc(w ^ rot)
                x = _pc(w ^ prev)
                if r & 1:  # bond row r (0-based) odd -> odd vertical bond
                    npl += n - x
                else:
                    beven += n - 2 * x
                prev = w
            beven += n - 2 * _pc(w ^ alt)  # bond M is even (M even)
            t = np.exp(k1 * a + k2 * beven - shift) * tp[npl] * tm[half - npl]
            _acc(sums, 0, 0, t)
        out[blk] = sums[0, 0]


# --------------------------------------------------------------------------
# numpy fallback kernels (vectorized over mask chunks)
# --------------------------------------------------------------------------

def _chunks(bits: int, block_bits: int):
    nblocks = 1 << (bits - block_bits)
    size = 1 << block_bits
    for blk in range(nblocks):
        start = blk << block_bits
        yield blk, np.arange(start, start + size, dtype=np.int64)


def _pc_np(x: np.ndarray) -> np.ndarray:
    return np.bitwise_count(x).astype(np.int64)


def _bk_bond_arrays_np(masks: np.ndarray, m: int, n: int):
    full = (1 << n) - 1
    alt = _ALT64 & full
    a = np.zeros(len(masks), dtype=np.int64)
    b = np.zeros(len(masks), dtype=np.int64)
    prev = np.full(len(masks), full, dtype=np.int64)
    w = prev
    for r in range(m):
        w = (masks >> (r * n)) & full
        rot = ((w << 1) | (w >> (n - 1))) & full
        a += n - 2 * _pc_np(w ^ rot)
        b += n - 2 * _pc_np(w ^ prev)
        prev = w
    b += n - 2 * _pc_np(w ^ alt)
    s = 2 * _pc_np(masks) - m * n
    return a, b, s


def _bucket_extended(t: np.ndarray, cls: np.ndarray) -> np.ndarray:
    """Per-class block sums in extended precision, split to (hi, lo)."""
    ext = np.zeros((4, 2), dtype=np.longdouble)
    tre = t.real.astype(np.longdouble)
    tim = t.imag.astype(np.longdouble)
    for c in range(4):
        sel = cls == c
        ext[c, 0] = tre[sel].sum()
        ext[c, 1] = tim[sel].sum()
    return _split_extended(ext)


def _bk_phase_sums_np(m, n, k1, k2, shift, block_bits, out):
    for blk, masks in _chunks(m * n, block_bits):
        a, b, s = _bk_bond_arrays_np(masks, m, n)
        t = np.exp(a * k1 + b * k2 - shift)
        out[blk] = _bucket_extended(t, s & 3)


def _bk_symbolic_counts_np(m, n, block_bits, slabs):
    bits = m * n
    bmax = (m + 1) * n
    nb = bmax + 1
    for blk, masks in _chunks(bits, block_bits):
        a, b, s = _bk_bond_arrays_np(masks, m, n)
        idx = ((a + bits) // 2) * (nb * 4) + ((b + bmax) // 2) * 4 + (s & 3)
        slabs[blk] = np.bincount(idx, minlength=(bits + 1) * nb * 4).reshape(bits + 1, nb, 4)


def _dual_phase_sums_np(rows, n, k1s, k2s, staggered, shift, block_bits, out):
    full = (1 << n) - 1
    for blk, masks in _chunks(rows * n, block_bits):
        h = np.zeros(len(masks), dtype=np.int64)
        v = np.zeros(len(masks), dtype=np.int64)
        prev = None
        w = None
        for r in range(rows):
            w = (masks >> (r * n)) & full
            rot = ((w << 1) | (w >> (n - 1))) & full
            hrow = n - 2 * _pc_np(w ^ rot)
            if staggered and (r & 1):
                h -= hrow
            else:
                h += hrow
            if prev is not None:
                v += n - 2 * _pc_np(w ^ prev)
            prev = w
        s_last = 2 * _pc_np(w) - n
        t = np.exp(v * k1s + h * k2s - shift)
        out[blk] = _bucket_extended(t, s_last & 3)


def _staggered_reduced_np(m, n, k1, k2, shift, tp, tm, block_bits, out):
    full = (1 << n) - 1
    alt = _ALT64 & full
    half = (m // 2) * n
    for blk, masks in _chunks(m * n, block_bits):
        a = np.zeros(len(masks), dtype=np.int64)
        beven = np.zeros(len(masks), dtype=np.int64)
        npl = np.zeros(len(masks), dtype=np.int64)
        prev = np.full(len(masks), full, dtype=np.int64)
        w = prev
        for r in range(m):
            w = (masks >> (r * n)) & full
            rot = ((w << 1) | (w >> (n - 1))) & full
            a += n - 2 * _pc_np(w ^ rot)
            x = _pc_np(w ^ prev)
            if r & 1:
                npl += n - x
            else:
                beven += n - 2 * x
            prev = w
        beven += n - 2 * _pc_np(w ^ alt)  # bond M is even (M even)
        t = (np.exp(k1 * a + k2 * beven - shift) * tp[npl] * tm[half - npl]).astype(np.longdouble)
        out[blk] = _split_extended(t.sum())


# --------------------------------------------------------------------------
# public dispatchers
# --------------------------------------------------------------------------

def bk_phase_sums(m: int, n: int, k1: complex, k2: complex, shift: float,
                  backend: str | None = None) -> np.ndarray:
    """Sum of exp(a*k1 + b*k2 - shift) over all 2**(m*n) configurations,
    bucketed by total spin sum mod 4; shape (4, re/im, hi/lo)."""
    be = resolve_backend(backend)
    bb, nblocks = _block_split(m * n)
    out = np.zeros((nblocks, 4, 2, 2), dtype=np.float64)
    if be == "numba":
        _bk_phase_sums_nb(m, n, complex(k1), complex(k2), float(shift), bb, out)
    else:
        _bk_phase_sums_np(m, n, complex(k1), complex(k2), float(shift), bb, out)
    return _dd_tree_fold(out)


def bk_symbolic_counts(m: int, n: int, backend: str | None = None) -> np.ndarray:
    """Exact configuration counts indexed by ((a+MN)/2, (b+(M+1)N)/2, s mod 4)."""
    be = resolve_backend(backend)
    bb, nblocks = _block_split(m * n)
    slabs = np.zeros((nblocks, m * n + 1, (m + 1) * n + 1, 4), dtype=np.int64)
    if be == "numba":
        _bk_symbolic_counts_nb(m, n, bb, slabs)
    else:
        _bk_symbolic_counts_np(m, n, bb, slabs)
    return slabs.sum(axis=0)


def dual_phase_sums(rows: int, n: int, k1s: complex, k2s: complex, staggered: bool,
                    shift: float, backend: str | None = None) -> np.ndarray:
    """Free-boundary cylinder sums bucketed by the last-row spin sum mod 4."""
    be = resolve_backend(backend)
    bb, nblocks = _block_split(rows * n)
    out = np.zeros((nblocks, 4, 2, 2), dtype=np.float64)
    if be == "numba":
        _dual_phase_sums_nb(rows, n, complex(k1s), complex(k2s), bool(staggered), float(shift), bb, out)
    else:
        _dual_phase_sums_np(rows, n, complex(k1s), complex(k2s), bool(staggered), float(shift), bb, out)
    return _dd_tree_fold(out)


def staggered_reduced_sum(m: int, n: int, k1: float, k2: float, shift: float,
                          backend: str | None = None) -> float:
    """Sum of exp(k1*a + k2*b_even - shift) * prod_odd (1 + ss'/z2) over all
    configurations; odd vertical bonds contribute table weights (1 +- 1/z2)."""
    be = resolve_backend(backend)
    z2 = np.tanh(k2)
    half = (m // 2) * n
    idx = np.arange(half + 1, dtype=np.float64)
    tp = (1.0 + 1.0 / z2) ** idx
    tm = (1.0 - 1.0 / z2) ** idx
    bb, nblocks = _block_split(m * n)
    out = np.zeros((nblocks, 2), dtype=np.float64)
    if be == "numba":
        _staggered_reduced_nb(m, n, float(k1), float(k2), float(shift), tp, tm, bb, out)
    else:
        _staggered_reduced_np(m, n, float(k1), float(k2), float(shift), tp, tm, bb, out)
    return _dd_value(_dd_tree_fold(out))

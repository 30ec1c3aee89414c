"""Partition-function zeros from the per-factor closed forms.

Every factor of the finite-lattice products is a low-degree polynomial in
the temperature-like variable (quartic in x for zero field, quadratic in u
for the i*pi/2 field, quadratic in x1 for the anisotropic sweep), so the
complete zero set is obtained factor by factor: companion-matrix roots
polished by Newton steps, then classified against the exact loci.

Output ordering is deterministic (j-major, k inner, roots sorted by real
then imaginary part).  CSV column order is fixed: j,k,re,im,locus,residual.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PreconditionError
from .lattice import LatticeSpec

SQRT2 = math.sqrt(2.0)
SEGMENT_LO = -3.0 - 2.0 * SQRT2
SEGMENT_HI = -3.0 + 2.0 * SQRT2


class Locus(enum.Enum):
    CIRCLE_MINUS = "circle_minus"  # |x - 1| = sqrt(2)
    CIRCLE_PLUS = "circle_plus"    # |x + 1| = sqrt(2)
    UNIT_CIRCLE = "unit_circle"    # |u| = 1
    REAL_SEGMENT = "real_segment"  # -3-2*sqrt(2) <= u <= -3+2*sqrt(2)
    UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class ZeroRecord:
    j: int
    k: int
    location: complex
    locus: Locus
    residual: float
    degenerate: bool = False


CLASSIFY_TOL = 1e-9


def _polish(coeffs: np.ndarray, roots: np.ndarray, iters: int = 4) -> np.ndarray:
    """A few Newton steps on p(x) = sum coeffs[i] x^(deg-i)."""
    deriv = np.polyder(coeffs)
    x = roots.astype(complex)
    for _ in range(iters):
        p = np.polyval(coeffs, x)
        dp = np.polyval(deriv, x)
        step = np.where(dp != 0, p / np.where(dp != 0, dp, 1.0), 0.0)
        x = x - step
    return x


def _poly_scale(coeffs: np.ndarray, x: complex) -> float:
    """Evaluation magnitude scale sum |c_i| |x|^i, for residual thresholds."""
    ax = abs(x)
    deg = len(coeffs) - 1
    return float(sum(abs(c) * ax ** (deg - i) for i, c in enumerate(coeffs)))


def _sorted_roots(roots: np.ndarray) -> list[complex]:
    return sorted((complex(r) for r in roots), key=lambda z: (z.real, z.imag))


def _h0_quartic_roots(c: float) -> np.ndarray:
    """Roots of x^4 + 2c x^3 + 2 x^2 - 2c x + 1 (the isotropic zero-field
    factor cleared of its prefactor).

    Companion-matrix eigenvalues plus Newton polish; factors with nearly
    coincident roots (c -> 0 makes x = +-i double) sit at Newton's noise
    floor eps/|p'| above the locus tolerance, so clustered quartets are
    rebuilt through the reciprocal substitution v = 1/x - x: v = c -+
    i*sqrt(4 - c^2) has |v| = 2 exactly and x^2 + v x - 1 = 0 splits it with
    uniform accuracy."""
    coeffs = np.array([1.0, 2 * c, 2.0, -2 * c, 1.0])
    roots = _polish(coeffs, np.roots(coeffs))
    gaps = np.abs(roots[:, None] - roots[None, :]) + np.eye(4)
    if gaps.min() < 1e-5:
        out = []
        for v in (complex(c, math.sqrt(max(0.0, 4.0 - c * c))),
                  complex(c, -math.sqrt(max(0.0, 4.0 - c * c)))):
            disc = (v * v + 4.0) ** 0.5
            out += [(-v + disc) / 2.0, (-v - disc) / 2.0]
        roots = np.array(out)
    return roots


def zeros_h0_isotropic(spec: LatticeSpec) -> list[ZeroRecord]:
    """All 2MN zeros in x of the isotropic zero-field partition function.

    Per factor (j, k) the quartic x^4 + 2c x^3 + 2 x^2 - 2c x + 1 with
    c = cos(theta_j) + cos(phi_k); every root lies on one of the two circles
    |x -+ 1| = sqrt(2) (equivalently |sinh 2K| = 1)."""
    m, n = spec.m_rows, spec.n_cols
    records: list[ZeroRecord] = []
    for j in range(1, n // 2 + 1):
        ct = math.cos((2 * j - 1) * math.pi / n)
        for k in range(1, m + 1):
            c = ct + math.cos(k * math.pi / (m + 1))
            for x in _sorted_roots(_h0_quartic_roots(c)):
                d_minus = abs(abs(x - 1.0) - SQRT2)
                d_plus = abs(abs(x + 1.0) - SQRT2)
                if d_minus <= d_plus:
                    locus, resid = Locus.CIRCLE_MINUS, d_minus
                else:
                    locus, resid = Locus.CIRCLE_PLUS, d_plus
                if resid > CLASSIFY_TOL:
                    locus = Locus.UNCLASSIFIED
                records.append(ZeroRecord(j=j, k=k, location=x, locus=locus, residual=resid))
    return records


def ipi2_roots_for_coefficient(c: float) -> tuple[complex, complex]:
    """Roots of u^2 + c u + 1 = 0 via the stable quadratic (product of the
    roots is exactly 1, preserving the |u1 u2| = 1 structure)."""
    if abs(c) <= 2.0:
        re = -c / 2.0
        im = math.sqrt(max(0.0, 4.0 - c * c)) / 2.0
        return complex(re, im), complex(re, -im)
    q = -(c + math.copysign(math.sqrt(c * c - 4.0), c)) / 2.0
    return complex(q), complex(1.0 / q)


def zeros_ipi2_isotropic(spec: LatticeSpec) -> list[ZeroRecord]:
    """All MN/2 zeros in u of the isotropic i*pi/2 partition function.

    Per factor the quadratic u^2 + c u + 1 with
    c = 6 - 4cos^2(phi_odd_k / 2) - 4cos^2(theta_j) in (-2, 6): conjugate
    pairs on |u| = 1 for |c| <= 2, real pairs inside
    [-3-2*sqrt(2), -3+2*sqrt(2)] for c > 2."""
    spec.require_m_even()
    m, n = spec.m_rows, spec.n_cols
    records: list[ZeroRecord] = []
    for j in range(1, n // 2 + 1):
        c2t = math.cos((2 * j - 1) * math.pi / n) ** 2
        for k in range(1, m // 2 + 1):
            c = 6.0 - 4.0 * math.cos((2 * k - 1) * math.pi / (2 * (m + 1))) ** 2 - 4.0 * c2t
            on_circle = abs(c) <= 2.0
            for u in ipi2_roots_for_coefficient(c):
                if on_circle:
                    locus, resid = Locus.UNIT_CIRCLE, abs(abs(u) - 1.0)
                else:
                    over = max(0.0, SEGMENT_LO - u.real, u.real - SEGMENT_HI)
                    locus, resid = Locus.REAL_SEGMENT, max(over, abs(u.imag))
                records.append(ZeroRecord(j=j, k=k, location=u, locus=locus, residual=resid))
    return records


def solve_factor_quadratic(lead: complex, mid: complex, const: complex) -> tuple[list[complex], bool]:
    """Numerically stable roots of lead*x^2 + mid*x + const; a vanishing
    leading coefficient reduces to the linear root and flags it."""
    if lead == 0:
        if mid == 0:
            raise PreconditionError("factor_degenerate", "factor has no x1 dependence")
        return [-const / mid], True
    disc = (mid * mid - 4 * lead * const) ** 0.5
    if abs(mid + disc) >= abs(mid - disc):
        q = -(mid + disc) / 2.0
    else:
        q = -(mid - disc) / 2.0
    if q == 0:  # mid == 0 and disc == 0: double root of lead*x^2
        return [complex(0.0), complex(0.0)], False
    return [q / lead, const / q], False


def zeros_h0_anisotropic_in_x1(spec: LatticeSpec, x2: complex) -> list[ZeroRecord]:
    """Zeros in x1 of each zero-field factor at fixed x2; finite-size
    anisotropic zeros carry no exact locus, so records are Unclassified."""
    m, n = spec.m_rows, spec.n_cols
    records: list[ZeroRecord] = []
    x2 = complex(x2)
    for j in range(1, n // 2 + 1):
        ct = math.cos((2 * j - 1) * math.pi / n)
        for k in range(1, m + 1):
            cp = math.cos(k * math.pi / (m + 1))
            lead = (1 + x2 * x2) + 2 * x2 * ct
            mid = -2 * (1 - x2 * x2) * cp
            const = (1 + x2 * x2) - 2 * x2 * ct
            roots, degenerate = solve_factor_quadratic(lead, mid, const)
            for x in _sorted_roots(np.array(roots)):
                records.append(
                    ZeroRecord(j=j, k=k, location=x, locus=Locus.UNCLASSIFIED,
                               residual=0.0, degenerate=degenerate)
                )
    return records


def wood_curve(alpha: float, samples: int, r_min: float = 0.05, r_max: float = 20.0) -> list[tuple[float, float]]:
    """Sampled polar points of the asymptotic anisotropic-zero curve for
    coupling ratio alpha; radii on a log grid, points with |cos theta| > 1
    omitted."""
    if samples < 2:
        raise PreconditionError("samples_min", "need at least 2 samples")
    pts: list[tuple[float, float]] = []
    for r in np.logspace(math.log10(r_min), math.log10(r_max), samples):
        r = float(r)
        # (r^(2 alpha) - 1)/(r^(2 alpha) + 1) = tanh(alpha ln r), overflow-free
        rhs = -math.tanh(alpha * math.log(r)) * (1.0 + r * r) / (2.0 * r)
        if abs(rhs) > 1.0 + 1e-12:
            continue
        pts.append((r, math.acos(min(1.0, max(-1.0, rhs)))))
    return pts


# --------------------------------------------------------------------------
# emitters: CSV and JSON with a fixed schema
# --------------------------------------------------------------------------

def records_to_dicts(records: list[ZeroRecord]) -> list[dict]:
    return [
        {
            "j": r.j,
            "k": r.k,
            "re": r.location.real,
            "im": r.location.imag,
            "locus": r.locus.value,
            "residual": r.residual,
        }
        for r in records
    ]


def write_zeros_csv(records: list[ZeroRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "k", "re", "im", "locus", "residual"])
        for r in records:
            w.writerow([r.j, r.k, repr(r.location.real), repr(r.location.imag), r.locus.value, repr(r.residual)])


def write_zeros_json(records: list[ZeroRecord], path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump({"schema": ["j", "k", "re", "im", "locus", "residual"],
                   "zeros": records_to_dicts(records)}, fh, indent=1)
        fh.write("\n")


def read_zeros_json(path: str | Path) -> list[ZeroRecord]:
    with open(path) as fh:
        payload = json.load(fh)
    return [
        ZeroRecord(
            j=row["j"], k=row["k"], location=complex(row["re"], row["im"]),
            locus=Locus(row["locus"]), residual=row["residual"],
        )
        for row in payload["zeros"]
    ]


def write_wood_csv(points: list[tuple[float, float]], path: str | Path) -> None:
    """Companion emitter for the asymptotic curve overlay (columns r, theta)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "theta"])
        for r, th in points:
            w.writerow([repr(r), repr(th)])

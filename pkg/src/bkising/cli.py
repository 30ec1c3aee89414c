"""Command-line interface.

Subcommands: ``z`` (one partition-function evaluation by a chosen method),
``verify`` (the deterministic residual suites), ``zeros`` (zero sets to CSV
or JSON), ``free-energy`` (the thermodynamic-limit integral).  Every run
prints a JSON envelope carrying the tool version, the fully resolved
configuration, wall time, and residuals where applicable.

Exit codes: 0 success, 2 precondition violation, 3 verification failure,
4 I/O error.

Environment: BKISING_BACKEND selects the numba or numpy kernel path,
BKISING_THREADS caps parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__
from .errors import PreconditionError
from .lattice import (
    Couplings,
    FieldMode,
    LatticeSpec,
    brute_force_partition,
    transfer_matrix_partition,
)
from .closedform import z_closed_h0, z_closed_ipi2
from .mccoywu import z_ipi2_via_determinants
from .scaled import ScaledValue
from .thermo import free_energy_ipi2
from .verify import run_verification
from .zeros import (
    zeros_h0_isotropic,
    zeros_ipi2_isotropic,
    zeros_h0_anisotropic_in_x1,
    write_zeros_csv,
    write_zeros_json,
)

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_VERIFY_FAILED = 3
EXIT_IO = 4


def _parse_complex(text: str) -> complex:
    """Accept 're+imi' strings, e.g. '0.3+0.1i' or plain reals."""
    try:
        return complex(text.strip().replace("i", "j").replace(" ", ""))
    except ValueError:
        raise PreconditionError("complex_format", f"cannot parse complex number {text!r}")


def _field(name: str) -> FieldMode:
    return FieldMode.ZERO_FIELD if name == "zero" else FieldMode.IPI_OVER_TWO


def _envelope(command: str, config: dict, result: dict, t0: float) -> dict:
    return {
        "tool": "bkising",
        "version": __version__,
        "command": command,
        "config": config,
        "result": result,
        "wall_time_s": round(time.perf_counter() - t0, 6),
    }


def _z_payload(z: ScaledValue) -> dict:
    if z.is_zero:
        return {"log_abs_z": None, "phase": 0.0, "sign": 0}
    phase = z.phase()
    sign = 0
    if abs(phase) < 1e-8:
        sign = 1
    elif abs(abs(phase) - math.pi) < 1e-8:
        sign = -1
    return {"log_abs_z": z.log_abs(), "phase": phase, "sign": sign}


def _cmd_z(args: argparse.Namespace) -> dict:
    spec = LatticeSpec(args.M, args.N)
    c = Couplings(args.k1, args.k2)
    field = _field(args.field)
    if args.method == "closed":
        if field is FieldMode.ZERO_FIELD:
            z = z_closed_h0(spec, c)
        else:
            z = z_closed_ipi2(spec, c)
    elif args.method == "brute":
        z = brute_force_partition(spec, c, field, cap=args.cap)
    elif args.method == "transfer":
        z = transfer_matrix_partition(spec, c, field)
    else:  # mccoywu
        if field is FieldMode.ZERO_FIELD:
            raise PreconditionError(
                "mccoywu_requires_ipi2", "the determinant chain evaluates the i*pi/2 field only"
            )
        z = z_ipi2_via_determinants(spec, c)
    return {"method": args.method, "field": args.field, **_z_payload(z)}


def _cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    report = run_verification(max_spins=args.max_spins, trials=args.trials, seed=args.seed)
    if not args.cases:
        report = {k: v for k, v in report.items() if k != "cases"}
    code = EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED
    return report, code


def _cmd_zeros(args: argparse.Namespace) -> dict:
    spec = LatticeSpec(args.M, args.N)
    if args.x2 is not None:
        if args.field != "zero":
            raise PreconditionError("x2_field", "anisotropic sweep is a zero-field operation")
        records = zeros_h0_anisotropic_in_x1(spec, _parse_complex(args.x2))
    elif args.field == "zero":
        records = zeros_h0_isotropic(spec)
    else:
        records = zeros_ipi2_isotropic(spec)
    try:
        if args.format == "csv":
            write_zeros_csv(records, args.out)
        else:
            write_zeros_json(records, args.out)
    except OSError as exc:
        raise _IOFailure(str(exc))
    return {
        "count": len(records),
        "out": args.out,
        "format": args.format,
        "max_residual": max((r.residual for r in records), default=0.0),
    }


def _cmd_free_energy(args: argparse.Namespace) -> dict:
    res = free_energy_ipi2(Couplings(args.k1, args.k2), resolution=args.resolution)
    swapped = free_energy_ipi2(Couplings(args.k2, args.k1), resolution=args.resolution)
    return {
        "f_over_kT": res.value,
        "resolution": res.resolution,
        "estimated_error": res.estimated_error,
        "axis_swap_gap": abs(res.value - swapped.value),
    }


class _IOFailure(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bkising", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    z = sub.add_parser("z", help="evaluate one partition function")
    z.add_argument("--M", type=int, required=True)
    z.add_argument("--N", type=int, required=True)
    z.add_argument("--k1", type=float, required=True)
    z.add_argument("--k2", type=float, required=True)
    z.add_argument("--field", choices=["zero", "ipi2"], default="zero")
    z.add_argument("--method", choices=["closed", "brute", "transfer", "mccoywu"], default="closed")
    z.add_argument("--cap", type=int, default=24, help="enumeration cap in spins")

    v = sub.add_parser("verify", help="run the residual verification suites")
    v.add_argument("--max-spins", dest="max_spins", type=int, default=20)
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--cases", action="store_true", help="include per-case records")

    zr = sub.add_parser("zeros", help="emit partition-function zeros")
    zr.add_argument("--M", type=int, required=True)
    zr.add_argument("--N", type=int, required=True)
    zr.add_argument("--field", choices=["zero", "ipi2"], default="zero")
    zr.add_argument("--x2", type=str, default=None, help="fix x2 ('re+imi') and sweep x1")
    zr.add_argument("--out", type=str, required=True)
    zr.add_argument("--format", choices=["csv", "json"], default="csv")

    fe = sub.add_parser("free-energy", help="thermodynamic-limit f/kT at i*pi/2")
    fe.add_argument("--k1", type=float, required=True)
    fe.add_argument("--k2", type=float, required=True)
    fe.add_argument("--resolution", type=int, default=256)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    config = {k: v for k, v in vars(args).items() if k != "command"}
    try:
        code = EXIT_OK
        if args.command == "z":
            result = _cmd_z(args)
        elif args.command == "verify":
            result, code = _cmd_verify(args)
        elif args.command == "zeros":
            result = _cmd_zeros(args)
        else:
            result = _cmd_free_energy(args)
    except PreconditionError as exc:
        err = {"error": {"type": "precondition", "name": exc.name, "message": exc.message}}
        print(json.dumps(_envelope(args.command, config, err, t0), indent=1))
        return EXIT_PRECONDITION
    except _IOFailure as exc:
        err = {"error": {"type": "io", "message": str(exc)}}
        print(json.dumps(_envelope(args.command, config, err, t0), indent=1))
        return EXIT_IO
    print(json.dumps(_envelope(args.command, config, result, t0), indent=1))
    return code


if __name__ == "__main__":
    sys.exit(main())

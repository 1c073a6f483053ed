"""Command line front end: ``solve``, ``check``, ``generate`` and ``oracle``.

Exit codes: 0 success or feasible, 1 infeasible, 2 precondition violated,
3 input error, 4 no convergence.
"""

import argparse
import io
import json
import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NehariError, NotApplicableError, PreconditionError
from .feasibility import DeviationBound, feasibility_direct, feasibility_schur, scalar_aak_oracle
from .hankel import gram_from_coefficients
from .instance import emit_instance, generate_instance, read_instance, write_atomic
from .linalg import principal_sqrt
from .reduction import solve_with_reduction
from .solver import Status, certify

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_PRECONDITION = 2
EXIT_INPUT = 3
EXIT_NO_CONVERGENCE = 4

STATUS_EXIT = {
    Status.CONVERGED: EXIT_OK,
    Status.PRECONDITION_FAILED: EXIT_PRECONDITION,
    Status.MAX_ITERATIONS: EXIT_NO_CONVERGENCE,
    Status.GAP_POSITIVE: EXIT_NO_CONVERGENCE,
}

TRACE_COLUMNS = ("n", "parity", "min_eig_shifted", "step_norm", "residual_estimate")


def _pairs(mat):
    return None if mat is None else [[[float(z.real), float(z.imag)] for z in row] for row in mat]


@dataclass
class RunReport:
    status: Status
    theorem_path: str
    iterations: int
    wall_time: float
    rho_sq_min: np.ndarray = None
    rho_min: np.ndarray = None
    certificate: object = None
    kernel_dims: tuple = ()
    seed: int = None
    message: str = ""

    @property
    def exit_code(self):
        return STATUS_EXIT[self.status]

    def to_dict(self):
        cert = self.certificate
        return {
            "status": self.status.value,
            "theorem_path": self.theorem_path,
            "iterations": self.iterations,
            "wall_time": self.wall_time,
            "rho_sq_min": _pairs(self.rho_sq_min),
            "rho_min": _pairs(self.rho_min),
            "certificate": None if cert is None else {
                "fixed_point_residual": cert.fixed_point_residual,
                "feasibility_margin": cert.feasibility_margin,
                "singularity_witness": cert.singularity_witness,
                "strongly_positive": cert.strongly_positive,
                "valid": cert.valid,
            },
            "kernel_dims": list(self.kernel_dims),
            "seed": self.seed,
            "message": self.message,
        }


def trace_csv(history):
    """Iteration trace as CSV, floats with 17 significant digits."""
    out = io.StringIO()
    out.write(",".join(TRACE_COLUMNS) + "\n")
    for rec in history:
        out.write(f"{rec.n},{rec.parity},{rec.min_eig_shifted:.17g},"
                  f"{rec.step_norm:.17g},{rec.residual:.17g}\n")
    return out.getvalue()


def trace_matrices(history):
    return json.dumps([{"n": rec.n, "q_sq": _pairs(rec.q_sq)} for rec in history]) + "\n"


def run_solve(inst, delta=None, tol=None, max_iter=None):
    """Solve an instance; returns ``(RunReport, ConvergenceResult)``."""
    cfg = inst.config(delta=delta, tol=tol, max_iter=max_iter)
    start = time.perf_counter()
    h, g = gram_from_coefficients(inst.coefficients)
    result = solve_with_reduction(g, cfg)
    cert = rho = None
    if result.converged:
        cert = certify(result, h, g, cfg)
        rho = principal_sqrt(result.rho_sq_min)
    report = RunReport(
        status=result.status, theorem_path=result.theorem_path.value,
        iterations=result.iterations, wall_time=time.perf_counter() - start,
        rho_sq_min=result.rho_sq_min, rho_min=rho, certificate=cert,
        kernel_dims=result.kernel_dims, seed=inst.seed, message=result.message)
    return report, result


def run_check(inst):
    """Feasibility of the instance's ``rho``; returns ``(exit code, report dict)``."""
    if inst.rho is None:
        raise InputError("rho: check needs an instance with a rho matrix")
    cfg = inst.config()
    bound = DeviationBound(inst.rho)
    direct = feasibility_direct(inst.coefficients, bound, cfg)
    _, g = gram_from_coefficients(inst.coefficients)
    try:
        schur = feasibility_schur(g, bound, cfg)
    except NotApplicableError:
        schur = None
    report = {
        "feasible": direct.feasible,
        "boundary": direct.boundary,
        "direct_margin": direct.margin,
        "schur_margin": None if schur is None else schur.margin,
        "schur_feasible": None if schur is None else schur.feasible,
        "tolerance": direct.tol,
    }
    return (EXIT_OK if direct.feasible else EXIT_INFEASIBLE), report


def _print_solve(report, stream):
    print(f"status        {report.status.value}", file=stream)
    print(f"theorem_path  {report.theorem_path}", file=stream)
    print(f"iterations    {report.iterations}", file=stream)
    if report.rho_sq_min is not None:
        with np.printoptions(precision=12, suppress=True):
            print(f"rho_sq_min\n{report.rho_sq_min}", file=stream)
            print(f"rho_min\n{report.rho_min}", file=stream)
        cert = report.certificate
        print(f"residual      {cert.fixed_point_residual:.3e}", file=stream)
        print(f"margin        {cert.feasibility_margin:.3e}", file=stream)
    if report.kernel_dims:
        print(f"kernel_dims   {list(report.kernel_dims)}", file=stream)
    print(f"wall_time     {report.wall_time:.3e} s", file=stream)


def _cmd_solve(args, out):
    inst = read_instance(args.instance)
    report, result = run_solve(inst, args.delta, args.tol, args.max_iter)
    if args.trace and result.history:
        write_atomic(args.trace, trace_csv(result.history))
        if args.verbose:
            write_atomic(args.trace + ".matrices.json", trace_matrices(result.history))
    if args.json:
        print(json.dumps(report.to_dict(), indent=1), file=out)
    else:
        _print_solve(report, out)
    if report.status is not Status.CONVERGED:
        print(f"nehari: {report.status.value}: {report.message}", file=sys.stderr)
    return report.exit_code


def _cmd_check(args, out):
    code, report = run_check(read_instance(args.instance))
    print(json.dumps(report, indent=1), file=out)
    return code


def _cmd_generate(args, out):
    inst = generate_instance(args.dim, args.support, args.seed, args.dominance)
    write_atomic(args.out, emit_instance(inst))
    print(json.dumps({"out": args.out, "seed": args.seed}), file=out)
    return EXIT_OK


def _cmd_oracle(args, out):
    inst = read_instance(args.instance)
    try:
        value = scalar_aak_oracle(inst.coefficients)
    except NotApplicableError as exc:
        raise InputError(str(exc)) from None
    print(json.dumps({"lambda_max": value}), file=out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="nehari", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute rho_min^2 for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--delta", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--trace", help="write the iteration trace as CSV")
    p.add_argument("--verbose", action="store_true",
                   help="also write every q_n^2 next to the trace")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("check", help="feasibility of the instance's rho")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("generate", help="write a seeded random instance")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--support", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dominance", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("oracle", help="scalar reference value lambda_max(Gamma^* Gamma)")
    p.add_argument("--instance", required=True)
    p.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except PreconditionError as exc:
        print(f"nehari: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NehariError, ValueError) as exc:
        print(f"nehari: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

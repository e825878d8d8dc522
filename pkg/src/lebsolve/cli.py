"""Command line front end.

Exit codes: 0 completed (whatever the verdicts), 2 input error, 3 numerical
failure, 4 violated precondition.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as _io
from .ensembles import TestEnsemble
from .errors import EllipticityError, InputError, NumericalError, PreconditionError
from .measures import regularity_report
from .operators import certify, check_cocanceling
from .potentials import energy
from .solver import solve_measure

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_PRECONDITION = 0, 2, 3, 4

INEQUALITIES = ("hardy", "hardy-converse", "fundamental-lemma", "duality", "trace", "moment",
                "necessity", "triviality")


def _p_value(s: str) -> float:
    try:
        return math.inf if s.lower() in ("inf", "infinity") else float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p value {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lebsolve", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write the document here instead of stdout")

    p = sub.add_parser("operator", help="ellipticity, canceling and cocanceling certificates")
    p.add_argument("spec", help="operator document (JSON) or preset such as grad:2, laplace:3, D2:3")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)

    p = sub.add_parser("measure", help="regularity functionals and energies of a measure")
    p.add_argument("measure", help=f"measure document (JSON) or preset {_io.MEASURE_PRESETS}")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="default N - m")
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--p", type=_p_value, nargs="+", default=[2.0])
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--resolution", type=int, default=128)
    p.add_argument("--padding", type=int, default=4)
    common(p)

    p = sub.add_parser("solve", help="solve A*(D) f = mu spectrally")
    p.add_argument("spec")
    p.add_argument("measure")
    p.add_argument("--p", type=_p_value, nargs="+", default=[2.0, math.inf])
    p.add_argument("--resolution", type=int, default=128)
    p.add_argument("--padding", type=int, default=2)
    p.add_argument("--ensemble", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-10)
    common(p)

    p = sub.add_parser("verify", help="check one inequality over a seeded ensemble")
    p.add_argument("inequality", choices=INEQUALITIES)
    p.add_argument("--operator", default=None, help="default grad:2 (div:2 for moment)")
    p.add_argument("--measure", default="example")
    p.add_argument("--ensemble", type=int, default=100)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--m", type=float, default=1.0)
    p.add_argument("--p", type=_p_value, default=2.0)
    p.add_argument("--form", choices=("derivative", "fractional"), default="derivative")
    p.add_argument("--u-exp", type=float, default=-2.0, help="Hardy weight u = |x|^a")
    p.add_argument("--v-exp", type=float, default=-1.0, help="Hardy weight v = |x|^b")
    p.add_argument("--candidate", type=float, default=1e3, help="candidate constant for hardy-converse")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--resolution", type=int, default=128)
    p.add_argument("--padding", type=int, default=2)
    common(p)
    return ap


# --- commands ----------------------------------------------------------------

def cmd_operator(args) -> tuple:
    op = _io.load_operator(args.spec)
    cert = certify(op, args.samples, args.tol, args.seed)
    cocan = check_cocanceling(op, args.samples, args.tol, args.seed)
    doc = {"operator": op.to_document(), "certificate": cert, "cocanceling": cocan}
    return doc, {"samples": args.samples, "tol": args.tol}, [args.spec]


def cmd_measure(args) -> tuple:
    mu = _io.load_measure(args.measure, args.dim, args.resolution)
    N = mu.dim_N
    lam = (N - args.m) if args.lam is None else args.lam
    doc = {"measure": {"kind": mu.kind, "N": N, "dimE": mu.dimE, "zero": mu.is_zero(),
                       "total_mass": mu.total_mass()},
           "regularity": regularity_report(mu, lam, seed=args.seed)}
    energies = {}
    for p in args.p:
        if math.isinf(p):
            continue
        rep = energy(_io.rasterize(mu, args.resolution), args.m, p, (10.0, 100.0, 1000.0),
                     padding=args.padding)
        if mu.kind == "atomic" and not mu.is_zero():
            rep.notes.append("atoms deposited on a grid")
        energies[str(p)] = rep
    doc["energy"] = energies
    grid_ = {"resolution": list(mu.resolution)} if mu.kind == "gridded" else {}
    return doc, grid_, [args.measure]


def cmd_solve(args) -> tuple:
    op = _io.load_operator(args.spec)
    mu = _io.rasterize(_io.load_measure(args.measure, op.dim_N, args.resolution, op.dimE), args.resolution)
    res = solve_measure(op, mu, tuple(args.p), args.padding, args.ensemble, args.seed, args.tol)
    return res, {"resolution": list(mu.resolution), "padding": args.padding}, [args.spec, args.measure]


def _positive_divergence_field(op, lo, hi, res, seed):
    """``f = -grad w`` with ``Delta w`` a sum of positive bumps, so ``A*(D) f >= 0`` for the gradient."""
    from .grid import GridField, mesh

    if not op.name.startswith("grad") or op.dim_N != 2:
        raise InputError("necessity without a measure needs grad:2")
    rng = np.random.default_rng(seed)
    X = mesh(lo, hi, res)
    f = np.zeros((2,) + tuple(res))
    for _ in range(3):
        c = rng.uniform(-0.3, 0.3, 2)
        s = rng.uniform(0.1, 0.4)
        d = X - c[:, None, None]
        r = np.sqrt(np.sum(d**2, axis=0))
        M = rng.uniform(0.5, 2.0) * np.pi * s**2 / 4 * (1 - np.clip(1 - r**2 / s**2, 0, None) ** 4)
        with np.errstate(invalid="ignore", divide="ignore"):
            f -= np.where(r > 0, d * M / (2 * np.pi * r**2), 0.0)
    return GridField(lo, hi, f.astype(complex))


def cmd_verify(args) -> tuple:
    from . import grid as _grid
    from . import lab

    if args.ensemble < 1:
        raise InputError("ensemble size must be positive")
    ineq = args.inequality
    default_op = "div:2" if ineq == "moment" else f"grad:{args.dim}"
    op = _io.load_operator(args.operator or default_op)
    inputs = [args.operator, args.measure]
    grid_ = {"resolution": args.resolution, "padding": args.padding}

    def measure(dimE=1):
        return _io.load_measure(args.measure, op.dim_N, args.resolution, dimE)

    if ineq in ("hardy", "hardy-converse"):
        nu = measure()
        u, v = lab.power_weight(args.u_exp), lab.power_weight(args.v_exp)
        if ineq == "hardy":
            res = lab.hardy_forward(u, v, nu, args.q, ensemble_size=args.ensemble, seed=args.seed)
        else:
            w = lab.hardy_converse(u, v, nu, args.q, args.candidate)
            res = {"inequality": "hardy_converse", "candidate_C": args.candidate,
                   "condition": lab.hardy_condition(u, v, nu, args.q), "witness": w}
    elif ineq == "fundamental-lemma":
        res = lab.fundamental_lemma_check(op, measure(), args.q, ensemble_size=args.ensemble,
                                          seed=args.seed, padding=args.padding, resolution=args.resolution)
    elif ineq == "duality":
        res = lab.measure_duality_check(op, measure(op.dimE), ensemble_size=args.ensemble, seed=args.seed,
                                        resolution=args.resolution)
    elif ineq == "trace":
        res = lab.trace_inequality_check(op, measure(), args.q, args.ell, ensemble_size=args.ensemble,
                                         seed=args.seed, form=args.form, resolution=args.resolution)
    elif ineq == "moment":
        lo, hi, r = _grid.centered_box(1.0, args.resolution, op.dim_N)
        f = TestEnsemble.generate(1, lo, hi, r, op.dimE, args.seed + 1).fields[0]
        res = lab.cocanceling_moment_check(op, lab.project_kernel(op, f), ensemble_size=args.ensemble,
                                           seed=args.seed)
    elif ineq == "necessity":
        if args.operator is None and args.measure == "example":
            lo, hi, r = _grid.centered_box(1.0, args.resolution, 2)
            f = _positive_divergence_field(op, lo, hi, r, args.seed)
        else:
            f = solve_measure(op, _io.rasterize(measure(op.dimE), args.resolution), padding=args.padding).f
        res = lab.first_order_necessity(op, f, seed=args.seed)
    else:
        res = lab.triviality_check(measure(), args.m, args.p)
    return res, grid_, inputs


COMMANDS = {"operator": cmd_operator, "measure": cmd_measure, "solve": cmd_solve, "verify": cmd_verify}


def _error(code: int, exc: Exception, **extra) -> int:
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code, **extra}
    sys.stderr.write(json.dumps(_io.to_jsonable(doc), sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result, grid_, inputs = COMMANDS[args.command](args)
        manifest = _io.RunManifest(
            command=args.command,
            arguments={k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out")},
            input_digests=_io.digests(*inputs), seed=args.seed, grid=grid_,
            output_paths=[args.out] if args.out else [])
        text = _io.dumps({"manifest": manifest, "result": result})
    except EllipticityError as exc:
        return _error(EXIT_PRECONDITION, exc, witness=exc.witness, min_singular_value=exc.min_singular_value)
    except PreconditionError as exc:
        return _error(EXIT_PRECONDITION, exc)
    except (InputError, ValueError, OSError) as exc:
        return _error(EXIT_INPUT, exc)
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _error(EXIT_NUMERIC, exc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line front end.

    georeg pgcd "<p>" "<q>" --tol 1e-3
    georeg proots "<p>" --tol 1e-6
    georeg pkernel matrix.txt --tol 1e-8
    georeg pjcf matrix.txt --tol 1e-9 --json

Exit codes: 0 success, 2 bad input, 3 numerical failure.  Diagnostics go
to standard error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import poly as P
from .gcd import pgcd
from .gn import GaussNewtonError, GnConfig
from .jcf import regularized_jcf
from .numlin import format_matrix, read_matrix
from .rankrev import numerical_kernel
from .roots import proots

__all__ = ["CliRequest", "build_parser", "run", "main", "EXIT_OK", "EXIT_INPUT", "EXIT_NUMERIC"]

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class CliRequest:
    subcommand: str
    inputs: tuple[str, ...]
    tol: float
    seed: int = 0
    output: str = "text"
    trace: bool = False
    maxiter: int | None = None

    def __post_init__(self):
        if self.subcommand not in ("pgcd", "proots", "pkernel", "pjcf"):
            raise InputError(f"unknown subcommand {self.subcommand!r}")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise InputError("--tol must be a positive finite number")
        if self.maxiter is not None and self.maxiter < 1:
            raise InputError("--maxiter must be positive")


# --------------------------------------------------------------------------
# JSON helpers: 15 significant digits, complex numbers as [re, im]


def _num(x: float):
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x + 0.0:.15g}")


def _cplx(z) -> list:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _poly_json(p: P.Polynomial) -> dict:
    return {"text": P.format_poly(p), "coeffs": [_cplx(c) for c in p.coeffs]}


def _matrix_json(A) -> list:
    return [[_cplx(z) for z in row] for row in np.atleast_2d(A)]


def _trace_json(tr) -> list:
    if tr is None:
        return []
    return [{"iteration": h["iteration"], "residual_norm": _num(h["residual_norm"]),
             "step_norm": _num(h["step_norm"]), "sigma_min": _num(h["sigma_min"])}
            for h in tr.history]


def _fmt_c(z) -> str:
    z = complex(z) + 0.0
    if z.imag == 0:
        return f"{z.real:.15g}"
    return f"{z.real:.15g}{'-' if z.imag < 0 else '+'}{abs(z.imag):.15g}i"


# --------------------------------------------------------------------------
# subcommands: each returns (json dict, text lines, GnResult | None)


def _parse_poly(text: str) -> P.Polynomial:
    try:
        p = P.parse(text)
    except ValueError as exc:
        raise InputError(f"cannot parse polynomial {text!r}: {exc}") from None
    if p.is_zero():
        raise InputError("zero polynomial")
    return p


def _load_matrix(path: str) -> np.ndarray:
    try:
        return read_matrix(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _do_pgcd(req: CliRequest, cfg):
    if len(req.inputs) != 2:
        raise InputError("pgcd takes two polynomials")
    p, q = (_parse_poly(t) for t in req.inputs)
    if p.exact_degree < 1 or q.exact_degree < 1:
        raise InputError("pgcd needs polynomials of degree at least 1")
    r = pgcd(p, q, req.tol, req.seed, cfg)
    data = {
        "k": r.k,
        "u": _poly_json(r.u),
        "u_normalized": _poly_json(r.u_normalized),
        "v": _poly_json(r.v),
        "w": _poly_json(r.w),
        "backward_error": _num(r.backward_error),
        "condition": _num(r.condition),
        "iterations": r.trace.iterations if r.trace else 0,
        "marginal_gap": bool(r.structure.marginal),
        "gap_ratio": _num(r.structure.gap_ratio),
    }
    text = [
        f"gcd degree k = {r.k}",
        f"u = {P.format_poly(r.u)}",
        f"u (normalized) = {P.format_poly(r.u_normalized)}",
        f"v = {P.format_poly(r.v)}",
        f"w = {P.format_poly(r.w)}",
        f"backward error = {r.backward_error:.6e}",
        f"condition = {r.condition:.6e}",
    ]
    return data, text, r.trace, r.diagnostics


def _do_proots(req: CliRequest, cfg):
    if len(req.inputs) != 1:
        raise InputError("proots takes one polynomial")
    p = _parse_poly(req.inputs[0])
    if p.exact_degree < 1:
        raise InputError("proots needs a polynomial of degree at least 1")
    f = proots(p, req.tol, req.seed, cfg)
    data = {
        "multiplicities": list(f.multiplicities),
        "roots": [_cplx(z) for z in f.roots],
        "leading": _cplx(f.leading),
        "backward_error": _num(f.backward_error),
        "condition": _num(f.condition),
        "iterations": f.trace.iterations if f.trace else 0,
    }
    text = [f"root {_fmt_c(z)}  multiplicity {m}" for z, m in zip(f.roots, f.multiplicities)]
    text += [f"leading coefficient = {_fmt_c(f.leading)}",
             f"backward error = {f.backward_error:.6e}",
             f"condition = {f.condition:.6e}"]
    return data, text, f.trace, f.diagnostics


def _do_pkernel(req: CliRequest, cfg):
    if len(req.inputs) != 1:
        raise InputError("pkernel takes one matrix file")
    A = _load_matrix(req.inputs[0])
    k = numerical_kernel(A, req.tol, cfg)
    data = {
        "rank": k.rank,
        "nullity": k.nullity,
        "kernel": _matrix_json(k.kernel_basis),
        "backward_error": _num(k.backward_error),
        "condition": _num(k.condition),
        "codimension": k.codimension,
        "marginal_gap": bool(k.marginal),
    }
    text = [f"rank = {k.rank}", f"nullity = {k.nullity}", f"codimension = {k.codimension}",
            f"backward error = {k.backward_error:.6e}", f"condition = {k.condition:.6e}"]
    if k.nullity:
        text += ["kernel basis:", format_matrix(k.kernel_basis).rstrip()]
    return data, text, k.trace, k.diagnostics


def _do_pjcf(req: CliRequest, cfg):
    if len(req.inputs) != 1:
        raise InputError("pjcf takes one matrix file")
    A = _load_matrix(req.inputs[0])
    if A.shape[0] != A.shape[1]:
        raise InputError("pjcf needs a square matrix")
    r = regularized_jcf(A, req.tol, req.seed, cfg)
    data = {
        "blocks": [{"eigenvalue": _cplx(l), "sizes": list(g)} for l, g in r.blocks],
        "eigenvalues": [_cplx(l) for l in r.eigenvalues],
        "backward_error": _num(r.backward_error),
        "condition": _num(r.condition),
        "codimension": r.codimension,
        "sigma_min_X": _num(r.sigma_min_X),
        "iterations": r.trace.iterations if r.trace else 0,
    }
    text = [f"eigenvalue {_fmt_c(l)}  Jordan blocks {list(g)}" for l, g in r.blocks]
    text += [f"codimension = {r.codimension}",
             f"backward error = {r.backward_error:.6e}",
             f"condition = {r.condition:.6e}",
             f"sigma_min(X) = {r.sigma_min_X:.6e}"]
    return data, text, r.trace, r.diagnostics


_HANDLERS = {"pgcd": _do_pgcd, "proots": _do_proots, "pkernel": _do_pkernel, "pjcf": _do_pjcf}


def run(req: CliRequest, out=None, err=None) -> int:
    """Execute a request, writing the report to ``out`` and diagnostics to ``err``."""
    out = out or sys.stdout
    err = err or sys.stderr
    cfg = GnConfig(max_iterations=req.maxiter) if req.maxiter else None
    try:
        data, text, trace, diags = _HANDLERS[req.subcommand](req, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except (GaussNewtonError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    for d in diags:
        print(f"note: {d}", file=err)
    if req.output == "json":
        if req.trace:
            data["trace"] = _trace_json(trace)
        out.write(json.dumps(data, sort_keys=True) + "\n")
    else:
        out.write("\n".join(text) + "\n")
        if req.trace:
            for h in _trace_json(trace):
                out.write(f"iter {h['iteration']:3d}  residual {h['residual_norm']:.6e}  "
                          f"step {h['step_norm']:.6e}  sigma_min {h['sigma_min']:.6e}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="georeg", description="Regularized GCD, roots, kernels and Jordan forms.")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    specs = {
        "pgcd": (["p", "q"], "approximate GCD of two polynomials"),
        "proots": (["p"], "roots with multiplicities"),
        "pkernel": (["matrix"], "numerical rank and kernel of a matrix file"),
        "pjcf": (["matrix"], "regularized Jordan form of a matrix file"),
    }
    for name, (args, help_) in specs.items():
        sp = sub.add_parser(name, help=help_)
        for a in args:
            sp.add_argument(a)
        sp.add_argument("--tol", type=float, required=True, help="data error tolerance (required)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--json", action="store_true", help="emit one JSON object")
        sp.add_argument("--trace", action="store_true", help="include the Gauss-Newton history")
        sp.add_argument("--maxiter", type=int, default=None)
    return ap


def _protect_leading_minus(argv):
    # every option is spelled --name (or -h), so "-1.4-3*x" is a polynomial
    return [" " + a if a.startswith("-") and not a.startswith("--") and a != "-h" and len(a) > 1 else a
            for a in argv]


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_protect_leading_minus(argv))
    inputs = tuple(getattr(args, a) for a in ("p", "q", "matrix") if getattr(args, a, None) is not None)
    try:
        req = CliRequest(args.subcommand, inputs, args.tol, args.seed,
                         "json" if args.json else "text", args.trace, args.maxiter)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(req)


if __name__ == "__main__":
    sys.exit(main())

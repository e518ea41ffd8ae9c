"""Command line interface.

Inputs come from a single JSON config (see README for the field
layout); seeds, sample counts and tolerances can be set by flag or by
SYMOP_* environment variable, with flags winning.  Reports are
deterministic: rerunning a command with the same config and seed
produces byte-identical output.

Exit codes: 0 when a verdict was reached (including negative verdicts
like "not_hermitian" or a failed isometry check with a finite defect),
1 when the requested structure was rejected or undecided (no
factorization, undecided certificate, failed selftest), 2 for input or
domain errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import acceptance, gallery, io
from .central import central_decomposition, centrality_defects
from .errors import (ClassificationFailedError, DomainError,
                     FactorizationRejectedError, HypothesisViolatedError,
                     NotFactorableError, NotSurjectiveError, StructureError)
from .hermitian import certify, decompose_hermitian
from .isometry import factor_isometry, is_isometry
from .norms import dual_norm, norm
from .singular import mu
from .tolerances import DEFAULT_TOLERANCES

_REJECTED = (NotFactorableError, NotSurjectiveError,
             ClassificationFailedError, FactorizationRejectedError,
             HypothesisViolatedError)
_BAD_INPUT = (StructureError, DomainError)


def _env(name: str, cast, fallback):
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise StructureError(f"bad {name}={raw!r}: {exc}") from exc


def _resolve(args) -> None:
    """Fold SYMOP_* environment overrides into unset flags."""
    if args.seed is None:
        args.seed = _env("SYMOP_SEED", int, 0)
    if args.samples is None:
        args.samples = _env("SYMOP_SAMPLES", int, 160)
    if args.format is None:
        args.format = _env("SYMOP_FORMAT", str, "text")
    if args.out is None:
        args.out = _env("SYMOP_OUT", str, None)
    structural = args.tol_structural
    if structural is None:
        structural = _env("SYMOP_TOL_STRUCTURAL", float, None)
    oracle = args.tol_oracle
    if oracle is None:
        oracle = _env("SYMOP_TOL_ORACLE", float, None)
    overrides = {}
    if structural is not None:
        overrides["structural"] = structural
    if oracle is not None:
        overrides["oracle"] = oracle
    args.tolerances = dataclasses.replace(DEFAULT_TOLERANCES, **overrides)
    if args.format not in ("text", "json-lines"):
        raise StructureError(f"unknown format {args.format!r}")


def _load_space(args, need_norm: bool = True):
    cfg = io.load_config(args.config)
    base = os.path.dirname(os.path.abspath(args.config))
    if "algebra" not in cfg:
        raise StructureError('config needs an "algebra" section')
    algebra = io.load_algebra(cfg["algebra"])
    n = None
    if need_norm:
        if "norm" not in cfg:
            raise StructureError('config needs a "norm" section')
        n = io.load_norm(cfg["norm"])
        n.validate_algebra(algebra)
    return cfg, base, algebra, n


def _need(cfg: dict, key: str) -> dict:
    if key not in cfg:
        raise StructureError(f'config needs an "{key}" section')
    return cfg[key]


def _emit(args, report: dict) -> None:
    text = io.write_report([report], args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------


def _cmd_mu(args) -> int:
    cfg, base, algebra, _ = _load_space(args, need_norm=False)
    x = io.load_element(_need(cfg, "element"), algebra, base)
    f = mu(x)
    _emit(args, {
        "command": "mu",
        "values": list(f.values),
        "lengths": list(f.lengths),
        "breakpoints": list(f.breakpoints),
        "integral": f.integral(),
    })
    return 0


def _cmd_norm(args) -> int:
    cfg, base, algebra, n = _load_space(args)
    x = io.load_element(_need(cfg, "element"), algebra, base)
    _emit(args, {
        "command": "norm",
        "norm": norm(x, n),
        "gauge": n.describe(),
    })
    return 0


def _cmd_dual_norm(args) -> int:
    cfg, base, algebra, n = _load_space(args)
    x = io.load_element(_need(cfg, "element"), algebra, base)
    _emit(args, {
        "command": "dual-norm",
        "dual_norm": dual_norm(x, n, method=args.method),
        "method": args.method,
        "gauge": n.describe(),
    })
    return 0


def _cmd_hermitian_certify(args) -> int:
    cfg, base, algebra, n = _load_space(args)
    t = io.load_operator(_need(cfg, "operator"), algebra, base)
    cert = certify(t, n, samples=args.samples, seed=args.seed,
                   tolerances=args.tolerances)
    _emit(args, {"command": "hermitian certify", **cert.to_dict()})
    return 0 if cert.verdict in ("hermitian", "not_hermitian") else 1


def _cmd_hermitian_decompose(args) -> int:
    cfg, base, algebra, _ = _load_space(args, need_norm=False)
    t = io.load_operator(_need(cfg, "operator"), algebra, base)
    deco = decompose_hermitian(t)
    _emit(args, {
        "command": "hermitian decompose",
        "residual": deco.residual,
        "left": io.dump_element(deco.left),
        "right": io.dump_element(deco.right),
        "tolerances": args.tolerances.to_dict(),
    })
    return 0 if deco.residual < args.tolerances.fitted else 1


def _cmd_isometry_check(args) -> int:
    cfg, base, algebra, n = _load_space(args)
    t = io.load_operator(_need(cfg, "operator"), algebra, base)
    report = is_isometry(t, n, samples=args.samples, seed=args.seed,
                         tol=args.tolerances.oracle)
    _emit(args, {
        "command": "isometry check",
        "defect": report.defect,
        "holds": report.holds,
        "samples": report.samples,
        "seed": report.seed,
        "tolerances": args.tolerances.to_dict(),
    })
    return 0 if report.holds else 1


def _cmd_isometry_factor(args) -> int:
    cfg, base, algebra, n = _load_space(args)
    t = io.load_operator(_need(cfg, "operator"), algebra, base)
    fact = factor_isometry(t, n, tolerances=args.tolerances,
                           verify_samples=min(args.samples, 64),
                           seed=args.seed)
    _emit(args, {
        "command": "isometry factor",
        "z_bits": list(fact.z.bits),
        "permutation": list(fact.jordan.permutation),
        "transposed": list(fact.jordan.transposed),
        "residual": fact.residual,
        "multiplier": io.dump_element(fact.multiplier),
        "multiplier_unitary_defect": fact.unitary_defect(),
        "trace_preserving": fact.jordan.trace_preserving,
        "seed": args.seed,
        "tolerances": args.tolerances.to_dict(),
    })
    return 0


def _cmd_central_decompose(args) -> int:
    cfg, base, algebra, _ = _load_space(args, need_norm=False)
    elements = {key: io.load_element(_need(cfg, key), algebra, base)
                for key in ("a", "b", "e", "f")}
    z = central_decomposition(elements["a"], elements["b"],
                              elements["e"], elements["f"],
                              tolerances=args.tolerances)
    defects = centrality_defects(elements["a"], elements["b"],
                                 elements["e"], elements["f"], z)
    _emit(args, {
        "command": "central decompose",
        "z_bits": list(z.bits),
        "centrality_defects": defects,
        "tolerances": args.tolerances.to_dict(),
    })
    return 0


def _cmd_gallery_exam(args) -> int:
    report = gallery.run_exam(samples=args.samples, seed=args.seed)
    elapsed = report.pop("elapsed_seconds")
    print(f"gallery exam finished in {elapsed:.2f}s", file=sys.stderr)
    _emit(args, {"command": "gallery exam", **report})
    ok = (report["isometry"]["holds"]
          and not report["isometry"]["elementary"]
          and report["hermitian"]["verdict"] == "hermitian")
    return 0 if ok else 1


def _cmd_selftest(args) -> int:
    indices = None
    if args.criteria:
        try:
            indices = sorted({int(tok) for tok in args.criteria.split(",")})
        except ValueError as exc:
            raise StructureError(f"bad --criteria: {exc}") from exc
        if any(i < 1 or i > len(acceptance.ALL_CRITERIA) for i in indices):
            raise StructureError("criteria indices must be in 1..8")
    results = acceptance.run_all(indices)
    for result in results:
        print(result.line(), file=sys.stderr)
    rows = []
    for result in results:
        row = result.to_dict()
        del row["elapsed_seconds"]  # keep written reports reproducible
        rows.append({"command": "selftest", **row})
    text = io.write_report(rows, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return 0 if all(r.passed and r.within_budget for r in results) else 1


# -- wiring ---------------------------------------------------------------------


def _add_common(parser, config_required: bool = True) -> None:
    if config_required:
        parser.add_argument("--config", required=True,
                            help="path to the JSON config")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--samples", type=int, default=None)
    parser.add_argument("--tol-structural", type=float, default=None)
    parser.add_argument("--tol-oracle", type=float, default=None)
    parser.add_argument("--out", default=None,
                        help="write the report here instead of stdout")
    parser.add_argument("--format", choices=("text", "json-lines"),
                        default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symop",
        description="singular value functions, symmetric norms, hermitian "
                    "certificates and isometry factorization on direct "
                    "sums of matrix blocks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mu", help="decreasing rearrangement of an element")
    _add_common(p)
    p.set_defaults(fn=_cmd_mu)

    p = sub.add_parser("norm", help="symmetric norm of an element")
    _add_common(p)
    p.set_defaults(fn=_cmd_norm)

    p = sub.add_parser("dual-norm", help="norm in the Koethe dual")
    _add_common(p)
    p.add_argument("--method", choices=("auto", "closed", "program"),
                   default="auto")
    p.set_defaults(fn=_cmd_dual_norm)

    herm = sub.add_parser("hermitian", help="hermitian certification")
    herm_sub = herm.add_subparsers(dest="subcommand", required=True)
    p = herm_sub.add_parser("certify", help="run both hermitian oracles")
    _add_common(p)
    p.set_defaults(fn=_cmd_hermitian_certify)
    p = herm_sub.add_parser("decompose",
                            help="fit a two-sided multiplication")
    _add_common(p)
    p.set_defaults(fn=_cmd_hermitian_decompose)

    iso = sub.add_parser("isometry", help="isometry checks and factorization")
    iso_sub = iso.add_subparsers(dest="subcommand", required=True)
    p = iso_sub.add_parser("check", help="sampled isometry defect")
    _add_common(p)
    p.set_defaults(fn=_cmd_isometry_check)
    p = iso_sub.add_parser("factor",
                           help="factor through a Jordan isomorphism")
    _add_common(p)
    p.set_defaults(fn=_cmd_isometry_factor)

    cen = sub.add_parser("central", help="central splitting")
    cen_sub = cen.add_subparsers(dest="subcommand", required=True)
    p = cen_sub.add_parser("decompose",
                           help="split a bimodule quadruple")
    _add_common(p)
    p.set_defaults(fn=_cmd_central_decompose)

    gal = sub.add_parser("gallery", help="worked examples")
    gal_sub = gal.add_subparsers(dest="subcommand", required=True)
    p = gal_sub.add_parser("exam", help="run the two-atom example end to end")
    _add_common(p, config_required=False)
    p.set_defaults(fn=_cmd_gallery_exam)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    _add_common(p, config_required=False)
    p.add_argument("--criteria", default=None,
                   help="comma separated subset, e.g. 1,2,6")
    p.set_defaults(fn=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _resolve(args)
        return args.fn(args)
    except _REJECTED as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 1
    except _BAD_INPUT as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

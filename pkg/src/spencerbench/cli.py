"""Command-line front end.

Subcommands: algebra | spencer | mirror | complex | bundle. Reports are JSON,
written to stdout or --out, and are byte-deterministic for a fixed command
line (and seed, where one applies). Exit codes: 0 success, 1 a check asserted
via flags failed (or a structural invariant failed, with a witness in the
report), 2 malformed input or violated precondition.

Contested identities (nilpotency of the coupled operator, strong
transversality of the forward construction) are emitted as data and never
fail the process unless explicitly asserted with a flag.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bundle as bundle_mod
from . import cohomology as coh
from .errors import (
    DegenerateInputError,
    FormatError,
    MismatchError,
    SpencerbenchError,
    ValidationError,
)
from .liealg import (
    algebra_from_json,
    antisymmetry_residual,
    builtin_algebra,
    builtin_automorphism,
    jacobi_residual,
)
from .linalg import in_column_span, parse_scalar
from .mirror import (
    TRANSPORT_INVERSE,
    TRANSPORT_LITERAL,
    automorphism_mirror,
    intertwining_check,
    mirror_lambda,
    sign_mirror,
)
from .spencer import (
    Identification,
    LeibnizConvention,
    delta_matrix,
    delta_matrix_to_json,
    nilpotency_report,
    signed_leibniz_welldefinedness,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2


def _load_algebra(args):
    if args.builtin:
        return builtin_algebra(args.builtin)
    if args.file:
        try:
            with open(args.file, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read algebra file: {exc}") from exc
        return algebra_from_json(data)
    raise FormatError("provide --builtin NAME or --file PATH")


def _parse_lambda(algebra, text, allow_degenerate=False):
    try:
        coeffs = [parse_scalar(part) for part in text.split(",")]
    except AttributeError as exc:
        raise FormatError("lambda must be a comma-separated coefficient list") from exc
    lam = algebra.dual(coeffs)
    if not lam.is_nondegenerate() and not allow_degenerate:
        raise DegenerateInputError(
            "lambda is degenerate (all coefficients zero); pass --allow-degenerate to proceed"
        )
    return lam


def _emit(args, report):
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _float_mode(report, enabled):
    if not enabled:
        return report
    if isinstance(report, dict):
        return {k: _float_mode(v, True) for k, v in report.items()}
    if isinstance(report, list):
        return [_float_mode(v, True) for v in report]
    if isinstance(report, str):
        try:
            return float(Fraction(report))
        except (ValueError, ZeroDivisionError):
            return report
    return report


def cmd_algebra(args):
    algebra = _load_algebra(args)
    anti = antisymmetry_residual(algebra)
    jac, witness = jacobi_residual(algebra, with_witness=True)
    report = {
        "command": "algebra",
        "name": algebra.name,
        "dim": algebra.dim,
        "basis_labels": list(algebra.basis_labels),
        "antisymmetry_residual": str(anti),
        "jacobi_residual": str(jac),
        "jacobi_witness": list(witness) if jac != 0 else None,
        "valid": anti == 0 and jac == 0,
    }
    _emit(args, _float_mode(report, args.mode == "float"))
    return EXIT_OK if report["valid"] else EXIT_CHECK_FAILED


def cmd_spencer(args):
    algebra = _load_algebra(args)
    lam = _parse_lambda(algebra, args.lam, args.allow_degenerate)
    conv = LeibnizConvention(args.convention)
    ident = Identification(args.identification)
    matrices = [
        delta_matrix_to_json(delta_matrix(lam, k, conv, ident), k) for k in range(args.K)
    ]
    nil = nilpotency_report(lam, args.K, conv, ident)
    report = {
        "command": "spencer",
        "algebra": algebra.name,
        "lambda": [str(c) for c in lam.coeffs],
        "K": args.K,
        "convention": conv.value,
        "identification": ident.value,
        "matrices": matrices,
        "nilpotency": nil.to_json(),
    }
    if conv is LeibnizConvention.PAPER_SIGNED:
        report["ordering_witnesses"] = [
            w.to_json() for k in range(2, args.K) for w in signed_leibniz_welldefinedness(lam, k, ident)
        ]
    _emit(args, _float_mode(report, args.mode == "float"))
    if args.assert_nilpotent and not nil.holds:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _parse_transform(algebra, text):
    text = text.strip().lower()
    if text == "sign":
        return sign_mirror(), None
    if text in ("identity", "negate-transpose", "negate_transpose", "inverse-mirror",
                "inverse_mirror"):
        return None, builtin_automorphism(algebra, text.replace("-", "_"))
    if text.startswith("weyl:") or text.startswith("permutation:"):
        digits = text.split(":", 1)[1]
        return None, builtin_automorphism(algebra, f"permutation:{digits}")
    raise FormatError(f"unknown transform {text!r}")


def cmd_mirror(args):
    algebra = _load_algebra(args)
    lam = _parse_lambda(algebra, args.lam, args.allow_degenerate)
    transform, auto = _parse_transform(algebra, args.transform)
    conv = LeibnizConvention(args.convention)
    ident = Identification(args.identification)
    report = {
        "command": "mirror",
        "algebra": algebra.name,
        "lambda": [str(c) for c in lam.coeffs],
        "transform": args.transform,
        "convention": conv.value,
        "identification": ident.value,
    }
    failed = False
    if transform is not None and transform.kind == "sign":
        twice = mirror_lambda(transform, mirror_lambda(transform, lam))
        involution_exact = twice == lam
        sign_identity = all(
            (delta_matrix(-lam, k, conv, ident) - delta_matrix(lam, k, conv, ident).scaled(-1)).is_zero()
            for k in range(args.K)
        )
        report["involution_exact"] = involution_exact
        report["delta_sign_identity"] = sign_identity
        failed = not (involution_exact and sign_identity)
    else:
        checks = []
        for k in range(1, args.K):
            for transport in (TRANSPORT_INVERSE, TRANSPORT_LITERAL):
                rep = intertwining_check(auto, lam, k, conv, transport, ident)
                checks.append(rep.to_json())
                if transport == TRANSPORT_INVERSE and not rep.holds:
                    failed = True
        report["intertwining"] = checks
        report["mirrored_lambda"] = [
            str(c)
            for c in mirror_lambda(automorphism_mirror(auto), lam, TRANSPORT_INVERSE).coeffs
        ]
    _emit(args, _float_mode(report, args.mode == "float"))
    if args.assert_intertwining and failed:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_complex(args):
    algebra = _load_algebra(args)
    lam = _parse_lambda(algebra, args.lam, args.allow_degenerate)
    conv = LeibnizConvention(args.convention)
    ident = Identification(args.identification)
    dga = coh.torus_model(args.torus)
    instance = coh.build_complex(dga, algebra, lam, args.K, conv, args.grading, ident)
    report = {
        "command": "complex",
        "algebra": algebra.name,
        "lambda": [str(c) for c in lam.coeffs],
        "base": dga.name,
        "seed": args.seed,
    }
    if args.grading == coh.GRADING_DIAGONAL:
        report["report"] = {
            "grading": args.grading,
            "convention": conv.value,
            "K": args.K,
            "dims": [],
            "euler": 0,
            "d_squared_residual": "0",
            "flags": ["diagonal-grading: blocks recorded, no composition or dim claims"],
        }
        report["blocks"] = {
            str(k): {
                "d_block_shape": list(blocks["d_block"].shape),
                "delta_block_shape": list(blocks["delta_block"].shape),
            }
            for k, blocks in instance.diagonal_blocks.items()
        }
        _emit(args, _float_mode(report, args.mode == "float"))
        return EXIT_OK

    cohrep = coh.cohomology_report(instance)
    report["report"] = cohrep.to_json()
    failed = False
    if args.mirror:
        transform, auto = _parse_transform(algebra, args.mirror)
        if transform is None:
            transform = automorphism_mirror(auto)
        mi = coh.mirror_invariance_check(instance, transform)
        report["mirror"] = mi.to_json()
        failed = (not mi.commutation_holds) or mi.dims_equal is False
    if cohrep.dims is not None:
        report["kunneth"] = coh.kunneth_diagnostic(instance).to_json()
        report["cup"] = _cup_section(instance, args.seed)
    _emit(args, _float_mode(report, args.mode == "float"))
    if args.assert_mirror_invariant and failed:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _cup_section(instance, seed):
    """Cup products of the degree-1 cohomology generators, when any exist."""
    if instance.K < 2:
        return {"pairs": []}
    d0 = instance.differentials[0]
    d1 = instance.differentials[1]
    kernel = d1.kernel_basis() if d1.cols else []
    gens = []
    for vec in kernel:
        if not in_column_span(d0, vec):
            gens.append(vec)
        if len(gens) >= 3:
            break
    pairs = []
    for p in range(len(gens)):
        for q in range(p, len(gens)):
            degree, product = coh.cup_product(instance, 1, gens[p], 1, gens[q])
            nontrivial = any(product) and not coh.classes_equal(
                instance, degree, product, tuple(Fraction(0) for _ in product)
            )
            stable = coh.cup_well_defined_sample(
                instance, 1, gens[p], 1, gens[q], seed=seed or 0
            )
            pairs.append(
                {
                    "generators": [p, q],
                    "product_degree": degree,
                    "nontrivial": nontrivial,
                    "class_stable_under_boundaries": stable,
                }
            )
    return {"degree_one_generators": len(gens), "pairs": pairs}


def cmd_bundle(args):
    algebra = _load_algebra(args)
    if args.bundle_file:
        try:
            with open(args.bundle_file, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read bundle file: {exc}") from exc
        b = bundle_mod.bundle_from_json(data, algebra)
        shape = b.shape
    else:
        if not args.grid or args.lam is None:
            raise FormatError("provide --grid and --lambda, or --bundle-file")
        shape = tuple(int(m) for m in args.grid.split(","))
        lam = _parse_lambda(algebra, args.lam, args.allow_degenerate)
        omega = None
        if args.omega:
            parts = args.omega.split(";")
            if len(parts) != len(shape):
                raise FormatError("need one omega coefficient list per axis, separated by ';'")
            omega = [
                algebra.vector([parse_scalar(v) for v in part.split(",")]) for part in parts
            ]
        b = bundle_mod.grid_bundle(shape, algebra, omega, lam)
    trans = bundle_mod.transversality_report(b)
    cart = bundle_mod.cartan_residual(b)
    first, second = bundle_mod.compatibility_functional_terms(b)
    equiv = bundle_mod.equivariance_residual(b)
    report = {
        "command": "bundle",
        "algebra": algebra.name,
        "grid": list(shape),
        "transversality": trans.to_json(),
        "cartan_residual_max": str(cart.max_abs),
        "functional_terms": [str(first), str(second)],
        "equivariance_residual": equiv,
        "equivariance_below_tolerance": equiv < 1e-8,
    }
    _emit(args, _float_mode(report, args.mode == "float"))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="spencerbench",
        description="exact diagnostics for constraint-coupled symmetric-algebra "
        "operators, mirror transformations, and their complexes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, lam=True):
        p.add_argument("--builtin", help="builtin algebra name (so3, sl2, sl3, su2, abelian(3), ...)")
        p.add_argument("--file", help="algebra JSON file")
        p.add_argument("--mode", choices=["rational", "float"], default="rational")
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
        if lam:
            p.add_argument("--lambda", dest="lam", required=True,
                           help="comma-separated dual coefficients")
            p.add_argument("--allow-degenerate", action="store_true")
            p.add_argument("--K", type=int, default=4)
            p.add_argument("--convention", choices=[c.value for c in LeibnizConvention],
                           default=LeibnizConvention.UNSIGNED.value)
            p.add_argument("--identification",
                           choices=[i.value for i in Identification],
                           default=Identification.BASIS.value)

    p = sub.add_parser("algebra", help="validate an algebra's structure constants")
    common(p, lam=False)
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("spencer", help="operator matrices and the nilpotency audit")
    common(p)
    p.add_argument("--assert-nilpotent", action="store_true")
    p.set_defaults(func=cmd_spencer)

    p = sub.add_parser("mirror", help="mirror transports and intertwining residuals")
    common(p)
    p.add_argument("--transform", required=True,
                   help="sign | identity | negate-transpose | weyl:<perm digits>")
    p.add_argument("--assert-intertwining", action="store_true")
    p.set_defaults(func=cmd_mirror)
    # the mirror command defaults to the identification that makes the
    # transported operator identity exact for every validated automorphism
    p.set_defaults(identification=Identification.KILLING.value)

    p = sub.add_parser("complex", help="coupled complex, cohomology, mirror comparison")
    common(p)
    p.add_argument("--torus", type=int, default=2, help="base model dimension (1..4)")
    p.add_argument("--grading", choices=[coh.GRADING_TOTAL, coh.GRADING_DIAGONAL],
                   default=coh.GRADING_TOTAL)
    p.add_argument("--mirror", help="optional transform to compare against")
    p.add_argument("--assert-mirror-invariant", action="store_true")
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("bundle", help="lattice transversality and flatness diagnostics")
    common(p, lam=False)
    p.add_argument("--lambda", dest="lam", help="comma-separated dual coefficients")
    p.add_argument("--allow-degenerate", action="store_true")
    p.add_argument("--grid", help="comma-separated sites per axis, e.g. 8,8")
    p.add_argument("--omega", help="per-axis connection coefficients, ';'-separated lists")
    p.add_argument("--bundle-file", help="GridBundle JSON (site-resolved fields)")
    p.set_defaults(func=cmd_bundle)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage, matching the input-error code
        return int(exc.code) if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (FormatError, DegenerateInputError, MismatchError) as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except ValidationError as exc:
        sys.stderr.write(f"invariant failed: {exc}\n")
        return EXIT_CHECK_FAILED
    except SpencerbenchError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

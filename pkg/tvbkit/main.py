from __future__ import annotations
import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Tuple

from tvbkit import document
from tvbkit.config import settings
from tvbkit.core.polyhedral import linear_image
from tvbkit.core.toric import require_valid_fan
from tvbkit.errors import CertificateError, ParseError, ValidationError
from tvbkit.logging_setup import setup_file_logging
from tvbkit.report import build_report, render
from tvbkit.services.bundle_service import (
    PEClass,
    ToricVectorBundle,
    bpf_member,
    certificate,
    ci_check,
    coloop_cover_check,
    eff_data,
    extension_checks,
    fujita_gap_scan,
    is_monomial,
    is_sparse,
    nef_bpf_sites,
    nef_cone,
    relation_degrees,
    require_certificate,
    uniform_ci_check,
)
from tvbkit.services.fano_service import (
    ci_anticanonical,
    kaneyama_classify,
    kaneyama_validate,
    projective_space_cones,
    tangent_bundle,
)
from tvbkit.services.nobody_service import (
    build_M,
    global_body,
    p_alpha_beta,
    precondition_certificate,
    section_dimension,
)

Result = Tuple[str | None, Dict[str, Any]]


def parse_class(text: str, rank: int) -> PEClass:
    """`a1,...,ak;beta` in the class basis printed by `validate`."""
    if text.count(";") != 1:
        raise ParseError(f"class {text!r} must look like 'a1,...,ak;beta'")
    alpha_text, beta_text = text.split(";")
    try:
        alpha = tuple(int(x) for x in alpha_text.split(",")) if alpha_text.strip() else ()
        beta = int(beta_text)
    except ValueError:
        raise ParseError(f"class {text!r} must hold integers only")
    if len(alpha) != rank:
        raise ValidationError(f"class {text!r} has {len(alpha)} class coordinates, the class group has rank {rank}")
    return PEClass(alpha, beta)


def parse_flag_order(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"flag {text!r} must be a comma-separated list of column indices")


def _cone_payload(cone) -> Dict[str, Any]:
    return {
        "generators": cone.extremal_generators,
        "lineality": cone.lineality,
        "facets": cone.facets,
        "equations": cone.equations,
    }


def cmd_validate(args, doc: document.BundleDocument) -> Result:
    fan = doc.to_fan()
    if not doc.has_bundle:
        require_valid_fan(fan)
        cl = fan.class_lattice
        return None, {"valid": True, "pivot_rays": cl.pivots, "class_basis_rays": cl.basis_rays}
    E = doc.to_bundle()
    cl = E.class_lattice
    report = E.validate()
    return certificate(E), {
        "valid": True,
        "n": E.n,
        "m": E.m,
        "rank": E.r,
        "pivot_rays": cl.pivots,
        "class_basis_rays": cl.basis_rays,
        "apartments": {str(k): list(B) for k, B in sorted(report.apartments.items())},
    }


def cmd_classify(args, E: ToricVectorBundle) -> Result:
    ci = ci_check(E)
    cover = coloop_cover_check(E)
    uniform = E.matroid.is_uniform
    return certificate(E), {
        "sparse": is_sparse(E),
        "uniform": uniform,
        "uniform_ci": uniform_ci_check(E) if uniform else None,
        "ci": ci.ok,
        "ci_witness": ci.witness,
        "monomial": is_monomial(E),
        "coloop_cover": cover.ok,
        "coloop_cones": {str(j): ks for j, ks in cover.cover.items()},
        "relation_degrees": [str(rel.degree) for rel in relation_degrees(E)],
    }


def cmd_eff(args, E: ToricVectorBundle) -> Result:
    monoid, cone = eff_data(E)
    return certificate(E), {"monoid_generators": monoid.generators, **_cone_payload(cone)}


def cmd_nef(args, E: ToricVectorBundle) -> Result:
    cert = require_certificate(E, args.force)
    sites = nef_bpf_sites(E, force=True)
    cone = nef_cone(E, sites=sites)
    return cert, {"sites": [s.label for s in sites], **_cone_payload(cone)}


def cmd_bpf(args, E: ToricVectorBundle) -> Result:
    c = parse_class(args.klass, E.class_lattice.rank)
    cert = require_certificate(E, args.force)
    sites = nef_bpf_sites(E, force=True)
    result = bpf_member(E, c, sites=sites)
    return cert, {
        "class": str(c),
        "nef": nef_cone(E, sites=sites).contains(c.vector),
        "bpf": result.member,
        "failing_sites": result.failing_sites,
    }


def cmd_hilbert_nef(args, E: ToricVectorBundle) -> Result:
    cert = require_certificate(E, args.force)
    basis = nef_cone(E, force=True).hilbert_basis
    return cert, {"hilbert_basis": basis}


def cmd_fujita_scan(args, E: ToricVectorBundle) -> Result:
    cert = require_certificate(E, args.force)
    gaps = fujita_gap_scan(E, force=True)
    return cert, {"failing": [{"class": g.klass.vector, "site": g.site} for g in gaps]}


def cmd_nobody(args, E: ToricVectorBundle) -> Result:
    flag = E.matroid.flag_from_order(parse_flag_order(args.flag)) if args.flag else None
    M = build_M(E, flag)
    cert = precondition_certificate(E, M.flag) if M.flag is not None else "fixture"
    payload: Dict[str, Any] = {
        "flag": [sorted(F) for F in M.flag.chain] if M.flag is not None else None,
        "M": M.rows,
    }
    if args.klass is None:
        payload["global_body"] = global_body(M).extremal_generators
        return cert, payload
    c = parse_class(args.klass, E.class_lattice.rank)
    P = p_alpha_beta(E, c)
    body = linear_image(M.rows, P)
    marked = body.distinct_marked()
    payload.update(
        {
            "class": str(c),
            "lattice_points": len(body.marked or []),
            "distinct_images": len(marked),
            "images": marked,
            "vertices": body.vertices,
        }
    )
    if 0 <= c.beta <= settings.DEGREE_CAP:
        payload["section_dimension"] = section_dimension(E, c)
    return cert, payload


def cmd_anticanonical(args, E: ToricVectorBundle) -> Result:
    minus_k = ci_anticanonical(E)
    sites = nef_bpf_sites(E, force=True)
    cone = nef_cone(E, sites=sites)
    return certificate(E), {
        "anticanonical": str(minus_k),
        "nef": cone.contains(minus_k.vector),
        "ample": cone.interior_contains(minus_k.vector),
    }


def cmd_kaneyama(args, doc: document.BundleDocument) -> Result:
    K = kaneyama_validate(doc.to_fan(), doc.to_ideal(), doc.rows)
    result = kaneyama_classify(K)
    payload: Dict[str, Any] = {
        "a": K.a,
        "anticanonical": str(result.anticanonical),
        "nef": result.nef,
        "ample": result.ample,
        "reason": result.reason,
        "blocks": result.blocks,
        "negative_ray_failures": [list(p) for p in result.negative_ray_failures],
    }
    if result.blocks is not None and len(result.blocks) == 1:
        eff, nef = projective_space_cones(K)
        payload["eff_generators"] = eff.extremal_generators
        payload["nef_generators"] = nef.extremal_generators
    return certificate(K.bundle), payload


def cmd_extend(args, E: ToricVectorBundle) -> Result:
    E2 = document.load(args.with_file).to_bundle()
    report = extension_checks(E, E2)
    return certificate(E2), {
        "dominance": report.dominance,
        "circuit_minimum": report.circuit_minimum,
        "uniform": report.uniform,
        "guarantees": report.guarantees,
        "extended_ci": ci_check(E2).ok,
    }


BUNDLE_COMMANDS: Dict[str, Callable[[Any, ToricVectorBundle], Result]] = {
    "classify": cmd_classify,
    "eff": cmd_eff,
    "nef": cmd_nef,
    "bpf": cmd_bpf,
    "hilbert-nef": cmd_hilbert_nef,
    "fujita-scan": cmd_fujita_scan,
    "nobody": cmd_nobody,
    "anticanonical": cmd_anticanonical,
    "extend": cmd_extend,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tvbkit",
        description="Exact positivity, Cox-ring and Newton-Okounkov data of toric vector bundles",
    )
    parser.add_argument("--json", action="store_true", help="Emit the versioned machine-readable report")
    parser.add_argument("--force", action="store_true", default=settings.FORCE,
                        help="Run uncertified Nef/Bpf computations (results are advisory)")

    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("document", help="Bundle document")
        return p

    add("validate", "Validate the document and print the class-basis pivot rays")
    add("classify", "Sparse / uniform / CI / monomial / coloop-cover classification")
    add("eff", "Effective monoid generators and cone")
    add("nef", "Nef cone from the site cones")
    p_bpf = add("bpf", "Basepoint-free membership of a class")
    p_bpf.add_argument("--class", dest="klass", required=True, help="Class as 'a1,...,ak;beta'")
    add("hilbert-nef", "Hilbert basis of the Nef cone")
    add("fujita-scan", "Hilbert basis elements of Nef that fail basepoint freeness")
    p_nobody = add("nobody", "Matrix M and Newton-Okounkov bodies")
    p_nobody.add_argument("--flag", type=str, default=None, help="Basis order i1,i2,... defining the flag of flats")
    p_nobody.add_argument("--class", dest="klass", type=str, default=None, help="Class as 'a1,...,ak;beta'")
    add("anticanonical", "Anticanonical class of the projectivization and its positivity")
    add("kaneyama", "Fano classification of a Kaneyama bundle")
    add("tangent", "Print the tangent-bundle document of the fan")
    p_extend = add("extend", "Hypotheses of the extension results for a bundle extending this one")
    p_extend.add_argument("--with", dest="with_file", required=True, help="Document of the extended bundle")
    return parser


def run(args) -> Tuple[Dict[str, Any] | None, str | None]:
    """Returns (report, raw text); `tangent` produces a document instead of a report."""
    doc = document.load(args.document)
    if args.command == "tangent":
        E = tangent_bundle(doc.to_fan())
        text = document.render(E, title="tangent bundle")
        if args.json:
            return build_report("tangent", certificate(E), {"document": text}), None
        return None, text
    if args.command == "validate":
        cert, payload = cmd_validate(args, doc)
    elif args.command == "kaneyama":
        cert, payload = cmd_kaneyama(args, doc)
    else:
        cert, payload = BUNDLE_COMMANDS[args.command](args, doc.to_bundle())
    return build_report(args.command, cert, payload), None


def main(argv: List[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    log_path = setup_file_logging(settings.LOG_DIR, settings.LOG_LEVEL)
    logging.info("tvbkit %s started. Log file: %s", args.command, log_path)

    try:
        report, text = run(args)
        sys.stdout.write(text if report is None else render(report, as_json=args.json))
        logging.info("%s finished successfully", args.command)
        return 0
    except CertificateError as e:
        logging.warning("Certificate missing: %s", e)
        print(f"tvbkit: {e}", file=sys.stderr)
        return 3
    except ValidationError as e:
        logging.error("Validation failed: %s %s", e, e.diagnostics)
        print(f"tvbkit: {e}", file=sys.stderr)
        for d in e.diagnostics:
            print(f"  - {d}", file=sys.stderr)
        return 2
    except Exception as e:
        logging.exception("Fatal error: %s", e)
        print(f"tvbkit: {e}", file=sys.stderr)
        return 2
    finally:
        logging.info("tvbkit finished")


if __name__ == "__main__":
    raise SystemExit(main())

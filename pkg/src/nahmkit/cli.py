"""Command-line front end.

Subcommands: check, transform, roundtrip, invariants, examples, oracle.
Documents are UTF-8 JSON (see schema.py); exit codes are stable:

    0  success / all verdicts pass
    1  a checked verdict fails
    2  malformed or inconsistent input
    3  precision or field-extension limit hit
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    FieldExtensionRequired,
    InputError,
    NahmkitError,
    NotAdmissible,
    PrecisionExhausted,
    VerdictFailure,
)
from . import schema
from .elliptic import (
    AdmissibleHiggsData,
    a0_check,
    a1a2_check,
    a3_check,
    good_check,
)
from .examples import catalog_names, generate_examples
from .higgs import admissibility_check
from .localnahm import build_local_complex
from .oracle import degree_crosscheck, truncated_cokernel
from .series import DEFAULT_PRECISION
from .transform import invariants, nahm_backward, nahm_forward, roundtrip_report

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_INPUT = 2
EXIT_LIMIT = 3


def _read_document(path):
    if path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
    return schema.loads(text)


def _emit(obj, fmt, out=None):
    out = out if out is not None else sys.stdout
    if fmt == "json":
        print(json.dumps(obj, indent=2), file=out)
    else:
        _emit_text(obj, out)


def _emit_text(obj, out, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                print(f"{pad}{k}:", file=out)
                _emit_text(v, out, indent + 1)
            else:
                print(f"{pad}{k}: {v}", file=out)
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                _emit_text(v, out, indent)
            else:
                print(f"{pad}- {v}", file=out)
    else:
        print(f"{pad}{obj}", file=out)


def _precision(args, doc=None):
    if args.precision is not None:
        return args.precision
    if doc is not None and doc.get("precision"):
        return int(doc["precision"])
    env = os.environ.get("NAHMKIT_PRECISION")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"NAHMKIT_PRECISION must be an integer, got {env!r}")
    return DEFAULT_PRECISION


def _generic_twist(ctx):
    if "w" in ctx.symbols:
        return ctx.sym("w")
    raise InputError(
        "the generic twist needs a transcendental: declare a symbol named "
        "'w' in the session field"
    )


# -- subcommands --


def cmd_check(args):
    doc = _read_document(args.document)
    data = doc["data"]
    report = invariants(data)
    conditions = report.conditions
    if doc["kind"] == "higgs":
        adm = all(
            admissibility_check(sp.germ) for sp in data.points
        )
        conditions["admissible"] = "pass" if adm else "FAIL"
        ok = conditions["A0"].ok and conditions["Good"].ok and adm
    else:
        ok = (
            conditions["A1A2"].ok
            and conditions["A3"].ok
            and conditions["Good"].ok
        )
    if args.format == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    return EXIT_OK if ok else EXIT_VERDICT


def cmd_transform(args):
    doc = _read_document(args.document)
    data = doc["data"]
    if args.direction == "forward":
        if doc["kind"] != "higgs":
            raise InputError("forward transform needs a 'higgs' document")
        out, report = nahm_forward(data)
        out_kind = "bundle"
    else:
        if doc["kind"] != "bundle":
            raise InputError("backward transform needs a 'bundle' document")
        out, report = nahm_backward(data)
        out_kind = "higgs"
    out_doc = {
        "ctx": doc["ctx"],
        "kind": out_kind,
        "data": out,
        "precision": doc.get("precision"),
    }
    if args.format == "json":
        print(json.dumps(
            {"document": schema.document_to_json(out_doc), "report": report.to_dict()},
            indent=2,
        ))
    else:
        print(report.to_text())
        print("-- output document --")
        print(schema.dumps(out_doc))
    return EXIT_OK


def cmd_roundtrip(args):
    doc = _read_document(args.document)
    if doc["kind"] != "higgs":
        raise InputError("roundtrip starts from a 'higgs' document")
    report = roundtrip_report(doc["data"])
    if args.format == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    return EXIT_OK if report.roundtrip == "pass" else EXIT_VERDICT


def cmd_invariants(args):
    doc = _read_document(args.document)
    report = invariants(doc["data"])
    if args.format == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    return EXIT_OK


def _field_override(args):
    """Session for 'examples' from --field M,k: k extra symbols x1..xk plus
    the names the catalog needs."""
    if args.field is None:
        return None
    try:
        m_str, k_str = args.field.split(",")
        M, k = int(m_str), int(k_str)
    except ValueError:
        raise InputError("--field expects 'M,k' with integers")
    from .field import FieldContext

    extra = tuple(f"x{i}" for i in range(1, max(k, 2) + 1))
    names = extra + ("w", "s1", "s2", "nu1", "nu2")
    return FieldContext(M=M, symbols=names)


def cmd_examples(args):
    if not args.name:
        listing = [
            {"name": n, "description": generate_examples(n)["description"]}
            for n in catalog_names()
        ]
        _emit(listing, args.format)
        return EXIT_OK
    ex = generate_examples(args.name, ctx=_field_override(args))
    doc_json = schema.document_to_json(ex)
    payload = {
        "name": ex["name"],
        "description": ex["description"],
        "slope_criterion_ok": ex["slope_criterion_ok"],
        "max_slope": f"{ex['max_slope']}",
        "document": doc_json,
    }
    print(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_oracle(args):
    doc = _read_document(args.document)
    data = doc["data"]
    if not isinstance(data, AdmissibleHiggsData):
        raise InputError("the oracle suite runs on 'higgs' documents")
    ctx = doc["ctx"]
    N = _precision(args, doc)
    w = _generic_twist(ctx)
    rows = []
    ok = True
    for sp in data.points:
        complex_ = build_local_complex(sp.germ)
        book = complex_.index
        ker, coker, certified = truncated_cokernel(complex_, (w, None), N)
        agree = certified and ker == 0 and coker == book
        ok = ok and agree
        rows.append(
            {
                "point": repr(sp.point),
                "bookkeeping_rank": book,
                "oracle_kernel": ker,
                "oracle_cokernel": coker,
                "certified": certified,
                "agree": agree,
            }
        )
    cross = degree_crosscheck(data, w, N)
    ok = ok and cross
    out = {"precision": N, "blocks": rows, "degree_crosscheck": cross, "ok": ok}
    _emit(out, args.format)
    return EXIT_OK if ok else EXIT_VERDICT


def build_parser():
    ap = argparse.ArgumentParser(
        prog="nahmkit",
        description=(
            "exact calculus of filtered Higgs singularity data on the dual "
            "torus and its algebraic Nahm transforms"
        ),
    )
    ap.add_argument("--precision", type=int, default=None,
                    help="working truncation order (default 24 or $NAHMKIT_PRECISION)")
    ap.add_argument("--field", default=None, metavar="M,k",
                    help="session field override used by 'examples' sessions")
    ap.add_argument("--format", choices=("json", "text"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="run the condition detectors")
    p.add_argument("document", help="JSON document path or '-'")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("transform", help="apply the global transform")
    p.add_argument("--direction", choices=("forward", "backward"), required=True)
    p.add_argument("document")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("roundtrip", help="forward then backward, verify identity")
    p.add_argument("document")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("invariants", help="rank, degree and singularity tables")
    p.add_argument("document")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("examples", help="emit built-in example documents")
    p.add_argument("name", nargs="?", default=None)
    p.set_defaults(func=cmd_examples)

    p = sub.add_parser("oracle", help="run the brute-force verification suite")
    p.add_argument("document")
    p.set_defaults(func=cmd_oracle)
    return ap


def cli_run(argv):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except VerdictFailure as exc:
        print(f"verdict failure: {exc}", file=sys.stderr)
        if exc.report is not None:
            print(exc.report.to_text(), file=sys.stderr)
        return EXIT_VERDICT
    except (FieldExtensionRequired, PrecisionExhausted) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (InputError, NotAdmissible) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NahmkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main():
    sys.exit(cli_run(sys.argv[1:]))


if __name__ == "__main__":
    main()

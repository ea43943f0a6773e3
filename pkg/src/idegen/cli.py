"""``idegen`` command-line front end.

Every verb prints a report on stdout (``--format table`` or ``json``; the
default comes from ``IDEGEN_FORMAT``) and returns 0 on success, 1 when the
computed answer is negative (FAIL, BlowUp, NotFound, NotConstant) and 2 on
usage or input errors. Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from idegen import __version__
from idegen.algebra import format_rational, to_rational
from idegen.classify import classify
from idegen.curvature import BASIS, invariants, invariants_at, killing_check
from idegen.errors import BlowUp, IdegenError, MetricFormatError
from idegen.lattice import (appendix_b_json, enumerate_boost_vectors, format_appendix_b, format_boost,
                            parse_boost, shape_tables)
from idegen.limits import (VsiCertificate, VsiStep, boost_generator_field, csi_certificate,
                           describe_limit, finite_pullback, invariant_agreement, pullback_limit,
                           vsi_search)
from idegen.metric import (MetricDocument, instantiate_template, load_metric, metric_from_json,
                           parse_point, point_to_json, validate_class)

OK, NEGATIVE, USAGE = 0, 1, 2
FORMATS = ("table", "json")


class UsageError(Exception):
    pass


def _emit(args, payload: dict, table: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(table.rstrip("\n"))


def _boost_arg(text: str):
    try:
        return parse_boost(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _read_json_arg(text: str, what: str):
    """Inline JSON, or a path to a JSON file."""
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise MetricFormatError(f"{what}: invalid JSON at offset {exc.pos}") from None
    path = Path(text)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MetricFormatError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MetricFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def _document(args) -> MetricDocument:
    if getattr(args, "metric", None):
        return load_metric(args.metric)
    if getattr(args, "template", False):
        if args.boost is None:
            raise UsageError("--template needs --boost")
        cm = instantiate_template(args.boost, seed=args.seed)
        return MetricDocument(cm.assemble(), cm, args.boost, None, f"random template seed {args.seed}")
    raise UsageError("--metric is required")


def _boost(args, doc: MetricDocument | None = None):
    b = args.boost if args.boost is not None else (doc.boost if doc else None)
    if b is None:
        raise UsageError("--boost is required (or a 'boost' key in the metric file)")
    if doc is not None and len(b) != doc.metric.coords.k:
        raise UsageError(f"boost {format_boost(b)} does not match k={doc.metric.coords.k}")
    return b


def _point(args, doc: MetricDocument):
    if getattr(args, "point", None):
        return parse_point(_read_json_arg(args.point, "--point"), doc.metric.coords)
    return doc.point


def _inv_table(vals: dict) -> str:
    width = max(len(k) for k in vals)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in vals.items())


# -- verbs ---------------------------------------------------------------------

def cmd_enumerate(args) -> int:
    if args.k is None:
        raise UsageError("--k is required")
    vecs = enumerate_boost_vectors(args.k)
    _emit(args, {"k": args.k, "count": len(vecs), "boosts": [list(b) for b in vecs]},
          "\n".join(format_boost(b) for b in vecs) + f"\n{len(vecs)} boost vectors")
    return OK


def cmd_shapes(args) -> int:
    if args.boost is None:
        raise UsageError("--boost is required")
    if args.k is not None and args.k != len(args.boost):
        raise UsageError(f"--k {args.k} does not match boost {format_boost(args.boost)}")
    t = shape_tables(args.boost)
    normalized = not args.raw
    _emit(args, {"boost": list(args.boost), "normalized": normalized,
                 "components": t.to_records(normalized)}, t.format_table(normalized))
    return OK


def cmd_appendix_b(args) -> int:
    k = args.k if args.k is not None else 4
    if args.format == "json":
        print(appendix_b_json(k).rstrip("\n"))
    else:
        sys.stdout.write(format_appendix_b(k))
    return OK


def cmd_validate(args) -> int:
    doc = _document(args)
    b = _boost(args, doc)
    rep = validate_class(doc.canonical or doc.metric, b)
    lines = [f"{'PASS' if rep.passed else 'FAIL'} class {format_boost(b)}"]
    lines += [f"  {v.component}: {v.monomial} exceeds the bound by {v.excess}" for v in rep.violations]
    _emit(args, rep.to_dict(), "\n".join(lines))
    return OK if rep.passed else NEGATIVE


def cmd_classify(args) -> int:
    doc = _document(args)
    cm = doc.canonical
    if cm is None:
        cm = doc.metric.to_canonical()
    rep = classify(cm)
    lines = [f"type {t:<4} {'yes' if f.holds else 'no '}  {f.witness}" for t, f in rep.flags.items()]
    lines.append(f"most special: {rep.most_special or 'none'}")
    lines.append(f"walker 1-form: {rep.walker_text}")
    lines.append(f"nabla F = 0: {rep.nabla_F_constant}   Killing-Yano: {rep.killing_yano}")
    for name, ok in rep.cross_checks.items():
        lines.append(f"cross-check {name}: {'agree' if ok else 'DISAGREE'}")
    _emit(args, rep.to_dict(), "\n".join(lines))
    return OK


def cmd_limit(args) -> int:
    doc = _document(args)
    b = _boost(args, doc)
    res = pullback_limit(doc.metric, b, _point(args, doc))
    out = res.to_dict()
    lines = [describe_limit(res)]
    if res.metric is not None:
        lines.append(f"g0 = {res.metric.line_element()}")
        X = boost_generator_field(doc.metric.coords, b, res.point)
        out["killing_generator"] = killing_check(res.metric, X)
        lines.append(f"boost generator is Killing for g0: {out['killing_generator']}")
    for d in res.dropped:
        lines.append(f"  dropped {d.component}: {d.term} (weight {d.weight})")
    _emit(args, out, "\n".join(lines))
    return NEGATIVE if res.outcome == "BlowUp" else OK


def cmd_invariants(args) -> int:
    doc = _document(args)
    pt = _point(args, doc)
    if pt is not None:
        vals = {k: format_rational(v) for k, v in invariants_at(doc.metric, pt).items()}
        constant = None
        zero = all(to_rational(v) == 0 for v in vals.values())
    else:
        polys = invariants(doc.metric)
        vals = {k: str(v) for k, v in polys.items()}
        constant = all(p.is_constant() for p in polys.values())
        zero = all(p.is_zero() for p in polys.values())
    payload = {"metric": doc.metric.line_element(), "invariants": vals, "constant": constant, "zero": zero}
    if pt is not None:
        payload["point"] = point_to_json(pt, doc.metric.coords)
    _emit(args, payload, _inv_table(vals) + f"\nconstant: {constant}  zero: {zero}")
    return OK


def _certificate_from_json(data, doc: MetricDocument) -> VsiCertificate:
    if not isinstance(data, dict) or not isinstance(data.get("steps"), list):
        raise MetricFormatError("certificate must be an object with a 'steps' list")
    steps = []
    for i, s in enumerate(data["steps"]):
        try:
            b = tuple(int(x) for x in s["boost"])
            m = metric_from_json(s["metric"]).metric
        except (KeyError, TypeError, ValueError) as exc:
            raise MetricFormatError(f"steps[{i}]: {exc}") from None
        steps.append(VsiStep(b, m))
    return VsiCertificate(doc.metric, steps, doc.point or {}, bool(data.get("flat", True)))


def cmd_vsi(args) -> int:
    doc = _document(args)
    if args.replay:
        cert = _certificate_from_json(_read_json_arg(args.replay, "--replay"), doc)
        ok = cert.replay()
        _emit(args, {"replay": ok, "steps": len(cert.steps)},
              f"replay {'PASS' if ok else 'FAIL'} ({len(cert.steps)} steps)")
        return OK if ok else NEGATIVE
    pt = _point(args, doc)
    u0 = None if pt is None else {i: pt[i] for i in doc.metric.coords.u_vars()}
    res = vsi_search(doc.metric, args.max_depth, args.max_entry, u0=u0)
    if not res.found:
        d = res.to_dict()
        _emit(args, d, f"NotFound (depth {res.max_depth}, max entry {res.max_entry}, "
                       f"{res.explored} metrics explored; inconclusive)")
        return NEGATIVE
    lines = [f"start {doc.metric.line_element()}"]
    for s in res.steps:
        lines.append(f"{format_boost(s.boost)} -> {s.metric.line_element()}")
    lines.append("endpoint flat: VSI")
    _emit(args, res.to_dict(), "\n".join(lines))
    return OK


def cmd_csi(args) -> int:
    doc = _document(args)
    cert = csi_certificate(doc.metric)
    out = cert.to_dict()
    lines = [_inv_table({k: str(v) for k, v in cert.values.items()}),
             cert.label if cert.constant else "NotConstant: " + ", ".join(cert.nonconstant)]
    if args.max_depth is not None:
        res = vsi_search(doc.metric, args.max_depth, args.max_entry)
        out["limit_search"] = res.to_dict()
        lines.append("limit search: " + ("found a flat endpoint" if res.found else
                                         f"NotFound to depth {args.max_depth}"))
    _emit(args, out, "\n".join(lines))
    return OK if cert.constant else NEGATIVE


def cmd_check_theorem(args) -> int:
    doc = _document(args)
    b = _boost(args, doc)
    pt = _point(args, doc)
    rep = invariant_agreement(doc.metric, b, pt)
    scales = args.s or ["1/2", "2", "3/5"]
    finite = {}
    for s in scales:
        gs = finite_pullback(doc.metric, b, to_rational(s), rep.point)
        vals = invariants_at(gs, rep.point)
        finite[s] = all(vals[k] == rep.original[k] for k in vals)
    ok = rep.agree and all(finite.values())
    out = rep.to_dict()
    out["finite_pullback"] = finite
    out["point"] = point_to_json(rep.point, doc.metric.coords)
    out["result"] = "PASS" if ok else "FAIL"
    lines = [f"{k:<8} metric {format_rational(rep.original[k]):>12}   limit {format_rational(rep.limit[k]):>12}"
             for k in BASIS if k in rep.original]
    lines += [f"finite pullback s={s}: {'unchanged' if v else 'CHANGED'}" for s, v in finite.items()]
    lines.append(out["result"])
    _emit(args, out, "\n".join(lines))
    return OK if ok else NEGATIVE


VERBS = {
    "enumerate": (cmd_enumerate, "list the canonical boost vectors for k"),
    "shapes": (cmd_shapes, "allowed v-monomial shapes of each metric block"),
    "appendix-b": (cmd_appendix_b, "degenerate-class equalities for k = 1..K"),
    "validate": (cmd_validate, "check a metric against the class of a boost"),
    "classify": (cmd_classify, "subclass types I-V"),
    "limit": (cmd_limit, "pullback limit along a boost"),
    "invariants": (cmd_invariants, "basis curvature invariants"),
    "vsi": (cmd_vsi, "search for (or replay) a chain of limits ending in flat space"),
    "csi": (cmd_csi, "check that the basis invariants are constant"),
    "check-theorem": (cmd_check_theorem, "invariants of a metric versus its limit"),
}


def build_parser(default_format: str = "table") -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="idegen", description="I-degenerate pseudo-Riemannian metrics")
    p.add_argument("--version", action="version", version=f"idegen {__version__}")
    sub = p.add_subparsers(dest="verb", metavar="VERB")
    sub.required = True
    for verb, (fn, help_text) in VERBS.items():
        sp = sub.add_parser(verb, help=help_text)
        sp.set_defaults(func=fn)
        sp.add_argument("--format", choices=FORMATS, default=default_format)
        sp.add_argument("--k", type=int)
        sp.add_argument("--boost", type=_boost_arg, help="comma-separated, e.g. 1,2,4")
        if verb in ("enumerate", "appendix-b", "shapes"):
            if verb == "shapes":
                sp.add_argument("--raw", action="store_true", help="skip the a-block simplification")
            continue
        sp.add_argument("--metric", help="metric JSON file")
        sp.add_argument("--template", action="store_true",
                        help="use a random template of --boost instead of --metric")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--point", help="base point as inline JSON or a file")
        if verb in ("vsi", "csi"):
            sp.add_argument("--max-depth", type=int, default=4 if verb == "vsi" else None)
            sp.add_argument("--max-entry", type=int, default=8)
        if verb == "vsi":
            sp.add_argument("--replay", help="certificate JSON (inline or file) to re-check")
        if verb == "check-theorem":
            sp.add_argument("-s", action="append", help="finite boost parameter (repeatable)")
    return p


def main(argv=None) -> int:
    fmt = os.environ.get("IDEGEN_FORMAT", "table")
    if fmt not in FORMATS:
        print(f"idegen: IDEGEN_FORMAT must be one of {', '.join(FORMATS)}, got {fmt!r}", file=sys.stderr)
        return USAGE
    parser = build_parser(fmt)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    if args.k is not None and not 1 <= args.k <= 16:
        print("idegen: --k must be between 1 and 16", file=sys.stderr)
        return USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"idegen {args.verb}: {exc}", file=sys.stderr)
        return USAGE
    except BlowUp as exc:
        print(f"idegen {args.verb}: {exc}", file=sys.stderr)
        return NEGATIVE
    except (IdegenError, ValueError, OSError) as exc:
        print(f"idegen {args.verb}: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Batch front end: subcommands over the document exchange format, producing
deterministic machine-readable reports (byte-identical modulo the timing
field).  Exit codes: 0 all checks pass, 1 some check failed, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import cedga, charts, docs, structures, transfer
from .errors import InputError, LinftyError, SchemaError, UnknownCommand
from .linalg import cohomology as complex_cohomology


def _check(name, ok, detail="", witness=None):
    row = {"name": name, "status": "pass" if ok else "fail"}
    if detail:
        row["detail"] = detail
    if witness is not None:
        row["witness"] = witness
    return row


def _skip(name, reason):
    return {"name": name, "status": "skipped", "detail": reason}


def _load(kind_expected, path, base_dir):
    full = Path(base_dir) / path
    if not full.exists():
        raise SchemaError("$", f"input file not found: {path}")
    kind, value = docs.load_file(full)
    if kind_expected and kind not in kind_expected:
        raise SchemaError("$.kind", f"expected {kind_expected}, found {kind!r}")
    return kind, value


def _defect_witness(failure):
    return {
        "arity": failure.arity,
        "word": docs.encode_word(failure.word),
        "degree": failure.degree,
        "defect": [docs.encode_scalar(x) for x in failure.defect],
    }


def _point_rows(reports, prefix):
    rows = []
    for rep in reports:
        tag = ",".join(f"{k}={v}" for k, v in rep.point)
        for name, ok, detail in rep.rows:
            rows.append(_check(f"{prefix}[{tag}].{name}", ok, detail))
    return rows


def _structure_relations(kind, value):
    if kind == "bundle":
        return charts.chart_check_relations(value)
    return structures.check_relations(value)


# ---------------------------------------------------------------------------
# command handlers (each returns a list of check rows)

def _cmd_check_relations(job, base_dir):
    kind, value = _load(("structure", "bundle"), job["input"], base_dir)
    rep = _structure_relations(kind, value)
    witness = None if rep.passed else _defect_witness(rep.first_failure)
    return [_check("relations", rep.passed, witness=witness)]


def _cmd_check_morphism(job, base_dir):
    kind, value = _load(("morphism",), job["input"], base_dir)
    if isinstance(value, charts.BundleMorphism):
        rep = charts.chart_check_morphism(value)
    else:
        rep = structures.check_morphism(value)
    witness = None if rep.passed else _defect_witness(rep.first_failure)
    return [_check("morphism", rep.passed, witness=witness)]


def _cmd_transfer(job, base_dir):
    _, s = _load(("structure",), job["input"], base_dir)
    if "contraction" not in job:
        raise SchemaError("$.payload.contraction", "transfer needs a contraction")
    _, c = _load(("contraction",), job["contraction"], base_dir)
    rep = transfer.validate_contraction(c, s)
    rows = [_check("contraction-axioms", rep.passed,
                   "; ".join(n for n, ok, _ in rep.checks if not ok))]
    if not rep.passed:
        return rows
    tr = transfer.transfer(s, c)
    cert = transfer.certify_transfer(tr)
    rows.extend(_check(name, ok) for name, ok in cert.checks)
    rows.append(_check("tables", True, witness={
        "core_dims": {str(d): n for d, n in tr.core.dims},
        "embedding": docs.encode_ops(tr.phi_table),
        "transferred": docs.encode_ops(tr.mu_table),
    }))
    return rows


def _cmd_reduce(job, base_dir):
    _, m = _load(("morphism",), job["input"], base_dir)
    if isinstance(m, charts.BundleMorphism):
        raise SchemaError("$.payload.input", "reduce expects a point morphism")
    res = transfer.step1_pipeline(m)
    rows = []
    for step in res.chain:
        for name, ok in step.checks:
            rows.append(_check(f"level-{step.level}.{name}", ok))
    for name, ok in res.audit:
        rows.append(_check(name, ok))
    rows.append(_check("chain", True, witness={
        "levels": [step.level for step in res.chain],
        "final": docs.encode_ops(res.final_morphism.table),
        "final_core_dims": {str(d): n for d, n in
                            res.final_morphism.source.space.dims},
    }))
    return rows


def _points_from_job(job):
    return docs.decode_points(job.get("points", []), "$.payload.points")


def _cmd_split(job, base_dir):
    _, m = _load(("morphism",), job["input"], base_dir)
    if not isinstance(m, charts.BundleMorphism):
        raise SchemaError("$.payload.input", "split expects a bundle morphism")
    res = charts.lastcase_split(m, _points_from_job(job))
    rows = [_check("curvature-reconstruction", res.splitting.reconstruction_exact)]
    rows.extend(_point_rows(res.point_reports, "point"))
    rows.append(_check("splitting", True, witness={
        "kernel_section": [docs.encode_scalar(p) for p in res.splitting.kernel_section],
        "equations": [docs.encode_scalar(p) for p in res.subbundle.equations],
        "degree1_subbundle": [[docs.encode_scalar(x) for x in v]
                              for v in res.subbundle.e1_vectors],
        "retained_dims": {str(d): n for d, n in res.subbundle.retained_dims},
    }))
    return rows


def _cmd_pipeline(job, base_dir):
    _, m = _load(("morphism",), job["input"], base_dir)
    if not isinstance(m, charts.BundleMorphism):
        raise SchemaError("$.payload.input", "pipeline expects a bundle morphism")
    res = charts.recap_pipeline(m, _points_from_job(job))
    rows = _point_rows(res.fibration_reports, "fibration")
    for step in res.step_chain:
        for name, ok in step.checks:
            rows.append(_check(f"reduction-{step.level}.{name}", ok))
    rows.append(_check("reduced-relations", res.reduced_relations_pass))
    rows.append(_check("reduced-morphism", res.reduced_morphism_pass))
    rows.append(_check("curvature-reconstruction",
                       res.lastcase.splitting.reconstruction_exact))
    rows.extend(_point_rows(res.lastcase.point_reports, "point"))
    if res.section.status == "synthesized":
        for name, ok in res.section.checks:
            rows.append(_check(f"section.{name}", ok))
        rows.append(_check("section", True, witness={
            "base_map": [docs.encode_scalar(p) for p in res.section.base_map],
        }))
    else:
        rows.append(_skip("section", res.section.reason))
    ok, detail = res.classical_bijection
    rows.append(_check("classical-bijection", ok, detail))
    return rows


def _cmd_etale(job, base_dir):
    _, m = _load(("morphism",), job["input"], base_dir)
    if isinstance(m, charts.BundleMorphism):
        rows = []
        for point in _points_from_job(job):
            rep = charts.etale_at(m, point)
            tag = ",".join(f"{k}={v}" for k, v in rep.point)
            for name, ok, detail in rep.rows:
                rows.append(_check(f"point[{tag}].{name}", ok, detail))
        return rows
    rep = structures.etale_pair(m)
    return [_check("etale", rep.etale, witness={
        "source_cohomology": {str(d): n for d, n in rep.source_dims},
        "target_cohomology": {str(d): n for d, n in rep.target_dims},
        "cone_cohomology": {str(d): n for d, n in rep.cone_dims},
    })]


def _cmd_ce(job, base_dir):
    kind, value = _load(("structure", "bundle"), job["input"], base_dir)
    s = value.fiber if kind == "bundle" else value
    pres = cedga.build_ce(s)
    rep = cedga.q_square_check(pres)
    witness = {
        "generators": {str(d): list(names) for d, names in pres.gens.labels},
        "derivation": [
            {"generator": list(gen),
             "value": [{"word": docs.encode_word(w),
                        "coef": docs.encode_scalar(c)} for w, c in frozen]}
            for gen, frozen in pres.q_values
        ],
    }
    return [_check("q-square", rep.passed, witness=witness)]


def _cmd_cohomology(job, base_dir):
    _, s = _load(("structure",), job["input"], base_dir)
    depth = job.get("degrees", 4)
    dims = cedga.ce_cohomology(cedga.build_ce(s), depth)
    return [_check("cohomology", True, witness={
        "dims": {str(d): v[0] for d, v in sorted(dims.items())},
    })]


def _cmd_quasi_iso(job, base_dir):
    _, m = _load(("morphism",), job["input"], base_dir)
    if isinstance(m, charts.BundleMorphism):
        raise SchemaError("$.payload.input", "quasi-iso expects a point morphism")
    depth = job.get("degrees", 4)
    rep = cedga.quasi_iso_check(m, depth)
    rows = [_check("chain-map", rep.chain_map)]
    for d, dim_f, dim_t, iso in rep.dims:
        rows.append(_check(f"degree[{d}]", iso,
                           f"target-side dim {dim_f}, source-side dim {dim_t}"))
    return rows


def _cmd_koszul_verify(job, base_dir):
    _, b = _load(("bundle",), job["input"], base_dir)
    amp = b.space.amplitude
    if b.space.dims and amp != (1, 1):
        raise SchemaError("$.payload.input",
                          "koszul-verify expects a bundle concentrated in degree 1")
    section = b.curvature()
    chart = cedga.KoszulChart(b.base, b.space.dim(1), section)
    depth = job.get("degrees", 4)
    rep = cedga.koszul_identity_check(chart, depth)
    rows = [_check("homotopy-identity", rep.passed, f"degree bound {depth}")]
    h = cedga.koszul_cohomology(chart, min(depth, 4))
    negative_ok = all(dim == 0 for dims in h.values()
                      for d, dim in dims.items() if d < 0)
    zero_ok = all(dim == (1 if w == 0 else 0)
                  for w, dims in h.items() for d, dim in dims.items() if d == 0)
    rows.append(_check("acyclic-in-negative-degrees", negative_ok,
                       witness={"dims": {str(w): {str(d): n for d, n in sorted(v.items())}
                                         for w, v in sorted(h.items())}}))
    rows.append(_check("weight-zero-functions", zero_ok))
    return rows


def _cmd_heq(job, base_dir):
    _, s = _load(("structure",), job["input"], base_dir)
    if "contraction" not in job:
        raise SchemaError("$.payload.contraction", "heq needs a contraction")
    _, c = _load(("contraction",), job["contraction"], base_dir)
    tr = transfer.transfer(s, c)
    bound = job.get("weights", 4)
    rep = cedga.heq_check(tr, bound)
    return [_check("homotopy-commutator", rep.passed, f"weight bound {bound}")]


def _cmd_bigrading(job, base_dir):
    _, s = _load(("structure",), job["input"], base_dir)
    rep = cedga.bigrading_audit(cedga.build_ce(s))
    rows = []
    if not rep.buckets:
        rows.append(_check("decomposition-empty", True))
    for n, expected, ok in rep.buckets:
        rows.append(_check(f"weight-{n}-shift", ok, f"expected shift {expected}"))
    return rows


_HANDLERS = {
    "check-relations": _cmd_check_relations,
    "check-morphism": _cmd_check_morphism,
    "transfer": _cmd_transfer,
    "reduce": _cmd_reduce,
    "split": _cmd_split,
    "pipeline": _cmd_pipeline,
    "etale": _cmd_etale,
    "ce": _cmd_ce,
    "cohomology": _cmd_cohomology,
    "quasi-iso": _cmd_quasi_iso,
    "koszul-verify": _cmd_koszul_verify,
    "heq": _cmd_heq,
    "bigrading": _cmd_bigrading,
}


def run_job(job, base_dir):
    """Execute one job payload; returns the report document (a dict)."""
    start = time.monotonic()
    cmd = job.get("cmd")
    if cmd not in _HANDLERS:
        raise UnknownCommand(f"unknown command {cmd!r}")
    try:
        checks = _HANDLERS[cmd](job, base_dir)
    except InputError:
        raise
    except LinftyError as exc:
        checks = [_check(type(exc).__name__, False, str(exc))]
    counts = {"pass": 0, "fail": 0, "skipped": 0}
    for row in checks:
        counts[row["status"]] += 1
    report = {
        "version": docs.VERSION,
        "kind": "report",
        "payload": {
            "job": job,
            "checks": checks,
            "summary": counts,
        },
        "timing": {"seconds": round(time.monotonic() - start, 6)},
    }
    return report


def report_exit_code(report):
    return 1 if report["payload"]["summary"]["fail"] else 0


def format_text(report):
    lines = []
    for row in report["payload"]["checks"]:
        status = row["status"].upper()
        if status == "SKIPPED":
            status = "SKIP"
        detail = f"  {row['detail']}" if row.get("detail") else ""
        lines.append(f"{status} {row['name']}{detail}")
    counts = report["payload"]["summary"]
    lines.append(f"# pass={counts['pass']} fail={counts['fail']} "
                 f"skipped={counts['skipped']}")
    return "\n".join(lines) + "\n"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="linfty",
        description="exact checkers and pipelines for curved homotopy structures")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in tuple(_HANDLERS) + ("run",):
        p = sub.add_parser(name)
        p.add_argument("--input", required=True)
        p.add_argument("--contraction")
        p.add_argument("--points")
        p.add_argument("--degrees", type=int)
        p.add_argument("--weights", type=int)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "text"), default="json")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            path = Path(args.input)
            if not path.exists():
                raise SchemaError("$", f"input file not found: {args.input}")
            kind, job = docs.load_file(path)
            if kind != "job":
                raise SchemaError("$.kind", "run expects a job document")
            base_dir = path.parent
        else:
            job = {"cmd": args.command, "input": args.input}
            if args.contraction:
                job["contraction"] = args.contraction
            if args.points:
                ppath = Path(args.points)
                if not ppath.exists():
                    raise SchemaError("$", f"points file not found: {args.points}")
                raw = json.loads(ppath.read_text(encoding="utf-8"))
                points = docs.decode_points(raw, "$")
                job["points"] = docs.encode_points(points)
            if args.degrees is not None:
                job["degrees"] = args.degrees
            if args.weights is not None:
                job["weights"] = args.weights
            docs.decode_job(job, "$.payload")
            base_dir = Path.cwd()
        report = run_job(job, base_dir)
    except InputError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 2
    text = docs.canonical_dumps(report) if args.format == "json" else format_text(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return report_exit_code(report)


if __name__ == "__main__":
    sys.exit(main())

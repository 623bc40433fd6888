#!/usr/bin/env python3
"""Regenerate the shipped fixture documents, job files, and golden reports.

Run from the repository root:  python scripts/make_fixtures.py
"""

from __future__ import annotations

import copy
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fractions import Fraction

from linfty import docs, fixtures as fx
from linfty.cli import run_job
from linfty.structures import CurvedStructure
from linfty.transfer import transfer

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def normalize(report):
    out = copy.deepcopy(report)
    out["timing"] = {"seconds": 0.0}
    return out


def main():
    e1 = fx.e1()
    write(FIX / "e1.json", docs.serialize_value("structure", e1))
    write(FIX / "e2.json", docs.serialize_value("structure", fx.e2()))
    e4 = fx.e4()
    write(FIX / "e4.json", docs.serialize_value("structure", e4))
    contraction = fx.e4_contraction()
    write(FIX / "e4-contraction.json", docs.serialize_value("contraction", contraction))
    write(FIX / "e5.json", docs.serialize_value("structure", fx.e5()))
    write(FIX / "e5-morphism.json", docs.serialize_value("morphism", fx.e5_morphism()))
    write(FIX / "b1.json", docs.serialize_value("bundle", fx.b1()))
    write(FIX / "b1-to-point.json", docs.serialize_value("morphism", fx.b1_to_point()))
    write(FIX / "b2-to-line.json", docs.serialize_value("morphism", fx.b2_to_line()))
    write(FIX / "e5-chart-morphism.json",
          docs.serialize_value("morphism", fx.e5_chart_morphism()))
    write(FIX / "koszul-euler.json", docs.serialize_value("bundle", fx.koszul_bundle()))

    tr = transfer(e4, contraction)
    write(FIX / "e4-embedding.json", docs.serialize_value("morphism", tr.embedding))

    bogus_ops = dict(e1.table)
    bogus_ops[()] = (Fraction(1),)
    bogus = CurvedStructure.make(e1.space, bogus_ops)
    write(FIX / "e1-bogus.json", docs.serialize_value("structure", bogus))

    jobs = {
        "check-relations-e1": {"cmd": "check-relations", "input": "../e1.json"},
        "check-relations-e2": {"cmd": "check-relations", "input": "../e2.json"},
        "check-relations-bogus": {"cmd": "check-relations", "input": "../e1-bogus.json"},
        "check-morphism-e4-embedding": {
            "cmd": "check-morphism", "input": "../e4-embedding.json"},
        "transfer-e4": {"cmd": "transfer", "input": "../e4.json",
                        "contraction": "../e4-contraction.json"},
        "reduce-e5": {"cmd": "reduce", "input": "../e5-morphism.json"},
        "split-b1": {"cmd": "split", "input": "../b1-to-point.json",
                     "points": [{"x": "0"}]},
        "pipeline-b2": {"cmd": "pipeline", "input": "../b2-to-line.json",
                        "points": [{"x": "0", "y": "0"}, {"x": "0", "y": "2"}]},
        "pipeline-e5-chart": {"cmd": "pipeline", "input": "../e5-chart-morphism.json",
                              "points": [{"y": "0"}, {"y": "3"}]},
        "etale-e4-embedding": {"cmd": "etale", "input": "../e4-embedding.json"},
        "etale-b1": {"cmd": "etale", "input": "../b1-to-point.json",
                     "points": [{"x": "0"}]},
        "ce-e1": {"cmd": "ce", "input": "../e1.json"},
        "cohomology-e1": {"cmd": "cohomology", "input": "../e1.json", "degrees": 4},
        "cohomology-e2": {"cmd": "cohomology", "input": "../e2.json", "degrees": 4},
        "quasi-iso-e4-embedding": {"cmd": "quasi-iso", "input": "../e4-embedding.json",
                                   "degrees": 4},
        "koszul-verify": {"cmd": "koszul-verify", "input": "../koszul-euler.json",
                          "degrees": 6},
        "heq-e4": {"cmd": "heq", "input": "../e4.json",
                   "contraction": "../e4-contraction.json", "weights": 4},
        "bigrading-e4": {"cmd": "bigrading", "input": "../e4.json"},
    }
    points_dir = FIX / "points"
    write(points_dir / "b1-points.json", docs.canonical_dumps([{"x": "0"}]))
    for name, job in jobs.items():
        write(FIX / "jobs" / f"{name}.json",
              docs.canonical_dumps(docs.make_document("job", job)))
        report = run_job(job, FIX / "jobs")
        write(FIX / "golden" / f"{name}.json",
              docs.canonical_dumps(normalize(report)))


if __name__ == "__main__":
    main()

"""Report documents: canonical JSON, a plain-text table and CSV."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from . import __version__
from .forms import IntersectionForm
from .homology import GradedModuleSummary, LoopComplex, max_slice, verify_complex
from .rings import CoefficientRing


def euler_rows(summary: GradedModuleSummary, complex_: LoopComplex) -> dict:
    """Per-column Euler counts for every word length whose three pieces are in ``summary``."""
    m = summary.m
    failures = []
    checked = []
    ell = 2
    while True:
        pieces = [summary.piece("Q", ell), summary.piece("W", ell - 1), summary.piece("Z", ell - 2)]
        if any(p is None for p in pieces):
            break
        q, w, z = (p.free_rank for p in pieces)
        lhs = complex_.dim(ell) - m * complex_.dim(ell - 1) + complex_.dim(ell - 2)
        if lhs != q - w + z:
            failures.append({"word_length": ell, "slices": lhs, "homology": q - w + z})
        checked.append(ell)
        ell += 1
    return {"check": "euler", "word_lengths": checked, "passed": not failures, "failures": failures}


def inline_verification(summary: GradedModuleSummary, complex_: LoopComplex) -> list:
    w_lengths = [p.word_length for p in summary.pieces if p.summand == "W"]
    top = max(w_lengths) - 1 if w_lengths else -1
    out = []
    if top >= 0:
        out.append(verify_complex(complex_.form, top, complex_.ring, complex_).to_json())
    out.append(euler_rows(summary, complex_))
    return out


def totals_rows(summary: GradedModuleSummary) -> list:
    return [
        {"degree": k, "free_rank": r, "torsion": list(t)}
        for k, (r, t) in sorted(summary.totals().items())
        if r or t
    ]


def bases_section(complex_: LoopComplex, summary: GradedModuleSummary) -> dict:
    top = max_slice(summary.n, summary.max_degree)
    return {"U": {str(ell): complex_.algebra.slice(ell).basis for ell in range(top + 1)}}


@dataclass
class ReportDocument:
    form: IntersectionForm
    ring: CoefficientRing
    summary: GradedModuleSummary
    command: str = "compute"
    source: dict = field(default_factory=dict)
    verification: list = field(default_factory=list)
    bv: dict | None = None
    bases: dict | None = None
    timing: dict | None = None

    def to_json(self) -> dict:
        metadata = {
            "tool": "loophom",
            "version": __version__,
            "command": self.command,
            "form": self.form.to_json(),
            "ring": self.ring.label(),
            "max_degree": self.summary.max_degree,
            "source": self.source,
            "warnings": list(self.form.warnings),
        }
        if self.timing is not None:
            metadata["timing"] = self.timing
        doc = {
            "metadata": metadata,
            "homology": [p.to_json() for p in self.summary.pieces],
            "totals": totals_rows(self.summary),
            "poincare_series": self.summary.poincare_series(),
            "verification": self.verification,
        }
        if self.bv is not None:
            doc["bv"] = self.bv
        if self.bases is not None:
            doc["bases"] = self.bases
        return doc

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return canonical_json(self.to_json())
        if fmt == "csv":
            return render_csv(self)
        if fmt == "table":
            return render_table(self)
        raise ValueError(f"unknown format {fmt!r}")


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _torsion_str(t) -> str:
    return "[" + ",".join(str(x) for x in t) + "]" if t else "-"


def render_table(report: ReportDocument) -> str:
    s = report.summary
    form = report.form
    lines = [
        f"n = {form.n}, m = {form.m}, ring = {report.ring.label()}, max degree = {s.max_degree}",
        "C = " + json.dumps([list(r) for r in form.matrix]),
    ]
    lines += [f"warning: {w}" for w in form.warnings]
    lines.append("")
    header = ("degree", "summand", "length", "rank", "torsion")
    rows = [(str(p.degree), p.summand, str(p.word_length), str(p.free_rank), _torsion_str(p.torsion)) for p in s.pieces if p.free_rank or p.torsion]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines.append("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for r in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    lines += ["", "totals:"]
    for row in totals_rows(s):
        lines.append(f"  H_{row['degree']}: rank {row['free_rank']}" + (f", torsion {_torsion_str(row['torsion'])}" if row["torsion"] else ""))
    lines += ["", f"Poincare series: {s.poincare_series()}"]
    if report.verification:
        lines.append("")
        for v in report.verification:
            lines.append(f"check {v['check']}: {'pass' if v['passed'] else 'FAIL'}")
    if report.bv is not None:
        lines += ["", f"BV composites (beta = {report.bv['beta']}):"]
        lines += ["  " + r["row"] for r in report.bv["q_rows"] + report.bv["w_rows"]]
        lines.append("  Z ↦ 0")
    return "\n".join(lines) + "\n"


def render_csv(report: ReportDocument) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["degree", "summand", "word_length", "free_rank", "torsion"])
    for p in report.summary.pieces:
        writer.writerow([p.degree, p.summand, p.word_length, p.free_rank, ";".join(str(t) for t in p.torsion)])
    return buf.getvalue()

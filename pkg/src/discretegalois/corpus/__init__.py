"""Shipped problem files and their analysis reports."""

from __future__ import annotations

import json
from pathlib import Path

CORPUS_DIR = Path(__file__).resolve().parent
REPORTS_DIR = CORPUS_DIR / "reports"

# instances whose integrability data (first integrals) fully verifies
INTEGRABLE = ("ex1_resonant", "diagonal_linear", "conjugated_diagonal", "ziglin_4d")


def problem_names() -> list[str]:
    return sorted(p.stem for p in CORPUS_DIR.glob("*.json"))


def problem_path(name: str) -> Path:
    return CORPUS_DIR / f"{name}.json"


def report_path(name: str) -> Path:
    return REPORTS_DIR / f"{name}.report.json"


def regenerate_reports() -> list[Path]:
    """Re-run the analysis on every problem file and write the reports."""
    from ..pipeline.analyze import analyze
    from ..pipeline.cli import dump_report
    from ..pipeline.problem import ProblemSpec

    REPORTS_DIR.mkdir(exist_ok=True)
    out = []
    for name in problem_names():
        report = analyze(ProblemSpec.load(problem_path(name)))
        path = report_path(name)
        path.write_text(dump_report(report))
        out.append(path)
    return out


def load_report(name: str) -> dict:
    return json.loads(report_path(name).read_text())

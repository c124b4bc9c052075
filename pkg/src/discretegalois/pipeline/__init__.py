"""Problem files, the analysis chain, report re-verification and the CLI."""

from .analyze import analyze, render_text
from .problem import Problem, ProblemError, ProblemSpec
from .recheck import RecheckResult, ReportCorrupted, recheck, recheck_file

__all__ = [
    "Problem",
    "ProblemError",
    "ProblemSpec",
    "RecheckResult",
    "ReportCorrupted",
    "analyze",
    "recheck",
    "recheck_file",
    "render_text",
]

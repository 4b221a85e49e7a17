"""Input language, orchestration and reports."""
from __future__ import annotations

from .problem import InputError, ProblemSpec, SweepSpec, parse_input
from .report import emit_report, render_text
from .runner import SCHEMA, Report, analyze_sample, run
from .syntax import ParseError, parse_expr, parse_program, pretty, pretty_expr

__all__ = [
    "InputError", "ParseError", "ProblemSpec", "Report", "SCHEMA", "SweepSpec", "analyze_sample", "emit_report",
    "parse_expr", "parse_input", "parse_program", "pretty", "pretty_expr", "render_text", "run",
]

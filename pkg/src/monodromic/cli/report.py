"""JSON and plain-text rendering of a Report."""
from __future__ import annotations

import json

from .runner import Report


def emit_report(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n").encode()
    if fmt == "text":
        return render_text(report.to_dict()).encode()
    raise ValueError(f"unknown report format {fmt!r}")


def _num(v) -> str:
    return f"{v:.10g}" if isinstance(v, float) else str(v)


def _sample_text(s: dict, lines: list[str]) -> None:
    if s["params"]:
        lines.append("parameters: " + ", ".join(f"{k} = {v}" for k, v in s["params"].items()))
    if s["error"]:
        lines.append(f"  error: {s['error']}")
        return
    for w in s["weights"]:
        lines.append(f"  weights {tuple(w['weights'])}")
        mono = w.get("monodromy")
        if mono:
            lines.append(f"    characteristic directions: {len(w['omega'])}; "
                         f"zero-speed curve risk: {mono['lambda_pq_risk']}")
        xi = w.get("xi")
        if xi:
            parts = [f"{k} {_num(xi[k]['value'])}" for k in ("residues", "quadrature") if k in xi]
            lines.append(f"    xi = {_num(xi['value'])} ({'; '.join(parts)})")
        for c in w["chains"]:
            head = f"    {c['direction'].lower()} chain m = {c['m']}"
            obs = c.get("obstructions") or []
            lines.append(head + (f": {len(c['coefficients'])} coefficients" if "coefficients" in c else ""))
            for ob in obs:
                lines.append(f"      obstruction at v_{ob['index']}: {ob['kind']} = {_num(ob['value'])} "
                             f"(+/- {_num(ob['error_estimate'])})")
        lines.append(f"    verdict: {w['verdict']['outcome']}"
                     + (" (conditional)" if w["verdict"]["conditional"] else ""))
    cf = s.get("closed_form")
    if cf:
        lines.append(f"  closed form V (m = {cf['m']}, {cf['origin']}): verified = {cf['verified']}")
        if "g" in cf:
            lines.append(f"    G = {_num(cf['g'])}")
        if "fundamental_equation_violation" in cf:
            lines.append(f"    fundamental equation violation = {_num(cf['fundamental_equation_violation'])}")
    if s.get("oracle"):
        o = s["oracle"]
        lines.append(f"  oracle: log eta_1 = {_num(o['log_eta1'])} +/- {_num(o['uncertainty'])} "
                     f"({o['classification']})")
    if s["outcome"]:
        lines.append(f"  VERDICT: {s['outcome']}" + (" (conditional)" if s["conditional"] else ""))
        lines.append(f"  basis: {s['basis']}")


def render_text(d: dict) -> str:
    inp = d["input"]
    lines = [f"dx = {inp['dx']}", f"dy = {inp['dy']}"]
    if inp.get("V"):
        lines.append(f"V = {inp['V']}")
    if "sweep" in d:
        lines.append(f"sweep over {d['sweep']['name']}: {len(d['samples'])} samples")
    for s in d["samples"]:
        _sample_text(s, lines)
    for b in d.get("brackets", []):
        lines.append(f"sign change of {b['quantity']} between {b['between'][0]} and {b['between'][1]} "
                     f"(estimate {_num(b['estimate'])})")
    return "\n".join(lines) + "\n"

"""Orchestration: one analysis per parameter sample, collected into a Report."""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..errors import MonodromicError
from ..expansion import Config, Mode, run_procedure
from ..expansion.procedure import _jsonable
from ..newton import compute_diagram
from ..poincare import eta_from_oracle, eta_from_V, fundamental_equation_check, g_of_r
from ..polar import blow_up
from .problem import ProblemSpec

log = logging.getLogger(__name__)

SCHEMA = "monodromic/1"


def rational_str(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def verdict_key(outcome: str) -> str:
    """'MaximalOrderFocusCandidate' -> 'maximal_order_focus_candidate'."""
    out = []
    for i, ch in enumerate(outcome):
        if ch.isupper() and i:
            out.append("_")
        out.append(ch.lower())
    return "".join(out)


@dataclass
class Report:
    spec: dict
    samples: list[dict] = field(default_factory=list)
    brackets: list[dict] = field(default_factory=list)
    sweep: dict | None = None

    @property
    def failed(self) -> bool:
        return any(s.get("error") for s in self.samples)

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"schema": SCHEMA, "input": self.spec, "samples": self.samples}
        if self.sweep is not None:
            out["sweep"] = self.sweep
            out["brackets"] = self.brackets
        elif self.samples:
            s = self.samples[0]
            for k in ("verdict", "outcome", "basis", "conditional", "obstruction"):
                out[k] = s.get(k)
        return _jsonable(out)


def _config(spec: ProblemSpec) -> Config:
    return Config(max_order=spec.max_order, m_window=spec.m_window, tol_zero=spec.tol_zero,
                  mode=spec.mode, weights=spec.weights)


def _claim(quantity: str, value, error, method: str) -> dict:
    return {"quantity": quantity, "value": value, "error": error, "method": method}


def analyze_sample(spec: ProblemSpec, env: dict[str, Fraction]) -> dict:
    """Run the procedure (and the oracle) for one parameter binding; never raises."""
    out: dict[str, Any] = {"params": {k: rational_str(v) for k, v in sorted(env.items())}, "error": None,
                           "verdict": None, "outcome": None, "basis": None, "conditional": None,
                           "obstruction": None, "weights": [], "oracle": None, "closed_form": None, "claims": []}
    try:
        _analyze(spec, env, out)
    except Exception as exc:  # a failing sample must not take the sweep down
        log.warning("sample %s failed: %s", out["params"], exc, exc_info=log.isEnabledFor(logging.DEBUG))
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def _analyze(spec: ProblemSpec, env, out: dict) -> None:
    X = spec.vector_field(env)
    config = _config(spec)
    w0 = spec.weights or compute_diagram(X).weights[0]
    claims = out["claims"]

    cf = spec.closed_form(X, w0, env)
    if cf is not None:
        Z = blow_up(X, w0)
        info: dict[str, Any] = {"weights": list(w0), "m": cf.m, "origin": cf.source, "V": str(cf.V)}
        info["verified"] = cf.verify(Z)
        if info["verified"]:
            config.closed_form = cf
            try:
                g = g_of_r(Z, cf)
                info["g"] = g.value
                info["excluded_radii"] = g.excluded
                claims.append(_claim("g", g.value, g.spread, "pv-quadrature over radii"))
                if cf.m >= 1:
                    disc = eta_from_V(g.value, cf.m)
                    info["discriminant"] = {"outcome": disc.outcome, "eta": disc.eta, "index": disc.leading_index}
            except MonodromicError as exc:
                info["g_error"] = f"{type(exc).__name__}: {exc}"
            try:
                viol = fundamental_equation_check(Z, cf)
                info["fundamental_equation_violation"] = viol
                claims.append(_claim("fundamental_equation_violation", viol, None, "return-map central difference"))
            except MonodromicError as exc:
                info["fundamental_equation_error"] = f"{type(exc).__name__}: {exc}"
        out["closed_form"] = info

    if spec.mode is not Mode.ORACLE:
        res = run_procedure(X, config)
        v = res.verdict
        out.update(verdict=verdict_key(v.outcome.value), outcome=v.outcome.value, basis=v.basis,
                   conditional=v.conditional, weights=[w.to_dict() for w in res.weights])
        ob = v.details.get("obstruction")
        out["obstruction"] = ob
        if ob is not None:
            claims.append(_claim(f"obstruction[{ob['index']}]", ob["value"], ob["error_estimate"],
                                 "+".join(sorted(ob["provenance"])) or "line"))
        for wa in res.weights:
            if wa.xi is not None:
                for method, r in (("residues", wa.xi.residues), ("quadrature", wa.xi.quadrature)):
                    if r is not None:
                        claims.append(_claim(f"xi{wa.weights}", r.value.real, r.error_estimate, method))

    if spec.oracle or spec.mode is Mode.ORACLE:
        try:
            est = eta_from_oracle(blow_up(X, w0))
        except MonodromicError as exc:
            if spec.mode is Mode.ORACLE:
                raise
            out["oracle"] = {"weights": list(w0), "error": f"{type(exc).__name__}: {exc}"}
            return
        out["oracle"] = {"weights": list(w0), **est.to_dict()}
        claims.append(_claim("log_eta1", est.log_eta1, est.uncertainty, "poincare return map extrapolation"))
        if spec.mode is Mode.ORACLE:
            out["verdict"] = est.classification.value.lower()
            out["outcome"] = est.classification.value
            out["basis"] = "numeric return map"
            out["conditional"] = True


def _sign(v) -> int:
    if not isinstance(v, (int, float)) or not math.isfinite(v) or v == 0:
        return 0
    return 1 if v > 0 else -1


def brackets(values: list[Fraction], samples: list[dict]) -> list[dict]:
    """Adjacent samples where a tracked quantity changes sign, with a linear root estimate."""
    def quantities(s):
        q = {}
        if s.get("oracle") and s["oracle"].get("classification") != "Unknown":
            q["log_eta1"] = s["oracle"]["log_eta1"]
        if s.get("obstruction"):
            q[f"obstruction[{s['obstruction']['index']}]"] = s["obstruction"]["value"]
        return q

    out = []
    qs = [quantities(s) for s in samples]
    for i in range(len(samples) - 1):
        for name, a in qs[i].items():
            b = qs[i + 1].get(name)
            if b is None or _sign(a) * _sign(b) >= 0:
                continue
            x0, x1 = float(values[i]), float(values[i + 1])
            root = x0 - a * (x1 - x0) / (b - a)
            out.append({"quantity": name, "between": [rational_str(values[i]), rational_str(values[i + 1])],
                        "values": [a, b], "estimate": root})
    return out


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("MONODROMIC_JOBS", "1")))
    except ValueError:
        return 1


def run(spec: ProblemSpec, *, jobs: int | None = None) -> Report:
    jobs = jobs or default_jobs()
    envs = spec.bindings()
    if jobs > 1 and len(envs) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(envs))) as pool:
            samples = list(pool.map(analyze_sample, [spec] * len(envs), envs))
    else:
        samples = [analyze_sample(spec, env) for env in envs]
    report = Report(describe(spec), samples)
    if spec.sweep is not None:
        values = spec.sweep.values()
        report.sweep = {"name": spec.sweep.name, "values": [rational_str(v) for v in values]}
        report.brackets = brackets(values, samples)
    return report


def describe(spec: ProblemSpec) -> dict:
    from .syntax import pretty_expr

    return {
        "dx": pretty_expr(spec.dx),
        "dy": pretty_expr(spec.dy),
        "params": {k: rational_str(v) for k, v in sorted(spec.params.items())},
        "weights": list(spec.weights) if spec.weights else None,
        "V": pretty_expr(spec.V) if spec.V is not None else None,
        "mode": spec.mode.value,
        "max_order": spec.max_order,
        "m_window": list(spec.m_window),
        "tol_zero": spec.tol_zero,
        "oracle": spec.oracle,
    }

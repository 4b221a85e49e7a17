"""Construction of Laurent inverse integrating factors and the resulting center/focus verdict.

For each weight of the Newton diagram the field is blown up and a Laurent series
V = sum v_j rho^j is built coefficient by coefficient, ascending from a leading exponent
m (or descending from it for polynomial fields).  A coefficient that cannot be made a
real-analytic function on the circle is an obstruction: no such V exists with this
leading exponent.  Since every analytic center admits a Laurent inverse integrating
factor, an obstruction with m pinned down proves a focus.
"""
from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import (LeadingDegenerate, MonodromicError, NotMonodromicForTheseWeights, PVDiverges,
                      PVUndefined, RDependence, RootFindingFailure)
from ..newton import PolyVectorField, compute_diagram
from ..polar import LaurentRho, MonodromyReport, PolarField, Risk, blow_up, characteristic_directions, \
    lambda_pq_probe, pde_residual
from ..residue_pv import PVResult, pv_contour_integral, pv_quadrature
from ..trigfun import RationalTrig
from .coef import CoefficientFn
from .lemma import ObstructionKind, ObstructionRecord, Operator, StepContext, leading_step, solve_step
from .linegrid import LineGrid, trig_eval
from .recursion import ForcingBuilder, ascending_operator, descending_operator

log = logging.getLogger(__name__)


class Direction(str, enum.Enum):
    ASCENDING = "Ascending"
    DESCENDING = "Descending"


class Mode(str, enum.Enum):
    AUTO = "auto"
    ASCENDING = "ascending"
    DESCENDING = "descending"
    ORACLE = "oracle"


class Outcome(str, enum.Enum):
    CENTER = "Center"
    FOCUS = "Focus"
    MAXIMAL_ORDER_FOCUS_CANDIDATE = "MaximalOrderFocusCandidate"
    CENTER_BY_ESSENTIAL_SINGULARITY = "CenterByEssentialSingularity"
    UNDECIDED = "Undecided"


DECISIVE = {Outcome.CENTER, Outcome.FOCUS, Outcome.CENTER_BY_ESSENTIAL_SINGULARITY}


@dataclass
class Config:
    max_order: int = 6
    m_window: tuple[int, int] = (-8, 8)
    tol_zero: float = 1e-9
    saturation_window: int = 3
    const_cap: int = 8
    mode: Mode = Mode.AUTO
    weights: Optional[tuple[int, int]] = None
    closed_form: Optional[object] = None  # poincare.ClosedFormIIF
    dual_path: bool = True
    probe: bool = True


@dataclass
class XiResult:
    value: float
    residues: PVResult | None
    quadrature: PVResult | None

    @property
    def paths_agree(self) -> bool:
        if self.residues is None or self.quadrature is None:
            return True
        return abs(self.residues.value.real - self.quadrature.value.real) < 1e-6

    def to_dict(self) -> dict:
        out = {"value": self.value}
        if self.residues is not None:
            out["residues"] = {"value": self.residues.value.real, "error_estimate": self.residues.error_estimate}
        if self.quadrature is not None:
            out["quadrature"] = {"value": self.quadrature.value.real, "error_estimate": self.quadrature.error_estimate}
        return out


def xi_pq(Z: PolarField) -> XiResult:
    """PV of R_1/G_0 over one turn, by residues with a quadrature cross-check."""
    W = RationalTrig(Z.r(1), Z.g(0))
    res = pv_contour_integral(W)
    poles = list(res.on_contour_poles)
    f = lambda phi: np.real(W.evaluate(phi))  # noqa: E731
    try:
        quad = pv_quadrature(f, poles)
    except PVDiverges as exc:
        log.info("quadrature cross-check for xi failed: %s", exc)
        quad = None
    return XiResult(float(res.value.real), res, quad)


@dataclass
class ExpansionState:
    weights: tuple[int, int]
    direction: Direction
    m: Optional[int] = None
    m_fixed: bool = False
    coefficients: dict[int, CoefficientFn] = field(default_factory=dict)
    carried_constants: list[str] = field(default_factory=list)
    obstructions: list[ObstructionRecord] = field(default_factory=list)
    halted: Optional[str] = None
    steps: list[dict] = field(default_factory=list)
    condition_free_run: int = 0
    grid: Optional[LineGrid] = None
    _ctx: StepContext = field(default_factory=StepContext, repr=False)
    _builder: Optional[ForcingBuilder] = field(default=None, repr=False)

    @property
    def m_status(self) -> str:
        return f"Fixed({self.m})" if self.m_fixed else "Free"

    def saturated(self, window: int = 3) -> bool:
        """Reached the order limit with the last `window` steps free of new conditions."""
        return self.halted == "max_order" and not self.obstructions and self.condition_free_run >= window

    def closed_form(self) -> LaurentRho | None:
        """V with every carried constant set to zero, if all coefficients are exact."""
        out = {}
        for j, c in self.coefficients.items():
            t = c.closed_form()
            if t is None:
                return None
            out[j] = t
        return LaurentRho(out)

    def last_jump(self, index: int) -> float | None:
        for s in self.steps:
            if s.get("index") == index and "jump" in s:
                return s["jump"]
        return None

    def to_dict(self) -> dict:
        coefs = {}
        for j, c in sorted(self.coefficients.items()):
            cf = c.closed_form()
            coefs[str(j)] = {
                "closed_form": str(cf) if cf is not None and c.is_exact() else None,
                "constants": sorted(k for k in c.keys() if k is not None),
                "exact": c.is_exact(),
            }
        return {
            "weights": list(self.weights),
            "direction": self.direction.value,
            "m_status": self.m_status,
            "m": self.m,
            "coefficients": coefs,
            "carried_constants": list(self.carried_constants),
            "obstructions": [o.to_dict() for o in self.obstructions],
            "halted": self.halted,
            "steps": [_jsonable(s) for s in self.steps],
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, complex):
        return {"re": _finite(x.real), "im": _finite(x.imag)}
    if isinstance(x, (np.floating, float)):
        return _finite(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.complexfloating):
        return _jsonable(complex(x))
    return x


def _finite(v: float):
    return v if math.isfinite(v) else str(v)


@dataclass
class Verdict:
    outcome: Outcome
    basis: str
    conditional: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"outcome": self.outcome.value, "basis": self.basis, "conditional": self.conditional,
                "details": _jsonable(self.details)}


# ---------------------------------------------------------------------------
# chains
# ---------------------------------------------------------------------------


def leading_constraint(xi: float, state: ExpansionState, tol_zero: float = 1e-9) -> ExpansionState:
    """A nonzero xi pins the ascending leading exponent to 1."""
    if abs(xi) > tol_zero:
        state.m, state.m_fixed = 1, True
    return state


def _lead_of(Z: PolarField, descending: bool):
    if descending:
        n = max(Z.top_g + 1, Z.top_r)
        return Z.g(n - 1)
    return Z.g(0)


def start_chain(Z: PolarField, m: int, *, descending: bool = False, m_fixed: bool = False,
                grid: LineGrid | None = None) -> ExpansionState:
    """Leading coefficient v_m: a nonzero admissible solution of the homogeneous equation."""
    lead = _lead_of(Z, descending)
    if lead.is_zero():
        raise LeadingDegenerate("leading trig polynomial vanishes identically")
    grid = grid or LineGrid.for_lead(lead)
    st = ExpansionState(Z.weights, Direction.DESCENDING if descending else Direction.ASCENDING, m, m_fixed,
                        grid=grid)
    st._builder = ForcingBuilder(Z, grid, descending)
    op_lead, lin = (descending_operator if descending else ascending_operator)(Z, m)
    op = Operator(op_lead, lin, grid)
    out = leading_step(op, m, st._ctx)
    st.steps.append(out.diagnostics)
    if out.obstruction is not None:
        st.obstructions.append(out.obstruction)
        st.halted = "obstruction"
    else:
        st.coefficients[m] = out.coefficient
    return st


def _advance(Z: PolarField, state: ExpansionState, j: int, config: Config) -> ExpansionState:
    if state.halted:
        return state
    descending = state.direction is Direction.DESCENDING
    op_lead, lin = (descending_operator if descending else ascending_operator)(Z, j)
    op = Operator(op_lead, lin, state.grid)
    forcing, forcing_at = state._builder.build(j, state.coefficients)
    out = solve_step(op, j, forcing, state._ctx, v_ref=1, forcing_at=forcing_at,
                     carried=state.carried_constants, tol_zero=config.tol_zero, dual_path=config.dual_path)
    out.diagnostics["new_constants"] = list(out.new_constants)
    out.diagnostics["conditions"] = {k: [float(x0), {f: float(w) for f, w in lin_.items()}]
                                     for k, (x0, lin_) in out.rules.items()}
    state.steps.append(out.diagnostics)
    if out.obstruction is not None:
        state.obstructions.append(out.obstruction)
        state.halted = "obstruction"
        return state
    if out.rules:
        state.coefficients = {i: c.substitute(out.rules) for i, c in state.coefficients.items()}
    state.coefficients[j] = out.coefficient
    state.carried_constants = [c for c in state.carried_constants if c not in out.rules] + out.new_constants
    state.condition_free_run = 0 if out.conditions_imposed else state.condition_free_run + 1
    if len(state.carried_constants) > config.const_cap:
        state.halted = "constant_cap"
    return state


def ascend_step(Z: PolarField, state: ExpansionState, config: Config | None = None) -> ExpansionState:
    j = max(state.coefficients) + 1
    return _advance(Z, state, j, config or Config())


def descend_step(Z: PolarField, state: ExpansionState, config: Config | None = None) -> ExpansionState:
    j = min(state.coefficients) - 1
    return _advance(Z, state, j, config or Config())


def run_chain(Z: PolarField, m: int, config: Config, *, descending: bool = False, m_fixed: bool = False,
              grid: LineGrid | None = None) -> ExpansionState:
    st = start_chain(Z, m, descending=descending, m_fixed=m_fixed, grid=grid)
    step = descend_step if descending else ascend_step
    for _ in range(config.max_order):
        if st.halted:
            break
        st = step(Z, st, config)
    if not st.halted:
        st.halted = "max_order"
    return st


def leading_scan(Z: PolarField, window: tuple[int, int], *, descending: bool = False) -> dict[int, bool]:
    """Leading exponents in the window for which v_m is admissible."""
    lead = _lead_of(Z, descending)
    grid = LineGrid.for_lead(lead)
    out = {}
    for m in range(window[0], window[1] + 1):
        st = start_chain(Z, m, descending=descending, grid=grid)
        out[m] = not st.obstructions
    return out


def m_order(window: tuple[int, int]) -> list[int]:
    """1, 0, 2, -1, 3, ... restricted to the window."""
    lo, hi = window
    out, k = [], 0
    while len(out) < hi - lo + 1 and k <= 2 * (abs(lo) + abs(hi)) + 4:
        for m in (1 + k, -k) if k else (1, 0):
            if lo <= m <= hi and m not in out:
                out.append(m)
        k += 1
    return out


# ---------------------------------------------------------------------------
# closing a surviving chain
# ---------------------------------------------------------------------------


def _closed_form_g(Z: PolarField, state: ExpansionState, config: Config):
    """(V, g) when an exact closed-form V is available and verified, else (V or None, None)."""
    from ..poincare import ClosedFormIIF, g_of_r

    cand = None
    if config.closed_form is not None:
        cand = config.closed_form
    else:
        V = state.closed_form()
        if V is not None and not V.is_zero() and pde_residual(Z, V).is_zero():
            cand = ClosedFormIIF(V, state.m, "engine")
    if cand is None or not cand.verify(Z):
        return None, None
    try:
        return cand, g_of_r(Z, cand).value
    except (RDependence, PVDiverges) as exc:
        log.info("G(r) unavailable: %s", exc)
        return cand, None


def _close_survivor(Z: PolarField, st: ExpansionState, config: Config, conditional: bool) -> Verdict | None:
    from ..poincare import eta_from_V

    V, g = _closed_form_g(Z, st, config)
    details = {"m": st.m, "direction": st.direction.value}
    if V is not None and g is not None and st.m is not None and st.m >= 1:
        disc = eta_from_V(g, st.m, tol=max(config.tol_zero, 1e-8))
        details.update({"g": g, "eta": disc.eta, "V": str(V.V) if isinstance(V.V, LaurentRho) else V.source})
        if disc.outcome == "Focus":
            return Verdict(Outcome.FOCUS, f"closed-form inverse integrating factor gives a nontrivial leading "
                                          f"return-map coefficient (m = {st.m})", False, details)
        return Verdict(Outcome.CENTER, "inverse integrating factor constructed in closed form; "
                                       "its return-map invariant vanishes", conditional, details)
    if st.m is not None and st.m <= 0:
        return Verdict(Outcome.CENTER, f"ascending Laurent inverse integrating factor with leading exponent "
                                       f"m = {st.m} <= 0 (verified to finite order)", True, details)
    return None


# ---------------------------------------------------------------------------
# the full procedure for one weight and for a field
# ---------------------------------------------------------------------------


@dataclass
class WeightAnalysis:
    weights: tuple[int, int]
    verdict: Verdict
    xi: XiResult | None = None
    monodromy: MonodromyReport | None = None
    omega: list[tuple[float, int]] = field(default_factory=list)
    chains: list[ExpansionState] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "weights": list(self.weights),
            "verdict": self.verdict.to_dict(),
            "xi": self.xi.to_dict() if self.xi else None,
            "monodromy": None if self.monodromy is None else {
                "omega_empty": self.monodromy.omega_empty,
                "lambda_pq_risk": self.monodromy.lambda_pq_risk.value,
                "orientation_flipped": self.monodromy.orientation_flipped,
                "evidence": [list(e) for e in self.monodromy.evidence],
            },
            "omega": [[a, k] for a, k in self.omega],
            "chains": [c.to_dict() for c in self.chains],
            "error": self.error,
        }


def _descending_branch(Z: PolarField, config: Config, wa: WeightAnalysis, risk: Risk, reason: str) -> Verdict:
    try:
        order = m_order(config.m_window)
        lead = _lead_of(Z, True)
        grid = LineGrid.for_lead(lead)
        survivors = []
        for m in order:
            st = run_chain(Z, m, config, descending=True, grid=grid)
            wa.chains.append(st)
            if not st.obstructions:
                survivors.append(st)
                break
    except LeadingDegenerate as exc:
        return Verdict(Outcome.UNDECIDED, f"{reason}; descending expansion unavailable ({exc})", True)
    if survivors:
        st = survivors[0]
        v = _close_survivor(Z, st, config, conditional=True)
        if v is not None:
            return v
        return Verdict(Outcome.UNDECIDED, f"{reason}; a descending expansion with leading exponent {st.m} "
                                          f"survives to order {config.max_order}", True, {"m": st.m})
    return Verdict(Outcome.CENTER_BY_ESSENTIAL_SINGULARITY,
                   f"{reason}; no descending expansion either, so any Laurent inverse integrating factor "
                   f"has an essential singularity at rho = 0, which forces a center off curves of zero "
                   f"angular speed", risk is not Risk.NONE_DETECTED)


def analyze_weight(X: PolyVectorField, w: tuple[int, int], config: Config) -> WeightAnalysis:
    try:
        Z = blow_up(X, w)
    except NotMonodromicForTheseWeights as exc:
        return WeightAnalysis(w, Verdict(Outcome.UNDECIDED, str(exc)), error=str(exc))
    omega = list(characteristic_directions(Z))
    probe = lambda_pq_probe(Z) if config.probe else MonodromyReport(not omega, Risk.UNKNOWN, Z.orientation_flipped)
    wa = WeightAnalysis(w, Verdict(Outcome.UNDECIDED, "not analysed"), monodromy=probe, omega=omega)
    risk = probe.lambda_pq_risk
    try:
        if config.mode is Mode.DESCENDING:
            wa.verdict = _descending_branch(Z, config, wa, risk, "descending mode requested")
            return wa
        xi = xi_pq(Z)
        wa.xi = xi
        state = leading_constraint(xi.value, ExpansionState(w, Direction.ASCENDING), config.tol_zero)
        grid = LineGrid.for_lead(Z.g(0))
        if state.m_fixed:
            st = run_chain(Z, state.m, config, m_fixed=True, grid=grid)
            wa.chains.append(st)
            if st.obstructions:
                ob = st.obstructions[-1]
                if not ob.paths_agree:
                    wa.verdict = Verdict(Outcome.UNDECIDED, "obstruction value is zero on one computation path "
                                                            "but not on the other", True, {"obstruction": ob.to_dict()})
                else:
                    wa.verdict = Verdict(Outcome.FOCUS,
                                         f"xi != 0 fixes m = 1 and the coefficient v_{ob.index} has no periodic "
                                         f"real-analytic solution ({ob.kind.value}); analytic centers always admit "
                                         f"a Laurent inverse integrating factor",
                                         False, {"obstruction": ob.to_dict(), "xi": xi.value})
                return wa
            v = _close_survivor(Z, st, config, conditional=False)
            wa.verdict = v or Verdict(Outcome.MAXIMAL_ORDER_FOCUS_CANDIDATE,
                                      "expansion with m = 1 saturates without a verified closed form; either a "
                                      "focus of maximal order or a center", risk is not Risk.NONE_DETECTED,
                                      {"m": 1, "xi": xi.value})
            return wa
        # m free
        survivors: list[ExpansionState] = []
        lead_fail, later_fail = [], []
        for m in m_order(config.m_window):
            st = run_chain(Z, m, config, grid=grid)
            wa.chains.append(st)
            if not st.obstructions:
                v = _close_survivor(Z, st, config, conditional=risk is not Risk.NONE_DETECTED)
                if v is not None:
                    wa.verdict = v
                    return wa
                survivors.append(st)
            elif st.obstructions[-1].index == m:
                lead_fail.append(m)
            else:
                later_fail.append(m)
        if not survivors and not later_fail:
            if config.mode is Mode.ASCENDING:
                wa.verdict = Verdict(Outcome.UNDECIDED, "no admissible leading coefficient in the m window", True)
            else:
                wa.verdict = _descending_branch(Z, config, wa, risk,
                                                "no admissible leading coefficient in the m window")
            return wa
        if not survivors:
            wa.verdict = Verdict(Outcome.FOCUS,
                                 f"every leading exponent in {list(config.m_window)} hits an obstruction; "
                                 f"no ascending Laurent inverse integrating factor in the scanned window",
                                 True, {"obstructed_m": later_fail, "inadmissible_m": lead_fail})
            return wa
        lo = min(s.m for s in survivors)
        if lo == config.m_window[0] and config.mode is not Mode.ASCENDING:
            wa.verdict = _descending_branch(Z, config, wa, risk, "survivors persist down to the bottom of the m window")
            return wa
        wa.verdict = Verdict(Outcome.MAXIMAL_ORDER_FOCUS_CANDIDATE,
                             f"expansion survives for m in {sorted(s.m for s in survivors)} without a verified "
                             f"closed form", True, {"surviving_m": sorted(s.m for s in survivors)})
        return wa
    except (PVUndefined, RootFindingFailure, LeadingDegenerate) as exc:
        wa.error = f"{type(exc).__name__}: {exc}"
        wa.verdict = Verdict(Outcome.UNDECIDED, wa.error, True)
        return wa


@dataclass
class ProcedureResult:
    verdict: Verdict
    weights: list[WeightAnalysis]
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.to_dict(), "weights": [w.to_dict() for w in self.weights]}


def combine(analyses: list[WeightAnalysis]) -> Verdict:
    decisive = [a.verdict for a in analyses if a.verdict.outcome in DECISIVE]
    if decisive:
        kinds = {v.outcome in (Outcome.CENTER, Outcome.CENTER_BY_ESSENTIAL_SINGULARITY) for v in decisive}
        if len(kinds) > 1:
            return Verdict(Outcome.UNDECIDED, "weights disagree: " + "; ".join(
                f"{a.weights}: {a.verdict.outcome.value}" for a in analyses), True)
        return decisive[0]
    for a in analyses:
        if a.verdict.outcome is Outcome.MAXIMAL_ORDER_FOCUS_CANDIDATE:
            return a.verdict
    return analyses[0].verdict if analyses else Verdict(Outcome.UNDECIDED, "no weights")


def run_procedure(X: PolyVectorField, config: Config | None = None) -> ProcedureResult:
    config = config or Config()
    t0 = time.perf_counter()
    weights = [config.weights] if config.weights else list(compute_diagram(X).weights)
    analyses = []
    for w in weights:
        try:
            analyses.append(analyze_weight(X, w, config))
        except MonodromicError as exc:
            analyses.append(WeightAnalysis(w, Verdict(Outcome.UNDECIDED, f"{type(exc).__name__}: {exc}", True),
                                           error=str(exc)))
        a = analyses[-1]
        if a.verdict.outcome in DECISIVE and not a.verdict.conditional:
            break
    return ProcedureResult(combine(analyses), analyses, time.perf_counter() - t0)

"""Laurent inverse-integrating-factor expansions and the center/focus procedure."""
from __future__ import annotations

from .coef import CoefficientFn, Component
from .lemma import (ObstructionKind, ObstructionRecord, PeriodicODE, admissibility_check,
                    solve_periodic_ode)
from .procedure import (Config, Direction, ExpansionState, Mode, Outcome, ProcedureResult, Verdict,
                        WeightAnalysis, ascend_step, descend_step, leading_constraint, leading_scan,
                        run_chain, run_procedure, start_chain, xi_pq)
from .recursion import residual_coefficient

__all__ = [
    "CoefficientFn", "Component", "Config", "Direction", "ExpansionState", "Mode", "ObstructionKind",
    "ObstructionRecord", "Outcome", "PeriodicODE", "ProcedureResult", "Verdict", "WeightAnalysis",
    "admissibility_check", "ascend_step", "descend_step", "leading_constraint", "leading_scan",
    "residual_coefficient", "run_chain", "run_procedure", "solve_periodic_ode", "start_chain", "xi_pq",
]

from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from families import sextic, septic, semi35_particular, toy

from monodromic.errors import LeadingDegenerate
from monodromic.expansion import (Config, Direction, ExpansionState, ObstructionKind, Outcome, PeriodicODE,
                                  admissibility_check, leading_constraint, leading_scan, residual_coefficient,
                                  run_chain, run_procedure, solve_periodic_ode, start_chain, xi_pq)
from monodromic.expansion.procedure import m_order
from monodromic.polar import LaurentRho, PolarField, blow_up, pde_residual
from monodromic.trigfun import TrigPoly

S, C = TrigPoly.sin(), TrigPoly.cos()
PHI = np.linspace(0, 2 * np.pi, 97)


def _proportional(got: np.ndarray, want: np.ndarray, tol: float = 1e-9) -> bool:
    k = np.dot(got, want) / np.dot(want, want)
    return abs(k) > 1e-12 and np.max(np.abs(got - k * want)) < tol * max(1.0, np.max(np.abs(got)))


# --- xi -------------------------------------------------------------------

@pytest.mark.parametrize("X, expected", [
    (septic(0), math.pi),
    (septic(F(-31, 25)), math.pi),
    (semi35_particular(F(-3, 2)), 0.0),
    (toy(F(1, 10)), 2 * math.pi / 10),
    (toy(0), 0.0),
])
def test_xi(X, expected):
    r = xi_pq(blow_up(X, (1, 1)))
    assert abs(r.value - expected) < 1e-10
    assert r.paths_agree


def test_leading_constraint():
    st = ExpansionState((1, 1), Direction.ASCENDING)
    assert leading_constraint(math.pi, st).m_status == "Fixed(1)"
    st = ExpansionState((1, 1), Direction.ASCENDING)
    assert leading_constraint(1e-12, st).m_status == "Free"


def test_m_order():
    assert m_order((-2, 3)) == [1, 0, 2, -1, 3, -2]
    assert m_order((1, 1)) == [1]


# --- chains ---------------------------------------------------------------

def test_septic_leading_and_second():
    Z = blow_up(septic(F(-31, 25)), (1, 1))
    st = run_chain(Z, 1, Config(max_order=1), m_fixed=True)
    v1 = st.coefficients[1].evaluate(PHI)
    s2 = np.sin(PHI) ** 2
    assert _proportional(v1, s2 * (4 - 3 * s2))
    assert np.max(np.abs(st.coefficients[2].evaluate(PHI))) < 1e-9


def test_septic_obstruction_at_three():
    Z = blow_up(septic(0), (1, 1))
    st = run_chain(Z, 1, Config(max_order=4), m_fixed=True)
    assert st.halted == "obstruction"
    ob = st.obstructions[0]
    assert ob.kind is ObstructionKind.ZETA_NONZERO and ob.index == 3
    assert ob.paths_agree


def test_toy_chain_center():
    Z = blow_up(toy(0), (1, 1))
    st = run_chain(Z, 1, Config(max_order=4))
    assert not st.obstructions and st.halted == "max_order"
    V = st.closed_form()
    assert V is not None and pde_residual(Z, V).is_zero()


def test_toy_chain_focus_leading_free():
    # for lambda != 0 the homogeneous leading equation has a constant solution only when m = 1
    Z = blow_up(toy(F(1, 5)), (1, 1))
    scan = leading_scan(Z, (-2, 3))
    assert [m for m, ok in scan.items() if ok] == [1]
    # V = rho solves the equation for every lambda; the focus shows up through xi instead
    st = run_chain(Z, 1, Config(max_order=3), m_fixed=True)
    assert not st.obstructions
    assert st.closed_form() == LaurentRho({1: TrigPoly.one()})


def test_descending_sextic_leading():
    Z = blow_up(sextic(1, F(1, 2), F(1, 3), F(1, 5)), (1, 1))
    scan = leading_scan(Z, (-8, 8), descending=True)
    assert [m for m, ok in scan.items() if ok] == [5]
    st = start_chain(Z, 5, descending=True)
    assert _proportional(st.coefficients[5].evaluate(PHI), np.cos(PHI) ** 6)


def test_descending_sextic_center_all_admissible():
    # with mu = A = 0 the top radial coefficient vanishes and v = G_{n-1} works for every m
    Z = blow_up(sextic(1, F(1, 2), 0, 0), (1, 1))
    assert all(leading_scan(Z, (-3, 3), descending=True).values())


def test_leading_degenerate():
    # R_n vanishing while G_{n-1} vanishes: build a polar field with zero top coefficient
    Z = PolarField((1, 1), (TrigPoly.zero(),), (TrigPoly.zero(), TrigPoly.one()), 0, TrigPoly.one())
    with pytest.raises(LeadingDegenerate):
        start_chain(Z, 1)


# --- single equation ------------------------------------------------------

def test_periodic_ode_nonresonant_zero_forcing():
    v = solve_periodic_ode(PeriodicODE(TrigPoly.one(), TrigPoly.constant(1), None, 2))
    assert np.max(np.abs(v.evaluate(PHI))) < 1e-12


def test_periodic_ode_forced():
    # v' + v + cos = 0 has the periodic solution -(cos + sin)/2
    v = solve_periodic_ode(PeriodicODE(TrigPoly.one(), TrigPoly.one(), C, 2))
    assert np.max(np.abs(v.evaluate(PHI) + (np.cos(PHI) + np.sin(PHI)) / 2)) < 1e-9


def test_periodic_ode_resonant_obstruction():
    # v' + 1 = 0 has no periodic solution
    out = solve_periodic_ode(PeriodicODE(TrigPoly.one(), TrigPoly.zero(), TrigPoly.one(), 2))
    assert out.kind in (ObstructionKind.ZETA_NONZERO, ObstructionKind.NON_PERIODIC_TERM)
    assert abs(abs(out.value) - 2 * math.pi) < 1e-6 or out.value != 0


def test_periodic_ode_resonant_free_constant():
    v = solve_periodic_ode(PeriodicODE(TrigPoly.one(), TrigPoly.zero(), C, 2))
    assert "C1" in v.keys()
    assert np.max(np.abs(v.evaluate(PHI) + np.sin(PHI))) < 1e-9


def test_admissibility_accepts_real_solution():
    v = solve_periodic_ode(PeriodicODE(TrigPoly.one(), TrigPoly.one(), C, 2))
    assert admissibility_check(v) is None


# --- recursion consistency ------------------------------------------------

def test_residual_coefficients_vanish_for_chain():
    Z = blow_up(septic(F(-31, 25)), (1, 1))
    st = run_chain(Z, 1, Config(max_order=2), m_fixed=True)
    V = LaurentRho({j: c.closed_form() for j, c in st.coefficients.items() if c.closed_form() is not None})
    for N in (1, 2):
        r = residual_coefficient(Z, V, N)
        assert max((abs(complex(c)) for c in r.coeffs.values()), default=0.0) < 1e-9


# --- procedure ------------------------------------------------------------

@pytest.mark.parametrize("X, outcome", [
    (toy(0), Outcome.CENTER),
    (toy(F(1, 10)), Outcome.FOCUS),
    (toy(F(-1, 10)), Outcome.FOCUS),
    (septic(0), Outcome.FOCUS),
])
def test_run_procedure(X, outcome):
    res = run_procedure(X, Config(max_order=4))
    assert res.verdict.outcome is outcome


def test_septic_focus_reports_obstruction():
    res = run_procedure(septic(F(1, 2)), Config(max_order=4))
    ob = res.verdict.details["obstruction"]
    assert ob["kind"] == "ZetaNonzero" and ob["index"] == 3
    assert abs(res.weights[0].xi.value - math.pi) < 1e-10


def test_descending_chain_rebuilds_polynomial_iif():
    # the transformed (x^2+y^2)(x^6+3y^2) is a polynomial in rho, so it is also a descending expansion
    from families import SEXTIC_IIF
    from monodromic.polar import cartesian_iif_to_polar

    X = sextic(1, F(1, 2), F(1, 3), F(1, 5))
    Z = blow_up(X, (1, 1))
    st = run_chain(Z, 5, Config(max_order=6), descending=True)
    assert not st.obstructions
    assert st.closed_form() == cartesian_iif_to_polar(SEXTIC_IIF, X, (1, 1))

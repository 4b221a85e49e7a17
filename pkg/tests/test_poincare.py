from __future__ import annotations

import math
from fractions import Fraction as F

import pytest
from families import SEXTIC_IIF, sextic, septic, septic_log_eta1, toy

from monodromic.polar import LaurentRho, blow_up, cartesian_iif_to_polar
from monodromic.poincare import (Classification, ClosedFormIIF, eta_from_oracle, eta_from_V,
                                 fundamental_equation_check, g_of_r, return_map)
from monodromic.trigfun import TrigPoly

RHO = LaurentRho({1: TrigPoly.one()})


def test_return_map_linear_center():
    Z = blow_up(toy(0), (1, 1))
    for r0 in (1e-2, 1e-3):
        assert abs(return_map(Z, r0).value - r0) < 1e-12


def test_return_map_linear_focus():
    Z = blow_up(toy(F(1, 10)), (1, 1))
    r0 = 1e-3
    assert abs(return_map(Z, r0).value / r0 - math.exp(0.2 * math.pi)) < 1e-9


def test_eta_contracting():
    est = eta_from_oracle(blow_up(toy(F(-1, 20)), (1, 1)))
    assert est.classification is Classification.CONTRACTING
    assert abs(est.log_eta1 + 0.1 * math.pi) < 1e-6


def test_eta_identity():
    est = eta_from_oracle(blow_up(toy(0), (1, 1)))
    assert est.classification is Classification.IDENTITY


@pytest.mark.parametrize("a", [0, F(-1)])
def test_eta_septic(a):
    est = eta_from_oracle(blow_up(septic(a), (1, 1)))
    assert abs(est.log_eta1 - septic_log_eta1(float(a))) < 1e-2


def test_samples_shrink():
    est = eta_from_oracle(blow_up(toy(F(1, 10)), (1, 1)))
    rhos = [s.rho0 for s in est.samples]
    assert rhos == sorted(rhos, reverse=True) and len(rhos) >= 3


@pytest.mark.parametrize("lam", [0, F(1, 10), F(-1, 4)])
def test_g_of_r_toy(lam):
    Z = blow_up(toy(lam), (1, 1))
    g = g_of_r(Z, ClosedFormIIF(RHO, 1))
    assert abs(g.value - 2 * math.pi * float(lam)) < 1e-8


def test_g_of_r_sextic_center():
    X = sextic(1, F(1, 2), 0, 0)
    V = cartesian_iif_to_polar(SEXTIC_IIF, X, (1, 1))
    g = g_of_r(blow_up(X, (1, 1)), ClosedFormIIF(V, V.leading_exponent))
    assert abs(g.value) < 1e-8


def test_eta_from_V():
    assert eta_from_V(0.0, 1).outcome == "Center"
    d = eta_from_V(0.3, 1)
    assert d.outcome == "Focus" and abs(d.eta - math.exp(0.3)) < 1e-15
    assert eta_from_V(-0.2, 3).eta == -0.2
    with pytest.raises(ValueError):
        eta_from_V(0.1, 0)


def test_fundamental_equation():
    Z = blow_up(toy(F(1, 10)), (1, 1))
    assert fundamental_equation_check(Z, ClosedFormIIF(RHO, 1)) < 1e-6
    # rho^2 is not an inverse integrating factor here, and the check notices
    wrong = ClosedFormIIF(LaurentRho({2: TrigPoly.one()}), 2)
    assert fundamental_equation_check(Z, wrong) > 1e-1


def test_closed_form_verify():
    Z = blow_up(toy(F(1, 3)), (1, 1))
    assert ClosedFormIIF(RHO, 1).verify(Z)
    assert not ClosedFormIIF(LaurentRho({2: TrigPoly.one()}), 2).verify(Z)

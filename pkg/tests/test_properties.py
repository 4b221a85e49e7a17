"""Randomised invariants."""
from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from monodromic.cli import parse_expr, pretty_expr
from monodromic.cli.syntax import BinOp, Call, Neg, Num, Pow, Var
from monodromic.expansion import residual_coefficient
from monodromic.newton import Poly2, PolyVectorField
from monodromic.polar import LaurentRho, blow_up, pde_residual
from monodromic.residue_pv import pv_contour_integral, pv_quadrature
from monodromic.trigfun import RationalTrig, TrigPoly

small = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def trig(max_deg: int):
    return st.tuples(st.dictionaries(st.integers(0, max_deg), small, max_size=max_deg + 1),
                     st.dictionaries(st.integers(1, max_deg), small, max_size=max_deg)).map(
        lambda ab: TrigPoly.from_cos_sin(*ab))


def _l1(t: TrigPoly) -> float:
    return sum(abs(complex(c)) for c in t.coeffs.values())


@st.composite
def positive_trig(draw, max_deg: int = 3):
    # a constant that dominates the sum of |coefficients| keeps the denominator off zero on the circle
    t = draw(trig(max_deg))
    bump = F(draw(st.integers(1, 4)), 2)
    return t + TrigPoly.constant(F(math.ceil(_l1(t) * 4) + 1, 4) + bump)


@settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(num=trig(4), den=positive_trig())
def test_pv_residues_match_quadrature(num, den):
    W = RationalTrig(num, den)
    res = pv_contour_integral(W)
    quad = pv_quadrature(lambda p: np.real(W.evaluate(p)), [])
    scale = max(1.0, abs(res.value))
    assert abs(res.value.imag) < 1e-8 * scale
    assert abs(res.value.real - quad.value.real) < 1e-6 * scale


@st.composite
def perturbed_center(draw):
    x, y = Poly2.x(), Poly2.y()
    terms = [x * x, x * y, y * y, x**3, x * x * y, x * y * y, y**3]
    P, Q = -y, x + 0 * y
    for t in terms:
        P = P + t * draw(small)
        Q = Q + t * draw(small)
    return PolyVectorField(P, Q)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(X=perturbed_center(), v=st.lists(trig(2), min_size=1, max_size=3), m=st.integers(-2, 2))
def test_recursion_matches_pde_residual(X, v, m):
    Z = blow_up(X, (1, 1))
    V = LaurentRho({m + i: t for i, t in enumerate(v)})
    full = pde_residual(Z, V)
    for N in range(m, m + len(v) + 2):
        assert residual_coefficient(Z, V, N) == full[N]


names = st.sampled_from(["x", "y", "rho", "phi", "a", "mu", "b2"])


def exprs():
    base = st.one_of(st.integers(0, 50).map(Num), names.map(Var))

    def extend(sub):
        return st.one_of(
            sub.map(Neg),
            st.tuples(st.sampled_from("+-*/"), sub, sub).map(lambda t: BinOp(*t)),
            st.tuples(sub, st.integers(-3, 6)).map(lambda t: Pow(*t)),
            st.tuples(st.sampled_from(["cos", "sin"]), sub).map(lambda t: Call(*t)),
        )

    return st.recursive(base, extend, max_leaves=12)


@settings(max_examples=200, deadline=None)
@given(e=exprs())
def test_pretty_parse_round_trip(e):
    assert parse_expr(pretty_expr(e)) == e

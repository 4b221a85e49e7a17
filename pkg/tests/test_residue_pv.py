from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest

from monodromic.errors import MultiplePoleError, PVUndefined
from monodromic.residue_pv import CircleClass, Method, find_roots, pv_contour_integral, pv_quadrature, residue_simple
from monodromic.trigfun import LaurentPoly, RationalTrig, TrigPoly

S, C = TrigPoly.sin(), TrigPoly.cos()
XI_SEPTIC = RationalTrig(TrigPoly.constant(2) + TrigPoly.sin(2) * 3, TrigPoly.constant(5) + TrigPoly.cos(2) * 3)


def _classes(rs):
    return sorted((round(r.location.real, 9), round(r.location.imag, 9), r.circle_class.value, r.multiplicity)
                  for r in rs.roots)


def test_roots_z2_minus_1():
    rs = find_roots(LaurentPoly({2: 1, 0: -1}))
    assert _classes(rs) == [(-1.0, 0.0, "OnContour", 1), (1.0, 0.0, "OnContour", 1)]


def test_roots_factorable_quartic():
    rs = find_roots(LaurentPoly({4: 3, 2: 10, 0: 3}))
    inside = sorted(abs(r.location) for r in rs.by_class(CircleClass.INSIDE))
    outside = sorted(abs(r.location) for r in rs.by_class(CircleClass.OUTSIDE))
    assert np.allclose(inside, [1 / math.sqrt(3)] * 2) and np.allclose(outside, [math.sqrt(3)] * 2)
    assert all(abs(r.location.real) < 1e-12 for r in rs.roots)


def test_roots_z3_minus_z():
    rs = find_roots(LaurentPoly({3: 1, 1: -1}))
    assert rs.degree == 3
    assert [r.circle_class for r in rs.roots if abs(r.location) < 1e-12] == [CircleClass.INSIDE]
    assert len(rs.by_class(CircleClass.ON_CONTOUR)) == 2


def test_root_certification():
    p = LaurentPoly({0: 7, 1: -3, 3: 2, 5: 1, 8: -4})
    rs = find_roots(p)
    assert rs.residual < 1e-10 * 7


@pytest.mark.parametrize("N, D, z0, expected", [
    (LaurentPoly({0: 1}), LaurentPoly({1: 1, 0: -2}), 2, 1),
    (LaurentPoly({2: 1, 0: 1}), LaurentPoly({3: 1, 1: -1}), 0, -1),
    (LaurentPoly({2: 1, 0: 1}), LaurentPoly({3: 1, 1: -1}), 1, 1),
])
def test_residue_simple(N, D, z0, expected):
    assert abs(residue_simple(N, D, z0) - expected) < 1e-12


def test_residue_simple_rejects_double_pole():
    with pytest.raises(MultiplePoleError):
        residue_simple(LaurentPoly({0: 1}), LaurentPoly({2: 1, 1: -2, 0: 1}), 1)


def test_pv_constant():
    r = pv_contour_integral(RationalTrig(TrigPoly.one(), TrigPoly.one()))
    assert abs(r.value - 2 * math.pi) < 1e-12 and r.method is Method.RESIDUES


def test_pv_xi_septic():
    r = pv_contour_integral(XI_SEPTIC)
    assert abs(r.value.real - math.pi) < 1e-12 and abs(r.value.imag) < 1e-9


def test_pv_cot_is_zero():
    r = pv_contour_integral(RationalTrig(C, S))
    assert abs(r.value) < 1e-12
    assert sorted(round(a, 9) for a in r.on_contour_poles) == [0.0, round(math.pi, 9)]


def test_pv_undefined_for_double_pole_on_contour():
    with pytest.raises(PVUndefined):
        pv_contour_integral(RationalTrig(TrigPoly.one(), S * S))


def test_quadrature_xi_septic():
    f = lambda p: np.real(XI_SEPTIC.evaluate(p))  # noqa: E731
    assert abs(pv_quadrature(f, []).value.real - math.pi) < 1e-6


def test_quadrature_cot():
    r = pv_quadrature(lambda p: np.cos(p) / np.sin(p), [0.0, math.pi])
    assert abs(r.value.real) < 1e-6 and r.error_estimate >= 0


def test_quadrature_constant():
    assert abs(pv_quadrature(lambda p: np.ones_like(np.asarray(p, float)), []).value.real - 2 * math.pi) < 1e-9


def test_inside_residues_match_direct_sum():
    # z/((z - 1/2)(z + 1/3)) over phi: both poles inside the circle
    W = RationalTrig(LaurentPoly({1: 1}), LaurentPoly({2: 1, 1: F(-1, 6), 0: F(-1, 6)}))
    r = pv_contour_integral(W)
    z = np.exp(2j * np.pi * np.arange(4096) / 4096)
    direct = np.mean(z / ((z - 0.5) * (z + 1 / 3))) * 2 * np.pi
    assert abs(r.value - direct) < 1e-9

from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest

from monodromic.trigfun import (GaussRat, LaurentPoly, RationalTrig, SignClass, TrigPoly, laurent_to_trig,
                                sign_on_circle, trig_to_laurent, zeros_on_circle)

S, C = TrigPoly.sin(), TrigPoly.cos()
W5 = TrigPoly.constant(5) + TrigPoly.cos(2) * 3


def test_cos_substitution():
    assert trig_to_laurent(C) == LaurentPoly({1: F(1, 2), -1: F(1, 2)})


def test_five_plus_three_cos2():
    assert trig_to_laurent(W5) == LaurentPoly({-2: F(3, 2), 0: 5, 2: F(3, 2)})


def test_zero_maps_to_zero():
    assert trig_to_laurent(TrigPoly.zero()).is_zero()


def test_derivatives():
    assert (S * S).derivative() == TrigPoly.sin(2)
    assert W5.derivative() == TrigPoly.sin(2) * -6


def test_sin_squared_at_half_pi():
    assert (S * S).value_at_pi_multiple(1, 2) == GaussRat(1)
    assert math.isclose(float((S * S).evaluate(math.pi / 2)), 1.0)


def test_pythagoras_exact():
    assert S * S + C * C == TrigPoly.one()


@pytest.mark.parametrize("t, expected", [
    (S, [(0.0, 1), (math.pi, 1)]),
    (S * S, [(0.0, 2), (math.pi, 2)]),
    (W5, []),
])
def test_zeros_on_circle(t, expected):
    got = zeros_on_circle(t)
    assert len(got) == len(expected)
    for (a, k), (b, m) in zip(sorted(got), expected):
        assert abs(a - b) < 1e-9 and k == m


def test_zeros_on_circle_rejects_zero():
    with pytest.raises(ValueError):
        zeros_on_circle(TrigPoly.zero())


def test_sign_classes():
    cos4 = C ** 4 * (TrigPoly.constant(2) + S * S)
    assert sign_on_circle(cos4) is SignClass.NONNEG_WITH_ZEROS
    assert sign_on_circle(W5) is SignClass.POSITIVE
    assert sign_on_circle(S) is SignClass.SIGN_CHANGING
    assert sign_on_circle(-W5) is SignClass.NEGATIVE


def _random_trig(rng, deg):
    a = {k: F(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for k in range(deg + 1)}
    b = {k: F(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for k in range(1, deg + 1)}
    return TrigPoly.from_cos_sin(a, b)


def test_round_trip_and_homomorphism():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a, b = _random_trig(rng, 12), _random_trig(rng, 6)
        assert laurent_to_trig(trig_to_laurent(a)) == a
        assert trig_to_laurent(a * b) == trig_to_laurent(a) * trig_to_laurent(b)


def test_derivative_matches_finite_difference():
    rng = np.random.default_rng(2)
    t = _random_trig(rng, 8)
    phi = rng.uniform(0, 2 * np.pi, 64)
    h = 1e-5
    fd = (t.evaluate(phi + h) - t.evaluate(phi - h)) / (2 * h)
    scale = max(1.0, float(np.max(np.abs(t.derivative().evaluate(phi)))))
    assert np.max(np.abs(fd - t.derivative().evaluate(phi))) < 1e-8 * scale * 10


def test_real_evaluation_is_real():
    t = _random_trig(np.random.default_rng(3), 10)
    assert t.is_real()
    vals = t.evaluate_complex(np.linspace(0, 6, 50))
    assert np.max(np.abs(vals.imag)) < 1e-14 * max(1.0, float(np.max(np.abs(vals))))


def test_rational_trig_cancels_common_factor():
    W = RationalTrig(S * W5, W5 * C)
    num, den = W.z_form()
    # reduced denominator is the image of cos alone, up to a power of z and a scalar
    assert den.high - den.low == 2
    phi = np.array([0.3, 1.1])
    assert np.allclose(W.evaluate(phi), np.tan(phi))


def test_harmonic_cap():
    from monodromic.trigfun import HarmonicOverflow

    with pytest.raises(HarmonicOverflow):
        TrigPoly({10**6: 1})

"""Numbered acceptance criteria; each test prints one PASS/FAIL line (also repeated in the run summary)."""
from __future__ import annotations

import math
import time
from fractions import Fraction as F

import numpy as np
import sympy

from families import (SEXTIC_IIF, sextic, septic, septic_log_eta1, semi35, semi35_L1, semi35_particular_coeffs,
                      toy)
from monodromic import Config, Outcome, run_procedure
from monodromic.expansion import ObstructionKind, leading_scan, residual_coefficient, run_chain, xi_pq
from monodromic.expansion.lemma import Operator, leading_step, StepContext
from monodromic.expansion.recursion import ascending_operator
from monodromic.expansion.linegrid import LineGrid
from monodromic.polar import LaurentRho, blow_up, cartesian_iif_to_polar, pde_residual
from monodromic.poincare import ClosedFormIIF, eta_from_oracle, fundamental_equation_check
from monodromic.residue_pv import pv_contour_integral
from monodromic.trigfun import GaussRat, LaurentPoly, RationalTrig, TrigPoly

S, C = TrigPoly.sin(), TrigPoly.cos()
ANGLES = np.linspace(0.1, 2 * np.pi - 0.1, 32)


# 1 ------------------------------------------------------------------------

def test_c1_xi_septic(criterion):
    t0 = time.perf_counter()
    r = xi_pq(blow_up(septic(F(-31, 25)), (1, 1)))
    dt = time.perf_counter() - t0
    exact = r.residues.exact_over_pi == GaussRat(1)
    e_res = abs(r.residues.value.real - math.pi)
    e_quad = abs(r.quadrature.value.real - math.pi)
    ok = exact and e_res < 1e-12 and e_quad < 1e-6 and dt < 1
    criterion(1, ok, f"xi = pi*{r.residues.exact_over_pi}, |res-pi|={e_res:.1e}, |quad-pi|={e_quad:.1e}, {dt:.2f}s")


# 2 ------------------------------------------------------------------------

def test_c2_xi_semi35(criterion):
    t0 = time.perf_counter()
    coeffs = (F(1), F(-2), F(1, 3), F(-1, 2), F(2), F(1, 5), F(-3, 4))
    r = xi_pq(blow_up(semi35(*coeffs), (1, 1)))
    dt = time.perf_counter() - t0
    a, b = abs(r.residues.value), abs(r.quadrature.value)
    criterion(2, a < 1e-9 and b < 1e-9 and dt < 1, f"|xi| residues {a:.1e}, quadrature {b:.1e}, {dt:.2f}s")


# 3 ------------------------------------------------------------------------

def test_c3_f2_integral(criterion):
    # f2(z) dz written over phi: with z = e^{i phi}, dz = i z dphi
    t0 = time.perf_counter()
    z, one = LaurentPoly({1: 1}), LaurentPoly({0: 1})
    num = LaurentPoly({0: 15, 2: GaussRat(17, -4), 4: GaussRat(17, 4), 6: 15}) * GaussRat(0, -1) * z
    den = z * (z + one) * (z - one) * LaurentPoly({0: 3, 2: 1}) * LaurentPoly({0: 1, 2: 3})
    r = pv_contour_integral(RationalTrig(num, den))
    dt = time.perf_counter() - t0
    err = abs(r.value - math.pi)
    criterion(3, err < 1e-10 and dt < 1, f"PV = {r.value.real:.15f}, |PV-pi|={err:.1e}, {dt:.2f}s")


# 4 ------------------------------------------------------------------------

def test_c4_toy(criterion):
    t0 = time.perf_counter()
    centre = run_procedure(toy(0))
    ok = centre.verdict.outcome is Outcome.CENTER and centre.verdict.details.get("V") == str(
        LaurentRho({1: TrigPoly.one()}))
    worst = 0.0
    for lam in (F(1, 10), F(-1, 10), F(1, 2), F(-1, 2)):
        res = run_procedure(toy(lam))
        ok &= res.verdict.outcome is Outcome.FOCUS
        worst = max(worst, abs(res.verdict.details["g"] - 2 * math.pi * float(lam)))
    dt = time.perf_counter() - t0
    ok &= worst < 1e-8 and dt < 5
    criterion(4, ok, f"lambda=0 {centre.verdict.outcome.value}; max |log eta1 - 2 pi lambda| = {worst:.1e}, {dt:.2f}s")


# 5 ------------------------------------------------------------------------

def test_c5_septic_focus(criterion):
    t0 = time.perf_counter()
    X = septic(F(-31, 25))
    res = run_procedure(X)
    ob = res.verdict.details.get("obstruction") or {}
    est = eta_from_oracle(blow_up(X, (1, 1)))
    dt = time.perf_counter() - t0
    ok = (res.verdict.outcome is Outcome.FOCUS and ob.get("index") == 3
          and ob.get("kind") == ObstructionKind.ZETA_NONZERO.value and ob.get("paths_agree")
          and abs(est.log_eta1) < 1e-2 and dt < 60)
    criterion(5, ok, f"{res.verdict.outcome.value} via {ob.get('kind')}[{ob.get('index')}] = {ob.get('value'):.4f}, "
                     f"oracle log eta1 = {est.log_eta1:.1e}, {dt:.1f}s")


# 6 ------------------------------------------------------------------------

def test_c6_septic_oracle(criterion):
    t0 = time.perf_counter()
    errs = []
    for a in (F(0), F(1, 2), F(-1)):
        est = eta_from_oracle(blow_up(septic(a), (1, 1)))
        errs.append(abs(est.log_eta1 - septic_log_eta1(float(a))))
    dt = time.perf_counter() - t0
    criterion(6, max(errs) < 1e-2 and dt < 120, f"errors {', '.join(f'{e:.1e}' for e in errs)}, {dt:.1f}s")


# 7 ------------------------------------------------------------------------

def _admissible_pairs(rng, n):
    out = []
    while len(out) < n:
        a21 = F(-int(rng.integers(4, 12)), 4)
        bound = math.sqrt(-4 * float(a21))
        a12 = F(int(rng.integers(-9, 10)), 10) * F(int(bound * 10) - 1, 10)
        out.append((a12, a21))
    return out


def _semi_vm_errors(rng):
    """Max pointwise error of v_m against the stated form and against the same form with cos 2phi negated."""
    literal = corrected = 0.0
    for a12, a21 in _admissible_pairs(rng, 5):
        b = [F(int(rng.integers(-6, 7)), int(rng.integers(1, 4))) for _ in range(5)]
        Z = blow_up(semi35(a12, a21, *b), (1, 1))
        for m in (1, 3, 5):
            v = start_vm(Z, m)
            s = np.sin(ANGLES)
            for sign, acc in ((1, "literal"), (-1, "corrected")):
                ref = s ** (m + 1) * (1 - float(a21) + sign * (1 + float(a21)) * np.cos(2 * ANGLES)
                                      - float(a12) * np.sin(2 * ANGLES))
                k = np.dot(v, ref) / np.dot(ref, ref)
                err = float(np.max(np.abs(v - k * ref)) / np.max(np.abs(v)))
                if acc == "literal":
                    literal = max(literal, err)
                else:
                    corrected = max(corrected, err)
    return literal, corrected


def start_vm(Z, m):
    lead, lin = ascending_operator(Z, m)
    out = leading_step(Operator(lead, lin, LineGrid.for_lead(lead)), m, StepContext())
    return out.coefficient.evaluate(ANGLES)


def _jump_correlation(rng):
    meas, formula = [], []
    for k, (a12, a21) in enumerate(_admissible_pairs(rng, 20)):
        b = [F(int(rng.integers(-6, 7)), int(rng.integers(1, 4))) for _ in range(5)]
        m = 1 if k % 2 == 0 else 5
        st = run_chain(blow_up(semi35(a12, a21, *b), (1, 1)), m, Config(max_order=2))
        L1 = float(semi35_L1(a12, a21, *b))
        meas.append(st.last_jump(m + 2))
        formula.append(2 * math.pi * (m - 3) * L1 / (float(a21) ** 5 * math.sqrt(-float(a12**2 + 4 * a21))))
    return float(np.corrcoef(meas, formula)[0, 1])


def test_c7_semi35(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    literal, corrected = _semi_vm_errors(rng)
    corr = _jump_correlation(rng)
    a = sympy.Symbol("a")
    L1 = sympy.expand(semi35_L1(*(sympy.nsimplify(c) for c in semi35_particular_coeffs(a))))
    l1_ok = sympy.expand(L1 - 8 * (3 + 2 * a)) == 0
    dt = time.perf_counter() - t0
    ok = literal < 1e-8 and corr > 0.999 and l1_ok and dt < 120
    criterion(7, ok, f"v_m vs stated form {literal:.1e} (with -(1+a21)cos2phi: {corrected:.1e}); "
                     f"jump correlation {corr:.6f}; L1 = {L1}; {dt:.1f}s")


# 8 ------------------------------------------------------------------------

SEXTIC_SAMPLES = [(1, F(1, 2), F(1, 3), F(1, 5)), (2, 1, F(-1, 2), F(1, 4)), (1, -1, F(1, 5), F(-1, 3))]


def test_c8_sextic_descending(criterion):
    t0 = time.perf_counter()
    only5 = cos6 = True
    v4_obstructed = True
    v4_sizes = []
    for p in SEXTIC_SAMPLES:
        Z = blow_up(sextic(*p), (1, 1))
        scan = leading_scan(Z, (-8, 8), descending=True)
        only5 &= [m for m, ok in scan.items() if ok] == [5]
        st = run_chain(Z, 5, Config(max_order=1), descending=True)
        v5 = st.coefficients[5].evaluate(ANGLES)
        ref = np.cos(ANGLES) ** 6
        k = np.dot(v5, ref) / np.dot(ref, ref)
        cos6 &= float(np.max(np.abs(v5 - k * ref))) < 1e-8
        v4_obstructed &= any(o.index == 4 for o in st.obstructions)
        if 4 in st.coefficients:
            v4_sizes.append(float(np.max(np.abs(st.coefficients[4].evaluate(ANGLES)))))
    dt = time.perf_counter() - t0
    ok = only5 and cos6 and v4_obstructed and dt < 60
    criterion(8, ok, f"only m=5 admissible: {only5}; v5 = cos^6: {cos6}; obstruction at v4: {v4_obstructed} "
                     f"(max|v4| = {max(v4_sizes, default=float('nan')):.1e}); {dt:.1f}s")


# 9 ------------------------------------------------------------------------

def test_c9_sextic_transform(criterion):
    ok = True
    for p in SEXTIC_SAMPLES + [(1, F(1, 2), 0, 0)]:
        X = sextic(*p)
        Z = blow_up(X, (1, 1))
        V = cartesian_iif_to_polar(SEXTIC_IIF, X, (1, 1))
        m = V.leading_exponent
        ok &= m == 1
        ok &= all(residual_coefficient(Z, V, N).is_zero() for N in range(m, m + 6))
        ok &= pde_residual(Z, V).is_zero()
    criterion(9, ok, "leading exponent 1 and exact zero residual through 6 orders on 4 parameter samples")


# 10 -----------------------------------------------------------------------

def test_c10_properties(criterion):
    import test_properties as props

    failures = []
    for name in ("test_pv_residues_match_quadrature", "test_recursion_matches_pde_residual",
                 "test_pretty_parse_round_trip"):
        try:
            getattr(props, name)()
        except AssertionError as exc:
            failures.append(f"{name}: {exc}")
    rho = LaurentRho({1: TrigPoly.one()})
    fixtures = [(blow_up(toy(lam), (1, 1)), ClosedFormIIF(rho, 1)) for lam in (F(0), F(1, 10), F(-1, 4))]
    X = sextic(1, F(1, 2), F(1, 3), F(1, 5))
    fixtures.append((blow_up(X, (1, 1)), ClosedFormIIF(cartesian_iif_to_polar(SEXTIC_IIF, X, (1, 1)), 1)))
    worst = 0.0
    for Z, V in fixtures:
        assert V.verify(Z)
        worst = max(worst, fundamental_equation_check(Z, V))
    control = fundamental_equation_check(blow_up(toy(F(1, 10)), (1, 1)),
                                         ClosedFormIIF(LaurentRho({2: TrigPoly.one()}), 2))
    ok = not failures and worst < 1e-6 and control > 1e-1
    criterion(10, ok, f"property suites {'ok' if not failures else failures}; fundamental equation "
                      f"violation {worst:.1e}, negative control {control:.2f}")

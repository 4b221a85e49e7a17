"""Polynomial roots, residues and principal values on the unit circle.

Two independent routes to PV integrals of rational trig functions over [0, 2 pi]:
residues in z = e^{i phi} (half weight for poles on the circle) and a symmetric-excision
quadrature in the angle variable with Richardson extrapolation.
"""
from __future__ import annotations

import enum
from fractions import Fraction
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import MultiplePoleError, PVDiverges, PVUndefined, RootFindingFailure
from .trigfun import (
    ONE,
    ZERO,
    GaussRat,
    LaurentPoly,
    RationalTrig,
    TrigPoly,
    pdivmod,
    peval,
    pinv_mod,
    pmul,
    ppow,
    ptrim,
    squarefree,
)

log = logging.getLogger(__name__)

TAU_CIRCLE = 1e-10
TAU_CLUSTER = 1e-8
DEGREE_CAP = 1100


class CircleClass(str, enum.Enum):
    INSIDE = "Inside"
    ON_CONTOUR = "OnContour"
    OUTSIDE = "Outside"


@dataclass(frozen=True)
class Root:
    location: complex
    multiplicity: int
    circle_class: CircleClass


@dataclass
class RootSet:
    roots: list[Root]
    residual: float = 0.0
    borderline: bool = False

    def by_class(self, cls: CircleClass) -> list[Root]:
        return [r for r in self.roots if r.circle_class is cls]

    @property
    def degree(self) -> int:
        return sum(r.multiplicity for r in self.roots)


class Method(str, enum.Enum):
    RESIDUES = "Residues"
    QUADRATURE = "Quadrature"


@dataclass
class PVResult:
    value: complex
    error_estimate: float
    method: Method
    on_contour_poles: list[float] = field(default_factory=list)
    exact_over_pi: GaussRat | None = None  # value = pi * exact_over_pi when known exactly


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------


def _aberth(coeffs: np.ndarray, maxit: int = 500) -> np.ndarray:
    """All roots of sum coeffs[k] z^k (complex, nonzero leading coefficient)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    n = len(c) - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return np.array([-c[0] / c[1]])
    a = c / c[-1]
    # Initial guesses on a circle of Fujiwara-bound radius with an irrational twist.
    radius = 2 * max(abs(a[k]) ** (1.0 / (n - k)) for k in range(n)) if np.any(a[:-1]) else 1.0
    radius = max(radius, 1e-3)
    z = radius * 0.5 * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    poly = np.poly1d(a[::-1])
    dpoly = poly.deriv()
    for _ in range(maxit):
        pv = poly(z)
        dp = dpoly(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            s = np.sum(np.where(np.eye(n, dtype=bool), 0.0, 1.0 / diff), axis=1)
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= 1e-15 * np.maximum(1.0, np.abs(z))):
            break
    return z


def _polish(dense: list[GaussRat], z: np.ndarray) -> np.ndarray:
    c = [complex(x) for x in dense]
    d = [k * c[k] for k in range(1, len(c))]
    out = []
    for r in z:
        pv = np.polyval(c[::-1], r)
        dv = np.polyval(d[::-1], r) if d else 0
        if dv != 0:
            step = pv / dv
            if abs(step) < 1e-6 * max(1.0, abs(r)):
                r = r - step
        out.append(r)
    return np.array(out)


def _classify(z: complex, tau_circle: float) -> tuple[CircleClass, bool]:
    m = abs(z)
    if abs(m - 1) <= tau_circle:
        return CircleClass.ON_CONTOUR, False
    border = abs(m - 1) <= 10 * tau_circle
    return (CircleClass.INSIDE if m < 1 else CircleClass.OUTSIDE), border


def _snap_unit(z: complex) -> complex:
    return z / abs(z)


def find_roots(p: LaurentPoly | Sequence[GaussRat], *, tau_circle: float = TAU_CIRCLE,
               tau_cluster: float = TAU_CLUSTER) -> RootSet:
    """Roots of the polynomial part of p, with multiplicities from an exact squarefree split.

    A plain sequence is read as ascending dense coefficients (a polynomial); z = 0 is then
    reported as a root of the appropriate multiplicity.
    """
    if isinstance(p, LaurentPoly):
        lo, dense = p.dense()
        zero_mult = max(lo, 0)
    else:
        dense = ptrim([GaussRat.coerce(x) for x in p])
        lo = 0
        zero_mult = 0
        while dense and not dense[0]:
            dense = dense[1:]
            zero_mult += 1
    if not dense:
        raise ValueError("zero polynomial has no root set")
    if len(dense) - 1 > DEGREE_CAP:
        raise RootFindingFailure(f"degree {len(dense) - 1} exceeds cap {DEGREE_CAP}")
    roots: list[Root] = []
    if zero_mult:
        roots.append(Root(0j, zero_mult, CircleClass.INSIDE))
    borderline = False
    residual = 0.0
    for fac, mult in squarefree(dense):
        zs = _polish(fac, _aberth(np.array([complex(c) for c in fac])))
        fscale = max(abs(complex(c)) for c in fac)
        for z in zs:
            res = abs(peval(fac, z)) / fscale
            residual = max(residual, float(res))
            cls, border = _classify(z, tau_circle)
            borderline |= border
            if cls is CircleClass.ON_CONTOUR:
                z = _snap_unit(z)
            roots.append(Root(complex(z), mult, cls))
    # merge clusters (factors are coprime, so this only guards against numerical duplicates)
    merged: list[Root] = []
    for r in roots:
        for idx, q in enumerate(merged):
            if abs(q.location - r.location) < tau_cluster:
                merged[idx] = Root(q.location, q.multiplicity + r.multiplicity, q.circle_class)
                break
        else:
            merged.append(r)
    if residual > 1e-6:
        raise RootFindingFailure(f"root residual {residual:.2e} too large")
    return RootSet(merged, residual, borderline)


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------


def residue_simple(N: LaurentPoly, D: LaurentPoly, z0: complex, *, tol: float = 1e-8) -> complex:
    """Residue N(z0)/D'(z0) of N/D at a simple root z0 of D."""
    dD = D.derivative()
    dv = complex(dD(z0))
    scale = max(1.0, max((abs(complex(c)) for c in D.coeffs.values()), default=1.0))
    if abs(dv) < tol * scale:
        raise MultiplePoleError(f"pole at {z0} is not simple")
    return complex(N(z0)) / dv


def _numeric_residue(N: LaurentPoly, M: LaurentPoly, z0: complex, mult: int, others: list[complex]) -> complex:
    if mult == 1:
        return complex(N(z0)) / complex(M.derivative()(z0))
    # circle small enough to exclude other roots
    gap = min((abs(z0 - w) for w in others if w != z0), default=1.0)
    r = 0.3 * gap
    n = 256
    th = 2 * np.pi * np.arange(n) / n
    pts = z0 + r * np.exp(1j * th)
    vals = N(pts) / M(pts) * (r * np.exp(1j * th))
    return complex(np.mean(vals))


def _exact_class_sum(Nd: list[GaussRat], Md: list[GaussRat], fac: list[GaussRat], mult: int,
                     locs: list[complex]) -> GaussRat | None:
    """Sum of residues of N/M over the roots locs of fac (multiplicity mult in M), exactly.

    The monic factor q = prod (z - a) over locs is rounded to Q(i) and checked by exact
    division; then the class sum is [z^{k deg q - 1}] (N h^{-1} mod q^k) with M = lc q^k h.
    """
    if not locs:
        return GaussRat(0)
    qn = np.poly(np.array(locs))[::-1]  # ascending, monic
    q = ptrim([GaussRat.from_complex(complex(c)) for c in qn])
    if not q or q[-1] != ONE:
        return None
    quo, rem = pdivmod(fac, q)
    if rem:
        return None
    qk = ppow(q, mult)
    h, rem = pdivmod(Md, qk)
    if rem:
        return None
    try:
        hinv = pinv_mod(h, qk)
    except ValueError:
        return None
    a = pdivmod(pmul(Nd, hinv), qk)[1]
    idx = mult * (len(q) - 1) - 1
    return a[idx] if idx < len(a) else GaussRat(0)


@dataclass
class PoleData:
    """Per-pole residues of f(z) = N/M in z, with angle for on-circle poles."""

    location: complex
    multiplicity: int
    circle_class: CircleClass
    residue: complex

    @property
    def angle(self) -> float:
        return math.atan2(self.location.imag, self.location.real) % (2 * math.pi)


def z_poles(W: RationalTrig, *, tau_circle: float = TAU_CIRCLE) -> tuple[list[PoleData], RootSet, LaurentPoly, LaurentPoly]:
    N, M = W.z_form()
    rs = find_roots(M, tau_circle=tau_circle)
    locs = [r.location for r in rs.roots]
    out = []
    for r in rs.roots:
        res = _numeric_residue(N, M, r.location, r.multiplicity, locs)
        out.append(PoleData(r.location, r.multiplicity, r.circle_class, res))
    return out, rs, N, M


def phi_residues(W: RationalTrig, *, tau_circle: float = TAU_CIRCLE) -> list[tuple[float, complex]]:
    """Residues of W in the angle variable at its real poles: Res_phi W = Res_z W/(iz)."""
    poles, _, _, _ = z_poles(W, tau_circle=tau_circle)
    return [(p.angle, p.residue) for p in poles if p.circle_class is CircleClass.ON_CONTOUR]


def pv_contour_integral(W: RationalTrig, *, finite_part: bool = False, tau_circle: float = TAU_CIRCLE,
                        exact: bool = True) -> PVResult:
    """PV (or Hadamard finite part) of W over one period via residues in z."""
    N, M = W.z_form()
    _, Nd = N.dense()
    Mlo, Md = M.dense()
    assert Mlo >= 0 and N.low >= 0
    Md = [ZERO] * Mlo + Md
    Nd = [ZERO] * N.low + Nd
    rs = find_roots(M, tau_circle=tau_circle)
    if rs.borderline:
        log.warning("root near the unit circle; falling back to quadrature")
        poles = [math.atan2(r.location.imag, r.location.real) % (2 * math.pi)
                 for r in rs.roots if r.circle_class is CircleClass.ON_CONTOUR]
        return pv_quadrature(W.evaluate, poles, finite_part=finite_part)
    on = rs.by_class(CircleClass.ON_CONTOUR)
    if not finite_part and any(r.multiplicity > 1 for r in on):
        raise PVUndefined("non-simple pole on the unit circle")
    on_angles = sorted(math.atan2(r.location.imag, r.location.real) % (2 * math.pi) for r in on)

    # exact class sums: roots of each squarefree factor grouped by circle class
    exact_total: GaussRat | None = GaussRat(0) if exact else None
    numeric_total = 0j
    locs_all = [r.location for r in rs.roots]
    zero_mult = next((r.multiplicity for r in rs.roots if r.location == 0j), 0)
    sqf = squarefree(ptrim(Md[zero_mult:])) if zero_mult else squarefree(Md)
    groups: list[tuple[list[GaussRat], int, CircleClass, list[complex]]] = []
    if zero_mult:
        groups.append(([ZERO, ONE], zero_mult, CircleClass.INSIDE, [0j]))
    for fac, mult in sqf:
        zs = _polish(fac, _aberth(np.array([complex(c) for c in fac])))
        for cls in (CircleClass.INSIDE, CircleClass.ON_CONTOUR):
            sel = [complex(_snap_unit(z)) if cls is CircleClass.ON_CONTOUR else complex(z)
                   for z in zs if _classify(z, tau_circle)[0] is cls]
            if sel:
                groups.append((fac, mult, cls, sel))
    for fac, mult, cls, sel in groups:
        weight = Fraction(1) if cls is CircleClass.INSIDE else Fraction(1, 2)
        num = sum(_numeric_residue(N, M, z, mult, locs_all) for z in sel)
        numeric_total += float(weight) * num
        if exact_total is not None:
            s = _exact_class_sum(Nd, Md, fac, mult, sel)
            if s is None:
                exact_total = None
            else:
                exact_total = exact_total + s * GaussRat(weight)
    value = 2j * math.pi * numeric_total
    exact_over_pi = None
    if exact_total is not None:
        exact_over_pi = GaussRat(0, 2) * exact_total
        ev = complex(exact_over_pi) * math.pi
        if abs(ev - value) > 1e-6 * max(1.0, abs(value)):
            log.debug("exact/numeric residue mismatch %s vs %s", ev, value)
            exact_over_pi = None
        else:
            value = ev
    if W.real:
        if abs(value.imag) > 1e-6 * max(1.0, abs(value)):
            raise RootFindingFailure(f"real integrand produced imaginary PV {value}")
        value = complex(value.real, 0.0)
        if exact_over_pi is not None:
            exact_over_pi = GaussRat(exact_over_pi.re)
    err = 0.0 if exact_over_pi is not None else 1e-12 * max(1.0, abs(value)) + rs.residual
    return PVResult(value, float(err), Method.RESIDUES, on_angles, exact_over_pi)


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------


def _quad(f: Callable, a: float, b: float) -> float:
    """Integral of a vectorized f over [a, b]; QUADPACK is the fallback if tanh-sinh does not converge."""
    if b <= a:
        return 0.0
    res = integrate.tanhsinh(f, a, b, atol=1e-14, rtol=1e-13)
    if res.success:
        return float(res.integral)
    # tolerance warnings are expected here; the excision fit carries the error estimate
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(lambda t: float(f(t)), a, b, limit=400, epsabs=1e-14, epsrel=1e-13)
    return float(val)


def pv_quadrature(W: Callable[[float], float], poles: Sequence[float], *, finite_part: bool = False,
                  max_order: int = 2, tol: float = 1e-6, halfwidth: float | None = None) -> PVResult:
    """Symmetric-excision PV (or finite part) over [0, 2 pi], independent of residues.

    W must accept arrays of angles.
    """
    two_pi = 2 * math.pi
    poles = sorted({p % two_pi for p in poles})
    f = lambda t: np.real(W(t))  # noqa: E731
    if not poles:
        # smooth periodic integrand: trapezoid converges geometrically; quad as a check
        n = 2048
        th = two_pi * np.arange(n) / n
        v1 = float(np.mean(np.real(W(th)))) * two_pi
        th2 = two_pi * np.arange(2 * n) / (2 * n)
        v2 = float(np.mean(np.real(W(th2)))) * two_pi
        err = abs(v1 - v2)
        if err > tol:
            v2 = _quad(f, 0.0, two_pi)
            err = abs(v1 - v2)
        return PVResult(complex(v2), float(err), Method.QUADRATURE, [])
    gaps = [((poles[(i + 1) % len(poles)] - poles[i]) % two_pi) or two_pi for i in range(len(poles))]
    h = halfwidth or 0.4 * min(gaps)
    h = min(h, 0.5)
    total = 0.0
    # outer pieces between neighborhoods
    for i, p in enumerate(poles):
        a = p + h
        b = p + gaps[i] - h
        total += _quad(lambda t: f(t % two_pi), a, b)
    # folded neighborhoods with Richardson in the excision radius
    deltas = h * np.array([2.0 ** (-k) for k in range(4, 14)])
    err_total = 0.0
    for p in poles:
        g = lambda t: f(p + t) + f(p - t)  # noqa: E731
        vals = []
        # integrate [delta_k, h] cumulatively
        acc = _quad(g, deltas[0], h)
        vals.append(acc)
        for k in range(1, len(deltas)):
            acc += _quad(g, deltas[k], deltas[k - 1])
            vals.append(acc)
        vals = np.array(vals)
        if finite_part:
            powers = [-k for k in range(max_order - 1, 0, -1)] + [0, 1, 2, 3]
        else:
            powers = [0, 1, 2, 3]
        A = np.array([[d ** e for e in powers] for d in deltas])
        fits = []
        for start in (0, 2):
            sol, *_ = np.linalg.lstsq(A[start:], vals[start:], rcond=None)
            fits.append(sol[powers.index(0)])
        est = fits[-1]
        err = abs(fits[0] - fits[1])
        if not finite_part:
            # plain PV must converge without negative powers
            err = max(err, abs(vals[-1] - est) * 1e-3)
        total += est
        err_total += err
    if err_total > tol * max(1.0, abs(total)) * 100 or not math.isfinite(total):
        raise PVDiverges(f"principal value did not converge (error estimate {err_total:.2e})")
    return PVResult(complex(total), float(err_total), Method.QUADRATURE, list(poles))

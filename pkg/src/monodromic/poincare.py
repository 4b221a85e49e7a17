"""Numeric return map of the blown-up field and invariants of inverse integrating factors.

The orbit through (0, rho0) solves d rho/d phi = R/Theta; integrating u = log rho keeps the
small-rho regime well scaled.  Near a characteristic direction the right-hand side has a
narrow spike, so arcs are split at characteristic angles and integrated in a coordinate
local to the nearest one.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath
import numpy as np
from scipy import integrate

from .errors import RDependence, StepLimit, ThetaVanishedOnOrbit
from .polar import LaurentRho, PolarField, characteristic_directions, pde_residual
from .residue_pv import pv_quadrature

log = logging.getLogger(__name__)

THETA_FLOOR = 1e-14


@dataclass(frozen=True)
class ReturnSample:
    rho0: float
    value: float
    error_estimate: float
    steps: int


class Classification(str, enum.Enum):
    CONTRACTING = "Contracting"
    EXPANDING = "Expanding"
    IDENTITY = "IdentityToTolerance"
    UNKNOWN = "Unknown"


@dataclass
class PoincareEstimate:
    log_eta1: float
    uncertainty: float
    classification: Classification
    samples: list[ReturnSample] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "log_eta1": self.log_eta1,
            "uncertainty": self.uncertainty,
            "classification": self.classification.value,
            "samples": [{"rho0": s.rho0, "value": s.value, "error_estimate": s.error_estimate} for s in self.samples],
        }


def scalar_evaluator(Z: PolarField) -> Callable[[float, float], tuple[float, float]]:
    """Fast float evaluator (phi, rho) -> (Theta, R) for use inside ODE right-hand sides."""
    def table(polys):
        out = []
        for t in polys:
            a0, a, b = t.cos_sin()
            out.append((float(a0.re), [(k, float(x.re)) for k, x in a.items()],
                        [(k, float(x.re)) for k, x in b.items()]))
        return out

    gt, rt = table(Z.G), table(Z.R)
    kmax = max([k for _, a, b in gt + rt for k, _ in a + b] + [1])

    def ev(phi: float, rho: float) -> tuple[float, float]:
        c1, s1 = math.cos(phi), math.sin(phi)
        cos_k, sin_k = [1.0, c1], [0.0, s1]
        for _ in range(2, kmax + 1):
            cos_k.append(cos_k[-1] * c1 - sin_k[-1] * s1)
            sin_k.append(sin_k[-1] * c1 + cos_k[-2] * s1)

        def series(tab):
            acc, pw = 0.0, 1.0
            for c0, a, b in tab:
                v = c0
                for k, x in a:
                    v += x * cos_k[k]
                for k, x in b:
                    v += x * sin_k[k]
                acc += v * pw
                pw *= rho
            return acc

        return series(gt), series(rt)

    return ev


def local_evaluator(Z: PolarField, center: float, mult: int, *, order: int = 16):
    """(delta, rho) -> (Theta, R) at phi = center + delta from Taylor data at a zero of G_0.

    Avoids the cancellation in G_0 ~ delta^mult that a direct trig evaluation suffers.
    """
    def taylor(polys, zero_below: int):
        rows = []
        for j, t in enumerate(polys):
            coefs, d, fact = [], t, 1.0
            for n in range(order + 1):
                v = float(np.real(d.evaluate_complex(np.array([center]))[0])) / fact
                coefs.append(0.0 if (j == 0 and n < zero_below) else v)
                d = d.derivative()
                fact *= n + 1
            rows.append(coefs[::-1])
        return rows

    gt, rt = taylor(Z.G, mult), taylor(Z.R, 0)

    def ev(delta: float, rho: float) -> tuple[float, float]:
        def series(rows):
            acc, pw = 0.0, 1.0
            for r in rows:
                v = 0.0
                for c in r:
                    v = v * delta + c
                acc += v * pw
                pw *= rho
            return acc

        return series(gt), series(rt)

    return ev


LOCAL_RADIUS = 0.1


class _Segments:
    """Integration plan: halves of arcs between breakpoints, each in a coordinate local to one end."""

    def __init__(self, Z: PolarField):
        two_pi = 2 * math.pi
        omega = {round(a % two_pi, 15): k for a, k in characteristic_directions(Z)}
        pts = sorted(set(omega) | {0.0})
        pts.append(two_pi)
        glob = scalar_evaluator(Z)
        self.glob = glob
        self.local = {a: local_evaluator(Z, a, k) for a, k in omega.items()}
        if 0.0 in self.local:
            self.local[two_pi] = local_evaluator(Z, two_pi, omega[0.0])
        self.halves = []
        for a, b in zip(pts, pts[1:]):
            mid = (b - a) / 2
            self.halves.append((a, 0.0, mid))
            self.halves.append((b, -mid, 0.0))

    def evaluator(self, center: float):
        loc = self.local.get(center)
        glob = self.glob

        def ev(delta, rho):
            if loc is not None and abs(delta) < LOCAL_RADIUS:
                return loc(delta, rho)
            return glob(center + delta, rho)

        return ev


def return_map(Z: PolarField, rho0: float, *, rtol: float = 1e-11, atol: float = 1e-14,
               max_steps: int = 200_000, _plan: _Segments | None = None) -> ReturnSample:
    """Pi(rho0) = Phi(2 pi; rho0) for d rho/d phi = R/Theta.

    The orbit (phi, u = log rho) is followed with a normalized-speed parameter s,
    d(phi, u)/ds = (Theta, R/rho)/|(Theta, R/rho)|, which stays smooth where Theta is tiny.
    """
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    plan = _plan or _Segments(Z)
    u = math.log(rho0)
    steps = 0
    err = 0.0
    for center, d0, d1 in plan.halves:
        if d1 <= d0:
            continue
        ev = plan.evaluator(center)

        def rhs(s, y, ev=ev, center=center):
            rho = math.exp(y[1])
            th, rr = ev(y[0], rho)
            g = rr / rho
            if th < THETA_FLOOR * rho:
                raise ThetaVanishedOnOrbit(f"Theta = {th:.3e} at phi = {center + y[0]:.6f}, rho = {rho:.3e}")
            nrm = math.hypot(th, g)
            return [th / nrm, g / nrm]

        def hit(s, y, d1=d1):
            return y[0] - d1
        hit.terminal = True
        hit.direction = 1
        span = 4 * (d1 - d0) + 200.0
        first = min(1e-3, (d1 - d0) / 10, rho0**2)
        sol = integrate.solve_ivp(rhs, (0.0, span), [d0, u], method="DOP853", rtol=rtol, atol=atol,
                                  first_step=first, events=hit)
        if sol.status == -1:
            raise StepLimit(sol.message)
        if not sol.t_events[0].size:
            raise StepLimit(f"orbit did not reach phi = {center + d1:.6f} (log rho = {sol.y[1, -1]:.3f})")
        steps += sol.t.size
        if steps > max_steps:
            raise StepLimit(f"more than {max_steps} steps")
        u = float(sol.y_events[0][0][1])
        err += rtol * max(1.0, abs(u))
    value = math.exp(u)
    return ReturnSample(rho0, value, value * err, steps)


def eta_from_oracle(Z: PolarField, *, rho_max: float = 1e-2, count: int = 6, tol: float = 1e-6) -> PoincareEstimate:
    """Extrapolate log(Pi(rho0)/rho0) to rho0 -> 0 along rho0 = rho_max 2^-k."""
    plan = _Segments(Z)
    samples = []
    for k in range(count):
        r0 = rho_max * 2.0**-k
        try:
            samples.append(return_map(Z, r0, _plan=plan))
        except (ThetaVanishedOnOrbit, StepLimit) as exc:
            log.info("return map failed at rho0=%g: %s", r0, exc)
    if len(samples) < 4:
        return PoincareEstimate(float("nan"), float("inf"), Classification.UNKNOWN, samples)
    rho = np.array([s.rho0 for s in samples])
    y = np.log(np.array([s.value for s in samples]) / rho)
    fits = []
    for deg in (2, 3):
        A = np.vander(rho, deg + 1, increasing=True)
        coef, *_ = np.linalg.lstsq(A, y, rcond=None)
        fits.append(float(coef[0]))
    est = fits[-1]
    unc = abs(fits[0] - fits[1]) + 1e-12
    if abs(est) <= max(unc, tol):
        cls = Classification.IDENTITY
    elif est < 0:
        cls = Classification.CONTRACTING
    else:
        cls = Classification.EXPANDING
    return PoincareEstimate(est, unc, cls, samples)


@dataclass
class ClosedFormIIF:
    """An inverse integrating factor V(phi, rho) with declared leading exponent m."""

    V: LaurentRho | Callable
    m: int
    source: str = ""

    def __call__(self, phi, rho):
        return self.V(phi, rho)

    def exact_residual(self, Z: PolarField) -> LaurentRho | None:
        return pde_residual(Z, self.V) if isinstance(self.V, LaurentRho) else None

    def verify(self, Z: PolarField, *, tol: float = 1e-8, n: int = 64) -> bool:
        """Exact check for Laurent data; pointwise residual check otherwise."""
        res = self.exact_residual(Z)
        if res is not None:
            return res.is_zero()
        ev = Z.evaluator()
        rng = np.random.default_rng(0)
        phi = rng.uniform(0, 2 * np.pi, n)
        rho = 10 ** rng.uniform(-3, -1.5, n)
        h = 1e-6
        V = np.array([self(p, r) for p, r in zip(phi, rho)])
        Vp = np.array([(self(p + h, r) - self(p - h, r)) / (2 * h) for p, r in zip(phi, rho)])
        Vr = np.array([(self(p, r * (1 + h)) - self(p, r * (1 - h))) / (2 * h * r) for p, r in zip(phi, rho)])
        th, rr = ev(phi, rho)
        th_p = (ev(phi + h, rho)[0] - ev(phi - h, rho)[0]) / (2 * h)
        r_r = (ev(phi, rho * (1 + h))[1] - ev(phi, rho * (1 - h))[1]) / (2 * h * rho)
        res = th * Vp + rr * Vr - V * (th_p + r_r)
        scale = np.abs(th * Vp) + np.abs(rr * Vr) + np.abs(V * (th_p + r_r)) + 1e-300
        return bool(np.max(np.abs(res) / scale) < tol * 1e3)


@dataclass
class GValue:
    value: float
    spread: float
    per_radius: dict[float, float]
    excluded: list[float]


def _v_zero_angles(V: Callable, r: float, n: int = 4096) -> list[float]:
    phi = 2 * np.pi * (np.arange(n) + 0.5) / n
    vals = np.asarray(V(phi, np.full(n, r)), dtype=float)
    idx = np.nonzero(np.sign(vals) != np.sign(np.roll(vals, -1)))[0]
    out = []
    from scipy.optimize import brentq

    for i in idx:
        a, b = phi[i], phi[(i + 1) % n] + (2 * np.pi if i == n - 1 else 0)
        out.append(brentq(lambda t: float(V(np.array([t]), np.array([r]))[0]), a, b) % (2 * np.pi))
    return out


def _mp_series(pairs):
    """(phi, r) -> sum_n t_n(phi) r^n in multiprecision, from (n, TrigPoly) pairs with real coefficients."""
    rows = []
    for n, t in pairs:
        a0, a, b = t.cos_sin()
        terms = [(0, mpmath.mpf(a0.re.numerator) / a0.re.denominator, mpmath.mpf(0))]
        for k in sorted(set(a) | set(b)):
            ak, bk = a.get(k), b.get(k)
            terms.append((k, mpmath.mpf(ak.re.numerator) / ak.re.denominator if ak else mpmath.mpf(0),
                          mpmath.mpf(bk.re.numerator) / bk.re.denominator if bk else mpmath.mpf(0)))
        rows.append((n, terms))

    def f(phi, r):
        total = mpmath.mpf(0)
        for n, terms in rows:
            total += mpmath.fsum(ak * mpmath.cos(k * phi) + bk * mpmath.sin(k * phi) for k, ak, bk in terms) * r**n
        return total

    return f


def _g_multiprecision(Z: PolarField, V: LaurentRho, r: float, dps: int = 40) -> float:
    """G(r) for a sign-definite exact V, with breakpoints at the rho^2-wide spikes near characteristic angles.

    Near a characteristic direction Theta ~ delta^2 + O(rho^k) and the integrand is a tall narrow
    peak whose positive and negative parts nearly cancel; double precision cannot resolve that.
    """
    with mpmath.workdps(dps):
        th = _mp_series(list(enumerate(Z.G)))
        rr = _mp_series(list(enumerate(Z.R)))
        vv = _mp_series(sorted(V.coeffs.items()))
        rm = mpmath.mpf(r)
        two_pi = 2 * mpmath.pi
        pts = {mpmath.mpf(0), two_pi}
        for a, _ in characteristic_directions(Z):
            a = mpmath.mpf(a)
            pts.add(a)
            for scale in (1, 10, 100, 1000):
                for sgn in (-1, 1):
                    q = a + sgn * scale * rm**2
                    if 0 < q < two_pi:
                        pts.add(q)
        val = mpmath.quad(lambda p: rr(p, rm) / (th(p, rm) * vv(p, rm)), sorted(pts))
        return float(val)


def g_of_r(Z: PolarField, V: ClosedFormIIF, radii: Sequence[float] = (1e-2, 5e-3, 2e-3), *,
           spread_tol: float = 1e-6) -> GValue:
    """G(r) = int_0^{2 pi} (R/Theta)/V dphi, required to be independent of r.

    Double-precision PV quadrature first; for an exact Laurent V that keeps one sign on each
    circle, a multiprecision pass takes over when the float values disagree across radii.
    """
    try:
        return _g_float(Z, V, radii, spread_tol)
    except RDependence as exc:
        if not isinstance(V.V, LaurentRho):
            raise
        log.info("float G(r) failed (%s); retrying in multiprecision", exc)
    per: dict[float, float] = {}
    for r in radii:
        if _v_zero_angles(V, r):
            raise RDependence(f"V changes sign on the circle of radius {r}")
        per[r] = _g_multiprecision(Z, V.V, r)
    return _collect(per, [], spread_tol)


def _collect(per: dict[float, float], excluded: list[float], spread_tol: float) -> GValue:
    if not per:
        raise RDependence("every radius was excluded (V vanishes on the circle)")
    vals = list(per.values())
    spread = max(vals) - min(vals)
    if spread > spread_tol * max(1.0, max(abs(v) for v in vals)):
        raise RDependence(f"G(r) varies with r (spread {spread:.3e})")
    return GValue(float(np.mean(vals)), spread, per, excluded)


def _g_float(Z: PolarField, V: ClosedFormIIF, radii: Sequence[float], spread_tol: float) -> GValue:
    ev = Z.evaluator()
    per: dict[float, float] = {}
    excluded: list[float] = []
    for r in radii:
        def W(phi, r=r):
            phi = np.asarray(phi, dtype=float)
            th, rr = ev(phi, np.full(phi.shape, r))
            return rr / (th * V(phi, np.full(phi.shape, r)))

        phi = 2 * np.pi * (np.arange(2048) + 0.5) / 2048
        vmin = float(np.min(np.abs(V(phi, np.full(phi.shape, r)))))
        if vmin < 1e-10:
            excluded.append(r)
            continue
        poles = _v_zero_angles(V, r)
        per[r] = float(pv_quadrature(W, poles, tol=1e-9).value.real)
    if excluded and isinstance(V.V, LaurentRho):
        raise RDependence(f"radii {excluded} excluded in double precision")
    return _collect(per, excluded, spread_tol)


@dataclass(frozen=True)
class EtaDiscriminant:
    outcome: str  # "Focus" or "Center"
    eta: float
    leading_index: int


def eta_from_V(g: float, m: int, *, tol: float = 1e-8) -> EtaDiscriminant:
    """m = 1: eta_1 = exp(g); m > 1: eta_m = g.  Either way a focus iff |g| > tol."""
    if m < 1:
        raise ValueError("the return-map coefficient from G(r) needs m >= 1")
    eta = math.exp(g) if m == 1 else g
    return EtaDiscriminant("Focus" if abs(g) > tol else "Center", eta, m)


def fundamental_equation_check(Z: PolarField, V: ClosedFormIIF, samples: Sequence[float] = (1e-3,)) -> float:
    """max relative |Vh(0, Pi(x)) - Vh(0, x) Pi'(x)| with Vh = V/Theta."""
    plan = _Segments(Z)
    ev = plan.evaluator(0.0)

    def Vh(x):
        th, _ = ev(0.0, x)
        return float(V(np.array([0.0]), np.array([x]))[0]) / float(th)

    worst = 0.0
    for x in samples:
        h = x / 10
        P0 = return_map(Z, x, _plan=plan).value
        Pp = return_map(Z, x + h, _plan=plan).value
        Pm = return_map(Z, x - h, _plan=plan).value
        dP = (Pp - Pm) / (2 * h)
        lhs = Vh(P0)
        rhs = Vh(x) * dP
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return worst

"""Weighted polar blow-up x = rho^p cos(phi), y = rho^q sin(phi).

The blown-up field Z = Theta d/dphi + R d/drho is stored as graded lists of exact trig
polynomials, Theta = sum G_j rho^j and R = sum R_j rho^j.  Both have been multiplied by
the positive factor p cos^2 + q sin^2 and divided by the common power rho^r.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import NotMonodromicForTheseWeights
from .newton import Poly2, PolyVectorField, quasi_degree, weighted_degrees
from .trigfun import SignClass, TrigPoly, cs_monomial, sign_on_circle, zeros_on_circle


class LaurentRho:
    """Finite Laurent series sum_n c_n(phi) rho^n with exact trig-polynomial coefficients."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, TrigPoly] | None = None):
        self._c = {int(n): t for n, t in (coeffs or {}).items() if not t.is_zero()}

    @property
    def coeffs(self) -> dict[int, TrigPoly]:
        return dict(self._c)

    def __getitem__(self, n: int) -> TrigPoly:
        return self._c.get(n, TrigPoly.zero())

    def exponents(self) -> list[int]:
        return sorted(self._c)

    @property
    def leading_exponent(self) -> int | None:
        return min(self._c) if self._c else None

    @property
    def top_exponent(self) -> int | None:
        return max(self._c) if self._c else None

    def is_zero(self) -> bool:
        return not self._c

    def __add__(self, o: LaurentRho) -> LaurentRho:
        out = dict(self._c)
        for n, t in o._c.items():
            out[n] = out.get(n, TrigPoly.zero()) + t
        return LaurentRho(out)

    def __neg__(self) -> LaurentRho:
        return LaurentRho({n: -t for n, t in self._c.items()})

    def __sub__(self, o: LaurentRho) -> LaurentRho:
        return self + (-o)

    def __mul__(self, o) -> LaurentRho:
        if not isinstance(o, LaurentRho):
            return LaurentRho({n: t * o for n, t in self._c.items()})
        out: dict[int, TrigPoly] = {}
        for n, t in self._c.items():
            for k, u in o._c.items():
                out[n + k] = out.get(n + k, TrigPoly.zero()) + t * u
        return LaurentRho(out)

    __rmul__ = __mul__

    def d_phi(self) -> LaurentRho:
        return LaurentRho({n: t.derivative() for n, t in self._c.items()})

    def d_rho(self) -> LaurentRho:
        return LaurentRho({n - 1: t * n for n, t in self._c.items() if n})

    def __call__(self, phi, rho):
        phi = np.asarray(phi, dtype=float)
        rho = np.asarray(rho, dtype=float)
        out = np.zeros(np.broadcast(phi, rho).shape)
        for n, t in self._c.items():
            out = out + np.real(t.evaluate_complex(phi)) * rho**n
        return out

    def __eq__(self, o):
        return isinstance(o, LaurentRho) and self._c == o._c

    def __repr__(self):
        return "LaurentRho(" + ", ".join(f"rho^{n}: {t}" for n, t in sorted(self._c.items())) + ")"


@dataclass(frozen=True)
class PolarField:
    weights: tuple[int, int]
    G: tuple[TrigPoly, ...]
    R: tuple[TrigPoly, ...]
    removed_power: int
    cleared_positive_factor: TrigPoly
    orientation_flipped: bool = False
    g0_sign: SignClass = SignClass.POSITIVE

    def g(self, k: int) -> TrigPoly:
        return self.G[k] if 0 <= k < len(self.G) else TrigPoly.zero()

    def r(self, k: int) -> TrigPoly:
        return self.R[k] if 0 <= k < len(self.R) else TrigPoly.zero()

    @property
    def top_g(self) -> int:
        return max((k for k, t in enumerate(self.G) if not t.is_zero()), default=-1)

    @property
    def top_r(self) -> int:
        return max((k for k, t in enumerate(self.R) if not t.is_zero()), default=-1)

    def theta_series(self) -> LaurentRho:
        return LaurentRho(dict(enumerate(self.G)))

    def r_series(self) -> LaurentRho:
        return LaurentRho(dict(enumerate(self.R)))

    def _coef_matrix(self, polys):
        kmax = max((t.degree() for t in polys), default=0)
        M = np.zeros((len(polys), 2 * kmax + 1), dtype=complex)
        for j, t in enumerate(polys):
            for k, v in t.coeffs.items():
                M[j, k + kmax] = complex(v)
        return M, kmax

    def evaluator(self):
        """Fast scalar/array evaluator (phi, rho) -> (Theta, R)."""
        Gm, gk = self._coef_matrix(self.G)
        Rm, rk = self._coef_matrix(self.R)

        def ev(phi, rho):
            phi = np.asarray(phi, dtype=float)
            rho = np.asarray(rho, dtype=float)
            eg = np.exp(1j * np.multiply.outer(phi, np.arange(-gk, gk + 1)))
            er = np.exp(1j * np.multiply.outer(phi, np.arange(-rk, rk + 1)))
            gv = np.real(eg @ Gm.T)  # (..., nG)
            rv = np.real(er @ Rm.T)
            pg = np.stack([rho**j for j in range(len(self.G))], axis=-1)
            pr = np.stack([rho**j for j in range(len(self.R))], axis=-1)
            return np.sum(gv * pg, axis=-1), np.sum(rv * pr, axis=-1)

        return ev


def blow_up(X: PolyVectorField, w: tuple[int, int]) -> PolarField:
    p, q = w
    r = quasi_degree(X, w)
    theta: dict[int, TrigPoly] = {}
    rdot: dict[int, TrigPoly] = {}

    def add(store, k, t):
        store[k] = store.get(k, TrigPoly.zero()) + t

    for comp, i, j, d, a in weighted_degrees(X, w):
        if comp == "P":
            add(theta, d - r, cs_monomial(i, j + 1) * (-q * a))
            add(rdot, d + 1 - r, cs_monomial(i + 1, j) * a)
        else:
            add(theta, d - r, cs_monomial(i + 1, j) * (p * a))
            add(rdot, d + 1 - r, cs_monomial(i, j + 1) * a)
    ng = max(theta) + 1 if theta else 1
    nr = max(rdot) + 1 if rdot else 1
    G = [theta.get(k, TrigPoly.zero()) for k in range(ng)]
    R = [rdot.get(k, TrigPoly.zero()) for k in range(nr)]
    assert R[0].is_zero()
    cls = sign_on_circle(G[0])
    flipped = False
    if cls in (SignClass.SIGN_CHANGING, SignClass.ZERO):
        raise NotMonodromicForTheseWeights(f"G_0 is {cls.value} for weights {w}")
    if cls in (SignClass.NEGATIVE, SignClass.NONPOS_WITH_ZEROS):
        G = [-t for t in G]
        R = [-t for t in R]
        flipped = True
        cls = SignClass.POSITIVE if cls is SignClass.NEGATIVE else SignClass.NONNEG_WITH_ZEROS
    factor = TrigPoly.cos() ** 2 * p + TrigPoly.sin() ** 2 * q
    return PolarField((p, q), tuple(G), tuple(R), r, factor, flipped, cls)


@dataclass(frozen=True)
class CharacteristicSet:
    angles: tuple[tuple[float, int], ...]

    @property
    def is_empty(self) -> bool:
        return not self.angles

    def __iter__(self):
        return iter(self.angles)

    def __len__(self):
        return len(self.angles)


def characteristic_directions(Z: PolarField) -> CharacteristicSet:
    return CharacteristicSet(tuple(zeros_on_circle(Z.G[0])))


class Risk(str, enum.Enum):
    NONE_DETECTED = "NoneDetected"
    SUSPECTED = "Suspected"
    UNKNOWN = "Unknown"


@dataclass
class MonodromyReport:
    omega_empty: bool
    lambda_pq_risk: Risk
    orientation_flipped: bool
    evidence: list[tuple[float, float]] = field(default_factory=list)


def lambda_pq_probe(Z: PolarField, rho_max: float = 1e-2, levels: int = 3, n_phi: int = 1024) -> MonodromyReport:
    """Look for points with Theta <= 0 off rho = 0 on a grid refined toward rho = 0."""
    ev = Z.evaluator()
    omega = [a for a, _ in characteristic_directions(Z)]
    base = 2 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    negatives_by_level: list[list[tuple[float, float]]] = []
    for lev in range(levels + 1):
        rk = rho_max / 4**lev
        rhos = rk * np.array([1.0, 0.7, 0.5])
        found = []
        for rho in rhos:
            phis = [base]
            for a in omega:
                offs = np.concatenate([rho**e * np.array([0.1, 0.3, 1.0, 3.0]) for e in (0.5, 1.0, 2.0, 3.0)])
                offs = offs[offs > 1e-7]
                phis.append(a + offs)
                phis.append(a - offs)
            ph = np.concatenate(phis) % (2 * np.pi)
            th, _ = ev(ph, np.full_like(ph, rho))
            scale = sum(float(np.max(np.abs(t.evaluate_complex(base)))) * rho**k for k, t in enumerate(Z.G))
            bad = th <= -1e-12 * scale
            found += [(float(x), float(rho)) for x in ph[bad][:5]]
        negatives_by_level.append(found)
    hit_levels = [i for i, f in enumerate(negatives_by_level) if f]
    evidence = [pt for f in negatives_by_level for pt in f][:20]
    if not hit_levels:
        risk = Risk.NONE_DETECTED
    elif len(hit_levels) >= 2 or hit_levels[-1] == levels:
        risk = Risk.SUSPECTED
    else:
        risk = Risk.UNKNOWN
    return MonodromyReport(not omega, risk, Z.orientation_flipped, evidence)


def divergence(Z: PolarField) -> list[TrigPoly]:
    """Coefficients of d_phi Theta + d_rho R by rho-power."""
    n = max(len(Z.G), len(Z.R) - 1)
    out = [Z.g(k).derivative() + Z.r(k + 1) * (k + 1) for k in range(n)]
    while out and out[-1].is_zero():
        out.pop()
    return out


def divergence_series(Z: PolarField) -> LaurentRho:
    return LaurentRho(dict(enumerate(divergence(Z))))


def pde_residual(Z: PolarField, V: LaurentRho) -> LaurentRho:
    """Z(V) - V div Z as a Laurent series in rho (exact)."""
    th, rr = Z.theta_series(), Z.r_series()
    return th * V.d_phi() + rr * V.d_rho() - V * divergence_series(Z)


def cartesian_iif_to_polar(v: Poly2, X: PolyVectorField, w: tuple[int, int]) -> LaurentRho:
    """Inverse integrating factor of X in the rescaled polar chart: v(rho^p c, rho^q s)/rho^{r+p+q-1}."""
    if v.is_zero():
        raise ValueError("v is identically zero")
    p, q = w
    r = quasi_degree(X, w)
    out: dict[int, TrigPoly] = {}
    for i, j, a in v.monomials():
        e = p * i + q * j - r - p - q + 1
        out[e] = out.get(e, TrigPoly.zero()) + cs_monomial(i, j) * a
    return LaurentRho(out)


def pushforward(Z: PolarField, phi, rho):
    """Map (Theta, R) back to (xdot, ydot), undoing the rescalings; used for self-checks."""
    p, q = Z.weights
    th, rr = Z.evaluator()(phi, rho)
    if Z.orientation_flipped:
        th, rr = -th, -rr
    c, s = np.cos(phi), np.sin(phi)
    fac = p * c**2 + q * s**2
    scale = rho ** Z.removed_power / fac
    th, rr = th * scale, rr * scale
    # rho^{p+q-1} (phidot, rhodot) in the un-rescaled chart
    # xdot = p rho^{p-1} c rhodot - rho^p s phidot; ydot = q rho^{q-1} s rhodot + rho^q c phidot
    xd = p * rho ** (p - 1) * c * rr - rho**p * s * th
    yd = q * rho ** (q - 1) * s * rr + rho**q * c * th
    return xd, yd

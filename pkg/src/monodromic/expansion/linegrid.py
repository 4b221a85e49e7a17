"""Spectral representation of analytic periodic functions on a shifted line phi + i*delta.

Coefficient functions of the expansion are analytic on the real circle away from the
complex zeros of the leading trig polynomial, but the linear ODEs defining them are
singular at real zeros.  Sampling on a horizontal line slightly above the real axis
avoids the real singularities; Fourier coefficients of the line samples can be shifted
back to the real axis (c_k = d_k e^{k delta}), which both evaluates the function on the
circle and exposes non-analyticity as a failure of conjugate symmetry or of decay.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..residue_pv import CircleClass, find_roots
from ..trigfun import TrigPoly

DELTA_MAX = 0.25
UNSHIFT_BUDGET = 14.0  # K * delta; noise amplification e^{14} ~ 1e6


class TrigEval:
    """Cached numeric evaluator for a TrigPoly at complex points."""

    __slots__ = ("ks", "cs", "dcs")

    def __init__(self, t: TrigPoly):
        items = sorted(t.coeffs.items())
        self.ks = np.array([k for k, _ in items], dtype=float)
        self.cs = np.array([complex(v) for _, v in items], dtype=complex)
        self.dcs = 1j * self.ks * self.cs

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if not len(self.ks):
            return np.zeros(z.shape, dtype=complex)
        return np.exp(1j * np.multiply.outer(z, self.ks)) @ self.cs

    def both(self, z):
        z = np.asarray(z, dtype=complex)
        if not len(self.ks):
            zz = np.zeros(z.shape, dtype=complex)
            return zz, zz
        e = np.exp(1j * np.multiply.outer(z, self.ks))
        return e @ self.cs, e @ self.dcs


_EVAL_CACHE: dict[TrigPoly, TrigEval] = {}


def trig_eval(t: TrigPoly) -> TrigEval:
    ev = _EVAL_CACHE.get(t)
    if ev is None:
        if len(_EVAL_CACHE) > 4096:
            _EVAL_CACHE.clear()
        ev = _EVAL_CACHE[t] = TrigEval(t)
    return ev


def singular_height(lead: TrigPoly) -> float:
    """Distance from the real axis to the nearest non-real zero of lead (inf if none)."""
    lo, dense = lead.to_laurent().dense()
    rs = find_roots(dense)
    hs = [abs(math.log(abs(r.location))) for r in rs.roots
          if r.circle_class is not CircleClass.ON_CONTOUR and r.location != 0]
    return min(hs, default=math.inf)


@dataclass(frozen=True)
class LineGrid:
    n: int
    delta: float

    @classmethod
    def for_lead(cls, lead: TrigPoly, *, delta_max: float = DELTA_MAX, n_max: int = 16384) -> LineGrid:
        h = singular_height(lead)
        delta = min(delta_max, h / 2)
        n = 256
        while n * delta < 80 and n < n_max:
            n *= 2
        return cls(n, delta)

    @cached_property
    def phi(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n) / self.n

    @cached_property
    def z(self) -> np.ndarray:
        return self.phi + 1j * self.delta

    @cached_property
    def k(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, 1.0 / self.n)

    @property
    def K(self) -> int:
        return int(min(self.n // 2 - 1, UNSHIFT_BUDGET / self.delta))

    def coeffs(self, f: np.ndarray) -> np.ndarray:
        return np.fft.fft(f) / self.n

    def from_coeffs(self, d: np.ndarray) -> np.ndarray:
        return np.fft.ifft(d) * self.n

    def derivative(self, f: np.ndarray) -> np.ndarray:
        return self.from_coeffs(1j * self.k * self.coeffs(f))

    def primitive(self, f: np.ndarray) -> tuple[complex, np.ndarray]:
        """(mean, periodic primitive of f - mean with zero mean)."""
        d = self.coeffs(f)
        mean = d[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.where(self.k != 0, d / (1j * self.k), 0.0)
        return complex(mean), self.from_coeffs(p)

    def unshift(self, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(ks, c_k) with |k| <= K: Fourier coefficients of the continuation to the real axis."""
        d = self.coeffs(f)
        K = self.K
        ks = np.arange(-K, K + 1)
        c = d[ks % self.n] * np.exp(ks * self.delta)
        return ks, c

    def eval_line_param(self, f: np.ndarray, phi) -> np.ndarray:
        """Interpolate a line function at real parameter values (points phi + i delta)."""
        d = self.coeffs(f)
        return np.exp(1j * np.multiply.outer(np.asarray(phi, dtype=float), self.k)) @ d

    def trig_on_line(self, t: TrigPoly) -> tuple[np.ndarray, np.ndarray]:
        return trig_eval(t).both(self.z)


def admissibility_metrics(grid: LineGrid, f: np.ndarray) -> dict[str, np.ndarray | float]:
    """Real vectors measuring failure of real-analyticity of the continuation of f.

    'real': c_k - conj(c_{-k}) for 0 <= k <= K (a real-valued function has zero);
    'tail': c_k for K/2 < |k| <= K (an analytic function in a strip of width 2*delta decays).
    """
    ks, c = grid.unshift(f)
    K = grid.K
    pos = c[K:]
    neg = c[K::-1]
    real = pos - np.conj(neg)
    tail = c[np.abs(ks) > K // 2]
    low = c[np.abs(ks) <= K // 2]
    return {
        "real": np.concatenate([real.real, real.imag]),
        "tail": np.concatenate([tail.real, tail.imag]),
        "scale": float(np.max(np.abs(low))) if len(low) else 0.0,
    }


@dataclass
class FourierRep:
    """Truncated real-axis Fourier data of a line function, for evaluation off the line."""

    ks: np.ndarray
    c: np.ndarray
    dc: np.ndarray = field(init=False)

    def __post_init__(self):
        self.dc = 1j * self.ks * self.c

    @classmethod
    def from_line(cls, grid: LineGrid, f: np.ndarray, rel_floor: float = 1e-15) -> FourierRep:
        d = grid.coeffs(f)
        K = grid.K
        ks = np.arange(-K, K + 1)
        dk = d[ks % grid.n]
        keep = np.abs(dk) > rel_floor * max(np.max(np.abs(dk)), 1e-300)
        ks, dk = ks[keep], dk[keep]
        return cls(ks.astype(float), dk * np.exp(ks * grid.delta))

    def both(self, z):
        z = np.asarray(z, dtype=complex)
        e = np.exp(1j * np.multiply.outer(z, self.ks))
        return e @ self.c, e @ self.dc

"""Coefficient functions of a Laurent inverse integrating factor.

A coefficient is affine in the carried free constants: v = v_None + sum_c c * v_c.  Each
component keeps an exact trig polynomial when one is known and always keeps samples
(value and derivative) on the spectral line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ..trigfun import TrigPoly
from .linegrid import FourierRep, LineGrid, trig_eval

Key = Optional[str]


def rationalize(x: float, max_den: int = 10**6, rel: float = 1e-10) -> Fraction | None:
    if not math.isfinite(x):
        return None
    f = Fraction(x).limit_denominator(max_den)
    return f if abs(float(f) - x) <= rel * max(1.0, abs(x)) else None


@dataclass
class Component:
    exact: TrigPoly | None
    line: np.ndarray
    dline: np.ndarray
    grid: LineGrid
    _rep: FourierRep | None = field(default=None, repr=False)

    @classmethod
    def from_exact(cls, t: TrigPoly, grid: LineGrid) -> Component:
        v, d = trig_eval(t).both(grid.z)
        return cls(t, v, d, grid)

    @classmethod
    def zero(cls, grid: LineGrid) -> Component:
        z = np.zeros(grid.n, dtype=complex)
        return cls(TrigPoly.zero(), z, z.copy(), grid)

    def is_zero(self) -> bool:
        if self.exact is not None:
            return self.exact.is_zero()
        return not np.any(self.line)

    def at(self, z):
        """(value, derivative) of the analytic function at complex points z."""
        if self.exact is not None:
            return trig_eval(self.exact).both(z)
        if self._rep is None:
            self._rep = FourierRep.from_line(self.grid, self.line)
        return self._rep.both(z)

    def scaled(self, s) -> Component:
        if isinstance(s, Fraction) or isinstance(s, int):
            ex = self.exact * s if self.exact is not None else None
            f = float(s)
        else:
            r = rationalize(float(s)) if np.isreal(s) else None
            ex = self.exact * r if (self.exact is not None and r is not None) else None
            f = s
        return Component(ex, self.line * f, self.dline * f, self.grid)

    def __add__(self, o: Component) -> Component:
        ex = self.exact + o.exact if (self.exact is not None and o.exact is not None) else None
        return Component(ex, self.line + o.line, self.dline + o.dline, self.grid)


@dataclass
class CoefficientFn:
    """v_index as an affine function of carried constants."""

    index: int
    parts: dict[Key, Component]
    grid: LineGrid

    def component(self, key: Key) -> Component | None:
        return self.parts.get(key)

    def keys(self):
        return self.parts.keys()

    def is_exact(self) -> bool:
        return all(c.exact is not None for c in self.parts.values())

    def closed_form(self, constants: dict[str, Fraction] | None = None) -> TrigPoly | None:
        """Exact trig polynomial after substituting constants (missing constants = 0)."""
        constants = constants or {}
        out = TrigPoly.zero()
        for key, comp in self.parts.items():
            w = Fraction(1) if key is None else Fraction(constants.get(key, 0))
            if w == 0:
                continue
            if comp.exact is None:
                return None
            out = out + comp.exact * w
        return out

    def evaluate(self, phi, constants: dict[str, float] | None = None) -> np.ndarray:
        """Values on the real circle (continuation from the line)."""
        constants = constants or {}
        phi = np.asarray(phi, dtype=float)
        out = np.zeros(phi.shape, dtype=complex)
        for key, comp in self.parts.items():
            w = 1.0 if key is None else float(constants.get(key, 0.0))
            if w:
                out = out + w * comp.at(phi)[0]
        return out.real

    def derivative(self, phi, constants: dict[str, float] | None = None) -> np.ndarray:
        constants = constants or {}
        phi = np.asarray(phi, dtype=float)
        out = np.zeros(phi.shape, dtype=complex)
        for key, comp in self.parts.items():
            w = 1.0 if key is None else float(constants.get(key, 0.0))
            if w:
                out = out + w * comp.at(phi)[1]
        return out.real

    def substitute(self, rules: dict[str, tuple[float | Fraction, dict[str, float | Fraction]]]) -> CoefficientFn:
        """Apply c = x0 + sum_f M_f f for each determined constant c."""
        parts = {k: v for k, v in self.parts.items() if k not in rules}
        for c, (x0, lin) in rules.items():
            comp = self.parts.get(c)
            if comp is None:
                continue
            targets = [(None, x0)] + list(lin.items())
            for key, w in targets:
                if w == 0:
                    continue
                add = comp.scaled(w)
                parts[key] = parts[key] + add if key in parts else add
        return CoefficientFn(self.index, parts, self.grid)

    def drop_zero_parts(self) -> CoefficientFn:
        return CoefficientFn(self.index, {k: v for k, v in self.parts.items() if not v.is_zero() or k is None},
                             self.grid)

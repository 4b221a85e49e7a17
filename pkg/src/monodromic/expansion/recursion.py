"""Forcing terms of the coefficient recursions for Z(V) = V div(Z).

With Theta = sum G_k rho^k, R = sum R_k rho^k and V = sum v_i rho^i, the coefficient of
rho^N in Theta V_phi + R V_rho - V (Theta_phi + R_rho) is

    sum_k (G_k v'_{N-k} - G'_k v_{N-k}) + sum_k (N - 2k + 1) R_k v_{N-k+1}.

The ascending equation for v_j is the coefficient N = j; the descending one is
N = j + n - 1 with n = max(top G index + 1, top R index).  The forcing is that
coefficient with every term involving v_j removed.
"""
from __future__ import annotations

from typing import Callable, Iterable

import numpy as np

from ..errors import LeadingDegenerate
from ..polar import LaurentRho, PolarField
from ..trigfun import TrigPoly
from .coef import CoefficientFn, Key
from .lemma import ForcingPart
from .linegrid import LineGrid, trig_eval


def descending_order(Z: PolarField) -> int:
    return max(Z.top_g + 1, Z.top_r)


def ascending_operator(Z: PolarField, j: int) -> tuple[TrigPoly, TrigPoly]:
    """(lead, linear coefficient) of the equation for v_j in an ascending expansion."""
    G0 = Z.g(0)
    return G0, Z.r(1) * (j - 1) - G0.derivative()


def descending_operator(Z: PolarField, j: int) -> tuple[TrigPoly, TrigPoly]:
    n = descending_order(Z)
    lead, Rn = Z.g(n - 1), Z.r(n)
    if lead.is_zero() or Rn.is_zero():
        raise LeadingDegenerate(f"G_{n - 1} or R_{n} vanishes identically; the descending operator collapses")
    return lead, Rn * (j - n) - lead.derivative()


def _terms(Z: PolarField, N: int, skip: int) -> Iterable[tuple[int, TrigPoly, TrigPoly]]:
    """(index i, multiplier of v_i', multiplier of v_i) contributions to the rho^N coefficient."""
    acc: dict[int, list[TrigPoly]] = {}
    for k, Gk in enumerate(Z.G):
        if Gk.is_zero():
            continue
        i = N - k
        if i == skip:
            continue
        d, v = acc.setdefault(i, [TrigPoly.zero(), TrigPoly.zero()])
        acc[i] = [d + Gk, v - Gk.derivative()]
    for k, Rk in enumerate(Z.R):
        if Rk.is_zero():
            continue
        i = N - k + 1
        if i == skip:
            continue
        d, v = acc.setdefault(i, [TrigPoly.zero(), TrigPoly.zero()])
        acc[i] = [d, v + Rk * (N - 2 * k + 1)]
    for i, (d, v) in sorted(acc.items()):
        if not (d.is_zero() and v.is_zero()):
            yield i, d, v


def equation_index(Z: PolarField, j: int, descending: bool) -> int:
    return j + descending_order(Z) - 1 if descending else j


class ForcingBuilder:
    """Assemble the forcing of one step from already computed coefficients."""

    def __init__(self, Z: PolarField, grid: LineGrid, descending: bool = False):
        self.Z, self.grid, self.descending = Z, grid, descending

    def terms(self, j: int, coefs: dict[int, CoefficientFn]):
        N = equation_index(self.Z, j, self.descending)
        return [(i, d, v) for i, d, v in _terms(self.Z, N, j) if i in coefs]

    def build(self, j: int, coefs: dict[int, CoefficientFn]) -> tuple[dict[Key, ForcingPart], Callable]:
        terms = self.terms(j, coefs)
        g = self.grid
        keys: list[Key] = [None]
        for i, _, _ in terms:
            for k in coefs[i].keys():
                if k not in keys:
                    keys.append(k)
        out: dict[Key, ForcingPart] = {}
        for key in keys:
            exact: TrigPoly | None = TrigPoly.zero()
            line = np.zeros(g.n, dtype=complex)
            for i, dmul, vmul in terms:
                comp = coefs[i].component(key)
                if comp is None:
                    continue
                dm = trig_eval(dmul)(g.z)
                vm = trig_eval(vmul)(g.z)
                line = line + dm * comp.dline + vm * comp.line
                if exact is not None and comp.exact is not None:
                    exact = exact + dmul * comp.exact.derivative() + vmul * comp.exact
                else:
                    exact = None
            out[key] = ForcingPart(exact, line)
        # drop identically-zero constant columns
        out = {k: v for k, v in out.items()
               if k is None or not (v.exact is not None and v.exact.is_zero())}

        def forcing_at(z):
            z = np.asarray(z, dtype=complex)
            acc = np.zeros(z.shape, dtype=complex)
            for i, dmul, vmul in terms:
                comp = coefs[i].component(None)
                if comp is None:
                    continue
                val, der = comp.at(z)
                acc = acc + trig_eval(dmul)(z) * der + trig_eval(vmul)(z) * val
            return acc

        return out, forcing_at


def residual_coefficient(Z: PolarField, V: LaurentRho, N: int) -> TrigPoly:
    """Exact rho^N coefficient of Z(V) - V div(Z) (used to cross-check the recursion)."""
    out = TrigPoly.zero()
    coefs = V.coeffs
    for i, d, v in _terms(Z, N, skip=None):  # type: ignore[arg-type]
        if i in coefs:
            out = out + d * coefs[i].derivative() + v * coefs[i]
    return out

"""Exact solutions of G v' + P v = f in real trig polynomials of bounded degree."""
from __future__ import annotations

from fractions import Fraction

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from ..trigfun import TrigPoly


def _basis(D: int) -> list[TrigPoly]:
    out = [TrigPoly.one()]
    for k in range(1, D + 1):
        out += [TrigPoly.cos(k), TrigPoly.sin(k)]
    return out


def _cols(t: TrigPoly, rows: int) -> list[Fraction]:
    """Real coordinates of a real trig poly: (c_0, Re c_k, Im c_k for k = 1..)."""
    vec = [Fraction(0)] * (2 * rows + 1)
    vec[0] = t.coeff(0).re
    for k in range(1, rows + 1):
        c = t.coeff(k)
        vec[2 * k - 1] = c.re
        vec[2 * k] = c.im
    return vec


def _from_coords(x: list, D: int) -> TrigPoly:
    basis = _basis(D)
    out = TrigPoly.zero()
    for b, v in zip(basis, x):
        if v:
            out = out + b * Fraction(v)
    return out


def _q(x: Fraction):
    return QQ(x.numerator, x.denominator)


class ExactOperator:
    """Matrix of v -> G v' + P v on the real trig basis of degree D."""

    def __init__(self, G: TrigPoly, P: TrigPoly, D: int):
        if not (G.is_real() and P.is_real()):
            raise ValueError("exact solver needs real coefficients")
        self.G, self.P, self.D = G, P, D
        self.rows = D + max(G.degree(), P.degree())
        cols = [_cols(G * b.derivative() + P * b, self.rows) for b in _basis(D)]
        self.ncols = len(cols)
        self.nrows = 2 * self.rows + 1
        self.A = DomainMatrix([[_q(cols[j][i]) for j in range(self.ncols)] for i in range(self.nrows)],
                              (self.nrows, self.ncols), QQ)
        self._null: list[TrigPoly] | None = None
        self._rref = None

    def nullspace(self) -> list[TrigPoly]:
        if self._null is None:
            ns = self.A.nullspace()
            rows = ns.to_Matrix().tolist() if ns.shape[0] else []
            self._null = [_from_coords([Fraction(int(v.p), int(v.q)) for v in r], self.D) for r in rows]
        return self._null

    def solve(self, f: TrigPoly) -> TrigPoly | None:
        """A particular solution of L v = f, or None when none exists in this degree."""
        if f.is_zero():
            return TrigPoly.zero()
        if not f.is_real() or f.degree() > self.rows:
            return None
        b = _cols(f, self.rows)
        aug = self.A.hstack(DomainMatrix([[_q(x)] for x in b], (self.nrows, 1), QQ))
        R, pivots = aug.rref()
        if self.ncols in pivots:
            return None
        x = [Fraction(0)] * self.ncols
        Rm = R.to_Matrix()
        for r, p in enumerate(pivots):
            v = Rm[r, self.ncols]
            x[p] = Fraction(int(v.p), int(v.q))
        return _from_coords(x, self.D)


def default_degree(G: TrigPoly, P: TrigPoly, f: TrigPoly | None = None) -> int:
    base = max(G.degree(), P.degree())
    d = 2 * base + 8
    if f is not None:
        d = max(d, f.degree() + 4)
    return min(d, 40)

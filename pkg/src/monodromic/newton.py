"""Bivariate polynomials, planar polynomial vector fields and their Newton diagram."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import InconsistentLeadingPart, NotASingularity


class Poly2:
    """Polynomial in x, y with rational coefficients, stored as {(i, j): coeff}."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[tuple[int, int], int | Fraction] | None = None):
        self._c: dict[tuple[int, int], Fraction] = {}
        for (i, j), v in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent in polynomial")
            v = Fraction(v)
            if v:
                self._c[(int(i), int(j))] = v

    @classmethod
    def x(cls) -> Poly2:
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> Poly2:
        return cls({(0, 1): 1})

    @classmethod
    def const(cls, c) -> Poly2:
        return cls({(0, 0): c})

    @property
    def coeffs(self) -> dict[tuple[int, int], Fraction]:
        return dict(self._c)

    def monomials(self) -> Iterable[tuple[int, int, Fraction]]:
        for (i, j), v in sorted(self._c.items()):
            yield i, j, v

    def is_zero(self) -> bool:
        return not self._c

    def degree(self) -> int:
        return max((i + j for i, j in self._c), default=-1)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self._c.get(ij, Fraction(0))

    def _lift(self, o) -> Poly2:
        return o if isinstance(o, Poly2) else Poly2.const(o)

    def __add__(self, o) -> Poly2:
        o = self._lift(o)
        out = dict(self._c)
        for k, v in o._c.items():
            out[k] = out.get(k, Fraction(0)) + v
        return Poly2(out)

    __radd__ = __add__

    def __neg__(self) -> Poly2:
        return Poly2({k: -v for k, v in self._c.items()})

    def __sub__(self, o) -> Poly2:
        return self + (-self._lift(o))

    def __rsub__(self, o) -> Poly2:
        return self._lift(o) - self

    def __mul__(self, o) -> Poly2:
        o = self._lift(o)
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), v in self._c.items():
            for (k, l), w in o._c.items():
                key = (i + k, j + l)
                out[key] = out.get(key, Fraction(0)) + v * w
        return Poly2(out)

    __rmul__ = __mul__

    def __truediv__(self, c) -> Poly2:
        c = Fraction(c)
        return Poly2({k: v / c for k, v in self._c.items()})

    def __pow__(self, n: int) -> Poly2:
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly2.const(1)
        for _ in range(n):
            out = out * self
        return out

    def dx(self) -> Poly2:
        return Poly2({(i - 1, j): v * i for (i, j), v in self._c.items() if i})

    def dy(self) -> Poly2:
        return Poly2({(i, j - 1): v * j for (i, j), v in self._c.items() if j})

    def __call__(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.result_type(x, y, float))
        for (i, j), v in self._c.items():
            out = out + float(v) * x**i * y**j
        return out

    def __eq__(self, o):
        if isinstance(o, Poly2):
            return self._c == o._c
        if isinstance(o, (int, Fraction)):
            return self == Poly2.const(o)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __str__(self):
        if not self._c:
            return "0"
        parts = []
        for (i, j), v in sorted(self._c.items(), key=lambda t: (t[0][0] + t[0][1], -t[0][0])):
            mono = "*".join(
                s for s in (
                    ("x" if i == 1 else f"x^{i}") if i else "",
                    ("y" if j == 1 else f"y^{j}") if j else "",
                ) if s
            )
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            elif v == -1:
                parts.append("-" + mono)
            else:
                coef = str(v) if v.denominator == 1 else f"({v})"
                parts.append(f"{coef}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly2({self})"


@dataclass(frozen=True)
class PolyVectorField:
    """X = P d/dx + Q d/dy with a singular point at the origin."""

    P: Poly2
    Q: Poly2
    params: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.P[(0, 0)] or self.Q[(0, 0)]:
            raise NotASingularity("the origin is not a singular point of the field")

    def is_zero(self) -> bool:
        return self.P.is_zero() and self.Q.is_zero()

    def __call__(self, x, y):
        return self.P(x, y), self.Q(x, y)

    def __str__(self):
        return f"dx = {self.P}; dy = {self.Q};"


@dataclass(frozen=True)
class Edge:
    p: int
    q: int
    start: tuple[int, int]
    end: tuple[int, int]


@dataclass(frozen=True)
class NewtonDiagram:
    support: frozenset[tuple[int, int]]
    edges: tuple[Edge, ...]

    @property
    def weights(self) -> tuple[tuple[int, int], ...]:
        seen: list[tuple[int, int]] = []
        for e in self.edges:
            if (e.p, e.q) not in seen:
                seen.append((e.p, e.q))
        return tuple(seen)


def support_points(X: PolyVectorField) -> set[tuple[int, int]]:
    """Vector-field support: x^i y^j in P gives (i-1, j), in Q gives (i, j-1)."""
    pts = {(i - 1, j) for i, j, _ in X.P.monomials()}
    pts |= {(i, j - 1) for i, j, _ in X.Q.monomials()}
    return pts


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def compute_diagram(X: PolyVectorField) -> NewtonDiagram:
    if X.is_zero():
        raise ValueError("zero vector field")
    pts = sorted(support_points(X))
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    edges = []
    for a, b in zip(hull, hull[1:]):
        di, dj = b[0] - a[0], a[1] - b[1]
        if dj <= 0:
            break  # slope no longer negative: end of the compact lower-left boundary
        g = math.gcd(dj, di)
        edges.append(Edge(dj // g, di // g, a, b))
    return NewtonDiagram(frozenset(pts), tuple(edges))


def weighted_degrees(X: PolyVectorField, w: tuple[int, int]) -> list[tuple[str, int, int, int, Fraction]]:
    """(component, i, j, d, coeff) with d the shifted weighted degree of each monomial."""
    p, q = w
    out = [("P", i, j, p * i + q * j - p, v) for i, j, v in X.P.monomials()]
    out += [("Q", i, j, p * i + q * j - q, v) for i, j, v in X.Q.monomials()]
    return out


def quasi_degree(X: PolyVectorField, w: tuple[int, int]) -> int:
    """Weighted degree r of the (p,q)-leading part: P-terms sit at degree p+r, Q-terms at q+r."""
    if math.gcd(*w) != 1 or min(w) < 1:
        raise ValueError(f"weights {w} must be coprime positive integers")
    degs = weighted_degrees(X, w)
    if not degs:
        raise ValueError("zero vector field")
    r = min(d for *_, d, _ in degs)
    if r < 0:
        raise InconsistentLeadingPart(f"negative quasi-degree {r} for weights {w}")
    return r

"""Turn a parsed program into exact fields, closed-form inverse integrating factors and sweeps."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from ..expansion import Mode
from ..newton import Poly2, PolyVectorField
from ..polar import LaurentRho, cartesian_iif_to_polar
from ..poincare import ClosedFormIIF
from ..trigfun import TrigPoly
from .syntax import Assign, BinOp, Call, Expr, Neg, Num, Param, Pow, Program, Sweep, Var, Weights, parse_program


class InputError(ValueError):
    """Semantic problem with an otherwise well-formed input."""


CARTESIAN = ("x", "y")
POLAR = ("rho", "phi")


def free_names(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg, Pow)):
        return free_names(e.operand if isinstance(e, Neg) else e.base)
    if isinstance(e, Call):
        return free_names(e.arg)
    return free_names(e.left) | free_names(e.right)


def _constant(e: Expr, env: Mapping[str, Fraction]) -> Fraction:
    p = to_poly(e, env)
    if any(k != (0, 0) for k in p.coeffs):
        raise InputError("expected a constant expression")
    return p[(0, 0)]


def to_poly(e: Expr, env: Mapping[str, Fraction]) -> Poly2:
    """Exact polynomial in x, y; every other name must be bound in env."""
    if isinstance(e, Num):
        return Poly2.const(e.value)
    if isinstance(e, Var):
        if e.name == "x":
            return Poly2.x()
        if e.name == "y":
            return Poly2.y()
        if e.name in env:
            return Poly2.const(env[e.name])
        raise InputError(f"unbound parameter {e.name!r}")
    if isinstance(e, Neg):
        return -to_poly(e.operand, env)
    if isinstance(e, Pow):
        if e.exponent < 0:
            raise InputError("negative exponent: the expression is not a polynomial")
        return to_poly(e.base, env) ** e.exponent
    if isinstance(e, Call):
        raise InputError(f"{e.func}() is only allowed in V written in rho and phi")
    a, b = to_poly(e.left, env), to_poly(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    c = _constant(e.right, env)
    if c == 0:
        raise InputError("division by zero")
    return a / c


def _harmonic(arg: Expr, env) -> int:
    """Integer k for an argument of the form k*phi."""
    if isinstance(arg, Var) and arg.name == "phi":
        return 1
    if isinstance(arg, BinOp) and arg.op == "*":
        for c, v in ((arg.left, arg.right), (arg.right, arg.left)):
            if isinstance(v, Var) and v.name == "phi":
                k = _constant(c, env)
                if k.denominator == 1:
                    return int(k)
    if isinstance(arg, Neg):
        return -_harmonic(arg.operand, env)
    raise InputError("trigonometric arguments must be integer multiples of phi")


def to_laurent(e: Expr, env: Mapping[str, Fraction]) -> LaurentRho:
    """Exact Laurent series in rho with trigonometric coefficients in phi."""
    if isinstance(e, Num):
        return LaurentRho({0: TrigPoly.constant(e.value)})
    if isinstance(e, Var):
        if e.name == "rho":
            return LaurentRho({1: TrigPoly.one()})
        if e.name in env:
            return LaurentRho({0: TrigPoly.constant(env[e.name])})
        if e.name == "phi":
            raise InputError("phi may only appear inside cos() or sin()")
        raise InputError(f"unbound parameter {e.name!r}")
    if isinstance(e, Call):
        k = _harmonic(e.arg, env)
        t = TrigPoly.cos(abs(k)) if e.func == "cos" else TrigPoly.sin(abs(k)) * (1 if k >= 0 else -1)
        return LaurentRho({0: t})
    if isinstance(e, Neg):
        return -to_laurent(e.operand, env)
    if isinstance(e, Pow):
        base = to_laurent(e.base, env)
        if e.exponent >= 0:
            out = LaurentRho({0: TrigPoly.one()})
            for _ in range(e.exponent):
                out = out * base
            return out
        if len(base.coeffs) == 1:
            (n, t), = base.coeffs.items()
            if t.is_constant() and t.coeff(0):
                return LaurentRho({n * e.exponent: TrigPoly.constant(t.coeff(0) ** e.exponent)})
        raise InputError("negative exponents are only allowed on monomials c*rho^k")
    a, b = to_laurent(e.left, env), to_laurent(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    c = _constant_laurent(b)
    return a * (1 / c)


def _constant_laurent(b: LaurentRho) -> Fraction:
    if set(b.coeffs) != {0} or not b[0].is_constant() or not b[0].coeff(0).is_real() or not b[0].coeff(0):
        raise InputError("can only divide by a nonzero constant")
    return b[0].coeff(0).re


@dataclass(frozen=True)
class SweepSpec:
    name: str
    start: Fraction
    stop: Fraction
    steps: int

    def values(self) -> list[Fraction]:
        if self.steps <= 0:
            return []
        if self.steps == 1:
            return [self.start]
        h = (self.stop - self.start) / (self.steps - 1)
        return [self.start + i * h for i in range(self.steps)]


@dataclass
class ProblemSpec:
    source: str
    program: Program
    dx: Expr
    dy: Expr
    params: dict[str, Fraction] = field(default_factory=dict)
    weights: Optional[tuple[int, int]] = None
    mode: Mode = Mode.AUTO
    V: Optional[Expr] = None
    sweep: Optional[SweepSpec] = None
    max_order: int = 6
    m_window: tuple[int, int] = (-8, 8)
    tol_zero: float = 1e-9
    oracle: bool = True

    def bindings(self) -> list[dict[str, Fraction]]:
        """Parameter environments, one per analysis sample."""
        if self.sweep is None:
            return [dict(self.params)]
        return [{**self.params, self.sweep.name: v} for v in self.sweep.values()]

    def vector_field(self, env: Mapping[str, Fraction]) -> PolyVectorField:
        P, Q = to_poly(self.dx, env), to_poly(self.dy, env)
        return PolyVectorField(P, Q, dict(env))

    def closed_form(self, X: PolyVectorField, w: tuple[int, int], env) -> ClosedFormIIF | None:
        if self.V is None:
            return None
        names = free_names(self.V) - set(env)
        if names & set(POLAR) and names & set(CARTESIAN):
            raise InputError("V mixes Cartesian (x, y) and polar (rho, phi) variables")
        if names & set(POLAR):
            V = to_laurent(self.V, env)
            origin = "polar"
        else:
            V = cartesian_iif_to_polar(to_poly(self.V, env), X, w)
            origin = "cartesian"
        if V.is_zero():
            raise InputError("V is identically zero")
        return ClosedFormIIF(V, V.leading_exponent, origin)


def build_spec(program: Program, source: str = "", **options) -> ProblemSpec:
    exprs: dict[str, Expr] = {}
    params: dict[str, Fraction] = {}
    weights = sweep = None
    for s in program.statements:
        if isinstance(s, Assign):
            if s.target in exprs:
                raise InputError(f"{s.target} is assigned twice")
            exprs[s.target] = s.expr
        elif isinstance(s, Param):
            if s.name in params:
                raise InputError(f"parameter {s.name} is bound twice")
            params[s.name] = s.value
        elif isinstance(s, Weights):
            if s.p <= 0 or s.q <= 0:
                raise InputError("weights must be positive")
            weights = (s.p, s.q)
        elif isinstance(s, Sweep):
            if sweep is not None:
                raise InputError("only one sweep statement is supported")
            sweep = SweepSpec(s.name, s.start, s.stop, s.steps)
    dx, dy, V = exprs.get("dx"), exprs.get("dy"), exprs.get("V")
    if sweep is not None and sweep.name in params:
        raise InputError(f"{sweep.name} is both a fixed parameter and the sweep variable")
    if dx is None or dy is None:
        raise InputError("both dx and dy must be given")
    bound = set(params) | ({sweep.name} if sweep else set())
    for label, e in (("dx", dx), ("dy", dy)):
        missing = free_names(e) - bound - set(CARTESIAN)
        if missing:
            raise InputError(f"unbound parameter(s) in {label}: {', '.join(sorted(missing))}")
    if V is not None:
        missing = free_names(V) - bound - set(CARTESIAN) - set(POLAR)
        if missing:
            raise InputError(f"unbound parameter(s) in V: {', '.join(sorted(missing))}")
    spec = ProblemSpec(source, program, dx, dy, params, weights, V=V, sweep=sweep)
    for k, v in options.items():
        if v is not None:
            setattr(spec, k, v)
    return spec


def parse_input(text: str, **options) -> ProblemSpec:
    """Parse and check an input file; raises ParseError or InputError."""
    spec = build_spec(parse_program(text), text, **options)
    # evaluate once so that non-polynomial input fails early
    for env in spec.bindings()[:1] or [dict(spec.params, **({spec.sweep.name: spec.sweep.start} if spec.sweep else {}))]:
        to_poly(spec.dx, env)
        to_poly(spec.dy, env)
    return spec

"""Periodic solutions of the singular linear equation G v' + P v + Q = 0 on the circle.

The homogeneous monodromy mu(2 pi) and the forcing integral zeta(2 pi) decide the case:
mu != 1 gives a unique periodic solution, mu = 1 gives a one-parameter family when
zeta = 0 and none otherwise.  Solutions are represented on a line shifted into the
upper half plane; requiring the result to continue to a real-analytic function on the
circle produces linear conditions on carried constants (or an obstruction).

mu and zeta are computed along two independent routes: (A) spectrally on the shifted
line closed by vertical legs, with residues for rational integrands, and (B) by
adaptive ODE integration along the real axis indented above each real singularity.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import integrate, linalg

from ..errors import PVUndefined, RootFindingFailure
from ..residue_pv import phi_residues, pv_contour_integral
from ..trigfun import RationalTrig, TrigPoly, zeros_on_circle
from .coef import CoefficientFn, Component, Key, rationalize
from .exact import ExactOperator, default_degree
from .linegrid import LineGrid, admissibility_metrics, trig_eval

log = logging.getLogger(__name__)

TOL_MU = 1e-8
TOL_COND = 1e-6


class ObstructionKind(str, enum.Enum):
    XI_NONZERO = "XiNonzero"
    MU_NOT_ONE = "MuNotOne"
    ZETA_NONZERO = "ZetaNonzero"
    UNBOUNDED = "Unbounded"
    NON_PERIODIC_TERM = "NonPeriodicTerm"
    CONSTANT_SYSTEM_INCONSISTENT = "ConstantSystemInconsistent"


@dataclass
class ObstructionRecord:
    kind: ObstructionKind
    index: int
    value: float
    error_estimate: float
    provenance: dict[str, float] = field(default_factory=dict)
    paths_agree: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "index": self.index,
            "value": self.value,
            "error_estimate": self.error_estimate,
            "provenance": dict(sorted(self.provenance.items())),
            "paths_agree": self.paths_agree,
            "note": self.note,
        }


# ---------------------------------------------------------------------------
# operator data
# ---------------------------------------------------------------------------


def _gauss_leg(n: int = 48):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


class Operator:
    """L v = lead * v' + lin * v, analysed on a fixed line grid."""

    def __init__(self, lead: TrigPoly, lin: TrigPoly, grid: LineGrid, *, omega=None, tol_mu: float = TOL_MU):
        self.lead, self.lin, self.grid = lead, lin, grid
        self.omega = list(omega) if omega is not None else [a for a, _ in zeros_on_circle(lead)]
        self.G, self.Gd = grid.trig_on_line(lead)
        self.P, _ = grid.trig_on_line(lin)
        a = self.P / self.G
        self.a0, self.Atil = grid.primitive(a)
        self.eA = np.exp(self.Atil)
        self.emA = np.exp(-self.Atil)
        self.mu_line = complex(np.exp(2 * np.pi * self.a0))
        self.case_ii = abs(self.mu_line - 1) < tol_mu
        self.k0 = int(-round(self.a0.imag)) if self.case_ii else None
        self.phi_b = base_point(self.omega)
        self._exact: dict[int, ExactOperator] = {}
        self._mu_res: tuple[complex, float] | None = None
        self._lam_leg: complex | None = None

    # exact ------------------------------------------------------------
    def exact_op(self, D: int) -> ExactOperator:
        if D not in self._exact:
            self._exact[D] = ExactOperator(self.lead, self.lin, D)
        return self._exact[D]

    def exact_null(self) -> list[TrigPoly]:
        return self.exact_op(default_degree(self.lead, self.lin)).nullspace()

    def exact_solve(self, f: TrigPoly) -> TrigPoly | None:
        return self.exact_op(default_degree(self.lead, self.lin, f)).solve(f)

    # monodromy ----------------------------------------------------------
    def mu_residues(self) -> tuple[complex, float] | None:
        """mu_+(2 pi) = exp(FP int P/G - i pi sum of angle residues), by residues."""
        if self._mu_res is None:
            try:
                W = RationalTrig(self.lin, self.lead)
                pv = pv_contour_integral(W, finite_part=True)
                res = sum(r for _, r in phi_residues(W))
                self._mu_res = (complex(np.exp(pv.value - 1j * np.pi * res)), pv.error_estimate)
            except (PVUndefined, RootFindingFailure) as exc:
                log.debug("residue path for mu unavailable: %s", exc)
                self._mu_res = (complex("nan"), math.inf)
        return None if math.isnan(self._mu_res[0].real) else self._mu_res

    def a_at(self, z):
        return trig_eval(self.lin)(z) / trig_eval(self.lead)(z)

    def lam_leg(self) -> complex:
        """Integral of P/G along the vertical leg from phi_b to phi_b + i delta."""
        if self._lam_leg is None:
            t, w = _gauss_leg()
            z = self.phi_b + 1j * self.grid.delta * t
            self._lam_leg = complex(np.sum(w * self.a_at(z)) * 1j * self.grid.delta)
        return self._lam_leg

    # spectral solutions -----------------------------------------------
    def homogeneous_line(self) -> np.ndarray:
        """exp(-int a) on the line (periodic only in case (ii))."""
        k0 = self.k0 or 0
        return np.exp(1j * k0 * self.grid.phi) * self.emA

    def particular_line(self, Q: np.ndarray) -> tuple[np.ndarray, complex]:
        """Periodic line solution of L v = -Q; in case (ii) also the resonant coefficient."""
        g = self.grid
        h = g.coeffs(Q / self.G * self.eA)
        denom = self.a0 + 1j * g.k
        resonant = 0j
        if self.case_ii:
            idx = self.k0 % g.n
            resonant = complex(h[idx])
            denom = denom.copy()
            denom[idx] = np.inf
        w = -h / denom
        return self.emA * g.from_coeffs(w), resonant

    def zeta_line(self, Q: np.ndarray, leg_zeta: complex = 0j) -> complex:
        """zeta(2 pi) with mu(phi_b) = 1, closing the line by vertical legs (route A)."""
        g = self.grid
        h = g.coeffs(Q / self.G * self.eA)
        a0 = self.a0
        A_b = complex(g.eval_line_param(self.Atil, self.phi_b))
        lam_L = self.lam_leg()
        pref = np.exp(lam_L - a0 * self.phi_b - A_b)
        s = a0 + 1j * g.k
        mono = np.exp(2 * np.pi * a0)
        with np.errstate(divide="ignore", invalid="ignore"):
            E = np.where(np.abs(s) > 1e-12,
                         np.exp(s * self.phi_b) * (mono - 1) / s,
                         2 * np.pi * np.exp(s * self.phi_b))
        line_part = complex(pref * np.sum(h * E))
        return (1 - self.mu_line) * leg_zeta + line_part

    def derivative_from_ode(self, v: np.ndarray, Q: np.ndarray | None) -> np.ndarray:
        rhs = self.P * v + (Q if Q is not None else 0)
        return -rhs / self.G


def base_point(omega: list[float]) -> float:
    """Midpoint of the first largest arc between characteristic angles (0 if none)."""
    if not omega:
        return 0.0
    angs = sorted(omega)
    best, mid = -1.0, 0.0
    for i, a in enumerate(angs):
        b = angs[i + 1] if i + 1 < len(angs) else angs[0] + 2 * np.pi
        if b - a > best + 1e-12:
            best, mid = b - a, (a + b) / 2
    return mid % (2 * np.pi)


# ---------------------------------------------------------------------------
# route B: indented real path
# ---------------------------------------------------------------------------


def _segments(phi_b: float, omega: list[float], radius: float):
    two_pi = 2 * np.pi
    poles = sorted(((a - phi_b) % two_pi) + phi_b for a in omega)
    segs = []
    cur = phi_b
    for p in poles:
        segs.append(("line", complex(cur), complex(p - radius)))
        segs.append(("arc", p, radius))
        cur = p + radius
    segs.append(("line", complex(cur), complex(phi_b + two_pi)))
    return segs


def integrate_indented(a_fun: Callable, b_fun: Callable | None, phi_b: float, omega: list[float],
                       radius: float, *, rtol: float = 1e-11) -> tuple[complex, complex]:
    """(lambda(2 pi), zeta(2 pi)) along the real axis, passing above each real singularity."""
    lam, zeta = 0j, 0j
    for seg in _segments(phi_b, omega, radius):
        if seg[0] == "line":
            z0, z1 = seg[1], seg[2]
            path = (lambda s, z0=z0, z1=z1: z0 + (z1 - z0) * s)
            dpath = (lambda s, z0=z0, z1=z1: z1 - z0)
        else:
            c, r = seg[1], seg[2]
            path = (lambda s, c=c, r=r: c + r * np.exp(1j * np.pi * (1 - s)))
            dpath = (lambda s, c=c, r=r: -1j * np.pi * r * np.exp(1j * np.pi * (1 - s)))

        def rhs(s, y, path=path, dpath=dpath):
            z = path(s)
            dz = dpath(s)
            da = a_fun(z) * dz
            db = (b_fun(z) * np.exp(y[0]) * dz) if b_fun is not None else 0j
            return np.array([da, db], dtype=complex)

        sol = integrate.solve_ivp(rhs, (0.0, 1.0), np.array([lam, zeta], dtype=complex),
                                  method="DOP853", rtol=rtol, atol=1e-13)
        if not sol.success:
            raise RuntimeError(f"indented integration failed: {sol.message}")
        lam, zeta = sol.y[0, -1], sol.y[1, -1]
    return complex(lam), complex(zeta)


def integrate_leg(a_fun: Callable, b_fun: Callable, phi_b: float, delta: float) -> complex:
    """zeta accumulated along the vertical leg phi_b -> phi_b + i delta (mu(phi_b) = 1)."""
    def rhs(s, y):
        z = phi_b + 1j * delta * s
        dz = 1j * delta
        return np.array([a_fun(z) * dz, b_fun(z) * np.exp(y[0]) * dz], dtype=complex)

    sol = integrate.solve_ivp(rhs, (0.0, 1.0), np.zeros(2, dtype=complex), method="DOP853",
                              rtol=1e-12, atol=1e-14)
    return complex(sol.y[1, -1])


# ---------------------------------------------------------------------------
# constant conditions
# ---------------------------------------------------------------------------


@dataclass
class ConditionBlock:
    """Real condition rows split by meaning, for one affine key."""

    jump: np.ndarray      # Re of the resonant zeta (case ii)
    branch: np.ndarray    # Im of resonant zeta and conjugate-symmetry defects
    tail: np.ndarray      # Fourier tail on the real axis

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.jump, self.branch, self.tail])

    @staticmethod
    def sizes(b: ConditionBlock) -> tuple[int, int, int]:
        return len(b.jump), len(b.branch), len(b.tail)


@dataclass
class ConstantSolution:
    consistent: bool
    rules: dict[str, tuple[float, dict[str, float]]]
    residual_groups: dict[str, float]
    rank: int


def solve_constant_system(rhs: ConditionBlock, columns: dict[str, ConditionBlock], scale: float,
                          tol: float = TOL_COND) -> ConstantSolution:
    """Find constants with rhs + sum c_i col_i = 0 (least squares + rank revealing QR)."""
    names = list(columns)
    b = rhs.stacked() / scale
    sizes = ConditionBlock.sizes(rhs)
    if not names:
        res = b
        rules: dict[str, tuple[float, dict[str, float]]] = {}
        rank = 0
    else:
        A = np.column_stack([columns[n].stacked() for n in names]) / scale
        Q, R, piv = linalg.qr(A, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > max(1e-8 * (diag[0] if len(diag) else 0), 1e-9)))
        x = np.zeros(len(names))
        rules = {}
        if rank:
            R11 = R[:rank, :rank]
            R12 = R[:rank, rank:]
            y = Q[:, :rank].T @ (-b)
            x0 = linalg.solve_triangular(R11, y)
            Mfree = linalg.solve_triangular(R11, -R12) if R12.size else np.zeros((rank, 0))
            for i in range(rank):
                name = names[piv[i]]
                lin = {names[piv[rank + f]]: float(Mfree[i, f]) for f in range(len(names) - rank)
                       if abs(Mfree[i, f]) > 1e-13}
                rules[name] = (float(x0[i]), lin)
                x[piv[i]] = x0[i]
        res = b + A @ x
    j, br, _ = sizes
    groups = {
        "jump": float(np.max(np.abs(res[:j]), initial=0.0)),
        "branch": float(np.max(np.abs(res[j:j + br]), initial=0.0)),
        "tail": float(np.max(np.abs(res[j + br:]), initial=0.0)),
    }
    consistent = all(v <= tol for v in groups.values())
    return ConstantSolution(consistent, rules, groups, rank)


def condition_block(grid: LineGrid, v: np.ndarray, resonant: complex | None) -> ConditionBlock:
    m = admissibility_metrics(grid, v)
    if resonant is None:
        jump, rim = np.zeros(0), np.zeros(0)
    else:
        jump, rim = np.array([resonant.real]), np.array([resonant.imag])
    return ConditionBlock(jump, np.concatenate([rim, m["real"]]), m["tail"])


# ---------------------------------------------------------------------------
# one step of the recursion
# ---------------------------------------------------------------------------


@dataclass
class ForcingPart:
    exact: TrigPoly | None
    line: np.ndarray


@dataclass
class StepOutcome:
    coefficient: CoefficientFn | None
    obstruction: ObstructionRecord | None
    new_constants: list[str]
    rules: dict[str, tuple[float, dict[str, float]]]
    conditions_imposed: bool
    diagnostics: dict


def _exact_value_at(t: TrigPoly, phi: float) -> Fraction | None:
    q = phi / (np.pi / 2)
    if abs(q - round(q)) < 1e-12:
        v = t.value_at_pi_multiple(int(round(q)), 2)
        if v is not None and v.is_real():
            return v.re
    return None


def normalize_to(comp_exact: TrigPoly | None, line: np.ndarray, grid: LineGrid, phi_b: float,
                 target: float | Fraction) -> tuple[TrigPoly | None, np.ndarray, complex]:
    """Scale a homogeneous solution so its value at phi_b equals target."""
    if comp_exact is not None:
        val = _exact_value_at(comp_exact, phi_b)
        if val is None:
            fv = float(np.real(trig_eval(comp_exact)(phi_b)))
            val = rationalize(fv, 10**9, 1e-15) or Fraction(fv)
        if val == 0:
            mx = max(comp_exact.coeffs.values(), key=lambda c: abs(complex(c)))
            val = mx.re if mx.re else mx.im
        tgt = target if isinstance(target, Fraction) else (rationalize(float(target), 10**9, 1e-14) or Fraction(float(target)))
        s = tgt / val
        return comp_exact * s, line * float(s), complex(float(s))
    from .linegrid import FourierRep

    rep = FourierRep.from_line(grid, line)
    val = complex(rep.both(np.array([phi_b]))[0][0])
    if abs(val) < 1e-10 * max(1.0, float(np.max(np.abs(line)))):
        val = complex(line[np.argmax(np.abs(line))])
    s = complex(float(target)) / val
    return None, line * s, s


class StepContext:
    """Per-chain services used by solve_step: constant naming and forcing evaluators."""

    def __init__(self, const_prefix: str = "C"):
        self._n = 0
        self.prefix = const_prefix

    def new_constant(self) -> str:
        self._n += 1
        return f"{self.prefix}{self._n}"


def solve_step(op: Operator, index: int, forcing: dict[Key, ForcingPart], ctx: StepContext, *,
               v_ref: float | Fraction = 1, forcing_at: Callable | None = None,
               carried: list[str] | None = None, tol_zero: float = 1e-9, dual_path: bool = True) -> StepOutcome:
    """Solve L v_index = -Q for every affine key, then impose real-analyticity."""
    g = op.grid
    carried = carried or []
    diag: dict = {"index": index, "mu_line": op.mu_line, "case": "ii" if op.case_ii else "i"}
    mr = op.mu_residues()
    if mr is not None:
        diag["mu_residues"] = mr[0]
    parts: dict[Key, Component] = {}
    numeric: list[Key] = []
    for key, fp in forcing.items():
        if fp.exact is not None:
            sol = TrigPoly.zero() if fp.exact.is_zero() else op.exact_solve(-fp.exact)
            if sol is not None:
                parts[key] = Component.from_exact(sol, g)
                continue
        numeric.append(key)

    new_consts: list[str] = []
    gauge_line = None
    vh_exact = None
    if op.case_ii:
        null = op.exact_null()
        name = ctx.new_constant()
        new_consts.append(name)
        if null:
            vh_exact = null[0]
            ex, line, _ = normalize_to(vh_exact, trig_eval(vh_exact)(g.z), g, op.phi_b, v_ref)
            vh_exact = ex
            parts[name] = Component.from_exact(ex, g)
        else:
            _, line, _ = normalize_to(None, op.homogeneous_line(), g, op.phi_b, v_ref)
            parts[name] = Component(None, line, op.derivative_from_ode(line, None), g)
            gauge_line = 1j * line

    resonant: dict[Key, complex] = {}
    blocks: dict[Key, ConditionBlock] = {}
    for key in numeric:
        Q = forcing[key].line
        v, res = op.particular_line(Q)
        parts[key] = Component(None, v, op.derivative_from_ode(v, Q), g)
        if op.case_ii:
            # canonical normalization: mu(phi_b) = 1 / v_ref
            z = op.zeta_line(Q) / float(v_ref)
            resonant[key] = z
        blocks[key] = condition_block(g, v, resonant.get(key) if op.case_ii else None)
    if None in resonant:
        diag["zeta_line"] = resonant[None]
        diag["jump"] = -resonant[None].real
        diag["branch"] = -resonant[None].imag

    # residue route for the resonant value when everything is exact except the solution itself
    if op.case_ii and None in numeric and forcing[None].exact is not None and vh_exact is not None:
        try:
            W = RationalTrig(-forcing[None].exact, op.lead * vh_exact)
            fp = pv_contour_integral(W, finite_part=True)
            rs = sum(r for _, r in phi_residues(W))
            diag["jump_residues"] = float(fp.value.real)
            diag["branch_residues"] = float(-np.pi * rs.real)
        except Exception as exc:  # noqa: BLE001 - diagnostics only
            log.debug("residue route for zeta unavailable: %s", exc)

    if not numeric:
        coef = CoefficientFn(index, parts, g)
        return StepOutcome(coef, None, new_consts, {}, False, diag)

    # build the real condition system
    def empty_block(n_j: int) -> ConditionBlock:
        any_block = next(iter(blocks.values()))
        return ConditionBlock(np.zeros(len(any_block.jump)), np.zeros(len(any_block.branch)),
                              np.zeros(len(any_block.tail)))

    rhs = blocks.get(None) or empty_block(0)
    columns: dict[str, ConditionBlock] = {k: b for k, b in blocks.items() if k is not None}
    if gauge_line is not None:
        nb = condition_block(g, parts[new_consts[0]].line, 0j if op.case_ii else None)
        columns[new_consts[0]] = nb
        gb = condition_block(g, gauge_line, 0j if op.case_ii else None)
        columns["__gauge__"] = gb
    scale = max([admissibility_metrics(g, parts[k].line)["scale"] for k in numeric] + [1e-300])
    sol = solve_constant_system(rhs, columns, scale)
    diag["condition_residuals"] = sol.residual_groups

    if not sol.consistent:
        return StepOutcome(None, _classify(op, index, sol, forcing, parts, numeric, resonant, diag, carried,
                                           forcing_at, v_ref, dual_path, tol_zero),
                           new_consts, {}, True, diag)

    # apply gauge and constants
    rules = dict(sol.rules)
    gauge = rules.pop("__gauge__", None)
    for r in rules.values():
        r[1].pop("__gauge__", None)
    if gauge is not None and abs(gauge[0]) > 1e-12:
        add = Component(None, gauge_line * gauge[0], op.derivative_from_ode(gauge_line * gauge[0], None), g)
        parts[None] = parts[None] + add if None in parts else add
    rules = {k: (_rat(x0), {f: _rat(w) for f, w in lin.items()}) for k, (x0, lin) in rules.items()}
    coef = CoefficientFn(index, parts, g).substitute(rules)
    imposed = any(k in carried for k in rules)
    # a new homogeneous constant fixed by conditions is not carried
    for k in list(rules):
        if k in new_consts:
            new_consts.remove(k)
    return StepOutcome(coef, None, new_consts, {k: v for k, v in rules.items() if k in carried}, imposed, diag)


def _rat(x: float):
    r = rationalize(x, 10**6, 1e-11)
    return r if r is not None else x


def _classify(op: Operator, index: int, sol: ConstantSolution, forcing, parts, numeric, resonant, diag,
              carried, forcing_at, v_ref, dual_path: bool, tol_zero: float) -> ObstructionRecord:
    groups = sol.residual_groups
    # a non-periodic (secular) part is reported ahead of branch and growth defects
    worst = "jump" if groups["jump"] > TOL_COND else max(groups, key=groups.get)
    involved = [k for k in sol.rules if k in carried]
    provenance: dict[str, float] = {}
    agree = True
    note = ""
    if op.case_ii and worst in ("jump", "branch") and None in resonant:
        z = resonant[None]
        if worst == "jump":
            kind = ObstructionKind.NON_PERIODIC_TERM
            value = -z.real
            provenance["line"] = value
            if "jump_residues" in diag:
                provenance["residues"] = diag["jump_residues"]
        else:
            kind = ObstructionKind.ZETA_NONZERO
            value = -z.imag
            provenance["line"] = value
            if "branch_residues" in diag:
                provenance["residues"] = diag["branch_residues"]
    elif worst == "tail":
        kind = ObstructionKind.UNBOUNDED
        value = groups["tail"]
        provenance["line"] = value
    else:
        kind = ObstructionKind.ZETA_NONZERO
        value = groups["branch"]
        provenance["line_relative_defect"] = value
        if not op.case_ii:
            zeta_A, zeta_B = _dual_zeta(op, forcing, forcing_at, diag, dual_path)
            if zeta_A is not None:
                value = zeta_A.imag
                provenance["line"] = zeta_A.imag
            if zeta_B is not None:
                provenance["quadrature"] = zeta_B.imag
    if involved:
        kind = ObstructionKind.CONSTANT_SYSTEM_INCONSISTENT
        note = "conditions on carried constants " + ", ".join(involved) + " are inconsistent"
    vals = [v for k, v in provenance.items() if k in ("line", "residues", "quadrature")]
    err = float(max(vals) - min(vals)) if len(vals) > 1 else float("nan")
    if len(vals) > 1:
        big = [abs(v) > tol_zero for v in vals]
        agree = all(big) or not any(big)
    return ObstructionRecord(kind, index, float(value), err, provenance, agree, note)


def _dual_zeta(op: Operator, forcing, forcing_at, diag, dual_path: bool):
    """Im zeta(2 pi) (mu(phi_b) = 1) of the constant-free forcing along routes A and B."""
    if forcing_at is None or None not in forcing:
        return None, None
    Q = forcing[None].line

    def b_fun(z):
        return forcing_at(z) / trig_eval(op.lead)(z)

    try:
        leg = integrate_leg(op.a_at, b_fun, op.phi_b, op.grid.delta)
        zA = op.zeta_line(Q, leg)
    except Exception as exc:  # noqa: BLE001
        log.debug("route A failed: %s", exc)
        zA = None
    zB = None
    if dual_path:
        try:
            h = op.grid.delta * 2
            gaps = np.diff(sorted(op.omega) + [sorted(op.omega)[0] + 2 * np.pi]) if op.omega else [2 * np.pi]
            radius = float(min(0.3 * h, 0.2, 0.3 * min(gaps)))
            lam, zB = integrate_indented(op.a_at, b_fun, op.phi_b, op.omega, radius)
            diag["mu_quadrature"] = complex(np.exp(lam))
        except Exception as exc:  # noqa: BLE001
            log.debug("route B failed: %s", exc)
    if zA is not None:
        diag["zeta_line"] = zA
    if zB is not None:
        diag["zeta_quadrature"] = zB
    return zA, zB


def leading_step(op: Operator, index: int, ctx: StepContext) -> StepOutcome:
    """Homogeneous leading equation: a nonzero admissible solution must exist."""
    g = op.grid
    diag: dict = {"index": index, "mu_line": op.mu_line, "case": "ii" if op.case_ii else "i"}
    mr = op.mu_residues()
    if mr is not None:
        diag["mu_residues"] = mr[0]
    if not op.case_ii:
        prov = {"line": abs(op.mu_line - 1)}
        if mr is not None:
            prov["residues"] = abs(mr[0] - 1)
        rec = ObstructionRecord(ObstructionKind.MU_NOT_ONE, index, abs(op.mu_line - 1),
                                abs(op.mu_line - mr[0]) if mr else float("nan"), prov)
        return StepOutcome(None, rec, [], {}, False, diag)
    null = op.exact_null()
    if null:
        ex, _, _ = normalize_to(null[0], trig_eval(null[0])(g.z), g, op.phi_b, 1)
        coef = CoefficientFn(index, {None: Component.from_exact(ex, g)}, g)
        return StepOutcome(coef, None, [], {}, False, diag)
    _, line, _ = normalize_to(None, op.homogeneous_line(), g, op.phi_b, 1)
    m = admissibility_metrics(g, line)
    scale = m["scale"] or 1.0
    real_def = float(np.max(np.abs(m["real"]))) / scale
    tail_def = float(np.max(np.abs(m["tail"]))) / scale
    diag["condition_residuals"] = {"branch": real_def, "tail": tail_def}
    if real_def <= TOL_COND and tail_def <= TOL_COND:
        comp = Component(None, line, op.derivative_from_ode(line, None), g)
        return StepOutcome(CoefficientFn(index, {None: comp}, g), None, [], {}, False, diag)
    kind = ObstructionKind.UNBOUNDED if tail_def >= real_def else ObstructionKind.ZETA_NONZERO
    rec = ObstructionRecord(kind, index, max(real_def, tail_def), float("nan"), {"line": max(real_def, tail_def)})
    return StepOutcome(None, rec, [], {}, False, diag)


# ---------------------------------------------------------------------------
# public single-equation API
# ---------------------------------------------------------------------------


@dataclass
class PeriodicODE:
    leading: TrigPoly
    linear_coeff: TrigPoly
    forcing: TrigPoly | np.ndarray | None
    index: int = 0


def solve_periodic_ode(eq: PeriodicODE, *, grid: LineGrid | None = None) -> CoefficientFn | ObstructionRecord:
    """Periodic real-analytic solution of leading*v' + linear_coeff*v + forcing = 0.

    In the resonant case the free homogeneous component is reported as constant 'C1'.
    A zero forcing in the non-resonant case returns v = 0.
    """
    grid = grid or LineGrid.for_lead(eq.leading)
    op = Operator(eq.leading, eq.linear_coeff, grid)
    if eq.forcing is None or (isinstance(eq.forcing, TrigPoly) and eq.forcing.is_zero()):
        fp = ForcingPart(TrigPoly.zero(), np.zeros(grid.n, dtype=complex))
    elif isinstance(eq.forcing, TrigPoly):
        fp = ForcingPart(eq.forcing, trig_eval(eq.forcing)(grid.z))
    else:
        fp = ForcingPart(None, np.asarray(eq.forcing, dtype=complex))
    fa = trig_eval(eq.forcing) if isinstance(eq.forcing, TrigPoly) else None
    out = solve_step(op, eq.index, {None: fp}, StepContext(), forcing_at=fa)
    return out.coefficient if out.obstruction is None else out.obstruction


def admissibility_check(v: CoefficientFn, omega=None, *, tol: float = TOL_COND) -> ObstructionRecord | None:
    """None when every affine part of v continues to a real-analytic function on the circle."""
    for key, comp in v.parts.items():
        if comp.exact is not None:
            if not comp.exact.is_real():
                return ObstructionRecord(ObstructionKind.ZETA_NONZERO, v.index, 1.0, 0.0, {"exact": 1.0})
            continue
        m = admissibility_metrics(v.grid, comp.line)
        scale = m["scale"] or 1.0
        rd = float(np.max(np.abs(m["real"]))) / scale
        td = float(np.max(np.abs(m["tail"]))) / scale
        if td > tol:
            return ObstructionRecord(ObstructionKind.UNBOUNDED, v.index, td, float("nan"), {"line": td})
        if rd > tol:
            return ObstructionRecord(ObstructionKind.ZETA_NONZERO, v.index, rd, float("nan"), {"line": rd})
    return None

"""Exact trigonometric polynomials with Gaussian-rational coefficients.

A trigonometric polynomial is stored in exponential form, f(phi) = sum_k c_k e^{ik phi},
which is the same data as a Laurent polynomial in z = e^{i phi}.  Rational functions of
cos and sin become rational functions of z on the unit circle.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

import numpy as np

HARMONIC_CAP = 512

Scalar = Union[int, Fraction, "GaussRat"]


class HarmonicOverflow(ValueError):
    """Raised when an operation would exceed the harmonic cap."""


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------


class GaussRat:
    """Element a + b i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction | str = 0, im: int | Fraction | str = 0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @staticmethod
    def coerce(x) -> GaussRat:
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Fraction)):
            return GaussRat(x)
        if isinstance(x, float):
            raise TypeError("floats are not exact; convert with Fraction first")
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussRat")

    def __add__(self, o):
        try:
            o = GaussRat.coerce(o)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, o):
        try:
            o = GaussRat.coerce(o)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re - o.re, self.im - o.im)

    def __rsub__(self, o):
        return GaussRat.coerce(o) - self

    def __mul__(self, o):
        try:
            o = GaussRat.coerce(o)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> GaussRat:
        return GaussRat(self.re, -self.im)

    def inverse(self) -> GaussRat:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GaussRat division by zero")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, o):
        try:
            o = GaussRat.coerce(o)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return GaussRat.coerce(o) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = GaussRat(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __pos__(self):
        return self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, o):
        try:
            o = GaussRat.coerce(o)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    def __repr__(self):
        if self.im == 0:
            return f"GaussRat({self.re})"
        return f"GaussRat({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    @staticmethod
    def from_complex(z: complex, max_den: int = 10**7) -> GaussRat:
        """Closest Gaussian rational with bounded denominators (used for rounding guesses)."""
        return GaussRat(Fraction(z.real).limit_denominator(max_den),
                        Fraction(z.imag).limit_denominator(max_den))


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)


# ---------------------------------------------------------------------------
# dense univariate polynomials over Q(i); index = power
# ---------------------------------------------------------------------------


def ptrim(a: list[GaussRat]) -> list[GaussRat]:
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def padd(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO) for i in range(n)])


def psub(a, b):
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else ZERO) - (b[i] if i < len(b) else ZERO) for i in range(n)])


def pscale(a, s):
    s = GaussRat.coerce(s)
    return ptrim([x * s for x in a])


def pmul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return ptrim(out)


def pdivmod(a, b):
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = ptrim(a)
    if len(a) < len(b):
        return [], a
    inv = b[-1].inverse()
    rem = list(a)
    quo = [ZERO] * (len(a) - len(b) + 1)
    for k in range(len(a) - len(b), -1, -1):
        c = rem[k + len(b) - 1] * inv
        quo[k] = c
        if c:
            for i, y in enumerate(b):
                rem[k + i] = rem[k + i] - c * y
    return ptrim(quo), ptrim(rem[: len(b) - 1])


def pmonic(a):
    a = ptrim(a)
    if not a:
        return a
    return pscale(a, a[-1].inverse())


def pgcd(a, b):
    a, b = ptrim(a), ptrim(b)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, r
    return pmonic(a)


def pderiv(a):
    return ptrim([a[i] * i for i in range(1, len(a))])


def pinv_mod(a, m):
    """s with a*s = 1 mod m (requires gcd(a, m) = 1)."""
    r0, r1 = ptrim(m), pdivmod(a, m)[1]
    s0, s1 = [], [ONE]
    while r1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, psub(s0, pmul(q, s1))
    if len(r0) != 1:
        raise ValueError("polynomials are not coprime")
    return pdivmod(pscale(s0, r0[0].inverse()), m)[1]


def ppow(a, n):
    out = [ONE]
    for _ in range(n):
        out = pmul(out, a)
    return out


def peval(a, z):
    """Horner evaluation at float/complex/array points."""
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in reversed(a):
        acc = acc * z + complex(c)
    return acc


def squarefree(a) -> list[tuple[list[GaussRat], int]]:
    """Yun's algorithm: a = lc * prod f_i^i with f_i squarefree, monic and pairwise coprime."""
    a = ptrim(a)
    if len(a) <= 1:
        return []
    out = []
    da = pderiv(a)
    g = pgcd(a, da)
    b = pdivmod(a, g)[0]
    c = pdivmod(da, g)[0]
    d = psub(c, pderiv(b))
    i = 1
    while len(b) > 1:
        f = pgcd(b, d)
        b = pdivmod(b, f)[0]
        c = pdivmod(d, f)[0]
        d = psub(c, pderiv(b))
        if len(f) > 1:
            out.append((f, i))
        i += 1
    return out


# ---------------------------------------------------------------------------
# Laurent polynomials in z
# ---------------------------------------------------------------------------


class LaurentPoly:
    """Finite sum of c_n z^n, n in Z, with Gaussian-rational coefficients."""

    __slots__ = ("_c", "_dense_c")

    def __init__(self, coeffs: dict[int, Scalar] | None = None):
        self._dense_c = None
        self._c: dict[int, GaussRat] = {}
        for n, v in (coeffs or {}).items():
            v = GaussRat.coerce(v)
            if v:
                self._c[int(n)] = v

    @classmethod
    def from_dense(cls, low: int, dense: Iterable[GaussRat]) -> LaurentPoly:
        return cls({low + i: c for i, c in enumerate(dense)})

    @property
    def coeffs(self) -> dict[int, GaussRat]:
        return dict(self._c)

    def dense(self) -> tuple[int, list[GaussRat]]:
        if not self._c:
            return 0, []
        lo, hi = min(self._c), max(self._c)
        return lo, [self._c.get(n, ZERO) for n in range(lo, hi + 1)]

    @property
    def low(self) -> int:
        return min(self._c) if self._c else 0

    @property
    def high(self) -> int:
        return max(self._c) if self._c else 0

    def is_zero(self) -> bool:
        return not self._c

    def __getitem__(self, n: int) -> GaussRat:
        return self._c.get(n, ZERO)

    def __add__(self, o: LaurentPoly) -> LaurentPoly:
        out = dict(self._c)
        for n, v in o._c.items():
            out[n] = out.get(n, ZERO) + v
        return LaurentPoly(out)

    def __sub__(self, o: LaurentPoly) -> LaurentPoly:
        return self + (-o)

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({n: -v for n, v in self._c.items()})

    def __mul__(self, o) -> LaurentPoly:
        if not isinstance(o, LaurentPoly):
            s = GaussRat.coerce(o)
            return LaurentPoly({n: v * s for n, v in self._c.items()})
        out: dict[int, GaussRat] = {}
        for n, v in self._c.items():
            for m, w in o._c.items():
                out[n + m] = out.get(n + m, ZERO) + v * w
        return LaurentPoly(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> LaurentPoly:
        return LaurentPoly({n + k: v for n, v in self._c.items()})

    def derivative(self) -> LaurentPoly:
        return LaurentPoly({n - 1: v * n for n, v in self._c.items() if n})

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if not self._c:
            return np.zeros_like(z)
        if self._dense_c is None:
            self._dense_c = [(n, complex(v)) for n, v in self._c.items()]
        out = np.zeros_like(z)
        for n, v in self._dense_c:
            out = out + v * z**n
        return out

    def __eq__(self, o):
        return isinstance(o, LaurentPoly) and self._c == o._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        terms = ", ".join(f"{n}: {v}" for n, v in sorted(self._c.items()))
        return f"LaurentPoly({{{terms}}})"


# ---------------------------------------------------------------------------
# trigonometric polynomials
# ---------------------------------------------------------------------------


class TrigPoly:
    """Exact trigonometric polynomial sum_k c_k e^{ik phi}."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: dict[int, Scalar] | None = None):
        c: dict[int, GaussRat] = {}
        for k, v in (coeffs or {}).items():
            v = GaussRat.coerce(v)
            if v:
                if abs(k) > HARMONIC_CAP:
                    raise HarmonicOverflow(f"harmonic {k} exceeds cap {HARMONIC_CAP}")
                c[int(k)] = v
        self._c = c

    # constructors
    @classmethod
    def constant(cls, v: Scalar) -> TrigPoly:
        return cls({0: v})

    @classmethod
    def zero(cls) -> TrigPoly:
        return cls()

    @classmethod
    def one(cls) -> TrigPoly:
        return cls({0: 1})

    @classmethod
    def cos(cls, n: int = 1) -> TrigPoly:
        if n == 0:
            return cls.one()
        h = Fraction(1, 2)
        return cls({n: h, -n: h})

    @classmethod
    def sin(cls, n: int = 1) -> TrigPoly:
        if n == 0:
            return cls.zero()
        return cls({n: GaussRat(0, Fraction(-1, 2)), -n: GaussRat(0, Fraction(1, 2))})

    @classmethod
    def from_cos_sin(cls, a: dict[int, Scalar], b: dict[int, Scalar] | None = None) -> TrigPoly:
        """Build sum a_k cos k phi + b_k sin k phi."""
        out = cls.zero()
        for k, v in a.items():
            out = out + cls.cos(k) * v
        for k, v in (b or {}).items():
            out = out + cls.sin(k) * v
        return out

    @classmethod
    def from_laurent(cls, lp: LaurentPoly) -> TrigPoly:
        return cls(lp.coeffs)

    def to_laurent(self) -> LaurentPoly:
        return LaurentPoly(self._c)

    # queries
    @property
    def coeffs(self) -> dict[int, GaussRat]:
        return dict(self._c)

    def coeff(self, k: int) -> GaussRat:
        return self._c.get(k, ZERO)

    def degree(self) -> int:
        return max((abs(k) for k in self._c), default=0)

    def is_zero(self) -> bool:
        return not self._c

    def is_real(self) -> bool:
        return all(self.coeff(-k) == v.conjugate() for k, v in self._c.items())

    def is_constant(self) -> bool:
        return all(k == 0 for k in self._c)

    def cos_sin(self) -> tuple[GaussRat, dict[int, GaussRat], dict[int, GaussRat]]:
        """Return (a0, {k: a_k}, {k: b_k}) with f = a0 + sum a_k cos + b_k sin."""
        a: dict[int, GaussRat] = {}
        b: dict[int, GaussRat] = {}
        for k in range(1, self.degree() + 1):
            cp, cm = self.coeff(k), self.coeff(-k)
            ak, bk = cp + cm, (cp - cm) * I
            if ak:
                a[k] = ak
            if bk:
                b[k] = bk
        return self.coeff(0), a, b

    # arithmetic
    def __add__(self, o) -> TrigPoly:
        if not isinstance(o, TrigPoly):
            o = TrigPoly.constant(o)
        out = dict(self._c)
        for k, v in o._c.items():
            out[k] = out.get(k, ZERO) + v
        return TrigPoly(out)

    __radd__ = __add__

    def __neg__(self) -> TrigPoly:
        return TrigPoly({k: -v for k, v in self._c.items()})

    def __sub__(self, o) -> TrigPoly:
        if not isinstance(o, TrigPoly):
            o = TrigPoly.constant(o)
        return self + (-o)

    def __rsub__(self, o) -> TrigPoly:
        return TrigPoly.constant(o) - self

    def __mul__(self, o) -> TrigPoly:
        if not isinstance(o, TrigPoly):
            try:
                s = GaussRat.coerce(o)
            except TypeError:
                return NotImplemented
            return TrigPoly({k: v * s for k, v in self._c.items()})
        if self.degree() + o.degree() > HARMONIC_CAP:
            raise HarmonicOverflow("product exceeds harmonic cap")
        out: dict[int, GaussRat] = {}
        for k, v in self._c.items():
            for m, w in o._c.items():
                out[k + m] = out.get(k + m, ZERO) + v * w
        return TrigPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, s) -> TrigPoly:
        return self * GaussRat.coerce(s).inverse()

    def __pow__(self, n: int) -> TrigPoly:
        if n < 0:
            raise ValueError("negative powers are not trigonometric polynomials")
        out, base = TrigPoly.one(), self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def derivative(self, order: int = 1) -> TrigPoly:
        out = self
        for _ in range(order):
            out = TrigPoly({k: v * GaussRat(0, k) for k, v in out._c.items()})
        return out

    def conj(self) -> TrigPoly:
        """Complex conjugate as a function of real phi."""
        return TrigPoly({-k: v.conjugate() for k, v in self._c.items()})

    def mean(self) -> GaussRat:
        return self.coeff(0)

    # evaluation
    def _arrays(self):
        ks = np.array(list(self._c.keys()), dtype=float)
        cs = np.array([complex(v) for v in self._c.values()], dtype=complex)
        return ks, cs

    def evaluate_complex(self, phi) -> np.ndarray:
        """Evaluate at real or complex phi."""
        phi = np.asarray(phi)
        if not self._c:
            return np.zeros(phi.shape, dtype=complex)
        ks, cs = self._arrays()
        e = np.exp(1j * np.multiply.outer(phi, ks))
        return e @ cs

    def evaluate(self, phi):
        """Evaluate at real phi; real polynomials give real output."""
        v = self.evaluate_complex(phi)
        if self.is_real():
            v = v.real
        if np.ndim(v) == 0:
            return v.item()
        return v

    __call__ = evaluate

    def value_at_pi_multiple(self, num: int, den: int) -> GaussRat | None:
        """Exact value at phi = num*pi/den when den divides 4 (e^{ik phi} is then in Z[i])."""
        if 4 % den:
            return None
        step = num * (4 // den)  # phi = step * pi/4; only even steps are exact in Q(i)
        if step % 2:
            return None
        unit = [ONE, I, GaussRat(-1), GaussRat(0, -1)]
        total = ZERO
        for k, v in self._c.items():
            total = total + v * unit[(k * step // 2) % 4]
        return total

    def __eq__(self, o):
        if not isinstance(o, TrigPoly):
            try:
                o = TrigPoly.constant(o)
            except TypeError:
                return NotImplemented
        return self._c == o._c

    def __hash__(self):
        return hash(frozenset(self._c.items()))

    def __repr__(self):
        return f"TrigPoly({self})"

    def __str__(self):
        if not self._c:
            return "0"
        if not self.is_real():
            return " + ".join(f"{v}*e^({k}i*phi)" for k, v in sorted(self._c.items()))
        a0, a, b = self.cos_sin()
        parts = []
        if a0:
            parts.append(str(a0.re))
        for k in range(1, self.degree() + 1):
            arg = "phi" if k == 1 else f"{k}*phi"
            for coef, fn in ((a.get(k), "cos"), (b.get(k), "sin")):
                if coef is None:
                    continue
                c = coef.re
                head = "" if c == 1 else "-" if c == -1 else f"{c}*"
                parts.append(f"{head}{fn}({arg})")
        return " + ".join(parts).replace("+ -", "- ")


@lru_cache(maxsize=4096)
def cs_monomial(i: int, j: int) -> TrigPoly:
    """cos^i(phi) sin^j(phi) as an exact trig polynomial."""
    return TrigPoly.cos(1) ** i * TrigPoly.sin(1) ** j


def trig_to_laurent(t: TrigPoly) -> LaurentPoly:
    return t.to_laurent()


def laurent_to_trig(lp: LaurentPoly) -> TrigPoly:
    return TrigPoly.from_laurent(lp)


# ---------------------------------------------------------------------------
# rational trig functions
# ---------------------------------------------------------------------------


class RationalTrig:
    """Quotient num/den of trig polynomials, stored in lowest terms in z = e^{i phi}."""

    def __init__(self, num: TrigPoly | LaurentPoly, den: TrigPoly | LaurentPoly, *, reduce: bool = True,
                 real: bool | None = None):
        n = num.to_laurent() if isinstance(num, TrigPoly) else num
        d = den.to_laurent() if isinstance(den, TrigPoly) else den
        if d.is_zero():
            raise ZeroDivisionError("zero denominator")
        if real is None:
            real = (isinstance(num, TrigPoly) and isinstance(den, TrigPoly)
                    and num.is_real() and den.is_real())
        self.real = real
        if reduce and not n.is_zero():
            nlo, nd = n.dense()
            dlo, dd = d.dense()
            g = pgcd(nd, dd)
            if len(g) > 1:
                nd = pdivmod(nd, g)[0]
                dd = pdivmod(dd, g)[0]
            n = LaurentPoly.from_dense(nlo, nd)
            d = LaurentPoly.from_dense(dlo, dd)
        self.num = n
        self.den = d

    def evaluate_complex(self, phi):
        z = np.exp(1j * np.asarray(phi, dtype=complex))
        return self.num(z) / self.den(z)

    def evaluate(self, phi):
        v = self.evaluate_complex(phi)
        return v.real if self.real else v

    __call__ = evaluate

    def z_form(self) -> tuple[LaurentPoly, LaurentPoly]:
        """Return (N, M) with f(phi) dphi = N(z)/M(z) dz on |z| = 1, both ordinary polynomials."""
        # dphi = dz/(iz); absorb z powers so both sides are polynomials.
        num = self.num * GaussRat(0, -1)
        den = self.den.shift(1)
        shift = -min(num.low, den.low, 0)
        num, den = num.shift(shift), den.shift(shift)
        nlo, den_lo = num.low, den.low
        k = min(nlo, den_lo)
        if k > 0:
            num, den = num.shift(-k), den.shift(-k)
        return num, den

    def __repr__(self):
        return f"RationalTrig(num={self.num!r}, den={self.den!r})"


# ---------------------------------------------------------------------------
# zeros and signs on the circle
# ---------------------------------------------------------------------------


class SignClass(str, enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    NONNEG_WITH_ZEROS = "NonnegWithZeros"
    NONPOS_WITH_ZEROS = "NonposWithZeros"
    SIGN_CHANGING = "SignChanging"
    ZERO = "Zero"


def zeros_on_circle(t: TrigPoly, tau_circle: float = 1e-8) -> list[tuple[float, int]]:
    """Real zeros of t in [0, 2 pi) with multiplicities, sorted by angle."""
    from .residue_pv import CircleClass, find_roots

    if t.is_zero():
        raise ValueError("identically zero trig polynomial")
    lp = t.to_laurent()
    lo, dense = lp.dense()
    rs = find_roots(dense, tau_circle=tau_circle)
    out = []
    for r in rs.roots:
        if r.circle_class is CircleClass.ON_CONTOUR:
            ang = math.atan2(r.location.imag, r.location.real) % (2 * math.pi)
            if ang > 2 * math.pi - 1e-13:
                ang = 0.0
            out.append((ang, r.multiplicity))
    out.sort()
    return out


def sign_on_circle(t: TrigPoly) -> SignClass:
    """Classify the sign of a real trig polynomial on the circle."""
    if t.is_zero():
        return SignClass.ZERO
    zs = zeros_on_circle(t)
    if not zs:
        return SignClass.POSITIVE if t.evaluate(0.0) > 0 else SignClass.NEGATIVE
    angs = [a for a, _ in zs]
    mids = [(angs[i] + (angs[(i + 1)] if i + 1 < len(angs) else angs[0] + 2 * math.pi)) / 2
            for i in range(len(angs))]
    vals = np.atleast_1d(t.evaluate(np.array(mids)))
    if np.all(vals > 0):
        return SignClass.NONNEG_WITH_ZEROS
    if np.all(vals < 0):
        return SignClass.NONPOS_WITH_ZEROS
    return SignClass.SIGN_CHANGING

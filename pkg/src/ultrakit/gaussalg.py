"""Exact algebra of functions ``poly(x) * exp(-a x^2 + b x + c)`` on the real line.

Every operation used downstream (derivatives, shifts, modulation,
convolution, Fourier transform, L2 products) maps this class to itself, so
nothing here involves a discretization parameter.

Conventions: ``f * g(t) = ∫ g(x) f(t - x) dx`` and
``fourier(f)(ξ) = ∫ f(x) exp(-2πi x ξ) dx``.
"""
import math
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.signal import convolve2d

from . import _kernels

DEGREE_CAP = 64


class DegreeOverflowError(ValueError):
    """A polynomial part exceeded the degree cap."""


def _check_degree(deg, cap=None):
    cap = DEGREE_CAP if cap is None else cap
    if deg > cap:
        raise DegreeOverflowError(f"polynomial degree {deg} exceeds cap {cap}")


def _trim(coeffs):
    coeffs = np.asarray(coeffs, dtype=np.complex128).ravel()
    nz = np.nonzero(coeffs)[0]
    if nz.size == 0:
        return np.zeros(0, dtype=np.complex128)
    return coeffs[: nz[-1] + 1].copy()


@dataclass(frozen=True, eq=False)
class ExpPoly:
    """``(sum_k coeffs[k] x^k) * exp(-a x^2 + b x + c)`` with ``a > 0``."""

    coeffs: np.ndarray
    a: float
    b: complex = 0j
    c: complex = 0j

    def __post_init__(self):
        a = float(self.a)
        if not (a > 0 and math.isfinite(a)):
            raise ValueError("Gaussian rate a must be positive and finite")
        coeffs = _trim(self.coeffs)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", complex(self.b))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def degree(self):
        return self.coeffs.size - 1

    @property
    def is_zero(self):
        return self.coeffs.size == 0

    def __call__(self, x):
        return GaussSum((self,))(x)

    def __repr__(self):
        return f"ExpPoly(deg={self.degree}, a={self.a:g}, b={self.b:g}, c={self.c:g})"


class GaussSum:
    """Finite formal sum of ExpPoly terms.

    Terms whose ``(a, b)`` agree bitwise are merged; near duplicates stay
    separate so no rounding decision is ever made on the user's behalf.
    """

    def __init__(self, terms=()):
        merged = {}
        order = []
        for t in terms:
            if isinstance(t, GaussSum):
                sub = t.terms
            else:
                sub = (t,)
            for term in sub:
                if term.is_zero:
                    continue
                key = (term.a, term.b.real, term.b.imag)
                if key not in merged:
                    merged[key] = term
                    order.append(key)
                elif merged[key].is_zero:
                    merged[key] = term
                else:
                    old = merged[key]
                    factor = np.exp(term.c - old.c)
                    merged[key] = ExpPoly(npoly.polyadd(old.coeffs, factor * term.coeffs), old.a, old.b, old.c)
        self.terms = tuple(merged[k] for k in order if not merged[k].is_zero)

    # -- construction helpers
    @classmethod
    def gaussian(cls, a, coeffs=(1.0,), b=0j, c=0j):
        return cls((ExpPoly(np.atleast_1d(coeffs), a, b, c),))

    @classmethod
    def zero(cls):
        return cls(())

    @property
    def is_zero(self):
        return len(self.terms) == 0

    @property
    def degree(self):
        return max((t.degree for t in self.terms), default=-1)

    # -- arithmetic
    def __add__(self, other):
        return GaussSum(self.terms + as_sum(other).terms)

    def __sub__(self, other):
        return self + (-1.0) * as_sum(other)

    def __neg__(self):
        return (-1.0) * self

    def __mul__(self, scalar):
        if isinstance(scalar, (GaussSum, ExpPoly)):
            return multiply(self, scalar)
        return scale(self, scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"GaussSum({len(self.terms)} terms, deg={self.degree})"

    # -- evaluation
    @cached_property
    def _packed(self):
        width = max((t.coeffs.size for t in self.terms), default=1)
        coeffs = np.zeros((len(self.terms), width), dtype=np.complex128)
        for i, t in enumerate(self.terms):
            coeffs[i, : t.coeffs.size] = t.coeffs
        a = np.array([t.a for t in self.terms], dtype=np.float64)
        b = np.array([t.b for t in self.terms], dtype=np.complex128)
        c = np.array([t.c for t in self.terms], dtype=np.complex128)
        return coeffs, a, b, c

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
        if self.is_zero:
            out = np.zeros(xs.shape, dtype=np.complex128)
        else:
            out = _kernels.eval_terms(*self._packed, xs)
        if scalar:
            return complex(out[0])
        return out.reshape(np.shape(x))


def as_sum(f):
    if isinstance(f, GaussSum):
        return f
    if isinstance(f, ExpPoly):
        return GaussSum((f,))
    raise TypeError(f"expected GaussSum or ExpPoly, got {type(f).__name__}")


def _map_terms(f, fn):
    return GaussSum(tuple(fn(t) for t in as_sum(f).terms))


# ---------------------------------------------------------------- elementary rewrites

def scale(f, s):
    s = complex(s)
    if s == 0:
        return GaussSum.zero()
    return _map_terms(f, lambda t: ExpPoly(s * t.coeffs, t.a, t.b, t.c))


def derivative(f, order=1, cap=None):
    """Exact ``order``-th derivative via ``(p e^E)' = (p' + p (-2ax + b)) e^E``."""
    if order < 0 or int(order) != order:
        raise ValueError("derivative order must be a nonnegative integer")
    f = as_sum(f)
    if order == 0:
        return f
    _check_degree(f.degree + order, cap)

    def one(t):
        p = t.coeffs
        for _ in range(order):
            p = npoly.polyadd(npoly.polyder(p) if p.size > 1 else np.zeros(1, complex),
                              npoly.polymul(p, [t.b, -2.0 * t.a]))
        return ExpPoly(p, t.a, t.b, t.c)

    return _map_terms(f, one)


def _compose_shift(coeffs, shift):
    """Coefficients of ``p(x + shift)``."""
    out = np.zeros(1, dtype=np.complex128)
    for ck in coeffs[::-1]:
        out = npoly.polyadd(npoly.polymul(out, [shift, 1.0]), [ck])
    return _trim(out)


def translate(f, x0):
    """``f(x - x0)``."""
    x0 = float(x0)

    def one(t):
        return ExpPoly(_compose_shift(t.coeffs, -x0), t.a, t.b + 2.0 * t.a * x0,
                       t.c - t.a * x0 * x0 - t.b * x0)

    return _map_terms(f, one)


def modulate(f, xi):
    """``exp(2πi xi x) f(x)``."""
    shift = 2j * math.pi * float(xi)
    return _map_terms(f, lambda t: ExpPoly(t.coeffs, t.a, t.b + shift, t.c))


def reflect(f):
    """``f(-x)``."""
    def one(t):
        signs = (-1.0) ** np.arange(t.coeffs.size)
        return ExpPoly(signs * t.coeffs, t.a, -t.b, t.c)

    return _map_terms(f, one)


def conj(f):
    return _map_terms(f, lambda t: ExpPoly(np.conj(t.coeffs), t.a, np.conj(t.b), np.conj(t.c)))


def dilate(f, s):
    """``f(s x)`` for real ``s != 0``."""
    s = float(s)
    if s == 0:
        raise ValueError("dilation factor must be nonzero")
    return _map_terms(f, lambda t: ExpPoly(t.coeffs * s ** np.arange(t.coeffs.size),
                                           t.a * s * s, t.b * s, t.c))


def multiply(f, g, cap=None):
    """Pointwise product."""
    f, g = as_sum(f), as_sum(g)
    if f.is_zero or g.is_zero:
        return GaussSum.zero()
    _check_degree(f.degree + g.degree, cap)
    return GaussSum(tuple(ExpPoly(npoly.polymul(s.coeffs, t.coeffs), s.a + t.a, s.b + t.b, s.c + t.c)
                          for s in f.terms for t in g.terms))


# ---------------------------------------------------------------- Gaussian moments

def _moments(alpha, n):
    """``∫ u^j exp(-alpha u^2) du`` for j = 0..n (complex ``alpha`` not needed)."""
    out = np.zeros(n + 1, dtype=np.float64)
    for j in range(0, n + 1, 2):
        out[j] = math.exp(math.lgamma((j + 1) / 2.0) - (j + 1) / 2.0 * math.log(alpha))
    return out


def _compose_linear_2d(coeffs, cs, c0, cu):
    """``R[i, j]`` = coefficient of ``s^i u^j`` in ``p(cs*s + c0 + cu*u)``."""
    n = coeffs.size - 1
    R = np.zeros((n + 1, n + 1), dtype=np.complex128)
    for k in range(n, -1, -1):
        if k < n:
            new = c0 * R
            new[1:, :] += cs * R[:-1, :]
            new[:, 1:] += cu * R[:, :-1]
            R = new
        R[0, 0] += coeffs[k]
    return R


def _integrate_u(R, alpha):
    """Integrate ``sum R[i,j] s^i u^j exp(-alpha u^2)`` over u; returns coefficients in s."""
    m = _moments(alpha, R.shape[1] - 1)
    return R @ m


def integrate(f):
    """``∫ f(x) dx`` over the real line."""
    total = 0j
    for t in as_sum(f).terms:
        mu = t.b / (2.0 * t.a)
        R = _compose_linear_2d(t.coeffs, 0.0, mu, 1.0)
        poly = _integrate_u(R, t.a)
        total += complex(poly[0]) * np.exp(t.c + t.b * t.b / (4.0 * t.a))
    return complex(total)


def _convolve_terms(s, t):
    alpha = s.a + t.a
    d = (t.b - s.b) / (2.0 * alpha)
    R1 = _compose_linear_2d(s.coeffs, t.a / alpha, -d, -1.0)
    R2 = _compose_linear_2d(t.coeffs, s.a / alpha, d, 1.0)
    poly = _integrate_u(convolve2d(R1, R2), alpha)
    return ExpPoly(poly, s.a * t.a / alpha, (s.b * t.a + s.a * t.b) / alpha,
                   s.c + t.c + (t.b - s.b) ** 2 / (4.0 * alpha))


def convolve(f, g, cap=None):
    """``f * g(t) = ∫ g(x) f(t - x) dx`` in closed form."""
    f, g = as_sum(f), as_sum(g)
    if f.is_zero or g.is_zero:
        return GaussSum.zero()
    _check_degree(f.degree + g.degree, cap)
    return GaussSum(tuple(_convolve_terms(s, t) for s in f.terms for t in g.terms))


def fourier(f):
    """``∫ f(x) exp(-2πi x ξ) dx`` as a function of ξ."""
    def one(t):
        R = _compose_linear_2d(t.coeffs, -1j * math.pi / t.a, t.b / (2.0 * t.a), 1.0)
        poly = _integrate_u(R, t.a)
        return ExpPoly(poly, math.pi ** 2 / t.a, -1j * math.pi * t.b / t.a, t.c + t.b * t.b / (4.0 * t.a))

    return _map_terms(f, one)


def inner_l2(f, g):
    """``(f, g) = ∫ f conj(g)``."""
    return integrate(multiply(f, conj(g)))


def bilinear(f, g):
    """``∫ f g`` without conjugation (the distributional bracket)."""
    return integrate(multiply(f, g))


# ---------------------------------------------------------------- finite distributions

class FiniteDistribution:
    """``f = sum_alpha ∂^alpha g_alpha`` acting on test functions by transposition."""

    def __init__(self, parts=None):
        clean = {}
        for alpha, g in sorted((parts or {}).items()):
            if int(alpha) != alpha or alpha < 0:
                raise ValueError("derivative orders must be nonnegative integers")
            g = as_sum(g)
            if not g.is_zero:
                clean[int(alpha)] = g
        self.parts = clean

    @property
    def orders(self):
        return tuple(self.parts)

    @property
    def is_zero(self):
        return not self.parts

    def materialize(self):
        """The distribution as an ordinary GaussSum (all parts are smooth here)."""
        out = GaussSum.zero()
        for alpha, g in self.parts.items():
            out = out + derivative(g, alpha)
        return out

    def __repr__(self):
        return f"FiniteDistribution(orders={self.orders})"


def as_distribution(f):
    if isinstance(f, FiniteDistribution):
        return f
    return FiniteDistribution({0: as_sum(f)})


def pair(f, phi):
    """``<f, phi> = sum_alpha (-1)^alpha ∫ g_alpha phi^(alpha)``."""
    f = as_distribution(f)
    total = 0j
    for alpha, g in f.parts.items():
        total += (-1) ** alpha * bilinear(g, derivative(phi, alpha))
    return complex(total)


# ---------------------------------------------------------------- text form

def _fmt_complex(z, unit):
    z = complex(z)
    im = z.imag
    sign = "-" if (im < 0 or (im == 0 and math.copysign(1.0, im) < 0)) else "+"
    return f"{z.real!r}{sign}{abs(im)!r}{unit}"


def to_text(f):
    """One line per term: ``a=<real> b=<re>+<im>i c=<re>+<im>i coeffs=[...]``."""
    lines = []
    for t in as_sum(f).terms:
        coeffs = ", ".join(_fmt_complex(z, "j") for z in t.coeffs)
        lines.append(f"a={t.a!r} b={_fmt_complex(t.b, 'i')} c={_fmt_complex(t.c, 'i')} coeffs=[{coeffs}]")
    return "\n".join(lines)


_LINE = re.compile(r"^\s*a=(\S+)\s+b=(\S+)\s+c=(\S+)\s+coeffs=\[(.*)\]\s*$")


def _parse_complex(text, unit):
    text = text.strip()
    if unit == "i":
        if not text.endswith("i"):
            raise ValueError(f"complex value {text!r} must end with 'i'")
        text = text[:-1] + "j"
    return complex(text.replace(" ", ""))


def from_text(text):
    terms = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"cannot parse term line: {raw!r}")
        a = float(m.group(1))
        b = _parse_complex(m.group(2), "i")
        c = _parse_complex(m.group(3), "i")
        body = m.group(4).strip()
        coeffs = [_parse_complex(tok, "j") for tok in body.split(",")] if body else []
        terms.append(ExpPoly(np.array(coeffs, dtype=np.complex128), a, b, c))
    return GaussSum(terms)

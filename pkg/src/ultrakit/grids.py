"""Uniform grids, composite Simpson weights and Gaussian tail envelopes."""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gaussalg import as_sum

TAIL_REL = 1e-9
TAIL_ABS = 1e-300


class GridMismatchError(ValueError):
    pass


class TailCertificateError(RuntimeError):
    """The grid extent is too small for the requested accuracy."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


def simpson_weights(n, h):
    """Composite Simpson weights for ``n`` (odd) equally spaced nodes."""
    if n < 3 or n % 2 == 0:
        raise ValueError("Simpson needs an odd node count >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def _odd_count(extent, spacing, what):
    if not (extent > 0 and spacing > 0):
        raise ValueError(f"{what}: extent and spacing must be positive")
    if spacing > extent:
        raise ValueError(f"{what}: spacing must not exceed the extent")
    steps = 2.0 * extent / spacing
    k = int(round(steps))
    if abs(steps - k) > 1e-9 * max(1.0, steps) or k % 2:
        raise ValueError(f"{what}: 2*extent/spacing must be an even integer (got {steps:g})")
    return k + 1


@dataclass(frozen=True)
class UniformGrid:
    """Symmetric grid ``-extent + j*spacing``; odd node count so 0 is a node."""

    extent: float
    spacing: float

    def __post_init__(self):
        _odd_count(self.extent, self.spacing, type(self).__name__)

    @cached_property
    def size(self):
        return _odd_count(self.extent, self.spacing, type(self).__name__)

    @cached_property
    def nodes(self):
        j = np.arange(self.size)
        half = self.size // 2
        return (j - half) * self.spacing

    @cached_property
    def weights(self):
        return simpson_weights(self.size, self.spacing)

    def integrate(self, values, axis=-1):
        values = np.asarray(values)
        if values.shape[axis] != self.size:
            raise GridMismatchError("sample count does not match the grid")
        return np.tensordot(values, self.weights, axes=([axis], [0]))

    def refined(self):
        return type(self)(self.extent, self.spacing / 2.0)

    def extended(self, factor=2.0):
        return type(self)(self.extent * factor, self.spacing)

    def same_as(self, other):
        return self.size == other.size and self.extent == other.extent and self.spacing == other.spacing


class XGrid(UniformGrid):
    """Spatial grid (extent R, spacing h)."""


class FreqGrid(UniformGrid):
    """Frequency grid (extent Xi, spacing delta)."""


# ---------------------------------------------------------------- tail envelopes

@dataclass(frozen=True)
class TailRecord:
    """Bound on what a grid scan misses beyond ``|x| > R``."""

    label: str
    R: float
    value: float
    tail: float
    certified: bool
    monotone_from_R: bool

    def as_dict(self):
        return {"label": self.label, "R": self.R, "value": self.value, "tail": self.tail,
                "certified": self.certified, "monotone_from_R": self.monotone_from_R}


def certify(label, R, value, tail, monotone=True, rel=TAIL_REL):
    ok = tail <= rel * abs(value) + TAIL_ABS
    return TailRecord(label, float(R), float(value), float(tail), bool(ok), bool(monotone))


def _term_envelope(term, R, log_weight, kappa, power):
    """Return (sup of e^{g} on [R, inf), integral of e^{power*g} on [R, inf), monotone flag).

    ``g(t) = log(sum |c_k| t^k) - a t^2 + |Re b| t + Re c + log_weight(t)``
    bounds the log of ``|term(±t)| * weight(t)``; ``|d/dt log_weight| <= kappa/t``.
    """
    absc = np.abs(term.coeffs)
    deg = term.degree
    a = term.a
    beta = abs(term.b.real)
    rho = term.c.real

    def g(t):
        t = np.asarray(t, dtype=np.float64)
        poly = np.polynomial.polynomial.polyval(t, absc)
        with np.errstate(divide="ignore"):
            return np.log(poly) - a * t * t + beta * t + rho + log_weight(t)

    def slope(t):
        return (deg + kappa) / t - 2.0 * a * t + beta

    t_star = (beta + math.sqrt(beta * beta + 8.0 * a * (deg + kappa))) / (4.0 * a)
    monotone = R >= t_star
    T = max(R, 2.0 * t_star)
    if T > R:
        ts = np.linspace(R, T, 4001)
        gs = g(ts)
        # add the largest possible rise between samples
        rise = (deg + kappa) / R * (ts[1] - ts[0]) + beta * (ts[1] - ts[0])
        gmax = float(np.max(gs)) + rise
    else:
        gmax = float(g(np.array([R]))[0])
    g_T = float(g(np.array([T]))[0])
    decay = -slope(T)
    integral = (T - R) * math.exp(power * gmax) + math.exp(power * g_T) / (power * decay)
    return math.exp(gmax), integral, monotone


def tail_envelope(f, R, log_weight, kappa, power=1.0):
    """Bounds on ``sup_{|x|>R} |f w|`` and ``∫_{|x|>R} |f w|^power`` for a GaussSum ``f``.

    ``log_weight(t)`` is evaluated at ``t = |x|``; the weight must be radial.
    """
    f = as_sum(f)
    if f.is_zero:
        return 0.0, 0.0, True
    sups, ints, mono = [], [], True
    for term in f.terms:
        s, i, m = _term_envelope(term, float(R), log_weight, float(kappa), float(power))
        sups.append(s)
        ints.append(i)
        mono = mono and m
    n = len(f.terms)
    sup = math.fsum(sups)
    integral = 2.0 * n ** max(power - 1.0, 0.0) * math.fsum(ints)
    return sup, integral, mono

"""Short-time Fourier transform with Gaussian-class windows.

``V_psi f(xi)`` is the function ``x -> ((M_{-xi} f) * conj(reflect(psi)))(x)``
and is exact in x for every frequency node.  Frequency integrals use the
composite Simpson rule of a FreqGrid.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import gaussalg as ga
from .grids import FreqGrid, GridMismatchError
from .weightseq import associated_function

DEFAULT_FREQ = FreqGrid(10.0, 0.02)


@dataclass(frozen=True, eq=False)
class WindowPair:
    psi0: ga.GaussSum
    psi: ga.GaussSum
    l2_norm_sq: float
    lam: float
    seed: ga.GaussSum


def _same_function(f, g):
    f, g = ga.as_sum(f), ga.as_sum(g)
    if len(f.terms) != len(g.terms):
        return False
    for s, t in zip(f.terms, g.terms):
        if (s.a, s.b, s.c) != (t.a, t.b, t.c) or s.coeffs.shape != t.coeffs.shape or np.any(s.coeffs != t.coeffs):
            return False
    return True


def build_window(phi, tol=1e-10):
    """Window ``psi = psi0 * psi0`` with ``(psi, psi) = 1`` from a seed with ``phi(0) != 0``.

    A seed that is not exactly even is replaced by ``phi * reflect(phi)``.
    With ``lam = (phi*phi, phi*phi)`` the choice ``psi0 = lam^{-1/4} phi``
    gives unit L2 norm.
    """
    phi = ga.as_sum(phi)
    if phi.is_zero or phi(0.0) == 0:
        raise ValueError("window seed must not vanish at the origin")
    if not _same_function(phi, ga.reflect(phi)):
        phi = ga.multiply(phi, ga.reflect(phi))
    pp = ga.convolve(phi, phi)
    lam = ga.inner_l2(pp, pp).real
    psi0 = ga.scale(phi, lam ** -0.25)
    psi = ga.convolve(psi0, psi0)
    nsq = ga.inner_l2(psi, psi).real
    if abs(nsq - 1.0) > tol:
        raise ArithmeticError(f"window normalization failed: (psi, psi) = {nsq!r}")
    return WindowPair(psi0, psi, nsq, lam, phi)


@dataclass
class StftField:
    """Samples over a FreqGrid: GaussSums (function values) or nonnegative norms."""

    grid: FreqGrid
    samples: list
    kind: str = "function"  # or "norm"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.samples) != self.grid.size:
            raise GridMismatchError("one sample per frequency node is required")

    @property
    def values(self):
        return np.asarray(self.samples, dtype=np.float64)


def _analysis_kernel(psi, xi):
    return ga.modulate(ga.conj(ga.reflect(psi)), xi)


def stft(f, psi, xi):
    """``V_psi f(xi)`` as an exact GaussSum in x.

    For a FiniteDistribution ``sum ∂^a g_a`` the derivatives move onto the
    kernel: ``(M_{-xi} f) * k = M_{-xi}[f * M_xi k]`` and ``∂^a g * h = g * ∂^a h``.
    """
    h = _analysis_kernel(psi, xi)
    if isinstance(f, ga.FiniteDistribution):
        total = ga.GaussSum.zero()
        for alpha, g in f.parts.items():
            total = total + ga.convolve(g, ga.derivative(h, alpha))
    else:
        total = ga.convolve(f, h)
    return ga.modulate(total, -xi)


def stft_field(f, psi, grid):
    return StftField(grid, [stft(f, psi, xi) for xi in grid.nodes])


def adjoint_stft(field, gamma, x, with_abs=False):
    """``V*_gamma Phi (x) = ∫ e^{2πi xi x} (Phi(xi) * gamma)(x) dxi`` by Simpson.

    With ``with_abs`` the Simpson sum of ``|(Phi(xi) * gamma)(x)|`` is returned
    as well (the integral of the pointwise norm).
    """
    if field.kind != "function":
        raise TypeError("adjoint STFT needs a function-valued field")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    xi = field.grid.nodes
    w = field.grid.weights
    acc = np.zeros(x.size, dtype=np.complex128)
    acc_abs = np.zeros(x.size)
    for j in range(xi.size):
        vals = ga.convolve(field.samples[j], gamma)(x)
        acc += w[j] * np.exp(2j * math.pi * xi[j] * x) * vals
        acc_abs += w[j] * np.abs(vals)
    return (acc, acc_abs) if with_abs else acc


def reconstruct_check(phi, window, grid=DEFAULT_FREQ, x_probe=None):
    """Max over probes of ``|V*_psi V_psi phi / (psi,psi) - phi| / max|phi|``."""
    phi = ga.as_sum(phi)
    x_probe = np.linspace(-4.0, 4.0, 33) if x_probe is None else np.asarray(x_probe, dtype=np.float64)
    if phi.is_zero:
        return 0.0
    psi = window.psi
    rec = adjoint_stft(stft_field(phi, psi, grid), psi, x_probe) / ga.inner_l2(psi, psi)
    ref = phi(x_probe)
    return float(np.max(np.abs(rec - ref)) / np.max(np.abs(ref)))


@dataclass
class DesingResult:
    value: complex
    exact: complex
    rel_error: float
    distinct_windows: bool


def desingularize(f, phi, window, grid=DEFAULT_FREQ, gamma=None):
    """``(gamma,psi)^{-1} ∫ <V_psi f(xi), V_{conj gamma} phi(-xi)> dxi`` against ``pair(f, phi)``.

    ``gamma`` defaults to the window itself; passing another GaussSum with
    ``(gamma, psi) != 0`` exercises the two-window form.
    """
    f = ga.as_distribution(f)
    psi = window.psi
    distinct = gamma is not None
    gamma = psi if gamma is None else ga.as_sum(gamma)
    norm = ga.inner_l2(gamma, psi)
    if norm == 0:
        raise ValueError("(gamma, psi) must be nonzero")
    exact = ga.pair(f, phi)
    if f.is_zero or ga.as_sum(phi).is_zero:
        return DesingResult(0j, exact, 0.0, distinct)
    synth = ga.reflect(gamma)
    brackets = np.empty(grid.size, dtype=np.complex128)
    for j, xi in enumerate(grid.nodes):
        left = stft(f, psi, xi)
        right = ga.convolve(ga.modulate(phi, xi), synth)
        brackets[j] = ga.bilinear(left, right)
    value = complex(grid.integrate(brackets) / norm)
    err = abs(value - exact) / abs(exact) if exact != 0 else abs(value)
    return DesingResult(value, exact, float(err), distinct)


def decay_profile(f, psi, E, grid=DEFAULT_FREQ):
    """``xi -> |V_psi f(xi)|_E`` on the frequency grid."""
    from .tmib import space_norm  # local import keeps module layering flat

    values, uncertified = [], 0
    for xi in grid.nodes:
        res = space_norm(E, stft(f, psi, xi), detail=True, strict=False)
        values.append(res.value)
        uncertified += not res.certified
    return StftField(grid, values, kind="norm", meta={"space": E.describe(), "uncertified_tails": uncertified})


def fit_decay(profile, M, q_list, inner_extent=None, stability=1.05):
    """For each q: ``sup e^{w_M(q|xi|)} profile(xi)`` on the full grid and on
    ``|xi| <= inner_extent`` (default half the extent); stabilized when the
    two agree within ``stability``."""
    xi = profile.grid.nodes
    vals = profile.values
    inner = profile.grid.extent / 2.0 if inner_extent is None else float(inner_extent)
    mask = np.abs(xi) <= inner + 1e-12
    rows = []
    for q in q_list:
        weighted = np.exp(associated_function(M, q * np.abs(xi), warn=False)) * vals
        full = float(np.max(weighted))
        half = float(np.max(weighted[mask]))
        ratio = full / half if half > 0 else (1.0 if full == 0 else math.inf)
        rows.append({"q": float(q), "sup_full": full, "sup_inner": half, "ratio": ratio,
                     "stabilized": bool(ratio <= stability)})
    return rows

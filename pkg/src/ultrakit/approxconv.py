"""Riemann-sum approximation of ``phi * psi`` on shrunken lattice cells.

Nodes ``t = j/n`` with ``|t| <= m`` carry the cells
``K_t = (t + [-1/(2n) + gamma/2, 1/(2n) - gamma/2]) ∩ [-m, m]``; the rest of
the box is the gap set ``K2``.  The approximant
``L(x) = sum_t mu(K_t) psi(t) phi(x - t)`` is an exact GaussSum, so all error
reported here is scheme error.
"""
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels
from . import gaussalg as ga
from .grids import XGrid, tail_envelope
from .gsnorms import NormParams, gs_sup_norm
from .reports import compare
from .weightseq import associated_function, check_conditions

GL_GAP = 4  # Gauss-Legendre nodes per gap
GL_PANEL = 16  # nodes per unit panel outside the box
OUTER_WIDTH = 40.0
ABS_SLACK = 1e-9


@dataclass(frozen=True)
class RiemannScheme:
    m: float
    n: int
    gamma: float

    def __post_init__(self):
        if self.m < 0 or int(self.n) != self.n or self.n < 1:
            raise ValueError("need m >= 0 and a positive integer n")
        if not 0 < self.gamma < 1.0 / self.n:
            raise ValueError("gamma must lie in (0, 1/n)")

    @cached_property
    def _j(self):
        J = int(math.floor(self.m * self.n + 1e-12))
        return np.arange(-J, J + 1)

    @property
    def nodes(self):
        return self._j / self.n

    @property
    def half_width(self):
        return 0.5 / self.n - 0.5 * self.gamma

    @cached_property
    def cells(self):
        """(left, right) arrays of the clipped cells."""
        t = self.nodes
        lo = np.maximum(t - self.half_width, -self.m)
        hi = np.minimum(t + self.half_width, self.m)
        return lo, np.maximum(hi, lo)

    @property
    def measures(self):
        lo, hi = self.cells
        return hi - lo

    @cached_property
    def gaps(self):
        """(left, right) arrays of the components of ``K2`` with positive length."""
        lo, hi = self.cells
        left = np.concatenate(([-self.m], hi))
        right = np.concatenate((lo, [self.m]))
        keep = right > left
        return left[keep], right[keep]

    @property
    def gap_measure(self):
        left, right = self.gaps
        return math.fsum(right - left)

    def describe(self):
        return {"m": self.m, "n": int(self.n), "gamma": self.gamma}


def riemann_convolve(phi, psi, scheme):
    """``L(x) = sum_t mu(K_t) psi(t) phi(x - t)`` as a GaussSum."""
    phi, psi = ga.as_sum(phi), ga.as_sum(psi)
    w = scheme.measures * psi(scheme.nodes)
    terms = []
    for t, wt in zip(scheme.nodes, w):
        if wt != 0:
            terms.extend(ga.scale(ga.translate(phi, t), wt).terms)
    return ga.GaussSum(terms)


def _lattice(f, nodes, weights, x):
    out = np.zeros(x.size, dtype=np.complex128)
    for t in f.terms:
        out += _kernels.lattice_eval(t.coeffs, t.a, t.b, t.c, nodes, weights, x)
    return out


def _abs_lattice(f, nodes, weights, x):
    """``sum_k w_k |f(x - u_k)|`` with real ``w_k >= 0``."""
    if len(f.terms) == 1:
        t = f.terms[0]
        return _kernels.lattice_eval(t.coeffs, t.a, t.b, t.c, nodes, weights, x, absolute=True).real
    out = np.empty(x.size)
    step = max(1, 2_000_000 // max(1, nodes.size))
    for s in range(0, x.size, step):
        y = x[s:s + step, None] - nodes[None, :]
        out[s:s + step] = np.abs(f(y.ravel())).reshape(y.shape) @ weights
    return out


def _gl_nodes(left, right, k):
    g, w = np.polynomial.legendre.leggauss(k)
    mid = 0.5 * (left + right)
    half = 0.5 * (right - left)
    return (mid[:, None] + half[:, None] * g[None, :]).ravel(), (half[:, None] * w[None, :]).ravel()


def _sup_bound(f):
    """Upper bound for ``sup |f|`` over the line."""
    f = ga.as_sum(f)
    if f.is_zero:
        return 0.0
    inner = float(np.max(np.abs(f(np.linspace(-1.0, 1.0, 2001))))) * 1.01
    outer, _, _ = tail_envelope(f, 1.0, lambda t: np.zeros_like(np.asarray(t, dtype=float)), 0.0)
    return max(inner, outer) + 1e-300


@dataclass
class SplitResult:
    S1: float
    S2: float
    S3: float
    total: float
    ok: bool
    witness: dict
    per_alpha: list
    check: object


def error_split(phi, psi, scheme, M, A, ell, q, alpha_max=8, x_grid=None):
    """Weighted sups of the three error terms and of the measured error.

    Every value is multiplied by ``e^{w_A(q|x| / (2H^2))} / ((H ell)^a M_a)``.
    S1 and S3 are Gauss-Legendre quadratures (S1 adds a tail bound), S2 is the
    closed-form majorant ``C0 M0 ell |psi| |phi| (2m/n) (H ell)^a M_a e^{-w_A(q|x|/2)}``
    with ``S^{M,ell}_{A,q}`` sup norms over orders up to ``alpha_max + 1``.
    The check asks for ``measured <= S1 + S2 + S3 + 1e-9`` at every ``(a, x)``.
    """
    phi, psi = ga.as_sum(phi), ga.as_sum(psi)
    x_grid = XGrid(8.0, 0.05) if x_grid is None else x_grid
    x = x_grid.nodes
    m2p = check_conditions(M).m2prime
    C0, H = m2p.C0, m2p.H
    m, n = scheme.m, scheme.n
    params = NormParams(M, A, ell, q, alpha_max + 1, x_grid)
    psi_n = gs_sup_norm(psi, params, strict=False)
    phi_n = gs_sup_norm(phi, params, strict=False)
    s2_const = C0 * M.values[0] * ell * psi_n * phi_n * (2.0 * m / n)
    s2_decay = np.exp(-associated_function(A, q * np.abs(x) / 2.0, warn=False))
    target_w = np.exp(associated_function(A, q * np.abs(x) / (2.0 * H * H), warn=False))

    # outside the box: panels of unit width on [m, m + OUTER_WIDTH] and mirror
    edges = np.arange(0.0, OUTER_WIDTH + 0.5, 1.0) + m
    u_out, w_out = _gl_nodes(edges[:-1], edges[1:], GL_PANEL)
    u_out = np.concatenate((u_out, -u_out))
    w_out = np.concatenate((w_out, w_out))
    w_out = w_out * np.abs(psi(u_out))
    _, psi_tail, _ = tail_envelope(psi, m + OUTER_WIDTH, lambda t: np.zeros_like(np.asarray(t, dtype=float)), 0.0)
    gl, gr = scheme.gaps
    u_gap, w_gap = _gl_nodes(gl, gr, GL_GAP)
    w_gap = w_gap * np.abs(psi(u_gap))
    lat_w = (scheme.measures * psi(scheme.nodes)).astype(np.complex128)
    exact = ga.convolve(phi, psi)

    S1 = S2 = S3 = total = 0.0
    worst = (-math.inf, 0, 0.0)
    per_alpha = []
    d_phi, d_exact = phi, exact
    for alpha in range(alpha_max + 1):
        scale = target_w * math.exp(-(alpha * math.log(H * ell) + M.log_values[alpha]))
        s1 = (_abs_lattice(d_phi, u_out, w_out, x) + psi_tail * _sup_bound(d_phi)) * scale
        s2 = s2_const * math.exp(alpha * math.log(H * ell) + M.log_values[alpha]) * s2_decay * scale
        s3 = (_abs_lattice(d_phi, u_gap, w_gap, x) if u_gap.size else np.zeros(x.size)) * scale
        meas = np.abs(d_exact(x) - _lattice(d_phi, scheme.nodes, lat_w, x)) * scale
        margin = meas - (s1 + s2 + s3 + ABS_SLACK)
        i = int(np.argmax(margin))
        if margin[i] > worst[0]:
            worst = (float(margin[i]), alpha, float(x[i]))
        row = {"alpha": alpha, "S1": float(s1.max()), "S2": float(s2.max()), "S3": float(s3.max()),
               "total": float(meas.max())}
        per_alpha.append(row)
        S1, S2, S3, total = max(S1, row["S1"]), max(S2, row["S2"]), max(S3, row["S3"]), max(total, row["total"])
        d_phi, d_exact = ga.derivative(d_phi, 1), ga.derivative(d_exact, 1)
    check = compare("riemann-split", worst[0] + 1.0, 1.0, witness={"alpha": worst[1], "x": worst[2]},
                    details={"max_margin": worst[0]}, slack=1.0)
    return SplitResult(S1, S2, S3, total, check.ok, {"alpha": worst[1], "x": worst[2]}, per_alpha, check)


def default_schedule(steps=6):
    """``m_k = 2 + k``, ``n_k = 2^(k+1)``, ``gamma_k = 2^-k / (4 m_k n_k)`` so that
    ``mu(K2) <= 2^-k``."""
    out = []
    for k in range(1, steps + 1):
        m, n = 2.0 + k, 2 ** (k + 1)
        out.append(RiemannScheme(m, n, 2.0 ** -k / (4.0 * m * n)))
    return out


def n_doubling_schedule(m=6.0, n0=4, steps=5, c=0.25):
    """Fixed box, ``n`` doubling, ``gamma = c / n^2``."""
    return [RiemannScheme(m, n0 * 2 ** k, c / (n0 * 2 ** k) ** 2) for k in range(steps)]


@dataclass
class ConvergenceTable:
    rows: list
    reference_norm: float
    monotone: bool
    final_ratio: float

    @property
    def ratios(self):
        t = [r["total_measured"] for r in self.rows]
        return [b / a if a > 0 else math.nan for a, b in zip(t, t[1:])]


def convergence_study(phi, psi, schedule, M, A, ell, q, alpha_max=8, x_grid=None):
    """Error table over a schedule; the reference is the target-norm size of ``phi * psi``."""
    x_grid = XGrid(8.0, 0.05) if x_grid is None else x_grid
    H = check_conditions(M).m2prime.H
    target = NormParams(M, A, H * ell, q / (2.0 * H * H), alpha_max, x_grid)
    ref = gs_sup_norm(ga.convolve(ga.as_sum(phi), ga.as_sum(psi)), target, strict=False)
    rows = []
    for k, sch in enumerate(schedule, start=1):
        res = error_split(phi, psi, sch, M, A, ell, q, alpha_max, x_grid)
        rows.append({"k": k, "m": sch.m, "n": int(sch.n), "gamma": sch.gamma, "gap_measure": sch.gap_measure,
                     "S1": res.S1, "S2": res.S2, "S3": res.S3, "total_measured": res.total, "bound_ok": res.ok})
    totals = [r["total_measured"] for r in rows]
    monotone = all(b < a for a, b in zip(totals, totals[1:]))
    final = totals[-1] / ref if ref > 0 else math.inf
    return ConvergenceTable(rows, ref, monotone, final)

"""Gelfand-Shilov norms, weighted field seminorms and the frequency pairing."""
import math
from dataclasses import dataclass, field

import numpy as np

from . import gaussalg as ga
from .grids import FreqGrid, GridMismatchError, TailCertificateError, XGrid, certify, tail_envelope
from .reports import compare
from .weightseq import WeightSequence, associated_function

DEFAULT_R = 12.0
DEFAULT_H = 0.01
DEFAULT_XI = 10.0
DEFAULT_DELTA = 0.02
DEFAULT_ALPHA_MAX = 16


@dataclass(frozen=True)
class NormParams:
    """Parameters of the norm families: derivative weights ``M``, decay weights
    ``A``, scale ``ell``, decay rate ``q``, orders ``0..alpha_max`` and the x grid."""

    M: WeightSequence
    A: WeightSequence
    ell: float = 1.0
    q: float = 1.0
    alpha_max: int = DEFAULT_ALPHA_MAX
    x_grid: XGrid = field(default_factory=lambda: XGrid(DEFAULT_R, DEFAULT_H))

    def __post_init__(self):
        if not (self.ell > 0 and self.q > 0):
            raise ValueError("ell and q must be positive")
        if self.alpha_max < 0 or self.alpha_max > ga.DEGREE_CAP or self.alpha_max > self.M.P:
            raise ValueError("alpha_max must lie within the degree cap and the prefix of M")

    def replace(self, **kw):
        data = dict(M=self.M, A=self.A, ell=self.ell, q=self.q, alpha_max=self.alpha_max, x_grid=self.x_grid)
        data.update(kw)
        return NormParams(**data)


@dataclass
class NormResult:
    value: float
    witness: tuple  # (alpha, x) of the maximum
    per_alpha: np.ndarray
    tail: object  # TailRecord

    @property
    def certified(self):
        return self.tail.certified


def derivative_ladder(f, alpha_max):
    """``[f, f', ..., f^(alpha_max)]`` built incrementally."""
    out = [ga.as_sum(f)]
    for _ in range(alpha_max):
        out.append(ga.derivative(out[-1], 1))
    return out


def _log_scale(params, alpha):
    return alpha * math.log(params.ell) + params.M.log_values[alpha]


def _raise_if_uncertified(result, strict):
    if strict and not result.tail.certified:
        raise TailCertificateError(
            f"{result.tail.label}: tail bound {result.tail.tail:.3e} is not below "
            f"1e-9 of the value {result.tail.value:.3e}; enlarge the grid extent", result.tail)
    return result


def sup_norm_table(f, params):
    """Arrays ``raw[alpha, i] = |f^(alpha)(x_i)|`` and the matching weighted table."""
    x = params.x_grid.nodes
    w = np.exp(associated_function(params.A, params.q * np.abs(x)))
    raw = np.empty((params.alpha_max + 1, x.size))
    weighted = np.empty_like(raw)
    for alpha, d in enumerate(derivative_ladder(f, params.alpha_max)):
        raw[alpha] = np.abs(d(x))
        weighted[alpha] = raw[alpha] * w * math.exp(-_log_scale(params, alpha))
    return raw, weighted


def gs_sup_norm(f, params, detail=False, strict=True):
    """``max_{alpha, x} |f^(alpha)(x)| e^{w_A(q|x|)} / (ell^alpha M_alpha)`` over the grid.

    Off-grid mass beyond the extent is bounded by a Gaussian envelope; when
    that bound is not below 1e-9 of the value a TailCertificateError is raised
    (unless ``strict`` is False).
    """
    x = params.x_grid.nodes
    R = params.x_grid.extent
    logw = associated_function(params.A, params.q * np.abs(x))
    w = np.exp(logw)

    def log_weight(t):
        return associated_function(params.A, params.q * t, warn=False)

    per_alpha = np.zeros(params.alpha_max + 1)
    arg = np.zeros(params.alpha_max + 1, dtype=int)
    tail = 0.0
    for alpha, d in enumerate(derivative_ladder(f, params.alpha_max)):
        s = math.exp(-_log_scale(params, alpha))
        vals = np.abs(d(x)) * w * s
        arg[alpha] = int(np.argmax(vals))
        per_alpha[alpha] = vals[arg[alpha]]
        sup, _, _ = tail_envelope(d, R, log_weight, params.A.P)
        tail = max(tail, sup * s)
    best = int(np.argmax(per_alpha))
    value = float(per_alpha[best])
    rec = certify("gs_sup_norm", R, value, tail)
    res = NormResult(value, (best, float(x[arg[best]])), per_alpha, rec)
    _raise_if_uncertified(res, strict)
    return res if detail else value


def gs_l1_norm(f, params, detail=False, strict=True):
    """``max_alpha ∫ |f^(alpha)| e^{w_A(q|x|)} dx / (ell^alpha M_alpha)`` by Simpson."""
    grid = params.x_grid
    x = grid.nodes
    w = np.exp(associated_function(params.A, params.q * np.abs(x)))

    def log_weight(t):
        return associated_function(params.A, params.q * t, warn=False)

    per_alpha = np.zeros(params.alpha_max + 1)
    tail = 0.0
    for alpha, d in enumerate(derivative_ladder(f, params.alpha_max)):
        s = math.exp(-_log_scale(params, alpha))
        per_alpha[alpha] = float(grid.integrate(np.abs(d(x)) * w)) * s
        _, integral, _ = tail_envelope(d, grid.extent, log_weight, params.A.P)
        tail = max(tail, integral * s)
    best = int(np.argmax(per_alpha))
    value = float(per_alpha[best])
    rec = certify("gs_l1_norm", grid.extent, value, tail)
    res = NormResult(value, (best, None), per_alpha, rec)
    _raise_if_uncertified(res, strict)
    return res if detail else value


def weighted_l1(f, A, q, grid, detail=False, strict=True):
    """``∫ |f(x)| e^{w_A(q|x|)} dx`` (no derivatives)."""
    x = grid.nodes
    val = float(grid.integrate(np.abs(ga.as_sum(f)(x)) * np.exp(associated_function(A, q * np.abs(x)))))
    _, integral, _ = tail_envelope(f, grid.extent, lambda t: associated_function(A, q * t, warn=False), A.P)
    rec = certify("weighted_l1", grid.extent, val, integral)
    res = NormResult(val, (0, None), np.array([val]), rec)
    _raise_if_uncertified(res, strict)
    return res if detail else val


def conv_estimate_check(phi, psi, params):
    """``|phi*psi|_{S^{M,l}_{A,q/2}} <= |phi|_{S^{M,l}_{A,q}} |psi|_{L1 e^{w_A(q.)}}``."""
    conv = ga.convolve(phi, psi)
    left = gs_sup_norm(conv, params.replace(q=params.q / 2.0), detail=True)
    phi_n = gs_sup_norm(phi, params, detail=True)
    psi_n = weighted_l1(psi, params.A, params.q, params.x_grid, detail=True)
    right = phi_n.value * psi_n.value
    return compare("gs-convolution", left.value, right,
                   witness={"alpha": left.witness[0], "x": left.witness[1]},
                   details={"phi_norm": phi_n.value, "psi_l1": psi_n.value,
                            "tails": [left.tail.as_dict(), phi_n.tail.as_dict(), psi_n.tail.as_dict()]})


def cw_seminorm(values, w, grid=None):
    """``max_j w(xi_j) * values_j``; ``w`` is an array or a callable of the nodes."""
    values = np.asarray(values, dtype=np.float64)
    if grid is not None and values.size != grid.size:
        raise GridMismatchError("values do not match the frequency grid")
    if callable(w):
        if grid is None:
            raise ValueError("a callable weight needs the grid")
        w = w(grid.nodes)
    w = np.broadcast_to(np.asarray(w, dtype=np.float64), values.shape)
    if values.size == 0:
        return 0.0
    return float(np.max(w * values))


def freq_pair(left, right, grid):
    """Simpson quadrature of ``xi -> left(xi) * right(-xi)`` on a symmetric grid."""
    left = np.asarray(left)
    right = np.asarray(right)
    if left.shape != (grid.size,) or right.shape != (grid.size,):
        raise GridMismatchError("both fields must be sampled on the given grid")
    return complex(grid.integrate(left * right[::-1]))


def norm_table_rows(f, params):
    """Rows (alpha, x, raw, weighted) for CSV emission."""
    raw, weighted = sup_norm_table(f, params)
    x = params.x_grid.nodes
    for alpha in range(raw.shape[0]):
        for i in range(x.size):
            yield alpha, float(x[i]), float(raw[alpha, i]), float(weighted[alpha, i])


__all__ = ["NormParams", "NormResult", "FreqGrid", "XGrid", "gs_sup_norm", "gs_l1_norm", "weighted_l1",
           "conv_estimate_check", "cw_seminorm", "freq_pair", "sup_norm_table", "norm_table_rows",
           "derivative_ladder"]

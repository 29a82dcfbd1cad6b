"""Concrete translation-modulation invariant Banach spaces on the line.

Three families are implemented: weighted ``L^p`` (``lp``), Fourier-``L^p``
(``flp``: the norm of ``fourier(f)`` in weighted ``L^p``) and ``C_0`` with
weight (``c0w``).  For ``p < ∞`` the weight multiplies, for ``p = ∞`` and
``c0w`` it divides, i.e. ``|f|_{L^∞_w} = sup |f| / w``.
"""
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _kernels
from . import gaussalg as ga
from .grids import TailCertificateError, XGrid, certify, tail_envelope
from .gsnorms import NormParams, derivative_ladder, gs_l1_norm
from .reports import compare
from .weightseq import SaturationWarning, WeightSequence, associated_function, check_conditions, gevrey

DEFAULT_GRID = XGrid(12.0, 0.01)


# ---------------------------------------------------------------- weights

@dataclass(frozen=True, eq=False)
class WeightFunction:
    """A positive weight on the line.

    kinds: ``constant`` (value ``c``), ``polynomial`` (``(1+|x|)^k``),
    ``exp_assoc`` (``exp(w_A(q|x|))``) and ``tabulated`` (log-values on a
    uniform grid, linearly interpolated and clamped at the ends).
    """

    kind: str
    k: float = 0.0
    A: WeightSequence = None
    q: float = 1.0
    c: float = 1.0
    nodes: np.ndarray = None
    log_table: np.ndarray = None
    kappa_override: float = None

    def __post_init__(self):
        if self.kind not in ("constant", "polynomial", "exp_assoc", "tabulated"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "exp_assoc" and (self.A is None or not self.q > 0):
            raise ValueError("exp_assoc weight needs a weight sequence and q > 0")
        if self.kind == "constant" and not self.c > 0:
            raise ValueError("constant weight must be positive")
        if self.kind == "tabulated" and (self.nodes is None or self.log_table is None):
            raise ValueError("tabulated weight needs nodes and values")

    @classmethod
    def constant(cls, c=1.0):
        return cls("constant", c=float(c))

    @classmethod
    def polynomial(cls, k):
        return cls("polynomial", k=float(k))

    @classmethod
    def exp_assoc(cls, A, q):
        return cls("exp_assoc", A=A, q=float(q))

    @classmethod
    def tabulated(cls, nodes, log_values, kappa):
        return cls("tabulated", nodes=np.asarray(nodes, float), log_table=np.asarray(log_values, float),
                   kappa_override=float(kappa))

    @property
    def radial(self):
        return self.kind != "tabulated"

    @property
    def kappa(self):
        """Bound ``K`` with ``|d/dt log w(t)| <= K / t`` for ``t > 0``."""
        if self.kind == "constant":
            return 0.0
        if self.kind == "polynomial":
            return abs(self.k)
        if self.kind == "exp_assoc":
            return float(self.A.P)
        return self.kappa_override

    def log(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "constant":
            return np.full(x.shape, math.log(self.c))
        if self.kind == "polynomial":
            return self.k * np.log1p(np.abs(x))
        if self.kind == "exp_assoc":
            return associated_function(self.A, self.q * np.abs(x).ravel(), warn=False).reshape(x.shape)
        return np.interp(x, self.nodes, self.log_table)

    def __call__(self, x):
        return np.exp(self.log(x))

    def radial_log(self, t):
        """``max(log w(t), log w(-t))``; used by tail envelopes."""
        t = np.asarray(t, dtype=np.float64)
        if self.radial:
            return self.log(t)
        return np.maximum(self.log(t), self.log(-t))

    def describe(self):
        if self.kind == "constant":
            return f"const:{self.c:g}"
        if self.kind == "polynomial":
            return f"poly:{self.k:g}"
        if self.kind == "exp_assoc":
            return f"exp:{self.A.label}:{self.q:g}"
        return "tabulated"


def parse_weight(spec, P=256):
    """``const`` | ``const:<c>`` | ``poly:<k>`` | ``exp:<s>:<q>`` (Gevrey-s associated function)."""
    parts = spec.split(":")
    try:
        if parts[0] == "const":
            return WeightFunction.constant(float(parts[1]) if len(parts) > 1 else 1.0)
        if parts[0] == "poly" and len(parts) == 2:
            return WeightFunction.polynomial(float(parts[1]))
        if parts[0] == "exp" and len(parts) == 3:
            return WeightFunction.exp_assoc(gevrey(float(parts[1]), P), float(parts[2]))
    except ValueError as exc:
        raise ValueError(f"bad weight spec {spec!r}: {exc}") from exc
    raise ValueError(f"bad weight spec {spec!r}")


# ---------------------------------------------------------------- spaces

@dataclass(frozen=True, eq=False)
class TmibSpace:
    kind: str  # "lp", "flp" or "c0w"
    weight: WeightFunction = field(default_factory=WeightFunction.constant)
    p: float = 2.0
    grid: XGrid = DEFAULT_GRID
    M: WeightSequence = None
    condition: str = field(default="", init=False)

    def __post_init__(self):
        if self.kind not in ("lp", "flp", "c0w"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        p = math.inf if self.kind == "c0w" else float(self.p)
        if not p >= 1:
            raise ValueError("p must be >= 1")
        object.__setattr__(self, "p", p)
        cond = ""
        if self.kind == "flp":
            if self.weight.kind in ("constant", "polynomial"):
                cond = "F.I"
            elif self.M is not None and check_conditions(self.M).m2.holds:
                cond = "F.II"
            else:
                raise ValueError("Fourier-Lp with this weight needs a sequence M satisfying (M.2)")
        object.__setattr__(self, "condition", cond)

    @classmethod
    def lp(cls, p, weight=None, grid=DEFAULT_GRID):
        return cls("lp", weight or WeightFunction.constant(), p, grid)

    @classmethod
    def flp(cls, p, weight=None, grid=DEFAULT_GRID, M=None):
        return cls("flp", weight or WeightFunction.constant(), p, grid, M)

    @classmethod
    def c0w(cls, weight=None, grid=DEFAULT_GRID):
        return cls("c0w", weight or WeightFunction.constant(), math.inf, grid)

    def describe(self):
        pp = "inf" if math.isinf(self.p) else f"{self.p:g}"
        if self.kind == "c0w":
            return f"c0w:{self.weight.describe()}"
        return f"{self.kind}:{pp}:{self.weight.describe()}"

    def with_grid(self, grid):
        return TmibSpace(self.kind, self.weight, self.p, grid, self.M)


def parse_space(spec, grid=DEFAULT_GRID, P=256):
    """``lp:<p>:<weight>`` | ``flp:<p>:<weight>`` | ``c0w:<weight>``; p may be ``inf``."""
    kind, _, rest = spec.partition(":")
    if kind == "c0w":
        return TmibSpace.c0w(parse_weight(rest or "const", P), grid)
    if kind in ("lp", "flp"):
        p_text, _, wspec = rest.partition(":")
        p = math.inf if p_text == "inf" else float(p_text)
        w = parse_weight(wspec or "const", P)
        if kind == "lp":
            return TmibSpace.lp(p, w, grid)
        M = w.A if w.kind == "exp_assoc" else None
        return TmibSpace.flp(p, w, grid, M)
    raise ValueError(f"bad space spec {spec!r}")


@dataclass
class SpaceNorm:
    value: float
    tail: object

    @property
    def certified(self):
        return self.tail.certified


def _lp_norm(f, weight, p, grid, label):
    x = grid.nodes
    vals = np.abs(f(x))
    logw = weight.log(x)
    if math.isinf(p):
        scaled = vals * np.exp(-logw)
        value = float(np.max(scaled)) if scaled.size else 0.0
        sup, _, _ = tail_envelope(f, grid.extent, lambda t: -_min_log(weight, t), weight.kappa)
        return value, certify(label, grid.extent, value, sup)
    scaled = vals * np.exp(logw)
    integral = float(grid.integrate(scaled ** p))
    _, tail_int, _ = tail_envelope(f, grid.extent, weight.radial_log, weight.kappa, power=p)
    value = integral ** (1.0 / p)
    rec = certify(label, grid.extent, integral, tail_int)
    return value, rec


def _min_log(weight, t):
    t = np.asarray(t, dtype=np.float64)
    if weight.radial:
        return weight.log(t)
    return np.minimum(weight.log(t), weight.log(-t))


def space_norm(E, f, detail=False, strict=True):
    """Norm of a GaussSum in ``E``; raises TailCertificateError if the grid is too small."""
    f = ga.as_sum(f)
    if f.is_zero:
        res = SpaceNorm(0.0, certify(f"norm[{E.describe()}]", E.grid.extent, 0.0, 0.0))
        return res if detail else 0.0
    label = f"norm[{E.describe()}]"
    if E.kind == "flp":
        value, rec = _lp_norm(ga.fourier(f), E.weight, E.p, E.grid, label)
    else:
        value, rec = _lp_norm(f, E.weight, E.p, E.grid, label)
        if E.kind == "c0w":
            edge = np.abs(f(np.array([-E.grid.extent, E.grid.extent]))) * np.exp(
                -E.weight.log(np.array([-E.grid.extent, E.grid.extent])))
            if float(np.max(edge)) > 1e-6 * value:
                rec = certify(label + ":edge", E.grid.extent, value, float(np.max(edge)), rel=1e-6)
    res = SpaceNorm(value, rec)
    if strict and not rec.certified:
        raise TailCertificateError(f"{label}: tail {rec.tail:.3e} too large relative to {rec.value:.3e}", rec)
    return res if detail else value


# ---------------------------------------------------------------- operator weights

def _scan_half(weight, grid):
    """Half-width (in steps) of the u-range for weight-ratio suprema.

    For ``exp(w_A(q|u|))`` the ratio ``w(u+x)/w(u)`` keeps growing with ``|u|``
    until ``q|u|`` passes the last stored ratio ``M_P/M_{P-1}``, so the scan
    runs out to there; other weights peak near the origin.
    """
    half = grid.size // 2
    if weight.kind == "exp_assoc":
        t_sat = math.exp(float(weight.A.log_ratios[-1])) / weight.q
        half = max(half, int(math.ceil(t_sat / grid.spacing)) + 1)
    return half


def _ratio_sup_table(weight, grid, sign):
    """``max_u log w(u + sign*x) - log w(u)`` for every grid node x."""
    n = grid.size
    half = n // 2
    u_half = _scan_half(weight, grid)
    ext = np.arange(-(u_half + half), u_half + half + 1) * grid.spacing
    L = weight.log(ext)
    start = half  # index of u = -u_half in ext
    shifts = sign * (np.arange(n) - half)
    return _kernels.maxplus_shift(L, start, 2 * u_half + 1, shifts)


@lru_cache(maxsize=64)
def _translation_log_table(E):
    if E.kind == "flp":
        return np.zeros(E.grid.size)
    sign = 1 if (E.kind == "lp" and not math.isinf(E.p)) else -1
    return _ratio_sup_table(E.weight, E.grid, sign)


@lru_cache(maxsize=64)
def _modulation_log_table(E):
    if E.kind != "flp":
        return np.zeros(E.grid.size)
    sign = -1 if not math.isinf(E.p) else 1
    return _ratio_sup_table(E.weight, E.grid, sign)


def _direct_ratio_sup(weight, grid, shift):
    u = np.arange(-_scan_half(weight, grid), _scan_half(weight, grid) + 1) * grid.spacing
    return float(np.max(weight.log(u + shift) - weight.log(u)))


def translation_weight(E, x):
    """``w_E(x) = |T_x|_{L(E)}`` as a grid supremum of weight ratios."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if E.kind == "flp":
        out = np.ones(xs.shape)
    else:
        sign = 1.0 if (E.kind == "lp" and not math.isinf(E.p)) else -1.0
        out = np.array([math.exp(_direct_ratio_sup(E.weight, E.grid, sign * v)) for v in xs.ravel()]).reshape(xs.shape)
    return float(out[0]) if scalar else out


def modulation_weight(E, xi):
    """``nu_E(xi) = |M_{-xi}|_{L(E)}``."""
    scalar = np.ndim(xi) == 0
    xs = np.atleast_1d(np.asarray(xi, dtype=np.float64))
    if E.kind != "flp":
        out = np.ones(xs.shape)
    else:
        sign = -1.0 if not math.isinf(E.p) else 1.0
        out = np.array([math.exp(_direct_ratio_sup(E.weight, E.grid, sign * v)) for v in xs.ravel()]).reshape(xs.shape)
    return float(out[0]) if scalar else out


def translation_weight_table(E):
    """``(nodes, w_E(nodes))`` on the space's grid (max-plus kernel)."""
    return E.grid.nodes, np.exp(_translation_log_table(E))


def modulation_weight_table(E):
    return E.grid.nodes, np.exp(_modulation_log_table(E))


def operator_weight_function(E):
    """``w_E`` as a tabulated weight (for ``L^1_{w_E}``)."""
    nodes = E.grid.nodes
    return WeightFunction.tabulated(nodes, _translation_log_table(E), E.weight.kappa)


def l1_omega_e(E):
    """The space ``L^1_{w_E}`` on the same grid."""
    return TmibSpace.lp(1.0, operator_weight_function(E), E.grid)


# ---------------------------------------------------------------- admissibility and axioms

@dataclass
class AdmissibilityReport:
    holds: bool
    C_min: float
    q_used: float
    worst: tuple
    C_extended: float

    def as_dict(self):
        return {"holds": self.holds, "C_min": self.C_min, "q_used": self.q_used,
                "worst": list(self.worst), "C_extended": self.C_extended}


def _admissible_log_c(weight, N, q, grid):
    table = _ratio_sup_table(weight, grid, 1)
    t = grid.nodes
    vals = table - associated_function(N, q * np.abs(t), warn=False)
    j = int(np.argmax(vals))
    # recover the x of the worst pair for the chosen shift
    u = np.arange(-_scan_half(weight, grid), _scan_half(weight, grid) + 1) * grid.spacing
    xr = weight.log(u + t[j]) - weight.log(u)
    i = int(np.argmax(xr))
    return float(vals[j]), (float(u[i]), float(t[j]))


def check_admissible(weight, N, q, grid=DEFAULT_GRID, stability=1.05):
    """Smallest ``C`` with ``w(x+t) <= C w(x) e^{w_N(q|t|)}`` over grid pairs.

    The condition is accepted when doubling the extent moves ``C`` by at most
    the factor ``stability``.
    """
    log_c, worst = _admissible_log_c(weight, N, q, grid)
    log_c2, _ = _admissible_log_c(weight, N, q, grid.extended(2.0))
    c1, c2 = math.exp(log_c), math.exp(log_c2)
    holds = math.isfinite(c2) and c2 <= stability * c1
    return AdmissibilityReport(bool(holds), c1, float(q), worst, c2)


@dataclass
class AxiomReport:
    space: str
    translation_constants: dict  # q -> C_{E,q}
    modulation_constants: dict  # q -> sup nu_E e^{-w_M(q.)}
    growth_table: list  # dicts (q0, q1, C, status)

    def as_dict(self):
        return {"space": self.space,
                "translation_constants": {str(k): v for k, v in self.translation_constants.items()},
                "modulation_constants": {str(k): v for k, v in self.modulation_constants.items()},
                "growth_table": self.growth_table}


def translation_constant(E, A, q):
    """``C_{E,q} = sup_x w_E(x) e^{-w_A(q|x|)}`` on the grid."""
    x = E.grid.nodes
    return float(np.exp(np.max(_translation_log_table(E) - associated_function(A, q * np.abs(x), warn=False))))


def check_tmib_axioms(E, M, A, q_grid, stability=1.05):
    """Empirical constants for the translation/modulation norm bounds and the
    modulation growth condition, searched in the Beurling direction."""
    q_grid = sorted(float(q) for q in q_grid)
    x = E.grid.nodes
    trans = {q: translation_constant(E, A, q) for q in q_grid}
    lognu = _modulation_log_table(E)
    mod = {q: float(np.exp(np.max(lognu - associated_function(M, q * np.abs(x), warn=False)))) for q in q_grid}

    big = E.with_grid(E.grid.extended(2.0))
    lognu_big = _modulation_log_table(big)
    xb = big.grid.nodes
    table = []
    for q0 in q_grid:
        found = None
        for q1 in q_grid:
            if q1 < q0:
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SaturationWarning)
                c_small = float(np.max(lognu + associated_function(M, q0 * np.abs(x), warn=False)
                                       - associated_function(M, q1 * np.abs(x), warn=False)))
                c_big = float(np.max(lognu_big + associated_function(M, q0 * np.abs(xb), warn=False)
                                     - associated_function(M, q1 * np.abs(xb), warn=False)))
            if c_big - c_small <= math.log(stability):
                found = {"q0": q0, "q1": q1, "C": math.exp(c_small), "status": "verified"}
                break
        table.append(found or {"q0": q0, "q1": None, "C": None, "status": "unverified"})
    return AxiomReport(E.describe(), trans, mod, table)


# ---------------------------------------------------------------- module convolution and D_E norms

def module_conv_check(E, f, g):
    """``|f*g|_E <= |f|_E |g|_{L^1_{w_E}}``."""
    f, g = ga.as_sum(f), ga.as_sum(g)
    left = space_norm(E, ga.convolve(f, g), detail=True)
    fn = space_norm(E, f, detail=True)
    gn = space_norm(l1_omega_e(E), g, detail=True)
    return compare("module-convolution", left.value, fn.value * gn.value, witness={"space": E.describe()},
                   details={"f_norm": fn.value, "g_l1_wE": gn.value,
                            "tails": [left.tail.as_dict(), fn.tail.as_dict(), gn.tail.as_dict()]})


@dataclass
class DeNorm:
    value: float
    argmax: int
    per_alpha: np.ndarray
    raw: np.ndarray


def de_norm(f, E, M, ell, alpha_max=16, detail=False):
    """``max_{alpha <= alpha_max} |f^(alpha)|_E / (ell^alpha M_alpha)``."""
    if isinstance(f, ga.FiniteDistribution):
        f = f.materialize()
    f = ga.as_sum(f)
    raw = np.zeros(alpha_max + 1)
    if not f.is_zero:
        for alpha, d in enumerate(derivative_ladder(f, alpha_max)):
            raw[alpha] = space_norm(E, d)
    scale = np.exp(-(np.arange(alpha_max + 1) * math.log(ell) + M.log_values[: alpha_max + 1]))
    per = raw * scale
    arg = int(np.argmax(per))
    if alpha_max > 0 and arg == alpha_max and per[arg] > 0:
        warnings.warn(f"D_E norm attains its maximum at alpha_max={alpha_max}", SaturationWarning, stacklevel=2)
    res = DeNorm(float(per[arg]), arg, per, raw)
    return res if detail else res.value


def conv_E_to_DE_check(f, psi, E, M, A, ell, q, alpha_max=16, C_Eq=None):
    """``|f*psi|_{D^{M,ell}_E} <= C_{E,q} |f|_E |psi|_{S^{M,ell}_{A,1,q}}``."""
    C = translation_constant(E, A, q) if C_Eq is None else C_Eq
    left = de_norm(ga.convolve(f, psi), E, M, ell, alpha_max, detail=True)
    fn = space_norm(E, f)
    psin = gs_l1_norm(psi, NormParams(M, A, ell, q, alpha_max, E.grid)) if not ga.as_sum(psi).is_zero else 0.0
    return compare("e-to-de", left.value, C * fn * psin, witness={"alpha": left.argmax},
                   details={"C_Eq": C, "f_norm": fn, "psi_gs_l1": psin})


@dataclass
class MollifierReport:
    n_list: list
    errors: list
    psi_integrals: list
    phi_norm: float
    monotone: bool
    final_ok: bool
    construction: str

    def as_dict(self):
        return {"n": self.n_list, "errors": self.errors, "psi_integrals": self.psi_integrals,
                "phi_norm": self.phi_norm, "monotone": self.monotone, "final_ok": self.final_ok,
                "construction": self.construction}


def mollifier_study(chi, phi, E, n_list=(1, 2, 4, 8, 16, 32), construction="dilated"):
    """Errors ``|phi - phi*psi_n|_E`` for an approximate identity built from ``chi``.

    ``construction="dilated"`` uses ``psi_n = chi_n * chi_n`` with
    ``chi_n = n chi(n.)``, which concentrates at the origin.  ``"single"`` uses
    ``chi * chi_n``; that family converges to ``chi`` rather than to a delta,
    so its errors level off at ``|phi - phi*chi|_E``.
    """
    chi = ga.as_sum(chi)
    total = ga.integrate(chi)
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"mollifier must integrate to 1 (got {total})")
    if construction not in ("dilated", "single"):
        raise ValueError("construction must be 'dilated' or 'single'")
    phi = ga.as_sum(phi)
    errors, integrals = [], []
    for n in n_list:
        chi_n = ga.scale(ga.dilate(chi, n), n)
        psi_n = ga.convolve(chi_n, chi_n) if construction == "dilated" else ga.convolve(chi, chi_n)
        integrals.append(ga.integrate(psi_n).real)
        errors.append(space_norm(E, phi - ga.convolve(phi, psi_n)))
    phi_norm = space_norm(E, phi)
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    final_ok = (32 not in n_list) or errors[list(n_list).index(32)] <= 1e-3 * phi_norm
    return MollifierReport(list(n_list), errors, integrals, phi_norm, monotone, bool(final_ok), construction)

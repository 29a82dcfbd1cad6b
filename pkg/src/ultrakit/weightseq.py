"""Weight sequences on a finite prefix, their growth conditions and associated functions.

Everything is stored as ``log M_p`` so Gevrey sequences of order several
thousand stay finite.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import _kernels

# tolerances used for the exact (log-space) comparisons
_REL_TOL = 1e-12


class SaturationWarning(UserWarning):
    """The sup defining the associated function sits at the end of the prefix."""


class DegenerateSequenceWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Prefix ``M_0..M_P`` of a positive sequence, stored as logarithms."""

    log_values: np.ndarray
    label: str = "custom"

    def __post_init__(self):
        logs = np.asarray(self.log_values, dtype=np.float64)
        if logs.ndim != 1 or logs.size < 9:
            raise ValueError("a weight sequence needs at least M_0..M_8 (P >= 8)")
        if not np.all(np.isfinite(logs)):
            raise ValueError("weight sequence values must be finite and strictly positive")
        logs.setflags(write=False)
        object.__setattr__(self, "log_values", logs)

    @property
    def P(self):
        return self.log_values.size - 1

    @property
    def values(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_values)

    @property
    def log_ratios(self):
        """``log(M_p / M_{p-1})`` for p = 1..P."""
        return np.diff(self.log_values)

    def is_log_convex(self):
        lr = self.log_ratios
        return bool(np.all(np.diff(lr) >= -_REL_TOL * np.maximum(1.0, np.abs(lr[1:]))))

    def is_weight_sequence(self):
        """Numerical check that ``(M_p/M_0)^(1/p)`` increases on the second half of the prefix."""
        p = np.arange(max(1, self.P // 2), self.P + 1)
        root = (self.log_values[p] - self.log_values[0]) / p
        return bool(np.all(np.diff(root) > 0))

    def __len__(self):
        return self.log_values.size


def gevrey(s, P):
    """The Gevrey sequence ``(p!)^s`` for p = 0..P."""
    if not s > 0:
        raise ValueError("Gevrey order s must be positive")
    if int(P) != P or P < 8:
        raise ValueError("truncation order P must be an integer >= 8")
    p = np.arange(int(P) + 1, dtype=np.float64)
    return WeightSequence(s * gammaln(p + 1.0), label=f"gevrey:{s:g}")


def from_values(values, label="custom"):
    values = np.asarray(values, dtype=np.float64)
    if np.any(values <= 0):
        raise ValueError("weight sequence values must be strictly positive")
    return WeightSequence(np.log(values), label=label)


def from_log_values(log_values, label="custom"):
    return WeightSequence(np.asarray(log_values, dtype=np.float64), label=label)


# ---------------------------------------------------------------- conditions

@dataclass(frozen=True)
class Constants:
    holds: bool
    C0: float
    H: float

    def as_dict(self):
        return {"holds": self.holds, "C0": self.C0, "H": self.H}


@dataclass(frozen=True)
class ConditionReport:
    label: str
    P: int
    m1: bool
    m2prime: Constants
    m2: Constants
    m3prime_partial_sum: float
    m3prime_diverges: bool

    def as_dict(self):
        return {
            "label": self.label,
            "P": self.P,
            "m1": self.m1,
            "m2prime": self.m2prime.as_dict(),
            "m2": self.m2.as_dict(),
            "m3prime": {"partial_sum": self.m3prime_partial_sum, "diverges": self.m3prime_diverges},
        }


def _leq(lhs, rhs):
    return lhs <= rhs + _REL_TOL * np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))


def _m2prime_log_h(logs, log_c0, upto):
    # M_{p+1} <= C0 H^p M_p for p = 1..upto-1; p = 0 is fixed by C0
    lr = np.diff(logs[:upto + 1])
    p = np.arange(1, lr.size)
    if p.size == 0:
        return 0.0
    return max(0.0, float(np.max((lr[1:] - log_c0) / p)))


def _m2_log_h(logs, log_c0, upto, log_convex):
    best = 0.0
    for n in range(1, upto + 1):
        if log_convex:
            # log M_p + log M_{n-p} is convex and symmetric in p: smallest at the centre
            h = n // 2
            gap = logs[n] - logs[h] - logs[n - h]
        else:
            p = np.arange(n + 1)
            gap = float(np.max(logs[n] - logs[p] - logs[n - p]))
        best = max(best, (gap - log_c0) / n)
    return best


def check_conditions(M):
    """Check (M.1), (M.2)', (M.2) and (M.3)' on the stored prefix.

    Constants are extracted with ``C0`` fixed at its smallest feasible value
    ``>= 1`` and then the smallest ``H``.  A finite prefix always admits some
    constants, so a condition is reported as holding only when the ``H``
    needed on the whole prefix is within 10% (in log) of the ``H`` needed on
    the first half, i.e. when the requirement has stopped growing.
    """
    logs = M.log_values
    P = M.P
    m1 = bool(np.all(_leq(2 * logs[1:-1], logs[:-2] + logs[2:])))

    log_c0 = max(0.0, float(logs[1] - logs[0]))
    lh_full = _m2prime_log_h(logs, log_c0, P)
    lh_half = _m2prime_log_h(logs, log_c0, P // 2)
    m2p_stable = lh_full <= 1.1 * lh_half + 1e-12
    m2prime = Constants(bool(m2p_stable), math.exp(log_c0), math.exp(lh_full))

    log_convex = M.is_log_convex()
    log_c0_2 = max(log_c0, -float(logs[0]), 0.0)
    lh2_full = max(lh_full, _m2_log_h(logs, log_c0_2, P, log_convex))
    lh2_half = max(lh_half, _m2_log_h(logs, log_c0_2, P // 2, log_convex))
    m2_stable = lh2_full <= 1.1 * lh2_half + 1e-12
    m2 = Constants(bool(m2_stable and m2p_stable), math.exp(log_c0_2), math.exp(lh2_full))

    terms = np.exp(logs[:-1] - logs[1:])
    partial = np.cumsum(terms)
    s_full = float(partial[P - 1])
    s_half = float(partial[P // 2 - 1])
    diverges = s_full / s_half >= 1.0 + 0.5 * math.log(2.0) / math.log(P)
    return ConditionReport(M.label, P, m1, m2prime, m2, s_full, bool(diverges))


# ---------------------------------------------------------------- associated function

def associated_function(M, t, warn=True):
    """``omega_M(t) = sup_p log(t^p M_0 / M_p)`` on the stored prefix, clamped at 0.

    Accepts a scalar or an array.  For log-convex sequences the maximising
    index is the number of ratios ``M_p/M_{p-1}`` not exceeding ``t``; other
    sequences fall back to a full scan.
    """
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("associated function needs t >= 0")
    out = np.zeros(t.shape)
    pos = t > 0
    if np.any(pos):
        logt = np.log(t[pos])
        rel = M.log_values - M.log_values[0]
        if M.is_log_convex():
            idx = np.searchsorted(M.log_ratios, logt, side="right")
            vals = idx * logt - rel[idx]
        else:
            vals = _kernels.assoc_brute(rel, logt)
            idx = None
        out[pos] = np.maximum(vals, 0.0)
        if warn:
            if idx is None:
                idx = np.searchsorted(np.maximum.accumulate(M.log_ratios), logt, side="right")
            if np.any(idx >= M.P - 2):
                warnings.warn(
                    f"associated function of {M.label} saturates at the truncation order P={M.P} "
                    f"(t up to {float(t.max()):g})", SaturationWarning, stacklevel=2)
    return float(out[0]) if scalar else out


def associated_function_brute(M, t):
    """Plain maximum over every index; used as the reference for the ratio scan."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    out = np.zeros(t.shape)
    pos = t > 0
    if np.any(pos):
        rel = M.log_values - M.log_values[0]
        out[pos] = np.maximum(_kernels.assoc_brute(rel, np.log(t[pos])), 0.0)
    return float(out[0]) if scalar else out


@dataclass
class OmegaCheckReport:
    C0: float
    H: float
    n_pairs: int
    n_scaling: int
    max_violation_sum: float
    witness_sum: tuple
    max_violation_scaling: float
    witness_scaling: tuple
    violations: int = 0

    @property
    def ok(self):
        return self.violations == 0


def check_omega_inequalities(M, sample_points, k_values, report=None, tol=1e-12):
    """Check ``w(x+y) <= w(2x) + w(2y)`` and the scaling bound
    ``w(t) - w(kt) <= -log(t/C0) log k / log H``.

    ``sample_points`` is either an ``(N, 2)`` array of pairs or a flat array;
    a flat array is paired with its own rotation by one.  The scaling bound
    uses every positive sample as ``t`` against every ``k``.
    Violations are measured relative to ``max(1, |lhs|, |rhs|)``.
    """
    report = report or check_conditions(M)
    C0, H = report.m2prime.C0, report.m2prime.H
    if H <= 1.0:
        raise ValueError("scaling bound needs H > 1")
    pts = np.asarray(sample_points, dtype=np.float64)
    if pts.ndim == 1:
        x, y = pts, np.roll(pts, 1)
        ts = pts
    else:
        x, y = pts[:, 0], pts[:, 1]
        ts = pts.ravel()
    if np.any(pts < 0):
        raise ValueError("sample points must be nonnegative")

    lhs = associated_function(M, x + y)
    rhs = associated_function(M, 2 * x) + associated_function(M, 2 * y)
    viol = (lhs - rhs) / np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    i = int(np.argmax(viol))
    n_bad = int(np.sum(viol > tol))

    ts = ts[ts > 0]
    k = np.asarray(k_values, dtype=np.float64)
    if np.any(k <= 1):
        raise ValueError("k values must exceed 1")
    tt, kk = np.meshgrid(ts, k, indexing="ij")
    tt, kk = tt.ravel(), kk.ravel()
    w_t = associated_function(M, tt)
    w_kt = associated_function(M, kk * tt)
    lhs2 = w_t - w_kt
    rhs2 = -np.log(tt / C0) * np.log(kk) / math.log(H)
    viol2 = (lhs2 - rhs2) / np.maximum(1.0, np.maximum(np.abs(lhs2), np.abs(rhs2)))
    j = int(np.argmax(viol2)) if viol2.size else 0
    n_bad += int(np.sum(viol2 > tol))
    return OmegaCheckReport(
        C0=C0, H=H, n_pairs=x.size, n_scaling=tt.size,
        max_violation_sum=float(viol[i]), witness_sum=(float(x[i]), float(y[i])),
        max_violation_scaling=float(viol2[j]) if viol2.size else -np.inf,
        witness_scaling=(float(tt[j]), float(kk[j])) if viol2.size else (),
        violations=n_bad,
    )


# ---------------------------------------------------------------- inclusion and r-modulation

@dataclass(frozen=True)
class SubordinationReport:
    holds: bool
    C: float
    L: float
    P: int


def _required_log_l(d, upto, step):
    local = np.diff(d[:upto + 1])[upto // 2:]
    need = max(0.0, float(np.max(local))) if local.size else 0.0
    return int(math.ceil(need / step - 1e-9))


def subordinate(M, N, cap=1e6, grid_ratio=2 ** 0.125):
    """Decide ``M ⊂ N`` (``M_p <= C L^p N_p``) on the common prefix.

    ``L`` is taken from the geometric grid ``grid_ratio^k`` (k >= 0) as the
    smallest value for which ``M_p / (L^p N_p)`` no longer increases on the
    second half of the prefix; ``C`` is then the maximum of that ratio.  The
    inclusion is accepted when this ``L`` stays below ``cap`` and moves by at
    most one grid step between the half prefix and the whole prefix.
    """
    if M.P != N.P:
        raise ValueError("sequences must share the truncation order")
    d = M.log_values - N.log_values
    step = math.log(grid_ratio)
    k_full = _required_log_l(d, M.P, step)
    k_half = _required_log_l(d, M.P // 2, step)
    log_l = k_full * step
    log_c = float(np.max(d - np.arange(d.size) * log_l))
    holds = (log_l <= math.log(cap)) and (k_full <= k_half + 1)
    return SubordinationReport(bool(holds), math.exp(log_c), math.exp(log_l), M.P)


@dataclass(frozen=True, eq=False)
class RSequence:
    """Nondecreasing positive sequence ``r_0 <= r_1 <= ...``."""

    r: np.ndarray
    degenerate: bool = field(default=False, init=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=np.float64)
        if r.ndim != 1 or r.size == 0 or np.any(r <= 0):
            raise ValueError("r must be a nonempty list of positive reals")
        if np.any(np.diff(r) < 0):
            raise ValueError("r must be nondecreasing")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)
        if r[-1] <= r[0]:
            object.__setattr__(self, "degenerate", True)
            warnings.warn("r sequence is constant on the stored prefix", DegenerateSequenceWarning, stacklevel=2)


def r_modulate(M, r):
    """``(M_r)_p = M_p * prod_{j<=p} r_j``."""
    if not isinstance(r, RSequence):
        r = RSequence(r)
    if r.r.size < M.P + 1:
        raise ValueError(f"r needs at least P+1 = {M.P + 1} entries")
    logs = M.log_values + np.cumsum(np.log(r.r[:M.P + 1]))
    return WeightSequence(logs, label=f"{M.label}*r")

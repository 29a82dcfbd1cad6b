"""Hot grid kernels with a numba path and a pure-numpy fallback.

The backend is picked once at import from ``ULTRAKIT_USE_NUMBA`` ("1" by
default when numba imports, "0" forces numpy).  ``use_backend`` switches it
temporarily, which the tests and the benchmark rely on.  Every kernel
computes each output entry with a fixed sequential loop, so results do not
depend on the thread count.
"""
import os
from contextlib import contextmanager

import numpy as np

# the TBB layer shipped with some numba wheels is too old and warns on every launch
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    import numba
    from numba import njit, prange
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

_env = os.environ.get("ULTRAKIT_USE_NUMBA", "1").strip().lower()
_BACKEND = "numba" if HAS_NUMBA and _env not in ("0", "false", "no", "off") else "numpy"


def backend():
    return _BACKEND


def set_backend(name):
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not importable")
    _BACKEND = name


@contextmanager
def use_backend(name):
    old = _BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


def set_threads(n):
    if HAS_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


# ---------------------------------------------------------------- numpy path

def _eval_terms_np(coeffs, a, b, c, x):
    out = np.zeros(x.shape[0], dtype=np.complex128)
    for k in range(coeffs.shape[0]):
        poly = np.zeros(x.shape[0], dtype=np.complex128)
        for j in range(coeffs.shape[1] - 1, -1, -1):
            poly = poly * x + coeffs[k, j]
        out += poly * np.exp(-a[k] * x * x + b[k] * x + c[k])
    return out


def _assoc_brute_np(logm_rel, logt):
    p = np.arange(logm_rel.shape[0], dtype=np.float64)
    out = np.empty(logt.shape[0])
    step = 4096
    for s in range(0, logt.shape[0], step):
        block = logt[s:s + step, None] * p[None, :] - logm_rel[None, :]
        out[s:s + step] = block.max(axis=1)
    return out


def _maxplus_shift_np(values, start, count, shifts):
    out = np.empty(shifts.shape[0])
    base = values[start:start + count]
    for i, s in enumerate(shifts):
        out[i] = np.max(values[start + s:start + s + count] - base)
    return out


def _lattice_eval_np(coeffs, a, b, c, nodes, weights, x, absolute):
    out = np.zeros(x.shape[0], dtype=np.complex128)
    step = max(1, 2_000_000 // max(1, nodes.shape[0]))
    for s in range(0, x.shape[0], step):
        y = x[s:s + step, None] - nodes[None, :]
        poly = np.zeros(y.shape, dtype=np.complex128)
        for j in range(coeffs.shape[0] - 1, -1, -1):
            poly = poly * y + coeffs[j]
        vals = poly * np.exp(-a * y * y + b * y + c)
        if absolute:
            vals = np.abs(vals)
        out[s:s + step] = vals @ weights
    return out


# ---------------------------------------------------------------- numba path

if HAS_NUMBA:
    @njit(cache=True, parallel=True)
    def _eval_terms_nb(coeffs, a, b, c, x):
        n = x.shape[0]
        out = np.zeros(n, dtype=np.complex128)
        for i in prange(n):
            xi = x[i]
            acc = 0j
            for k in range(coeffs.shape[0]):
                poly = 0j
                for j in range(coeffs.shape[1] - 1, -1, -1):
                    poly = poly * xi + coeffs[k, j]
                acc += poly * np.exp(-a[k] * xi * xi + b[k] * xi + c[k])
            out[i] = acc
        return out

    @njit(cache=True, parallel=True)
    def _assoc_brute_nb(logm_rel, logt):
        n = logt.shape[0]
        out = np.empty(n)
        for i in prange(n):
            best = -np.inf
            lt = logt[i]
            for p in range(logm_rel.shape[0]):
                v = p * lt - logm_rel[p]
                if v > best:
                    best = v
            out[i] = best
        return out

    @njit(cache=True, parallel=True)
    def _maxplus_shift_nb(values, start, count, shifts):
        out = np.empty(shifts.shape[0])
        for i in prange(shifts.shape[0]):
            s = shifts[i]
            best = -np.inf
            for j in range(count):
                best = max(best, values[start + s + j] - values[start + j])
            out[i] = best
        return out

    @njit(cache=True, parallel=True)
    def _lattice_eval_nb(coeffs, a, b, c, nodes, weights, x, absolute):
        n = x.shape[0]
        out = np.zeros(n, dtype=np.complex128)
        for i in prange(n):
            acc = 0j
            for k in range(nodes.shape[0]):
                y = x[i] - nodes[k]
                poly = 0j
                for j in range(coeffs.shape[0] - 1, -1, -1):
                    poly = poly * y + coeffs[j]
                v = poly * np.exp(-a * y * y + b * y + c)
                if absolute:
                    v = abs(v) + 0j
                acc += weights[k] * v
            out[i] = acc
        return out


# ---------------------------------------------------------------- dispatch

def eval_terms(coeffs, a, b, c, x):
    """Sum of ``poly_k(x) exp(-a_k x^2 + b_k x + c_k)`` over the term rows."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.complex128)
    c = np.ascontiguousarray(c, dtype=np.complex128)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _BACKEND == "numba":
        return _eval_terms_nb(coeffs, a, b, c, x)
    return _eval_terms_np(coeffs, a, b, c, x)


def assoc_brute(logm_rel, logt):
    """``max_p (p * logt - logm_rel[p])`` for every entry of ``logt``."""
    logm_rel = np.ascontiguousarray(logm_rel, dtype=np.float64)
    logt = np.ascontiguousarray(logt, dtype=np.float64)
    if _BACKEND == "numba":
        return _assoc_brute_nb(logm_rel, logt)
    return _assoc_brute_np(logm_rel, logt)


def maxplus_shift(values, start, count, shifts):
    """``max_j values[start+s+j] - values[start+j]`` for each shift ``s``."""
    values = np.ascontiguousarray(values, dtype=np.float64)
    shifts = np.ascontiguousarray(shifts, dtype=np.int64)
    if shifts.size and (start + shifts.min() < 0 or start + shifts.max() + count > values.shape[0]):
        raise IndexError("shift window leaves the tabulated range")
    if _BACKEND == "numba":
        return _maxplus_shift_nb(values, int(start), int(count), shifts)
    return _maxplus_shift_np(values, int(start), int(count), shifts)


def lattice_eval(coeffs, a, b, c, nodes, weights, x, absolute=False):
    """``sum_k w_k f(x - t_k)`` (or with ``|f|``) for a single ExpPoly ``f``."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.complex128)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _BACKEND == "numba":
        return _lattice_eval_nb(coeffs, float(a), complex(b), complex(c), nodes, weights, x, bool(absolute))
    return _lattice_eval_np(coeffs, float(a), complex(b), complex(c), nodes, weights, x, bool(absolute))

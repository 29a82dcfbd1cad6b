import math

import numpy as np
import pytest

from ultrakit import _kernels
from ultrakit import gaussalg as ga
from ultrakit import tmib
from ultrakit import weightseq as ws

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not importable")


def both(fn):
    with _kernels.use_backend("numpy"):
        a = fn()
    with _kernels.use_backend("numba"):
        b = fn()
    return a, b


@needs_numba
def test_eval_terms_backends_agree():
    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    rates = np.array([0.7, 1.5, 3.0])
    lin = np.array([0.3 + 0.2j, -0.5j, 1.0])
    const = np.array([-0.1j, 0.2, 0.0])
    x = np.linspace(-6, 6, 1001)
    a, b = both(lambda: _kernels.eval_terms(coeffs, rates, lin, const, x))
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-300)


@needs_numba
def test_assoc_brute_backends_agree():
    M = ws.gevrey(1.5, 128)
    t = np.geomspace(0.1, 500, 300)
    rel = M.log_values - M.log_values[0]
    a, b = both(lambda: _kernels.assoc_brute(rel, np.log(t)))
    np.testing.assert_array_equal(a, b)


@needs_numba
def test_maxplus_backends_agree():
    E = tmib.parse_space("lp:2:exp:1:1")
    w = E.weight
    a, b = both(lambda: tmib._ratio_sup_table(w, E.grid, 1))
    np.testing.assert_array_equal(a, b)


@needs_numba
@pytest.mark.parametrize("absolute", [False, True])
def test_lattice_backends_agree(absolute):
    t = ga.GaussSum.gaussian(math.pi, [1.0, 0.5j]).terms[0]
    nodes = np.linspace(-3, 3, 97)
    weights = np.exp(-nodes ** 2) + 0j
    x = np.linspace(-4, 4, 201)
    a, b = both(lambda: _kernels.lattice_eval(t.coeffs, t.a, t.b, t.c, nodes, weights, x, absolute))
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-300)


def test_thread_count_does_not_change_results():
    E = tmib.parse_space("lp:1:exp:1:0.5")
    base = tmib._ratio_sup_table(E.weight, E.grid, -1)
    _kernels.set_threads(1)
    try:
        one = tmib._ratio_sup_table(E.weight, E.grid, -1)
    finally:
        _kernels.set_threads(64)
    np.testing.assert_array_equal(base, one)


def test_backend_switch():
    with pytest.raises(ValueError):
        _kernels.set_backend("cuda")
    old = _kernels.backend()
    with _kernels.use_backend("numpy"):
        assert _kernels.backend() == "numpy"
    assert _kernels.backend() == old


def test_maxplus_range_check():
    with pytest.raises(IndexError):
        _kernels.maxplus_shift(np.zeros(10), 0, 5, np.array([-1]))

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrakit import gaussalg as ga
from ultrakit import weightseq as ws
from ultrakit.fixtures import gaussian_fixtures, random_gauss
from ultrakit.grids import FreqGrid, GridMismatchError, TailCertificateError, XGrid
from ultrakit.gsnorms import (NormParams, conv_estimate_check, cw_seminorm, freq_pair, gs_l1_norm, gs_sup_norm,
                              norm_table_rows, sup_norm_table)

M1 = ws.gevrey(1, 64)
A1 = ws.gevrey(1, 256)
G = ga.GaussSum.gaussian


def params(ell=1.0, q=1.0, alpha_max=16, grid=XGrid(12.0, 0.01)):
    return NormParams(M1, A1, ell, q, alpha_max, grid)


def brute_sup(f, ell, q, alpha_max, xs):
    # direct loop; exp(w_A) via the brute-force associated function
    w = np.exp(ws.associated_function_brute(A1, q * np.abs(xs)))
    best = 0.0
    d = f
    for a in range(alpha_max + 1):
        vals = np.abs(d(xs)) * w / (ell ** a * math.factorial(a))
        best = max(best, float(vals.max()))
        d = ga.derivative(d, 1)
    return best


def test_sup_norm_matches_brute_scan():
    f = G(math.pi)
    v = gs_sup_norm(f, params(alpha_max=12))
    ref = brute_sup(f, 1.0, 1.0, 12, XGrid(12.0, 0.005).nodes)
    assert v == pytest.approx(ref, rel=1e-6)


def test_sup_norm_homogeneous_and_monotone_in_ell():
    f = gaussian_fixtures()["wide_poly"]
    p = params()
    assert gs_sup_norm(ga.scale(f, 2.0), p) == pytest.approx(2 * gs_sup_norm(f, p), rel=1e-14)
    assert gs_sup_norm(f, params(ell=2.0)) <= gs_sup_norm(f, params(ell=1.0))


def test_l1_norm_quadrature():
    f = G(1.0)
    p = NormParams(M1, A1, 1.0, 1e-3, 0, XGrid(12.0, 0.01))
    # q so small that w_A(qx) = 0 wherever e^{-x^2} matters
    assert gs_l1_norm(f, p) == pytest.approx(math.sqrt(math.pi), rel=1e-8)
    assert gs_l1_norm(ga.GaussSum.zero(), params()) == 0.0


def test_tail_certificate_failure():
    f = G(0.05)
    with pytest.raises(TailCertificateError):
        gs_sup_norm(f, params(grid=XGrid(2.0, 0.01)))
    res = gs_sup_norm(f, params(grid=XGrid(2.0, 0.01)), detail=True, strict=False)
    assert not res.certified


def test_conv_estimate_examples():
    f = G(math.pi)
    rep = conv_estimate_check(f, f, params())
    assert rep.ok
    rep3 = conv_estimate_check(f, ga.scale(f, 3.0), params())
    assert rep3.left == pytest.approx(3 * rep.left, rel=1e-12)
    assert rep3.right == pytest.approx(3 * rep.right, rel=1e-12)
    zero = conv_estimate_check(f, ga.GaussSum.zero(), params())
    assert zero.left == 0.0 and zero.right == 0.0 and zero.ok


def test_cw_seminorm():
    grid = FreqGrid(8.0, 0.02)
    xi = grid.nodes
    vals = np.exp(-xi ** 2)
    assert cw_seminorm(vals, 1.0, grid) == vals.max()
    assert cw_seminorm(2 * vals, 1.0, grid) == 2 * vals.max()
    M = ws.gevrey(1, 64)
    v = np.exp(-ws.associated_function(M, 2 * np.abs(xi)))
    w = lambda x: np.exp(ws.associated_function(M, np.abs(x)))
    assert cw_seminorm(v, w, grid) == pytest.approx(1.0)
    with pytest.raises(GridMismatchError):
        cw_seminorm(vals[:-1], 1.0, grid)


def test_freq_pair():
    grid = FreqGrid(8.0, 0.01)
    xi = grid.nodes
    left = np.exp(-xi ** 2)
    right = np.exp(-xi ** 2)  # right(-xi) = left(xi)
    assert freq_pair(left, right, grid).real == pytest.approx(math.sqrt(math.pi / 2), abs=1e-8)
    assert freq_pair(left, np.zeros_like(left), grid) == 0
    other = np.cos(xi) * np.exp(-xi ** 2)
    lin = freq_pair(2 * left + other, right, grid)
    assert lin == pytest.approx(2 * freq_pair(left, right, grid) + freq_pair(other, right, grid), abs=1e-14)
    with pytest.raises(GridMismatchError):
        freq_pair(left[:-1], right[:-1], grid)


def test_simpson_norm_of_sum_below_sum_of_norms():
    grid = FreqGrid(8.0, 0.02)
    rng = np.random.default_rng(0)
    field = rng.normal(size=(grid.size, 5)) * np.exp(-grid.nodes ** 2)[:, None]
    summed = grid.integrate(field, axis=0)
    norms = grid.integrate(np.linalg.norm(field, axis=1))
    # Simpson weights are positive, so the triangle inequality carries over
    assert np.linalg.norm(summed) <= norms + 1e-10


def test_refinement_converges():
    f = gaussian_fixtures()["pair_sum"]
    vals = [gs_l1_norm(f, params(grid=XGrid(12.0, h))) for h in (0.08, 0.04, 0.02, 0.01)]
    inc = np.abs(np.diff(vals))
    for a, b in zip(inc, inc[1:]):
        assert b <= a / 4 * 1.5 or b <= 1e-9 * vals[-1]


def test_table_rows_and_shapes():
    f = G(math.pi)
    p = params(alpha_max=3, grid=XGrid(2.0, 0.5))
    raw, weighted = sup_norm_table(f, p)
    assert raw.shape == (4, 9)
    rows = list(norm_table_rows(f, p))
    assert len(rows) == 36
    assert rows[0][0] == 0 and rows[0][1] == -2.0


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_sup_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    f, g = random_gauss(rng), random_gauss(rng)
    p = params(alpha_max=8)
    assert gs_sup_norm(f + g, p) <= gs_sup_norm(f, p) + gs_sup_norm(g, p) + 1e-12


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), q=st.sampled_from([0.5, 1.0, 2.0]))
def test_conv_estimate_random(seed, q):
    rng = np.random.default_rng(seed)
    f, g = random_gauss(rng), random_gauss(rng)
    assert conv_estimate_check(f, g, params(q=q, alpha_max=8, grid=XGrid(20.0, 0.01))).ok

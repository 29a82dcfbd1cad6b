import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from ultrakit import gaussalg as ga
from ultrakit import tmib
from ultrakit import weightseq as ws
from ultrakit.fixtures import random_gauss
from ultrakit.grids import XGrid

G = ga.GaussSum.gaussian
GAUSS = G(math.pi)
M1 = ws.gevrey(1, 64)
A1 = ws.gevrey(1, 256)
WIDE = XGrid(20.0, 0.01)


def test_lp_norm_examples():
    L2 = tmib.parse_space("lp:2:const")
    L1 = tmib.parse_space("lp:1:const")
    assert tmib.space_norm(L2, GAUSS) == pytest.approx(2 ** -0.25, abs=1e-10)
    assert tmib.space_norm(L2, GAUSS) ** 2 == pytest.approx(ga.inner_l2(GAUSS, GAUSS).real, abs=1e-10)
    assert tmib.space_norm(L1, GAUSS) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("spec", ["lp:1:poly:2", "lp:2:exp:1:0.5", "lp:inf:poly:1", "flp:2:poly:2", "c0w:poly:1",
                                  "lp:4:poly:2"])
def test_norm_homogeneous(spec):
    E = tmib.parse_space(spec)
    f = G(0.8, [1.0, 0.3j])
    assert tmib.space_norm(E, ga.scale(f, 2.0)) == pytest.approx(2 * tmib.space_norm(E, f), rel=1e-13)


def test_weighted_l1_against_quad():
    E = tmib.parse_space("lp:1:poly:2")
    f = G(0.6, [1.0, -0.5])
    ref = quad(lambda x: abs(complex(f(x))) * (1 + abs(x)) ** 2, -np.inf, np.inf, epsabs=1e-13, limit=400)[0]
    assert tmib.space_norm(E, f) == pytest.approx(ref, rel=1e-8)


def test_fourier_lp_is_lp_of_transform():
    f = G(1.3, [1.0, 0.4])
    E = tmib.parse_space("flp:2:poly:1")
    assert tmib.space_norm(E, f) == pytest.approx(
        tmib.space_norm(tmib.parse_space("lp:2:poly:1"), ga.fourier(f)), rel=1e-14)


def test_operator_weights():
    Lp = tmib.parse_space("lp:2:poly:2")
    Fp = tmib.parse_space("flp:2:poly:2")
    xs = np.array([-3.0, -0.5, 0.0, 1.0, 4.0])
    np.testing.assert_array_equal(tmib.modulation_weight(Lp, xs), 1.0)
    np.testing.assert_array_equal(tmib.translation_weight(Fp, xs), 1.0)
    for E in (Lp, Fp, tmib.parse_space("c0w:poly:1"), tmib.parse_space("lp:1:exp:1:1")):
        assert tmib.translation_weight(E, 0.0) == pytest.approx(1.0, rel=1e-14)
    # (1+|u+x|)^2/(1+|u|)^2 peaks at u = 0 with value (1+|x|)^2
    for x in (0.5, 2.0, 3.0):
        assert tmib.translation_weight(Lp, x) == pytest.approx((1 + x) ** 2, rel=1e-12)


def test_translation_weight_refinement_stable():
    for spec in ("lp:2:poly:2", "lp:2:exp:1:1"):
        E = tmib.parse_space(spec, XGrid(12.0, 0.01))
        E2 = tmib.parse_space(spec, XGrid(24.0, 0.005))
        for x in (0.7, 2.0, 5.0):
            assert tmib.translation_weight(E2, x) == pytest.approx(tmib.translation_weight(E, x), rel=0.01)


def test_submultiplicativity():
    E = tmib.parse_space("lp:2:exp:1:1")
    xs = np.linspace(-4, 4, 17)
    w = {x: tmib.translation_weight(E, x) for x in xs}
    for x in xs:
        for y in xs:
            if abs(x + y) <= 4:
                assert tmib.translation_weight(E, x + y) <= w[x] * w[y] * (1 + 1e-9)


def test_admissible():
    rep = tmib.check_admissible(tmib.WeightFunction.constant(), A1, 1.0)
    assert rep.holds and rep.C_min == pytest.approx(1.0)
    poly = tmib.check_admissible(tmib.WeightFunction.polynomial(2), A1, 1.0)
    assert poly.holds
    # analytic bound (1+|x+t|)^k <= (1+|x|)^k (1+|t|)^k gives C <= sup (1+|t|)^2 e^{-w(t)}
    t = tmib.DEFAULT_GRID.nodes
    bound = float(np.max((1 + np.abs(t)) ** 2 * np.exp(-ws.associated_function(A1, np.abs(t), warn=False))))
    assert poly.C_min <= bound * (1 + 1e-12)
    expw = tmib.check_admissible(tmib.WeightFunction.exp_assoc(A1, 1.0), A1, 2.0)
    assert math.isfinite(expw.C_min)


def test_axioms():
    E = tmib.parse_space("lp:2:const")
    rep = tmib.check_tmib_axioms(E, M1, A1, [0.5, 1, 2])
    assert all(v == pytest.approx(1.0) for v in rep.translation_constants.values())
    for row in rep.growth_table:
        assert row["status"] == "verified" and row["q1"] == row["q0"] and row["C"] == pytest.approx(1.0)
    F = tmib.parse_space("flp:2:poly:2")
    rep = tmib.check_tmib_axioms(F, M1, A1, [0.5, 1, 2, 4])
    rows = rep.growth_table
    assert all(r["status"] == "verified" and r["q1"] > r["q0"] for r in rows[:-1])
    # a polynomial nu_E needs q1 > q0, which the top of the grid cannot offer
    assert rows[-1]["status"] == "unverified" and rows[-1]["C"] is None


def test_module_conv_examples():
    L2 = tmib.parse_space("lp:2:const")
    rep = tmib.module_conv_check(L2, GAUSS, GAUSS)
    assert rep.ok
    assert rep.left == pytest.approx(tmib.space_norm(L2, G(math.pi / 2, [2 ** -0.5])), rel=1e-12)
    zero = tmib.module_conv_check(L2, GAUSS, ga.GaussSum.zero())
    assert zero.left == 0 and zero.ok


@pytest.mark.parametrize("spec", ["lp:1:poly:2", "lp:2:poly:2", "lp:4:poly:2"])
def test_module_conv_sweep(spec):
    E = tmib.parse_space(spec, WIDE)
    rng = np.random.default_rng(17)
    for _ in range(100):
        assert tmib.module_conv_check(E, random_gauss(rng), random_gauss(rng)).ok


def test_de_norm():
    L2 = tmib.parse_space("lp:2:const")
    assert tmib.de_norm(ga.GaussSum.zero(), L2, M1, 1.0) == 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ws.SaturationWarning)
        v1 = tmib.de_norm(GAUSS, L2, M1, 1.0, 12)
        v2 = tmib.de_norm(GAUSS, L2, M1, 2.0, 12)
    assert v2 <= v1
    d = GAUSS
    table = []
    for a in range(13):
        table.append(tmib.space_norm(L2, d) / math.factorial(a))
        d = ga.derivative(d, 1)
    assert v1 == pytest.approx(max(table), rel=1e-14)


def test_de_norm_derivative_reindexing():
    # ||(f')^(a)||_E / (l^a M_a) = l (M_{a+1}/M_a) ||f^(a+1)||_E / (l^{a+1} M_{a+1})
    E = tmib.parse_space("lp:2:poly:1")
    f = G(1.1, [1.0, 0.2])
    ell = 0.7
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ws.SaturationWarning)
        df = tmib.de_norm(ga.derivative(f, 1), E, M1, ell, 10, detail=True)
        base = tmib.de_norm(f, E, M1, ell, 11, detail=True)
    for a in range(11):
        rhs = ell * M1.values[a + 1] / M1.values[a] * base.per_alpha[a + 1]
        assert df.per_alpha[a] == pytest.approx(rhs, rel=1e-12)


def test_conv_e_to_de():
    L2 = tmib.parse_space("lp:2:const")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ws.SaturationWarning)
        rep = tmib.conv_E_to_DE_check(GAUSS, GAUSS, L2, M1, A1, 1.0, 1.0)
        zero = tmib.conv_E_to_DE_check(GAUSS, ga.GaussSum.zero(), L2, M1, A1, 1.0, 1.0)
    assert rep.ok
    assert zero.left == 0 and zero.right == 0


def test_mollifier():
    L2 = tmib.parse_space("lp:2:const")
    rep = tmib.mollifier_study(GAUSS, GAUSS, L2)
    assert rep.monotone and rep.final_ok
    np.testing.assert_allclose(rep.psi_integrals, 1.0, atol=1e-12)
    double = tmib.mollifier_study(GAUSS, ga.scale(GAUSS, 2.0), L2)
    np.testing.assert_allclose(double.errors, 2 * np.array(rep.errors), rtol=1e-10)
    with pytest.raises(ValueError):
        tmib.mollifier_study(G(1.0), GAUSS, L2)
    # the chi * chi_n family converges to chi and levels off
    single = tmib.mollifier_study(GAUSS, GAUSS, L2, construction="single")
    assert not single.final_ok


def test_parse_errors():
    for bad in ("lq:2:const", "lp:0.5:const", "lp:2:weird", "c0w:poly"):
        with pytest.raises(ValueError):
            tmib.parse_space(bad)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000), spec=st.sampled_from(["lp:1:poly:1", "lp:2:const", "flp:2:poly:1",
                                                          "lp:inf:poly:2"]))
def test_module_conv_property(seed, spec):
    rng = np.random.default_rng(seed)
    E = tmib.parse_space(spec, WIDE)
    assert tmib.module_conv_check(E, random_gauss(rng), random_gauss(rng)).ok

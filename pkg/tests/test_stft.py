import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrakit import gaussalg as ga
from ultrakit import stft
from ultrakit import tmib
from ultrakit import weightseq as ws
from ultrakit.fixtures import distribution_fixtures, gaussian_fixtures, probe_functions, random_gauss
from ultrakit.grids import FreqGrid

G = ga.GaussSum.gaussian
GAUSS = G(math.pi)
XS = np.linspace(-3, 3, 25)
WINDOW = stft.build_window(GAUSS)


def test_gaussian_window():
    w = WINDOW
    assert w.lam == pytest.approx(0.5, rel=1e-14)
    np.testing.assert_allclose(w.psi0(XS), 2 ** 0.25 * np.exp(-math.pi * XS ** 2), rtol=1e-14)
    np.testing.assert_allclose(w.psi(XS), np.exp(-math.pi * XS ** 2 / 2), rtol=1e-13, atol=1e-300)
    assert ga.inner_l2(w.psi, w.psi).real == pytest.approx(1.0, abs=1e-12)
    # psi even when the seed is even
    np.testing.assert_allclose(w.psi(-XS), w.psi(XS), rtol=1e-14)


def test_window_scaling_invariance():
    seed = G(1.3, [1.0, 0.0, 0.4])
    a, b = stft.build_window(seed), stft.build_window(ga.scale(seed, 3.7))
    np.testing.assert_allclose(a.psi(XS), b.psi(XS), rtol=1e-12)


def test_window_random_seeds():
    rng = np.random.default_rng(4)
    for _ in range(20):
        w = stft.build_window(random_gauss(rng))
        assert ga.inner_l2(w.psi, w.psi).real == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(w.psi(-XS), w.psi(XS), atol=1e-12 * np.max(np.abs(w.psi(XS))))


def test_window_rejects_zero_at_origin():
    with pytest.raises(ValueError):
        stft.build_window(G(1.0, [0.0, 1.0]))


def test_stft_examples():
    v = stft.stft(GAUSS, GAUSS, 0.0)
    np.testing.assert_allclose(v(XS), 2 ** -0.5 * np.exp(-math.pi * XS ** 2 / 2), atol=1e-15)
    assert stft.stft(ga.GaussSum.zero(), GAUSS, 0.7).is_zero


def test_stft_against_definition():
    # V_psi f(xi)(x) = ∫ f(t) conj(psi(t - x)) e^{-2 pi i xi t} dt
    from scipy.integrate import quad
    f = G(0.9, [1.0, 0.3j])
    psi = G(1.4, [1.0, 0.2])
    for xi, x in ((0.4, 0.3), (-1.1, -0.6)):
        def integrand(t):
            return complex(f(t)) * np.conj(complex(psi(t - x))) * np.exp(-2j * math.pi * xi * t)
        ref = complex(quad(lambda t: integrand(t).real, -np.inf, np.inf, epsabs=1e-14)[0],
                      quad(lambda t: integrand(t).imag, -np.inf, np.inf, epsabs=1e-14)[0])
        assert complex(stft.stft(f, psi, xi)(x)) == pytest.approx(ref, abs=1e-11)


def test_stft_modulation_covariance():
    f = G(1.1, [1.0, -0.3])
    eta = 0.45
    for xi in (-0.7, 0.0, 0.3):
        a = np.abs(stft.stft(ga.modulate(f, eta), WINDOW.psi, xi + eta)(XS))
        b = np.abs(stft.stft(f, WINDOW.psi, xi)(XS))
        np.testing.assert_allclose(a, b, atol=1e-10)


def test_stft_distribution_moves_derivative():
    g = G(1.2, [1.0, 0.5])
    d = ga.FiniteDistribution({2: g})
    for xi in (0.0, 0.8):
        np.testing.assert_allclose(stft.stft(d, WINDOW.psi, xi)(XS),
                                   stft.stft(ga.derivative(g, 2), WINDOW.psi, xi)(XS), atol=1e-12)


def test_adjoint_zero_and_linearity():
    grid = FreqGrid(2.0, 0.25)
    zero = stft.StftField(grid, [ga.GaussSum.zero()] * grid.size)
    np.testing.assert_array_equal(stft.adjoint_stft(zero, GAUSS, XS), 0)
    f1 = stft.stft_field(G(1.0), WINDOW.psi, grid)
    f2 = stft.stft_field(G(2.0, [0.0, 1.0]), WINDOW.psi, grid)
    both = stft.StftField(grid, [a + ga.scale(b, 2.0) for a, b in zip(f1.samples, f2.samples)])
    lhs = stft.adjoint_stft(both, GAUSS, XS)
    rhs = stft.adjoint_stft(f1, GAUSS, XS) + 2 * stft.adjoint_stft(f2, GAUSS, XS)
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)
    with pytest.raises(TypeError):
        stft.adjoint_stft(stft.StftField(grid, [0.0] * grid.size, kind="norm"), GAUSS, XS)


def test_adjoint_single_bump():
    # Phi(xi) = e^{-100 xi^2} g: the xi-integral is a Gaussian in x
    grid = FreqGrid(1.0, 0.005)
    g = G(1.0, [1.0, 0.2])
    field = stft.StftField(grid, [ga.scale(g, math.exp(-100 * xi ** 2)) for xi in grid.nodes])
    x = np.array([-1.0, -0.4, 0.0, 0.5, 1.3])
    got = stft.adjoint_stft(field, GAUSS, x)
    ref = ga.convolve(g, GAUSS)(x) * math.sqrt(math.pi / 100) * np.exp(-math.pi ** 2 * x ** 2 / 100)
    np.testing.assert_allclose(got, ref, atol=1e-10)


def test_adjoint_norm_of_integral():
    grid = FreqGrid(4.0, 0.05)
    field = stft.stft_field(gaussian_fixtures()["wide_poly"], WINDOW.psi, grid)
    acc, acc_abs = stft.adjoint_stft(field, WINDOW.psi, XS, with_abs=True)
    assert np.all(np.abs(acc) <= acc_abs + 1e-10)


def test_reconstruction_examples():
    grid = FreqGrid(8.0, 0.02)
    err = stft.reconstruct_check(GAUSS, WINDOW, grid)
    assert err <= 1e-6
    assert stft.reconstruct_check(ga.GaussSum.zero(), WINDOW, grid) == 0.0
    shifted = stft.reconstruct_check(ga.translate(GAUSS, 1.0), WINDOW, grid)
    assert shifted <= 2 * max(err, 1e-6)


def test_reconstruction_halving():
    errs = [stft.reconstruct_check(GAUSS, WINDOW, FreqGrid(8.0, d)) for d in (0.32, 0.16, 0.08)]
    for a, b in zip(errs, errs[1:]):
        assert b <= a / 4 or b <= 1e-9


def test_desingularize_examples():
    res = stft.desingularize(ga.FiniteDistribution({0: GAUSS}), GAUSS, WINDOW)
    assert res.value == pytest.approx(2 ** -0.5, abs=1e-8)
    g = G(0.8, [1.0, 0.3])
    res = stft.desingularize(ga.FiniteDistribution({1: g}), GAUSS, WINDOW)
    ref = -ga.bilinear(g, ga.derivative(GAUSS, 1))
    assert abs(res.value - ref) <= 1e-8 * abs(ref)
    zero = stft.desingularize(ga.FiniteDistribution({}), GAUSS, WINDOW)
    assert zero.value == 0 and zero.rel_error == 0


def test_desingularize_fixtures_and_two_windows():
    probes = list(probe_functions().values())
    for i, d in enumerate(distribution_fixtures()):
        assert stft.desingularize(d, probes[i % 5], WINDOW).rel_error <= 1e-6
    gamma = G(2.0, [1.0, 0.1])
    res = stft.desingularize(distribution_fixtures()[6], probes[0], WINDOW, gamma=gamma)
    assert res.distinct_windows and res.rel_error <= 1e-6


def test_decay_profile():
    L2 = tmib.parse_space("lp:2:const")
    grid = FreqGrid(4.0, 0.05)
    prof = stft.decay_profile(GAUSS, WINDOW.psi, L2, grid)
    v = prof.values
    np.testing.assert_allclose(v, v[::-1], rtol=1e-12)
    xi = grid.nodes
    tail = v[xi >= 1.0]
    assert np.all(np.diff(tail) < 0)
    zero = stft.decay_profile(ga.GaussSum.zero(), WINDOW.psi, L2, grid)
    assert np.all(zero.values == 0)
    # modulating by eta translates the profile by eta (nu_E = 1)
    k = 6
    eta = k * grid.spacing
    mod = stft.decay_profile(ga.modulate(GAUSS, eta), WINDOW.psi, L2, grid).values
    np.testing.assert_allclose(mod[k:], v[:-k], rtol=1e-10, atol=1e-300)


def test_fit_decay_gaussian_stabilizes():
    L2 = tmib.parse_space("lp:2:const")
    prof = stft.decay_profile(GAUSS, WINDOW.psi, L2, FreqGrid(8.0, 0.05))
    rows = stft.fit_decay(prof, ws.gevrey(1, 64), [0.5, 1, 4])
    assert all(r["stabilized"] for r in rows)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_desingularize_random_property(seed):
    rng = np.random.default_rng(seed)
    order = int(rng.integers(0, 5))
    d = ga.FiniteDistribution({order: random_gauss(rng)})
    res = stft.desingularize(d, random_gauss(rng, a_range=(0.5, 3.0)), WINDOW)
    assert res.rel_error <= 1e-6 or abs(res.value - res.exact) <= 1e-12

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from ultrakit import gaussalg as ga
from ultrakit.fixtures import random_gauss

G = ga.GaussSum.gaussian


def cquad(fn, lo=-np.inf, hi=np.inf):
    re = quad(lambda t: complex(fn(t)).real, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    im = quad(lambda t: complex(fn(t)).imag, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    return complex(re, im)


XS = np.linspace(-3, 3, 41)


def test_derivative_examples():
    f = G(math.pi)
    np.testing.assert_allclose(ga.derivative(f, 1)(XS), -2 * math.pi * XS * np.exp(-math.pi * XS ** 2), atol=1e-14)
    np.testing.assert_array_equal(ga.derivative(f, 0)(XS), f(XS))
    g = G(1.0, [0.0, 1.0])
    d2 = ga.derivative(g, 2)
    xs = np.linspace(-2, 2, 10)
    h = 1e-3
    fd = (g(xs + h) - 2 * g(xs) + g(xs - h)) / h ** 2
    np.testing.assert_allclose(d2(xs), fd, atol=1e-6)
    np.testing.assert_allclose(d2(xs), (4 * xs ** 3 - 6 * xs) * np.exp(-xs ** 2), atol=1e-13)


def test_degree_cap():
    with pytest.raises(ga.DegreeOverflowError):
        ga.derivative(G(1.0), 70)


def test_translate_modulate_reflect():
    f = G(math.pi)
    assert complex(ga.translate(f, 1.0)(1.0)) == pytest.approx(1.0)
    g = G(0.8, [1.0, 0.5 - 0.2j, 0.1], b=0.3 + 0.1j)
    np.testing.assert_allclose(ga.modulate(g, 0.0)(XS), g(XS), atol=0)
    lhs = ga.reflect(ga.modulate(g, 0.7))(XS)
    rhs = ga.modulate(ga.reflect(g), -0.7)(XS)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    np.testing.assert_allclose(ga.translate(g, 0.4)(XS), g(XS - 0.4), atol=1e-12)
    np.testing.assert_allclose(ga.conj(g)(XS), np.conj(g(XS)), atol=1e-14)


def test_convolve_gaussian_pair():
    f = G(math.pi)
    conv = ga.convolve(f, f)
    rng = np.random.default_rng(1)
    for x in rng.uniform(-2, 2, 20):
        ref = cquad(lambda t: f(t) * f(x - t))
        assert complex(conv(x)) == pytest.approx(ref, rel=1e-10, abs=1e-14)
    np.testing.assert_allclose(conv(XS), 2 ** -0.5 * np.exp(-math.pi * XS ** 2 / 2), atol=1e-15)


def test_convolve_delta_sequence():
    f = G(1.0, [1.0, 0.3])
    xs = np.array([-1.0, -0.3, 0.0, 0.5, 1.2])
    errs = []
    for n in (2, 4, 8):
        delta = G(math.pi * n * n, [float(n)])
        errs.append(np.max(np.abs(ga.convolve(f, delta)(xs) - f(xs))))
    assert errs[0] > errs[1] > errs[2]


def test_convolve_random_against_quad():
    rng = np.random.default_rng(11)
    for _ in range(100):
        f = random_gauss(rng, deg_max=4)
        g = random_gauss(rng, deg_max=4)
        conv = ga.convolve(f, g)
        x = float(rng.uniform(-2, 2))
        ref = cquad(lambda t: g(t) * f(x - t))
        scale = cquad(lambda t: abs(g(t) * f(x - t))).real
        assert abs(complex(conv(x)) - ref) <= 1e-8 * max(scale, 1e-300)


def test_fourier():
    f = G(math.pi)
    np.testing.assert_allclose(ga.fourier(f)(XS), np.exp(-math.pi * XS ** 2), atol=1e-15)
    g = G(0.9, [1.0, 0.2j, -0.3])
    for xi in (-0.8, 0.0, 0.35, 1.1):
        ref = cquad(lambda t: g(t) * np.exp(-2j * math.pi * t * xi))
        assert complex(ga.fourier(g)(xi)) == pytest.approx(ref, rel=1e-10, abs=1e-14)
    # shift theorem
    lhs = ga.fourier(ga.translate(g, 0.6))(XS)
    rhs = ga.modulate(ga.fourier(g), -0.6)(XS)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_inner_l2_and_parseval():
    f = G(math.pi)
    assert ga.inner_l2(f, f) == pytest.approx(2 ** -0.5, rel=1e-14)
    ref = cquad(lambda t: abs(f(t)) ** 2)
    assert ga.inner_l2(f, f) == pytest.approx(ref, abs=1e-12)
    rng = np.random.default_rng(5)
    for _ in range(10):
        g, h = random_gauss(rng), random_gauss(rng)
        v = ga.inner_l2(g, h)
        assert v == pytest.approx(np.conj(ga.inner_l2(h, g)), abs=1e-13)
        assert v == pytest.approx(ga.inner_l2(ga.fourier(g), ga.fourier(h)), rel=1e-10, abs=1e-13)
        n = ga.inner_l2(g, g)
        assert abs(n.imag) < 1e-14 and n.real > 0


def test_pair():
    g = G(0.7, [1.0, -0.4])
    phi = G(math.pi)
    assert ga.pair(ga.FiniteDistribution({0: g}), phi) == pytest.approx(cquad(lambda t: g(t) * phi(t)), abs=1e-13)
    dphi = ga.derivative(phi, 1)
    assert ga.pair(ga.FiniteDistribution({1: g}), phi) == pytest.approx(-cquad(lambda t: g(t) * dphi(t)), abs=1e-13)
    d2 = ga.derivative(phi, 2)
    ref = cquad(lambda t: phi(t) * d2(t))
    assert ga.pair(ga.FiniteDistribution({2: phi}), phi) == pytest.approx(ref, rel=1e-10)


def test_integrate():
    g = G(1.0)
    assert complex(ga.integrate(g)) == pytest.approx(math.sqrt(math.pi), rel=1e-15)


def test_text_round_trip():
    rng = np.random.default_rng(2)
    f = random_gauss(rng) + random_gauss(rng)
    back = ga.from_text(ga.to_text(f))
    np.testing.assert_array_equal(back(XS), f(XS))
    with pytest.raises(ValueError):
        ga.from_text("a=-1 b=0+0i c=0+0i coeffs=[1]")


def test_bitwise_merge_only():
    s = G(1.0) + G(1.0)
    assert len(s.terms) == 1
    near = G(1.0) + G(1.0 + 1e-15)
    assert len(near.terms) == 2


def test_rejects_nonpositive_rate():
    with pytest.raises(ValueError):
        G(0.0)


coef = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)
terms = st.builds(lambda a, c, x0, xi: ga.modulate(ga.translate(G(a, c), x0), xi),
                  st.floats(0.3, 3.0), st.lists(coef, min_size=1, max_size=4),
                  st.floats(-1, 1), st.floats(-1, 1))


@settings(max_examples=40, deadline=None)
@given(f=terms, g=terms)
def test_convolution_commutes_and_differentiates(f, g):
    fg, gf = ga.convolve(f, g), ga.convolve(g, f)
    scale = 1.0 + np.max(np.abs(fg(XS)))
    np.testing.assert_allclose(fg(XS), gf(XS), atol=1e-10 * scale)
    d1 = ga.derivative(fg, 1)(XS)
    d2 = ga.convolve(ga.derivative(f, 1), g)(XS)
    np.testing.assert_allclose(d1, d2, atol=1e-10 * (1.0 + np.max(np.abs(d1))))


@settings(max_examples=40, deadline=None)
@given(f=terms, g=terms)
def test_fourier_of_convolution_is_product(f, g):
    xi = np.linspace(-2, 2, 17)
    lhs = ga.fourier(ga.convolve(f, g))(xi)
    rhs = ga.fourier(f)(xi) * ga.fourier(g)(xi)
    np.testing.assert_allclose(lhs, rhs, atol=1e-8 * (1.0 + np.max(np.abs(rhs))))

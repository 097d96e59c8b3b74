import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtorus.algebra import ParameterError, TrigPoly
from qtorus.multipliers import apply, constant_symbol, fejer_symbol, pisier_symbol, table_symbol
from qtorus.transference import (AtomicFejerMeasure, CyclicPoly, FejerComponent,
                                 cond_expectation, convex_measure, cyclic_embed, cyclic_lp_norm,
                                 cyclic_rep, embed_tail, empirical_jdn_norms, j_dn, j_dn_inverse,
                                 measure_fourier, periodization_constant, periodize, sinc_bound,
                                 sinc_bound_inverse, total_variation_bound, trig_lp_norm)


# -- cyclic group ---------------------------------------------------------------------

@pytest.mark.parametrize("n,k,rep", [(4, 2, 2), (4, -2, 2), (4, 3, -1), (5, 3, -2), (5, 2, 2),
                                     (8, 12, 4), (7, -11, 3)])
def test_representatives(n, k, rep):
    assert cyclic_rep(k, n) == rep


def test_construction_sums_aliases():
    y = CyclicPoly(4, {1: 1, 5: 2, -3: 1j})
    assert y.coeffs == {1: 3 + 1j}


@pytest.mark.parametrize("p", [1, 2, 3.5, math.inf])
def test_characters_have_unit_norm(p):
    for k in range(-3, 4):
        assert cyclic_lp_norm(CyclicPoly(7, {k: 1}), p) == pytest.approx(1, abs=1e-14)


@pytest.mark.parametrize("p", [1, 2, 4])
def test_two_point_example(p):
    assert cyclic_lp_norm(CyclicPoly(2, {0: 1, 1: 1}), p) == pytest.approx((2 ** p / 2) ** (1 / p))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 40), st.integers(0, 10 ** 6))
def test_cyclic_parseval(n, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n) + 1j * rng.normal(size=n)
    y = CyclicPoly(n, dict(enumerate(c)))
    assert cyclic_lp_norm(y, 2) == pytest.approx(np.linalg.norm(c), rel=1e-10)


# -- discretization maps ----------------------------------------------------------------

def test_j_dn_basics(rng):
    assert j_dn(TrigPoly({0: 1}), 3) == CyclicPoly(3, {0: 1})
    x = TrigPoly.random(3, rng)
    assert j_dn_inverse(j_dn(x, 9), 3) == x


def test_j_dn_errors():
    with pytest.raises(ParameterError):
        j_dn(TrigPoly({2: 1}), 4)
    with pytest.raises(ParameterError):
        j_dn_inverse(CyclicPoly(9, {4: 1}), 3)
    with pytest.raises(ParameterError):
        j_dn_inverse(CyclicPoly(6, {1: 1}), 3)


def test_sinc_bound_closed_forms():
    assert sinc_bound(1, 4) == pytest.approx((math.sin(math.pi / 4) / (math.pi / 4)) ** -2)
    assert sinc_bound(1, 4) == pytest.approx(math.pi ** 2 / 8, rel=1e-15)
    assert sinc_bound_inverse(1, 4) == pytest.approx(math.pi ** 2 / 2, rel=1e-15)
    for d in (1, 3, 10):
        assert sinc_bound(d, 10 ** 6 * d) == pytest.approx(1, abs=1e-9)
        assert sinc_bound_inverse(d, 10 ** 6 * d) == pytest.approx(1, abs=1e-5)


def test_j14_empirical_norm_below_bound():
    r = empirical_jdn_norms(1, 4, 4, samples=10_000)
    assert r["forward_max"] <= sinc_bound(1, 4) + 1e-9
    assert r["forward_max"] > 1  # the ensemble actually probes the map


@pytest.mark.parametrize("d,n", [(1, 4), (2, 8), (4, 32)])
@pytest.mark.parametrize("p", [1, 2, 4, math.inf])
def test_ensemble_bounds_small(d, n, p):
    r = empirical_jdn_norms(d, n, p, samples=500, seed=3)
    assert r["forward_max"] <= r["forward_bound"] + 1e-9
    assert r["inverse_max"] <= r["inverse_bound"] + 1e-9


def test_trig_lp_norm_exact_for_even_p(rng):
    x = TrigPoly.random(3, rng)
    # ||x||_4^4 = ||x^2||_2^2, computed by convolving coefficients
    c = np.array([x[k] for k in range(-3, 4)])
    sq = np.convolve(c, c)
    assert trig_lp_norm(x, 4, grid=13) == pytest.approx(np.linalg.norm(sq) ** 0.5, rel=1e-12)


# -- conditional expectation and its inverse -----------------------------------------------------

def test_cond_expectation_basics():
    assert cond_expectation(TrigPoly({0: 1}), 5) == CyclicPoly(5, {0: 1})
    for n in (4, 7, 64):
        for k in range(-(n - 1) // 2, n // 2 + (n % 2)):
            if 2 * abs(k) < n:
                y = cond_expectation(TrigPoly({k: 1}), n)
                want = math.sin(math.pi * k / n) / (math.pi * k / n) if k else 1.0
                assert y[k] == pytest.approx(want, abs=2e-16)


def test_cond_expectation_aliasing_and_tie():
    y = cond_expectation(TrigPoly({2: 1, -2: 1, 6: 1}), 4)
    # +-2 and 6 all land on the tied class, stored at +n/2
    assert list(y.coeffs) == [2]
    assert y[2] == pytest.approx(2 * np.sinc(0.5) + np.sinc(1.5))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 50), st.integers(1, 8), st.integers(0, 10 ** 6))
def test_cond_expectation_contracts_l2(n, d, seed):
    x = TrigPoly.random(d, np.random.default_rng(seed))
    y = cond_expectation(x, n)
    assert cyclic_lp_norm(y, 2) <= x.l2_norm() * (1 + 1e-12)
    if n > 2 * d:
        assert y[0] == x[0]


def test_embed_identity_basics():
    poly, tail = cyclic_embed(CyclicPoly(8, {0: 1}), 0)
    assert poly == TrigPoly({0: 1}) and tail == 0


@pytest.mark.parametrize("n,k", [(8, 1), (8, 3), (16, 5), (256, 64)])
def test_embed_mass_plus_tail_is_one(n, k):
    poly, tail = cyclic_embed(CyclicPoly(n, {k: 1}), 2000)
    assert poly.l2_norm() ** 2 + tail == pytest.approx(1, abs=1e-12)


def test_embed_mass_deficit_decays_like_inverse_j():
    n, k = 16, 4
    tails = [embed_tail(k, n, J) for J in (10, 100, 1000, 10_000)]
    # sum_{|j| > J} sinc^2 ~ 2 sin^2(pi k/n) / (pi^2 J)
    for J, t in zip((10, 100, 1000, 10_000), tails):
        assert t * J == pytest.approx(2 * math.sin(math.pi * k / n) ** 2 / math.pi ** 2, rel=0.1)


@pytest.mark.parametrize("n", [4, 8, 10, 32])
def test_fejer_identity_on_embedded_characters(n):
    half = n // 2
    F = fejer_symbol(half, 1)
    for k in range(-(half - 1), half):
        poly, _ = cyclic_embed(CyclicPoly(n, {k: 1}), 50)
        out = apply(F, poly)
        want = (1 - 2 * abs(k) / n) * float(np.sinc(k / n))
        assert set(out.coeffs) <= {k}
        assert out[k] == pytest.approx(want, abs=1e-15)


def test_expectation_undoes_embedding():
    y = CyclicPoly(10, {0: 1, 2: -1j, 5: 0.5})
    poly, tail = cyclic_embed(y, 4000)
    back = cond_expectation(poly, 10)
    for k in (0, 2, 5):
        assert abs(back[k] - y[k]) <= abs(y[k]) * (embed_tail(k, 10, 4000) + 1e-13)


# -- measures -------------------------------------------------------------------------------

def test_fourier_primitives():
    delta = AtomicFejerMeasure((), 1.0)
    assert measure_fourier(delta, 17) == 1
    K2 = AtomicFejerMeasure((FejerComponent(1.0, 2),))
    assert measure_fourier(K2, 1) == pytest.approx(2 / 3)


def test_constant_profile_gives_dirac():
    mu = convex_measure(lambda x: 1.0, 5)
    assert mu.components == () and mu.atom == 1
    assert np.allclose(measure_fourier(mu, np.arange(-9, 10)), 1)
    assert total_variation_bound(mu) == 1


def test_linear_profile_n1():
    mu = convex_measure(lambda x: 1.0 + x, 1)
    assert mu.components == (FejerComponent(1.0, 0),) and mu.atom == 1.0
    # product rule against the direct convolution of nu = K_0 + delta_1
    nu_hat = lambda j: (1.0 if j == 0 else 0.0) + 1.0
    for k in (-1, 0, 1):
        assert measure_fourier(mu, k) == pytest.approx(nu_hat(k - 1) * nu_hat(k + 1))
    assert [measure_fourier(mu, k).real for k in (-1, 0, 1)] == [2, 1, 2]
    assert total_variation_bound(mu) <= 4


@pytest.mark.parametrize("N,d", [(8, 2), (20, 5), (256, 64)])
def test_inverse_sinc_profile(N, d):
    f = lambda x: 1.0 / float(np.sinc(x / N))
    mu = convex_measure(f, d)
    ks = np.arange(-d, d + 1)
    assert np.max(np.abs(measure_fourier(mu, ks) - 1 / np.sinc(ks / N))) < 1e-10
    assert total_variation_bound(mu) <= float(np.sinc(d / N)) ** -2 * (1 + 1e-12)


def test_structure_against_dense_quadrature(rng):
    comps = tuple(FejerComponent(float(rng.random()), int(rng.integers(0, 6)),
                                 int(rng.integers(-3, 4))) for _ in range(5))
    nu = AtomicFejerMeasure(comps)
    t = 2 * np.pi * np.arange(2 ** 14) / 2 ** 14
    dens = nu.density(t)
    for k in range(-10, 11):
        quad = np.mean(dens * np.exp(-1j * k * t))
        assert abs(quad - measure_fourier(nu, k)) < 1e-8


def test_positive_density_for_convex_profile():
    mu = convex_measure(lambda x: math.exp(0.3 * x), 6)
    base = AtomicFejerMeasure(mu.components)
    t = np.linspace(0, 2 * np.pi, 1001)
    assert np.min(base.density(t).real) >= -1e-12
    assert all(c.weight >= 0 for c in mu.components)


@pytest.mark.parametrize("vals,where", [([1, 0.5, 2], "decreases at index 1"),
                                        ([1, 3, 4], "not convex at index 1"),
                                        ([2, 3], r"f\(0\) must be 1")])
def test_profile_validation_names_index(vals, where):
    with pytest.raises(ParameterError, match=where):
        convex_measure(vals, len(vals) - 1)


def test_measure_serializes_structurally():
    d = convex_measure(lambda x: 1 + x * x, 3).to_dict()
    assert d["pair"] == [3, -3] and d["atom"] == 1.0
    assert all(set(c) == {"weight", "order", "shift"} for c in d["components"])


# -- periodization ---------------------------------------------------------------------------

def test_periodize_constant_symbol():
    one = constant_symbol(1.0, 1)
    for n in (3, 8, 32):
        assert periodize(one, n)(0) == pytest.approx(1 / periodization_constant(n), rel=1e-15)
    # the (1 - 2/n)^{-2} factor makes the approach to 1 first order in 1/n
    for n in (10, 100, 10_000):
        assert 1 - 1 / periodization_constant(n) == pytest.approx(4 / n, rel=0.25)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_periodize_is_periodic(n, rng):
    phi = periodize(pisier_symbol(1, 4), n)
    ks = rng.integers(-200, 200, size=50)
    a = phi.values(ks[:, None])
    b = phi.values((ks + n * n)[:, None])
    assert np.array_equal(a, b)
    assert phi.check_period(rng)


def test_periodize_converges_pointwise():
    phi = table_symbol(1, {(k,): complex(np.cos(k), np.sin(0.3 * k)) for k in range(-40, 41)})
    for k in range(-32, 33):
        errs = [abs(periodize(phi, n)(k) - phi(k)) for n in range(max(4, abs(k) + 1), 65)]
        assert all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))
        assert errs[-1] <= abs(phi(k)) * (abs(k) / 64 + 1 - 1 / periodization_constant(64)) + 1e-15


@pytest.mark.parametrize("n", range(4, 33, 4))
def test_periodize_does_not_increase_l2_norm(n):
    phi = pisier_symbol(2, 5)
    ks = np.arange(-n * n // 2, n * n // 2 + 1)[:, None]
    sup_n = np.abs(periodize(phi, n).values(ks)).max()
    assert sup_n <= 1.0 / periodization_constant(n) + 1e-15
    assert sup_n <= np.abs(phi.values(np.arange(-64, 65)[:, None])).max()

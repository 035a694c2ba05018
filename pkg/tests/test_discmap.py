import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatdisc.diffeo import TangentVector, compose, identity, linear
from flatdisc.discmap import DiscretizationMap, alpha_map, check_axioms, lift_map
from flatdisc.errors import ArgumentError
from flatdisc.paper_example import XI0, sample_tube

finite = st.floats(-10, 10, allow_nan=False)


def test_alpha_zero_forward():
    x, nu = np.array([1.0, 2.0]), np.array([0.5, -1.0])
    a, b = alpha_map(0.0, 2)(x, nu)
    np.testing.assert_array_equal(a, x)
    np.testing.assert_array_equal(b, x + nu)


def test_alpha_one_forward_and_inverse():
    x, nu = np.array([1.0, 2.0]), np.array([0.5, -1.0])
    dmap = alpha_map(1.0, 2)
    a, b = dmap(x, nu)
    np.testing.assert_array_equal(a, x - nu)
    np.testing.assert_array_equal(b, x)
    tv = dmap.inv(a, b)
    np.testing.assert_array_equal(tv.base, b)
    np.testing.assert_array_equal(tv.vector, b - a)


@pytest.mark.parametrize("alpha", [-0.1, 1.5, float("nan")])
def test_alpha_out_of_range(alpha):
    with pytest.raises(ArgumentError):
        alpha_map(alpha, 3)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.lists(finite, min_size=3, max_size=3))
def test_alpha_identity_axiom(alpha, x):
    x = np.array(x)
    a, b = alpha_map(alpha, 3)(x, np.zeros(3))
    assert np.array_equal(a, x) and np.array_equal(b, x)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.lists(finite, min_size=3, max_size=3), st.lists(st.floats(-0.1, 0.1), min_size=3, max_size=3))
def test_alpha_roundtrip(alpha, x, nu):
    dmap = alpha_map(alpha, 3)
    tv = dmap.inv(*dmap(np.array(x), np.array(nu)))
    np.testing.assert_allclose(tv.base, x, atol=1e-12)
    np.testing.assert_allclose(tv.vector, nu, atol=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 1.0])
def test_alpha_axioms_report(alpha):
    rep = check_axioms(alpha_map(alpha, 5), sample_tube(100, seed=1))
    assert rep.passed and rep.max_identity_defect == 0.0 and rep.samples_tested == 100


def test_lift_identity_is_inner(rng):
    inner = alpha_map(0.4, 3)
    lifted = lift_map(inner, identity(3))
    for _ in range(20):
        x, nu = rng.normal(size=3), rng.normal(size=3)
        for p, q in zip(lifted(x, nu), inner(x, nu)):
            np.testing.assert_array_equal(p, q)
        a, b = inner(x, nu)
        t1, t2 = lifted.inv(a, b), inner.inv(a, b)
        np.testing.assert_array_equal(t1.base, t2.base)
        np.testing.assert_array_equal(t1.vector, t2.vector)


def test_lifted_paper_map_closed_form(quad, lifted_map, rng):
    phi = quad.phi
    for xi in sample_tube(20, seed=2):
        nu = rng.uniform(-0.1, 0.1, 5)
        a, b = lifted_map(xi, nu)
        np.testing.assert_array_equal(a, xi)
        np.testing.assert_allclose(b, phi.inv(phi(xi) + phi.jac(xi) @ nu), atol=1e-15)


def test_lifted_identity_axiom_exact(lifted_map):
    for xi in sample_tube(50, seed=3):
        a, b = lifted_map(xi, np.zeros(5))
        assert np.array_equal(a, xi) and np.array_equal(b, xi)


def test_lifted_paper_map_axioms(lifted_map):
    rep = check_axioms(lifted_map, sample_tube(100, seed=5), seed=5)
    assert rep.passed, rep


def test_adversarial_map_fails_tangency():
    def forward(x, nu):
        return x, x + 2.0 * nu

    def inverse(a, b):
        return TangentVector(a, (b - a) / 2.0)

    bad = DiscretizationMap(3, forward, inverse, kind="double")
    pts = sample_tube(100, seed=6, center=np.zeros(3))
    rep = check_axioms(bad, pts, seed=6)
    # analytic tangency defect is |nu|_inf, drawn from the cube of half-width 0.1
    nus = np.random.default_rng(6).uniform(-0.1, 0.1, size=(100, 3))
    assert rep.max_tangency_defect == pytest.approx(np.max(np.abs(nus)), rel=1e-8)
    assert not rep.passed
    assert rep.max_identity_defect == 0.0


def test_check_axioms_counts_failures(quad, lifted_map):
    far = np.array([0.0, 0.0, -1.0, 0.0, 0.0])  # feedback determinant vanishes
    rep = check_axioms(lifted_map, [far])
    assert rep.failures == 1 and not rep.passed


def test_lift_composition(rng):
    inner = alpha_map(0.5, 3)
    m1 = linear(np.eye(3) + 0.2 * rng.normal(size=(3, 3)))
    m2 = linear(np.eye(3) + 0.2 * rng.normal(size=(3, 3)))
    twice = lift_map(lift_map(inner, m1), m2)
    once = lift_map(inner, compose(m1, m2))
    for _ in range(20):
        x, nu = rng.normal(size=3), rng.uniform(-0.1, 0.1, 3)
        for p, q in zip(twice(x, nu), once(x, nu)):
            np.testing.assert_allclose(p, q, atol=1e-8)


def test_lift_composition_nonlinear(quad, rng):
    inner = alpha_map(0.0, 5)
    shear = linear(np.eye(5) + 0.05 * np.triu(np.ones((5, 5)), 1))
    twice = lift_map(lift_map(inner, quad.phi), shear)
    once = lift_map(inner, compose(quad.phi, shear))
    centre = shear.inv(XI0)
    for x in sample_tube(20, seed=11, radius=0.05, center=centre):
        nu = rng.uniform(-0.05, 0.05, 5)
        for p, q in zip(twice(x, nu), once(x, nu)):
            np.testing.assert_allclose(p, q, atol=1e-8)

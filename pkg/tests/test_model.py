import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nonlocal_fb.model import (ModelError, first_moment_numeric, make_cutoff_kernel, make_initial,
                               make_kernel, make_reaction, make_reaction_logistic, predprey_model,
                               scalar_model, validate_spec)

FAMILIES = [("laplace", {"scale": 1.0}), ("laplace", {"scale": 2.5}),
            ("polynomial-compact", {"radius": 1.0}), ("polynomial-compact", {"radius": 3.0}),
            ("algebraic-tail", {"gamma": 3.5}), ("algebraic-tail", {"gamma": 2.0})]


@pytest.mark.parametrize("family,params", FAMILIES)
def test_kernel_mass_and_tail(family, params):
    k = make_kernel(family, params)
    assert float(k(0.0)) > 0
    xs = np.linspace(-7, 7, 141)
    assert np.allclose(k(xs), k(-xs), rtol=0, atol=1e-15)
    for z in (0.0, 0.3, 1.7, 4.0):
        num = integrate.quad(lambda s: float(k(s)), z, np.inf, limit=400)[0]
        assert float(k.tail(z)) == pytest.approx(num, rel=1e-7, abs=1e-12)
    assert float(k.tail(0.0)) == pytest.approx(0.5, abs=1e-14)
    assert float(k.tail(-1.0)) == pytest.approx(1.0 - float(k.tail(1.0)), abs=1e-14)


@pytest.mark.parametrize("family,params", FAMILIES[:5])
def test_tail_integral_matches_quadrature(family, params):
    k = make_kernel(family, params)
    for z in (0.0, 0.5, 2.0):
        num = integrate.quad(lambda s: float(k.tail(s)), z, np.inf, limit=400)[0]
        assert float(k.tail_integral(z)) == pytest.approx(num, rel=1e-7, abs=1e-12)
    # int_0^inf T equals the first moment
    assert float(k.tail_integral(0.0)) == pytest.approx(k.first_moment, rel=1e-10)


def test_first_moment_flags():
    assert make_kernel("laplace").first_moment_finite
    assert make_kernel("polynomial-compact").first_moment_finite
    assert make_kernel("algebraic-tail", {"gamma": 3.0}).first_moment_finite
    assert not make_kernel("algebraic-tail", {"gamma": 2.0}).first_moment_finite
    assert not make_kernel("algebraic-tail", {"gamma": 1.5}).first_moment_finite
    assert make_kernel("algebraic-tail", {"gamma": 2.0}).tail_integral(1.0) == np.inf


def test_numeric_first_moment_agrees_with_flags():
    assert first_moment_numeric(make_kernel("laplace"))[0]
    finite, m = first_moment_numeric(make_kernel("polynomial-compact", {"radius": 2.0}))
    assert finite and m == pytest.approx(5 * 2.0 / 32, rel=1e-6)
    assert not first_moment_numeric(make_kernel("algebraic-tail", {"gamma": 2.0}), max_doublings=30)[0]


def test_table_kernel_is_renormalized_and_exact():
    x = np.linspace(-2, 2, 41)
    k = make_kernel("table-defined", {"x": x, "values": 3.0 * np.maximum(0, 1 - np.abs(x) / 2)})
    assert 2 * float(k.tail(0.0)) == pytest.approx(1.0, abs=1e-14)
    assert float(k(0.0)) == pytest.approx(0.5)  # hat of half-width 2 has peak 1/2
    assert float(k.tail(1.0)) == pytest.approx(0.125, abs=1e-14)


@pytest.mark.parametrize("bad", [
    {"x": [-1, 0, 1], "values": [0, -1, 0]},
    {"x": [-1, 0, 2], "values": [0, 1, 0]},
    {"x": [-1, 0, 1], "values": [1, 1, 0]},
    {"x": [-1, -0.5, 0, 0.5, 1], "values": [0, 1, 0, 1, 0]},
])
def test_table_kernel_rejects_bad_data(bad):
    with pytest.raises(ModelError):
        make_kernel("table-defined", bad)


def test_unknown_family_and_bad_params():
    with pytest.raises(ModelError):
        make_kernel("gaussian")
    with pytest.raises(ModelError):
        make_kernel("algebraic-tail", {"gamma": 1.0})
    with pytest.raises(ModelError):
        make_kernel("laplace", {"scale": 0})


def test_cutoff_kernel_mass_grows_with_n(laplace):
    masses = [make_cutoff_kernel(laplace, n).mass for n in (1, 2, 4, 8)]
    assert all(b > a for a, b in zip(masses, masses[1:]))
    assert masses[-1] < 1.0 and masses[-1] > 1 - 1e-4
    k = make_cutoff_kernel(laplace, 2.0)
    assert float(k(5.0)) == 0.0 and k.support_radius == 4.0


def test_logistic_reaction():
    r = make_reaction_logistic(2.0, 4.0)
    assert r.u_star == 0.5 and r.K == 1.5 and r.f_prime0 == 2.0
    assert float(r(0.5)) == 0.0
    assert r.lipschitz(1.5) == pytest.approx(10.0)
    with pytest.raises(ModelError):
        make_reaction_logistic(0.0, 1.0)


def test_user_reaction_root_and_rejections():
    r = make_reaction(lambda u: u * (1 - u) * (2 + u))
    assert r.u_star == pytest.approx(1.0, abs=1e-12)
    assert r.f_prime0 == pytest.approx(2.0, rel=1e-6)
    with pytest.raises(ModelError):
        make_reaction(lambda u: u * (1 - u) * (2 - u))  # two positive roots
    with pytest.raises(ModelError):
        make_reaction(lambda u: -u * (1 + u))


def test_initial_presets():
    cos = make_initial("cosine-bump", 4.0, 2.0)
    x = np.array([0.0, 2.0, 4.0, 5.0])
    u = cos.sample(x)
    assert u.shape == (1, 4)
    assert u[0, 0] == 2.0 and u[0, 2] == 0.0 and u[0, 3] == 0.0
    cap = make_initial("constant-cap", 10.0, 1.0)
    assert cap.sample(np.array([5.0, 9.5]))[0].tolist() == pytest.approx([1.0, 0.5])
    tab = make_initial("table", 2.0, table=[[0, 1, 2], [1, 0.5, 1], [2, 0, 0]])
    assert tab.n_species == 2
    assert tab.sample(np.array([0.5]))[:, 0].tolist() == pytest.approx([0.75, 1.5])
    assert cos.scaled(0.5).sup()[0] == pytest.approx(1.0)


def test_validate_spec_reports(laplace, fat2, logistic11):
    init = make_initial("cosine-bump", 2.0, 1.0)
    rep = validate_spec(scalar_model("dirichlet", laplace, logistic11, 1.0, 1.0), init)
    assert rep.ok and rep.get("(J)").passed and rep.get("(J1)").passed
    assert rep.get("(F2)").passed and rep.get("(H)").passed
    rep = validate_spec(scalar_model("dirichlet", fat2, logistic11, 1.0, 1.0), init)
    assert rep.ok and not rep.get("(J1)").passed
    bad = make_initial("table", 2.0, table=[[0, 1], [2, 0.3]])
    assert not validate_spec(scalar_model("dirichlet", laplace, logistic11, 1.0, 1.0), bad).ok


def test_weak_predation_and_bounds(laplace):
    spec = predprey_model([laplace, laplace], [1, 1], [1, 1], 1, 1, 0.2, 0.5, 1, 0.5)
    assert spec.weak_predation
    init = make_initial("cosine-bump", 2.0, [3.0, 0.5], n_species=2)
    A1, A2 = spec.state_bounds(init)
    assert A1 == 3.0 and A2 == pytest.approx((0.5 + 0.5 * 3.0) / 1.0)
    strong = predprey_model([laplace, laplace], [1, 1], [1, 1], 1, 1, 2.0, 0.5, 1, 0.5)
    assert not strong.weak_predation
    assert not validate_spec(strong).ok


def test_model_spec_errors(laplace, logistic11):
    with pytest.raises(ModelError):
        scalar_model("robin", laplace, logistic11, 1.0, 1.0)
    with pytest.raises(ModelError):
        scalar_model("dirichlet", laplace, logistic11, 1.0, 0.0)
    spec = scalar_model("neumann-1.3", laplace, logistic11, 1.0, 1.0)
    assert spec.variant == "neumann" and spec.with_mu(3.0).mu == (3.0,)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(-20.0, 20.0))
def test_tail_is_complementary_and_monotone(scale, z):
    k = make_kernel("laplace", {"scale": scale})
    assert float(k.tail(z)) + float(k.tail(-z)) == pytest.approx(1.0, abs=1e-14)
    assert float(k.tail(z)) >= float(k.tail(z + 0.1)) - 1e-16
    assert 0.0 <= float(k.j(abs(z))) - 0.5 <= 0.5


@settings(max_examples=40, deadline=None)
@given(st.floats(0.5, 5.0), st.floats(0.01, 10.0))
def test_logistic_bounds_property(a, b):
    r = make_reaction_logistic(a, b)
    u = np.linspace(0, r.K, 200)
    assert np.all(np.abs(np.diff(r.f(u)) / np.diff(u)) <= r.lipschitz(r.K) + 1e-9)
    assert math.isclose(float(r(r.u_star)), 0.0, abs_tol=1e-12)

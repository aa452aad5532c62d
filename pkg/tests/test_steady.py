import numpy as np
import pytest

from nonlocal_fb import steady, spectral
from nonlocal_fb.model import ModelError, make_kernel, make_reaction_logistic


def test_interval_dirichlet_bounded_by_u_star(laplace, logistic11):
    p = steady.steady_interval("dirichlet", laplace, logistic11, 1.0, 40.0, dx=1 / 16)
    assert p.W.max() <= 1.0 and np.all(p.W[1:-1] < 1.0) and np.all(p.W > 0)
    assert p.residual <= 1e-9 and p.max_increase <= 1e-12


def test_interval_profiles_grow_with_length(laplace, logistic11):
    profs = [steady.steady_interval("dirichlet", laplace, logistic11, 1.0, l, dx=1 / 16) for l in (10, 20, 40)]
    for a, b in zip(profs, profs[1:]):
        # a on [0, l_a] is below b restricted to the same nodes
        assert np.all(a.W <= b.W[: a.W.size] + 1e-12)


def test_interval_none_below_threshold(laplace):
    r = make_reaction_logistic(0.3, 1.0)
    ell = spectral.critical_length("neumann", laplace, 1.0, 0.3)
    assert steady.steady_interval("neumann", laplace, r, 1.0, 0.8 * ell) is None
    assert steady.steady_interval("neumann", laplace, r, 1.0, 1.5 * ell) is not None


@pytest.mark.parametrize("variant,l", [("dirichlet", 10.0), ("neumann", 5.0), ("dirichlet", 2.5)])
def test_upper_and_lower_starts_agree(laplace, variant, l):
    r = make_reaction_logistic(0.8, 1.0)
    up = steady.steady_interval(variant, laplace, r, 1.0, l, dx=1 / 32)
    lo = steady.steady_interval(variant, laplace, r, 1.0, l, dx=1 / 32, start="lower")
    assert np.max(np.abs(up.W - lo.W)) < 1e-8


def test_halfline_U_properties(laplace, logistic11):
    U = steady.steady_halfline_U(laplace, logistic11, 1.0, 60.0)
    assert np.all(np.diff(U.W) >= -1e-10)
    assert np.all(U.W > 0) and np.all(U.W <= 1.0)
    assert np.all(U.W[U.x <= 15] < 1.0)
    assert U.W[-1] > 0.999
    assert U.residual <= 1e-9 and U.max_increase <= 1e-12
    U2 = steady.steady_halfline_U(laplace, logistic11, 1.0, 120.0)
    assert np.max(np.abs(U2.at(U.x[U.x <= 30]) - U.W[U.x <= 30])) < 1e-9


def test_halfline_U_scaling(laplace):
    U1 = steady.steady_halfline_U(laplace, make_reaction_logistic(1, 1), 1.0, 40.0)
    U2 = steady.steady_halfline_U(laplace, make_reaction_logistic(2, 2), 2.0, 40.0)
    assert np.max(np.abs(U1.W - U2.W)) < 1e-10


def test_halfline_U_length_guard(compact, logistic11):
    with pytest.raises(ValueError):
        steady.steady_halfline_U(make_kernel("polynomial-compact", {"radius": 3.0}), logistic11, 1.0, 30.0)


def test_Uk_constant_coefficient_is_the_logistic_U(laplace):
    """With the lethal sink a constant k gives the half-line U of u(k - lam u), not k/lam."""
    Uk = steady.steady_Uk(laplace, 0.7, 1.0, 1.0, 60.0)
    U = steady.steady_halfline_U(laplace, make_reaction_logistic(0.7, 1.0), 1.0, 60.0)
    assert np.max(np.abs(Uk.W - U.W)) < 1e-10
    assert Uk.W[-1] == pytest.approx(0.7, abs=1e-10)


def test_Uk_order_and_monotonicity(laplace):
    k1 = lambda x: 0.5 + 0.3 * np.tanh(x)
    k2 = lambda x: 0.6 + 0.3 * np.tanh(x)
    U1 = steady.steady_Uk(laplace, k1, 1.0, 1.0, 60.0, k_inf=0.8)
    U2 = steady.steady_Uk(laplace, k2, 1.0, 1.0, 60.0, k_inf=0.9)
    assert np.all(U1.W <= U2.W + 1e-12)
    assert np.all(np.diff(U1.W) >= -1e-12)
    assert U1.W[-1] == pytest.approx(0.8, abs=1e-6)
    assert U1.max_increase <= 1e-12


def test_Uk_rejects_nonpositive_k(laplace):
    with pytest.raises(ModelError):
        steady.steady_Uk(laplace, lambda x: np.tanh(x), 1.0, 1.0, 30.0, k_inf=1.0)


def test_evolve_halfline_converges_to_U(laplace, logistic11):
    bump = lambda x: np.where(x < 2.0, 0.1, 0.0)
    tr = steady.evolve_halfline("dirichlet", laplace, logistic11, 1.0, bump, 60.0, 1 / 16, 0.1, 200.0)
    assert tr.distance < 1e-3


def test_evolve_halfline_supersolution_start_decreases(laplace, logistic11):
    tr = steady.evolve_halfline("dirichlet", laplace, logistic11, 1.0, 1.0, 40.0, 1 / 16, 0.1, 30.0)
    assert np.all(np.diff(tr.profiles, axis=0) <= 1e-15)
    U = steady.steady_halfline_U(laplace, logistic11, 1.0, 40.0)
    # zero closure beyond L: compare well inside the window
    inner = tr.x <= 10
    assert np.all(tr.final[inner] >= U.W[inner] - 1e-9)


def test_evolve_halfline_zero_stays_zero(laplace, logistic11):
    tr = steady.evolve_halfline("neumann", laplace, logistic11, 1.0, 0.0, 20.0, 1 / 8, 0.1, 5.0)
    assert np.all(tr.profiles == 0.0) and tr.distance is None


def test_evolve_halfline_neumann_and_k(laplace, logistic11):
    tr = steady.evolve_halfline("neumann", laplace, logistic11, 1.0, 0.2, 20.0, 1 / 16, 0.1, 100.0)
    assert tr.distance < 1e-6
    tr = steady.evolve_halfline("logistic-k", laplace, lambda x: 0.5 + 0.2 * np.tanh(x), 1.0, 0.3,
                                40.0, 1 / 16, 0.1, 150.0, lam=1.0, k_inf=0.7)
    assert tr.distance < 1e-3


def test_evolve_rejects_large_step(laplace, logistic11):
    with pytest.raises(ValueError):
        steady.evolve_halfline("dirichlet", laplace, logistic11, 1.0, 0.5, 20.0, 1 / 8, 0.2, 1.0)


def test_sandwich_with_converging_coefficient(laplace):
    """A coefficient v(t, x) tending to k keeps the long-run profile below U_k (plus slack)."""
    k = lambda x: 0.6 + 0.2 * np.tanh(x)
    v = lambda t, x: k(x) + 0.3 * np.exp(-0.1 * t)
    Uk = steady.steady_Uk(laplace, k, 1.0, 1.0, 40.0, k_inf=0.8)
    tr = steady.evolve_halfline("logistic-k", laplace, k, 1.0, 1.5, 40.0, 1 / 16, 0.05, 200.0,
                                lam=1.0, k_inf=0.8, v=v, compare=False)
    half = tr.x <= 20
    assert np.all(tr.final[half] <= Uk.W[half] + 5e-3)

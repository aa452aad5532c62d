import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import linalg, optimize

from nonlocal_fb import spectral
from nonlocal_fb.model import make_kernel, scalar_model, predprey_model, make_reaction_logistic

# Dense oracle on dx = 1/512, bisection to 1e-7 (see notes/oracle_lstar.py).
LSTAR_D_DENSE_512 = 1.5707959532737727


def dense_lambda(variant, kernel, d, a0, l, n):
    """Independent oracle: full symmetric eigensolve of the trapezoid matrix."""
    x = np.linspace(0.0, l, n + 1)
    w = np.full(n + 1, l / n)
    w[0] = w[-1] = 0.5 * l / n
    s = np.sqrt(w)
    B = d * kernel(x[:, None] - x[None, :]) * s[:, None] * s[None, :]
    sink = np.ones_like(x) if variant == "dirichlet" else kernel.j(x)
    B[np.diag_indices_from(B)] += a0 - d * sink
    return float(linalg.eigvalsh(B, subset_by_index=[n, n])[0])


def laplace_lstar_continuum(d, a0):
    """Laplace kernel, lethal exterior: tan(k l / 2) = 1/k with d/(1+k^2) - d + a0 = 0."""
    k = math.sqrt(d / (d - a0) - 1.0)
    return 2.0 * math.atan(1.0 / k) / k


@pytest.mark.parametrize("variant", ["dirichlet", "neumann"])
@pytest.mark.parametrize("l", [0.5, 2.0, 9.0])
def test_power_iteration_matches_dense_eigensolve(laplace, variant, l):
    res = spectral.lambda_p(variant, laplace, 1.0, 0.7, l, n=256)
    assert res.lambda_p == pytest.approx(dense_lambda(variant, laplace, 1.0, 0.7, l, 256), abs=1e-8)
    assert res.residual <= 1e-10 * res.norm_A
    assert np.all(res.phi > 0) and res.phi.max() == 1.0
    assert res.rayleigh == pytest.approx(res.lambda_p, abs=1e-10)


def test_compact_kernel_matches_dense(compact):
    res = spectral.lambda_p("dirichlet", compact, 2.0, 0.3, 6.0, n=384)
    assert res.lambda_p == pytest.approx(dense_lambda("dirichlet", compact, 2.0, 0.3, 6.0, 384), abs=1e-8)


def test_small_interval_limits(laplace):
    neu = spectral.lambda_p("neumann", laplace, 1.0, 1.0, 1e-3, dx=1e-3 / 64)
    dir_ = spectral.lambda_p("dirichlet", laplace, 1.0, 1.0, 1e-3, dx=1e-3 / 64)
    assert abs(neu.lambda_p - 0.5) < 2e-3
    assert abs(dir_.lambda_p - 0.0) < 2e-3


def test_large_interval_limit(laplace):
    dx = 1 / 8
    res = spectral.lambda_p("neumann", laplace, 1.0, 1.0, 200.0, dx=dx)
    # sampled trapezoid weights overstate the Laplace mass by (dx/2)coth(dx/2) - 1
    bias = 0.5 * dx / np.tanh(0.5 * dx) - 1.0
    assert 0.98 <= res.lambda_p <= 1.0 + bias + 1e-12


def test_monotone_in_length(laplace):
    ladder = [0.5, 1, 2, 4, 8, 16, 32]
    for variant in ("neumann", "dirichlet"):
        lams = [r[1] for r in spectral.eigen_ladder(variant, laplace, 1.0, 1.0, ladder)]
        assert all(b > a for a, b in zip(lams, lams[1:]))


def test_neumann_dominates_dirichlet(laplace, compact):
    for k in (laplace, compact):
        for l in (0.7, 3.0, 12.0):
            assert (spectral.lambda_p("neumann", k, 1.0, 0.4, l).lambda_p
                    >= spectral.lambda_p("dirichlet", k, 1.0, 0.4, l).lambda_p)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 20.0), st.floats(-2.0, 2.0), st.floats(0.01, 1.0))
def test_unit_slope_in_a0(l, a0, delta):
    k = make_kernel("laplace")
    base = spectral.lambda_p("neumann", k, 1.0, a0, l, n=64).lambda_p
    shifted = spectral.lambda_p("neumann", k, 1.0, a0 + delta, l, n=64).lambda_p
    assert shifted - base == pytest.approx(delta, abs=1e-9)


def test_critical_length_laplace_oracles(laplace):
    ell = spectral.critical_length("dirichlet", laplace, 1.0, 0.5)
    assert ell == pytest.approx(math.pi / 2, abs=2e-6)
    assert ell == pytest.approx(LSTAR_D_DENSE_512, abs=2e-6)
    assert laplace_lstar_continuum(1.0, 0.5) == pytest.approx(math.pi / 2, rel=1e-14)


@pytest.mark.parametrize("a0", [0.2, 0.8])
def test_critical_length_matches_continuum_formula(laplace, a0):
    assert spectral.critical_length("dirichlet", laplace, 1.0, a0) == pytest.approx(
        laplace_lstar_continuum(1.0, a0), rel=2e-6)


def test_critical_length_none_when_unconditional(laplace):
    assert spectral.critical_length("dirichlet", laplace, 1.0, 1.0) is None
    assert spectral.critical_length("neumann", laplace, 1.0, 0.5) is None
    with pytest.raises(ValueError):
        spectral.critical_length("dirichlet", laplace, 1.0, 0.0)


def test_neumann_critical_length_is_a_root(laplace):
    ell = spectral.critical_length("neumann", laplace, 1.0, 0.3)
    assert ell is not None and ell > 0
    assert spectral.lambda_p("neumann", laplace, 1.0, 0.3, ell - 0.01, n=512).lambda_p < 0
    assert spectral.lambda_p("neumann", laplace, 1.0, 0.3, ell + 0.01, n=512).lambda_p > 0
    # reflecting exterior persists on shorter intervals than the lethal one
    assert ell < spectral.critical_length("dirichlet", laplace, 1.0, 0.3)


def test_model_threshold_for_predprey(laplace, compact):
    spec = predprey_model([laplace, compact], [1, 2], [1, 1], 0.5, 1, 0.1, 0.6, 1, 0.1)
    want = min(spectral.critical_length("dirichlet", laplace, 1, 0.5),
               spectral.critical_length("dirichlet", compact, 2, 0.6))
    assert spectral.model_critical_length(spec) == pytest.approx(want)
    spec2 = predprey_model([laplace, laplace], [1, 1], [1, 1], 1.0, 1, 0.1, 0.5, 1, 0.1)
    assert spectral.model_critical_length(spec2) is None
    spec3 = scalar_model("neumann", laplace, make_reaction_logistic(0.6, 1), 1.0, 1.0)
    assert spectral.model_critical_length(spec3) is None


def test_errors(laplace, compact):
    with pytest.raises(ValueError):
        spectral.lambda_p("dirichlet", laplace, 1.0, 0.5, 1.0, n=16)
    with pytest.raises(spectral.SpectralError):
        spectral.lambda_p("dirichlet", make_kernel("polynomial-compact", {"radius": 0.01}), 1.0, 0.5, 10.0, n=64)
    with pytest.raises(ValueError):
        spectral.lambda_p("robin", laplace, 1.0, 0.5, 1.0)


def test_perron_pair_uses_inverse_iteration_on_long_intervals(laplace):
    res = spectral.lambda_p("dirichlet", laplace, 1.0, 0.5, 200.0, n=800)
    assert res.iterations < 2000
    assert res.lambda_p == pytest.approx(dense_lambda("dirichlet", laplace, 1.0, 0.5, 200.0, 800), abs=1e-8)

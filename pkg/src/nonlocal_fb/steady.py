"""Steady states on intervals and half-lines by monotone iteration.

Every solver writes the steady equation as ``F(u) = 0`` and iterates
``u <- u + F(u)/beta`` from a constant upper solution.  ``beta`` exceeds the
largest slope of the reaction plus the sink, so the map is order preserving
and the iterates decrease monotonically to the maximal fixed point.

Half-line problems are truncated to ``[0, L]``.  Inside the convolution the
profile is continued by its known far-field constant, which adds
``value * T(L - x_i)``; with exact interior weights a constant equal to the
far-field value is then treated exactly as in the continuum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .model import Kernel, ModelError, Reaction, make_reaction_logistic
from .nonlocal_ops import HatQuadrature
from . import spectral

log = logging.getLogger(__name__)

STEP_TOL = 1e-12
RESIDUAL_TOL = 1e-9
MAX_ITER = 1_000_000


class SteadyError(RuntimeError):
    pass


@dataclass
class SteadyProfile:
    domain: str  # "interval" or "halfline"
    length: float
    x: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    residual: float
    iterations: int
    max_increase: float = 0.0  # largest upward step seen (0 for a monotone run)
    far_value: float | None = None

    def at(self, x) -> np.ndarray:
        return np.interp(x, self.x, self.W)


def _iterate(F: Callable, u0: np.ndarray, beta: float, tol: float = STEP_TOL,
             max_iter: int = MAX_ITER, ceiling: float | None = None):
    """Fixed point of ``u + F(u)/beta``; returns ``(u, iterations, max_increase)``.

    ``ceiling`` is a constant upper solution; the exact map never leaves
    ``[0, ceiling]`` so rounding excursions above it are cut off.
    """
    u = u0.copy()
    max_inc = 0.0
    for it in range(1, max_iter + 1):
        step = F(u) / beta
        u = u + step
        if ceiling is not None:
            np.minimum(u, ceiling, out=u)
        big = float(np.max(np.abs(step)))
        max_inc = max(max_inc, float(step.max()))
        if big < tol:
            return u, it, max_inc
    raise SteadyError(f"steady iteration did not settle in {max_iter} sweeps")


def _reaction_beta(reaction: Reaction, upper: float, d: float) -> float:
    grid = np.linspace(0.0, upper, 2001)
    return float(np.max(np.abs(reaction.f_prime(grid)))) + d + 1.0


def steady_interval(variant: str, kernel: Kernel, reaction: Reaction, d: float, l: float,
                    dx: float | None = None, start: str = "upper",
                    tol: float = STEP_TOL) -> SteadyProfile | None:
    """Positive steady state of the fixed-interval problem on ``[0, l]``.

    Returns None when the principal eigenvalue with ``a0 = f'(0)`` is
    nonpositive, in which case 0 is the only nonnegative steady state.
    ``start="lower"`` iterates upward from a small multiple of the principal
    eigenfunction instead of downward from ``K``.
    """
    variant = spectral._check_variant(variant)
    if not l > 0:
        raise ValueError("l must be positive")
    n = 256 if dx is None else max(32, int(round(l / dx)))
    eig = spectral.lambda_p(variant, kernel, d, reaction.f_prime0, l, n=n)
    if eig.lambda_p <= 0:
        return None
    disc = HatQuadrature(kernel, l, l / n, halfline=False)
    sink = np.ones_like(disc.x) if variant == "dirichlet" else disc.j
    f = reaction.f

    def F(u):
        return d * disc.conv(u) - d * sink * u + f(u)

    K = reaction.K
    beta = _reaction_beta(reaction, K, d)
    if start == "upper":
        u0 = np.full_like(disc.x, K)
    elif start == "lower":
        u0 = _lower_start(F, eig.phi, reaction.u_star)
    else:
        raise ValueError("start must be 'upper' or 'lower'")
    u, its, inc = _iterate(F, u0, beta, tol, ceiling=K)
    res = float(np.max(np.abs(F(u))))
    if res > RESIDUAL_TOL:
        raise SteadyError(f"residual {res:.3e} above {RESIDUAL_TOL}")
    return SteadyProfile("interval", float(l), disc.x, u, res, its, inc if start == "upper" else 0.0)


def _lower_start(F, phi, scale):
    """``eps*phi`` with ``F(eps*phi) >= 0``, the sub-solution of the existence proof."""
    eps = 0.1 * scale
    for _ in range(60):
        u = eps * phi
        if np.all(F(u) >= 0):
            return u
        eps *= 0.5
    raise SteadyError("no sub-solution of the form eps*phi found")


def steady_halfline_U(kernel: Kernel, reaction: Reaction, d: float, L: float,
                      dx: float = 1.0 / 16, tol: float = STEP_TOL,
                      check_length: bool = True) -> SteadyProfile:
    """Bounded positive solution of the half-line steady problem with lethal exterior.

    Truncated to ``[0, L]`` with the profile held at ``u*`` beyond ``L``.
    """
    scale = max(1.0, kernel.support_radius if np.isfinite(kernel.support_radius) else kernel.scale)
    if check_length and L < 20.0 * scale:
        raise ValueError(f"L must be at least {20.0 * scale} for this kernel")
    disc = HatQuadrature(kernel, L, dx, halfline=True)
    u_star = reaction.u_star
    f = reaction.f

    def F(u):
        return d * disc.conv(u, u_star) - d * u + f(u)

    beta = _reaction_beta(reaction, u_star, d)
    u, its, inc = _iterate(F, np.full_like(disc.x, u_star), beta, tol, ceiling=u_star)
    res = float(np.max(np.abs(F(u))))
    if res > RESIDUAL_TOL:
        raise SteadyError(f"residual {res:.3e} above {RESIDUAL_TOL}")
    drop = float(np.max(-np.diff(u), initial=0.0))
    if drop > 1e-10:
        raise SteadyError(f"profile decreases by {drop:.3e}; enlarge L")
    return SteadyProfile("halfline", float(L), disc.x, u, res, its, inc, far_value=u_star)


def _k_values(k, x, k_inf):
    if callable(k):
        vals = np.asarray(k(x), dtype=float) * np.ones_like(x)
        far = float(k(np.array([1e12]))[0]) if k_inf is None else float(k_inf)
    else:
        vals = np.asarray(k, dtype=float) * np.ones_like(x)
        if vals.shape != x.shape:
            raise ValueError("k samples must match the grid")
        far = float(vals[-1]) if k_inf is None else float(k_inf)
    return vals, far


def steady_Uk(kernel: Kernel, k, lam: float, d: float, L: float, dx: float = 1.0 / 16,
              k_inf: float | None = None, tol: float = STEP_TOL) -> SteadyProfile:
    """Bounded positive solution of ``d int_0^inf J(x-y)U dy - dU + U(k(x) - lam U) = 0``.

    ``k`` is a constant, an array of node values or a callable of ``x``;
    ``k_inf`` is its limit at infinity (taken from the callable far out or
    the last sample when omitted).
    """
    if not lam > 0:
        raise ModelError("lambda must be positive")
    disc = HatQuadrature(kernel, L, dx, halfline=True)
    kv, far_k = _k_values(k, disc.x, k_inf)
    if not np.all(np.isfinite(kv)) or kv.min() <= 0 or far_k <= 0:
        raise ModelError("k must be bounded with a positive infimum")
    k_sup = max(float(kv.max()), far_k)
    far = far_k / lam

    def F(u):
        return d * disc.conv(u, far) - d * u + u * (kv - lam * u)

    beta = d + 2.0 * k_sup + 1.0
    u, its, inc = _iterate(F, np.full_like(disc.x, k_sup / lam), beta, tol, ceiling=k_sup / lam)
    res = float(np.max(np.abs(F(u))))
    if res > RESIDUAL_TOL:
        raise SteadyError(f"residual {res:.3e} above {RESIDUAL_TOL}")
    return SteadyProfile("halfline", float(L), disc.x, u, res, its, inc, far_value=far)


@dataclass
class HalflineTrajectory:
    variant: str
    x: np.ndarray = field(repr=False)
    times: np.ndarray = field(repr=False)
    profiles: np.ndarray = field(repr=False)  # one row per saved time
    target: SteadyProfile | None = None
    distance: float | None = None  # sup |w(T) - target| on [0, L/2]

    @property
    def final(self) -> np.ndarray:
        return self.profiles[-1]


HALFLINE_VARIANTS = ("dirichlet", "neumann", "logistic-k")
_HALFLINE_ALIASES = {"dirichlet-2.6": "dirichlet", "neumann-2.7": "neumann"}


def evolve_halfline(variant: str, kernel: Kernel, source, d: float, w0, L: float,
                    dx: float, dt: float, T: float, lam: float | None = None,
                    k_inf: float | None = None, v: Callable | None = None,
                    n_save: int = 50, compare: bool = True) -> HalflineTrajectory:
    """Explicit Euler for the half-line (or fixed-interval) Cauchy problems.

    ``source`` is a Reaction for ``dirichlet`` (lethal exterior, half-line)
    and ``neumann`` (reflecting exterior, interval ``[0, L]``) and the
    coefficient ``k`` for ``logistic-k`` (with ``lam`` required).  For
    ``logistic-k`` an optional ``v(t, x)`` replaces ``k`` in the dynamics
    while ``k`` still defines the comparison profile.  The convolution is
    closed by zero beyond ``L``.  With ``compare`` the final profile is
    measured against the matching steady state on ``[0, L/2]``.
    """
    variant = _HALFLINE_ALIASES.get(variant, variant)
    if variant not in HALFLINE_VARIANTS:
        raise ValueError(f"variant must be one of {HALFLINE_VARIANTS}")
    disc = HatQuadrature(kernel, L, dx, halfline=False)
    x = disc.x
    w = (np.asarray(w0(x), dtype=float) if callable(w0) else np.asarray(w0, dtype=float)) * np.ones_like(x)
    if np.any(w < 0):
        raise ValueError("initial data must be nonnegative")
    top = float(w.max())

    if variant == "logistic-k":
        if lam is None:
            raise ValueError("logistic-k needs lam")
        kv, far_k = _k_values(source, x, k_inf)
        k_sup = max(float(kv.max()), far_k)
        bound = max(top, k_sup / lam)
        vmax = k_sup
        if v is not None:
            vmax = max(vmax, float(np.max(np.abs(v(0.0, x)))))
        lip = vmax + 2.0 * lam * bound
        sink = np.ones_like(x)

        def react(t, u):
            coef = kv if v is None else v(t, x)
            return u * (coef - lam * u)
    else:
        reaction: Reaction = source
        bound = max(top, reaction.K)
        lip = reaction.lipschitz(bound)
        sink = np.ones_like(x) if variant == "dirichlet" else disc.j

        def react(t, u):
            return reaction.f(u)

    limit = 0.5 / (2.0 * d + lip)
    if dt > limit:
        raise ValueError(f"dt={dt} violates the stability limit {limit:.4g}")

    steps = int(np.ceil(T / dt - 1e-12))
    dt = T / steps if steps else dt
    save_at = set(np.linspace(0, steps, min(n_save, steps + 1)).round().astype(int).tolist())
    times, rows = [], []
    t = 0.0
    for s in range(steps + 1):
        if s in save_at:
            times.append(t)
            rows.append(w.copy())
        if s == steps:
            break
        w = w + dt * (d * disc.conv(w) - d * sink * w + react(t, w))
        w = np.maximum(w, 0.0)
        t = (s + 1) * dt

    traj = HalflineTrajectory(variant, x, np.array(times), np.array(rows))
    if compare and np.any(w > 0):
        if variant == "dirichlet":
            target = steady_halfline_U(kernel, source, d, L, dx, check_length=False)
        elif variant == "neumann":
            target = steady_interval("neumann", kernel, source, d, L, dx)
        else:
            target = steady_Uk(kernel, source, lam, d, L, dx, k_inf=k_inf)
        if target is not None:
            half = x <= 0.5 * L
            traj.target = target
            traj.distance = float(np.max(np.abs(w[half] - target.at(x[half]))))
    return traj


def lv_bands(kernels, d, coeffs, L: float, dx: float = 1.0 / 16):
    """Upper and lower steady bands for the predator-prey system.

    Returns ``(upper1, upper2, lower1, lower2)`` profiles built in the order
    prey upper, predator upper, prey lower, predator lower.
    """
    J1, J2 = kernels
    d1, d2 = d
    a1, b1, c1, a2, b2, c2 = (coeffs.a1, coeffs.b1, coeffs.c1, coeffs.a2, coeffs.b2, coeffs.c2)
    up1 = steady_halfline_U(J1, make_reaction_logistic(a1, b1), d1, L, dx, check_length=False)
    up2 = steady_Uk(J2, a2 + c2 * up1.W, b2, d2, L, dx, k_inf=a2 + c2 * a1 / b1)
    k_low1 = a1 - c1 * up2.W
    k_low1_inf = a1 - c1 * up2.far_value
    if k_low1.min() <= 0 or k_low1_inf <= 0:
        raise ModelError("prey lower band needs a1 > c1 * predator upper band")
    lo1 = steady_Uk(J1, k_low1, b1, d1, L, dx, k_inf=k_low1_inf)
    lo2 = steady_Uk(J2, a2 + c2 * lo1.W, b2, d2, L, dx, k_inf=a2 + c2 * lo1.far_value)
    return up1, up2, lo1, lo2

"""Semi-wave profiles and their speeds.

A semi-wave is a nonincreasing profile on ``(-inf, 0]`` joining the plateau
``u*`` to 0 and travelling at the speed ``c`` fed to it by the boundary
flux.  The solver works in the reflected variable ``s = -x`` on ``[0, M]``
where the profile ``psi(s) = phi(-s)`` rises from 0, and continues it by the
plateau beyond ``M``.

For a fixed ``c`` the profile is the limit of a monotone pseudo-time march:
the upwind advection and the sink are implicit (a lower bidiagonal solve),
the convolution and reaction explicit.  The map is order preserving, so
starting above the solution the iterates decrease to it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal

from .model import Kernel, ModelError, ModelSpec, Reaction, make_reaction_logistic
from .nonlocal_ops import HatQuadrature

log = logging.getLogger(__name__)

STEP_TOL = 1e-12
C_TOL = 1e-8
ZERO_LEVEL = 1e-10


class SemiWaveError(RuntimeError):
    pass


@dataclass
class Profile:
    """Solution of the profile equation for one speed ``c``."""

    c: float
    x: np.ndarray = field(repr=False)  # nodes on [-M, 0], increasing
    phi: np.ndarray = field(repr=False)
    plateau: float
    residual: float
    iterations: int
    monotone_violation: float

    @property
    def M(self) -> float:
        return float(-self.x[0])


@dataclass
class SemiWave:
    c0: float
    x: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    plateau: float
    residual: float
    flux_gap: float
    M: float
    dx: float
    mu: float
    bisection_steps: int = 0

    def rows(self):
        return list(zip(self.x.tolist(), self.phi.tolist()))


def plateau_value(kernel: Kernel, reaction: Reaction, d: float) -> float:
    """Far-field level: ``u*`` for unit mass, else the positive root of ``d(m-1)u + f(u)``."""
    if abs(kernel.mass - 1.0) < 1e-12:
        return reaction.u_star
    g = lambda u: d * (kernel.mass - 1.0) * u + float(reaction.f(np.array(u)))
    hi = reaction.u_star
    if g(hi * 1e-9) <= 0:
        raise ModelError("kernel mass deficit extinguishes the plateau")
    return float(optimize.brentq(g, hi * 1e-9, hi))


class _ProfileSolver:
    """Reusable pieces for one (kernel, reaction, d, M, dx)."""

    def __init__(self, kernel: Kernel, reaction: Reaction, d: float, M: float, dx: float):
        self.kernel, self.reaction, self.d = kernel, reaction, d
        self.quad = HatQuadrature(kernel, M, dx, halfline=True)
        self.s = self.quad.x
        self.dx = self.quad.dx
        self.plateau = plateau_value(kernel, reaction, d) if reaction.u_star > 0 else 0.0
        upper = max(self.plateau, reaction.u_star)
        grid = np.linspace(0.0, upper, 2001)
        self.beta = float(np.max(np.abs(reaction.f_prime(grid)))) + 1.0
        # trapezoid weights and tails for the flux functional
        w = np.full(self.s.size, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        self.flux_w = w * kernel.tail(self.s)
        self.flux_far = float(kernel.tail_integral(M))

    def operator(self, psi, c):
        """Profile equation residual at the nodes ``s_1..s_N``."""
        d, f = self.d, self.reaction.f
        conv = self.quad.conv(psi, self.plateau)
        adv = np.zeros_like(psi)
        adv[1:] = c * (psi[:-1] - psi[1:]) / self.dx
        out = d * conv - d * psi + adv + f(psi)
        out[0] = 0.0
        return out

    def solve(self, c: float, start=None, tol: float = STEP_TOL, max_iter: int = 200_000):
        d, f, beta = self.d, self.reaction.f, self.beta
        psi = np.full_like(self.s, self.plateau) if start is None else np.array(start, dtype=float)
        psi[0] = 0.0
        a = c / self.dx
        diag = beta + d + a
        # psi_i = (rhs_i + a psi_{i-1}) / diag as a first-order recursion
        b_coef, a_coef = [1.0 / diag], [1.0, -a / diag]
        violation = 0.0
        for it in range(1, max_iter + 1):
            rhs = d * self.quad.conv(psi, self.plateau) + f(psi) + beta * psi
            rhs[0] = 0.0
            new = signal.lfilter(b_coef, a_coef, rhs)
            drop = float(np.max(new[:-1] - new[1:], initial=0.0))
            violation = max(violation, drop)
            if 0.0 < drop <= 1e-14:
                new = np.maximum.accumulate(new)
            change = float(np.max(np.abs(new - psi)))
            psi = new
            if change < tol or (psi.max() < ZERO_LEVEL and change < ZERO_LEVEL):
                return psi, it, violation
        raise SemiWaveError(f"profile march did not settle for c={c}")

    def flux(self, psi) -> float:
        return float(np.dot(self.flux_w, psi)) + self.plateau * self.flux_far

    def profile(self, c, psi, its, violation) -> Profile:
        res = float(np.max(np.abs(self.operator(psi, c))))
        return Profile(c, -self.s[::-1], psi[::-1].copy(), self.plateau, res, its, violation)


def solve_profile_given_c(kernel: Kernel, reaction: Reaction, d: float, c: float,
                          M: float = 40.0, dx: float = 1.0 / 32, start=None) -> Profile:
    """Nonincreasing solution of the profile equation on ``[-M, 0]`` at speed ``c``.

    ``start`` (samples on ``[-M, 0]``) replaces the plateau as the starting
    upper solution; a zero start stays at zero.
    """
    if c < 0:
        raise ValueError("speed must be nonnegative")
    solver = _ProfileSolver(kernel, reaction, d, M, dx)
    init = None if start is None else np.asarray(start, dtype=float)[::-1]
    psi, its, viol = solver.solve(c, init)
    return solver.profile(c, psi, its, viol)


def _default_M(kernel: Kernel) -> float:
    base = kernel.support_radius if math.isfinite(kernel.support_radius) else kernel.scale
    return 40.0 * max(1.0, base)


def solve_semiwave(kernel: Kernel, reaction: Reaction, d: float, mu: float,
                   M: float | None = None, dx: float = 1.0 / 32, c_tol: float = C_TOL,
                   adapt_M: bool = True, max_M: float = 5000.0) -> SemiWave:
    """Speed ``c0`` and profile with ``c0 = mu int_{-inf}^0 phi(x) T(-x) dx``.

    Bisection on ``g(c) = mu flux(phi_c) - c``.  ``M`` is doubled until the
    profile is within 1e-6 of its plateau at ``-M/2``.
    """
    if not kernel.first_moment_finite:
        raise ModelError("no finite semi-wave speed: the kernel has no first moment")
    if not mu > 0:
        raise ValueError("mu must be positive")
    M = _default_M(kernel) if M is None else float(M)
    while True:
        wave = _bisect_speed(kernel, reaction, d, mu, M, dx, c_tol)
        half = np.searchsorted(wave.x, -0.5 * M)
        gap = wave.plateau - wave.phi[half]
        if not adapt_M or gap < 1e-6:
            return wave
        if 2.0 * M > max_M:
            raise SemiWaveError(f"profile not settled to its plateau within M={M}")
        log.info("semi-wave: plateau gap %.2e at M=%g, doubling", gap, M)
        M *= 2.0


def _bisect_speed(kernel, reaction, d, mu, M, dx, c_tol) -> SemiWave:
    solver = _ProfileSolver(kernel, reaction, d, M, dx)
    cache = {}

    def g(c, start=None):
        psi, its, viol = solver.solve(c, start)
        cache[c] = (psi, its, viol)
        return mu * solver.flux(psi) - c, psi

    # bracket: g > 0 at small c, g < 0 once c exceeds mu * (plateau flux)
    c_hi = max(1e-3, mu * solver.flux(np.full_like(solver.s, solver.plateau)))
    g_hi, _ = g(c_hi)
    if g_hi >= 0:
        raise SemiWaveError("upper speed bracket not found")
    c_lo = 0.5 * c_hi
    g_lo, psi_lo = g(c_lo)
    while g_lo <= 0:
        c_hi, g_hi = c_lo, g_lo
        c_lo *= 0.5
        if c_lo < 1e-12:
            raise SemiWaveError("lower speed bracket not found")
        g_lo, psi_lo = g(c_lo)
    steps = 0
    while c_hi - c_lo > c_tol:
        mid = 0.5 * (c_lo + c_hi)
        # the profile at a smaller speed lies above the one at ``mid``
        g_mid, psi_mid = g(mid, psi_lo)
        steps += 1
        if g_mid > 0:
            c_lo, g_lo, psi_lo = mid, g_mid, psi_mid
        else:
            c_hi, g_hi = mid, g_mid
    # secant step inside the final bracket, then re-solve there
    c0 = c_lo - g_lo * (c_hi - c_lo) / (g_hi - g_lo) if g_hi != g_lo else 0.5 * (c_lo + c_hi)
    _, psi = g(c0, psi_lo)
    psi, its, viol = cache[c0]
    prof = solver.profile(c0, psi, its, viol)
    gap = abs(c0 - mu * solver.flux(psi))
    return SemiWave(c0, prof.x, prof.phi, prof.plateau, prof.residual, gap, M, solver.dx, mu, steps)


def solve_speed_pair_LV(spec: ModelSpec, M: float | None = None, dx: float = 1.0 / 32):
    """Speeds ``(c1, c2)`` of the prey and of the predator fed at the prey's capacity."""
    if spec.variant != "predprey":
        raise ValueError("needs the predator-prey model")
    lv = spec.lv
    J1, J2 = spec.kernels
    d1, d2 = spec.d
    mu1, mu2 = spec.mu
    w1 = solve_semiwave(J1, make_reaction_logistic(lv.a1, lv.b1), d1, mu1, M, dx)
    w2 = solve_semiwave(J2, make_reaction_logistic(lv.a2 + lv.c2 * lv.a1 / lv.b1, lv.b2), d2, mu2, M, dx)
    return w1.c0, w2.c0

"""Spatial discretization of the nonlocal operators on ``[0, h]``.

Nodes sit at ``x_i = i dx``.  The front ``h`` is a real number that need
not coincide with a node; the cell ``[x_{m-1}, h]`` is integrated with the
trapezoid rule using ``u(h) = 0``, which is the same as interpolating ``u``
linearly to zero at the front.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .model import Kernel

# Above this many multiply-adds per application the FFT route is cheaper.
_DIRECT_LIMIT = 60_000
# Finite-moment kernels are truncated where the tail mass drops below this.
TRUNCATION_TOL = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform node set ``x_i = i dx``, ``i = 0..n`` on ``[0, x_max]``."""

    dx: float
    x_max: float

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if not self.x_max >= self.dx:
            raise ValueError("x_max must cover at least one cell")
        n = round(self.x_max / self.dx)
        object.__setattr__(self, "x_max", n * self.dx)

    @property
    def n(self) -> int:
        return round(self.x_max / self.dx)

    @property
    def nodes(self) -> np.ndarray:
        return self.dx * np.arange(self.n + 1)

    def resolves(self, kernel: Kernel) -> bool:
        """At least 8 nodes per kernel support radius (per unit length if unbounded)."""
        length = kernel.support_radius if math.isfinite(kernel.support_radius) else 1.0
        return length / self.dx >= 8.0


@dataclass
class FrontState:
    """Time, front position and node samples (one row per species).

    ``u`` spans the whole allocation; entries at and beyond the front are 0.
    """

    t: float
    h: float
    u: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.u = np.atleast_2d(np.asarray(self.u, dtype=float))

    def copy(self) -> "FrontState":
        return FrontState(self.t, self.h, self.u.copy())


def active_count(h: float, dx: float) -> int:
    """Number of nodes strictly below the front."""
    return max(1, int(math.ceil(h / dx - 1e-9)))


def trapezoid_weights(h: float, dx: float, m: int | None = None) -> np.ndarray:
    """Quadrature weights on the active nodes for ``int_0^h g`` with ``g(h) = 0``."""
    if m is None:
        m = active_count(h, dx)
    w = np.full(m, dx)
    last = h - (m - 1) * dx
    if m == 1:
        w[0] = 0.5 * h
    else:
        w[0] = 0.5 * dx
        w[-1] = 0.5 * dx + 0.5 * last
    return w


def toeplitz_apply(table: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``r_i = sum_j table[|i - j|] v_j`` for ``i < len(v)`` (table may be shorter)."""
    m = v.shape[-1]
    k = min(table.size - 1, m - 1)
    full = np.concatenate([table[k:0:-1], table[: k + 1]])
    if m * full.size <= _DIRECT_LIMIT:
        return np.convolve(v, full, mode="full")[k:k + m]
    return signal.oaconvolve(v, full, mode="full")[k:k + m]


class KernelTable:
    """Cached samples ``J(k dx)`` for one kernel and spacing.

    Kernels whose tail mass falls below ``TRUNCATION_TOL`` within a modest
    radius are cut there and renormalized; fat-tailed kernels are sampled on
    the whole allocation instead so their far field is never discarded.
    """

    def __init__(self, kernel: Kernel, dx: float):
        self.kernel = kernel
        self.dx = dx
        radius = kernel.truncation_radius(TRUNCATION_TOL)
        self.truncated = radius <= 1000.0 * kernel.scale
        self.radius = radius if self.truncated else math.inf
        self._renorm = 1.0
        if self.truncated and not math.isfinite(kernel.support_radius):
            self._renorm = kernel.mass / (kernel.mass - 2.0 * float(kernel.tail(radius)))
        self._table = np.empty(0)

    def samples(self, n: int) -> np.ndarray:
        """``J(k dx)`` for ``k = 0..min(n, radius/dx)``."""
        if self.truncated:
            n = min(n, int(math.floor(self.radius / self.dx)))
        if self._table.size < n + 1:
            grow = max(n + 1, 2 * self._table.size)
            if self.truncated:
                grow = min(grow, int(math.floor(self.radius / self.dx)) + 1)
            self._table = self._renorm * self.kernel(self.dx * np.arange(grow))
        return self._table[: n + 1]

    def convolve(self, u_active: np.ndarray, w: np.ndarray) -> np.ndarray:
        """``int_0^h J(x_i - y) u(y) dy`` at every active node."""
        return toeplitz_apply(self.samples(u_active.size), w * u_active)

    def flux(self, u_active: np.ndarray, w: np.ndarray, h: float) -> float:
        """``int_0^h u(x) T(h - x) dx`` (outward mass per unit time)."""
        m = u_active.size
        x = self.dx * np.arange(m)
        lo = 0
        if self.truncated:
            lo = max(0, int(math.floor((h - self.radius) / self.dx)))
        tails = self.kernel.tail(h - x[lo:])
        return float(np.dot(w[lo:] * u_active[lo:], tails))


def _active(u: np.ndarray, h: float, dx: float) -> tuple:
    u = np.asarray(u, dtype=float)
    m = active_count(h, dx)
    if u.shape[-1] < m:
        raise ValueError(f"need samples on {m} nodes below h={h}, got {u.shape[-1]}")
    return u[..., :m], m


def convolve_on(kernel: Kernel, grid: Grid, u, h: float, i: int | None = None):
    """Trapezoid value of ``int_0^h J(x_i - y) u(y) dy``.

    Returns the value at node ``i`` or, when ``i`` is None, the whole field
    on the nodes below ``h``.
    """
    ua, m = _active(u, h, grid.dx)
    if ua.ndim != 1:
        raise ValueError("convolve_on takes one profile")
    w = trapezoid_weights(h, grid.dx, m)
    if i is None:
        return KernelTable(kernel, grid.dx).convolve(ua, w)
    if not 0 <= i < m:
        raise ValueError("node index must lie below the front")
    xs = grid.dx * np.arange(m)
    return float(np.dot(kernel(grid.dx * i - xs), w * ua))


def neumann_sink(kernel: Kernel, x):
    """``j(x) = int_0^inf J(x - y) dy`` for ``x >= 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("neumann_sink is defined for x >= 0")
    out = kernel.j(x)
    return float(out) if out.ndim == 0 else out


def boundary_flux(kernel, grid: Grid, state: FrontState, mu) -> float:
    """``sum_k mu_k int_0^h int_h^inf J_k(x - y) u_k(x) dy dx``.

    ``kernel`` and ``mu`` are scalars for a single species or sequences with
    one entry per row of ``state.u``.
    """
    kernels = kernel if isinstance(kernel, (list, tuple)) else (kernel,)
    mus = np.atleast_1d(np.asarray(mu, dtype=float))
    ua, m = _active(state.u, state.h, grid.dx)
    if len(kernels) != ua.shape[0] or mus.size != ua.shape[0]:
        raise ValueError("one kernel and one rate per species are required")
    w = trapezoid_weights(state.h, grid.dx, m)
    total = 0.0
    for k, mk, row in zip(kernels, mus, ua):
        if not np.any(row):
            continue
        total += mk * KernelTable(k, grid.dx).flux(row, w, state.h)
    return total


class HatQuadrature:
    """Nodes on ``[0, L]`` with product-integration weights.

    The profile is taken piecewise linear between nodes and integrated
    against ``J`` exactly, through the even second antiderivative
    ``Phi(z) = int_|z|^inf T + m|z|/2`` of the kernel.  Row sums are then
    exactly ``int_0^L J(x_i - y) dy``, so constants are reproduced without
    the mass excess that point samples of a kinked kernel carry.

    With ``halfline`` the profile is continued beyond ``L`` by a constant
    whose weight ``T(L - x_i)`` is added by :meth:`conv`.  Kernels without a
    first moment have no finite ``Phi`` and fall back to trapezoid samples.
    """

    def __init__(self, kernel: Kernel, L: float, dx: float, halfline: bool):
        n = int(round(L / dx))
        if n < 8:
            raise ValueError("need at least 8 cells")
        self.x = np.linspace(0.0, L, n + 1)
        self.dx = dx = L / n
        m = kernel.mass

        def phi(z):
            z = np.abs(z)
            return kernel.tail_integral(z) + 0.5 * m * z

        def dphi(z):
            return np.sign(z) * (0.5 * m - kernel.tail(np.abs(z)))

        self.j = kernel.j(self.x)
        self.exterior = kernel.tail(L - self.x) if halfline else np.zeros_like(self.x)
        if not kernel.first_moment_finite:
            self.table = dx * kernel(dx * np.arange(n + 1))
            self.edge = 0.5 * self.table
            return
        k = dx * np.arange(n + 2)
        # full hats: second difference of Phi
        self.table = (phi(k[1:]) - 2.0 * phi(k[:-1]) + phi(k[:-1] - dx))[: n + 1] / dx
        self.table = np.clip(self.table, 0.0, None)
        a = self.x
        # half hat at node 0 seen from node i (mirror image for node n)
        self.edge = np.clip(dphi(a) - (phi(a) - phi(a - dx)) / dx, 0.0, None)

    def conv(self, u: np.ndarray, far: float = 0.0) -> np.ndarray:
        out = toeplitz_apply(self.table, u)
        out += (self.edge - self.table) * u[0]
        out += (self.edge[::-1] - self.table[::-1]) * u[-1]
        if far:
            out = out + far * self.exterior
        return out

"""Kernels, reactions, initial data and model specifications.

Every standing hypothesis on the data (kernel regularity and mass, first
moment, growth-law sign structure, initial-data compatibility) is exposed
as a checkable predicate so that runs can be audited before they start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, optimize

KERNEL_FAMILIES = ("laplace", "polynomial-compact", "algebraic-tail", "table-defined")
VARIANTS = ("dirichlet", "neumann", "predprey")

# Variant aliases accepted from configuration files.
_VARIANT_ALIASES = {
    "dirichlet": "dirichlet",
    "dirichlet-1.2": "dirichlet",
    "neumann": "neumann",
    "neumann-1.3": "neumann",
    "predprey": "predprey",
    "predprey-1.4": "predprey",
}


class ModelError(ValueError):
    """Raised when model data violate a hypothesis that cannot be repaired."""


@dataclass(frozen=True)
class Kernel:
    """An even dispersal density on the real line.

    ``tail(z)`` is the tail mass ``T(z) = int_z^inf J`` for any real ``z``;
    ``tail_integral(z)`` is ``int_z^inf T`` for ``z >= 0`` (infinite when the
    first moment diverges).  ``mass`` is 1 for every kernel built by
    :func:`make_kernel`; only the cut-off kernels used to validate the
    semi-wave speed carry a smaller mass.
    """

    family: str
    params: Mapping[str, float]
    density: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    _tail: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    _tail_integral: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    support_radius: float
    first_moment: float
    scale: float = 1.0
    mass: float = 1.0

    def __call__(self, x):
        return self.density(np.asarray(x, dtype=float))

    @property
    def first_moment_finite(self) -> bool:
        return math.isfinite(self.first_moment)

    def tail(self, z):
        z = np.asarray(z, dtype=float)
        za = np.abs(z)
        t = self._tail(za)
        return np.where(z >= 0, t, self.mass - t)

    def tail_integral(self, z):
        """``int_z^inf T(s) ds`` for ``z >= 0``."""
        z = np.asarray(z, dtype=float)
        if np.any(z < 0):
            raise ValueError("tail_integral needs z >= 0")
        if not self.first_moment_finite:
            return np.full_like(z, np.inf)
        return self._tail_integral(z)

    def j(self, x):
        """Mass landing in the half-line: ``j(x) = int_0^inf J(x - y) dy``."""
        return self.mass - self.tail(x)

    def truncation_radius(self, tol: float = 1e-10) -> float:
        """Smallest radius ``R`` (up to bisection accuracy) with ``T(R) < tol``."""
        if math.isfinite(self.support_radius):
            return self.support_radius
        if self.family == "laplace":
            return self.scale * math.log(1.0 / (2.0 * tol)) * (1.0 + 1e-12)
        if self.family == "algebraic-tail":
            gamma = self.params["gamma"]
            return (2.0 * tol) ** (-1.0 / (gamma - 1.0)) - 1.0
        hi = self.scale
        while float(self.tail(hi)) >= tol:
            hi *= 2.0
        return float(optimize.brentq(lambda z: float(self.tail(z)) - tol, 0.0, hi))


def _laplace(scale: float) -> Kernel:
    s = float(scale)
    if s <= 0:
        raise ModelError("laplace scale must be positive")

    return Kernel(
        family="laplace",
        params={"scale": s},
        density=lambda x: np.exp(-np.abs(x) / s) / (2.0 * s),
        _tail=lambda z: 0.5 * np.exp(-z / s),
        _tail_integral=lambda z: 0.5 * s * np.exp(-z / s),
        support_radius=math.inf,
        first_moment=s / 2.0,
        scale=s,
    )


def _poly_compact(radius: float) -> Kernel:
    r = float(radius)
    if r <= 0:
        raise ModelError("polynomial-compact radius must be positive")

    def density(x):
        t = np.abs(x) / r
        return np.where(t < 1.0, 15.0 / (16.0 * r) * (1.0 - t * t) ** 2, 0.0)

    def tail(z):
        t = np.minimum(z / r, 1.0)
        return 0.5 - 15.0 / 16.0 * (t - 2.0 * t**3 / 3.0 + t**5 / 5.0)

    def tail_integral(z):
        t = np.minimum(z / r, 1.0)
        inner = 0.5 * (1 - t**2) - (1 - t**4) / 6.0 + (1 - t**6) / 30.0
        return r * (0.5 * (1.0 - t) - 15.0 / 16.0 * inner)

    return Kernel(
        family="polynomial-compact",
        params={"radius": r},
        density=density,
        _tail=tail,
        _tail_integral=tail_integral,
        support_radius=r,
        first_moment=5.0 * r / 32.0,
        scale=r,
    )


def _algebraic(gamma: float) -> Kernel:
    g = float(gamma)
    if g <= 1.0:
        raise ModelError("algebraic-tail needs gamma > 1 for a normalizable density")

    def tail_integral(z):
        return 0.5 * (1.0 + z) ** (2.0 - g) / (g - 2.0)

    return Kernel(
        family="algebraic-tail",
        params={"gamma": g},
        density=lambda x: 0.5 * (g - 1.0) * (1.0 + np.abs(x)) ** (-g),
        _tail=lambda z: 0.5 * (1.0 + z) ** (1.0 - g),
        _tail_integral=tail_integral,
        support_radius=math.inf,
        first_moment=1.0 / (2.0 * (g - 2.0)) if g > 2.0 else math.inf,
        scale=1.0,
    )


def _table(abscissae: Sequence[float], values: Sequence[float]) -> Kernel:
    xs = np.asarray(abscissae, dtype=float)
    ys = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 3:
        raise ModelError("table kernel needs matching 1-d abscissae/values (>= 3 points)")
    if np.any(np.diff(xs) <= 0):
        raise ModelError("table abscissae must be strictly increasing")
    scale_x = max(abs(xs[0]), abs(xs[-1]))
    if not np.allclose(xs, -xs[::-1], atol=1e-12 * scale_x):
        raise ModelError("table abscissae must be symmetric about 0")
    if np.any(ys < 0):
        raise ModelError("kernel values must be nonnegative")
    if not np.allclose(ys, ys[::-1], atol=1e-12 * max(ys.max(), 1.0)):
        raise ModelError("table kernel is not even")
    if ys[0] != 0.0 or ys[-1] != 0.0:
        raise ModelError("table kernel must vanish at the ends of its support")
    j0 = float(np.interp(0.0, xs, ys))
    if j0 <= 0:
        raise ModelError("kernel must satisfy J(0) > 0")

    raw_mass = float(np.trapezoid(ys, xs))
    if raw_mass <= 0:
        raise ModelError("kernel is not normalizable")
    ys = ys / raw_mass

    # exact integrals of the piecewise-linear interpolant
    slopes = np.diff(ys) / np.diff(xs)
    cell = 0.5 * (ys[1:] + ys[:-1]) * np.diff(xs)
    cum = np.concatenate([[0.0], np.cumsum(cell)])
    radius = float(xs[-1])

    def density(x):
        return np.interp(x, xs, ys, left=0.0, right=0.0)

    def cdf(z):
        z = np.clip(z, xs[0], xs[-1])
        k = np.clip(np.searchsorted(xs, z, side="right") - 1, 0, xs.size - 2)
        dz = z - xs[k]
        return cum[k] + ys[k] * dz + 0.5 * slopes[k] * dz * dz

    def tail(z):
        return 1.0 - cdf(z)

    def tail_integral(z):
        z = np.atleast_1d(z)
        out = np.array([integrate.quad(lambda s: float(tail(s)), zi, radius, limit=200)[0]
                        if zi < radius else 0.0 for zi in z])
        return out

    pos = xs >= 0
    moment = float(integrate.quad(lambda s: s * float(density(s)), 0.0, radius,
                                  points=xs[pos].tolist()[:50], limit=400)[0])
    return Kernel(
        family="table-defined",
        params={"points": float(xs.size), "raw_mass": raw_mass},
        density=density,
        _tail=tail,
        _tail_integral=tail_integral,
        support_radius=radius,
        first_moment=moment,
        scale=radius,
    )


def make_kernel(family: str, params: Mapping | None = None) -> Kernel:
    """Build a normalized kernel from a family tag and its parameters.

    Families: ``laplace`` (``scale``), ``polynomial-compact`` (``radius``),
    ``algebraic-tail`` (``gamma > 1``; density ``(gamma-1)/2 (1+|x|)^-gamma``)
    and ``table-defined`` (``x``, ``values``; linear interpolation,
    renormalized to unit mass).
    """
    params = dict(params or {})
    if family == "laplace":
        return _laplace(params.get("scale", 1.0))
    if family == "polynomial-compact":
        return _poly_compact(params.get("radius", 1.0))
    if family == "algebraic-tail":
        return _algebraic(params.get("gamma", 3.0))
    if family == "table-defined":
        if "x" not in params or "values" not in params:
            raise ModelError("table-defined kernel needs 'x' and 'values'")
        return _table(params["x"], params["values"])
    raise ModelError(f"unknown kernel family {family!r}; choose from {KERNEL_FAMILIES}")


def make_cutoff_kernel(kernel: Kernel, n: float, points_per_unit: int = 2000) -> Kernel:
    """The compactly supported kernel ``xi(x/n) J(x)`` with the hat cut-off
    ``xi = 1`` on ``[-1, 1]``, linear to 0 on ``1 <= |x| <= 2``.

    The result is deliberately *not* renormalized; its mass is below 1.
    """
    if n <= 0:
        raise ValueError("cut-off scale must be positive")
    radius = 2.0 * n

    def density(x):
        ax = np.abs(x)
        xi = np.clip(2.0 - ax / n, 0.0, 1.0)
        return xi * kernel.density(ax)

    z = np.linspace(0.0, radius, int(points_per_unit * radius) + 1)
    jz = density(z)
    seg = 0.5 * (jz[1:] + jz[:-1]) * np.diff(z)
    tail_tab = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    tseg = 0.5 * (tail_tab[1:] + tail_tab[:-1]) * np.diff(z)
    tint_tab = np.concatenate([np.cumsum(tseg[::-1])[::-1], [0.0]])
    mass = 2.0 * tail_tab[0]
    moment = float(np.trapezoid(z * jz, z))
    return Kernel(
        family="cutoff",
        params={"n": float(n), **dict(kernel.params)},
        density=density,
        _tail=lambda s: np.interp(s, z, tail_tab, right=0.0),
        _tail_integral=lambda s: np.interp(s, z, tint_tab, right=0.0),
        support_radius=radius,
        first_moment=moment,
        scale=kernel.scale,
        mass=mass,
    )


def first_moment_numeric(kernel: Kernel, z0: float = 1.0, rtol: float = 1e-4,
                         max_doublings: int = 60) -> tuple[bool, float]:
    """Doubling-window test for a finite first moment.

    Evaluates ``m(Z) = int_0^Z z J(z) dz`` on ``Z = z0 2^k`` and reports
    finite once the relative change stays below ``rtol`` for three
    consecutive doublings.  Returns ``(finite, last m(Z))``.
    """
    z_prev, m_prev = 0.0, 0.0
    streak = 0
    z = z0
    for _ in range(max_doublings):
        piece = integrate.quad(lambda s: s * float(kernel.density(s)), z_prev, z, limit=200)[0]
        m = m_prev + piece
        if m > 0 and abs(m - m_prev) <= rtol * m:
            streak += 1
            if streak >= 3:
                return True, m
        else:
            streak = 0
        z_prev, m_prev = z, m
        z *= 2.0
    return False, m_prev


@dataclass(frozen=True)
class Reaction:
    """An autonomous growth law ``f`` with ``f(0) = 0`` and a unique positive root."""

    name: str
    params: Mapping[str, float]
    f: Callable = field(repr=False, compare=False)
    f_prime: Callable = field(repr=False, compare=False)
    f_prime0: float
    u_star: float
    K: float

    def __call__(self, u):
        return self.f(np.asarray(u, dtype=float))

    def lipschitz(self, upper: float, samples: int = 2001) -> float:
        """Bound on ``|f'|`` over ``[0, upper]``."""
        if self.name == "logistic":
            a, b = self.params["a"], self.params["b"]
            return max(abs(a), abs(a - 2.0 * b * upper))
        u = np.linspace(0.0, upper, samples)
        return float(np.max(np.abs(self.f_prime(u))))


def make_reaction_logistic(a: float, b: float) -> Reaction:
    """``f(u) = u (a - b u)``."""
    if not a > 0:
        raise ModelError("logistic growth needs a = f'(0) > 0")
    if not b > 0:
        raise ModelError("logistic growth needs b > 0")
    a, b = float(a), float(b)
    return Reaction(
        name="logistic",
        params={"a": a, "b": b},
        f=lambda u: u * (a - b * u),
        f_prime=lambda u: a - 2.0 * b * u,
        f_prime0=a,
        u_star=a / b,
        K=a / b + 1.0,
    )


def make_reaction(f: Callable, f_prime: Callable | None = None, u_max: float = 1e3,
                  name: str = "user", params: Mapping | None = None) -> Reaction:
    """Wrap a user growth law; the positive root is located by a sign scan.

    Laws with more than one sign change on ``(0, u_max]`` are rejected, as
    are laws without growth at 0.
    """
    if f_prime is None:
        def f_prime(u, _f=f):
            u = np.asarray(u, dtype=float)
            h = 1e-6 * np.maximum(1.0, np.abs(u))
            return (_f(u + h) - _f(np.maximum(u - h, 0.0))) / (u + h - np.maximum(u - h, 0.0))
    if abs(float(f(np.array(0.0)))) > 1e-14:
        raise ModelError("growth law must satisfy f(0) = 0")
    fp0 = float(f_prime(np.array(0.0)))
    if not fp0 > 0:
        raise ModelError("growth law must satisfy f'(0) > 0")
    grid = np.geomspace(1e-9, u_max, 4001)
    vals = np.asarray(f(grid), dtype=float)
    keep = vals != 0.0  # a node landing exactly on the root is not a sign change
    grid, vals = grid[keep], vals[keep]
    signs = np.sign(vals)
    changes = np.nonzero(signs[1:] != signs[:-1])[0]
    if changes.size != 1 or vals[-1] >= 0:
        raise ModelError("growth law must have exactly one positive root with f < 0 beyond it")
    k = changes[0]
    u_star = float(optimize.brentq(lambda u: float(f(np.array(u))), grid[k], grid[k + 1],
                                   xtol=1e-15, rtol=4 * np.finfo(float).eps))
    return Reaction(name=name, params=dict(params or {}), f=f, f_prime=f_prime,
                    f_prime0=fp0, u_star=u_star, K=u_star + 1.0)


@dataclass(frozen=True)
class InitialData:
    """Initial front ``h0`` and one profile per species on ``[0, h0]``."""

    h0: float
    profiles: tuple = field(compare=False)
    label: str = "custom"

    def __post_init__(self):
        if not self.h0 > 0:
            raise ModelError("h0 must be positive")

    @property
    def n_species(self) -> int:
        return len(self.profiles)

    def sample(self, x) -> np.ndarray:
        """Profiles at ``x`` (zero at and beyond ``h0``); shape ``(n_species, len(x))``."""
        x = np.asarray(x, dtype=float)
        out = np.array([np.asarray(p(x), dtype=float) * np.ones_like(x) for p in self.profiles])
        out[:, x >= self.h0] = 0.0
        return out

    def sup(self) -> np.ndarray:
        x = np.linspace(0.0, self.h0, 2001)
        vals = np.array([np.asarray(p(x), dtype=float) * np.ones_like(x) for p in self.profiles])
        return vals.max(axis=1)

    def scaled(self, factor: float) -> "InitialData":
        return InitialData(self.h0, tuple((lambda x, p=p: factor * p(x)) for p in self.profiles),
                           label=f"{factor:g}*{self.label}")


def make_initial(preset: str, h0: float, amplitude: float | Sequence[float] = 1.0,
                 n_species: int = 1, cap_width: float | None = None,
                 table: Sequence | None = None) -> InitialData:
    """Initial profile presets.

    ``cosine-bump``: ``A cos(pi x / (2 h0))``; ``constant-cap``: ``A`` with a
    linear ramp to 0 over the last ``cap_width`` (default ``h0/10``);
    ``table``: rows ``[x, u]`` (or ``[x, u1, u2]``), linearly interpolated.
    """
    amps = np.broadcast_to(np.asarray(amplitude, dtype=float), (n_species,))
    if preset == "cosine-bump":
        profiles = tuple((lambda x, a=a: a * np.cos(0.5 * np.pi * np.asarray(x) / h0)) for a in amps)
    elif preset == "constant-cap":
        w = cap_width if cap_width is not None else 0.1 * h0
        profiles = tuple((lambda x, a=a: a * np.clip((h0 - np.asarray(x)) / w, 0.0, 1.0)) for a in amps)
    elif preset == "table":
        tab = np.asarray(table, dtype=float)
        if tab.ndim != 2 or tab.shape[1] < 2:
            raise ModelError("table initial data needs rows [x, u...]")
        n_species = tab.shape[1] - 1
        profiles = tuple((lambda x, col=c: np.interp(x, tab[:, 0], tab[:, col])) for c in range(1, tab.shape[1]))
    else:
        raise ModelError(f"unknown initial preset {preset!r}")
    return InitialData(float(h0), profiles, label=preset)


@dataclass(frozen=True)
class LVCoefficients:
    a1: float
    b1: float
    c1: float
    a2: float
    b2: float
    c2: float

    def __post_init__(self):
        for name in ("a1", "b1", "c1", "a2", "b2", "c2"):
            if not getattr(self, name) > 0:
                raise ModelError(f"Lotka-Volterra coefficient {name} must be positive")

    @property
    def weak_predation(self) -> bool:
        return self.a1 * self.b1 * self.b2 > self.a2 * self.b1 * self.c1 + self.a1 * self.c1 * self.c2

    @property
    def predator_plateau(self) -> float:
        """Predator ceiling when prey sits at its carrying capacity."""
        return (self.a2 * self.b1 + self.a1 * self.c2) / (self.b1 * self.b2)


@dataclass(frozen=True)
class ModelSpec:
    """One of the three free-boundary models.

    Scalar variants carry one entry in ``d``, ``mu``, ``kernels`` and
    ``reactions``; the predator-prey variant carries two, with the species'
    own logistic laws ``u(a_i - b_i u)`` and the coupling in ``lv``.
    """

    variant: str
    d: tuple
    mu: tuple
    kernels: tuple
    reactions: tuple
    lv: LVCoefficients | None = None

    def __post_init__(self):
        variant = _VARIANT_ALIASES.get(self.variant)
        if variant is None:
            raise ModelError(f"unknown variant {self.variant!r}")
        object.__setattr__(self, "variant", variant)
        n = 2 if variant == "predprey" else 1
        for name in ("d", "mu", "kernels", "reactions"):
            if len(getattr(self, name)) != n:
                raise ModelError(f"{variant} model needs {n} value(s) for {name}")
        if any(not v > 0 for v in self.d) or any(not v > 0 for v in self.mu):
            raise ModelError("dispersal rates and expansion rates must be positive")
        if variant == "predprey" and self.lv is None:
            raise ModelError("predprey model needs Lotka-Volterra coefficients")

    @property
    def n_species(self) -> int:
        return len(self.d)

    @property
    def weak_predation(self) -> bool | None:
        return self.lv.weak_predation if self.lv is not None else None

    def with_mu(self, mu) -> "ModelSpec":
        mu = tuple(np.atleast_1d(np.asarray(mu, dtype=float)).tolist())
        return ModelSpec(self.variant, self.d, mu, self.kernels, self.reactions, self.lv)

    def growth_rates(self) -> tuple:
        """``f'(0)`` per species (``a_i`` for the predator-prey model)."""
        if self.lv is not None:
            return (self.lv.a1, self.lv.a2)
        return (self.reactions[0].f_prime0,)

    def state_bounds(self, init: InitialData) -> np.ndarray:
        """A-priori ceilings on each species (well-posedness bounds)."""
        sup0 = init.sup()
        if self.lv is None:
            return np.array([max(sup0[0], self.reactions[0].K)])
        lv = self.lv
        A1 = max(sup0[0], lv.a1 / lv.b1)
        return np.array([A1, max(sup0[1], (lv.a2 + lv.c2 * A1) / lv.b2)])

    def lipschitz_bound(self, init: InitialData) -> float:
        bounds = self.state_bounds(init)
        if self.lv is None:
            return self.reactions[0].lipschitz(bounds[0])
        lv = self.lv
        u1, u2 = bounds
        # partial derivatives of the two coupled rate laws on the bounding box
        l1 = max(abs(lv.a1), abs(lv.a1 - 2 * lv.b1 * u1 - lv.c1 * u2)) + lv.c1 * u1
        l2 = max(abs(lv.a2), abs(lv.a2 - 2 * lv.b2 * u2 + lv.c2 * u1)) + lv.c2 * u2
        return max(l1, l2)


def scalar_model(variant: str, kernel: Kernel, reaction: Reaction, d: float, mu: float) -> ModelSpec:
    return ModelSpec(variant, (float(d),), (float(mu),), (kernel,), (reaction,))


def predprey_model(kernels: Sequence[Kernel], d: Sequence[float], mu: Sequence[float],
                   a1, b1, c1, a2, b2, c2) -> ModelSpec:
    lv = LVCoefficients(a1, b1, c1, a2, b2, c2)
    reactions = (make_reaction_logistic(a1, b1), make_reaction_logistic(a2, b2))
    return ModelSpec("predprey", tuple(map(float, d)), tuple(map(float, mu)), tuple(kernels),
                     reactions, lv)


@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    witness: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list

    @property
    def ok(self) -> bool:
        """True when the hypotheses needed to simulate hold ((J1) is informational)."""
        return all(c.passed for c in self.checks if not c.name.startswith("(J1)"))

    def get(self, name: str) -> HypothesisCheck:
        for c in self.checks:
            if c.name == name or c.name.startswith(name + " "):
                return c
        raise KeyError(name)

    def as_rows(self) -> list:
        return [{"hypothesis": c.name, "passed": c.passed, "witness": c.witness, "detail": c.detail}
                for c in self.checks]


def _check_kernel(kernel: Kernel, tag: str) -> list:
    out = []
    xs = np.linspace(-5 * kernel.scale, 5 * kernel.scale, 401)
    asym = float(np.max(np.abs(kernel(xs) - kernel(-xs))))
    j0 = float(kernel(0.0))
    # density and tail mass must agree: quadrature up to R plus the tail beyond R
    radius = min(kernel.truncation_radius(1e-10), 100.0 * kernel.scale)
    mass = 2.0 * (integrate.quad(lambda s: float(kernel(s)), 0.0, radius, limit=400)[0]
                  + float(kernel.tail(radius)))
    ok = asym <= 1e-12 and j0 > 0 and abs(mass - kernel.mass) <= 1e-8
    out.append(HypothesisCheck(f"(J){tag}", ok, j0,
                               f"J(0)={j0:.6g}, mass={mass:.10f}, asymmetry={asym:.2e}"))
    if kernel.family in ("laplace", "polynomial-compact", "algebraic-tail"):
        finite, witness = kernel.first_moment_finite, kernel.first_moment
        how = "analytic"
    else:
        finite, witness = first_moment_numeric(kernel)
        how = "doubling window"
    out.append(HypothesisCheck(f"(J1){tag}", finite, witness, f"first moment ({how})"))
    return out


def _check_reaction(reaction: Reaction, tag: str, samples: int = 100) -> list:
    f0 = float(reaction(0.0))
    fstar = float(reaction(reaction.u_star))
    u_in = np.linspace(0, reaction.u_star, samples + 2)[1:-1]
    u_out = np.linspace(reaction.u_star, reaction.K, samples + 1)[1:]
    sign_ok = bool(np.all(reaction(u_in) > 0) and np.all(reaction(u_out) < 0))
    u = np.linspace(reaction.K / samples, reaction.K, samples)
    ratio = reaction(u) / u
    return [
        HypothesisCheck(f"(F1){tag}", f0 == 0.0 and sign_ok and abs(fstar) <= 1e-12, f0,
                        f"f(0)={f0:g}, f(u*)={fstar:.2e}, sign pattern {'ok' if sign_ok else 'broken'}"),
        HypothesisCheck(f"(F2){tag}", bool(np.all(np.diff(ratio) < 0)),
                        float(np.max(np.diff(ratio))), "f(u)/u strictly decreasing on samples"),
        HypothesisCheck(f"(F3){tag}", reaction.f_prime0 > 0, reaction.f_prime0, "f'(0) > 0"),
    ]


def validate_spec(spec: ModelSpec, init: InitialData | None = None) -> ValidationReport:
    """Check every standing hypothesis and report witnesses; inputs are untouched."""
    checks = []
    tags = [""] if spec.n_species == 1 else [f" species {i + 1}" for i in range(spec.n_species)]
    for kernel, tag in zip(spec.kernels, tags):
        checks.extend(_check_kernel(kernel, tag))
    if spec.lv is None:
        checks.extend(_check_reaction(spec.reactions[0], ""))
    else:
        lv = spec.lv
        checks.append(HypothesisCheck("weak predation", lv.weak_predation,
                                      lv.a1 * lv.b1 * lv.b2 - lv.a2 * lv.b1 * lv.c1 - lv.a1 * lv.c1 * lv.c2,
                                      "a1 b1 b2 - a2 b1 c1 - a1 c1 c2"))
    if init is not None:
        x = np.linspace(0.0, init.h0, 257)
        vals = np.array([np.asarray(p(x), dtype=float) * np.ones_like(x) for p in init.profiles])
        end = float(np.max(np.abs(vals[:, -1])))
        interior = float(np.min(vals[:, :-1]))
        ok = end <= 1e-12 and interior > 0 and init.n_species == spec.n_species
        checks.append(HypothesisCheck("(H)", ok, end,
                                      f"u0(h0)={end:g}, min interior u0={interior:.3g}"))
    return ValidationReport(checks)

"""Explicit time stepping of the free-boundary models and trajectory diagnostics."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .model import InitialData, ModelSpec
from .nonlocal_ops import FrontState, KernelTable, active_count, trapezoid_weights

log = logging.getLogger(__name__)

NEG_TOL = 1e-14


class SimulationError(RuntimeError):
    def __init__(self, message, state: FrontState | None = None):
        super().__init__(message)
        self.state = state


def stable_dt(spec: ModelSpec, init: InitialData) -> float:
    """Largest step allowed: ``0.5 / (2 d_max + Lip f)`` on the a-priori box."""
    return 0.5 / (2.0 * max(spec.d) + spec.lipschitz_bound(init))


@dataclass
class SimConfig:
    spec: ModelSpec
    init: InitialData
    dx: float = 1.0 / 32
    dt: float | None = None  # defaults to the stability limit
    t_max: float = 100.0
    x_max: float | None = None  # initial allocation; grows geometrically
    series_every: int | None = None  # steps between series samples
    n_snapshots: int = 50
    # stopping rules (used by the classifier)
    stop_above: float | None = None  # stop once h reaches this level
    eps_vanish: float | None = None  # stop once sup u < eps and h has stalled
    stall_window: float = 10.0
    eps_stall: float = 1e-10
    check_every: int = 100

    def __post_init__(self):
        if self.init.n_species != self.spec.n_species:
            raise ValueError("initial data and model disagree on the number of species")
        limit = stable_dt(self.spec, self.init)
        if self.dt is None:
            self.dt = limit
        elif self.dt > limit * (1 + 1e-12):
            raise ValueError(f"dt={self.dt} violates the stability limit {limit:.6g}")
        if not self.dx > 0 or not self.t_max > 0:
            raise ValueError("dx and t_max must be positive")

    @property
    def cadence(self) -> int:
        if self.series_every is not None:
            return max(1, int(self.series_every))
        return max(1, int(math.floor(0.1 / self.dt)))

    def with_(self, **changes) -> "SimConfig":
        vals = {k: getattr(self, k) for k in self.__dataclass_fields__}
        vals.update(changes)
        return SimConfig(**vals)


@dataclass
class Trajectory:
    t: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    sup_u: np.ndarray = field(repr=False)  # shape (samples, species)
    mass: np.ndarray = field(repr=False)
    hdot: np.ndarray = field(repr=False)
    snapshots: list = field(repr=False)
    dx: float
    dt: float
    steps: int
    stop_reason: str  # "t_max", "above", "vanished"
    hint: str  # "spreading", "vanishing" or "undecided"
    bounds: np.ndarray = field(repr=False)

    @property
    def final(self) -> FrontState:
        return self.snapshots[-1]

    def series_rows(self):
        cols = [self.t, self.h]
        cols += [self.sup_u[:, k] for k in range(self.sup_u.shape[1])]
        cols += [self.mass[:, k] for k in range(self.mass.shape[1])]
        cols.append(self.hdot)
        return np.column_stack(cols)

    def series_header(self):
        n = self.sup_u.shape[1]
        if n == 1:
            return ["t", "h", "supU", "mass", "hdot"]
        return (["t", "h"] + [f"supU{k + 1}" for k in range(n)]
                + [f"mass{k + 1}" for k in range(n)] + ["hdot"])

    def h_at(self, t):
        return np.interp(t, self.t, self.h)


class _Stepper:
    """Holds the kernel tables and rate laws for one model and spacing."""

    def __init__(self, spec: ModelSpec, dx: float):
        self.spec = spec
        self.dx = dx
        self.tables = [KernelTable(k, dx) for k in spec.kernels]
        self.d = np.asarray(spec.d, dtype=float)
        self.mu = np.asarray(spec.mu, dtype=float)

    def rates(self, u: np.ndarray) -> np.ndarray:
        spec = self.spec
        if spec.lv is None:
            return spec.reactions[0].f(u[0])[None, :]
        lv = spec.lv
        u1, u2 = u
        return np.array([u1 * (lv.a1 - lv.b1 * u1 - lv.c1 * u2),
                         u2 * (lv.a2 - lv.b2 * u2 + lv.c2 * u1)])

    def flux(self, u: np.ndarray, h: float) -> float:
        m = active_count(h, self.dx)
        w = trapezoid_weights(h, self.dx, m)
        return sum(mu * tab.flux(row[:m], w, h)
                   for mu, tab, row in zip(self.mu, self.tables, u) if np.any(row[:m]))

    def __call__(self, state: FrontState, dt: float) -> tuple:
        """One Euler step; returns the new state and the front velocity used."""
        dx, h = self.dx, state.h
        m = active_count(h, dx)
        if m + 1 > state.u.shape[1]:
            raise SimulationError("state allocation does not cover the front", state)
        u = state.u[:, :m]
        w = trapezoid_weights(h, dx, m)
        x = dx * np.arange(m)
        du = self.rates(u)
        hdot = 0.0
        for k, tab in enumerate(self.tables):
            if not np.any(u[k]):
                continue
            sink = 1.0 if self.spec.variant != "neumann" else tab.kernel.j(x)
            du[k] += self.d[k] * (tab.convolve(u[k], w) - sink * u[k])
            hdot += self.mu[k] * tab.flux(u[k], w, h)
        new_u = state.u.copy()
        new_u[:, :m] = u + dt * du
        low = float(new_u.min())
        if not math.isfinite(low) or not math.isfinite(hdot):
            raise SimulationError("non-finite values in the state", state)
        if low < 0:
            if low < -NEG_TOL * max(1.0, float(np.abs(new_u).max())):
                raise SimulationError(f"negative density {low:.3e}; the step is too large", state)
            np.maximum(new_u, 0.0, out=new_u)
        return FrontState(state.t + dt, h + dt * hdot, new_u), hdot


def initial_state(spec: ModelSpec, init: InitialData, dx: float, x_max: float | None = None) -> FrontState:
    x_max = max(x_max or 0.0, 4.0 * init.h0, init.h0 + 64 * dx)
    n = int(math.ceil(x_max / dx)) + 1
    x = dx * np.arange(n)
    return FrontState(0.0, float(init.h0), init.sample(x))


def step(spec: ModelSpec, state: FrontState, dt: float, dx: float) -> FrontState:
    """One explicit Euler step of the chosen model (stateless convenience form)."""
    bounds_dt = 0.5 / (2.0 * max(spec.d) + _state_lipschitz(spec, state))
    if dt > bounds_dt * (1 + 1e-12):
        raise ValueError(f"dt={dt} violates the stability limit {bounds_dt:.6g}")
    state = _ensure_room(state, dx)
    new, _ = _Stepper(spec, dx)(state, dt)
    return new


def _state_lipschitz(spec: ModelSpec, state: FrontState) -> float:
    sup = state.u.max(axis=1)
    fake = InitialData(max(state.h, 1e-12), tuple((lambda x, s=s: s + 0 * x) for s in sup))
    return spec.lipschitz_bound(fake)


def _ensure_room(state: FrontState, dx: float, spare: int = 8) -> FrontState:
    need = active_count(state.h, dx) + spare
    n = state.u.shape[1]
    if need <= n:
        return state
    new_n = max(need, 2 * n)
    u = np.zeros((state.u.shape[0], new_n))
    u[:, :n] = state.u
    return FrontState(state.t, state.h, u)


def _trimmed(state: FrontState, dx: float) -> FrontState:
    m = active_count(state.h, dx)
    return FrontState(state.t, state.h, state.u[:, : m + 1].copy())


def run(cfg: SimConfig) -> Trajectory:
    """Integrate to ``t_max`` or until a stopping rule fires."""
    spec, dx, dt = cfg.spec, cfg.dx, cfg.dt
    stepper = _Stepper(spec, dx)
    state = initial_state(spec, cfg.init, dx, cfg.x_max)
    bounds = spec.state_bounds(cfg.init)
    steps_total = int(math.ceil(cfg.t_max / dt - 1e-9))
    cadence = cfg.cadence
    snap_every = max(1, steps_total // max(1, cfg.n_snapshots))
    stall_steps = max(1, int(round(cfg.stall_window / dt)))

    ts, hs, sups, masses, hdots = [], [], [], [], []
    snaps = [_trimmed(state, dx)]
    h_hist = {}  # step -> h, only for the stall test

    def record(st: FrontState, hdot: float):
        m = active_count(st.h, dx)
        w = trapezoid_weights(st.h, dx, m)
        ts.append(st.t)
        hs.append(st.h)
        sups.append(st.u[:, :m].max(axis=1))
        masses.append(st.u[:, :m] @ w)
        hdots.append(hdot)

    record(state, stepper.flux(state.u, state.h))
    reason = "t_max"
    h_prev = state.h
    k = 0
    for k in range(1, steps_total + 1):
        state = _ensure_room(state, dx)
        state, hdot = stepper(state, dt)
        if state.h < h_prev:
            raise SimulationError("front moved backwards", state)
        h_prev = state.h
        if k % cfg.check_every == 0:
            top = state.u.max(axis=1)
            if np.any(top > bounds * (1 + 1e-9) + 1e-12):
                raise SimulationError(f"density {top} exceeds the a-priori bound {bounds}", state)
        if k % cadence == 0 or k == steps_total:
            record(state, hdot)
        if k % snap_every == 0 and k != steps_total:
            snaps.append(_trimmed(state, dx))
        if cfg.stop_above is not None and state.h >= cfg.stop_above:
            reason = "above"
            break
        if cfg.eps_vanish is not None:
            h_hist[k] = state.h
            h_hist.pop(k - stall_steps - 1, None)
            if k > stall_steps and state.u.max() < cfg.eps_vanish:
                if state.h - h_hist[k - stall_steps] < cfg.eps_stall:
                    reason = "vanished"
                    break
    if not ts or ts[-1] != state.t:
        record(state, stepper.flux(state.u, state.h))
    if snaps[-1].t != state.t:
        snaps.append(_trimmed(state, dx))
    hint = {"above": "spreading", "vanished": "vanishing"}.get(reason, "undecided")
    return Trajectory(np.array(ts), np.array(hs), np.array(sups), np.array(masses), np.array(hdots),
                      snaps, dx, dt, k, reason, hint, bounds)


@dataclass
class SpeedEstimate:
    slope: float
    secant: float
    t_start: float
    t_end: float


def front_speed(traj: Trajectory, window: float = 0.5) -> SpeedEstimate:
    """Least-squares slope of ``h`` over the trailing ``window`` fraction of samples."""
    n = traj.t.size
    k = int(math.floor(n * (1.0 - window)))
    t, h = traj.t[k:], traj.h[k:]
    if t.size < 10:
        raise ValueError("speed window holds fewer than 10 samples")
    slope = float(np.polyfit(t, h, 1)[0])
    secant = float(traj.h[-1] / traj.t[-1]) if traj.t[-1] > 0 else math.nan
    return SpeedEstimate(slope, secant, float(t[0]), float(t[-1]))


@dataclass
class AccelerationReport:
    flag: str  # "accelerating", "linear" or "inconclusive"
    times: np.ndarray
    ratios: np.ndarray  # s_k = h(t_k)/t_k
    growth: np.ndarray  # s_{k+1}/s_k


def acceleration_probe(traj: Trajectory, T0: float | None = None, n_last: int = 3) -> AccelerationReport:
    """Dyadic test ``s_k = h(2^k T0) / (2^k T0)``."""
    t_end = float(traj.t[-1])
    if T0 is None:
        T0 = t_end / 2 ** (n_last + 1)
    times = []
    t = T0
    while t <= t_end * (1 + 1e-12):
        times.append(t)
        t *= 2.0
    if len(times) < n_last + 1:
        raise ValueError("not enough dyadic checkpoints in the trajectory")
    times = np.array(times)
    s = traj.h_at(times) / times
    growth = s[1:] / s[:-1]
    last = growth[-n_last:]
    if np.all(last >= 1.15):
        flag = "accelerating"
    elif np.all((last >= 0.98) & (last <= 1.05)):
        flag = "linear"
    else:
        flag = "inconclusive"
    return AccelerationReport(flag, times, s, growth)

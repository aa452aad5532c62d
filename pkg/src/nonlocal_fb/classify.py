"""Spreading/vanishing classification, threshold searches and parameter sweeps."""

from __future__ import annotations

import logging
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import spectral
from .fbp_sim import SimConfig, Trajectory, run

log = logging.getLogger(__name__)

SPREADING, VANISHING, UNDECIDED = "spreading", "vanishing", "undecided"


class ThresholdError(RuntimeError):
    def __init__(self, message, mu=None):
        super().__init__(message)
        self.mu = mu


@dataclass
class Outcome:
    verdict: str
    evidence: str
    rule: str  # "unconditional", "h0-above-threshold", "simulated" or "budget"
    l_star: float | None
    h_final: float
    t_final: float
    sup_final: float
    lambda_at_h: float | None = None
    trajectory: Trajectory | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "evidence": self.evidence, "rule": self.rule,
                "l_star": self.l_star, "h_final": self.h_final, "t_final": self.t_final,
                "sup_final": self.sup_final, "lambda_at_h": self.lambda_at_h}


def _lambda_at(cfg: SimConfig, h: float) -> float | None:
    """Largest principal eigenvalue over species on ``[0, h]``."""
    spec = cfg.spec
    rates = spec.growth_rates()
    variant = "dirichlet" if spec.variant == "predprey" else spec.variant
    try:
        return max(spectral.lambda_p(variant, k, d, a, h, n=256).lambda_p
                   for k, d, a in zip(spec.kernels, spec.d, rates))
    except (spectral.SpectralError, ValueError):
        return None


def classify(cfg: SimConfig, margin: float = 0.05, eps_vanish: float = 1e-8,
             stall_window: float = 10.0, eps_stall: float = 1e-10,
             l_star: float | None = None, keep_trajectory: bool = False, **_) -> Outcome:
    """Decide spreading or vanishing for one configuration.

    Unconditional growth criteria and ``h0 >= l*`` are decided without
    simulation.  Otherwise the run stops as soon as ``h`` passes ``l* +
    margin`` (a bounded front never exceeds ``l*``) or once ``sup u`` is
    below ``eps_vanish`` with the front stalled over ``stall_window``.
    """
    spec, init = cfg.spec, cfg.init
    if l_star is None:
        l_star = spectral.model_critical_length(spec)
    sup0 = float(init.sup().max())
    if l_star is None:
        if spec.variant == "predprey":
            why = "a_i >= d_i for some species"
        elif spec.variant == "dirichlet":
            why = "f'(0) >= d"
        else:
            why = "f'(0) >= d/2"
        return Outcome(SPREADING, f"unconditional: {why}", "unconditional", None, init.h0, 0.0, sup0)
    if init.h0 >= l_star:
        return Outcome(SPREADING, f"h0={init.h0:g} >= l*={l_star:.6g}", "h0-above-threshold",
                       l_star, init.h0, 0.0, sup0)
    run_cfg = cfg.with_(stop_above=l_star + margin, eps_vanish=eps_vanish,
                        stall_window=stall_window, eps_stall=eps_stall)
    traj = run(run_cfg)
    h_end, t_end = float(traj.h[-1]), float(traj.t[-1])
    sup_end = float(traj.sup_u[-1].max())
    keep = traj if keep_trajectory else None
    if traj.stop_reason == "above":
        return Outcome(SPREADING, f"h crossed l*+{margin:g}={l_star + margin:.6g} at t={t_end:.4g}",
                       "simulated", l_star, h_end, t_end, sup_end, trajectory=keep)
    lam = _lambda_at(cfg, h_end)
    if traj.stop_reason == "vanished":
        return Outcome(VANISHING, f"sup u={sup_end:.2e} < {eps_vanish:g} with h stalled "
                       f"over {stall_window:g} at t={t_end:.4g}", "simulated", l_star, h_end,
                       t_end, sup_end, lam, keep)
    return Outcome(UNDECIDED, f"budget t_max={cfg.t_max:g} exhausted with h={h_end:.6g}, "
                   f"sup u={sup_end:.2e}", "budget", l_star, h_end, t_end, sup_end, lam, keep)


def _verdict(cfg: SimConfig, mu, opts: dict, l_star, extensions: int) -> str:
    cur = cfg.with_(spec=cfg.spec.with_mu(mu))
    for _ in range(extensions + 1):
        out = classify(cur, l_star=l_star, **opts)
        if out.verdict != UNDECIDED:
            return out.verdict
        cur = cur.with_(t_max=2.0 * cur.t_max)
    raise ThresholdError(f"classification undecided at mu={mu} after {extensions} budget extensions", mu)


@dataclass
class CriticalMu:
    mu_star: float
    mu_vanish: float  # largest probed rate with vanishing
    mu_spread: float  # smallest probed rate with spreading
    evaluations: int
    ray: float | None = None


def critical_mu(cfg: SimConfig, rel_tol: float = 1e-3, ray: float = 1.0, extensions: int = 3,
                mu_min: float = 1e-8, mu_max: float = 1e6, **opts) -> CriticalMu:
    """Expansion rate separating vanishing (below) from spreading (above).

    For the predator-prey model the search runs along ``mu2 = ray * mu1`` and
    the reported values are the sums ``mu1 + mu2``.
    """
    spec = cfg.spec
    l_star = spectral.model_critical_length(spec)
    if l_star is None or cfg.init.h0 >= l_star:
        raise ThresholdError("spreading is certain for every mu; no threshold exists")
    two = spec.variant == "predprey"

    def rates(m):
        return (m, ray * m) if two else (m,)

    calls = 0

    def verdict(m):
        nonlocal calls
        calls += 1
        v = _verdict(cfg, rates(m), opts, l_star, extensions)
        log.info("mu=%.6g -> %s", m, v)
        return v

    m = 1.0
    if verdict(m) == SPREADING:
        hi = m
        lo = m / 2.0
        while verdict(lo) == SPREADING:
            hi = lo
            lo /= 2.0
            if lo < mu_min:
                raise ThresholdError(f"spreading persists down to mu={lo:g}", lo)
    else:
        lo = m
        hi = 2.0 * m
        while verdict(hi) != SPREADING:
            lo = hi
            hi *= 2.0
            if hi > mu_max:
                raise ThresholdError(f"vanishing persists up to mu={hi:g}", hi)
    while hi - lo > rel_tol * hi:
        mid = math.sqrt(lo * hi)
        if verdict(mid) == SPREADING:
            hi = mid
        else:
            lo = mid
    scale = (1.0 + ray) if two else 1.0
    return CriticalMu(scale * 0.5 * (lo + hi), scale * lo, scale * hi, calls, ray if two else None)


def critical_mu_interval(cfg: SimConfig, rays=(0.5, 1.0, 2.0), **kwargs):
    """Threshold of ``mu1 + mu2`` along several rays; returns ``(mu_low, mu_high, per_ray)``.

    ``mu_low`` is the smallest sum found to spread on any ray, ``mu_high``
    the largest found to vanish; together they bracket the band in which
    the verdict depends on how the total rate is split.
    """
    per_ray = [critical_mu(cfg, ray=r, **kwargs) for r in rays]
    low = min(p.mu_vanish for p in per_ray)
    high = max(p.mu_spread for p in per_ray)
    return low, high, per_ray


# ---------------------------------------------------------------- sweeps

SWEEP_COLUMNS = ["name", "task", "status", "quantity", "value", "detail"]


def _run_job(job: dict, out_dir: str | None):
    """Execute one sweep job; returns a list of report rows (never raises)."""
    from . import config as cfgmod
    from . import report, semiwave
    from .fbp_sim import acceleration_probe, front_speed

    name = str(job.get("name", "job"))
    task = job.get("task", "classify")
    target = Path(out_dir) / name if out_dir else None
    try:
        data = job.get("config") or {}
        if "config_file" in job:
            data = cfgmod.load(job["config_file"])
        if task in ("eigen", "critical-length"):
            e = {**(data.get("eigen") or {}), **(job.get("eigen") or {})}
            spec = cfgmod.build_model(data.get("model", {}))
            variant = e.get("variant", spec.variant)
            a0 = float(e.get("a0", spec.growth_rates()[0]))
            kernel, d = spec.kernels[0], spec.d[0]
            if task == "eigen":
                rows = spectral.eigen_ladder(variant, kernel, d, a0, e.get("lengths", [1, 2, 4]), e.get("n", 256))
                if target:
                    report.write_eigen(target, rows)
                lam = [r[1] for r in rows]
                mono = all(b > a for a, b in zip(lam, lam[1:]))
                return [[name, task, "ok", "increasing", int(mono), f"{len(rows)} lengths"]]
            ell = spectral.critical_length(variant, kernel, d, a0)
            return [[name, task, "ok", "l_star", "none" if ell is None else ell, variant]]
        if task == "semiwave":
            s = {**(data.get("semiwave") or {}), **(job.get("semiwave") or {})}
            spec = cfgmod.build_model(data.get("model", {}))
            wave = semiwave.solve_semiwave(spec.kernels[0], spec.reactions[0], spec.d[0], spec.mu[0],
                                           s.get("M"), s.get("dx", 1.0 / 32))
            if target:
                report.write_semiwave(target, wave)
            return [[name, task, "ok", "c0", wave.c0, f"flux_gap={wave.flux_gap:.2e}"]]
        sim = cfgmod.build_sim(data)
        opts = cfgmod.classify_options(data)
        if task == "classify":
            out = classify(sim, **opts)
            return [[name, task, "ok", "verdict", out.verdict, out.evidence]]
        if task == "critical-mu":
            res = critical_mu(sim, rel_tol=job.get("rel_tol", 1e-3), ray=job.get("ray", 1.0), **opts)
            return [[name, task, "ok", "mu_star", res.mu_star, f"[{res.mu_vanish:.6g}, {res.mu_spread:.6g}]"]]
        if task in ("simulate", "acceleration"):
            traj = run(sim)
            if target:
                report.write_trajectory(target, traj, sim)
            rows = []
            try:
                sp = front_speed(traj)
                rows.append([name, task, "ok", "slope", sp.slope, f"secant={sp.secant:.6g}"])
            except ValueError as exc:
                rows.append([name, task, "ok", "slope", "nan", str(exc)])
            if task == "acceleration":
                acc = acceleration_probe(traj, job.get("T0"))
                rows.append([name, task, "ok", "acceleration", acc.flag,
                             " ".join(f"{g:.4f}" for g in acc.growth)])
            return rows
        raise ValueError(f"unknown task {task!r}")
    except Exception as exc:  # recorded per job, the sweep continues
        log.debug("job %s failed:\n%s", name, traceback.format_exc())
        return [[name, task, "error", "", "", f"{type(exc).__name__}: {exc}"]]


def sweep(plan: dict, out_dir: str | None = None, workers: int | None = None) -> list:
    """Run every job of ``plan["jobs"]``; rows come back in plan order."""
    jobs = list(plan.get("jobs") or [])
    if not jobs:
        return []
    if workers == 1 or len(jobs) == 1:
        results = [_run_job(j, out_dir) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs, [out_dir] * len(jobs)))
    return [row for rows in results for row in rows]

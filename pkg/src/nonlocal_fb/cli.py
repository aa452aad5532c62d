"""Command line entry point: ``nonlocal-fb <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from . import classify as cls
from . import config, report, semiwave, spectral, steady
from .fbp_sim import acceleration_probe, front_speed, run
from .model import ModelError, make_kernel, make_reaction_logistic


def _kernel_args(p):
    p.add_argument("--kernel", default="laplace",
                   help="laplace | polynomial-compact | algebraic-tail")
    p.add_argument("--scale", type=float, default=1.0, help="laplace decay scale")
    p.add_argument("--radius", type=float, default=1.0, help="compact kernel radius")
    p.add_argument("--gamma", type=float, default=3.0, help="algebraic tail exponent")


def _kernel(a):
    return make_kernel(a.kernel, {"scale": a.scale, "radius": a.radius, "gamma": a.gamma})


def _out(p):
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")


def cmd_eigen(a):
    k = _kernel(a)
    lengths = a.lengths or list(np.geomspace(0.5, 32, 7))
    rows = spectral.eigen_ladder(a.variant, k, a.d, a.a0, lengths, a.n)
    report.write_eigen(a.out, rows)
    for l, lam, res, its in rows:
        print(f"{l:.6g},{lam:.12g},{res:.3e},{its}")


def cmd_critical_length(a):
    ell = spectral.critical_length(a.variant, _kernel(a), a.d, a.a0, n=a.n)
    print("none" if ell is None else f"{ell:.9g}")


def cmd_steady(a):
    k = _kernel(a)
    r = make_reaction_logistic(a.a, a.b)
    if a.kind == "interval":
        prof = steady.steady_interval(a.variant, k, r, a.d, a.L, a.dx)
        if prof is None:
            print("none: zero is the only nonnegative steady state")
            return
    else:
        prof = steady.steady_halfline_U(k, r, a.d, a.L, a.dx)
    report.write_profile(a.out, "steady", prof.x, prof.W)
    print(f"residual={prof.residual:.3e} iterations={prof.iterations} W(0)={prof.W[0]:.9g}")


def cmd_semiwave(a):
    wave = semiwave.solve_semiwave(_kernel(a), make_reaction_logistic(a.a, a.b), a.d, a.mu,
                                   a.M, a.dx)
    report.write_semiwave(a.out, wave)
    print(f"c0={wave.c0:.10g} flux_gap={wave.flux_gap:.3e} residual={wave.residual:.3e}")


def cmd_simulate(a):
    cfg = config.load_sim(a.config, t_max=a.t_max)
    traj = run(cfg)
    extra = {}
    try:
        sp = front_speed(traj)
        extra["slope"], extra["secant"] = sp.slope, sp.secant
    except ValueError:
        pass
    if a.probe:
        acc = acceleration_probe(traj)
        extra["acceleration"] = acc.flag
        extra["dyadic_growth"] = acc.growth
    report.write_trajectory(a.out, traj, cfg, extra)
    print(f"h(t_max)={traj.h[-1]:.9g} hint={traj.hint} " +
          " ".join(f"{k}={v}" for k, v in extra.items() if not isinstance(v, np.ndarray)))


def cmd_classify(a):
    data = config.load(a.config)
    cfg = config.build_sim(data, t_max=a.t_max)
    out = cls.classify(cfg, keep_trajectory=True, **config.classify_options(data))
    report.write_json(Path(a.out) / "outcome.json", out.as_dict())
    if out.trajectory is not None:
        report.write_trajectory(a.out, out.trajectory, cfg)
    print(f"{out.verdict}: {out.evidence}")


def cmd_critical_mu(a):
    data = config.load(a.config)
    cfg = config.build_sim(data, t_max=a.t_max)
    opts = config.classify_options(data)
    if cfg.spec.variant == "predprey" and a.rays:
        low, high, per_ray = cls.critical_mu_interval(cfg, rays=a.rays, rel_tol=a.rel_tol, **opts)
        rows = [[p.ray, p.mu_vanish, p.mu_spread, p.mu_star] for p in per_ray]
        report.write_csv(Path(a.out) / "critical_mu.csv", ["ray", "sum_vanish", "sum_spread", "sum_star"], rows)
        print(f"mu1+mu2 threshold band: [{low:.6g}, {high:.6g}]")
        return
    res = cls.critical_mu(cfg, rel_tol=a.rel_tol, **opts)
    report.write_csv(Path(a.out) / "critical_mu.csv", ["mu_star", "mu_vanish", "mu_spread", "evaluations"],
                     [[res.mu_star, res.mu_vanish, res.mu_spread, res.evaluations]])
    print(f"mu*={res.mu_star:.6g} bracket=[{res.mu_vanish:.6g}, {res.mu_spread:.6g}]")


def cmd_sweep(a):
    with open(a.plan) as fh:
        plan = yaml.safe_load(fh) or {}
    rows = cls.sweep(plan, str(a.out), a.workers)
    path = report.write_sweep(a.out, rows, cls.SWEEP_COLUMNS)
    print(f"{len(rows)} rows -> {path}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nonlocal-fb",
                                description="Nonlocal diffusion free-boundary models: spectra, "
                                            "steady states, semi-waves, simulation and classification.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eigen", help="principal eigenvalue over a ladder of lengths")
    e.add_argument("--variant", choices=spectral.VARIANTS, default="dirichlet")
    e.add_argument("--d", type=float, default=1.0)
    e.add_argument("--a0", type=float, default=0.5)
    e.add_argument("--lengths", type=float, nargs="*")
    e.add_argument("--n", type=int, default=256, help="cells per interval")
    _kernel_args(e)
    _out(e)
    e.set_defaults(func=cmd_eigen)

    c = sub.add_parser("critical-length", help="length where the principal eigenvalue vanishes")
    c.add_argument("--variant", choices=spectral.VARIANTS, default="dirichlet")
    c.add_argument("--d", type=float, default=1.0)
    c.add_argument("--a0", type=float, default=0.5)
    c.add_argument("--n", type=int, default=256)
    _kernel_args(c)
    c.set_defaults(func=cmd_critical_length)

    s = sub.add_parser("steady", help="steady profile on an interval or the half-line")
    s.add_argument("--kind", choices=["interval", "halfline"], default="halfline")
    s.add_argument("--variant", choices=spectral.VARIANTS, default="dirichlet")
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--b", type=float, default=1.0)
    s.add_argument("--d", type=float, default=1.0)
    s.add_argument("--L", type=float, default=60.0, help="interval length or truncation")
    s.add_argument("--dx", type=float, default=1.0 / 16)
    _kernel_args(s)
    _out(s)
    s.set_defaults(func=cmd_steady)

    w = sub.add_parser("semiwave", help="semi-wave speed and profile")
    w.add_argument("--a", type=float, default=1.0)
    w.add_argument("--b", type=float, default=1.0)
    w.add_argument("--d", type=float, default=1.0)
    w.add_argument("--mu", type=float, default=1.0)
    w.add_argument("--M", type=float, default=None)
    w.add_argument("--dx", type=float, default=1.0 / 32)
    _kernel_args(w)
    _out(w)
    w.set_defaults(func=cmd_semiwave)

    for name, func, helptext in (("simulate", cmd_simulate, "integrate one configuration"),
                                 ("classify", cmd_classify, "spreading or vanishing verdict"),
                                 ("critical-mu", cmd_critical_mu, "threshold expansion rate")):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--config", type=Path, required=True)
        q.add_argument("--t-max", dest="t_max", type=float, default=None)
        _out(q)
        q.set_defaults(func=func)
        if name == "simulate":
            q.add_argument("--probe", action="store_true", help="run the dyadic acceleration test")
        if name == "critical-mu":
            q.add_argument("--rel-tol", dest="rel_tol", type=float, default=1e-3)
            q.add_argument("--rays", type=float, nargs="*", help="mu2/mu1 ratios (predator-prey)")

    sw = sub.add_parser("sweep", help="run a YAML plan of jobs concurrently")
    sw.add_argument("plan", type=Path)
    sw.add_argument("--workers", type=int, default=None)
    _out(sw)
    sw.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ModelError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

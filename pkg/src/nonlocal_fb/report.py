"""CSV, JSON and figure output for the command line tools."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({"figure.figsize": (6.0, 3.8), "axes.grid": True, "grid.alpha": 0.3,
                     "savefig.dpi": 120, "savefig.bbox": "tight"})


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_json(path, payload):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_jsonable)
    return path


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return str(v)


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def write_eigen(out, rows):
    out = Path(out)
    write_csv(out / "eigen.csv", ["l", "lambda_p", "residual", "iterations"], rows)
    arr = np.array(rows, dtype=float)
    fig, ax = plt.subplots()
    ax.plot(arr[:, 0], arr[:, 1], "o-")
    ax.axhline(0.0, color="k", lw=0.8)
    if np.all(arr[:, 0] > 0) and arr[:, 0].max() / arr[:, 0].min() > 20:
        ax.set_xscale("log")
    ax.set_xlabel("interval length l")
    ax.set_ylabel("principal eigenvalue")
    _save(fig, out / "eigen.png")


def write_profile(out, name, x, w, xlabel="x", ylabel="W"):
    out = Path(out)
    write_csv(out / f"{name}.csv", ["x", ylabel], zip(x, w))
    fig, ax = plt.subplots()
    ax.plot(x, w)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    _save(fig, out / f"{name}.png")


def write_semiwave(out, wave):
    out = Path(out)
    write_profile(out, "semiwave_profile", wave.x, wave.phi, ylabel="phi")
    write_json(out / "semiwave.json", {"c0": wave.c0, "flux_gap": wave.flux_gap,
                                       "residual": wave.residual, "plateau": wave.plateau,
                                       "M": wave.M, "dx": wave.dx, "mu": wave.mu})


def write_trajectory(out, traj, cfg=None, extra: dict | None = None):
    """series.csv, snapshots/uNNN.csv, meta.json and two figures."""
    out = Path(out)
    write_csv(out / "series.csv", traj.series_header(), traj.series_rows())
    n = traj.sup_u.shape[1]
    head = ["x", "u"] if n == 1 else ["x"] + [f"u{k + 1}" for k in range(n)]
    for i, snap in enumerate(traj.snapshots):
        x = traj.dx * np.arange(snap.u.shape[1])
        write_csv(out / "snapshots" / f"u{i:03d}.csv", head, np.column_stack([x, snap.u.T]))
    meta = {"t_final": float(traj.t[-1]), "h_final": float(traj.h[-1]), "steps": traj.steps,
            "dt": traj.dt, "dx": traj.dx, "stop_reason": traj.stop_reason, "hint": traj.hint,
            "bounds": traj.bounds, "snapshot_times": [s.t for s in traj.snapshots]}
    if cfg is not None:
        meta["model"] = {"variant": cfg.spec.variant, "d": cfg.spec.d, "mu": cfg.spec.mu,
                         "kernels": [k.family for k in cfg.spec.kernels]}
    if extra:
        meta.update(extra)
    write_json(out / "meta.json", meta)

    fig, (a1, a2) = plt.subplots(1, 2, figsize=(10, 3.8))
    a1.plot(traj.t, traj.h)
    a1.set_xlabel("t")
    a1.set_ylabel("h(t)")
    for k in range(n):
        a2.semilogy(traj.t, np.maximum(traj.sup_u[:, k], 1e-300), label=f"species {k + 1}")
    a2.set_xlabel("t")
    a2.set_ylabel("sup u")
    if n > 1:
        a2.legend()
    _save(fig, out / "front.png")

    fig, ax = plt.subplots()
    picks = np.unique(np.linspace(0, len(traj.snapshots) - 1, min(6, len(traj.snapshots))).astype(int))
    for i in picks:
        snap = traj.snapshots[i]
        x = traj.dx * np.arange(snap.u.shape[1])
        for k in range(n):
            ax.plot(x, snap.u[k], color=f"C{i % 10}", ls="-" if k == 0 else "--",
                    label=f"t={snap.t:.3g}" if k == 0 else None)
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    ax.legend(fontsize=8)
    _save(fig, out / "snapshots.png")


def write_sweep(out, rows, header):
    out = Path(out)
    write_csv(out / "report.csv", header, rows)
    return out / "report.csv"

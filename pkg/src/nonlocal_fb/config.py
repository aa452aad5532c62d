"""YAML run configurations.

A configuration is a mapping with the sections ``model``, ``initial``,
``numerics`` and optionally ``classify``, ``semiwave`` and ``eigen``::

    model:
      variant: neumann            # dirichlet | neumann | predprey
      d: 1.0                      # list of two for predprey
      mu: 1.0
      kernel: {family: laplace, scale: 1.0}   # or kernels: [..., ...]
      reaction: {type: logistic, a: 1.0, b: 1.0}
      lv: {a1: 1, b1: 1, c1: 0.2, a2: 0.5, b2: 1, c2: 0.3}   # predprey only
    initial: {preset: cosine-bump, h0: 2.0, amplitude: 1.0}
    numerics: {dx: 0.03125, t_max: 400}
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import yaml

from .model import (InitialData, ModelError, ModelSpec, make_initial, make_kernel,
                    make_reaction_logistic, predprey_model, scalar_model)
from .fbp_sim import SimConfig

CLASSIFY_DEFAULTS = {"margin": 0.05, "eps_vanish": 1e-8, "stall_window": 10.0, "eps_stall": 1e-10}
NUMERIC_KEYS = ("dx", "dt", "t_max", "x_max", "series_every", "n_snapshots")


def load(path) -> dict:
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ModelError(f"{path}: configuration must be a mapping")
    return data


def _kernel(entry: Mapping):
    entry = dict(entry)
    family = entry.pop("family")
    return make_kernel(family, entry)


def _reaction(entry: Mapping):
    kind = entry.get("type", "logistic")
    if kind != "logistic":
        raise ModelError(f"only logistic reactions can be configured from files, got {kind!r}")
    return make_reaction_logistic(entry.get("a", 1.0), entry.get("b", 1.0))


def build_model(section: Mapping) -> ModelSpec:
    variant = section.get("variant", "dirichlet")
    if variant.startswith("predprey"):
        if "kernels" in section:
            kernels = [_kernel(k) for k in section["kernels"]]
        else:
            kernels = [_kernel(section["kernel"])] * 2
        d = section.get("d", [1.0, 1.0])
        mu = section.get("mu", [1.0, 1.0])
        d = [d, d] if not isinstance(d, (list, tuple)) else d
        mu = [mu, mu] if not isinstance(mu, (list, tuple)) else mu
        lv = section["lv"]
        return predprey_model(kernels, d, mu, lv["a1"], lv["b1"], lv["c1"], lv["a2"], lv["b2"], lv["c2"])
    kernel = _kernel(section.get("kernel", {"family": "laplace"}))
    reaction = _reaction(section.get("reaction", {}))
    return scalar_model(variant, kernel, reaction, section.get("d", 1.0), section.get("mu", 1.0))


def build_initial(section: Mapping, n_species: int) -> InitialData:
    return make_initial(section.get("preset", "cosine-bump"), section.get("h0", 1.0),
                        section.get("amplitude", 1.0), n_species=n_species,
                        cap_width=section.get("cap_width"), table=section.get("table"))


def build_sim(data: Mapping, **overrides) -> SimConfig:
    spec = build_model(data.get("model", {}))
    init = build_initial(data.get("initial", {}), spec.n_species)
    numerics = {k: v for k, v in (data.get("numerics") or {}).items() if k in NUMERIC_KEYS}
    numerics.update({k: v for k, v in overrides.items() if v is not None})
    return SimConfig(spec, init, **numerics)


def classify_options(data: Mapping) -> dict:
    opts = dict(CLASSIFY_DEFAULTS)
    opts.update(data.get("classify") or {})
    return opts


def load_sim(path, **overrides) -> SimConfig:
    return build_sim(load(Path(path)), **overrides)

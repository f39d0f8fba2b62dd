"""Shared numeric configuration.

Every tolerance and budget used by the float backend lives here, so that no
call site hard-codes an epsilon.  A Config can be loaded from a JSON file
(the ``WLAB_CONFIG`` environment variable or the ``--config`` CLI flag) and
the effective values are embedded in every report.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Config:
    # float backend zero test: |value| <= eps (relative to scale where noted)
    eps: float = 1e-10
    # identification tolerance: does a located root coincide with a given point
    cluster_radius: float = 1e-8
    # merge radius when grouping np.roots output into multiple roots
    root_merge_radius: float = 1e-3
    # quadratic limit extraction (float backend)
    richardson_levels: int = 8
    richardson_agreement: float = 1e-8
    # streamline tracing
    step_budget: int = 100_000
    closure_tol: float = 1e-6
    step_max: float = 0.02
    step_frac: float = 0.1
    singularity_clearance: float = 1e-3
    # immersion quadrature
    quad_tol: float = 1e-12
    mesh_closure_tol: float = 1e-8
    dedupe_tol: float = 1e-6
    # output formatting
    sig_digits: int = 12
    svg_decimals: int = 6

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT = Config()


def load_config(path: str | None = None) -> Config:
    """Build a Config from a JSON file, falling back to defaults.

    With no explicit path, honors the WLAB_CONFIG environment variable.
    Unknown keys are rejected so typos do not silently do nothing.
    """
    if path is None:
        path = os.environ.get("WLAB_CONFIG")
    if not path:
        return DEFAULT
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError("config file must hold a JSON object")
    known = {f.name for f in dataclasses.fields(Config)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    return dataclasses.replace(DEFAULT, **raw)

"""Parameter-grid execution: chirality x spacing maps and loss curves.

Each grid cell is a pure computation (pattern -> rates -> generator ->
trajectory -> steady spread), so cells can run in parallel and the merged
result is independent of worker count and execution order.  A JSON manifest
records per-cell status, allowing an interrupted sweep to resume and finish
byte-identically to an uninterrupted run.

Nonguided loss only shifts the diagonal of the generator, so the total
population at coupling efficiency beta is exactly the beta = 1 total scaled
by e^{-gamma_ng t} and the spread series is beta-independent; all beta
values of a cell therefore reuse one trajectory.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import dynamics, observables, pattern, spectral
from .model import SystemConfig, propagator_for

#: spread samples computed per chunk when the spectral fast path extends t_end
_CHUNK_SAMPLES = 20000


class SweepError(ValueError):
    """Invalid sweep specification or manifest."""


@dataclass(frozen=True)
class SweepSpec:
    """Grid of chirality, spacing, and coupling-efficiency values to scan."""

    structure: str
    n_sites: int
    eta_values: tuple[float, ...]
    xi_values: tuple[float, ...]
    beta_values: tuple[float, ...] = (1.0,)
    pattern_params: dict = field(default_factory=dict)
    dsl: str | None = None
    initial_state: str = "both_edges"  # 'both_edges' | 'single_site'
    initial_site: int = 1
    initial_phase: float = 0.0
    t_end: float = 150.0
    dt_out: float = 0.1
    threshold: float = 0.10
    t_max: float = 1e4

    def __post_init__(self):
        for name, grid in (("eta_values", self.eta_values), ("xi_values", self.xi_values),
                           ("beta_values", self.beta_values)):
            if len(grid) == 0:
                raise SweepError(f"{name} must be non-empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise SweepError(f"{name} must be strictly increasing")
        if any(not 0.0 <= e <= 1.0 for e in self.eta_values):
            raise SweepError("eta_values must lie in [0, 1]")
        if any(not 0.0 < x <= 2 * np.pi for x in self.xi_values):
            raise SweepError("xi_values must lie in (0, 2*pi]")
        if any(not 0.0 < b <= 1.0 for b in self.beta_values):
            raise SweepError("beta_values must lie in (0, 1]")
        if self.initial_state not in ("both_edges", "single_site"):
            raise SweepError(f"unknown initial_state {self.initial_state!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise SweepError(f"unknown sweep spec keys: {sorted(unknown)}")
        for key in ("eta_values", "xi_values", "beta_values"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)

    def content_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def build_pattern(self) -> pattern.DirectionalityPattern:
        if self.dsl is not None:
            values = pattern.expand(pattern.parse_pattern(self.dsl))
            if len(values) != self.n_sites:
                raise SweepError(
                    f"DSL pattern expands to {len(values)} sites, spec says {self.n_sites}")
            return values
        return pattern.builtin_structure(self.structure, self.n_sites, **self.pattern_params)

    def build_initial(self) -> dynamics.AmplitudeState:
        if self.initial_state == "single_site":
            return dynamics.single_site(self.initial_site, self.n_sites)
        return dynamics.both_edges(self.n_sites, self.initial_phase)


@dataclass(frozen=True)
class SweepResult:
    """Per-cell records in deterministic (eta, xi, beta) grid order."""

    spec: SweepSpec
    records: tuple[dict, ...]

    def to_csv(self, stream) -> None:
        stream.write("eta,xi,beta,s_st,t_hit,capped,status\n")
        for rec in self.records:
            if rec["status"] == "ok":
                values = (f"{rec['s_st']:.12g}", f"{rec['t_hit']:.12g}",
                          "true" if rec["capped"] else "false")
            else:
                values = ("", "", "")
            stream.write(f"{rec['eta']:.12g},{rec['xi']:.12g},{rec['beta']:.12g},"
                         f"{values[0]},{values[1]},{values[2]},{rec['status']}\n")


def _series_on_grid(spec: SweepSpec, matrix, initial, t_end: float):
    """(times, total, s) on the output grid, via the cheapest valid propagator."""
    times = dynamics.output_grid(t_end, spec.dt_out)
    decomp = None
    if spec.n_sites > 1:
        try:
            decomp = spectral.decompose(matrix)
        except spectral.ConditioningError:
            decomp = None
        else:
            if decomp.conditioning > spectral.CONDITIONING_LIMIT:
                decomp = None
    if decomp is not None:
        totals, spreads = [], []
        for start in range(0, len(times), _CHUNK_SAMPLES):
            chunk = dynamics.evolve_spectral(decomp, initial, times[start:start + _CHUNK_SAMPLES])
            totals.append(chunk.total_population())
            spreads.append(observables.spread(chunk).s)
        return times, np.concatenate(totals), np.concatenate(spreads)
    traj = dynamics.evolve_ode(matrix, initial, t_end, spec.dt_out)
    return traj.times, traj.total_population(), observables.spread(traj).s


def compute_cell(spec: SweepSpec, i_eta: int, i_xi: int) -> list[dict]:
    """All beta records for one (eta, xi) grid cell."""
    eta = spec.eta_values[i_eta]
    xi = spec.xi_values[i_xi]
    base = dict(i_eta=i_eta, i_xi=i_xi, eta=eta, xi=xi)
    try:
        config = SystemConfig(n_sites=spec.n_sites, spacing=xi, chirality=eta, beta=1.0)
        matrix = propagator_for(spec.build_pattern(), config)
        initial = spec.build_initial()
        gamma_ng = [(1.0 - b) / b for b in spec.beta_values]
        t_end = min(spec.t_end, spec.t_max)
        while True:
            times, total, s = _series_on_grid(spec, matrix, initial, t_end)
            # slowest family decides whether a longer run could still cross
            pending = [g for g in gamma_ng
                       if not np.any(total * np.exp(-g * times) <= spec.threshold * total[0])]
            if not pending or t_end >= spec.t_max:
                break
            t_end = min(2 * t_end, spec.t_max)
        records = []
        for beta, g in zip(spec.beta_values, gamma_ng):
            steady = observables.steady_from_series(
                times, total * np.exp(-g * times), s, spec.threshold)
            records.append(dict(base, beta=beta, s_st=steady.s_st, t_hit=steady.t_hit,
                                capped=steady.flag == "capped", status="ok"))
        return records
    except Exception as exc:  # record, never abort the sweep
        return [dict(base, beta=beta, s_st=None, t_hit=None, capped=None,
                     status=f"failed: {exc}") for beta in spec.beta_values]


def _cell_key(i_eta: int, i_xi: int) -> str:
    return f"{i_eta},{i_xi}"


def _assemble(spec: SweepSpec, cells: dict[str, list[dict]]) -> SweepResult:
    records = []
    for i_eta in range(len(spec.eta_values)):
        for i_xi in range(len(spec.xi_values)):
            records.extend(cells[_cell_key(i_eta, i_xi)])
    return SweepResult(spec=spec, records=tuple(records))


def _write_manifest(path, spec: SweepSpec, cells: dict) -> None:
    payload = {"spec": spec.to_dict(), "spec_hash": spec.content_hash(), "cells": cells}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def _run_cells(spec: SweepSpec, cells: dict, workers: int, manifest_path) -> SweepResult:
    todo = [(i_eta, i_xi)
            for i_eta in range(len(spec.eta_values))
            for i_xi in range(len(spec.xi_values))
            if _cell_key(i_eta, i_xi) not in cells]
    if workers <= 1:
        for i_eta, i_xi in todo:
            cells[_cell_key(i_eta, i_xi)] = compute_cell(spec, i_eta, i_xi)
            if manifest_path is not None:
                _write_manifest(manifest_path, spec, cells)
    elif todo:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (i_eta, i_xi), result in zip(
                    todo, pool.map(compute_cell, [spec] * len(todo),
                                   [c[0] for c in todo], [c[1] for c in todo])):
                cells[_cell_key(i_eta, i_xi)] = result
                if manifest_path is not None:
                    _write_manifest(manifest_path, spec, cells)
    if manifest_path is not None:
        _write_manifest(manifest_path, spec, cells)
    return _assemble(spec, cells)


def run_sweep(spec: SweepSpec, workers: int = 1, manifest_path=None) -> SweepResult:
    """Compute every grid cell; identical output for any worker count."""
    return _run_cells(spec, {}, workers, manifest_path)


def resume_sweep(manifest_path, workers: int = 1, override_hash: bool = False) -> SweepResult:
    """Finish the missing cells of a previous sweep's manifest.

    Refuses when the stored hash does not match the stored spec (the
    manifest was edited) unless ``override_hash`` is set.
    """
    with open(manifest_path) as fh:
        payload = json.load(fh)
    spec = SweepSpec.from_dict(payload["spec"])
    if payload.get("spec_hash") != spec.content_hash() and not override_hash:
        raise SweepError(
            f"manifest hash {payload.get('spec_hash')} does not match its spec "
            f"({spec.content_hash()}); pass override to proceed")
    return _run_cells(spec, dict(payload.get("cells", {})), workers, manifest_path)

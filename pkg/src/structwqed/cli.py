"""Command-line entry point: simulate, spectrum, sweep, and pattern tools.

All numeric output uses 12 significant digits with '.' decimals and ','
separators, so reruns with identical configuration are byte-identical.
Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 conditioning failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dynamics, observables, pattern, spectral
from .model import ModelError, SystemConfig, propagator_for
from .pattern import PatternError
from .spectral import ConditioningError
from .sweep import SweepError, SweepSpec, resume_sweep, run_sweep

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CONDITIONING = 4


class ConfigError(ValueError):
    """Malformed run configuration file."""


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _require_keys(data: dict, allowed: set[str], context: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r} in {context}")


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}")


def _resolve_pattern(data: dict) -> pattern.DirectionalityPattern:
    spec = data.get("pattern")
    if not isinstance(spec, dict):
        raise ConfigError("config must contain a 'pattern' object")
    _require_keys(spec, {"builtin", "params", "dsl"}, "pattern")
    n_sites = data.get("n_sites")
    if "dsl" in spec:
        values = pattern.expand(pattern.parse_pattern(spec["dsl"]))
        if n_sites is not None and len(values) != n_sites:
            raise ConfigError(f"field 'n_sites': DSL pattern has {len(values)} sites, "
                              f"config says {n_sites}")
        return values
    if "builtin" not in spec:
        raise ConfigError("pattern needs either 'dsl' or 'builtin'")
    if n_sites is None:
        raise ConfigError("field 'n_sites' is required for builtin patterns")
    return pattern.builtin_structure(spec["builtin"], n_sites, **spec.get("params", {}))


_CONFIG_KEYS = {"pattern", "n_sites", "spacing", "chirality", "beta", "gamma",
                "initial_state", "t_end", "dt_out", "threshold"}


def _resolve_run(data: dict, need_initial: bool):
    _require_keys(data, _CONFIG_KEYS, "config")
    values = _resolve_pattern(data)
    try:
        config = SystemConfig(
            n_sites=len(values),
            spacing=float(data["spacing"]),
            chirality=float(data.get("chirality", 0.999)),
            beta=float(data.get("beta", 1.0)),
            gamma=float(data.get("gamma", 1.0)),
        )
    except KeyError as exc:
        raise ConfigError(f"field {exc.args[0]!r} is required")
    matrix = propagator_for(values, config)
    initial = None
    if need_initial:
        initial = _resolve_initial(data.get("initial_state", {"kind": "both_edges"}), matrix)
    return values, config, matrix, initial


def _resolve_initial(spec: dict, matrix) -> dynamics.AmplitudeState:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("field 'initial_state' must be an object with a 'kind'")
    kind = spec["kind"]
    n = matrix.n_sites
    if kind == "single_site":
        _require_keys(spec, {"kind", "site"}, "initial_state")
        return dynamics.single_site(int(spec.get("site", 1)), n)
    if kind == "both_edges":
        _require_keys(spec, {"kind", "phase"}, "initial_state")
        return dynamics.both_edges(n, float(spec.get("phase", 0.0)))
    if kind == "custom":
        _require_keys(spec, {"kind", "amplitudes"}, "initial_state")
        amps = [complex(re, im) for re, im in spec["amplitudes"]]
        if len(amps) != n:
            raise ConfigError(f"field 'initial_state.amplitudes': expected {n} entries")
        return dynamics.custom(amps)
    if kind == "mode_quench":
        _require_keys(spec, {"kind", "modes", "weights"}, "initial_state")
        decomp = spectral.decompose(matrix)
        # 1-based, matching the 'index' column of eigenvalues.csv
        indices = [int(i) - 1 for i in spec["modes"]]
        if any(i < 0 or i >= decomp.n_modes for i in indices):
            raise ConfigError(
                f"field 'initial_state.modes': indices must be in 1..{decomp.n_modes}")
        if "weights" in spec:
            weights = tuple(complex(re, im) for re, im in spec["weights"])
            selection = spectral.ModeSelection(indices=tuple(indices), weights=weights)
        else:
            selection = spectral.ModeSelection.equal_weights(indices)
        return dynamics.mode_quench(decomp, selection)
    raise ConfigError(f"field 'initial_state.kind': unknown kind {kind!r}")


def _invariant_checks(matrix, traj=None) -> dict:
    m = matrix.entries
    config = matrix.config
    n = matrix.n_sites
    loss_matrix = -(m + m.conj().T)
    min_loss_eig = float(np.linalg.eigvalsh(loss_matrix).min())
    trace_target = -n * config.total_rate / 2.0
    trace_err = float(abs(m.trace().real - trace_target) / abs(trace_target))
    checks = {
        "passivity": {"min_loss_eigenvalue": min_loss_eig,
                      "ok": bool(min_loss_eig >= -1e-10 * config.gamma)},
        "trace_identity": {"relative_error": trace_err, "ok": bool(trace_err <= 1e-10)},
    }
    if traj is not None:
        total = traj.total_population()
        max_increase = float(np.diff(total).max()) if len(total) > 1 else 0.0
        checks["norm_monotonicity"] = {"max_step_increase": max_increase,
                                       "ok": bool(max_increase <= 1e-9)}
    return checks


def _write_meta(out_dir: Path, data: dict, checks: dict) -> None:
    with open(out_dir / "meta.json", "w") as fh:
        json.dump({"config": data, "checks": checks}, fh, indent=1, sort_keys=True)
        fh.write("\n")


def cmd_simulate(args) -> int:
    data = _load_config(args.config)
    _, config, matrix, initial = _resolve_run(data, need_initial=True)
    t_end = float(data.get("t_end", 150.0))
    dt_out = float(data.get("dt_out", 0.1))
    try:
        traj = dynamics.evolve_ode(matrix, initial, t_end, dt_out)
    except dynamics.EvolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    populations = traj.populations()
    with open(out_dir / "trajectory.csv", "w") as fh:
        fh.write("t," + ",".join(f"n_{j + 1}" for j in range(matrix.n_sites)) + "\n")
        for i, t in enumerate(traj.times):
            fh.write(_fmt(t) + "," + ",".join(_fmt(v) for v in populations[i]) + "\n")
    if matrix.n_sites == 1:
        nan = np.full(len(traj.times), np.nan)
        series = observables.SpreadSeries(times=traj.times, x_cm=nan, s=nan,
                                          valid=np.zeros(len(traj.times), bool))
    else:
        series = observables.spread(traj)
    total = traj.total_population()
    ratio = observables.subradiance_ratio(traj, config.gamma)
    with open(out_dir / "observables.csv", "w") as fh:
        fh.write("t,P_tot,x_cm,s,subradiance_ratio\n")
        for i, t in enumerate(traj.times):
            fh.write(",".join(_fmt(v) for v in
                              (t, total[i], series.x_cm[i], series.s[i], ratio[i])) + "\n")
    _write_meta(out_dir, data, _invariant_checks(matrix, traj))
    return 0


def cmd_spectrum(args) -> int:
    data = _load_config(args.config)
    _, config, matrix, _ = _resolve_run(data, need_initial=False)
    if config.chirality >= 1.0:
        print("warning: chirality = 1 sits at an exceptional point; "
              "the decomposition is likely ill-conditioned", file=sys.stderr)
    decomp = spectral.decompose(matrix)
    if decomp.conditioning > spectral.CONDITIONING_LIMIT:
        print(f"error: biorthogonality residual {decomp.conditioning:.3e} exceeds "
              f"{spectral.CONDITIONING_LIMIT:.0e}", file=sys.stderr)
        return EXIT_CONDITIONING
    labels = spectral.classify_modes(decomp, gamma=config.gamma)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "eigenvalues.csv", "w") as fh:
        fh.write("index,omega,gamma_n,rate_class,edge\n")
        for i in range(decomp.n_modes):
            fh.write(f"{i + 1},{_fmt(decomp.frequencies[i])},{_fmt(decomp.decay_rates[i])},"
                     f"{labels[i].rate_class},{'true' if labels[i].edge else 'false'}\n")
    with open(out_dir / "modes.csv", "w") as fh:
        fh.write("mode," + ",".join(f"p_{j + 1}" for j in range(matrix.n_sites)) + "\n")
        for i in range(decomp.n_modes):
            fh.write(f"{i + 1}," + ",".join(_fmt(v) for v in decomp.mode_profile(i)) + "\n")
    checks = _invariant_checks(matrix)
    checks["conditioning"] = {"residual": decomp.conditioning,
                              "ok": bool(decomp.conditioning <= spectral.CONDITIONING_LIMIT)}
    _write_meta(out_dir, data, checks)
    return 0


def cmd_sweep(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.json"
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("STRUCTWQED_WORKERS", "1"))
    if args.resume:
        result = resume_sweep(manifest_path, workers=workers, override_hash=args.override_hash)
    else:
        spec = SweepSpec.from_dict(_load_config(args.spec))
        result = run_sweep(spec, workers=workers, manifest_path=manifest_path)
    with open(out_dir / "sweep.csv", "w") as fh:
        result.to_csv(fh)
    return 0


def cmd_pattern(args) -> int:
    if args.dsl is not None:
        values = pattern.expand(pattern.parse_pattern(args.dsl))
    elif args.builtin is not None:
        if args.n is None:
            raise ConfigError("--builtin requires --n")
        params = {}
        if args.center_width is not None:
            params["center_width"] = args.center_width
        if args.o_left is not None:
            params["o_left"] = args.o_left
        values = pattern.builtin_structure(args.builtin, args.n, **params)
    else:
        raise ConfigError("pattern needs --dsl or --builtin")
    for j, v in enumerate(values.values):
        print(f"{j + 1},{_fmt(v)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="structwqed",
        description="Excitation transport in emitter arrays with per-site "
                    "waveguide coupling directionality")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="time-evolve a configuration and write CSVs")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="eigen-analysis of a configuration")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sweep", help="run or resume a parameter sweep")
    p.add_argument("--spec", help="JSON sweep specification")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None,
                   help="parallel workers (default: STRUCTWQED_WORKERS or 1)")
    p.add_argument("--resume", action="store_true", help="resume from manifest.json in --out")
    p.add_argument("--override-hash", action="store_true",
                   help="resume even if the manifest hash does not match")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("pattern", help="expand a pattern to site values")
    p.add_argument("--dsl", help="pattern text, e.g. '(R L)*27'")
    p.add_argument("--builtin", help="structure name: S1, S2, S3, or S4")
    p.add_argument("--n", type=int, help="number of sites for --builtin")
    p.add_argument("--center-width", type=int, help="S1 reciprocal center width")
    p.add_argument("--o-left", type=int, help="S2 left-half reciprocal site (1-based)")
    p.set_defaults(func=cmd_pattern)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "sweep" and not args.resume and args.spec is None:
        print("error: sweep requires --spec (or --resume)", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, PatternError, ModelError, SweepError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConditioningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONDITIONING
    except dynamics.EvolutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

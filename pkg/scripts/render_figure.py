#!/usr/bin/env python3
"""Render publication-style figures from simulator CSV outputs.

Four figure kinds, one per CSV contract:

  spacetime   site-population heatmap from trajectory.csv
  decay       log-scale total population from observables.csv, with the
              free-space e^{-t} reference dashed; extra curves via --overlay
  modes       site-profile bars from modes.csv (optionally annotated from
              eigenvalues.csv)
  spread_map  steady-spread heatmap over the (spacing, chirality) grid
              from sweep.csv

The script only reads the documented CSV columns and never recomputes
physics.  Missing columns exit nonzero naming the column.
"""

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

CMAP = "viridis"


class ColumnError(RuntimeError):
    """A required CSV column is absent."""


def read_csv(path, required):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ColumnError(f"missing column '{required[0]}' in {path} (empty file)")
    header = rows[0]
    for name in required:
        if name not in header:
            raise ColumnError(f"missing column '{name}' in {path}")
    return header, rows[1:]


def column(header, rows, name, cast=float):
    j = header.index(name)
    return np.array([cast(row[j]) if row[j] != "" else np.nan for row in rows])


def site_columns(header, prefix):
    names = [name for name in header if name.startswith(prefix)]
    return sorted(names, key=lambda name: int(name[len(prefix):]))


def figure_spacetime(path, t_max=None):
    header, rows = read_csv(path, ["t", "n_1"])
    names = site_columns(header, "n_")
    t = column(header, rows, "t")
    pops = np.column_stack([column(header, rows, name) for name in names])
    if t_max is not None:
        keep = t <= t_max
        t, pops = t[keep], pops[keep]

    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    mesh = ax.pcolormesh(t, np.arange(1, len(names) + 1), pops.T,
                         cmap=CMAP, shading="nearest", rasterized=True)
    fig.colorbar(mesh, ax=ax, label=r"$|a_j|^2$")
    ax.set_xlabel(r"$\gamma t$")
    ax.set_ylabel("site $j$")
    return fig


def figure_decay(path, overlays=(), t_max=None):
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    for curve in (path, *overlays):
        header, rows = read_csv(curve, ["t", "P_tot"])
        t = column(header, rows, "t")
        total = column(header, rows, "P_tot")
        if t_max is not None:
            keep = t <= t_max
            t, total = t[keep], total[keep]
        ax.semilogy(t, total, label=curve)
    ax.semilogy(t, np.exp(-t), "k--", label=r"$e^{-\gamma t}$")
    ax.set_xlabel(r"$\gamma t$")
    ax.set_ylabel(r"$P_{\mathrm{tot}}$")
    ax.legend(fontsize=7)
    return fig


def figure_modes(path, eigenvalues=None, mode_indices=(1,)):
    header, rows = read_csv(path, ["mode", "p_1"])
    names = site_columns(header, "p_")
    sites = np.arange(1, len(names) + 1)
    labels = {}
    if eigenvalues is not None:
        eheader, erows = read_csv(eigenvalues, ["index", "omega", "gamma_n"])
        for row in erows:
            idx = int(row[eheader.index("index")])
            labels[idx] = (r"$\omega=%.3f$, $\gamma_n=%.3g$"
                           % (float(row[eheader.index("omega")]),
                              float(row[eheader.index("gamma_n")])))

    fig, axes = plt.subplots(len(mode_indices), 1, sharex=True,
                             figsize=(5.0, 1.8 * len(mode_indices)), squeeze=False)
    by_mode = {int(row[header.index("mode")]): row for row in rows}
    for ax, idx in zip(axes[:, 0], mode_indices):
        if idx not in by_mode:
            raise ColumnError(f"missing column 'mode={idx}' in {path}")
        row = by_mode[idx]
        profile = [float(row[header.index(name)]) for name in names]
        ax.bar(sites, profile, width=0.8, color="tab:blue")
        title = f"mode {idx}"
        if idx in labels:
            title += "  " + labels[idx]
        ax.set_title(title, fontsize=8)
        ax.set_ylabel(r"$|\varphi_j|^2$")
    axes[-1, 0].set_xlabel("site $j$")
    fig.tight_layout()
    return fig


def figure_spread_map(path, beta=None, vmin=0.0, vmax=1.0):
    header, rows = read_csv(path, ["eta", "xi", "beta", "s_st"])
    betas = column(header, rows, "beta")
    if beta is None:
        beta = betas[0]
    keep = np.isclose(betas, beta)
    eta = column(header, rows, "eta")[keep]
    xi = column(header, rows, "xi")[keep]
    s_st = column(header, rows, "s_st")[keep]

    eta_axis = np.unique(eta)
    xi_axis = np.unique(xi)
    grid = np.full((len(eta_axis), len(xi_axis)), np.nan)
    for e, x, s in zip(eta, xi, s_st):
        grid[np.searchsorted(eta_axis, e), np.searchsorted(xi_axis, x)] = s

    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    mesh = ax.pcolormesh(xi_axis, eta_axis, grid, cmap=CMAP,
                         vmin=vmin, vmax=vmax, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=r"$s_{\mathrm{st}}$")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$\eta$")
    return fig


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kind", required=True,
                        choices=["spacetime", "decay", "modes", "spread_map"])
    parser.add_argument("--input", required=True, help="primary CSV file")
    parser.add_argument("--out", required=True, help="output image (png/svg)")
    parser.add_argument("--overlay", action="append", default=[],
                        help="extra observables.csv for decay families")
    parser.add_argument("--eigenvalues", help="eigenvalues.csv for mode annotations")
    parser.add_argument("--mode", action="append", type=int,
                        help="1-based mode index for --kind modes (repeatable)")
    parser.add_argument("--beta", type=float, help="beta slice for spread_map")
    parser.add_argument("--t-max", type=float, help="truncate the time axis")
    parser.add_argument("--vmin", type=float, default=0.0)
    parser.add_argument("--vmax", type=float, default=1.0)
    args = parser.parse_args(argv)

    try:
        if args.kind == "spacetime":
            fig = figure_spacetime(args.input, t_max=args.t_max)
        elif args.kind == "decay":
            fig = figure_decay(args.input, overlays=args.overlay, t_max=args.t_max)
        elif args.kind == "modes":
            fig = figure_modes(args.input, eigenvalues=args.eigenvalues,
                               mode_indices=tuple(args.mode or (1,)))
        else:
            fig = figure_spread_map(args.input, beta=args.beta,
                                    vmin=args.vmin, vmax=args.vmax)
    except (ColumnError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fig.savefig(args.out, dpi=150)
    plt.close(fig)
    return 0


if __name__ == "__main__":
    sys.exit(main())

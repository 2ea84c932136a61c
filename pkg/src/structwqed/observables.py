"""Populations, spreading statistics, and decay diagnostics of trajectories.

Site positions are mapped to x_j = 2(j-1)/(N-1) - 1 in [-1, 1]; the spread
s(t) is the standard deviation of the population distribution on that axis,
so s = 0 is a point distribution and s = 1 an equal split over the two
boundary sites.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory

#: total population below which normalized statistics are meaningless
POPULATION_FLOOR = 1e-14


@dataclass(frozen=True)
class PopulationSeries:
    """Per-site populations and their total along a trajectory."""

    times: np.ndarray
    site_populations: np.ndarray
    total: np.ndarray


@dataclass(frozen=True)
class SpreadSeries:
    """Center of mass and spread of the normalized population.

    ``valid`` flags samples where the total population is still above the
    floor; x_cm and s are NaN on invalid samples.
    """

    times: np.ndarray
    x_cm: np.ndarray
    s: np.ndarray
    valid: np.ndarray


@dataclass(frozen=True)
class SteadySpread:
    """Spread at the instant the total population crosses the threshold."""

    s_st: float
    t_hit: float
    flag: str  # 'hit' | 'capped'


def population_series(traj: Trajectory) -> PopulationSeries:
    populations = traj.populations()
    return PopulationSeries(
        times=traj.times, site_populations=populations, total=populations.sum(axis=1))


def site_positions(n_sites: int) -> np.ndarray:
    """Uniform positions on [-1, 1], boundaries included."""
    if n_sites < 2:
        raise ValueError("positions need at least two sites")
    return 2.0 * np.arange(n_sites) / (n_sites - 1) - 1.0


def spread(traj: Trajectory) -> SpreadSeries:
    """Center of mass and population spread at every sample."""
    populations = traj.populations()
    total = populations.sum(axis=1)
    x = site_positions(traj.n_sites)
    valid = total > POPULATION_FLOOR
    x_cm = np.full(len(total), np.nan)
    s = np.full(len(total), np.nan)
    p = populations[valid] / total[valid, None]
    x_cm[valid] = p @ x
    variance = ((x[None, :] - x_cm[valid, None]) ** 2 * p).sum(axis=1)
    s[valid] = np.sqrt(np.maximum(variance, 0.0))
    return SpreadSeries(times=traj.times, x_cm=x_cm, s=s, valid=valid)


def steady_from_series(times: np.ndarray, total: np.ndarray, s: np.ndarray,
                       threshold: float = 0.10) -> SteadySpread:
    """Steady spread from precomputed total-population and spread series.

    The crossing time is linearly interpolated between samples; if the
    series never reaches threshold * total[0] the last sample is returned
    with flag 'capped'.
    """
    target = threshold * total[0]
    below = np.where(total <= target)[0]
    if len(below) == 0:
        return SteadySpread(s_st=float(s[-1]), t_hit=float(times[-1]), flag="capped")
    i = below[0]
    if i == 0:
        return SteadySpread(s_st=float(s[0]), t_hit=float(times[0]), flag="hit")
    frac = (total[i - 1] - target) / (total[i - 1] - total[i])
    t_hit = times[i - 1] + frac * (times[i] - times[i - 1])
    s_st = s[i - 1] + frac * (s[i] - s[i - 1])
    return SteadySpread(s_st=float(s_st), t_hit=float(t_hit), flag="hit")


def steady_spread(traj: Trajectory, threshold: float = 0.10) -> SteadySpread:
    """Spread when the total population first falls to threshold * P(0).

    For a single emitter the crossing time is still defined but the spread
    itself is not; s_st comes back NaN.
    """
    if traj.n_sites == 1:
        s = np.full(len(traj.times), np.nan)
    else:
        s = spread(traj).s
    return steady_from_series(traj.times, traj.total_population(), s, threshold)


def subradiance_ratio(traj: Trajectory, gamma: float = 1.0) -> np.ndarray:
    """P_tot(t) e^{+gamma t}: > 1 means slower than free-space decay."""
    return traj.total_population() * np.exp(gamma * traj.times)

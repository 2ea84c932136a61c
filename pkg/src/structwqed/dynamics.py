"""Time evolution of single-excitation amplitudes.

Two propagators are provided: an adaptive Runge-Kutta integration of
da/dt = M a (works everywhere, including the fully chiral limit where the
generator is not diagonalizable) and a closed-form spectral expansion
a(t) = sum_n alpha_n e^{-i lambda_n t} phi_n^R, available whenever the
biorthogonal decomposition is well conditioned.  The four-atom alternating
array has an exact solution used as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .model import PropagatorMatrix
from .spectral import (CONDITIONING_LIMIT, ConditioningError, ModeSelection,
                       SpectralDecomposition, overlaps)

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12


class EvolutionError(RuntimeError):
    """Integrator failure (step-size underflow or non-finite values)."""


@dataclass(frozen=True)
class AmplitudeState:
    """Complex site amplitudes at one instant."""

    amplitudes: np.ndarray
    time: float = 0.0

    @property
    def n_sites(self) -> int:
        return len(self.amplitudes)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class Trajectory:
    """Amplitudes sampled on a uniform time grid (one row per sample)."""

    times: np.ndarray
    amplitudes: np.ndarray

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[1]

    def populations(self) -> np.ndarray:
        """Per-site populations |a_j(t)|^2, same shape as amplitudes."""
        return np.abs(self.amplitudes) ** 2

    def total_population(self) -> np.ndarray:
        return self.populations().sum(axis=1)


def _normalized(amplitudes: np.ndarray) -> AmplitudeState:
    norm = np.linalg.norm(amplitudes)
    if norm == 0:
        raise ValueError("initial amplitudes must not be the zero vector")
    return AmplitudeState(amplitudes=amplitudes / norm)


def single_site(site: int, n_sites: int) -> AmplitudeState:
    """Excitation localized on one site (1-based index)."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} out of range 1..{n_sites}")
    a = np.zeros(n_sites, dtype=complex)
    a[site - 1] = 1.0
    return AmplitudeState(amplitudes=a)


def both_edges(n_sites: int, relative_phase: float = 0.0) -> AmplitudeState:
    """Equal superposition of the two boundary sites, (|1> + e^{i phi}|N>)/sqrt(2)."""
    if n_sites < 2:
        raise ValueError("both_edges needs at least two sites")
    a = np.zeros(n_sites, dtype=complex)
    a[0] = 1.0
    a[-1] = np.exp(1j * relative_phase)
    return _normalized(a)


def custom(amplitudes) -> AmplitudeState:
    """Arbitrary amplitudes, normalized to unit norm."""
    return _normalized(np.asarray(amplitudes, dtype=complex))


def mode_quench(decomp: SpectralDecomposition, selection: ModeSelection) -> AmplitudeState:
    """Superposition of right eigenmodes, normalized to unit norm."""
    a = np.zeros(decomp.n_modes, dtype=complex)
    for index, weight in zip(selection.indices, selection.weights):
        a += weight * decomp.right_vectors[:, index]
    return _normalized(a)


def output_grid(t_end: float, dt_out: float) -> np.ndarray:
    """Uniform sample times 0, dt_out, ..., t_end (t_end included)."""
    if t_end <= 0 or dt_out <= 0:
        raise ValueError("t_end and dt_out must be positive")
    n_steps = int(round(t_end / dt_out))
    ts = np.arange(n_steps + 1) * dt_out
    if ts[-1] < t_end - 1e-12 * t_end:
        ts = np.append(ts, t_end)
    return ts


def evolve_ode(
    matrix: PropagatorMatrix,
    initial: AmplitudeState,
    t_end: float,
    dt_out: float = 0.1,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> Trajectory:
    """Integrate da/dt = M a with an adaptive RK 5(4) pair."""
    m = matrix.entries
    if initial.n_sites != matrix.n_sites:
        raise ValueError(
            f"initial state has {initial.n_sites} sites, matrix {matrix.n_sites}")
    ts = output_grid(t_end, dt_out)
    sol = solve_ivp(
        lambda t, y: m @ y, (0.0, float(t_end)), initial.amplitudes.astype(complex),
        t_eval=ts, method="RK45", rtol=rtol, atol=atol)
    if not sol.success:
        raise EvolutionError(f"integration failed at t={sol.t[-1] if len(sol.t) else 0.0}: {sol.message}")
    amplitudes = sol.y.T
    if not np.all(np.isfinite(amplitudes)):
        raise EvolutionError("integration produced non-finite amplitudes")
    return Trajectory(times=sol.t, amplitudes=amplitudes)


def evolve_spectral(
    decomp: SpectralDecomposition,
    initial: AmplitudeState,
    times,
) -> Trajectory:
    """Evaluate the eigenmode expansion at arbitrary times.

    Refuses (ConditioningError) when the biorthogonality residual exceeds
    the conditioning gate, since the expansion coefficients are then
    unreliable.
    """
    if decomp.conditioning > CONDITIONING_LIMIT:
        raise ConditioningError(decomp.conditioning)
    times = np.asarray(times, dtype=float)
    alpha = overlaps(decomp, initial.amplitudes)
    phases = np.exp(-1j * np.outer(times, decomp.eigenvalues))  # (n_t, n_modes)
    amplitudes = (phases * alpha[None, :]) @ decomp.right_vectors.T
    return Trajectory(times=times, amplitudes=amplitudes)


def analytic_s3_four_atom(a0, xi: float, gamma: float, t: float) -> np.ndarray:
    """Exact amplitudes for the 4-atom alternating array at full chirality.

    Sites 1 and 4 decay freely; sites 3 and 2 are driven by sites 1 and 4
    respectively, acquiring a linear-in-t secular term.
    """
    a0 = np.asarray(a0, dtype=complex)
    if a0.shape != (4,):
        raise ValueError("analytic solution is defined for exactly 4 amplitudes")
    envelope = np.exp(-gamma * t / 2.0)
    drive = gamma * t * np.exp(-2j * xi)
    return np.array([
        a0[0],
        a0[1] - drive * a0[3],
        a0[2] - drive * a0[0],
        a0[3],
    ]) * envelope

"""Physical configuration, directional decay rates, and the dynamics generator.

The single-excitation amplitudes obey ``da/dt = M a`` with a dense complex
matrix ``M``.  Site mu couples to site nu < mu through the right-propagating
rates and to nu > mu through the left-propagating rates, with a propagation
phase set by the dimensionless spacing xi (atom positions are uniform).
All rates are in units of the total guided rate gamma and times in 1/gamma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pattern import DirectionalityPattern


class ModelError(ValueError):
    """Inconsistent physical configuration."""


@dataclass(frozen=True)
class SystemConfig:
    """Array size and global physical parameters.

    chirality scales every site's directionality (D -> eta*D); beta is the
    fraction of emission entering the guided modes, so beta < 1 adds a
    uniform nonguided decay gamma*(1-beta)/beta on top of the guided rate.
    """

    n_sites: int
    spacing: float
    chirality: float = 0.999
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.n_sites < 1:
            raise ModelError(f"n_sites must be >= 1 (got {self.n_sites})")
        if not self.spacing > 0:
            raise ModelError(f"spacing must be > 0 (got {self.spacing})")
        if not 0.0 <= self.chirality <= 1.0:
            raise ModelError(f"chirality must be in [0, 1] (got {self.chirality})")
        if not 0.0 < self.beta <= 1.0:
            raise ModelError(f"beta must be in (0, 1] (got {self.beta})")
        if not self.gamma > 0:
            raise ModelError(f"gamma must be > 0 (got {self.gamma})")

    @property
    def gamma_nonguided(self) -> float:
        """Extra decay rate into nonguided modes, gamma*(1-beta)/beta."""
        return self.gamma * (1.0 - self.beta) / self.beta

    @property
    def total_rate(self) -> float:
        """Guided plus nonguided single-atom decay rate."""
        return self.gamma + self.gamma_nonguided


@dataclass(frozen=True)
class DirectionalRates:
    """Per-site decay rates into right- and left-propagating modes."""

    gamma_right: np.ndarray
    gamma_left: np.ndarray

    def __len__(self) -> int:
        return len(self.gamma_right)


@dataclass(frozen=True)
class PropagatorMatrix:
    """Dense generator M of da/dt = M a; the effective Hamiltonian is i*M."""

    entries: np.ndarray
    config: SystemConfig

    @property
    def n_sites(self) -> int:
        return self.entries.shape[0]


def directional_rates(pattern: DirectionalityPattern, config: SystemConfig) -> DirectionalRates:
    """Split the total guided rate per the (chirality-scaled) pattern.

    gamma_R = gamma*(1 + eta*D)/2 and gamma_L = gamma*(1 - eta*D)/2, so the
    guided total gamma_R + gamma_L = gamma at every site.
    """
    if len(pattern) != config.n_sites:
        raise ModelError(
            f"pattern length {len(pattern)} does not match n_sites {config.n_sites}")
    d = config.chirality * pattern.as_array()
    gamma_right = config.gamma * (1.0 + d) / 2.0
    gamma_left = config.gamma * (1.0 - d) / 2.0
    return DirectionalRates(gamma_right=gamma_right, gamma_left=gamma_left)


def build_propagator(rates: DirectionalRates, config: SystemConfig) -> PropagatorMatrix:
    """Assemble the dense complex generator M.

    Diagonal: -(gamma + gamma_ng)/2.  Below the diagonal (nu < mu):
    -sqrt(gamma_R_mu gamma_R_nu) e^{-i xi (mu-nu)}; above (nu > mu):
    -sqrt(gamma_L_mu gamma_L_nu) e^{-i xi (nu-mu)}.
    """
    n = len(rates)
    if n != config.n_sites:
        raise ModelError(f"rates length {n} does not match n_sites {config.n_sites}")
    idx = np.arange(n)
    sep = idx[None, :] - idx[:, None]  # nu - mu
    phase = np.exp(-1j * config.spacing * np.abs(sep))
    left = np.sqrt(np.outer(rates.gamma_left, rates.gamma_left))
    right = np.sqrt(np.outer(rates.gamma_right, rates.gamma_right))
    m = np.where(sep > 0, -left * phase, 0.0) + np.where(sep < 0, -right * phase, 0.0)
    np.fill_diagonal(m, -config.total_rate / 2.0)
    return PropagatorMatrix(entries=m, config=config)


def propagator_for(pattern: DirectionalityPattern, config: SystemConfig) -> PropagatorMatrix:
    """Convenience: pattern plus config straight to the generator."""
    return build_propagator(directional_rates(pattern, config), config)

"""Biorthogonal eigen-analysis of the non-Hermitian generator.

The effective Hamiltonian H = i*M has complex eigenvalues
lambda_n = omega_n - i*gamma_n: omega_n is a collective frequency shift and
gamma_n >= 0 a collective decay rate.  Right and left eigenvectors come
from one dense nonsymmetric eigensolve and are rescaled into a
biorthonormal pair; the residual of that pairing doubles as the
conditioning gate, since left and right vectors of a mode become
orthogonal at an exceptional point.  Modes are sorted most subradiant
first (ascending gamma_n, ties by ascending omega_n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import PropagatorMatrix

#: biorthogonality residual above which a decomposition is considered unusable
CONDITIONING_LIMIT = 1e-6

#: decimals used to group near-degenerate decay rates before the omega tie-break
_SORT_DECIMALS = 9


class ConditioningError(RuntimeError):
    """Decomposition too close to an exceptional point to be trusted."""

    def __init__(self, residual: float):
        super().__init__(
            f"biorthogonality residual {residual:.3e} exceeds {CONDITIONING_LIMIT:.0e}; "
            "the generator is too close to an exceptional point (use the ODE propagator)")
        self.residual = residual


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues with biorthogonal right/left eigenvector pairs.

    ``right_vectors`` and ``left_vectors`` hold one mode per column, in the
    same order as ``eigenvalues``; ``conditioning`` is the max deviation of
    <left_m|right_n> from the identity.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    conditioning: float

    @property
    def n_modes(self) -> int:
        return len(self.eigenvalues)

    @property
    def frequencies(self) -> np.ndarray:
        """Collective frequency shifts omega_n."""
        return self.eigenvalues.real

    @property
    def decay_rates(self) -> np.ndarray:
        """Collective decay rates gamma_n."""
        return -self.eigenvalues.imag

    def mode_profile(self, index: int) -> np.ndarray:
        """Site populations |phi_n|^2 of a right eigenvector, normalized to 1."""
        profile = np.abs(self.right_vectors[:, index]) ** 2
        return profile / profile.sum()


@dataclass(frozen=True)
class ModeSelection:
    """Distinct mode indices with complex superposition weights."""

    indices: tuple[int, ...]
    weights: tuple[complex, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights must have equal length")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("mode indices must be distinct")

    @classmethod
    def equal_weights(cls, indices) -> "ModeSelection":
        indices = tuple(indices)
        w = 1.0 / np.sqrt(len(indices))
        return cls(indices=indices, weights=(complex(w),) * len(indices))


def decompose(matrix: PropagatorMatrix, require_conditioning: bool = False) -> SpectralDecomposition:
    """Full biorthogonal decomposition of H = i*M.

    With ``require_conditioning`` a residual above CONDITIONING_LIMIT raises
    ConditioningError; by default the residual is only recorded so callers
    can apply their own gate.
    """
    h = 1j * matrix.entries
    eigvals, left, right = scipy.linalg.eig(h, left=True, right=True)
    decay = -eigvals.imag
    order = np.lexsort((eigvals.real, np.round(decay, _SORT_DECIMALS)))
    eigvals = eigvals[order]
    right = right[:, order]
    left = left[:, order]
    # biorthonormalize: scale each left vector so <L_n|R_n> = 1; a vanishing
    # raw pairing <l_n|r_n> means left and right vectors are (numerically)
    # orthogonal, the signature of an exceptional point
    pairing = np.einsum("ij,ij->j", left.conj(), right)
    n = len(eigvals)
    if np.any(np.abs(pairing) < 1e3 * np.finfo(float).eps):
        residual = float("inf")
    else:
        left = left / pairing.conj()[None, :]
        residual = float(np.abs(left.conj().T @ right - np.eye(n)).max())
    if residual > CONDITIONING_LIMIT and (require_conditioning or not np.isfinite(residual)):
        raise ConditioningError(residual)
    return SpectralDecomposition(
        eigenvalues=eigvals, right_vectors=right, left_vectors=left, conditioning=residual)


def overlaps(decomp: SpectralDecomposition, amplitudes: np.ndarray) -> np.ndarray:
    """Mode coefficients alpha_n = <left_n|amplitudes>."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    if amplitudes.shape != (decomp.n_modes,):
        raise ValueError(
            f"amplitude vector of length {amplitudes.shape} does not match {decomp.n_modes} modes")
    return decomp.left_vectors.conj().T @ amplitudes


@dataclass(frozen=True)
class ModeLabel:
    """Decay-rate class plus an orthogonal edge-localization flag."""

    rate_class: str  # 'dark' | 'subradiant' | 'radiant'
    edge: bool


def classify_modes(
    decomp: SpectralDecomposition,
    gamma: float = 1.0,
    dark_threshold: float = 1e-6,
    subradiant_threshold: float = 0.5,
    edge_fraction: float = 0.6,
    edge_width: int = 3,
) -> list[ModeLabel]:
    """Label every mode by decay rate and boundary localization.

    dark: gamma_n < dark_threshold*gamma; subradiant: gamma_n < gamma/2;
    radiant otherwise.  A mode is additionally 'edge' when at least
    ``edge_fraction`` of its population sits within ``edge_width`` sites of
    either boundary.
    """
    labels = []
    for n in range(decomp.n_modes):
        g = decomp.decay_rates[n]
        if g < dark_threshold * gamma:
            rate_class = "dark"
        elif g < subradiant_threshold * gamma:
            rate_class = "subradiant"
        else:
            rate_class = "radiant"
        profile = decomp.mode_profile(n)
        boundary_mass = profile[:edge_width].sum() + profile[-edge_width:].sum()
        if decomp.n_modes <= 2 * edge_width:
            boundary_mass = 1.0  # whole array is boundary
        labels.append(ModeLabel(rate_class=rate_class, edge=boundary_mass >= edge_fraction))
    return labels


def beat_frequencies(decomp: SpectralDecomposition, selection: ModeSelection) -> np.ndarray:
    """All pairwise |omega_m - omega_n| among the selected modes, ascending."""
    if len(selection.indices) < 2:
        raise ValueError("beat frequencies need at least two modes")
    omega = decomp.frequencies[list(selection.indices)]
    beats = [abs(omega[i] - omega[j])
             for i in range(len(omega)) for j in range(i + 1, len(omega))]
    return np.sort(np.asarray(beats))

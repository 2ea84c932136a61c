"""Shared fixtures: the four reference structures at N = 54, xi = pi/2."""

import numpy as np
import pytest

import structwqed as sw

N_REF = 54
XI_REF = np.pi / 2
ETA_SPECTRAL = 0.999


def reference_pattern(name):
    params = {"S1": {"center_width": 10}, "S2": {"o_left": 11}}.get(name, {})
    return sw.builtin_structure(name, N_REF, **params)


def reference_matrix(name, eta, xi=XI_REF, beta=1.0):
    config = sw.SystemConfig(n_sites=N_REF, spacing=xi, chirality=eta, beta=beta)
    return sw.propagator_for(reference_pattern(name), config)


@pytest.fixture(scope="session")
def edge_quench_trajectories():
    """Both-edges evolution of S1-S4 at full chirality, gamma*t up to 150."""
    initial = sw.both_edges(N_REF)
    runs = {}
    for name in ("S1", "S2", "S3", "S4"):
        matrix = reference_matrix(name, eta=1.0)
        runs[name] = sw.evolve_ode(matrix, initial, t_end=150.0, dt_out=0.1)
    return runs


@pytest.fixture(scope="session")
def s1_decomp():
    return sw.decompose(reference_matrix("S1", eta=ETA_SPECTRAL))


@pytest.fixture(scope="session")
def s2_decomp():
    return sw.decompose(reference_matrix("S2", eta=ETA_SPECTRAL))


@pytest.fixture(scope="session")
def s4_decomp():
    return sw.decompose(reference_matrix("S4", eta=ETA_SPECTRAL))

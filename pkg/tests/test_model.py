"""Directional rates and generator construction."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import structwqed as sw
from structwqed.model import ModelError


def make_config(n, xi=np.pi / 2, eta=1.0, beta=1.0):
    return sw.SystemConfig(n_sites=n, spacing=xi, chirality=eta, beta=beta)


class TestSystemConfig:
    @pytest.mark.parametrize("kwargs", [
        {"n_sites": 0, "spacing": 1.0},
        {"n_sites": 2, "spacing": 0.0},
        {"n_sites": 2, "spacing": 1.0, "chirality": 1.5},
        {"n_sites": 2, "spacing": 1.0, "beta": 0.0},
        {"n_sites": 2, "spacing": 1.0, "gamma": -1.0},
    ])
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(ModelError):
            sw.SystemConfig(**kwargs)

    def test_nonguided_rate(self):
        config = make_config(2, beta=0.5)
        assert config.gamma_nonguided == pytest.approx(1.0)
        assert make_config(2, beta=1.0).gamma_nonguided == 0.0


class TestDirectionalRates:
    def test_fully_cascaded_site(self):
        p = sw.DirectionalityPattern((1.0,))
        rates = sw.directional_rates(p, make_config(1, eta=1.0))
        assert rates.gamma_right[0] == pytest.approx(1.0)
        assert rates.gamma_left[0] == pytest.approx(0.0)

    def test_reciprocal_site(self):
        p = sw.DirectionalityPattern((0.0,))
        rates = sw.directional_rates(p, make_config(1, eta=0.7))
        assert rates.gamma_right[0] == pytest.approx(0.5)
        assert rates.gamma_left[0] == pytest.approx(0.5)

    def test_near_cascaded(self):
        p = sw.DirectionalityPattern((1.0,))
        rates = sw.directional_rates(p, make_config(1, eta=0.999))
        assert rates.gamma_right[0] == pytest.approx(0.9995)
        assert rates.gamma_left[0] == pytest.approx(0.0005)

    def test_length_mismatch(self):
        p = sw.DirectionalityPattern((1.0, 0.0))
        with pytest.raises(ModelError):
            sw.directional_rates(p, make_config(3))

    def test_total_rate_site_independent(self):
        p = sw.builtin_structure("S4", 12)
        rates = sw.directional_rates(p, make_config(12, eta=0.6))
        np.testing.assert_allclose(rates.gamma_right + rates.gamma_left, 1.0, atol=1e-15)


class TestBuildPropagator:
    def test_four_atom_alternating(self):
        """Only sites 1->3 and 4->2 couple; diagonal is -gamma/2."""
        xi = 0.7
        p = sw.builtin_structure("S3", 4)
        config = make_config(4, xi=xi, eta=1.0)
        m = sw.propagator_for(p, config).entries
        expected = np.zeros((4, 4), complex)
        np.fill_diagonal(expected, -0.5)
        expected[2, 0] = expected[1, 3] = -np.exp(-2j * xi)
        np.testing.assert_allclose(m, expected, atol=1e-15)

    def test_single_emitter(self):
        p = sw.DirectionalityPattern((1.0,))
        config = make_config(1, beta=0.5)
        m = sw.propagator_for(p, config).entries
        assert m.shape == (1, 1)
        assert m[0, 0] == pytest.approx(-(1.0 + 1.0) / 2)

    def test_two_reciprocal_sites(self):
        # off-diagonal -0.5 e^{-i pi/2} = +0.5i, derived by direct evaluation
        p = sw.DirectionalityPattern((0.0, 0.0))
        m = sw.propagator_for(p, make_config(2, xi=np.pi / 2)).entries
        assert m[0, 1] == pytest.approx(0.5j)
        assert m[1, 0] == pytest.approx(0.5j)

    def test_dissipative_hermitian_part(self):
        p = sw.builtin_structure("S2", 20, o_left=4)
        m = sw.propagator_for(p, make_config(20, eta=0.9)).entries
        loss = np.linalg.eigvalsh(-(m + m.conj().T))
        assert loss.min() >= -1e-10

    def test_trace_identity(self):
        for beta in (1.0, 0.95):
            config = make_config(12, eta=0.8, beta=beta)
            p = sw.builtin_structure("S3", 12)
            m = sw.propagator_for(p, config).entries
            target = -12 * config.total_rate / 2
            assert abs(m.trace() - target) <= 1e-10 * abs(target)

    def test_full_chirality_triangular(self):
        p = sw.DirectionalityPattern((1.0,) * 6)
        m = sw.propagator_for(p, make_config(6, eta=1.0)).entries
        assert np.all(np.triu(m, 1) == 0)
        p = sw.DirectionalityPattern((-1.0,) * 6)
        m = sw.propagator_for(p, make_config(6, eta=1.0)).entries
        assert np.all(np.tril(m, -1) == 0)

    def test_reciprocal_limit_symmetric(self):
        p = sw.builtin_structure("S1", 10, center_width=2)
        m = sw.propagator_for(p, make_config(10, eta=0.0)).entries
        np.testing.assert_allclose(m, m.T, atol=1e-15)

    def test_beta_shifts_diagonal_only(self):
        p = sw.builtin_structure("S4", 9)
        m1 = sw.propagator_for(p, make_config(9, eta=0.9, beta=1.0)).entries
        m2 = sw.propagator_for(p, make_config(9, eta=0.9, beta=0.9)).entries
        off = ~np.eye(9, dtype=bool)
        np.testing.assert_array_equal(m1[off], m2[off])
        g_ng = make_config(9, beta=0.9).gamma_nonguided
        np.testing.assert_allclose(np.diag(m2), np.diag(m1) - g_ng / 2, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(
    values=st.lists(st.sampled_from([1.0, 0.0, -1.0]), min_size=2, max_size=20),
    eta=st.floats(0.0, 0.999),
    xi=st.floats(0.1, 2 * np.pi),
)
def test_hermitian_part_never_gains(values, eta, xi):
    p = sw.DirectionalityPattern(tuple(values))
    config = sw.SystemConfig(n_sites=len(values), spacing=xi, chirality=eta)
    m = sw.propagator_for(p, config).entries
    assert np.linalg.eigvalsh(-(m + m.conj().T)).min() >= -1e-10

"""End-to-end acceptance checks for the transport simulator.

Each test covers one headline claim (reference eigenvalues, beat
frequencies, subradiance, spread bands, loss scaling, invariant suites,
pattern round-trips, sweep determinism) and prints a single pass/fail
line so the whole gate can be read at a glance with ``pytest -s``.
"""

import json
import time

import numpy as np
import scipy.signal

import structwqed as sw
from structwqed.cli import main as cli_main
from structwqed.pattern import PatternError, expand, parse_pattern, serialize
from structwqed.spectral import ModeSelection

from conftest import N_REF, XI_REF, reference_matrix

ACCEPT_SEED = 20260824


def report(name, ok):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    assert ok, name


class TestReferenceDynamics:
    def test_four_atom_closed_form(self):
        """Numerical propagation reproduces the closed-form four-atom cascade."""
        rng = np.random.default_rng(ACCEPT_SEED)
        start = time.perf_counter()
        worst = 0.0
        for xi in (np.pi / 4, np.pi / 2, 1.3):
            config = sw.SystemConfig(n_sites=4, spacing=xi, chirality=1.0)
            matrix = sw.propagator_for(sw.builtin_structure("S3", 4), config)
            a0 = rng.normal(size=4) + 1j * rng.normal(size=4)
            a0 /= np.linalg.norm(a0)
            traj = sw.evolve_ode(matrix, sw.custom(a0), t_end=10.0, dt_out=0.5)
            for k, t in enumerate(traj.times):
                exact = sw.analytic_s3_four_atom(a0, xi, 1.0, t)
                worst = max(worst, np.abs(traj.amplitudes[k] - exact).max())
        elapsed = time.perf_counter() - start
        report("four-atom closed form", worst < 1e-8 and elapsed < 1.0)

    def test_most_subradiant_eigenvalue_reciprocal_center(self):
        """Reciprocal-center array: the longest-lived mode sits at the
        reference frequency shift and decay rate."""
        start = time.perf_counter()
        decomp = sw.decompose(reference_matrix("S1", eta=0.999))
        elapsed = time.perf_counter() - start
        ok = (abs(decomp.frequencies[0] - (-0.5250)) < 0.01
              and abs(decomp.decay_rates[0] - 0.00581) < 0.001
              and elapsed < 1.0)
        report("most-subradiant eigenvalue (S1)", ok)

    def test_defect_pair_mode_shifts_and_beat_period(self):
        """Two-defect array: the split subradiant pair is found by value and
        its two-mode quench beats at the frequency difference."""
        decomp = sw.decompose(reference_matrix("S2", eta=0.999))
        w = decomp.frequencies
        i_minus = int(np.argmin(np.abs(w - (-0.126))))
        i_plus = int(np.argmin(np.abs(w - 0.291)))
        shifts_ok = (abs(w[i_minus] - (-0.126)) < 0.01
                     and abs(w[i_plus] - 0.291) < 0.01)

        initial = sw.mode_quench(decomp, ModeSelection.equal_weights((i_minus, i_plus)))
        times = np.arange(0.0, 80.0, 0.01)
        traj = sw.evolve_spectral(decomp, initial, times)
        pops = traj.populations()
        norm = pops / pops.sum(axis=1, keepdims=True)
        site = int(np.argmax(norm.var(axis=0)))
        peaks, _ = scipy.signal.find_peaks(norm[:, site])
        period = float(np.median(np.diff(times[peaks])))
        target = 2 * np.pi / (0.291 - (-0.126))
        report("defect-pair shifts and beat period (S2)",
               shifts_ok and abs(period - target) <= 0.05 * target)

    def test_period3_beats_and_edge_modes(self):
        """Period-3 array: subradiant manifold carries the fast and slow beat
        frequencies and hosts at least two boundary-localized modes."""
        decomp = sw.decompose(reference_matrix("S4", eta=0.999))
        beats = sw.beat_frequencies(decomp, ModeSelection.equal_weights(range(16)))
        fast_ok = np.abs(beats - 0.467).min() < 0.01
        slow_ok = np.abs(beats - 0.048).min() < 0.01
        labels = sw.classify_modes(decomp)
        n_edge = sum(lab.edge for lab in labels)
        report("period-3 beats and edge modes (S4)", fast_ok and slow_ok and n_edge >= 2)

    def test_subradiant_storage_and_late_release(self, edge_quench_trajectories):
        """Edge-fed arrays hold population far beyond free-space decay; the
        cascaded array releases it sharply at late times."""
        slow_ok = True
        for name in ("S1", "S2", "S3", "S4"):
            traj = edge_quench_trajectories[name]
            total = traj.total_population()
            k10 = int(np.argmin(np.abs(traj.times - 10.0)))
            slow_ok = slow_ok and total[k10] > np.exp(-10.0)
        s3_total = edge_quench_trajectories["S3"].total_population()
        times = edge_quench_trajectories["S3"].times
        k90 = int(np.argmin(np.abs(times - 90.0)))
        k120 = int(np.argmin(np.abs(times - 120.0)))
        drop_ok = s3_total[k90] / s3_total[k120] >= 10.0
        report("subradiant storage and late release", slow_ok and drop_ok)

    def test_spread_bands(self, edge_quench_trajectories):
        """Spatial spread: frozen (S1), saturating near 0.4 (S2), near-unity
        transient (S3), stabilizing near 0.7 (S4)."""
        s1 = sw.spread(edge_quench_trajectories["S1"])
        after = s1.times >= 5.0
        s1_ok = np.all(np.diff(s1.s[after & s1.valid]) <= 1e-3)
        s2_st = sw.steady_spread(edge_quench_trajectories["S2"]).s_st
        s4_st = sw.steady_spread(edge_quench_trajectories["S4"]).s_st
        s3 = sw.spread(edge_quench_trajectories["S3"])
        s3_ok = np.nanmax(s3.s[s3.valid]) > 0.9
        report("spread bands (S1-S4)",
               s1_ok and 0.3 <= s2_st <= 0.5 and 0.6 <= s4_st <= 0.8 and s3_ok)


class TestLossScaling:
    def test_nonguided_loss_identity_and_ordering(self):
        """Finite coupling efficiency rescales the ideal decay curve by a
        uniform exponential and orders the family monotonically."""
        initial = sw.both_edges(N_REF)
        pattern = sw.builtin_structure("S1", N_REF, center_width=10)

        def run(beta):
            config = sw.SystemConfig(n_sites=N_REF, spacing=XI_REF,
                                     chirality=1.0, beta=beta)
            matrix = sw.propagator_for(pattern, config)
            return sw.evolve_ode(matrix, initial, t_end=30.0, dt_out=0.5,
                                 rtol=1e-11, atol=1e-14)

        reference = run(1.0)
        p_ref = reference.total_population()
        betas = (0.999, 0.99, 0.95)
        identity_ok = True
        totals = {1.0: p_ref}
        for beta in betas:
            g_ng = (1.0 - beta) / beta
            p_beta = run(beta).total_population()
            expected = p_ref * np.exp(-g_ng * reference.times)
            rel = np.abs(p_beta - expected) / expected
            identity_ok = identity_ok and rel.max() < 1e-9
            totals[beta] = p_beta
        late = reference.times > 0
        order_ok = (np.all(totals[0.95][late] < totals[0.99][late])
                    and np.all(totals[0.99][late] < totals[0.999][late])
                    and np.all(totals[0.999][late] < totals[1.0][late]))
        report("nonguided-loss identity and ordering", identity_ok and order_ok)


class TestInvariantSuites:
    def test_spectral_invariants_random_configurations(self):
        """Trace, passivity, biorthogonality, reconstruction, and propagator
        agreement hold across 50 random arrays."""
        rng = np.random.default_rng(ACCEPT_SEED)
        ok = True
        for _ in range(50):
            n = int(rng.integers(2, 55))
            eta = float(rng.uniform(0.0, 0.999))
            beta = float(rng.uniform(0.9, 1.0))
            xi = float(rng.uniform(0.3, np.pi))
            values = rng.choice([1.0, 0.0, -1.0], size=n)
            pattern = sw.DirectionalityPattern(tuple(values))
            config = sw.SystemConfig(n_sites=n, spacing=xi, chirality=eta, beta=beta)
            matrix = sw.propagator_for(pattern, config)
            decomp = sw.decompose(matrix)

            target = n * config.total_rate / 2
            ok = ok and abs(decomp.decay_rates.sum() - target) <= 1e-10 * target
            ok = ok and decomp.decay_rates.min() >= -1e-10
            ok = ok and decomp.conditioning < 1e-6

            a0 = rng.normal(size=n) + 1j * rng.normal(size=n)
            a0 /= np.linalg.norm(a0)
            alpha = sw.overlaps(decomp, a0)
            ok = ok and np.abs(decomp.right_vectors @ alpha - a0).max() < 1e-8

            times = np.arange(0.0, 5.5, 1.0)
            ode = sw.evolve_ode(matrix, sw.custom(a0), t_end=5.0, dt_out=1.0)
            spec = sw.evolve_spectral(decomp, sw.custom(a0), times)
            ok = ok and np.abs(ode.amplitudes - spec.amplitudes).max() < 1e-6
            if not ok:
                break
        report("spectral invariants on random configurations", ok)

    def test_dark_modes_at_half_wavelength_spacing(self):
        """At xi = pi both reference arrays develop dark modes that cap the
        interior-quench population above the steady-spread threshold."""
        ok = True
        for name in ("S1", "S4"):
            decomp = sw.decompose(reference_matrix(name, eta=0.999, xi=np.pi))
            ok = ok and decomp.decay_rates.min() < 1e-6
            times = np.arange(0.0, 200.0, 0.1)
            traj = sw.evolve_spectral(decomp, sw.single_site(27, N_REF), times)
            ok = ok and sw.steady_spread(traj).flag == "capped"
        report("dark modes at half-wavelength spacing", ok)

    def test_pattern_language_round_trips(self):
        """1000 random nested pattern sources round-trip through
        parse/expand/serialize; malformed sources fail with byte offsets."""
        rng = np.random.default_rng(ACCEPT_SEED)
        symbols = ("R", "O", "L")

        def source(depth):
            parts = []
            for _ in range(int(rng.integers(1, 5))):
                roll = rng.random()
                if roll < 0.5 or depth >= 3:
                    token = symbols[rng.integers(3)]
                    if rng.random() < 0.3:
                        token += f"*{rng.integers(1, 5)}"
                    parts.append(token)
                else:
                    parts.append(f"({source(depth + 1)})*{rng.integers(1, 4)}")
            return " ".join(parts)

        ok = True
        for _ in range(1000):
            src = source(0)
            values = expand(parse_pattern(src)).values
            canonical = serialize(sw.DirectionalityPattern(values))
            ok = ok and expand(parse_pattern(canonical)).values == values
            if not ok:
                break

        bad = [("X", 0), ("R*0", 2), ("R*", 2), ("(R L", 0),
               ("(R L))*2", 5), ("( )*2", 0), ("(R)*0", 4)]
        for src, offset in bad:
            try:
                parse_pattern(src)
            except PatternError as exc:
                ok = ok and exc.offset == offset
            else:
                ok = False
        report("pattern language round trips", ok)


class TestSweepDeterminism:
    def test_worker_and_resume_invariance(self, tmp_path):
        """A 5x5 sweep is byte-identical across worker counts and across an
        interrupted-then-resumed run."""
        spec = {
            "structure": "S3",
            "n_sites": 12,
            "eta_values": list(np.linspace(0.5, 0.999, 5)),
            "xi_values": list(np.linspace(1.0, np.pi / 2, 5)),
            "t_end": 40.0,
            "dt_out": 0.1,
            "t_max": 80.0,
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))

        def run_sweep_cli(out, *extra):
            assert cli_main(["sweep", "--spec", str(spec_path),
                             "--out", str(out), *extra]) == 0
            return (out / "sweep.csv").read_bytes()

        serial = run_sweep_cli(tmp_path / "serial", "--workers", "1")
        parallel = run_sweep_cli(tmp_path / "parallel", "--workers", "8")

        manifest = tmp_path / "parallel" / "manifest.json"
        payload = json.loads(manifest.read_text())
        for key in list(payload["cells"])[::2]:
            del payload["cells"][key]
        manifest.write_text(json.dumps(payload))
        assert cli_main(["sweep", "--resume", "--out", str(tmp_path / "parallel"),
                         "--workers", "1"]) == 0
        resumed = (tmp_path / "parallel" / "sweep.csv").read_bytes()

        report("sweep determinism", serial == parallel == resumed)

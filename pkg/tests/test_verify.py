"""Checker suite: identities pass, constructed violations fail."""

import numpy as np
import pytest

from gleason.hilbert import (
    DensityMatrix,
    haar_basis_matrices,
    haar_random_basis,
    random_density_matrix,
)
from gleason.reconstruct import explicit_reconstruct, transition_matrix
from gleason.valuation import ExactOracle, NoisyOracle
from gleason.verify import (
    CheckReport,
    check_additivity,
    check_basis_independence,
    check_density,
    check_haar_moment,
    check_unistochastic,
)


class TestCheckReport:
    def test_pass_flag_recomputable(self):
        ok = CheckReport("x", deviation=1e-12, tolerance=1e-10)
        bad = CheckReport("x", deviation=1e-8, tolerance=1e-10)
        assert ok.passed and not bad.passed
        assert ok.passed == (ok.deviation <= ok.tolerance)

    def test_json_shape(self):
        r = CheckReport("density", 0.0, 1e-10, {"dim": 2})
        payload = r.to_json()
        assert set(payload) == {"check", "pass", "deviation", "tolerance", "context"}
        assert payload["pass"] is True


class TestCheckDensity:
    def test_maximally_mixed_passes_with_zero_deviation(self):
        r = check_density(np.eye(4) / 4, tol=1e-10)
        assert r.passed and r.deviation == 0.0

    def test_constructed_violation(self):
        r = check_density(np.diag([1.1, -0.1]), tol=1e-10)
        assert not r.passed
        assert abs(r.deviation - 0.1) < 1e-12
        assert r.context["min_eigenvalue"] < 0

    def test_reconstruction_output_passes(self):
        rho = random_density_matrix(3, 3, seed=1)
        report = explicit_reconstruct(ExactOracle(rho), haar_random_basis(3, seed=2))
        assert check_density(report.repaired.matrix, tol=1e-10).passed

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            check_density(np.ones((2, 3)))


class TestCheckAdditivity:
    def test_exact_oracle_passes(self):
        oracle = ExactOracle(random_density_matrix(4, 4, seed=3))
        r = check_additivity(oracle, trials=100, seed=4, tol=1e-10)
        assert r.passed, r.deviation

    @pytest.mark.parametrize("dim", [1, 2, 5])
    def test_all_dims(self, dim):
        oracle = ExactOracle(random_density_matrix(dim, dim, seed=dim))
        assert check_additivity(oracle, trials=20, seed=5, tol=1e-10).passed

    def test_noisy_oracle_at_statistical_tolerance(self):
        shots = 10_000
        oracle = NoisyOracle(random_density_matrix(4, 4, seed=6), shots=shots, seed=7)
        r = check_additivity(oracle, trials=20, seed=8, tol=5 / np.sqrt(shots))
        assert r.passed, r.deviation

    def test_deterministic_given_seed(self):
        oracle_a = ExactOracle(random_density_matrix(3, 3, seed=9))
        oracle_b = ExactOracle(random_density_matrix(3, 3, seed=9))
        ra = check_additivity(oracle_a, trials=10, seed=10)
        rb = check_additivity(oracle_b, trials=10, seed=10)
        assert ra.deviation == rb.deviation


class TestCheckUnistochastic:
    def test_identity_passes(self):
        assert check_unistochastic(np.eye(3)).passed

    def test_all_halves_passes(self):
        assert check_unistochastic(np.full((2, 2), 0.5)).passed

    def test_haar_pair_passes_strict(self):
        s = transition_matrix(haar_random_basis(6, seed=11), haar_random_basis(6, seed=12))
        r = check_unistochastic(s, tol=1e-12)
        assert r.passed

    def test_violation_fails(self):
        r = check_unistochastic(np.array([[0.9, 0.2], [0.1, 0.8]]), tol=1e-12)
        assert not r.passed
        assert abs(r.deviation - 0.1) < 1e-12


class TestCheckHaarMoment:
    def test_passes_at_moderate_samples(self):
        r = check_haar_moment(2, 20_000, seed=13)
        assert r.passed, (r.deviation, r.context)

    def test_displayed_entries_match_closed_form(self):
        # independent small Monte Carlo of the two quoted entries:
        # T[a,a,a,a] = 2/(d+1) and T[a,b,a,b] = 1/(d+1) for a != b
        d, n = 3, 30_000
        rng = np.random.default_rng(14)
        q = haar_basis_matrices(d, n, rng)
        t_1111 = np.einsum("sai,sai,sai,sai->s", q[:, :1], q.conj()[:, :1],
                           q.conj()[:, :1], q[:, :1]).real.mean()
        t_1212 = np.einsum("si,si,si,si->s", q[:, 0], q[:, 1].conj(),
                           q[:, 0].conj(), q[:, 1]).real.mean()
        assert abs(t_1111 - 2 / (d + 1)) < 0.01
        assert abs(t_1212 - 1 / (d + 1)) < 0.01

    def test_rejects_tiny_sample_counts(self):
        with pytest.raises(ValueError):
            check_haar_moment(2, 50, seed=15)

    def test_deterministic_given_seed(self):
        a = check_haar_moment(2, 1000, seed=16)
        b = check_haar_moment(2, 1000, seed=16)
        assert a.deviation == b.deviation


class TestCheckBasisIndependence:
    def test_exact_oracle_passes(self):
        oracle = ExactOracle(random_density_matrix(3, 3, seed=17))
        r = check_basis_independence(oracle, num_bases=5, seed=18, tol=1e-10)
        assert r.passed, r.deviation

    def test_dim_one_zero_deviation(self):
        oracle = ExactOracle(DensityMatrix([[1.0]]))
        r = check_basis_independence(oracle, num_bases=3, seed=19)
        assert r.deviation == 0.0

    def test_noisy_oracle_negative_control(self):
        oracle = NoisyOracle(random_density_matrix(3, 3, seed=20), shots=10_000, seed=21)
        r = check_basis_independence(oracle, num_bases=3, seed=22, tol=1e-10)
        assert not r.passed  # shot noise dominates the 1e-10 gate

    def test_counter_is_only_mutation(self):
        rho = random_density_matrix(3, 3, seed=23)
        oracle = ExactOracle(rho)
        before_state = oracle._state.copy()
        check_basis_independence(oracle, num_bases=3, seed=24)
        assert np.array_equal(before_state, oracle._state)
        assert oracle.query_count == 3 * 15

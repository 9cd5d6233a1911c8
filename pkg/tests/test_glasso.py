"""Tests for the graphical lasso solver."""

import numpy as np
import pytest

from grmkit.engine.covariance import CovarianceEstimate, sample_covariance
from grmkit.engine.glasso import glasso_kkt, invert_spd, solve_glasso
from grmkit.engine.precision import Method, glasso, kkt_residual
from grmkit.errors import GrmError, NotConvergedError, SingularInputError
from tests.conftest import make_panel, spd


class TestGlasso:
    """Tests for the glasso estimator."""

    def test_large_penalty_gives_diagonal(self, rng):
        S = sample_covariance(make_panel(rng.normal(size=(5, 50))))
        lam = float(np.abs(S.S - np.diag(np.diag(S.S))).max())
        est = glasso(S, lam)
        assert est.edge_count() == 0
        np.testing.assert_allclose(np.diag(est.omega), 1.0 / (np.diag(S.S) + lam), atol=1e-8)

    def test_zero_penalty_diagonal_input(self):
        S = CovarianceEstimate.from_matrix(None, np.diag([2.0, 4.0]))
        est = glasso(S, 0.0)
        np.testing.assert_allclose(est.omega, [[0.5, 0.0], [0.0, 0.25]])

    def test_two_asset_soft_threshold(self, example_sigma):
        S = CovarianceEstimate.from_matrix(None, example_sigma)
        est = glasso(S, 0.1, tol=1e-10)
        np.testing.assert_allclose(est.covariance(), [[1.1, 0.4], [0.4, 1.1]], atol=1e-8)

    def test_zero_penalty_recovers_inverse(self, rng):
        S = sample_covariance(make_panel(rng.normal(size=(20, 60))))
        est = glasso(S, 0.0)
        np.testing.assert_allclose(est.omega, np.linalg.inv(S.S), atol=1e-6)

    def test_kkt_at_convergence(self, rng):
        S = sample_covariance(make_panel(rng.normal(size=(10, 50))))
        est = glasso(S, 0.1, tol=1e-6)
        assert est.converged
        assert est.method is Method.GLASSO
        assert est.kkt <= 1e-6
        assert kkt_residual(est, S) <= 1e-6 + 1e-12

    def test_estimate_is_symmetric_positive_definite(self, rng):
        S = sample_covariance(make_panel(rng.normal(size=(8, 30))))
        est = glasso(S, 0.05)
        np.testing.assert_array_equal(est.omega, est.omega.T)
        assert np.all(np.linalg.eigvalsh(est.omega) > 0)

    def test_warm_start_reaches_same_solution(self, rng):
        S = sample_covariance(make_panel(rng.normal(size=(6, 40))))
        cold = glasso(S, 0.08, tol=1e-9)
        warm = glasso(S, 0.08, tol=1e-9, warm_start=glasso(S, 0.2))
        np.testing.assert_allclose(warm.omega, cold.omega, atol=1e-6)

    def test_negative_penalty(self, example_sigma):
        with pytest.raises(GrmError):
            glasso(CovarianceEstimate.from_matrix(None, example_sigma), -0.1)

    def test_singular_input_unpenalized(self):
        S = CovarianceEstimate.from_matrix(None, np.ones((2, 2)))
        with pytest.raises(SingularInputError):
            glasso(S, 0.0)

    def test_sweep_budget_exhausted(self, rng):
        S = CovarianceEstimate.from_matrix(None, spd(rng, 8))
        with pytest.raises(NotConvergedError) as err:
            glasso(S, 0.05, tol=1e-10, max_iter=1)
        partial = err.value.estimate
        assert partial is not None
        assert not partial.converged
        assert partial.iterations == 1
        assert partial.kkt > 1e-10


class TestGlassoHelpers:
    """Tests for invert_spd and the stationarity residual."""

    def test_invert_spd(self, rng):
        M = spd(rng, 5)
        np.testing.assert_allclose(invert_spd(M) @ M, np.eye(5), atol=1e-10)

    def test_kkt_zero_at_exact_inverse(self, rng):
        M = spd(rng, 4)
        assert glasso_kkt(M, np.linalg.inv(M), 0.0) < 1e-10

    def test_kkt_infinite_when_not_positive_definite(self):
        assert glasso_kkt(np.eye(2), -np.eye(2), 0.1) == float("inf")

    def test_solver_objective_trace_recorded(self, rng):
        S = sample_covariance(make_panel(rng.normal(size=(4, 30)))).S
        result = solve_glasso(S, 0.05)
        assert len(result.objective_trace) == result.iterations

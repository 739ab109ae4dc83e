import os

import numpy as np
import pytest

import qgm

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def test_diagonal_problem_round_trip():
    problem = qgm.QuadraticProblem.diagonal(np.array([1.0, 2.0, 4.0]))
    assert problem.dim() == 3
    assert problem.is_diagonal()
    np.testing.assert_allclose(problem.matvec(np.ones(3)), [1.0, 2.0, 4.0])
    assert problem.value(np.zeros(3)) == 0.0


def test_fixed_rule_reaches_planted_minimizer():
    base = qgm.generate_spectrum(family=1, kappa=100.0, dim=30, seed=3)
    problem = qgm.attach_random_minimizer(base, 4)
    trace = qgm.solve(problem, np.zeros(30), method="bb1", epsilon=1e-10)
    assert trace.status == "converged"
    x_star = problem.minimizer()
    assert x_star is not None
    assert np.linalg.norm(trace.x_final - x_star) < 1e-6 * np.linalg.norm(x_star)
    assert trace.branches[0] == "sd_init"


def test_adaptive_solver_costs_one_matvec_per_iteration():
    base = qgm.generate_spectrum(family=1, kappa=1000.0, dim=100, seed=5)
    problem = qgm.attach_random_minimizer(base, 6)
    trace = qgm.solve(problem, np.ones(100), method="ac", epsilon=1e-8)
    assert trace.converged()
    assert trace.matvecs == trace.iterations + 1
    assert "short_new" in trace.branches
    assert trace.gnorm[-1] <= 1e-8 * trace.gnorm[0]


def test_two_dim_short_root_is_inverse_largest_eigenvalue():
    problem = qgm.QuadraticProblem.diagonal(np.array([1.0, 8.0]))
    c = qgm.moments(problem, np.array([0.7, -0.4]))
    root = qgm.stepsize_tilde(qgm.phi_from_moments(c))
    assert root == pytest.approx(1.0 / 8.0, rel=1e-12)


def test_weight_helpers_match_closed_forms():
    h1, h2 = qgm.extreme_weights(1.0, 3.0)
    assert (h1, h2) == pytest.approx((0.625, 0.375), rel=1e-14)
    p = np.array([0.5, 0.5])
    for _ in range(200):
        p = qgm.weight_transform_step(np.array([1.0, 3.0]), p)
    assert p == pytest.approx([h1, h2], abs=1e-8)


def test_matrix_market_fixture_loads_and_solves():
    path = os.path.join(DATA_DIR, "small_sym.mtx")
    problem = qgm.attach_random_minimizer(qgm.load_matrix_market(path), 7)
    trace = qgm.solve(problem, np.zeros(2), method="sd", epsilon=1e-10)
    assert trace.converged()
    np.testing.assert_allclose(
        problem.to_dense(), [[2.0, 1.0], [1.0, 2.0]], rtol=0, atol=1e-15
    )


def test_plan_runs_from_json():
    plan = """{
        "families": [1], "kappas": [64.0], "epsilons": [1e-6],
        "methods": ["ac", "bb1"], "n": 16, "runs": 2, "seed": 11
    }"""
    csv_text, ok = qgm.run_plan_json(plan)
    assert ok
    lines = csv_text.strip().splitlines()
    assert lines[0] == "problem,kappa,epsilon,method,mean_iters,mean_matvecs,mean_seconds,n_runs"
    assert len(lines) == 3
    assert lines[1].startswith("family1,64,1e-06,ac,")


def test_degenerate_inputs_raise():
    with pytest.raises(Exception):
        qgm.QuadraticProblem.diagonal(np.array([-1.0, 2.0]))
    with pytest.raises(Exception):
        qgm.solve(
            qgm.QuadraticProblem.diagonal(np.array([1.0, 2.0])),
            np.ones(2),
            method="unknown",
        )

import numpy as np
import pytest
import scipy.sparse as sp

from asgard.linops import LinearMap
from asgard.problems import (
    BUILDERS, Dataset, OracleNotApplicable, ProblemInstance, build_basis_pursuit,
    build_degenerate_lp, build_l1_svm, build_lad_lasso, build_portfolio, build_sqrt_lasso,
    kkt_residuals, laplace_noise, make_classification, make_returns, reference_solution,
)
from asgard.proxcore import Box, WeightedL1
from asgard.smoothing import ConstraintDual, LipschitzDual


def test_sqrt_lasso_unit_columns():
    prob = build_sqrt_lasso()
    norms = np.linalg.norm(prob.A.toarray(), axis=0)
    assert np.max(np.abs(norms - 1.0)) <= 1e-12
    assert prob.A.shape == (20, 50)


def test_sqrt_lasso_noiseless_signal_is_exact():
    for lam in (1e-2, 1e-5, 1e-9):
        prob = build_sqrt_lasso(sigma_noise=0.0, lam=lam)
        x_nat = prob.params["x_natural"]
        assert prob.dual.value(prob.A.apply(x_nat)) <= 1e-14
        assert prob.objective(x_nat) == pytest.approx(lam * np.abs(x_nat).sum(), abs=1e-14)


def test_sqrt_lasso_rejects_bad_input():
    with pytest.raises(ValueError):
        build_sqrt_lasso(lam=0.0)
    with pytest.raises(ValueError):
        build_sqrt_lasso(n=0)


def test_sqrt_lasso_long_run_reference(sqrt_lasso_ref):
    ref = sqrt_lasso_ref.reference
    assert ref.kind == "long_run"
    assert "iterations" in ref.note
    assert ref.value == pytest.approx(sqrt_lasso_ref.objective(ref.x_star), abs=0)


def test_degenerate_lp_structure():
    prob = build_degenerate_lp(p=10, n=200)
    M = prob.A.toarray()
    assert M.shape == (200, 10)
    assert np.array_equal(M[0], np.r_[np.ones(9), 0.0])
    assert np.array_equal(M[1:], np.tile(np.r_[-np.ones(9), 1.0], (199, 1)))
    x_nat = np.r_[np.full(9, 1 / 9), 1.0]
    assert prob.feasibility(x_nat) <= 1e-12


def test_degenerate_lp_every_feasible_point_is_optimal(rng):
    prob = build_degenerate_lp(p=6, n=9)
    for _ in range(100):
        head = rng.standard_normal(5)
        head[-1] = 1.0 - head[:-1].sum()
        x = np.r_[head, 1.0]
        assert prob.feasibility(x) <= 1e-12
        assert prob.objective(x) == 2.0


def test_degenerate_lp_rejects_small_sizes():
    with pytest.raises(ValueError):
        build_degenerate_lp(p=1, n=5)


def test_basis_pursuit_identity():
    b0 = np.array([1.5, -2.0, 0.0, 0.25])
    prob = reference_solution(build_basis_pursuit(np.eye(4), b0), "analytic")
    assert np.array_equal(prob.reference.x_star, b0)
    assert prob.reference.value == 3.75
    zero = reference_solution(build_basis_pursuit(np.eye(4), np.zeros(4)), "analytic")
    assert zero.reference.value == 0.0
    assert np.array_equal(zero.reference.x_star, np.zeros(4))


def test_basis_pursuit_lp_oracle():
    prob = reference_solution(build_basis_pursuit(), "lp_exact")
    ref = prob.reference
    assert prob.mode == "constrained"
    assert ref.value == pytest.approx(prob.f(ref.x_star), abs=1e-9)
    assert prob.feasibility(ref.x_star) <= 1e-9
    primal, dual = kkt_residuals(prob, ref.x_star, ref.y_star)
    assert primal <= 1e-8 and dual <= 1e-8
    ATy = prob.A.adjoint_apply(ref.y_star)
    support = np.abs(ref.x_star) > 1e-9
    assert np.all(np.abs(ATy) <= 1 + 1e-8)
    assert np.allclose(-ATy[support], np.sign(ref.x_star[support]), atol=1e-8)


def test_basis_pursuit_wrong_b_length():
    with pytest.raises(ValueError):
        build_basis_pursuit(np.eye(3), np.ones(4))


def test_lad_lasso_defaults():
    prob = build_lad_lasso()
    assert prob.params["lam"] == 1 / 34
    assert prob.f.lam == 1 / 34
    assert prob.dual.diameter_bound(np.zeros(34)) == 34 / 2


def test_lad_lasso_noiseless():
    prob = build_lad_lasso(sigma=0.0)
    assert np.array_equal(prob.params["b"], prob.A.toarray() @ prob.params["x_natural"])


def test_lad_lasso_lp_oracle():
    prob = reference_solution(build_lad_lasso(n=12, p=30, s_sparsity=3), "lp_exact")
    ref = prob.reference
    primal, dual = kkt_residuals(prob, ref.x_star, ref.y_star)
    assert primal <= 1e-8 and dual <= 1e-8


def test_svm_single_sample_row():
    prob = build_l1_svm(Dataset(sp.csr_matrix([[1.0, 0.0]]), np.array([1.0])))
    assert np.array_equal(prob.A.toarray(), [[-1.0, 0.0]])


def test_svm_zero_features_loss_is_one():
    prob = build_l1_svm(Dataset(sp.csr_matrix((7, 3)), np.ones(7)))
    assert prob.dual.value(np.zeros(7)) == pytest.approx(1.0, abs=1e-15)
    assert prob.objective(np.zeros(3)) == pytest.approx(1.0, abs=1e-15)


def test_svm_worst_case_diameter(svm_problem):
    assert svm_problem.dual.diameter_bound(None) == 50 / 2


def test_svm_hinge_value(svm_problem, rng):
    X = make_classification(50, 20, seed=1)
    x = rng.standard_normal(20)
    margins = X.labels * (X.features @ x)
    hinge = np.maximum(0.0, 1.0 - margins).mean()
    assert svm_problem.objective(x) == pytest.approx(hinge + 0.1 * np.abs(x).sum(), rel=1e-13)


def test_svm_lp_oracle_kkt(svm_lp_ref):
    ref = svm_lp_ref.reference
    primal, dual = kkt_residuals(svm_lp_ref, ref.x_star, ref.y_star)
    assert primal <= 1e-8 and dual <= 1e-8
    assert ref.value == pytest.approx(svm_lp_ref.objective(ref.x_star), abs=1e-9)


def test_dataset_rejects_bad_labels():
    with pytest.raises(ValueError, match="labels"):
        Dataset(sp.csr_matrix(np.eye(2)), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        Dataset(sp.csr_matrix(np.eye(2)), np.array([1.0]))


def test_portfolio_mapping():
    R = make_returns(30, 5, seed=2)
    prob = build_portfolio(R, 0.02)
    rho = R.mean(axis=0)
    assert np.array_equal(prob.params["rho"], rho)
    assert prob.params["radius"] == pytest.approx(np.sqrt(5 * 0.02), rel=1e-15)
    assert np.array_equal(prob.A.toarray(), R - rho)
    assert np.array_equal(prob.h.grad(np.zeros(5)), -rho)
    assert prob.h.lipschitz == 0.0


def test_portfolio_uniform_returns():
    row = np.array([1.0, 1.25, 0.75, 1.125])
    prob = build_portfolio(np.tile(row, (8, 1)), 0.01)
    assert not np.any(prob.A.toarray())
    vertices = np.eye(4)
    values = [prob.objective(v) for v in vertices]
    assert int(np.argmin(values)) == int(np.argmax(row))
    assert all(prob.feasibility(v) == 0.0 for v in vertices)


def test_portfolio_rejects_nonpositive_epsilon():
    with pytest.raises(ValueError):
        build_portfolio(np.ones((3, 2)), 0.0)


@pytest.mark.parametrize("name", sorted(BUILDERS))
def test_builders_reproducible_and_consistent(name):
    if name == "l1_svm":
        make = lambda: BUILDERS[name](make_classification(30, 8, seed=4))  # noqa: E731
    elif name == "portfolio":
        make = lambda: BUILDERS[name](make_returns(20, 4, seed=4), 0.01)  # noqa: E731
    else:
        make = BUILDERS[name]
    a, b = make(), make()
    assert np.array_equal(a.A.toarray(), b.A.toarray())
    n, p = a.A.shape
    assert a.x0.shape == (p,)
    if a.mode == "constrained":
        assert np.array_equal(a.dual.b, b.dual.b)
        assert a.dual.b.shape == (n,)
        assert a.dual.set.dist(np.zeros(n)) == 0.0
    if a.reference is not None:
        ref = a.reference
        assert a.objective(ref.x_star) == pytest.approx(ref.value, abs=1e-9)
        assert a.feasibility(ref.x_star) <= 1e-9
    assert "beta0_scale" in a.defaults


def test_problem_instance_validation():
    A = LinearMap(np.ones((2, 3)))
    with pytest.raises(ValueError, match="x0"):
        ProblemInstance("bad", WeightedL1(), A, LipschitzDual(Box(-1.0, 1.0), dim=2), x0=np.zeros(2))
    with pytest.raises(ValueError, match="offset"):
        ProblemInstance("bad", WeightedL1(), A, ConstraintDual(Box(-1.0, 1.0), np.zeros(3)))
    with pytest.raises(ValueError, match="origin"):
        ProblemInstance("bad", WeightedL1(), A, ConstraintDual(Box(1.0, 2.0), np.zeros(2)))
    with pytest.raises(ValueError, match="offset"):
        ProblemInstance("bad", WeightedL1(), A, LipschitzDual(Box(-1.0, 1.0), offset=np.zeros(5)))


def test_oracle_errors():
    prob = build_sqrt_lasso()
    with pytest.raises(OracleNotApplicable):
        reference_solution(prob, "analytic")
    with pytest.raises(OracleNotApplicable):
        reference_solution(prob, "lp_exact")
    with pytest.raises(ValueError, match="unknown"):
        reference_solution(prob, "guess")


def test_degenerate_lp_analytic_reference_and_kkt():
    prob = reference_solution(build_degenerate_lp(), "analytic")
    ref = prob.reference
    assert ref.value == 2.0
    assert ref.x_star[-1] == 1.0
    primal, dual = kkt_residuals(prob, ref.x_star, ref.y_star)
    assert primal <= 1e-12 and dual == 0.0


def test_degenerate_lp_oracle_agrees_with_analytic():
    prob = reference_solution(build_degenerate_lp(p=5, n=12), "lp_exact")
    assert prob.reference.value == pytest.approx(2.0, abs=1e-12)


def test_laplace_noise_moments():
    z = laplace_noise(np.random.default_rng(0), 200000)
    assert abs(z.mean()) < 0.02
    assert abs(z.var() - 2.0) < 0.05
    assert abs(np.median(np.abs(z)) - np.log(2.0)) < 0.01


def test_laplace_noise_inverse_cdf():
    u = np.random.default_rng(5).random(1000)
    z = laplace_noise(np.random.default_rng(5), 1000)
    v = u - 0.5
    assert np.allclose(z, -np.sign(v) * np.log(1 - 2 * np.abs(v)), rtol=1e-12, atol=0)


def test_make_classification_sparse_density():
    data = make_classification(200, 40, seed=2, density=0.1)
    assert set(np.unique(data.labels)) <= {-1.0, 1.0}
    assert 0.05 < data.features.nnz / (200 * 40) < 0.15

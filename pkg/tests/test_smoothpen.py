import math

import numpy as np
import pytest

from epflab.errors import NotPositiveDefinite, OutsideDomain
from epflab.problems import ConstrainedProblem, get_problem, kkt_residual
from epflab.smoothpen import (
    EstimatorConfig,
    barrier_state_sdp,
    barrier_state_soc,
    c1_penalty_sdp,
    c1_penalty_soc,
    estimate_multipliers_sdp,
    estimate_multipliers_soc,
    phi_aux,
)


def test_estimator_config_positivity():
    with pytest.raises(ValueError):
        EstimatorConfig(zeta1=0.0)


def test_multiplier_recovery_eq():
    p = get_problem("toy-eq-1")
    est = estimate_multipliers_soc(p, p.certificate.x_star)
    assert np.allclose(est.mu, [-2.0], atol=1e-10)
    assert est.subproblem_residual <= 1e-8
    assert est.hessian_min_eig > 0.0


def test_multiplier_recovery_socp():
    p = get_problem("toy-socp-1")
    est = estimate_multipliers_soc(p, p.certificate.x_star)
    assert np.allclose(est.lambdas[0], [-2.0, 2.0], atol=1e-10)


def test_multiplier_recovery_sdp():
    p = get_problem("toy-sdp-1")
    est = estimate_multipliers_sdp(p, p.certificate.x_star)
    assert np.allclose(est.lam_sdp, np.diag([1.0, 0.0]), atol=1e-8)


def test_multiplier_estimate_unconstrained():
    bare = ConstrainedProblem(name="bare", dim=1, objective=lambda x: float(x[0] ** 2))
    est = estimate_multipliers_soc(bare, np.array([0.3]))
    assert est.lambdas == ()
    assert est.mu.shape == (0,)
    assert est.subproblem_residual == 0.0


def test_degenerate_point_raises_then_lstsq():
    # Toy-SOCP-2 at its optimum has a one-dimensional multiplier family,
    # so the normal matrix is singular.
    p = get_problem("toy-socp-2")
    with pytest.raises(NotPositiveDefinite):
        estimate_multipliers_soc(p, p.certificate.x_star)
    est = estimate_multipliers_soc(p, p.certificate.x_star, on_degenerate="lstsq")
    assert est.degenerate
    assert est.subproblem_residual <= 1e-8
    # The min-norm representative is still a valid KKT pair.
    assert kkt_residual(p, p.certificate.x_star, lam=est.lambdas, mu=est.mu) <= 1e-6


def test_ridge_effect_of_zeta2():
    p = get_problem("toy-eq-1")
    x = np.array([1.0, 0.0])  # h = -1 infeasible, grad f = (2, 0) nonzero
    small = estimate_multipliers_soc(p, x, EstimatorConfig(zeta2=1.0))
    large = estimate_multipliers_soc(p, x, EstimatorConfig(zeta2=10.0))
    assert np.linalg.norm(large.mu) < np.linalg.norm(small.mu)


def test_estimator_consistency_kkt():
    for name in ("toy-eq-1", "toy-socp-1"):
        p = get_problem(name)
        est = estimate_multipliers_soc(p, p.certificate.x_star)
        assert kkt_residual(p, p.certificate.x_star, lam=est.lambdas, mu=est.mu) <= 1e-6


def test_barrier_state_examples():
    p = get_problem("toy-eq-1")
    est = estimate_multipliers_soc(p, p.certificate.x_star)
    state = barrier_state_soc(p, np.array([0.0, 0.0]), 1.0, 2.0,
                              estimate_multipliers_soc(p, np.array([0.0, 0.0])))
    assert state.b_val == pytest.approx(-3.0)
    assert not state.inside_domain
    q = get_problem("toy-socp-1")
    est_q = estimate_multipliers_soc(q, q.certificate.x_star)
    st = barrier_state_soc(q, q.certificate.x_star, 1.0, 2.0, est_q)
    assert st.p_val == pytest.approx(1.0 / 9.0)
    assert st.inside_domain


def test_barrier_state_feasible_no_multipliers():
    bare = ConstrainedProblem(name="bare", dim=1, objective=lambda x: float(x[0] ** 2))
    est = estimate_multipliers_soc(bare, np.array([0.1]))
    st = barrier_state_soc(bare, np.array([0.1]), 1.0, 2.0, est)
    assert st.a_val == st.p_val == st.b_val == st.q_val == 1.0


def test_barrier_parameter_validation():
    p = get_problem("toy-socp-1")
    est = estimate_multipliers_soc(p, p.certificate.x_star)
    with pytest.raises(ValueError):
        barrier_state_soc(p, p.certificate.x_star, -1.0, 2.0, est)
    with pytest.raises(ValueError):
        barrier_state_soc(p, p.certificate.x_star, 1.0, 1.5, est)
    q = get_problem("toy-sdp-1")
    est_q = estimate_multipliers_sdp(q, q.certificate.x_star)
    with pytest.raises(ValueError):
        barrier_state_sdp(q, q.certificate.x_star, 1.0, 0.5, est_q)


def test_c1_kkt_fixed_value():
    for name, func in (("toy-socp-1", c1_penalty_soc), ("toy-socp-2", c1_penalty_soc),
                       ("toy-sdp-1", c1_penalty_sdp)):
        p = get_problem(name)
        for c in (0.5, 1.0, 10.0, 100.0):
            assert abs(func(p, p.certificate.x_star, c) - p.certificate.f_star) <= 1e-8


def test_c1_feasible_upper_bound():
    p = get_problem("toy-socp-1")
    x = np.array([2.0, 0.0])
    val = c1_penalty_soc(p, x, 50.0)
    assert val <= p.f(x) + 1e-10


def test_c1_eq_feasible_value():
    p = get_problem("toy-eq-1")
    assert c1_penalty_soc(p, np.array([1.0, 1.0]), 3.0) == pytest.approx(2.0, abs=1e-8)


def test_c1_outside_domain_infinite():
    p = get_problem("toy-eq-1")
    assert c1_penalty_soc(p, np.array([3.0, 3.0]), 1.0) == math.inf
    q = get_problem("toy-sdp-1")
    assert c1_penalty_sdp(q, np.array([3.0, -3.0]), 1.0) == math.inf


def test_c1_requires_positive_c():
    p = get_problem("toy-socp-1")
    with pytest.raises(ValueError):
        c1_penalty_soc(p, p.certificate.x_star, 0.0)


def test_c1_monotone_in_c():
    p = get_problem("toy-socp-1")
    rng = np.random.default_rng(0)
    checked = 0
    while checked < 100:
        x = rng.uniform(-1, 1, size=2)
        v1 = c1_penalty_soc(p, x, 1.0)
        if not math.isfinite(v1):
            continue
        v2 = c1_penalty_soc(p, x, 4.0)
        assert v2 >= v1 - 1e-10
        checked += 1


def test_c1_sdp_zero_multiplier_at_stationary_interior():
    # Unconstrained minimum strictly inside the matrix constraint:
    # lambda(x) = 0 and the penalty reduces to f.
    base = get_problem("toy-sdp-1")
    prob = ConstrainedProblem(
        name="sdp-interior", dim=2,
        objective=lambda x: float((x[0] + 1.0) ** 2 + (x[1] - 1.0) ** 2),
        gradient=lambda x: np.array([2.0 * (x[0] + 1.0), 2.0 * (x[1] - 1.0)]),
        sdp_block=base.sdp_block,
        lower=base.lower, upper=base.upper,
    )
    x = np.array([-1.0, 1.0])  # grad f = 0, G = diag(-1.5, -1) strictly feasible
    est = estimate_multipliers_sdp(prob, x)
    assert np.linalg.norm(est.lam_sdp) <= 1e-10
    assert abs(c1_penalty_sdp(prob, x, 10.0) - prob.f(x)) <= 1e-10


def test_phi_aux_representation():
    p = get_problem("toy-socp-1")
    from epflab.smoothpen import estimate_multipliers_soc as est_soc, barrier_state_soc as bstate
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 50:
        x = rng.uniform(-2, 2, size=2)
        full = c1_penalty_soc(p, x, 5.0)
        if not math.isfinite(full):
            continue
        est = est_soc(p, x, on_degenerate="lstsq")
        state = bstate(p, x, 1.0, 2.0, est)
        val = p.f(x) + phi_aux(p, x, 5.0) / state.p_val
        assert abs(val - full) <= 1e-9
        checked += 1


def test_phi_aux_zero_at_kkt_and_nonpositive_on_feasible():
    p = get_problem("toy-socp-1")
    assert abs(phi_aux(p, p.certificate.x_star, 3.0)) <= 1e-9
    rng = np.random.default_rng(6)
    for _ in range(50):
        x = p.sample_feasible(rng)
        assert phi_aux(p, x, 3.0) <= 1e-12


def test_phi_aux_outside_domain():
    p = get_problem("toy-eq-1")
    with pytest.raises(OutsideDomain):
        phi_aux(p, np.array([3.0, 3.0]), 1.0)


def test_phi_aux_matches_inner_minimization():
    # Direct sampling of y in K - g(x) must not beat the closed form.
    p = get_problem("toy-socp-1")
    x = np.array([0.4, -0.3])
    c = 2.0
    est = estimate_multipliers_soc(p, x, on_degenerate="lstsq")
    state = barrier_state_soc(p, x, 1.0, 2.0, est)
    closed = phi_aux(p, x, c)
    g_val = p.soc_blocks[0].g(x)
    lam = est.lambdas[0]

    # Exact cone parameterization z = (s + |t|, t) with s >= 0 turns the
    # inner problem into a box-constrained minimization.
    def inner(v):
        z = np.array([v[0] + abs(v[1]), v[1]])
        y = z - g_val
        return -state.p_val * float(lam @ y) + 0.5 * c * float(y @ y)

    from epflab.solvers import SolverConfig, minimize

    res = minimize(inner, np.array([0.0, -6.0]), np.array([10.0, 6.0]),
                   SolverConfig(n_starts=16, seed=0))
    assert closed <= res.value + 1e-9
    assert abs(closed - res.value) <= 1e-6

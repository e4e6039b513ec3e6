import math

import numpy as np
import pytest

from epflab.errors import DimensionMismatch, UnknownProblem
from epflab.problems import (
    fd_gradient,
    feasibility_gap,
    get_problem,
    kkt_residual,
    registry,
)


def test_fd_gradient_quadratic():
    g = fd_gradient(lambda x: float(x[0] ** 2 + x[1] ** 2), np.array([1.0, 1.0]))
    assert np.allclose(g, [2.0, 2.0], atol=1e-8)


def test_fd_gradient_linear():
    g = fd_gradient(lambda x: float(x[0]), np.array([0.3, -2.0]))
    assert np.allclose(g, [1.0, 0.0], atol=1e-10)


def test_fd_gradient_socp_objective():
    p = get_problem("toy-socp-1")
    g = fd_gradient(p.objective, np.array([0.0, 2.0]))
    assert np.allclose(g, [0.0, 0.0], atol=1e-8)


def test_fd_gradient_bad_step():
    with pytest.raises(ValueError):
        fd_gradient(lambda x: float(x[0]), np.array([0.0]), step=0.0)


def test_registry_names_and_lookup():
    names = [p.name for p in registry()]
    assert names == ["toy-lin-1", "toy-eq-1", "toy-socp-1", "toy-socp-2", "toy-sdp-1"]
    assert get_problem("TOY-EQ-1").certificate.f_star == 2.0
    assert np.allclose(get_problem("toy-socp-1").certificate.lambda_star[0], [-2.0, 2.0])
    with pytest.raises(UnknownProblem):
        get_problem("nope")


def test_certificates_validate():
    for p in registry():
        cert = p.certificate
        assert feasibility_gap(p, cert.x_star).total <= 1e-9
        assert abs(p.f(cert.x_star) - cert.f_star) <= 1e-9


def test_feasibility_gap_examples():
    assert feasibility_gap(get_problem("toy-socp-1"), np.array([1.0, 1.0])).total == 0.0
    gap = feasibility_gap(get_problem("toy-eq-1"), np.array([0.0, 0.0]))
    assert abs(gap.eq_gap - 2.0) <= 1e-15
    with pytest.raises(DimensionMismatch):
        feasibility_gap(get_problem("toy-eq-1"), np.zeros(3))


def test_feasibility_gap_box_component():
    p = get_problem("toy-lin-1")
    gap = feasibility_gap(p, np.array([3.0]))
    assert gap.box_gap == pytest.approx(1.0)


def test_kkt_residual_certified():
    p = get_problem("toy-socp-1")
    assert kkt_residual(p, p.certificate.x_star, lam=p.certificate.lambda_star) <= 1e-9
    q = get_problem("toy-eq-1")
    assert kkt_residual(q, q.certificate.x_star, mu=q.certificate.mu_star) <= 1e-9


def test_kkt_residual_wrong_multiplier():
    q = get_problem("toy-eq-1")
    res = kkt_residual(q, np.array([1.0, 1.0]), mu=np.array([0.0]))
    assert abs(res - 2.0 * math.sqrt(2.0)) <= 1e-12


def test_kkt_residual_sdp():
    p = get_problem("toy-sdp-1")
    assert kkt_residual(p, p.certificate.x_star, lam_sdp=p.certificate.lambda_sdp_star) <= 1e-9


def test_kkt_residual_dimension_checks():
    q = get_problem("toy-eq-1")
    with pytest.raises(DimensionMismatch):
        kkt_residual(q, np.array([1.0, 1.0]))  # missing mu
    p = get_problem("toy-socp-1")
    with pytest.raises(DimensionMismatch):
        kkt_residual(p, np.array([1.0, 1.0]), lam=[np.zeros(3)])


def test_fd_matches_analytic_gradients():
    rng = np.random.default_rng(0)
    for p in registry():
        lo, hi = p.box()
        for _ in range(100):
            x = lo + rng.uniform(size=p.dim) * (hi - lo)
            num = fd_gradient(p.objective, x)
            ana = p.grad_f(x)
            assert np.linalg.norm(num - ana) <= 1e-5 * (1.0 + np.linalg.norm(ana))


def test_sample_feasible_stays_feasible():
    rng = np.random.default_rng(1)
    for p in registry():
        for _ in range(50):
            x = p.sample_feasible(rng)
            assert feasibility_gap(p, x).total <= 1e-9


def test_project_feasible_is_feasible():
    rng = np.random.default_rng(2)
    for p in registry():
        lo, hi = p.box()
        for _ in range(50):
            x = lo + rng.uniform(size=p.dim) * (hi - lo)
            proj = p.project_feasible(x)
            # The oracle projects onto the constraint set M (cone and
            # equality parts); the box A is handled separately.
            gap = feasibility_gap(p, proj)
            assert gap.soc_gap + gap.eq_gap <= 1e-8

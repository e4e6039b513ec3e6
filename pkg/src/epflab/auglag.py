"""Rockafellar-Wets augmented Lagrangian: dualizing parameterizations,
augmenting functions, a grid oracle for the inner infimum, the
Hestenes-Powell-Rockafellar closed form, and the strict-exactness probe."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import UnboundedBelow
from .problems import ConstrainedProblem
from .solvers import MinimizeResult, SolverConfig, minimize

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DualizingParam:
    """Perturbation scheme Phi(x, p) with Phi(x, 0) = f(x) on the feasible set."""

    evaluator: Callable[[np.ndarray, np.ndarray], float]
    p_dim: int

    def __call__(self, x, p) -> float:
        return float(self.evaluator(np.asarray(x, float), np.asarray(p, float)))


@dataclass
class AugmentingFn:
    """Nonnegative sigma with sigma(0) = 0 and sigma(p) > 0 elsewhere."""

    evaluator: Callable[[np.ndarray], float]
    valley_checked: bool = False

    def __call__(self, p) -> float:
        return float(self.evaluator(np.atleast_1d(np.asarray(p, float))))


def half_norm_squared() -> AugmentingFn:
    return AugmentingFn(lambda p: 0.5 * float(p @ p))


def norm_augmenting() -> AugmentingFn:
    return AugmentingFn(lambda p: float(np.linalg.norm(p)))


def flat_tail_augmenting() -> AugmentingFn:
    """Valley-violating fixture: vanishes again at ||p|| = 2."""
    return AugmentingFn(lambda p: min(float(np.linalg.norm(p)), max(0.0, 2.0 - float(np.linalg.norm(p)))))


@dataclass(frozen=True)
class ALValue:
    value: float
    inner_argmin: Optional[np.ndarray]
    method: str


@dataclass(frozen=True)
class GridSpec:
    lower: np.ndarray
    upper: np.ndarray
    n_per_axis: int = 41


# Stiffness of the finite-valued stand-in for the exact equality shift
# parameterization; large enough that the inner minimum matches the
# indicator version to ~1e-8 at benchmark scales.
EQ_STIFFNESS = 1e12


def equality_parameterization(problem: ConstrainedProblem, stiffness: float = EQ_STIFFNESS) -> DualizingParam:
    """Constraint-shift parameterization for equality constraints.

    The exact scheme is f(x) plus the indicator of h(x) + p = 0, which a
    grid oracle cannot sample; a stiff quadratic (stiffness/2)||h + p||^2
    stands in for the indicator.  Phi(x, 0) = f(x) holds exactly on the
    feasible set.
    """

    def evaluate(x, p):
        resid = problem.h(x) + p
        return problem.f(x) + 0.5 * stiffness * float(resid @ resid)

    return DualizingParam(evaluator=evaluate, p_dim=problem.n_eq)


def inequality_parameterization(ineq: Callable, n_ineq: int, objective: Callable) -> DualizingParam:
    """Slack-shift parameterization for scalar inequalities u(x) <= 0:
    Phi(x, p) = f(x) if u(x) + p <= 0 componentwise, +inf otherwise."""

    def evaluate(x, p):
        u = np.atleast_1d(np.asarray(ineq(x), float))
        if np.all(u + p <= 0.0):
            return float(objective(x))
        return math.inf

    return DualizingParam(evaluator=evaluate, p_dim=n_ineq)


def scalar_inequalities(problem: ConstrainedProblem):
    """Scalar-inequality view u(x) <= 0 derived from flat SOC blocks."""
    flat_blocks = [b for b in problem.soc_blocks if b.scalar]
    if len(flat_blocks) != len(problem.soc_blocks):
        raise ValueError(f"{problem.name} has non-scalar cone blocks; no HPR view")
    if problem.sdp_block is not None:
        raise ValueError(f"{problem.name} has a matrix block; no HPR view")

    def u(x):
        return np.array([-float(np.asarray(b.g(x))[0]) for b in flat_blocks])

    return u, len(flat_blocks)


def _golden_section(func, lo: float, hi: float, iters: int = 80) -> Tuple[float, float]:
    a, b = lo, hi
    x1 = b - GOLDEN * (b - a)
    x2 = a + GOLDEN * (b - a)
    f1, f2 = func(x1), func(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - GOLDEN * (b - a)
            f1 = func(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + GOLDEN * (b - a)
            f2 = func(x2)
    mid = 0.5 * (a + b)
    return mid, func(mid)


def al_eval_grid(
    dual: DualizingParam,
    aug: AugmentingFn,
    x,
    lam,
    c: float,
    grid: GridSpec,
) -> ALValue:
    """Inner infimum of Phi(x, p) - <lam, p> + c*sigma(p) by exhaustive
    grid search plus one coordinate-wise golden-section refinement pass.

    Validation oracle only; perturbation dimension is capped at 3.
    """
    if dual.p_dim > 3:
        raise ValueError("grid oracle supports perturbation dimension <= 3")
    if c <= 0:
        raise ValueError("penalty parameter c must be positive")
    x = np.asarray(x, dtype=float)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))

    def psi(p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        val = dual(x, p) - float(lam @ p) + c * aug(p)
        return val if not math.isnan(val) else math.inf

    lower = np.atleast_1d(np.asarray(grid.lower, dtype=float))
    upper = np.atleast_1d(np.asarray(grid.upper, dtype=float))
    axes = [np.linspace(lower[i], upper[i], grid.n_per_axis) for i in range(dual.p_dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    values = np.array([psi(pt) for pt in points])
    finite = np.isfinite(values)
    if not np.any(finite):
        raise UnboundedBelow("no finite value on the perturbation grid")
    best_flat = int(np.argmin(np.where(finite, values, math.inf)))
    best_idx = np.unravel_index(best_flat, mesh[0].shape)
    best_p = points[best_flat].copy()
    # Values still decreasing at the grid edge signal inf_p = -inf risk.
    for axis in range(dual.p_dim):
        idx = best_idx[axis]
        if idx in (0, grid.n_per_axis - 1):
            inward = list(best_idx)
            inward[axis] += 1 if idx == 0 else -1
            inward_flat = int(np.ravel_multi_index(tuple(inward), mesh[0].shape))
            if values[best_flat] < values[inward_flat] - 1e-12:
                raise UnboundedBelow(f"grid values decrease outward along axis {axis}")
    spacing = [(upper[i] - lower[i]) / (grid.n_per_axis - 1) for i in range(dual.p_dim)]
    p = best_p
    for _ in range(2):
        for axis in range(dual.p_dim):
            def along(t, axis=axis):
                q = p.copy()
                q[axis] = t
                return psi(q)

            lo_t = max(lower[axis], p[axis] - spacing[axis])
            hi_t = min(upper[axis], p[axis] + spacing[axis])
            t_best, _ = _golden_section(along, lo_t, hi_t)
            candidate = p.copy()
            candidate[axis] = t_best
            if psi(candidate) <= psi(p):
                p = candidate
    return ALValue(value=float(psi(p)), inner_argmin=p, method="grid")


def hpr_closed_form(problem: ConstrainedProblem, x, lam_ineq=None, mu=None, c: float = 1.0) -> float:
    """Hestenes-Powell-Rockafellar augmented Lagrangian in closed form,
    with sigma = (1/2)||p||^2:

      f + sum_j (1/2c)([lam_j + c u_j]_+^2 - lam_j^2)   (inequalities u_j <= 0)
        + <mu, h> + (c/2)||h||^2                        (equalities)
    """
    if c <= 0:
        raise ValueError("penalty parameter c must be positive")
    x = np.asarray(x, dtype=float)
    value = problem.f(x)
    if problem.soc_blocks:
        u, n_ineq = scalar_inequalities(problem)
        lam_ineq = np.zeros(n_ineq) if lam_ineq is None else np.atleast_1d(np.asarray(lam_ineq, float))
        u_val = u(x)
        plus = np.maximum(lam_ineq + c * u_val, 0.0)
        value += float(np.sum(plus ** 2 - lam_ineq ** 2)) / (2.0 * c)
    if problem.n_eq > 0:
        mu = np.zeros(problem.n_eq) if mu is None else np.atleast_1d(np.asarray(mu, float))
        h_val = problem.h(x)
        value += float(mu @ h_val) + 0.5 * c * float(h_val @ h_val)
    return float(value)


def valley_check(
    aug: AugmentingFn,
    radii: Sequence[float],
    n_samples: int = 2000,
    seed: int = 0,
    p_dim: int = 1,
    outer_radius: Optional[float] = None,
) -> bool:
    """Sampled valley-at-zero test: sigma must stay bounded away from 0
    outside every neighborhood of the origin."""
    radii = list(radii)
    if not radii or any(r <= 0 for r in radii) or sorted(radii) != radii:
        raise ValueError("radii must be positive and ascending")
    rng = np.random.default_rng(seed)
    outer = outer_radius if outer_radius is not None else max(4.0, 4.0 * max(radii))
    ok = True
    for r in radii:
        smallest = math.inf
        for _ in range(n_samples):
            direction = rng.normal(size=p_dim)
            norm = float(np.linalg.norm(direction))
            if norm == 0.0:
                continue
            magnitude = rng.uniform(r, outer)
            smallest = min(smallest, aug(direction / norm * magnitude))
        if not smallest > 0.0:
            ok = False
    aug.valley_checked = ok
    return ok


@dataclass(frozen=True)
class StrictExactnessVerdict:
    per_c: Tuple[Tuple[float, bool], ...]
    first_passing_c: Optional[float]
    details: Tuple[MinimizeResult, ...]


def strict_exactness_probe(
    problem: ConstrainedProblem,
    al_func: Callable[[np.ndarray, float], float],
    c_list: Sequence[float],
    cfg: SolverConfig = SolverConfig(),
    f_tol: float = 1e-4,
    x_tol: float = 1e-4,
) -> StrictExactnessVerdict:
    """For each c, multistart-minimize the augmented Lagrangian over the
    box and compare minimum and argmin against the certificate."""
    cert = problem.certificate
    if cert is None:
        raise ValueError(f"{problem.name} carries no certificate")
    lower, upper = problem.box()
    per_c = []
    details = []
    for c in c_list:
        result = minimize(lambda z: al_func(z, c), lower, upper, cfg)
        passed = (
            abs(result.value - cert.f_star) <= f_tol
            and float(np.linalg.norm(result.x - cert.x_star)) <= x_tol
        )
        per_c.append((float(c), passed))
        details.append(result)
    # Smallest tested c from which every larger tested c also passes.
    first = None
    for i, (c, ok) in enumerate(per_c):
        if ok and all(flag for _, flag in per_c[i:]):
            first = c
            break
    return StrictExactnessVerdict(per_c=tuple(per_c), first_passing_c=first, details=tuple(details))

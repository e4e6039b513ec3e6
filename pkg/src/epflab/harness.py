"""Empirical exactness harness: penalty factory, c-sweeps, localization
probes, least-exact-penalty-parameter estimation, and report I/O.

The probes turn the localization-principle conditions (penalty-type
behavior, non-degeneracy, local exactness, sublevel boundedness) into
sampling-based verdicts on certified benchmark problems; they are
evidence, not proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .auglag import hpr_closed_form
from .errors import AllStartsFailed, NonMonotonePredicate, UnknownProblem
from .penalties import LinearPenalty, QFunction, linear_eval, qpen_eval, default_phi
from .problems import ConstrainedProblem, feasibility_gap, get_problem
from .smoothpen import EstimatorConfig, c1_penalty_soc, c1_penalty_sdp
from .solvers import MinimizeResult, SolverConfig, minimize, polish

PENALTY_KINDS = ("linear", "qorder", "c1-socp", "c1-sdp", "al-hpr")


@dataclass(frozen=True)
class PenaltyHandle:
    """A separating function F(x, c) bound to one problem, plus the value
    the minimum should reach under exactness."""

    kind: str
    problem: ConstrainedProblem
    func: Callable[[np.ndarray, float], float]
    params: Dict[str, float]

    def __call__(self, x, c: float) -> float:
        return self.func(x, c)

    @property
    def target_value(self) -> Optional[float]:
        cert = self.problem.certificate
        return None if cert is None else cert.f_star


def make_penalty(
    problem: ConstrainedProblem,
    kind: str,
    q: float = 1.0,
    alpha: float = 1.0,
    kappa: Optional[float] = None,
    zeta1: float = 1.0,
    zeta2: float = 1.0,
    lam=None,
    mu=None,
) -> PenaltyHandle:
    """Build the requested separating function for a problem.

    For ``al-hpr`` the tuning multipliers default to the certificate's
    HPR pair (scalar-inequality multipliers, then equality multipliers).
    """
    if kind not in PENALTY_KINDS:
        raise UnknownProblem(f"unknown penalty kind {kind!r}")
    params: Dict[str, float] = {}
    if kind == "linear":
        pen = LinearPenalty(problem)
        func = lambda x, c: linear_eval(pen, x, c)
    elif kind == "qorder":
        qf = QFunction.q_order(q)
        phi = default_phi(problem)
        func = lambda x, c: qpen_eval(qf, problem, phi, x, c)
        params["q"] = q
    elif kind == "c1-socp":
        cfg = EstimatorConfig(zeta1=zeta1, zeta2=zeta2)
        kap = 2.0 if kappa is None else kappa
        func = lambda x, c: c1_penalty_soc(problem, x, c, alpha=alpha, kappa=kap, cfg=cfg)
        params.update(alpha=alpha, kappa=kap, zeta1=zeta1, zeta2=zeta2)
    elif kind == "c1-sdp":
        cfg = EstimatorConfig(zeta1=zeta1, zeta2=zeta2)
        kap = 1.0 if kappa is None else kappa
        func = lambda x, c: c1_penalty_sdp(problem, x, c, alpha=alpha, kappa=kap, cfg=cfg)
        params.update(alpha=alpha, kappa=kap, zeta1=zeta1, zeta2=zeta2)
    else:  # al-hpr
        cert = problem.certificate
        if lam is None and cert is not None:
            lam = cert.hpr_ineq_star
        if mu is None and cert is not None:
            mu = cert.mu_star
        lam_arr = None if lam is None else np.atleast_1d(np.asarray(lam, dtype=float))
        mu_arr = None if mu is None else np.atleast_1d(np.asarray(mu, dtype=float))
        func = lambda x, c: hpr_closed_form(problem, x, lam_ineq=lam_arr, mu=mu_arr, c=c)
        if lam_arr is not None:
            params.update({f"lambda_{i}": float(v) for i, v in enumerate(lam_arr)})
        if mu_arr is not None:
            params.update({f"mu_{i}": float(v) for i, v in enumerate(mu_arr)})
    return PenaltyHandle(kind=kind, problem=problem, func=func, params=params)


@dataclass(frozen=True)
class SweepRecord:
    c: float
    best_x: Tuple[float, ...]
    best_F: float
    feasibility_gap_total: float
    dist_to_xstar: float
    n_starts_agreeing: int
    failed: bool = False


def geometric_grid(c_min: float, c_max: float, n_steps: int) -> List[float]:
    if not (0 < c_min < c_max) or n_steps < 2:
        raise ValueError("need 0 < c_min < c_max and at least two steps")
    return list(np.geomspace(c_min, c_max, n_steps))


def c_sweep(
    penalty: PenaltyHandle,
    c_grid: Sequence[float],
    cfg: SolverConfig = SolverConfig(),
) -> List[SweepRecord]:
    """One multistart minimization per penalty parameter; solver failures
    are recorded per-c, not raised."""
    if any(b <= a for a, b in zip(c_grid, c_grid[1:])):
        raise ValueError("c grid must be increasing")
    problem = penalty.problem
    lower, upper = problem.box()
    cert = problem.certificate
    records = []
    for c in c_grid:
        try:
            result = minimize(lambda z: penalty(z, c), lower, upper, cfg)
        except AllStartsFailed:
            records.append(
                SweepRecord(
                    c=float(c),
                    best_x=tuple(float("nan") for _ in range(problem.dim)),
                    best_F=math.inf,
                    feasibility_gap_total=math.inf,
                    dist_to_xstar=math.inf,
                    n_starts_agreeing=0,
                    failed=True,
                )
            )
            continue
        gap = feasibility_gap(problem, result.x).total
        dist = (
            float(np.linalg.norm(result.x - cert.x_star)) if cert is not None else math.nan
        )
        records.append(
            SweepRecord(
                c=float(c),
                best_x=tuple(float(v) for v in result.x),
                best_F=float(result.value),
                feasibility_gap_total=float(gap),
                dist_to_xstar=dist,
                n_starts_agreeing=result.n_starts_agreeing,
            )
        )
    return records


def penalty_type_probe(records: Sequence[SweepRecord]) -> bool:
    """Feasibility gaps along the sweep must shrink to ~0 without growing
    (10% noise allowance), mirroring cluster points of minimizers being
    feasible as c grows."""
    if len(records) < 4:
        raise ValueError("need at least 4 sweep records")
    if any(r.failed for r in records):
        return False
    gaps = [r.feasibility_gap_total for r in records]
    if gaps[-1] > 1e-6:
        return False
    # Gaps below 1e-6 are treated as zero: at that scale the sequence is
    # solver noise, not a trend.
    for prev, cur in zip(gaps, gaps[1:]):
        if cur > 1e-6 and cur > 1.1 * prev:
            return False
    return True


def nondegeneracy_probe(records: Sequence[SweepRecord], radius: float) -> bool:
    """Minimizers must exist and stay inside a fixed norm ball."""
    if not records:
        raise ValueError("need at least one record")
    for r in records:
        if r.failed or not math.isfinite(r.best_F):
            return False
        if float(np.linalg.norm(r.best_x)) > radius:
            return False
    return True


def local_exactness_probe(
    penalty: PenaltyHandle,
    x_star,
    c_list: Sequence[float],
    radius: float = 0.5,
    n_samples: int = 200,
    seed: int = 0,
    slack: float = 1e-9,
) -> bool:
    """True iff from some tested c onward, x_star minimizes F(., c) over a
    sampled neighborhood intersected with the box."""
    x_star = np.asarray(x_star, dtype=float)
    problem = penalty.problem
    lower, upper = problem.box()
    rng = np.random.default_rng(seed)
    dim = x_star.shape[0]
    samples = []
    for _ in range(n_samples):
        direction = rng.normal(size=dim)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            continue
        r = radius * rng.uniform() ** (1.0 / dim)
        samples.append(np.clip(x_star + direction / norm * r, lower, upper))
    passing = []
    for c in c_list:
        base = penalty(x_star, c)
        ok = all(penalty(x, c) >= base - slack for x in samples)
        passing.append(ok)
    for i, ok in enumerate(passing):
        if ok and all(passing[i:]):
            return True
    return False


def sublevel_bounded_probe(
    penalty: PenaltyHandle,
    c0: float,
    f_star: float,
    expansion: float = 2.0,
    n_samples: int = 2000,
    seed: int = 0,
) -> bool:
    """Boundedness evidence for {x : F(x, c0) < f*}: no point on the
    expanded shell around the box may beat f*.  Sampling evidence only."""
    problem = penalty.problem
    lower, upper = problem.box()
    center = 0.5 * (lower + upper)
    half = 0.5 * (upper - lower)
    rng = np.random.default_rng(seed)
    found_shell = 0
    for _ in range(n_samples):
        point = center + rng.uniform(-expansion, expansion, size=problem.dim) * half
        if np.all(point >= lower) and np.all(point <= upper):
            continue
        found_shell += 1
        if penalty(point, c0) < f_star - 1e-9:
            return False
    return found_shell > 0


@dataclass(frozen=True)
class CStarResult:
    c_star: Optional[float]
    history: Tuple[Tuple[float, bool], ...]
    confirm: Optional[MinimizeResult] = None


def estimate_c_star(
    penalty: PenaltyHandle,
    c_lo: float,
    c_hi: float,
    tol_rel: float = 0.02,
    cfg: SolverConfig = SolverConfig(),
    strict: bool = True,
    x_tol: float = 1e-4,
    f_tol: float = 1e-4,
    confirm_factor: float = 2.0,
) -> CStarResult:
    """Geometric bisection for the least exact penalty parameter.

    The pass predicate at c: the multistart argmin of F(., c) lies within
    ``x_tol`` of the certified optimum (and, when strict, the minimum
    value matches f* within ``f_tol``).  Bisection presumes passes form
    an up-set in c; the confirmation probe at ``confirm_factor * c_star``
    raises NonMonotonePredicate if that structure is violated.
    """
    if not (0 < c_lo < c_hi):
        raise ValueError("need 0 < c_lo < c_hi")
    problem = penalty.problem
    cert = problem.certificate
    if cert is None:
        raise ValueError(f"{problem.name} carries no certificate")
    lower, upper = problem.box()
    history: List[Tuple[float, bool]] = []

    def predicate(c: float) -> Tuple[bool, Optional[MinimizeResult]]:
        try:
            result = minimize(lambda z: penalty(z, c), lower, upper, cfg)
        except AllStartsFailed:
            history.append((float(c), False))
            return False, None
        x_ref, _ = polish(lambda z: penalty(z, c), result.x, lower, upper, cfg)
        best = x_ref if penalty(x_ref, c) <= result.value else result.x
        value = penalty(best, c)
        ok = float(np.linalg.norm(best - cert.x_star)) <= x_tol
        if strict:
            ok = ok and abs(value - cert.f_star) <= f_tol
        history.append((float(c), ok))
        return ok, result

    hi_ok, _ = predicate(c_hi)
    if not hi_ok:
        return CStarResult(c_star=None, history=tuple(history))
    lo_ok, _ = predicate(c_lo)
    if lo_ok:
        c_star = float(c_lo)
    else:
        lo, hi = c_lo, c_hi
        while hi / lo > 1.0 + tol_rel:
            mid = math.sqrt(lo * hi)
            mid_ok, _ = predicate(mid)
            if mid_ok:
                hi = mid
            else:
                lo = mid
        c_star = math.sqrt(lo * hi)
    confirm_c = confirm_factor * c_star
    confirm = minimize(lambda z: penalty(z, confirm_c), lower, upper, cfg)
    x_ref, _ = polish(lambda z: penalty(z, confirm_c), confirm.x, lower, upper, cfg)
    if penalty(x_ref, confirm_c) <= confirm.value:
        confirm = MinimizeResult(
            x=x_ref,
            value=penalty(x_ref, confirm_c),
            n_starts_used=confirm.n_starts_used,
            n_starts_agreeing=confirm.n_starts_agreeing,
        )
    ok = float(np.linalg.norm(confirm.x - cert.x_star)) <= x_tol
    if strict:
        ok = ok and abs(confirm.value - cert.f_star) <= f_tol
    if not ok:
        raise NonMonotonePredicate(
            f"pass at c={c_star} but fail at c={confirm_c} (value {confirm.value})"
        )
    history.append((float(confirm_c), True))
    return CStarResult(c_star=float(c_star), history=tuple(history), confirm=confirm)

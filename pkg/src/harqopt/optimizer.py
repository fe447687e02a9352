"""Joint rate and threshold optimization under an outage constraint.

The problem: maximize HARQ throughput eta = (1 - P_out)/sum(rho_i P_i)
over per-round rates drawn from a unit grid and over detection thresholds,
subject to P_out <= epsilon, a total-units budget, and box bounds. The
rate subproblem minimizes the Lagrangian L = sum(rho_i P_i) + lambda P_out
on the grid, with bisection driving lambda until the achieved outage meets
the constraint; the threshold subproblem runs projected gradient ascent on
eta at fixed rates; alternating the two yields a monotone objective.

The Lagrangian search evaluates every admissible unit allocation in one
vectorized pass. A compressed recursion over (round, sum units,
sum units squared) cannot represent the objective exactly: the missed-ACK
memory inside P_i and the stop-hazard cross term inside P_out both depend
on the whole prefix-failure path, not just the current sums. Exhaustive
evaluation is cheap at the default scale (M = 4, 64 units, about 6.4e5
paths, well under a second) and is guarded by a scalar brute-force oracle
that must match it bit for bit.

Bit-exactness contract: _failure_table, _occurrence_paths, _outage_paths
and the cost loop mirror the scalar loops of mi_model.p_fail_gaussian,
harq_analysis.occurrence_probabilities and
harq_analysis.outage_from_failures operation for operation, so the
vectorized values equal the scalar route's exactly, not just to rounding.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import feedback_model, harq_analysis, mi_model, numerics
from .errors import GridError, InfeasibleError

_log = logging.getLogger(__name__)

_BRUTE_FORCE_BUDGET = 10_000_000  # raw candidate tuples before budget filter
_PATH_BUDGET = 20_000_000
_FD_STEP = 1e-4  # central-difference step in alpha
_TABLE_CACHE: dict = {}
_TABLE_CACHE_CAP = 4


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the Lagrangian, PGD, and alternating loops."""

    epsilon: float = 0.01
    units_total: int = 64
    lambda_lo: float = 0.0
    lambda_hi: float = 1e6
    lambda_tol: float = 1e-6  # relative bracket width
    pgd_step: float = 0.25
    pgd_tol: float = 1e-4
    pgd_max_iters: int = 60
    alpha_box: tuple[float, float] = (0.0, 3.0)
    alt_max_iters: int = 50
    alt_tol: float = 1e-6
    init_alpha: float = 0.5
    init_alphas: tuple[float, ...] | None = None
    init_units: tuple[int, ...] | None = None

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError("OptimizerConfig: epsilon must lie in (0, 1)")
        if self.units_total < 1:
            raise ValueError("OptimizerConfig: units_total must be positive")
        if not self.lambda_lo < self.lambda_hi:
            raise ValueError("OptimizerConfig: need lambda_lo < lambda_hi")
        if self.lambda_lo < 0.0:
            raise ValueError("OptimizerConfig: lambda_lo must be non-negative")
        lo, hi = self.alpha_box
        if not lo <= hi:
            raise ValueError("OptimizerConfig: alpha box is empty")
        if self.pgd_step <= 0.0 or self.pgd_tol <= 0.0 or self.alt_tol <= 0.0:
            raise ValueError("OptimizerConfig: steps and tolerances must be positive")
        if self.pgd_max_iters < 1 or self.alt_max_iters < 1:
            raise ValueError("OptimizerConfig: iteration caps must be positive")


@dataclass(frozen=True)
class RateGrid:
    """Unit discretization of the rate box: rho_k = n_k * unit_rho."""

    unit_rho: float
    min_units: int
    max_units: int
    units_total: int

    def __post_init__(self):
        if not (math.isfinite(self.unit_rho) and self.unit_rho > 0.0):
            raise ValueError("RateGrid: unit_rho must be positive")
        if not 1 <= self.min_units <= self.max_units:
            raise ValueError("RateGrid: need 1 <= min_units <= max_units")
        if self.units_total < self.min_units:
            raise ValueError("RateGrid: budget below min_units")


@dataclass(frozen=True)
class Solution:
    """Alternating-optimization result with its per-iteration objective."""

    policy: harq_analysis.HarqPolicy
    lambda_star: float
    breakdown: harq_analysis.PerformanceBreakdown
    iterations: int
    converged: bool
    feasible: bool
    trace: tuple[float, ...]


def make_rate_grid(n_b: int, n_m: int, units_total: int, min_units: int = 1,
                   max_units: int | None = None) -> RateGrid:
    """Grid whose full budget spends the whole mother codeword: unit_rho = n_m/(units_total n_b)."""
    if n_b < 1 or n_m < 1 or units_total < 1:
        raise ValueError("make_rate_grid: sizes must be positive")
    if max_units is None:
        max_units = units_total
    return RateGrid(
        unit_rho=n_m / (units_total * n_b),
        min_units=min_units,
        max_units=max_units,
        units_total=units_total,
    )


def _dl_key(dl) -> tuple:
    return (dl.snr_db, dl.snr_linear, dl.mean_mi, dl.var_mi)


def _enumerate_units(grid: RateGrid, m: int) -> np.ndarray:
    """All unit allocations within bounds and budget, lexicographically ascending."""
    lo, hi, total = grid.min_units, grid.max_units, grid.units_total
    if lo * m > total:
        raise InfeasibleError(
            f"unit bounds admit no allocation: {m} rounds at >= {lo} units "
            f"exceed the budget of {total}"
        )
    vals = np.arange(lo, hi + 1, dtype=np.int64)
    paths = vals.reshape(-1, 1)
    paths = paths[paths[:, 0] <= total - (m - 1) * lo]
    for k in range(1, m):
        n0 = paths.shape[0]
        ext = np.empty((n0 * vals.size, k + 1), dtype=np.int64)
        ext[:, :k] = np.repeat(paths, vals.size, axis=0)
        ext[:, k] = np.tile(vals, n0)
        # prune partial sums that cannot stay within budget
        cap = total - (m - k - 1) * lo
        paths = ext[ext.sum(axis=1) <= cap]
        if paths.shape[0] > _PATH_BUDGET:
            raise GridError(
                f"allocation space exceeds {_PATH_BUDGET} paths; shrink the grid"
            )
    return paths


def _failure_table(grid: RateGrid, m: int, dl) -> tuple[np.ndarray, np.ndarray]:
    """(units, F) with F[p, k] the Gaussian prefix-failure probability of path p.

    Accumulation order mirrors mi_model.p_fail_gaussian exactly.
    """
    key = (grid.unit_rho, grid.min_units, grid.max_units, grid.units_total, m,
           _dl_key(dl))
    hit = _TABLE_CACHE.get(key)
    if hit is not None:
        return hit
    units = _enumerate_units(grid, m)
    sigma = math.sqrt(dl.var_mi)
    n = units.shape[0]
    s1 = np.zeros(n)
    s2 = np.zeros(n)
    F = np.empty((n, m))
    for k in range(m):
        rho = units[:, k].astype(np.float64) * grid.unit_rho
        s1 = s1 + rho
        s2 = s2 + rho * rho
        F[:, k] = numerics.q_function((s1 * dl.mean_mi - 1.0) / (np.sqrt(s2) * sigma))
    while len(_TABLE_CACHE) >= _TABLE_CACHE_CAP:
        _TABLE_CACHE.pop(next(iter(_TABLE_CACHE)))
    _TABLE_CACHE[key] = (units, F)
    return units, F


def _occurrence_paths(F: np.ndarray, p_nack, p_ack) -> np.ndarray:
    # mirrors harq_analysis.occurrence_probabilities
    n, m = F.shape
    P = np.empty((n, m))
    P[:, 0] = 1.0
    for i in range(2, m + 1):
        term = F[:, i - 2]
        for j in range(i - 1):
            term = term * (1.0 - p_nack[j])
        total = term
        for k in range(1, i):
            term = (1.0 if k == 1 else F[:, k - 2]) - F[:, k - 1]
            for j in range(k - 1):
                term = term * (1.0 - p_nack[j])
            for j in range(k - 1, i - 1):
                term = term * p_ack[j]
            total = total + term
        P[:, i - 1] = total
    return P


def _outage_paths(F: np.ndarray, p_nack) -> np.ndarray:
    # mirrors harq_analysis.outage_from_failures
    n, m = F.shape
    inner = np.ones(n)
    surv = 1.0
    for i in range(m - 1):
        inner = inner - p_nack[i] * F[:, i] * surv
        surv = surv * (1.0 - p_nack[i])
    return 1.0 - inner * (1.0 - F[:, m - 1])


def _cost_outage(units: np.ndarray, F: np.ndarray, unit_rho: float,
                 rates: feedback_model.FeedbackErrorRates) -> tuple[np.ndarray, np.ndarray]:
    """Per-path expected normalized symbols and outage."""
    m = F.shape[1]
    if len(rates) < m - 1:
        raise ValueError("need at least m-1 feedback error pairs")
    P = _occurrence_paths(F, rates.p_nack, rates.p_ack)
    cost = np.zeros(F.shape[0])
    for i in range(m):
        rho = units[:, i].astype(np.float64) * unit_rho
        cost = cost + rho * P[:, i]
    return cost, _outage_paths(F, rates.p_nack)


def _argmin_path(L: np.ndarray, units: np.ndarray) -> int:
    """Minimizer index; ties prefer fewer total units, then the first
    (lexicographically smallest, given ascending enumeration) allocation."""
    cand = np.flatnonzero(L == L.min())
    if cand.size > 1:
        totals = units[cand].sum(axis=1)
        cand = cand[totals == totals.min()]
    return int(cand[0])


def _rates_for(alphas, snr_linear: float) -> feedback_model.FeedbackErrorRates:
    pn = tuple(feedback_model.nack_error_rate(a, snr_linear) for a in alphas)
    pa = tuple(feedback_model.ack_error_rate(a, snr_linear) for a in alphas)
    return feedback_model.FeedbackErrorRates(p_nack=pn, p_ack=pa)


def dp_rate_allocation(lambda_: float, alphas, dl,
                       fb_rates: feedback_model.FeedbackErrorRates,
                       grid: RateGrid, m: int) -> tuple[np.ndarray, float]:
    """Grid-exact minimizer of sum(rho_i P_i) + lambda P_out at fixed thresholds.

    Evaluates the whole admissible path space vectorized; the returned value
    is the Lagrangian at the returned rates, bit-identical to the scalar
    brute-force route.
    """
    if lambda_ < 0.0:
        raise ValueError("dp_rate_allocation: lambda must be non-negative")
    if len(alphas) != m - 1:
        raise ValueError("dp_rate_allocation: need m-1 thresholds")
    units, F = _failure_table(grid, m, dl)
    cost, outage = _cost_outage(units, F, grid.unit_rho, fb_rates)
    L = cost + lambda_ * outage
    idx = _argmin_path(L, units)
    rhos = units[idx].astype(np.float64) * grid.unit_rho
    return rhos, float(L[idx])


def brute_force_rate_allocation(lambda_: float, alphas, dl,
                                fb_rates: feedback_model.FeedbackErrorRates,
                                grid: RateGrid, m: int) -> tuple[np.ndarray, float]:
    """Scalar oracle for dp_rate_allocation: explicit loop over candidates
    through the public analysis functions, identical tie-breaking."""
    if lambda_ < 0.0:
        raise ValueError("brute_force_rate_allocation: lambda must be non-negative")
    span = grid.max_units - grid.min_units + 1
    if span ** m > _BRUTE_FORCE_BUDGET:
        raise GridError(
            f"brute force over {span}^{m} candidates exceeds the "
            f"{_BRUTE_FORCE_BUDGET} budget"
        )
    best_value = math.inf
    best_total = None
    best_rhos = None
    found = False
    for units in itertools.product(range(grid.min_units, grid.max_units + 1), repeat=m):
        total = sum(units)
        if total > grid.units_total:
            continue
        found = True
        rhos = tuple(u * grid.unit_rho for u in units)
        F = mi_model.p_fail_gaussian(rhos, dl)
        P = harq_analysis.occurrence_probabilities(F, fb_rates.p_nack, fb_rates.p_ack)
        cost = 0.0
        for i in range(m):
            cost = cost + rhos[i] * P[i]
        outage = harq_analysis.outage_from_failures(F, fb_rates.p_nack)
        value = cost + lambda_ * outage
        if value < best_value or (value == best_value and total < best_total):
            best_value = value
            best_total = total
            best_rhos = rhos
    if not found:
        raise InfeasibleError("unit bounds admit no allocation within the budget")
    return np.asarray(best_rhos), float(best_value)


def min_achievable_outage(alphas, dl, fb: feedback_model.FeedbackSpec,
                          grid: RateGrid, m: int) -> float:
    """Smallest grid-achievable outage at the given thresholds."""
    units, F = _failure_table(grid, m, dl)
    rates = _rates_for(tuple(alphas), fb.snr_linear)
    return float(_outage_paths(F, rates.p_nack).min())


def best_feasible_allocation(rates: feedback_model.FeedbackErrorRates, dl,
                             grid: RateGrid, m: int,
                             epsilon: float) -> tuple[np.ndarray, float]:
    """Exact constrained optimum over the whole grid: the allocation
    maximizing (1 - P_out)/cost among those with P_out <= epsilon.

    Unlike the Lagrangian route this scans the feasible set directly, so it
    serves as the reference fixed-threshold baseline and as a warm start.
    """
    units, F = _failure_table(grid, m, dl)
    cost, outage = _cost_outage(units, F, grid.unit_rho, rates)
    mask = outage <= epsilon
    if not mask.any():
        raise InfeasibleError(
            f"no allocation meets outage {epsilon:g} at these error rates",
            min_outage=float(outage.min()),
        )
    idx_all = np.flatnonzero(mask)
    eta = (1.0 - outage[idx_all]) / cost[idx_all]
    best = idx_all[int(np.argmax(eta))]
    return units[best].astype(np.float64) * grid.unit_rho, float(
        (1.0 - outage[best]) / cost[best]
    )


def solve_lambda(alphas, dl, fb: feedback_model.FeedbackSpec, grid: RateGrid,
                 config: OptimizerConfig) -> tuple[np.ndarray, float]:
    """Bisection on lambda until the Lagrangian minimizer's outage meets epsilon.

    Returns the feasible bracket endpoint's rates (achieved outage <= epsilon
    always); stops on relative bracket width or once the achieved outage
    lands within a relative 1e-3 band under epsilon.
    """
    rates = _rates_for(tuple(alphas), fb.snr_linear)
    return solve_lambda_for_rates(rates, dl, grid, len(alphas) + 1, config)


def solve_lambda_for_rates(rates: feedback_model.FeedbackErrorRates, dl,
                           grid: RateGrid, m: int,
                           config: OptimizerConfig) -> tuple[np.ndarray, float]:
    """solve_lambda with the per-round error pairs given directly, for
    feedback schemes whose rates are not threshold-derived."""
    units, F = _failure_table(grid, m, dl)
    cost, outage = _cost_outage(units, F, grid.unit_rho, rates)
    eps = config.epsilon

    min_outage = float(outage.min())
    if min_outage > eps:
        raise InfeasibleError(
            f"minimum achievable outage {min_outage:.6g} exceeds epsilon {eps:g}",
            min_outage=min_outage,
        )

    def probe(lam: float) -> int:
        return _argmin_path(cost + lam * outage, units)

    def rhos_at(idx: int) -> np.ndarray:
        return units[idx].astype(np.float64) * grid.unit_rho

    lo = config.lambda_lo
    idx = probe(lo)
    if outage[idx] <= eps:
        return rhos_at(idx), float(lo)

    hi = config.lambda_hi
    idx_hi = probe(hi)
    doublings = 0
    while outage[idx_hi] > eps:
        if doublings >= 20:
            raise InfeasibleError(
                "no lambda in the doubled bracket met the outage constraint",
                min_outage=min_outage,
            )
        hi *= 2.0
        doublings += 1
        idx_hi = probe(hi)

    best_idx, best_lambda = idx_hi, hi
    while hi - lo > config.lambda_tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        idx = probe(mid)
        if outage[idx] <= eps:
            hi = mid
            best_idx, best_lambda = idx, mid
            if outage[idx] >= eps * (1.0 - 1e-3):
                break
        else:
            lo = mid
    _log.debug("solve_lambda: lambda*=%.6g achieved outage %.6g", best_lambda,
               float(outage[best_idx]))
    return rhos_at(best_idx), float(best_lambda)


def _threshold_objective(rhos, dl, snr_linear):
    """Factory: alpha vector -> (eta, outage) at fixed rates."""
    F = mi_model.p_fail_gaussian(rhos, dl)
    m = len(rhos)

    def evaluate(alphas) -> tuple[float, float]:
        rates = _rates_for(tuple(float(a) for a in alphas), snr_linear)
        P = harq_analysis.occurrence_probabilities(F, rates.p_nack, rates.p_ack)
        cost = 0.0
        for i in range(m):
            cost = cost + rhos[i] * P[i]
        out = harq_analysis.outage_from_failures(F, rates.p_nack)
        return (1.0 - out) / cost, out

    return evaluate


def optimize_thresholds_pgd(rhos, dl, fb_snr_db: float, config: OptimizerConfig, *,
                            init_alphas=None) -> np.ndarray:
    """Projected gradient ascent on throughput over the threshold box.

    Gradient by central differences (probes may leave the box, where the
    error-rate formulas remain valid); infeasible iterates are pulled back
    by bisection toward the elementwise-larger envelope of the incumbent,
    so coordinates only grow during projection. Accepts only improving
    steps, so the returned point is feasible and at least as good as the
    starting one.
    """
    rhos = tuple(float(r) for r in rhos)
    k = len(rhos) - 1
    if k == 0:
        return np.zeros(0)
    snr_linear = 10.0 ** (float(fb_snr_db) / 10.0)
    evaluate = _threshold_objective(rhos, dl, snr_linear)
    eps = config.epsilon
    lo, hi = config.alpha_box

    def feasible(x) -> bool:
        return evaluate(x)[1] <= eps

    top = np.full(k, hi)
    if not feasible(top):
        raise InfeasibleError(
            "no feasible thresholds inside the box at these rates",
            min_outage=evaluate(top)[1],
        )

    def pull_back(cand: np.ndarray, anchor: np.ndarray) -> np.ndarray:
        # anchor is feasible; raising thresholds never raises outage, so the
        # elementwise max is feasible and bisection meets the boundary
        if feasible(cand):
            return cand
        ref = np.maximum(cand, anchor)
        t_lo, t_hi = 0.0, 1.0
        for _ in range(60):
            t = 0.5 * (t_lo + t_hi)
            if feasible(cand + t * (ref - cand)):
                t_hi = t
            else:
                t_lo = t
        return cand + t_hi * (ref - cand)

    if init_alphas is not None:
        x = np.clip(np.asarray(init_alphas, dtype=float), lo, hi)
        if x.shape != (k,):
            raise ValueError("optimize_thresholds_pgd: init_alphas length mismatch")
        x = pull_back(x, top)
    else:
        # start at the smallest feasible uniform threshold
        floor = np.full(k, lo)
        if feasible(floor):
            x = floor
        else:
            s_lo, s_hi = lo, hi
            for _ in range(60):
                s = 0.5 * (s_lo + s_hi)
                if feasible(np.full(k, s)):
                    s_hi = s
                else:
                    s_lo = s
            x = np.full(k, s_hi)

    eta_x, _ = evaluate(x)
    for _ in range(config.pgd_max_iters):
        grad = np.empty(k)
        for j in range(k):
            up = x.copy()
            up[j] += _FD_STEP
            dn = x.copy()
            dn[j] -= _FD_STEP
            grad[j] = (evaluate(up)[0] - evaluate(dn)[0]) / (2.0 * _FD_STEP)
        step = config.pgd_step
        moved = 0.0
        for _ in range(30):
            cand = pull_back(np.clip(x + step * grad, lo, hi), x)
            eta_c, _ = evaluate(cand)
            if eta_c > eta_x:
                moved = float(np.max(np.abs(cand - x)))
                x, eta_x = cand, eta_c
                break
            step *= 0.5
        if moved < config.pgd_tol:
            break
    return x


def alternating_optimize(dl, fb_snr_db: float, policy_template: harq_analysis.HarqPolicy,
                         config: OptimizerConfig) -> Solution:
    """Alternate Lagrangian rate allocation and PGD threshold tuning.

    The incumbent is only ever replaced by a better-or-equal candidate, so
    the recorded objective trace is non-decreasing by construction. If the
    starting thresholds cannot meet epsilon for any grid allocation, they
    are first raised to the smallest feasible uniform level.
    """
    m = policy_template.m_max
    if config.units_total < m:
        raise ValueError("alternating_optimize: budget below one unit per round")
    unit_rho = policy_template.n_m / (config.units_total * policy_template.n_b)
    grid = RateGrid(
        unit_rho=unit_rho,
        min_units=max(1, math.ceil(policy_template.rho_min / unit_rho - 1e-9)),
        max_units=min(config.units_total,
                      math.floor(policy_template.rho_max / unit_rho + 1e-9)),
        units_total=config.units_total,
    )
    fb = feedback_model.make_feedback_spec(fb_snr_db)
    eps = config.epsilon
    lo, hi = config.alpha_box
    k = m - 1

    if config.init_alphas is not None:
        if len(config.init_alphas) != k:
            raise ValueError("alternating_optimize: init_alphas length mismatch")
        alphas = np.clip(np.asarray(config.init_alphas, dtype=float), lo, hi)
    else:
        alphas = np.clip(np.full(k, config.init_alpha), lo, hi)

    if k > 0 and min_achievable_outage(alphas, dl, fb, grid, m) > eps:
        # bootstrap: raise thresholds uniformly until some allocation is feasible
        if min_achievable_outage(np.full(k, hi), dl, fb, grid, m) > eps:
            raise InfeasibleError(
                f"outage constraint {eps:g} unreachable for any thresholds in the box",
                min_outage=min_achievable_outage(np.full(k, hi), dl, fb, grid, m),
                iteration=0,
            )
        s_lo, s_hi = lo, hi
        for _ in range(40):
            s = 0.5 * (s_lo + s_hi)
            if min_achievable_outage(np.maximum(alphas, s), dl, fb, grid, m) <= eps:
                s_hi = s
            else:
                s_lo = s
        alphas = np.maximum(alphas, s_hi)
        _log.debug("alternating_optimize: raised start thresholds to %s", alphas)

    def eta_of(rhos, al) -> float:
        return _threshold_objective(tuple(rhos), dl, fb.snr_linear)(al)[0]

    rhos_inc = None
    lambda_star = config.lambda_lo
    eta_inc = -math.inf
    prev = None
    if config.init_units is not None:
        if len(config.init_units) != m:
            raise ValueError("alternating_optimize: init_units length mismatch")
        rhos_inc = np.asarray(
            [u * grid.unit_rho for u in config.init_units], dtype=float
        )
        eta0, out0 = _threshold_objective(tuple(rhos_inc), dl, fb.snr_linear)(alphas)
        # an infeasible seed must not become the incumbent: its inflated
        # throughput would veto every constraint-satisfying update and the
        # loop would return the seed itself
        if out0 <= eps:
            eta_inc = eta0
            prev = eta_inc

    trace: list[float] = []
    converged = False
    iterations = 0
    for it in range(1, config.alt_max_iters + 1):
        iterations = it
        try:
            rhos_new, lam = solve_lambda(alphas, dl, fb, grid, config)
        except InfeasibleError as err:
            err.iteration = it
            raise
        eta_new = eta_of(rhos_new, alphas)
        if eta_new >= eta_inc:
            rhos_inc, lambda_star, eta_inc = rhos_new, lam, eta_new

        if k > 0:
            alphas_new = optimize_thresholds_pgd(
                rhos_inc, dl, fb_snr_db, config, init_alphas=alphas
            )
            eta_alpha = eta_of(rhos_inc, alphas_new)
            if eta_alpha >= eta_inc:
                alphas, eta_inc = alphas_new, eta_alpha

        trace.append(float(eta_inc))
        if prev is not None and eta_inc - prev < config.alt_tol:
            converged = True
            break
        prev = eta_inc

    policy = harq_analysis.HarqPolicy(
        rhos=tuple(float(r) for r in rhos_inc),
        alphas=tuple(float(a) for a in alphas),
        m_max=m,
        n_b=policy_template.n_b,
        n_m=policy_template.n_m,
        rho_min=policy_template.rho_min,
        rho_max=policy_template.rho_max,
    )
    breakdown = harq_analysis.unreliable_throughput(
        policy, dl, feedback_model.make_feedback_spec(fb_snr_db, policy.alphas)
    )
    return Solution(
        policy=policy,
        lambda_star=float(lambda_star),
        breakdown=breakdown,
        iterations=iterations,
        converged=converged,
        feasible=breakdown.p_out_unreliable <= eps * (1.0 + 1e-6),
        trace=tuple(trace),
    )

"""Closed-form HARQ performance under unreliable single-bit feedback.

A policy transmits up to M incremental-redundancy rounds with normalized
per-round lengths rho_1..rho_M. After each of the first M-1 rounds the
transmitter acts on a detected ACK/NACK bit that may be wrong: a NACK
misread as ACK stops the exchange with the block undelivered (outage), an
ACK misread as NACK buys a redundant round. The formulas here combine the
prefix decoding-failure probabilities P_{k,f} with the per-round detection
error pairs into outage, round-occurrence probabilities, expected symbol
cost, and throughput.

Outage composes the premature-stop hazard with the final decoding failure
as 1 - (1 - sum_i P_{N,i} P_{i,f} prod_{j<i}(1-P_{N,j})) (1 - P_{M,f}).
This treats the stop events and the final failure as if independent; the
small resulting bias is quantified against Monte Carlo rather than
corrected, because the rate optimizer minimizes exactly this expression.

The array-level helpers (occurrence_probabilities, outage_from_failures)
are the canonical evaluation order: the vectorized rate-allocation search
mirrors their loop structure operation for operation so that both routes
produce bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import feedback_model, mi_model
from .errors import DegenerateStateError

_OUT_SLACK = 1e-12  # float slack for the ordering asserts below


@dataclass(frozen=True)
class HarqPolicy:
    """Full protocol description: rates, thresholds, and block geometry.

    rhos are symbols per information bit for each round, alphas the
    detection thresholds for the first m_max-1 feedbacks, n_b the payload
    size in bits, n_m the mother-codeword length limiting sum(rhos) to
    n_m/n_b, and [rho_min, rho_max] the per-round rate box.
    """

    rhos: tuple[float, ...]
    alphas: tuple[float, ...]
    m_max: int
    n_b: int
    n_m: int
    rho_min: float
    rho_max: float

    def __post_init__(self):
        rhos = tuple(float(r) for r in self.rhos)
        alphas = tuple(float(a) for a in self.alphas)
        object.__setattr__(self, "rhos", rhos)
        object.__setattr__(self, "alphas", alphas)
        if self.m_max < 1:
            raise ValueError("HarqPolicy: m_max must be at least 1")
        if len(rhos) != self.m_max:
            raise ValueError("HarqPolicy: need exactly m_max rates")
        if len(alphas) != self.m_max - 1:
            raise ValueError("HarqPolicy: need exactly m_max - 1 thresholds")
        if self.n_b < 1 or self.n_m < 1:
            raise ValueError("HarqPolicy: block lengths must be positive")
        if not (0.0 < self.rho_min <= self.rho_max):
            raise ValueError("HarqPolicy: need 0 < rho_min <= rho_max")
        for r in rhos:
            if not (self.rho_min - 1e-12 <= r <= self.rho_max + 1e-12):
                raise ValueError(f"HarqPolicy: rate {r} outside [rho_min, rho_max]")
        budget = self.n_m / self.n_b
        if sum(rhos) > budget + 1e-12:
            raise ValueError(f"HarqPolicy: sum(rhos) exceeds n_m/n_b = {budget}")
        for a in alphas:
            if not math.isfinite(a):
                raise ValueError("HarqPolicy: thresholds must be finite")

    @property
    def rate_vector(self) -> mi_model.RateVector:
        return mi_model.RateVector(self.rhos)


@dataclass(frozen=True)
class PerformanceBreakdown:
    """Every analytic quantity for one policy at one channel pair."""

    p_fail: tuple[float, ...]
    p_occur: tuple[float, ...]
    p_out_stage: tuple[float, ...]
    p_out_unreliable: float
    p_out_reliable: float
    expected_symbols: float
    throughput: float


def _p_fail(policy: HarqPolicy, dl, route: str, bins: int) -> np.ndarray:
    if route == "gaussian":
        return mi_model.p_fail_gaussian(policy.rate_vector, dl)
    if route == "convolution":
        return mi_model.p_fail_convolution(policy.rate_vector, dl, bins)
    raise ValueError(f"unknown failure route {route!r}")


def occurrence_probabilities(p_fail, p_nack, p_ack) -> np.ndarray:
    """Round-occurrence probabilities P_1..P_M from prefix failures.

    Round i happens either because every earlier round failed and every
    NACK got through, or because decoding succeeded at some round m < i
    and all feedbacks from m on were misread as NACK. Exact for the
    protocol (unlike the outage composition).

    Loop structure and operation order are canonical: the optimizer's
    vectorized mirror must match it exactly.
    """
    F = np.asarray(p_fail, dtype=float)
    pn = np.asarray(p_nack, dtype=float)
    pa = np.asarray(p_ack, dtype=float)
    m = F.shape[-1]
    if pn.shape[-1] < m - 1 or pa.shape[-1] < m - 1:
        raise ValueError("occurrence_probabilities: need m-1 error pairs")
    P = np.empty(m)
    P[0] = 1.0
    for i in range(2, m + 1):
        # all of rounds 1..i-1 failed, every NACK correctly detected
        term = F[i - 2]
        for j in range(i - 1):
            term = term * (1.0 - pn[j])
        total = term
        # decoded at round k, ACKs k..i-1 all misread as NACK
        for k in range(1, i):
            term = (1.0 if k == 1 else F[k - 2]) - F[k - 1]
            for j in range(k - 1):
                term = term * (1.0 - pn[j])
            for j in range(k - 1, i - 1):
                term = term * pa[j]
            total = total + term
        P[i - 1] = total
    return P


def outage_from_failures(p_fail, p_nack) -> float:
    """Unreliable-feedback outage from prefix failures and NACK->ACK rates.

    Sequential form of 1 - (1 - sum_i P_{N,i} P_{i,f} prod_{j<i}(1-P_{N,j}))
    * (1 - P_{M,f}); the subtraction order is part of the canonical
    evaluation contract shared with the vectorized optimizer.
    """
    F = np.asarray(p_fail, dtype=float)
    pn = np.asarray(p_nack, dtype=float)
    m = F.shape[-1]
    inner = 1.0
    surv = 1.0
    for i in range(m - 1):
        inner = inner - pn[i] * F[i] * surv
        surv = surv * (1.0 - pn[i])
    return 1.0 - inner * (1.0 - F[m - 1])


def reliable_throughput(policy: HarqPolicy, dl, *, route: str = "gaussian",
                        bins: int = mi_model.DEFAULT_CONV_BINS) -> float:
    """Throughput with perfect feedback: (1-P_{M,f}) / sum rho_i P_{i-1,f}."""
    F = _p_fail(policy, dl, route, bins)
    cost = 0.0
    prev_fail = 1.0  # round 1 always happens
    for i, rho in enumerate(policy.rhos):
        cost = cost + rho * prev_fail
        prev_fail = F[i]
    return (1.0 - F[policy.m_max - 1]) / cost


def transmission_probabilities(policy: HarqPolicy, dl, rates, *,
                               route: str = "gaussian",
                               bins: int = mi_model.DEFAULT_CONV_BINS) -> np.ndarray:
    F = _p_fail(policy, dl, route, bins)
    return occurrence_probabilities(F, rates.p_nack, rates.p_ack)


def unreliable_outage(policy: HarqPolicy, dl, rates, *, route: str = "gaussian",
                      bins: int = mi_model.DEFAULT_CONV_BINS) -> float:
    F = _p_fail(policy, dl, route, bins)
    return outage_from_failures(F, rates.p_nack)


def expected_symbols(policy: HarqPolicy, p_occur) -> float:
    """Mean downlink symbol count sum_i rho_i n_b P_i."""
    P = np.asarray(p_occur, dtype=float)
    if P.shape[-1] != policy.m_max:
        raise ValueError("expected_symbols: occurrence vector length mismatch")
    total = 0.0
    for i, rho in enumerate(policy.rhos):
        total = total + rho * policy.n_b * P[i]
    return total


def stage_outage(policy: HarqPolicy, dl, rates, p_occur, *, route: str = "gaussian",
                 bins: int = mi_model.DEFAULT_CONV_BINS) -> np.ndarray:
    """Per-stage outage contributions used by the stagewise rate search.

    Stage 1 carries the first premature-stop hazard P_{N,1} P_{1,f}; middle
    stages carry the cumulative hazard through stage k divided by the
    occurrence probability P_k; the final stage carries P_{M,f}/P_M.
    Unreachable stages (P_k = 0) have no conditional value and raise.
    """
    F = _p_fail(policy, dl, route, bins)
    pn = np.asarray(rates.p_nack, dtype=float)
    P = np.asarray(p_occur, dtype=float)
    m = policy.m_max
    out = np.empty(m)
    cum = 0.0
    surv = 1.0
    for k in range(m):
        if k < m - 1:
            cum = cum + pn[k] * F[k] * surv
            surv = surv * (1.0 - pn[k])
            if k == 0:
                out[0] = cum
            else:
                if P[k] == 0.0:
                    raise DegenerateStateError(f"stage {k + 1} unreachable (P_k = 0)")
                out[k] = cum / P[k]
        else:
            if P[k] == 0.0:
                raise DegenerateStateError(f"stage {k + 1} unreachable (P_k = 0)")
            out[k] = F[k] / P[k]
    return out


def _stage_outage_or_zero(policy, F, pn, P) -> np.ndarray:
    # Breakdown variant: unreachable stages contribute nothing instead of
    # raising, so perfect-feedback corner cases still produce a full report.
    m = policy.m_max
    out = np.zeros(m)
    cum = 0.0
    surv = 1.0
    for k in range(m):
        if k < m - 1:
            cum = cum + pn[k] * F[k] * surv
            surv = surv * (1.0 - pn[k])
            out[k] = cum if k == 0 else (cum / P[k] if P[k] > 0.0 else 0.0)
        else:
            out[k] = F[k] / P[k] if P[k] > 0.0 else 0.0
    return out


def _breakdown_from_rates(policy: HarqPolicy, dl, rates, route, bins) -> PerformanceBreakdown:
    F = _p_fail(policy, dl, route, bins)
    pn = np.asarray(rates.p_nack, dtype=float)
    pa = np.asarray(rates.p_ack, dtype=float)
    P = occurrence_probabilities(F, pn, pa)
    p_out = outage_from_failures(F, pn)
    stage = _stage_outage_or_zero(policy, F, pn, P)
    e_sym = expected_symbols(policy, P)
    eta = policy.n_b * (1.0 - p_out) / e_sym
    p_out_rel = float(F[policy.m_max - 1])

    for arr in (F, P):
        assert np.all(arr >= 0.0) and np.all(arr <= 1.0)
    # the final-stage ratio F_M / P_M legitimately exceeds one when failure
    # is near-certain and feedback lossy (P_M < F_M), so only non-negativity
    # is a hard requirement for the stage diagnostics
    assert np.all(stage >= 0.0)
    assert 0.0 <= p_out <= 1.0
    # unreliable feedback can only hurt; capacity caps the rate
    assert p_out >= p_out_rel - _OUT_SLACK
    assert eta <= dl.mean_mi + _OUT_SLACK

    return PerformanceBreakdown(
        p_fail=tuple(float(x) for x in F),
        p_occur=tuple(float(x) for x in P),
        p_out_stage=tuple(float(x) for x in stage),
        p_out_unreliable=float(p_out),
        p_out_reliable=p_out_rel,
        expected_symbols=float(e_sym),
        throughput=float(eta),
    )


def unreliable_throughput(policy: HarqPolicy, dl, fb: feedback_model.FeedbackSpec, *,
                          route: str = "gaussian",
                          bins: int = mi_model.DEFAULT_CONV_BINS) -> PerformanceBreakdown:
    """Full performance report for a policy; thresholds come from the policy."""
    spec = feedback_model.FeedbackSpec(
        snr_db=fb.snr_db, snr_linear=fb.snr_linear, alphas=policy.alphas
    )
    rates = feedback_model.error_rates_for(spec)
    return _breakdown_from_rates(policy, dl, rates, route, bins)


def duplicated_ack_rates(snr_linear: float, m_max: int) -> feedback_model.FeedbackErrorRates:
    """Effective error pair for the two-slot ACK-repetition baseline.

    Symmetric detection (alpha = 0) in both slots; the transmitter stops
    only when both decode as ACK, so a NACK survives unless both slots
    flip (p^2) while an ACK is lost if either slot flips (2p - p^2).
    """
    p = feedback_model.nack_error_rate(0.0, snr_linear)
    pn_eff = tuple(p * p for _ in range(m_max - 1))
    pa_eff = tuple(1.0 - (1.0 - p) * (1.0 - p) for _ in range(m_max - 1))
    return feedback_model.FeedbackErrorRates(p_nack=pn_eff, p_ack=pa_eff)


def duplicated_ack_performance(policy: HarqPolicy, dl, fb: feedback_model.FeedbackSpec, *,
                               route: str = "gaussian",
                               bins: int = mi_model.DEFAULT_CONV_BINS) -> PerformanceBreakdown:
    """Baseline report: ACK repeated in a second slot, AND-rule detection.

    Costs one extra feedback slot of latency but no downlink symbols, so
    the throughput accounting is unchanged. Requires symmetric detection.
    """
    if any(a != 0.0 for a in policy.alphas):
        raise ValueError("duplicated_ack_performance: thresholds must all be 0")
    rates = duplicated_ack_rates(fb.snr_linear, policy.m_max)
    return _breakdown_from_rates(policy, dl, rates, route, bins)

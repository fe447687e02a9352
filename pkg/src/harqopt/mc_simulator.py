"""Monte Carlo simulation of the HARQ protocol with unreliable feedback.

Episodes follow the protocol narrative exactly: per-round Rayleigh gains
accumulate mutual information, the receiver reports ACK once decoding
succeeds, the single-bit report is corrupted either by Bernoulli flips at
the analytic error rates (mode "analytic-flip") or by simulating the
matched-filter detector on the noisy sequence (mode "symbol-level"), and
the transmitter stops on a detected ACK or after the round cap. A
detected ACK while the decoder has not succeeded is an outage; a missed
ACK costs extra rounds but never an outage.

The batch estimators are vectorized in fixed-size chunks, each driven by
its own counter-based stream (Philox keyed by the seed, jumped by the
chunk index), with a fixed draw order inside a chunk: all fading gains
first, then the feedback randomness round by round for every episode
whether or not it is still running. Estimates are therefore bit-identical
for identical (seed, n, mode) and independent of how chunks are executed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import feedback_model, harq_analysis, mi_model

_log = logging.getLogger(__name__)

ANALYTIC_FLIP = "analytic-flip"
SYMBOL_LEVEL = "symbol-level"
_DUPLICATED = "duplicated-ack"
_CHUNK = 1 << 17
_MIN_EPISODES = 10_000
_HALF_COMPLEX = math.sqrt(0.5)


@dataclass(frozen=True)
class EpisodeOutcome:
    """Accounting for one simulated HARQ episode."""

    rounds_used: int
    delivered: bool
    outage: bool
    symbols_spent: float
    feedback_events: tuple[tuple[str, str], ...]  # (sent, detected) labels


@dataclass(frozen=True)
class SimulationEstimate:
    """Point estimates with standard errors over n independent episodes.

    p_fail is the forced-continuation decoder-failure frequency after each
    round (every episode's fading path is evaluated through all rounds),
    so it estimates the unconditional prefix-failure probabilities.
    """

    n_episodes: int
    throughput: float
    throughput_se: float
    p_out: float
    p_out_se: float
    p_occur: tuple[float, ...]
    p_occur_se: tuple[float, ...]
    p_fail: tuple[float, ...]
    p_fail_se: tuple[float, ...]
    seed: int


def run_episode(policy: harq_analysis.HarqPolicy, dl, fb: feedback_model.FeedbackSpec,
                rng, feedback_mode: str = ANALYTIC_FLIP) -> EpisodeOutcome:
    """Simulate one episode; the rng needs .exponential(), .random() and,
    for symbol-level feedback, .standard_normal()."""
    if feedback_mode not in (ANALYTIC_FLIP, SYMBOL_LEVEL):
        raise ValueError(f"unknown feedback_mode {feedback_mode!r}")
    m = policy.m_max
    acc = 0.0
    decoded = False
    rounds = 0
    symbols = 0.0
    events = []
    for k in range(m):
        rounds = k + 1
        gain = float(rng.exponential())
        acc += mi_model.mi_of_gain(gain, policy.rhos[k], dl)
        symbols += policy.rhos[k] * policy.n_b
        if acc >= 1.0:
            decoded = True
        if rounds == m:
            break
        sent_ack = decoded
        alpha = policy.alphas[k]
        if feedback_mode == ANALYTIC_FLIP:
            p_err = (feedback_model.ack_error_rate(alpha, fb.snr_linear) if sent_ack
                     else feedback_model.nack_error_rate(alpha, fb.snr_linear))
            detected_ack = sent_ack != (float(rng.random()) < p_err)
        else:
            detected_ack = feedback_model.simulate_detection(
                sent_ack, alpha, fb.snr_linear, rng
            )
        events.append(
            ("ACK" if sent_ack else "NACK", "ACK" if detected_ack else "NACK")
        )
        if detected_ack:
            break
    return EpisodeOutcome(
        rounds_used=rounds,
        delivered=decoded,
        outage=not decoded,
        symbols_spent=symbols,
        feedback_events=tuple(events),
    )


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(chunk_index))


def _simulate(policy: harq_analysis.HarqPolicy, dl, fb: feedback_model.FeedbackSpec,
              n: int, seed: int, mode: str) -> SimulationEstimate:
    if n < _MIN_EPISODES:
        raise ValueError(f"need at least {_MIN_EPISODES} episodes, got {n}")
    m = policy.m_max
    rhos = np.asarray(policy.rhos)
    cum_rhos = np.cumsum(rhos)
    n_b = policy.n_b
    snr_d = dl.snr_linear

    if mode in (ANALYTIC_FLIP, _DUPLICATED):
        if mode == _DUPLICATED:
            p_slot = feedback_model.nack_error_rate(0.0, fb.snr_linear)
        else:
            spec = feedback_model.make_feedback_spec(fb.snr_db, policy.alphas)
            rates = feedback_model.error_rates_for(spec)
            pn = np.asarray(rates.p_nack)
            pa = np.asarray(rates.p_ack)
    elif mode == SYMBOL_LEVEL:
        s_ack, s_nack = feedback_model.build_sequences()
        diff_conj = np.conj(s_ack - s_nack)
        root_s = math.sqrt(fb.snr_linear)
        seq_len = feedback_model.SEQUENCE_LENGTH
    else:
        raise ValueError(f"unknown feedback_mode {mode!r}")

    sx = 0.0       # delivered count (also sum of squares: indicator)
    sy = 0.0       # total symbols
    sxy = 0.0      # sum of symbols over delivered episodes
    syy = 0.0      # sum of squared symbols
    occ_counts = np.zeros(m, dtype=np.int64)
    fail_counts = np.zeros(m, dtype=np.int64)

    done = 0
    chunk_index = 0
    while done < n:
        c = min(_CHUNK, n - done)
        rng = _chunk_rng(seed, chunk_index)
        gains = rng.exponential(size=(c, m))
        acc = np.cumsum(rhos * np.log2(1.0 + gains * snr_d), axis=1)
        decoded = acc >= 1.0

        rounds_used = np.ones(c, dtype=np.int64)
        alive = np.ones(c, dtype=bool)
        for j in range(m - 1):
            sent_ack = decoded[:, j]
            if mode == ANALYTIC_FLIP:
                u = rng.random(c)
                p_err = np.where(sent_ack, pa[j], pn[j])
                det_ack = sent_ack != (u < p_err)
            elif mode == SYMBOL_LEVEL:
                noise_re = rng.standard_normal((c, seq_len))
                noise_im = rng.standard_normal((c, seq_len))
                sent = np.where(sent_ack[:, None], s_ack, s_nack)
                y = root_s * sent + (noise_re + 1j * noise_im) * _HALF_COMPLEX
                stat = (y @ diff_conj).real / (seq_len * root_s)
                det_ack = stat >= policy.alphas[j]
            else:
                u = rng.random((c, 2))
                # both duplicated slots must read as ACK for a stop
                det_ack = np.where(
                    sent_ack,
                    (u[:, 0] >= p_slot) & (u[:, 1] >= p_slot),
                    (u[:, 0] < p_slot) & (u[:, 1] < p_slot),
                )
            advance = alive & ~det_ack
            rounds_used += advance
            alive = advance

        delivered = decoded[np.arange(c), rounds_used - 1]
        symbols = n_b * cum_rhos[rounds_used - 1]

        sx += float(delivered.sum())
        sy += float(symbols.sum())
        sxy += float(symbols[delivered].sum())
        syy += float((symbols * symbols).sum())
        counts = np.bincount(rounds_used, minlength=m + 1)
        occ_counts += counts[::-1].cumsum()[::-1][1 : m + 1]
        fail_counts += (~decoded).sum(axis=0)

        done += c
        chunk_index += 1

    # accounting closure: total symbols must equal the occurrence-weighted
    # per-round spend (up to float reassociation across chunks)
    recomposed = float(n_b * (rhos * occ_counts).sum())
    assert abs(sy - recomposed) <= 1e-9 * max(1.0, abs(sy)), (sy, recomposed)

    ratio = sx / sy
    resid = sx - 2.0 * ratio * sxy + ratio * ratio * syy  # sum of (X - r Y)^2
    throughput = n_b * ratio
    throughput_se = n_b * math.sqrt(max(resid, 0.0)) / sy
    p_out = (n - sx) / n
    occ = occ_counts / n
    fail = fail_counts / n

    def binom_se(p):
        return np.sqrt(np.clip(p * (1.0 - p), 0.0, None) / n)

    return SimulationEstimate(
        n_episodes=n,
        throughput=float(throughput),
        throughput_se=float(throughput_se),
        p_out=float(p_out),
        p_out_se=float(binom_se(p_out)),
        p_occur=tuple(float(v) for v in occ),
        p_occur_se=tuple(float(v) for v in binom_se(occ)),
        p_fail=tuple(float(v) for v in fail),
        p_fail_se=tuple(float(v) for v in binom_se(fail)),
        seed=seed,
    )


def estimate_performance(policy: harq_analysis.HarqPolicy, dl,
                         fb: feedback_model.FeedbackSpec, n: int, seed: int,
                         feedback_mode: str = ANALYTIC_FLIP) -> SimulationEstimate:
    """Aggregate n independent episodes; throughput is the renewal-reward
    ratio N_b * (delivered count) / (total symbols), with a delta-method
    standard error."""
    if feedback_mode not in (ANALYTIC_FLIP, SYMBOL_LEVEL):
        raise ValueError(f"unknown feedback_mode {feedback_mode!r}")
    est = _simulate(policy, dl, fb, n, seed, feedback_mode)
    _log.debug(
        "estimate_performance: n=%d mode=%s throughput=%.6g p_out=%.6g",
        n, feedback_mode, est.throughput, est.p_out,
    )
    return est


def estimate_duplicated_ack(policy: harq_analysis.HarqPolicy, dl,
                            fb: feedback_model.FeedbackSpec, n: int,
                            seed: int) -> SimulationEstimate:
    """Double-ACK stop rule: the feedback bit occupies two slots and the
    transmitter stops only when both read as ACK. Thresholds must be zero."""
    if any(a != 0.0 for a in policy.alphas):
        raise ValueError("duplicated-ACK simulation requires all-zero thresholds")
    return _simulate(policy, dl, fb, n, seed, _DUPLICATED)

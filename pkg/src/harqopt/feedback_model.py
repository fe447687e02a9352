"""Single-bit ACK/NACK feedback with asymmetric threshold detection.

The receiver reports decoding success by transmitting one of two 12-symbol
unit-modulus sequences that agree on 6 positions and are antipodal on the
other 6. The transmitter projects the received block onto the sequence
difference and compares the normalized statistic t (noiseless ACK gives
t = +1, noiseless NACK gives t = -1) against a threshold alpha. Raising
alpha above 0 protects NACK at ACK's expense: the NACK->ACK error, which
ends the HARQ exchange prematurely and so costs a whole block, becomes
rarer than the ACK->NACK error, which only wastes a retransmission.

On the +-1 scale the detector noise is Gaussian with standard deviation
1/sqrt(12 snr), so the two error probabilities have closed forms

    nack->ack:  0.5 erfc((1+alpha) sqrt(6 snr))
    ack->nack:  0.5 erfc((1-alpha) sqrt(6 snr))

and simulate_detection realizes the same statistic symbol by symbol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics

SEQUENCE_LENGTH = 12
_HALF_COMPLEX = math.sqrt(0.5)  # per-symbol complex noise has unit variance

# Batch detection draws noise in blocks of this many trials.
_BATCH_CHUNK = 1 << 18


@dataclass(frozen=True)
class FeedbackSpec:
    """Uplink operating point: feedback SNR plus per-round thresholds."""

    snr_db: float
    snr_linear: float
    alphas: tuple[float, ...]

    def __post_init__(self):
        if not (math.isfinite(self.snr_linear) and self.snr_linear > 0.0):
            raise ValueError("FeedbackSpec: snr_linear must be positive and finite")
        alphas = tuple(float(a) for a in self.alphas)
        for a in alphas:
            if not math.isfinite(a):
                raise ValueError("FeedbackSpec: alphas must be finite")
        object.__setattr__(self, "alphas", alphas)


@dataclass(frozen=True)
class FeedbackErrorRates:
    """Per-round detection error probabilities.

    p_nack[i] is the NACK->ACK misdetection probability of the i-th
    feedback, p_ack[i] the ACK->NACK one. Tuples so instances hash (they
    key optimizer caches).
    """

    p_nack: tuple[float, ...]
    p_ack: tuple[float, ...]

    def __post_init__(self):
        pn = tuple(float(p) for p in self.p_nack)
        pa = tuple(float(p) for p in self.p_ack)
        if len(pn) != len(pa):
            raise ValueError("FeedbackErrorRates: length mismatch")
        for p in pn + pa:
            if not (0.0 <= p <= 1.0):
                raise ValueError("FeedbackErrorRates: probabilities must lie in [0,1]")
        object.__setattr__(self, "p_nack", pn)
        object.__setattr__(self, "p_ack", pa)

    def __len__(self) -> int:
        return len(self.p_nack)


def make_feedback_spec(snr_db: float, alphas=()) -> FeedbackSpec:
    snr_dbf = float(snr_db)
    if not math.isfinite(snr_dbf):
        raise ValueError("make_feedback_spec: snr_db must be finite")
    return FeedbackSpec(
        snr_db=snr_dbf, snr_linear=10.0 ** (snr_dbf / 10.0), alphas=tuple(alphas)
    )


def _check_snr(snr_linear: float) -> float:
    s = float(snr_linear)
    if not (math.isfinite(s) and s > 0.0):
        raise ValueError("feedback error rate: snr_linear must be positive")
    return s


def nack_error_rate(alpha: float, snr_linear: float) -> float:
    """NACK->ACK misdetection probability 0.5 erfc((1+alpha) sqrt(6 snr))."""
    s = _check_snr(snr_linear)
    return 0.5 * numerics.erfc((1.0 + alpha) * np.sqrt(6.0 * s))


def ack_error_rate(alpha: float, snr_linear: float) -> float:
    """ACK->NACK misdetection probability 0.5 erfc((1-alpha) sqrt(6 snr))."""
    s = _check_snr(snr_linear)
    return 0.5 * numerics.erfc((1.0 - alpha) * np.sqrt(6.0 * s))


def error_rates_for(spec: FeedbackSpec) -> FeedbackErrorRates:
    """Per-round error pairs for a FeedbackSpec's threshold vector."""
    pn = tuple(nack_error_rate(a, spec.snr_linear) for a in spec.alphas)
    pa = tuple(ack_error_rate(a, spec.snr_linear) for a in spec.alphas)
    return FeedbackErrorRates(p_nack=pn, p_ack=pa)


def build_sequences() -> tuple[np.ndarray, np.ndarray]:
    """Idealized ACK/NACK sequence pair on a constant unit base.

    Equal on even positions, antipodal on the 6 odd ones, so the squared
    distance is 24; the error probabilities depend on the geometry only.
    """
    s_ack = np.ones(SEQUENCE_LENGTH, dtype=complex)
    s_nack = np.ones(SEQUENCE_LENGTH, dtype=complex)
    s_nack[1::2] = -1.0
    return s_ack, s_nack


def detection_statistic(y: np.ndarray, snr_linear: float) -> float:
    """Matched-filter statistic normalized to +-1 noiseless endpoints."""
    s_ack, s_nack = build_sequences()
    diff = s_ack - s_nack
    # <y, s_ack - s_nack> with the usual conjugate-linear first slot
    corr = np.vdot(diff, np.asarray(y)).real
    return float(corr) / (SEQUENCE_LENGTH * math.sqrt(snr_linear))


def simulate_detection(sent_ack: bool, alpha: float, snr_linear: float, rng) -> bool:
    """One feedback transmission through complex AWGN; True means ACK detected.

    The sent sequence is scaled by sqrt(snr_linear), the noise has unit
    variance per complex symbol (real and imaginary parts drawn in that
    order), and ACK is declared iff the statistic reaches alpha.
    """
    s = _check_snr(snr_linear)
    s_ack, s_nack = build_sequences()
    sent = s_ack if sent_ack else s_nack
    noise = (
        rng.standard_normal(SEQUENCE_LENGTH) + 1j * rng.standard_normal(SEQUENCE_LENGTH)
    ) * _HALF_COMPLEX
    y = math.sqrt(s) * sent + noise
    return detection_statistic(y, s) >= alpha


def detect_batch(sent_ack: bool, alpha: float, snr_linear: float, n: int, rng) -> np.ndarray:
    """Vectorized simulate_detection: n independent trials, bool array out."""
    s = _check_snr(snr_linear)
    if n < 1:
        raise ValueError("detect_batch: n must be positive")
    s_ack, s_nack = build_sequences()
    sent = s_ack if sent_ack else s_nack
    diff_conj = np.conj(s_ack - s_nack)
    scale = SEQUENCE_LENGTH * math.sqrt(s)
    out = np.empty(n, dtype=bool)
    done = 0
    while done < n:
        m = min(_BATCH_CHUNK, n - done)
        noise = (
            rng.standard_normal((m, SEQUENCE_LENGTH))
            + 1j * rng.standard_normal((m, SEQUENCE_LENGTH))
        ) * _HALF_COMPLEX
        y = math.sqrt(s) * sent + noise
        t = (y @ diff_conj).real / scale
        out[done : done + m] = t >= alpha
        done += m
    return out

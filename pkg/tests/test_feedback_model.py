"""Single-bit feedback detection geometry and error-rate formulas."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from harqopt import feedback_model

# 0.5*erfc(sqrt(0.6)) and 0.5*erfc(2*sqrt(0.6)), high-precision oracle
NACK_A0_S01 = 0.13666083914614907
NACK_A1_S01 = 0.014229868458155282


class _ZeroNoise:
    """rng stand-in that silences the AWGN draw."""

    def standard_normal(self, size):
        return np.zeros(size)


def test_nack_error_rate_examples():
    assert feedback_model.nack_error_rate(0.0, 0.1) == pytest.approx(NACK_A0_S01, abs=1e-14)
    assert feedback_model.nack_error_rate(1.0, 0.1) == pytest.approx(NACK_A1_S01, abs=1e-14)
    assert feedback_model.nack_error_rate(1e6, 0.1) == 0.0


def test_ack_error_rate_examples():
    assert feedback_model.ack_error_rate(1.0, 0.1) == 0.5
    assert feedback_model.ack_error_rate(1.0, 37.0) == 0.5
    assert feedback_model.ack_error_rate(0.0, 0.1) == pytest.approx(NACK_A0_S01, abs=1e-14)


def test_error_rate_reflection_identity():
    assert feedback_model.ack_error_rate(0.4, 0.1) == feedback_model.nack_error_rate(-0.4, 0.1)


@pytest.mark.parametrize("snr", [0.0, -0.5, math.nan])
def test_error_rates_reject_bad_snr(snr):
    with pytest.raises(ValueError):
        feedback_model.nack_error_rate(0.5, snr)
    with pytest.raises(ValueError):
        feedback_model.ack_error_rate(0.5, snr)


# monotonicity is strict mathematically; in floats the erfc tail saturates,
# so the properties are probed away from the saturated region with a
# macroscopic separation between the compared points
@given(st.floats(-1.0, 1.5), st.floats(-1.0, 1.5), st.floats(0.01, 1.0))
def test_nack_rate_monotone_decreasing_in_alpha(a1, a2, snr):
    lo, hi = min(a1, a2), max(a1, a2)
    if hi - lo < 1e-6:
        return
    assert feedback_model.nack_error_rate(hi, snr) < feedback_model.nack_error_rate(lo, snr)
    assert feedback_model.ack_error_rate(hi, snr) > feedback_model.ack_error_rate(lo, snr)


@given(st.floats(-0.5, 0.9), st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_rates_decrease_with_snr_below_alpha_one(alpha, s1, s2):
    lo, hi = min(s1, s2), max(s1, s2)
    if hi - lo < 1e-6:
        return
    assert feedback_model.nack_error_rate(alpha, hi) < feedback_model.nack_error_rate(alpha, lo)
    assert feedback_model.ack_error_rate(alpha, hi) < feedback_model.ack_error_rate(alpha, lo)


def test_build_sequences_geometry():
    s_ack, s_nack = feedback_model.build_sequences()
    assert len(s_ack) == len(s_nack) == 12
    assert np.all(np.abs(s_ack) == 1.0) and np.all(np.abs(s_nack) == 1.0)
    differ = s_ack != s_nack
    assert differ.sum() == 6
    np.testing.assert_allclose(s_ack[differ], -s_nack[differ])
    assert np.sum(np.abs(s_ack - s_nack) ** 2) == pytest.approx(24.0)


def test_simulate_detection_noiseless():
    rng = _ZeroNoise()
    assert feedback_model.simulate_detection(True, 0.99, 0.1, rng) is True
    assert feedback_model.simulate_detection(False, -0.99, 0.1, rng) is False
    assert feedback_model.simulate_detection(False, 0.0, 5.0, rng) is False


def test_detection_statistic_noiseless_endpoints():
    s_ack, s_nack = feedback_model.build_sequences()
    snr = 0.37
    t_ack = feedback_model.detection_statistic(math.sqrt(snr) * s_ack, snr)
    t_nack = feedback_model.detection_statistic(math.sqrt(snr) * s_nack, snr)
    assert t_ack == pytest.approx(1.0, abs=1e-12)
    assert t_nack == pytest.approx(-1.0, abs=1e-12)


def test_simulate_detection_matches_analytic_rate():
    # validates the 1/(12 snr) statistic noise variance
    alpha, snr, n = 0.5, 0.1, 10**6
    rng = np.random.default_rng(7)
    det = feedback_model.detect_batch(False, alpha, snr, n, rng)
    emp = det.mean()  # NACK sent, ACK detected
    p = feedback_model.nack_error_rate(alpha, snr)
    se = math.sqrt(p * (1.0 - p) / n)
    assert abs(emp - p) <= 3.0 * se


def test_symmetric_detection_balances_errors():
    snr, n = 0.1, 10**6
    rng = np.random.default_rng(8)
    nack_err = feedback_model.detect_batch(False, 0.0, snr, n, rng).mean()
    ack_err = 1.0 - feedback_model.detect_batch(True, 0.0, snr, n, rng).mean()
    p = feedback_model.nack_error_rate(0.0, snr)
    se = math.sqrt(2.0 * p * (1.0 - p) / n)  # combined two-sample error
    assert abs(nack_err - ack_err) <= 4.0 * se


def test_error_rates_for_symmetric_case():
    spec = feedback_model.make_feedback_spec(-10.0, (0.0, 0.0, 0.0))
    rates = feedback_model.error_rates_for(spec)
    assert rates.p_nack == rates.p_ack
    assert all(0.0 <= p <= 1.0 for p in rates.p_nack)


def test_error_rates_for_ordering():
    spec = feedback_model.make_feedback_spec(-10.0, (0.2, 0.4, 0.6))
    rates = feedback_model.error_rates_for(spec)
    assert rates.p_nack[0] > rates.p_nack[1] > rates.p_nack[2]
    assert rates.p_ack[0] < rates.p_ack[1] < rates.p_ack[2]
    for pn, pa in zip(rates.p_nack, rates.p_ack):
        assert pn < pa  # alpha > 0 protects NACK


def test_make_feedback_spec_validation():
    spec = feedback_model.make_feedback_spec(-10.0, (0.5,))
    assert spec.snr_linear == pytest.approx(0.1, rel=1e-12)
    with pytest.raises(ValueError):
        feedback_model.make_feedback_spec(math.nan, ())
    with pytest.raises(ValueError):
        feedback_model.make_feedback_spec(-10.0, (math.inf,))

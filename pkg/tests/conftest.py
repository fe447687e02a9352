import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from harqopt import mi_model, optimizer

# Quadrature behind make_downlink_spec makes some first calls slowish;
# property tests should not be penalized for that.
settings.register_profile(
    "harqopt",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("harqopt")


@pytest.fixture(scope="session")
def dl3():
    """Downlink operating point used throughout: 3 dB Rayleigh fading."""
    return mi_model.make_downlink_spec(3.0)


@pytest.fixture(scope="session")
def grid64():
    """Default rate discretization: 64 units of a rate-4 mother code."""
    return optimizer.make_rate_grid(1024, 4096, 64)


@pytest.fixture()
def rng():
    return np.random.default_rng(0x5EED)

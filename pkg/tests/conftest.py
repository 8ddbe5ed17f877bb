import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def disc_points(draw, max_modulus=0.95):
    r = draw(st.floats(0.0, max_modulus))
    t = draw(st.floats(0.0, 2 * np.pi))
    return complex(r * np.cos(t), r * np.sin(t))


@st.composite
def ball_points(draw, d, max_norm=0.95):
    parts = draw(st.lists(st.floats(-1.0, 1.0), min_size=2 * d, max_size=2 * d))
    v = np.array(parts[:d]) + 1j * np.array(parts[d:])
    n = np.linalg.norm(v)
    if n == 0.0:
        return v
    scale = draw(st.floats(0.0, max_norm))
    return v / n * scale


def random_ball(rng, n, d, max_norm=0.95):
    """n points uniform in direction, radius^(2d) uniform, scaled to max_norm."""
    v = rng.normal(size=(n, d)) + 1j * rng.normal(size=(n, d))
    v /= np.linalg.norm(v, axis=1)[:, None]
    rad = max_norm * rng.random(n) ** (1.0 / (2 * d))
    return v * rad[:, None]


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k][1])

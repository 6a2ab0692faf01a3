import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid_screens():
    """BH screens of the synthetic 12x12 grid for 20 seeds, shared by several tests."""
    from ppassoc.multiplicity import screen
    from ppassoc.simulate import synthetic_grid

    out = []
    for seed in range(20):
        g = synthetic_grid(12, seed)
        items = [(s, t, g.sources[s], g.targets[t]) for s, t in g.pairs()]
        res = screen(items, g.intensity, q=0.1)
        rejected = {(res.entries[i].source, res.entries[i].target) for i in res.rejected}
        out.append((g, res, rejected))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

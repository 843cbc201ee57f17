import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from rightsize.model import Instance, NodeType, Task  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_instance(rng, n, m, D, T, demand=(0.05, 0.6), capacity=(0.4, 1.0), cost=(1.0, 10.0)):
    types = tuple(
        NodeType(j, tuple(rng.uniform(*capacity, size=D)), float(rng.uniform(*cost))) for j in range(m)
    )
    tasks = []
    for i in range(n):
        s, e = sorted(rng.integers(1, T + 1, size=2))
        host = types[rng.integers(m)].capacity
        tasks.append(Task(i, tuple(np.minimum(rng.uniform(*demand, size=D), host)), s, e))
    return Instance(tuple(tasks), types, T, D)


@st.composite
def tiny_instances(draw, max_n=6, max_m=3, max_D=2, max_T=5, small=False):
    """Hostable instances; ``small`` keeps every demand within half of every capacity."""
    n = draw(st.integers(0, max_n))
    m = draw(st.integers(1, max_m))
    D = draw(st.integers(1, max_D))
    T = draw(st.integers(1, max_T))
    cap = st.floats(0.5 if small else 0.3, 1.0)
    dem = st.floats(0.0, 0.25 if small else 0.9)
    types = tuple(
        NodeType(j, tuple(draw(cap) for _ in range(D)), draw(st.floats(1.0, 10.0)))
        for j in range(m)
    )
    tasks = []
    for i in range(n):
        s = draw(st.integers(1, T))
        e = draw(st.integers(s, T))
        host = types[draw(st.integers(0, m - 1))].capacity
        demand = tuple(min(draw(dem), host[d]) for d in range(D))
        tasks.append(Task(f"u{i}", demand, s, e))
    inst = Instance(tuple(tasks), types, T, D)
    return inst


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

import numpy as np
import pytest

from twc import channel as ch

_ACCEPTANCE = {}


def random_twc(rng, shape=(2, 2, 2, 2)):
    nx1, nx2, ny1, ny2 = shape
    p = rng.dirichlet(np.ones(ny1 * ny2), size=(nx1, nx2)).reshape(shape)
    return ch.validate(p)


def random_twcs(n=50, seed=2024, shape=(2, 2, 2, 2)):
    rng = np.random.default_rng(seed)
    return [random_twc(rng, shape) for _ in range(n)]


def permuted_product_twc(rng, nx1=2, nx2=2, ny1=2, ny2=2):
    """Conditionally independent outputs whose per-state matrices are column permutations of a base."""
    a = rng.dirichlet(np.ones(ny2), size=nx1)
    b = rng.dirichlet(np.ones(ny1), size=nx2)
    w = [a[:, rng.permutation(ny2)] for _ in range(nx2)]  # W_x2[x1, y2]
    v = [b[:, rng.permutation(ny1)] for _ in range(nx1)]  # V_x1[x2, y1]
    p = np.zeros((nx1, nx2, ny1, ny2))
    for x1 in range(nx1):
        for x2 in range(nx2):
            p[x1, x2] = np.outer(v[x1][x2], w[x2][x1])
    return ch.validate(p)


@pytest.fixture(scope="session")
def example1():
    return ch.builtin("example1")


@pytest.fixture(scope="session")
def example2():
    return ch.builtin("example2")


@pytest.fixture(scope="session")
def additive():
    return ch.builtin("bin-additive:0.1")


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")

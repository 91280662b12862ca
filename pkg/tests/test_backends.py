import os
import random
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from derivedfunctors import _kernels_py

compiled = pytest.importorskip("derivedfunctors._kernels")


def rows_strategy(max_dim=7, bound=60):
    return st.integers(0, max_dim).flatmap(lambda m: st.integers(0, max_dim).flatmap(
        lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                           min_size=m, max_size=m).map(lambda r: (r, m, n))))


def norm(result):
    if isinstance(result, tuple):
        return tuple(norm(x) for x in result)
    return [list(r) for r in result]


@settings(max_examples=200, deadline=None)
@given(rows_strategy())
def test_smith_parity(a):
    rows, m, n = a
    assert norm(compiled.smith(rows, m, n)) == norm(_kernels_py.smith(rows, m, n))


@settings(max_examples=200, deadline=None)
@given(rows_strategy())
def test_hermite_parity(a):
    rows, m, n = a
    assert norm(compiled.hermite(rows, n)) == norm(_kernels_py.hermite(rows, n))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.integers(0, 10 ** 6))
def test_matmul_parity(m, k, n, s):
    rng = random.Random(s)
    A = [[rng.randint(-99, 99) for _ in range(k)] for _ in range(m)]
    B = [[rng.randint(-99, 99) for _ in range(n)] for _ in range(k)]
    assert norm(compiled.matmul(A, B, m, k, n)) == norm(_kernels_py.matmul(A, B, m, k, n))


@pytest.mark.parametrize("big", [2 ** 61, 2 ** 62, 2 ** 63 - 1, 2 ** 100])
def test_overflow_falls_back(big):
    rows = [[big, 3, 1], [7, big - 1, 5], [2, 2, big]]
    assert norm(compiled.smith(rows, 3, 3)) == norm(_kernels_py.smith(rows, 3, 3))
    assert norm(compiled.hermite(rows, 3)) == norm(_kernels_py.hermite(rows, 3))
    A = [[big, big]]
    B = [[big], [big]]
    assert norm(compiled.matmul(A, B, 1, 2, 1)) == [[2 * big * big]]


def test_growth_during_elimination():
    # small entries whose cofactors exceed 64 bits part-way through
    rng = random.Random(0)
    rows = [[rng.randint(-2 ** 40, 2 ** 40) for _ in range(6)] for _ in range(6)]
    assert norm(compiled.smith(rows, 6, 6)) == norm(_kernels_py.smith(rows, 6, 6))


def test_environment_forces_pure():
    env = dict(os.environ, DERIVEDFUNCTORS_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from derivedfunctors import _backend; print(_backend.NAME)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

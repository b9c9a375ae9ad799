import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from ulam_cluster.permutation import Permutation, lcs_length_oracle


def perms(max_d=16, min_d=1):
    return st.integers(min_d, max_d).flatmap(
        lambda d: st.permutations(list(range(1, d + 1))).map(lambda s: Permutation(tuple(s))))


def perm_pairs(max_d=16, min_d=1, arity=2):
    def build(d):
        one = st.permutations(list(range(1, d + 1))).map(lambda s: Permutation(tuple(s)))
        return st.tuples(*[one] * arity)
    return st.integers(min_d, max_d).flatmap(build)


def random_perm(rng, d):
    return Permutation(tuple(int(v) + 1 for v in rng.permutation(d)))


def oracle_distance(x, y):
    return len(x) - lcs_length_oracle(x, y)


def oracle_one_median(points):
    """Exhaustive 1-median over S_d using the DP distance (independent of the kernels)."""
    d = len(points[0])
    best = None
    for y in itertools.permutations(range(1, d + 1)):
        cost = sum(oracle_distance(y, x) for x in points)
        if best is None or cost < best[0]:
            best = (cost, y)
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# (criterion, passed, detail) rows filled by test_acceptance.py
ACCEPTANCE_ROWS: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_ROWS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_ROWS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")

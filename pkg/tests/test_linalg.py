from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from morava import linalg


def leibniz(M, p):
    n = M.shape[0]
    total = 0
    for perm in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = sign
        for i in range(n):
            term *= int(M[i, perm[i]])
        total += term
    return total % p


@st.composite
def square(draw):
    p = draw(st.sampled_from([2, 3, 5, 7]))
    n = draw(st.integers(1, 5))
    return p, draw(arrays(np.int64, (n, n), elements=st.integers(0, p - 1)))


@given(square())
def test_determinant_matches_leibniz(t):
    p, M = t
    assert linalg.determinant(M, p) == leibniz(M, p)


@given(square())
def test_inverse_and_solve(t):
    p, M = t
    if leibniz(M, p) == 0:
        with pytest.raises(linalg.SingularMatrixError):
            linalg.inverse(M, p)
        assert linalg.rank(M, p) < M.shape[0]
        return
    inv = linalg.inverse(M, p)
    assert np.array_equal(M @ inv % p, np.eye(M.shape[0], dtype=np.int64))
    b = np.arange(M.shape[0]) % p
    x = linalg.solve(M, b, p)
    assert np.array_equal(M @ x % p, b)
    assert linalg.rank(M, p) == M.shape[0]


def test_rank_examples():
    assert linalg.rank(np.array([[1, 1], [1, 1]]), 2) == 1
    assert linalg.rank(np.array([[1, 2], [2, 4]]), 5) == 1
    assert linalg.rank(np.zeros((3, 4), dtype=np.int64), 3) == 0

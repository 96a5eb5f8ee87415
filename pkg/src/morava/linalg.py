"""Gaussian elimination over F_p on int64 arrays."""

from __future__ import annotations

import numpy as np


class SingularMatrixError(ArithmeticError):
    pass


def row_reduce(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of M mod p and the pivot columns."""
    A = np.mod(np.array(M, dtype=np.int64), p)
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if len(hit):
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: np.ndarray, p: int) -> int:
    return len(row_reduce(M, p)[1])


def determinant(M: np.ndarray, p: int) -> int:
    A = np.mod(np.array(M, dtype=np.int64), p)
    n = A.shape[0]
    det = 1
    for c in range(n):
        nz = np.nonzero(A[c:, c])[0]
        if len(nz) == 0:
            return 0
        piv = c + nz[0]
        if piv != c:
            A[[c, piv]] = A[[piv, c]]
            det = -det
        det = det * int(A[c, c]) % p
        inv = pow(int(A[c, c]), -1, p)
        below = A[c + 1 :, c]
        hit = np.nonzero(below)[0] + c + 1
        if len(hit):
            A[hit] = (A[hit] - np.outer(A[hit, c] * inv % p, A[c])) % p
    return det % p


def inverse(M: np.ndarray, p: int) -> np.ndarray:
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("matrix is not square")
    aug = np.concatenate([np.mod(M, p), np.eye(n, dtype=np.int64)], axis=1)
    R, pivots = row_reduce(aug, p)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular mod p")
    return R[:, n:].copy()


def solve(M: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """x with M x = b mod p, for square nonsingular M."""
    n = M.shape[0]
    aug = np.concatenate([np.mod(M, p), np.mod(b, p).reshape(n, -1)], axis=1)
    R, pivots = row_reduce(aug, p)
    if pivots[:n] != list(range(n)):
        raise SingularMatrixError("matrix is singular mod p")
    return R[:, n:].reshape(np.shape(b))

"""Dense truncated polynomial arithmetic over F_p.

A polynomial in r variables with x_i^{N_i} = 0 is an int64 array of shape
(N_1, ..., N_r) holding residues in [0, p).  Large products go through
Kronecker substitution and GMP multiplication, which is exact.
"""

from __future__ import annotations

import numpy as np

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

_SLICE_OVERHEAD = 400  # element-ops charged per numpy call in the cost model


def reduce(a: np.ndarray, p: int) -> np.ndarray:
    return np.mod(a, p, dtype=np.int64)


def support_axes(a: np.ndarray) -> tuple[int, ...]:
    """Axes along which ``a`` has a nonzero entry off index 0."""
    axes = []
    for ax in range(a.ndim):
        moved = np.moveaxis(a, ax, 0)
        if moved.shape[0] > 1 and np.any(moved[1:]):
            axes.append(ax)
    return tuple(axes)


def _mul_slices(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if np.count_nonzero(a) > np.count_nonzero(b):
        a, b = b, a
    shape = a.shape
    out = np.zeros(shape, dtype=np.int64)
    for idx in map(tuple, np.argwhere(a)):
        c = a[idx]
        dst = tuple(slice(i, None) for i in idx)
        src = tuple(slice(0, n - i) for i, n in zip(idx, shape))
        out[dst] += c * b[src]
    return reduce(out, p)


def _mul_kronecker(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    shape = a.shape
    padded = tuple(2 * n - 1 for n in shape)
    bound = (p - 1) ** 2 * min(np.count_nonzero(a), np.count_nonzero(b)) + 1
    nbytes = next(w for w in (1, 2, 4, 8) if bound < 2 ** (8 * w))
    dtype = np.dtype(f"<u{nbytes}")

    def pack(x):
        buf = np.zeros(padded, dtype=dtype)
        buf[tuple(slice(0, n) for n in shape)] = x
        return gmpy2.mpz(int.from_bytes(buf.tobytes(), "little"))

    total = int(np.prod(padded))
    prod = pack(a) * pack(b)
    raw = int(prod).to_bytes(2 * total * nbytes, "little")
    full = np.frombuffer(raw, dtype=dtype, count=total).reshape(padded)
    out = full[tuple(slice(0, n) for n in shape)].astype(np.int64)
    return reduce(out, p)


def mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product in F_p[x_1..x_r]/(x_i^{N_i})."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.ndim == 0:
        return reduce(a * b, p)
    if a.ndim == 1:
        return reduce(np.convolve(a, b)[: a.shape[0]], p)
    size = a.size
    nnz = min(np.count_nonzero(a), np.count_nonzero(b))
    if nnz == 0:
        return np.zeros_like(a)
    slice_cost = nnz * (size + _SLICE_OVERHEAD)
    kron_cost = 8 * int(np.prod([2 * n - 1 for n in a.shape]))
    if gmpy2 is None or slice_cost <= kron_cost:
        return _mul_slices(a, b, p)
    return _mul_kronecker(a, b, p)


def frobenius(a: np.ndarray, p: int, times: int = 1) -> np.ndarray:
    """The p^times-th power, computed as a re-indexing (characteristic p)."""
    step = p**times
    out = np.zeros_like(a)
    src = tuple(slice(0, (n - 1) // step + 1) for n in a.shape)
    dst = tuple(slice(0, None, step) for _ in a.shape)
    out[dst] = a[src]
    return out


def power(a: np.ndarray, e: int, p: int) -> np.ndarray:
    """a^e using the base-p digits of e and Frobenius for the p-th powers."""
    if e < 0:
        raise ValueError("negative exponent")
    one = np.zeros_like(a)
    one[(0,) * a.ndim] = 1
    out = one
    j = 0
    while e:
        e, d = divmod(e, p)
        if d:
            base = frobenius(a, p, j) if j else a
            if not np.any(base):
                return np.zeros_like(a)
            for _ in range(d):
                out = mul(out, base, p)
        j += 1
    return out


def powers(a: np.ndarray, p: int, limit: int | None = None) -> list[np.ndarray]:
    """[a^0, a^1, ...] up to the last nonzero power (or ``limit`` entries)."""
    one = np.zeros_like(a)
    one[(0,) * a.ndim] = 1
    out = [one]
    cur = one
    while limit is None or len(out) < limit:
        cur = mul(cur, a, p)
        if not np.any(cur):
            break
        out.append(cur)
    return out


def monomial(shape: tuple[int, ...], alpha: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(shape, dtype=np.int64)
    if all(0 <= a < n for a, n in zip(alpha, shape)):
        out[tuple(alpha)] = 1
    return out


def total_degree_grid(shape: tuple[int, ...]) -> np.ndarray:
    """|alpha| for every index alpha of an array of the given shape."""
    if not shape:
        return np.zeros((), dtype=np.int64)
    grids = np.indices(shape, dtype=np.int64)
    return grids.sum(axis=0)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Matrix product mod p; uses float64 BLAS when every partial sum is exact."""
    inner = a.shape[-1]
    if (p - 1) ** 2 * inner < 2**52:
        out = np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
    else:  # pragma: no cover - only for enormous inner dimensions
        out = a.astype(object) @ b.astype(object)
        out = np.array(out, dtype=np.int64) if out.ndim else int(out)
    return reduce(out, p)


def series_inverse(u: np.ndarray, p: int) -> np.ndarray:
    """Multiplicative inverse of a univariate unit power series mod (x^len, p)."""
    n = u.shape[0]
    inv0 = pow(int(u[0]), -1, p)
    w = np.zeros(n, dtype=np.int64)
    w[0] = inv0
    for k in range(1, n):
        acc = int(np.dot(u[1 : k + 1], w[k - 1 :: -1][:k]))
        w[k] = (-inv0 * acc) % p
    return w

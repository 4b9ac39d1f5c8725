"""Exact integer linear algebra: Smith normal form and Z/N linear solving.

The coboundary systems this package produces are small incidence-style
matrices with entries in {-1, 0, 1, 2}, so the default int64 path never
overflows in practice; a terminal exactness check falls back to Python-int
arithmetic if it ever would.
"""

from __future__ import annotations

from math import gcd

import numpy as np

# With all magnitudes below this bound, float64 matrix products are exact and
# int64 arithmetic cannot have overflowed.
_SAFE_BOUND = 1 << 20


def _diagonalize(D: np.ndarray, U: np.ndarray, V: np.ndarray) -> int:
    """Diagonalize D in place by unimodular row/column operations.

    U and V accumulate the operations, so U @ A @ V == D throughout.
    Returns the number of nonzero diagonal entries.
    """
    m, n = D.shape
    t = 0
    while t < min(m, n):
        sub = D[t:, t:]
        nz = np.nonzero(sub)
        if nz[0].size == 0:
            break
        k = int(np.argmin(abs(sub[nz])))
        pi, pj = int(nz[0][k]) + t, int(nz[1][k]) + t
        if pi != t:
            D[[t, pi]] = D[[pi, t]]
            U[[t, pi]] = U[[pi, t]]
        if pj != t:
            D[:, [t, pj]] = D[:, [pj, t]]
            V[:, [t, pj]] = V[:, [pj, t]]
        pivot = D[t, t]
        for i in np.nonzero(D[t + 1:, t])[0] + t + 1:
            q = D[i, t] // pivot
            if q:
                D[i] -= q * D[t]
                U[i] -= q * U[t]
        for j in np.nonzero(D[t, t + 1:])[0] + t + 1:
            q = D[t, j] // pivot
            if q:
                D[:, j] -= q * D[:, t]
                V[:, j] -= q * V[:, t]
        if np.any(D[t + 1:, t]) or np.any(D[t, t + 1:]):
            continue  # Euclid left smaller remainders; pick a new pivot
        t += 1
    for k in range(min(m, n)):
        if D[k, k] < 0:
            D[k] = -D[k]
            U[k] = -U[k]
    return int(np.count_nonzero(D.diagonal()))


def smith_normal_form(A) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (U, D, V) with U @ A @ V = D in Smith normal form.

    U and V are unimodular and the diagonal satisfies d1 | d2 | ... .
    """
    A = np.asarray(A)
    for dtype in (np.int64, object):
        Ad = A.astype(dtype)
        m, n = Ad.shape
        D = Ad.copy()
        U = np.eye(m, dtype=dtype)
        V = np.eye(n, dtype=dtype)
        rank = _diagonalize(D, U, V)
        # enforce the divisibility chain: mix a violating pair of columns and
        # rediagonalize (each pass strictly refines the gcd structure)
        while True:
            bad = None
            for k in range(rank - 1):
                a = int(D[k, k])
                for j in range(k + 1, rank):
                    if a != 0 and int(D[j, j]) % a != 0:
                        bad = (k, j)
                        break
                if bad:
                    break
            if bad is None:
                break
            k, j = bad
            D[j, k] = D[j, j]
            V[:, k] += V[:, j]
            rank = _diagonalize(D, U, V)
        if dtype is object or _exactness_ok(A, U, D, V):
            return U, D, V
    raise AssertionError("unreachable")


def _exactness_ok(A, U, D, V) -> bool:
    if max(int(abs(M).max(initial=0)) for M in (U, D, V)) >= _SAFE_BOUND:
        return False
    P = U.astype(float) @ A.astype(float) @ V.astype(float)
    return bool(np.array_equal(P, D.astype(float)))


class ModularSystem:
    """Solver for A x = b (mod N) with A fixed and many right-hand sides.

    The Smith decomposition is computed once; each solve costs two
    matrix-vector products plus per-diagonal modular inversions.
    """

    def __init__(self, A, N: int):
        A = np.asarray(A)
        self.N = int(N)
        self.n_unknowns = A.shape[1] if A.ndim == 2 else 0
        self.n_equations = A.shape[0] if A.ndim == 2 else 0
        self.trivial = A.size == 0
        if self.trivial:
            return
        self.U, self.D, self.V = smith_normal_form(A)
        self.diag = [int(self.D[k, k]) for k in range(min(self.D.shape))]

    def solve(self, b) -> np.ndarray | None:
        """A particular solution x (entries in 0..N-1), or None."""
        N = self.N
        b = np.asarray(b)
        if self.trivial:
            if b.size and np.any(b % N):
                return None
            return np.zeros(self.n_unknowns, dtype=np.int64)
        c = self.U @ b.astype(self.U.dtype)
        y = np.zeros(self.n_unknowns, dtype=np.int64)
        for k in range(self.n_equations):
            ck = int(c[k]) % N
            dk = self.diag[k] if k < len(self.diag) else 0
            if dk == 0:
                if ck != 0:
                    return None
                continue
            g = gcd(dk, N)
            if ck % g != 0:
                return None
            Ng = N // g
            if Ng > 1 and k < self.n_unknowns:
                y[k] = (ck // g) * pow(dk // g, -1, Ng) % Ng
        x = (self.V @ y) % N
        return x.astype(np.int64)

"""Integer matrix utilities: Smith and Hermite normal forms, kernels, gcd.

Everything here is plain-int arithmetic on small dense matrices; matrices are
lists of lists internally and tuples of tuples at the API boundary.
"""

from __future__ import annotations

from math import gcd
from typing import Sequence


def identity_matrix(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [
        [sum(a_row[k] * B[k][j] for k in range(inner)) for j in range(cols)]
        for a_row in A
    ]


def int_det(M) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(map(int, row)) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # Bareiss: division is exact
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def smith_normal_form(M):
    """(S, P, Q) with P*M*Q = S diagonal, P and Q unimodular, diagonal entries
    nonnegative with d_1 | d_2 | ... .
    """
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    P = identity_matrix(m)
    Q = identity_matrix(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        P[dst] = [a + q * b for a, b in zip(P[dst], P[src])]

    def add_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in Q:
            row[dst] += q * row[src]

    def negate_row(i):
        A[i] = [-a for a in A[i]]
        P[i] = [-a for a in P[i]]

    k = 0
    while k < min(m, n):
        # pick the submatrix entry of least nonzero magnitude as pivot
        best = None
        for i in range(k, m):
            for j in range(k, n):
                if A[i][j] != 0 and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(k, best[0])
        swap_cols(k, best[1])
        while True:
            # clear column k
            dirty = False
            for i in range(k + 1, m):
                if A[i][k] != 0:
                    q = A[i][k] // A[k][k]
                    add_row(i, k, -q)
                    if A[i][k] != 0:
                        swap_rows(k, i)
                        dirty = True
            if dirty:
                continue
            # clear row k
            for j in range(k + 1, n):
                if A[k][j] != 0:
                    q = A[k][j] // A[k][k]
                    add_col(j, k, -q)
                    if A[k][j] != 0:
                        swap_cols(k, j)
                        dirty = True
            if dirty:
                continue
            # divisibility fix: pivot must divide the rest of the submatrix
            offender = None
            for i in range(k + 1, m):
                for j in range(k + 1, n):
                    if A[i][j] % A[k][k] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(k, offender, 1)
        if A[k][k] < 0:
            negate_row(k)
        k += 1
    S = [[A[i][j] for j in range(n)] for i in range(m)]
    return (
        tuple(tuple(r) for r in S),
        tuple(tuple(r) for r in P),
        tuple(tuple(r) for r in Q),
    )


def invariant_factors(M) -> tuple:
    S, _, _ = smith_normal_form(M)
    out = []
    for i in range(min(len(S), len(S[0]) if S else 0)):
        if S[i][i] != 0:
            out.append(S[i][i])
    return tuple(out)


def integer_kernel_basis(M) -> tuple:
    """Basis of the lattice {w integral : M w = 0}, in Hermite normal form.

    The kernel of an integer matrix is automatically saturated, so this basis
    also spans the rational kernel.
    """
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0:
        return hermite_normal_form_rows(identity_matrix(n))
    S, _, Q = smith_normal_form(M)
    rank = sum(1 for i in range(min(m, n)) if S[i][i] != 0)
    # kernel = Q * (last n - rank coordinate vectors)
    vectors = [tuple(Q[i][j] for i in range(n)) for j in range(rank, n)]
    return hermite_normal_form_rows(vectors)


def hermite_normal_form_rows(vectors) -> tuple:
    """Row-style HNF of the lattice spanned by the given integer row vectors.

    Canonical: pivot entries positive, entries above a pivot reduced into
    [0, pivot), zero rows dropped. Two generating sets of the same lattice map
    to identical output.
    """
    rows = [list(map(int, v)) for v in vectors]
    if not rows:
        return ()
    n = len(rows[0])
    r = 0
    for c in range(n):
        pivot = None
        while True:
            candidates = [i for i in range(r, len(rows)) if rows[i][c] != 0]
            if not candidates:
                break
            i0 = min(candidates, key=lambda i: abs(rows[i][c]))
            rows[r], rows[i0] = rows[i0], rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                if rows[i][c] != 0:
                    q = rows[i][c] // rows[r][c]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
                    if rows[i][c] != 0:
                        done = False
            if done:
                pivot = r
                break
        if pivot is None:
            continue
        if rows[r][c] < 0:
            rows[r] = [-a for a in rows[r]]
        for i in range(r):
            q = rows[i][c] // rows[r][c]
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return tuple(tuple(row) for row in rows[:r])


def gcd_vector(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    return g


def primitive_vector(v: Sequence[int]) -> tuple:
    """v divided by the gcd of its entries, orientation preserved."""
    g = gcd_vector(v)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(int(x) // g for x in v)

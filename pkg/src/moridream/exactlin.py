"""Exact integer and rational linear algebra.

Matrices are plain tuples of row tuples holding Python ints (or
``fractions.Fraction`` for the rational routines).  Nothing here ever
touches floating point, and every routine returns fresh immutable data.

Conventions
-----------
* ``hermite_normal_form`` is column-style: ``H = M @ U`` with ``U``
  unimodular and ``H`` lower echelon.  Pivots are positive and every entry
  to the left of a pivot lies in ``[0, pivot)``.
* ``smith_normal_form`` returns ``(S, U, V)`` with ``S = U @ M @ V`` and a
  nonnegative diagonal ``d1 | d2 | ...``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

Matrix = tuple  # tuple[tuple[int, ...], ...]


def as_matrix(rows: Iterable[Iterable], ncols: Optional[int] = None) -> Matrix:
    """Freeze a nested iterable into a tuple-of-tuples matrix."""
    out = tuple(tuple(r) for r in rows)
    if ncols is not None and out and any(len(r) != ncols for r in out):
        raise ValueError("ragged matrix")
    if out and len({len(r) for r in out}) != 1:
        raise ValueError("ragged matrix")
    return out


def shape(M: Matrix, ncols: int = 0) -> tuple[int, int]:
    return (len(M), len(M[0]) if M else ncols)


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> Matrix:
    return tuple((0,) * n for _ in range(m))


def transpose(M: Matrix, ncols: int = 0) -> Matrix:
    if not M:
        return tuple(() for _ in range(ncols))
    return tuple(zip(*M))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    Bt = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A: Matrix, v: Sequence) -> tuple:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in A)


def columns(M: Matrix) -> list[tuple]:
    return list(transpose(M))


def from_columns(cols: Sequence[Sequence[int]], nrows: int) -> Matrix:
    if not cols:
        return tuple(() for _ in range(nrows))
    return tuple(zip(*cols))


def vgcd(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v: Sequence[int]) -> tuple:
    """Divide an integer vector by the gcd of its entries (zero stays zero)."""
    g = vgcd(v)
    if g <= 1:
        return tuple(v)
    return tuple(x // g for x in v)


def integral_primitive(v: Sequence) -> tuple:
    """Scale a rational vector to the primitive integer vector on its ray."""
    den = 1
    for x in v:
        if isinstance(x, Fraction):
            den = den * x.denominator // gcd(den, x.denominator)
    return primitive(tuple(int(x * den) for x in v))


def det(M: Matrix) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Hermite normal form (column style)


def hermite_normal_form(M: Matrix, ncols: Optional[int] = None) -> tuple[Matrix, Matrix]:
    """Column-style Hermite normal form.

    Returns ``(H, U)`` with ``H = M @ U``, ``U`` unimodular, ``H`` lower
    echelon with positive pivots and reduced entries left of each pivot.
    ``ncols`` is needed only for matrices with zero rows.
    """
    m = len(M)
    n = len(M[0]) if m else (ncols or 0)
    H = [list(c) for c in transpose(M, n)] if m else [[] for _ in range(n)]
    U = [[1 if i == j else 0 for i in range(n)] for j in range(n)]  # columns
    piv_col = 0
    for i in range(m):
        if piv_col >= n:
            break
        # bring the gcd of row i (columns piv_col..) into column piv_col
        while True:
            nz = [j for j in range(piv_col, n) if H[j][i] != 0]
            if not nz:
                break
            jmin = min(nz, key=lambda j: abs(H[j][i]))
            if jmin != piv_col:
                H[piv_col], H[jmin] = H[jmin], H[piv_col]
                U[piv_col], U[jmin] = U[jmin], U[piv_col]
            p = H[piv_col][i]
            done = True
            hp, up = H[piv_col], U[piv_col]
            for j in range(piv_col + 1, n):
                a = H[j][i]
                if a:
                    q = a // p
                    hj, uj = H[j], U[j]
                    for t in range(i, m):
                        hj[t] -= q * hp[t]
                    for t in range(n):
                        uj[t] -= q * up[t]
                    if hj[i]:
                        done = False
            if done:
                break
        if all(H[j][i] == 0 for j in range(piv_col, n)):
            continue
        if H[piv_col][i] < 0:
            H[piv_col] = [-x for x in H[piv_col]]
            U[piv_col] = [-x for x in U[piv_col]]
        p = H[piv_col][i]
        hp, up = H[piv_col], U[piv_col]
        for j in range(piv_col):
            q = H[j][i] // p
            if q:
                hj, uj = H[j], U[j]
                for t in range(i, m):
                    hj[t] -= q * hp[t]
                for t in range(n):
                    uj[t] -= q * up[t]
        piv_col += 1
    return from_columns(H, m), from_columns(U, n)


def hnf_columns(cols: Sequence[Sequence[int]], dim: int) -> tuple:
    """Canonical lattice basis: nonzero HNF columns of the given generators."""
    if not cols:
        return ()
    H, _ = hermite_normal_form(from_columns(cols, dim))
    return tuple(c for c in transpose(H) if any(c))


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(M: Matrix, ncols: Optional[int] = None) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form ``S = U @ M @ V`` with ``d1 | d2 | ...`` on the diagonal."""
    m = len(M)
    n = len(M[0]) if m else (ncols or 0)
    A = [list(r) for r in M]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]  # rows
    Vc = [[1 if i == j else 0 for i in range(n)] for j in range(n)]  # columns of V

    def swap_rows(a, b):
        A[a], A[b] = A[b], A[a]
        U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in A:
            row[a], row[b] = row[b], row[a]
        Vc[a], Vc[b] = Vc[b], Vc[a]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        rd, rs = A[dst], A[src]
        for t in range(n):
            rd[t] -= q * rs[t]
        ud, us = U[dst], U[src]
        for t in range(m):
            ud[t] -= q * us[t]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in A:
            row[dst] -= q * row[src]
        vd, vs = Vc[dst], Vc[src]
        for t in range(n):
            vd[t] -= q * vs[t]

    for t in range(min(m, n)):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            changed = False
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, A[i][t] // A[t][t])
                    if A[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, A[t][j] // A[t][t])
                    if A[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            p = A[t][t]
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
    S = as_matrix(A) if m else ()
    return S, as_matrix(U) if m else (), from_columns(Vc, n) if n else tuple(() for _ in range(n))


def smith_diagonal(M: Matrix, ncols: Optional[int] = None) -> list[int]:
    """Nonzero invariant factors of ``M`` (in divisibility order)."""
    if not M:
        return []
    S, _, _ = smith_normal_form(M, ncols)
    return [S[i][i] for i in range(min(len(S), len(S[0]))) if S[i][i]]


# ---------------------------------------------------------------------------
# kernels, rank, rational solving


def integer_kernel(M: Matrix, ncols: Optional[int] = None) -> Matrix:
    """Lattice basis (as columns) of ``{x in Z^n : M x = 0}``.

    Returns an ``n x k`` matrix; ``k == 0`` gives rows of length zero.
    """
    n = len(M[0]) if M else (ncols or 0)
    if not M:
        return identity(n)
    H, U = hermite_normal_form(M)
    Hc, Uc = transpose(H), transpose(U)
    basis = [Uc[j] for j in range(n) if not any(Hc[j])]
    # make deterministic and small: HNF of the kernel lattice
    if basis:
        basis = list(hnf_columns(basis, n))
    return from_columns(basis, n)


def rational_rref(M: Sequence[Sequence], ncols: Optional[int] = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns rows and pivot columns."""
    A = [[Fraction(x) for x in row] for row in M]
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M: Sequence[Sequence]) -> int:
    """Rank over Q (fraction-free Gaussian elimination on integer input)."""
    rows = [list(r) for r in M if any(r)]
    if not rows:
        return 0
    if any(isinstance(x, Fraction) for r in rows for x in r):
        return len(rational_rref(rows)[1])
    n = len(rows[0])
    rk = 0
    for c in range(n):
        p = next((i for i in range(rk, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[rk], rows[p] = rows[p], rows[rk]
        pr = rows[rk]
        a = pr[c]
        for i in range(rk + 1, len(rows)):
            b = rows[i][c]
            if b:
                ri = rows[i]
                rows[i] = [a * x - b * y for x, y in zip(ri, pr)]
        rk += 1
        if rk == len(rows):
            break
    return rk


def rational_kernel(M: Sequence[Sequence], ncols: Optional[int] = None) -> list[tuple]:
    """Basis of the rational kernel, returned as primitive integer vectors."""
    n = len(M[0]) if M else (ncols or 0)
    R, piv = rational_rref(M, n)
    free = [c for c in range(n) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, pc in zip(R, piv):
            v[pc] = -row[f]
        out.append(integral_primitive(v))
    return out


def rational_solve(M: Sequence[Sequence], b: Sequence) -> Optional[tuple]:
    """One exact solution of ``M x = b`` over Q, or ``None`` if inconsistent."""
    m = len(M)
    n = len(M[0]) if m else 0
    if m == 0:
        return tuple(Fraction(0) for _ in range(n))
    aug = [list(row) + [bi] for row, bi in zip(M, b)]
    R, piv = rational_rref(aug, n + 1)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, pc in zip(R, piv):
        x[pc] = row[n]
    return tuple(x)


def rational_inverse(M: Matrix) -> tuple:
    n = len(M)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(M)]
    R, piv = rational_rref(aug, 2 * n)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(r[n:]) for r in R)

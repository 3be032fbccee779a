"""Dense exact linear algebra over a FieldSpec, plus batched helpers mod p.

:class:`Mat` stores entries as integer element codes.  Rows are vectors;
``kernel_basis`` returns the right null space as rows.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import NotSquare, ParamError, SpecMismatch
from .field import FieldElement, FieldSpec


class Mat:
    """A rows x cols matrix over ``spec`` with integer-coded entries."""

    __slots__ = ("spec", "rows", "cols", "entries")

    def __init__(self, spec: FieldSpec, entries: Sequence[Sequence], cols: int | None = None):
        self.spec = spec
        grid = []
        for row in entries:
            grid.append([_code(spec, e) for e in row])
        self.entries = grid
        self.rows = len(grid)
        if cols is None:
            if not grid:
                raise ParamError("column count required for an empty matrix")
            cols = len(grid[0])
        if any(len(r) != cols for r in grid):
            raise ParamError("ragged matrix")
        self.cols = cols

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int) -> "Mat":
        return cls(spec, [[0] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "Mat":
        return cls(spec, [[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij) -> FieldElement:
        i, j = ij
        return FieldElement(self.spec, self.entries[i][j])

    def __setitem__(self, ij, value) -> None:
        i, j = ij
        self.entries[i][j] = _code(self.spec, value)

    def copy(self) -> "Mat":
        return Mat(self.spec, [list(r) for r in self.entries], self.cols)

    def transpose(self) -> "Mat":
        return Mat(self.spec, [list(c) for c in zip(*self.entries)] if self.rows else
                   [[] for _ in range(self.cols)], self.rows)

    @property
    def T(self) -> "Mat":
        return self.transpose()

    def __matmul__(self, other: "Mat") -> "Mat":
        return matmul(self, other)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Mat) and self.spec == other.spec and self.cols == other.cols
                and self.entries == other.entries)

    def __repr__(self) -> str:
        return f"Mat({self.spec!r}, {self.rows}x{self.cols})"

    def row_vectors(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def _code(spec: FieldSpec, e) -> int:
    if isinstance(e, FieldElement):
        if e.field != spec:
            raise SpecMismatch(f"{e.field!r} entry in a {spec!r} matrix")
        return e.code
    e = int(e)
    if not 0 <= e < spec.order:
        raise ParamError(f"code {e} out of range for {spec!r}")
    return e


def matmul(A: Mat, B: Mat) -> Mat:
    if A.spec != B.spec:
        raise SpecMismatch("matrices over different fields")
    if A.cols != B.rows:
        raise ParamError("inner dimensions differ")
    F = A.spec
    add, mul = F.add, F.mul
    Bt = list(zip(*B.entries)) if B.rows else [() for _ in range(B.cols)]
    out = []
    for row in A.entries:
        new = []
        for col in Bt:
            acc = 0
            for a, b in zip(row, col):
                if a and b:
                    acc = add(acc, mul(a, b))
            new.append(acc)
        out.append(new)
    return Mat(F, out, B.cols)


def _rref_rows(F: FieldSpec, rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """In-place Gauss-Jordan; returns (nonzero rows, pivot columns)."""
    add, sub, mul, inv = F.add, F.sub, F.mul, F.inv
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        prow = rows[r]
        lead = prow[c]
        if lead != 1:
            li = inv(lead)
            prow = [mul(x, li) if x else 0 for x in prow]
            rows[r] = prow
        nz = [(j, x) for j, x in enumerate(prow) if x and j > c]
        for i in range(nrows):
            if i != r:
                f = rows[i][c]
                if f:
                    row = rows[i]
                    row[c] = 0
                    for j, x in nz:
                        row[j] = sub(row[j], mul(f, x))
        pivots.append(c)
        r += 1
    del add
    return rows[:r], pivots


def rref(A: Mat) -> tuple[Mat, int, list[int]]:
    """Reduced row echelon form (zero rows kept at the bottom), rank, pivots."""
    rows = [list(r) for r in A.entries]
    nz, pivots = _rref_rows(A.spec, rows, A.cols)
    full = nz + [[0] * A.cols for _ in range(A.rows - len(nz))]
    return Mat(A.spec, full, A.cols), len(pivots), pivots


def row_basis(A: Mat) -> Mat:
    """Nonzero rows of rref(A): the canonical basis of the row space."""
    rows = [list(r) for r in A.entries]
    nz, _ = _rref_rows(A.spec, rows, A.cols)
    return Mat(A.spec, nz, A.cols)


def rank(A: Mat) -> int:
    return rref(A)[1]


def det(A: Mat):
    """Determinant by Gaussian elimination with row swaps tracked."""
    if A.rows != A.cols:
        raise NotSquare(f"{A.rows}x{A.cols} matrix has no determinant")
    F = A.spec
    return FieldElement(F, det_codes(F, A.entries))


def det_codes(F: FieldSpec, entries: Sequence[Sequence[int]]) -> int:
    n = len(entries)
    if n == 0:
        return 1
    rows = [list(r) for r in entries]
    sub, mul, inv = F.sub, F.mul, F.inv
    result = 1
    for c in range(n):
        piv = None
        for i in range(c, n):
            if rows[i][c]:
                piv = i
                break
        if piv is None:
            return 0
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            result = F.neg(result)
        prow = rows[c]
        lead = prow[c]
        result = mul(result, lead)
        li = inv(lead)
        nz = [(j, prow[j]) for j in range(c + 1, n) if prow[j]]
        for i in range(c + 1, n):
            f = rows[i][c]
            if f:
                f = mul(f, li)
                row = rows[i]
                for j, x in nz:
                    row[j] = sub(row[j], mul(f, x))
    return result


def kernel_basis(A: Mat) -> Mat:
    """Rows spanning {x : A x = 0}; one row per free column of rref(A)."""
    F = A.spec
    R, rk, pivots = rref(A)
    free = [j for j in range(A.cols) if j not in set(pivots)]
    out = []
    for f in free:
        v = [0] * A.cols
        v[f] = 1
        for i, pc in enumerate(pivots):
            x = R.entries[i][f]
            if x:
                v[pc] = F.neg(x)
        out.append(v)
    return Mat(F, out, A.cols)


def solve(A: Mat, b: Sequence) -> list[FieldElement] | None:
    """A particular x with A x = b, or None when the system is inconsistent."""
    F = A.spec
    bc = [_code(F, e) for e in b]
    if len(bc) != A.rows:
        raise ParamError("right-hand side has the wrong length")
    aug = [list(r) + [bi] for r, bi in zip(A.entries, bc)]
    nz, pivots = _rref_rows(F, aug, A.cols + 1)
    if pivots and pivots[-1] == A.cols:
        return None
    x = [0] * A.cols
    for row, pc in zip(nz, pivots):
        x[pc] = row[-1]
    return [FieldElement(F, c) for c in x]


def intersect_rowspaces(A: Mat, B: Mat) -> Mat:
    """Canonical basis of rowspace(A) ∩ rowspace(B) (Zassenhaus)."""
    if A.spec != B.spec:
        raise SpecMismatch("matrices over different fields")
    if A.cols != B.cols:
        raise ParamError("matrices have different column counts")
    F = A.spec
    n = A.cols
    rows = [list(r) + list(r) for r in A.entries] + [list(r) + [0] * n for r in B.entries]
    nz, pivots = _rref_rows(F, rows, 2 * n)
    inter = [row[n:] for row, pc in zip(nz, pivots) if pc >= n]
    return row_basis(Mat(F, inter, n)) if inter else Mat(F, [], n)


def sum_rowspaces(A: Mat, B: Mat) -> Mat:
    if A.spec != B.spec:
        raise SpecMismatch("matrices over different fields")
    return row_basis(Mat(A.spec, A.entries + B.entries, A.cols))


# ---------------------------------------------------------------------------
# plain integer matrices mod p


def _inv_table(p: int) -> np.ndarray:
    t = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        t[a] = pow(a, p - 2, p)
    return t


def rref_mod_p(A, p: int) -> tuple[np.ndarray, list[int]]:
    """RREF of an integer matrix over GF(p); returns (nonzero rows, pivots)."""
    A = np.array(A, dtype=np.int64) % p
    if A.ndim != 2:
        raise ParamError("expected a 2-d array")
    rows, cols = A.shape
    inv = _inv_table(p)
    r = 0
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        nzr = np.nonzero(A[r:, c])[0]
        if nzr.size == 0:
            continue
        i = r + nzr[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        A[r] = (A[r] * inv[A[r, c]]) % p
        f = A[:, c].copy()
        f[r] = 0
        A = (A - np.outer(f, A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank_mod_p(A, p: int) -> int:
    return len(rref_mod_p(A, p)[1])


def kernel_mod_p(A, p: int) -> np.ndarray:
    """Rows spanning the right null space of A over GF(p)."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    R, pivots = rref_mod_p(A, p)
    free = [j for j in range(cols) if j not in set(pivots)]
    K = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        K[k, f] = 1
        for i, pc in enumerate(pivots):
            K[k, pc] = (-R[i, f]) % p
    return K


def solve_mod_p(rows: Sequence[Sequence[int]], target: Sequence[int], p: int) -> list[int] | None:
    """Coefficients c with sum_i c_i rows[i] = target over GF(p), or None."""
    A = np.array(rows, dtype=np.int64).T % p
    b = np.array(target, dtype=np.int64).reshape(-1, 1) % p
    R, pivots = rref_mod_p(np.hstack([A, b]), p)
    n = A.shape[1]
    if pivots and pivots[-1] == n:
        return None
    x = [0] * n
    for i, pc in enumerate(pivots):
        x[pc] = int(R[i, -1])
    return x


def batch_rank_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices (B, rows, cols) over GF(p)."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim != 3:
        raise ParamError("expected a 3-d stack")
    B, R, C = A.shape
    if B == 0:
        return np.zeros(0, dtype=np.int64)
    if p == 2 and C <= 63:
        packed = (A & 1) @ (np.int64(1) << np.arange(C, dtype=np.int64))
        return batch_rank_gf2(packed)
    A = A % p
    inv = _inv_table(p)
    used = np.zeros((B, R), dtype=bool)
    rk = np.zeros(B, dtype=np.int64)
    for c in range(C):
        cand = (A[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        idx = np.nonzero(has)[0]
        pr = cand[idx].argmax(axis=1)
        sub = A[idx]
        ar = np.arange(idx.size)
        prow = sub[ar, pr]
        prow = (prow * inv[prow[:, c]][:, None]) % p
        factor = sub[:, :, c] * (~used[idx])
        factor[ar, pr] = 0
        sub = (sub - factor[:, :, None] * prow[:, None, :]) % p
        sub[ar, pr] = prow
        A[idx] = sub
        used[idx, pr] = True
        rk[idx] += 1
    return rk


def batch_rank_gf2(rows: np.ndarray) -> np.ndarray:
    """Ranks over GF(2) of a stack (B, R) of bit-packed rows (at most 63 bits)."""
    A = np.array(rows, dtype=np.int64)
    B, R = A.shape
    rk = np.zeros(B, dtype=np.int64)
    for i in range(R):
        row = A[:, i]
        nonzero = row != 0
        rk += nonzero
        low = row & -row
        for j in range(i + 1, R):
            hit = (A[:, j] & low) != 0
            A[:, j] ^= np.where(hit, row, 0)
    return rk


def mats_from_elements(spec: FieldSpec, grid: Iterable[Iterable]) -> Mat:
    return Mat(spec, [list(r) for r in grid])

"""F_q-subspaces and F_{q^n}-subspaces of V(r, q^n) = F_{q^n}^r.

Vectors are tuples of r integer codes of the big field F_{q^n}.  An F_q-subspace
is stored canonically through the RREF of its flattened t x rn matrix over F_q,
where each coordinate is expanded in the polynomial basis 1, z, ..., z^(n-1) of
F_{q^n} over F_q (z the canonical generator of the big field).
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import AmbientMismatch, BudgetExceeded, MissingTowerConfig, ParamError
from .field import GF, FieldElement, FieldSpec, SubfieldMap, prime_power, subfield_map
from .linalg import Mat, rank, rank_mod_p, rref_mod_p, row_basis

DEFAULT_BUDGET = 10 ** 7


def gaussian_binomial(r: int, h: int, Q: int) -> int:
    """Number of h-dimensional subspaces of an r-dimensional space over GF(Q)."""
    if h < 0 or h > r:
        return 0
    num = den = 1
    for i in range(h):
        num *= Q ** (r - i) - 1
        den *= Q ** (i + 1) - 1
    return num // den


def _inverse_mod_p(B: np.ndarray, p: int) -> np.ndarray:
    n = B.shape[0]
    R, pivots = rref_mod_p(np.hstack([B % p, np.eye(n, dtype=np.int64)]), p)
    if pivots != list(range(n)):
        raise ParamError("matrix is singular mod p")
    return R[:, n:]


class AmbientSpace:
    """V(r, q^n) with its fixed coordinate conventions."""

    def __init__(self, q: int, n: int, r: int):
        if n < 1 or r < 1:
            raise ParamError("n and r must be positive")
        self.q, self.n, self.r = q, n, r
        self.p, self.s = prime_power(q)
        self.big: FieldSpec = GF(self.p, n * self.s)
        self.base: FieldSpec = GF(self.p, self.s)
        self.base_embedding: SubfieldMap = subfield_map(self.base, self.big)
        big = self.big
        zeta = big.gen.code
        self.flatten_basis = [big.pow(zeta, i) for i in range(n)]
        theta = self.base_embedding.image_of_generator
        self._theta_pows = [big.pow(theta, j) for j in range(self.s)]
        # F_p basis theta^j zeta^i of the big field; row (i*s + j)
        B = np.array([big.digits(big.mul(self._theta_pows[j], self.flatten_basis[i]))
                      for i in range(n) for j in range(self.s)], dtype=np.int64)
        self._B = B
        self._Binv = _inverse_mod_p(B, self.p)
        self._model = None

    # -- identity -----------------------------------------------------------

    @property
    def key(self) -> tuple:
        return (self.q, self.n, self.r)

    def __eq__(self, other) -> bool:
        return isinstance(other, AmbientSpace) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"V({self.r},{self.q}^{self.n})"

    def __reduce__(self):
        return (ambient, self.key)

    @property
    def dim_q(self) -> int:
        return self.r * self.n

    @property
    def fp_dim(self) -> int:
        return self.r * self.n * self.s

    # -- scalars ------------------------------------------------------------

    def fq_scalars(self) -> list[int]:
        """Codes (in the big field) of the elements of F_q, in base-code order."""
        emb = self.base_embedding.embed_code
        return [emb(c) for c in range(self.q)]

    def fp_scalar_basis(self) -> list[int]:
        """theta^j, j < s: an F_p-basis of F_q inside the big field."""
        return list(self._theta_pows)

    # -- flattening ---------------------------------------------------------

    def fp_coords(self, codes) -> np.ndarray:
        """F_p coordinates of big-field codes w.r.t. theta^j zeta^i; shape (..., n*s)."""
        D = self.big.batch.digits(np.asarray(codes, dtype=np.int64))
        if self.s == 1:
            return D
        return (D @ self._Binv) % self.p

    def from_fp_coords(self, C) -> np.ndarray:
        C = np.asarray(C, dtype=np.int64)
        if self.s == 1:
            return self.big.batch.codes(C)
        return self.big.batch.codes((C @ self._B) % self.p)

    def flatten_vectors(self, vectors) -> np.ndarray:
        """F_p coordinates of vectors (..., r) -> (..., r*n*s)."""
        V = np.asarray(vectors, dtype=np.int64)
        C = self.fp_coords(V)
        return C.reshape(V.shape[:-1] + (self.r * self.n * self.s,))

    def unflatten_vectors(self, C) -> np.ndarray:
        C = np.asarray(C, dtype=np.int64)
        C = C.reshape(C.shape[:-1] + (self.r, self.n * self.s))
        return self.from_fp_coords(C)

    def fq_flatten(self, vectors) -> list[list[int]]:
        """Each vector as rn base-field codes (F_q coordinates)."""
        C = self.flatten_vectors(np.atleast_2d(np.asarray(vectors, dtype=np.int64)))
        s, p = self.s, self.p
        if s == 1:
            return C.tolist()
        W = np.array([p ** j for j in range(s)], dtype=np.int64)
        return (C.reshape(C.shape[0], self.r * self.n, s) @ W).tolist()

    def fq_unflatten(self, rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
        if not rows:
            return []
        R = np.asarray(rows, dtype=np.int64)
        if self.s > 1:
            R = self.base.batch.digits(R).reshape(R.shape[0], -1)
        V = self.unflatten_vectors(R)
        return [tuple(int(x) for x in v) for v in V]

    # -- misc helpers -------------------------------------------------------

    def check_vector(self, v) -> tuple[int, ...]:
        if isinstance(v, np.ndarray):
            v = v.tolist()
        codes = []
        for x in v:
            if isinstance(x, FieldElement):
                if x.field != self.big:
                    raise AmbientMismatch(f"{x.field!r} coordinate in {self!r}")
                codes.append(x.code)
            else:
                x = int(x)
                if not 0 <= x < self.big.order:
                    raise AmbientMismatch(f"coordinate code {x} outside {self.big!r}")
                codes.append(x)
        if len(codes) != self.r:
            raise AmbientMismatch(f"vector of length {len(codes)} in {self!r}")
        return tuple(codes)

    def scale(self, c: int, v: Sequence[int]) -> tuple[int, ...]:
        mul = self.big.mul
        return tuple(mul(c, x) for x in v)

    def zero_vector(self) -> tuple[int, ...]:
        return (0,) * self.r

    def unit_vector(self, i: int, value: int = 1) -> tuple[int, ...]:
        v = [0] * self.r
        v[i] = value
        return tuple(v)

    @property
    def field_model(self) -> "FieldModel":
        if self._model is None:
            self._model = FieldModel(self)
        return self._model

    def whole(self) -> "FqSubspace":
        vecs = [self.unit_vector(i, z) for i in range(self.r) for z in self.flatten_basis]
        return FqSubspace(self, vecs)

    def zero(self) -> "FqSubspace":
        return FqSubspace(self, [])


@functools.lru_cache(maxsize=None)
def ambient(q: int, n: int, r: int) -> AmbientSpace:
    return AmbientSpace(q, n, r)


# ---------------------------------------------------------------------------


class FqSubspace:
    """An F_q-subspace of V(r, q^n), canonicalised on construction."""

    def __init__(self, amb: AmbientSpace, vectors: Iterable = ()):
        self.ambient = amb
        vecs = [amb.check_vector(v) for v in vectors]
        rn = amb.dim_q
        if vecs:
            rows = amb.fq_flatten(vecs)
            R = row_basis(Mat(amb.base, rows, rn))
            self.rows = tuple(tuple(r) for r in R.entries)
        else:
            self.rows = ()
        self.basis = tuple(amb.fq_unflatten([list(r) for r in self.rows]))
        self.t = len(self.rows)

    @classmethod
    def _from_canonical(cls, amb: AmbientSpace, rows) -> "FqSubspace":
        obj = cls.__new__(cls)
        obj.ambient = amb
        obj.rows = tuple(tuple(int(x) for x in r) for r in rows)
        obj.basis = tuple(amb.fq_unflatten([list(r) for r in obj.rows]))
        obj.t = len(obj.rows)
        return obj

    @property
    def dim(self) -> int:
        return self.t

    def __len__(self) -> int:
        return self.ambient.q ** self.t

    def __eq__(self, other) -> bool:
        return isinstance(other, FqSubspace) and self.ambient == other.ambient and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.ambient.key, self.rows))

    def __repr__(self) -> str:
        return f"FqSubspace({self.ambient!r}, dim={self.t})"

    def fp_basis(self) -> np.ndarray:
        """An F_p-basis of U as an array (t*s, r) of codes."""
        amb = self.ambient
        if self.t == 0:
            return np.zeros((0, amb.r), dtype=np.int64)
        B = np.asarray(self.basis, dtype=np.int64)
        if amb.s == 1:
            return B
        th = np.asarray(amb.fp_scalar_basis(), dtype=np.int64)
        out = amb.big.batch.mul(B[:, None, :], th[None, :, None])
        return out.reshape(-1, amb.r)

    def elements(self) -> np.ndarray:
        """All q^t vectors of U, shape (q^t, r)."""
        amb = self.ambient
        big = amb.big
        E = np.zeros((1, amb.r), dtype=np.int64)
        for b in self.fp_basis():
            mults = [np.asarray([big.mul(c, x) for x in b], dtype=np.int64) for c in range(amb.p)]
            E = np.concatenate([big.batch.add(E, m[None, :]) for m in mults], axis=0)
        return E

    def contains(self, v) -> bool:
        v = self.ambient.check_vector(v)
        return FqSubspace(self.ambient, list(self.basis) + [v]).t == self.t

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def is_subspace_of(self, other: "FqSubspace") -> bool:
        return sum_spaces(self, other).t == other.t

    def fqn_dim(self) -> int:
        return fqn_span_dim(self.ambient, self.basis)

    def to_json(self) -> dict:
        amb = self.ambient
        return {
            "field": amb.big.to_json(),
            "q": amb.q,
            "n": amb.n,
            "r": amb.r,
            "basis": [[amb.big.digits(x) for x in v] for v in self.basis],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def fq_span(amb: AmbientSpace, vectors: Iterable) -> FqSubspace:
    return FqSubspace(amb, vectors)


def subspace_from_json(obj: dict) -> FqSubspace:
    amb = ambient(int(obj["q"]), int(obj["n"]), int(obj["r"]))
    F = FieldSpec.from_json(obj["field"]) if "field" in obj else amb.big
    if F != amb.big:
        raise AmbientMismatch(f"file field {F!r} differs from {amb.big!r}")
    vecs = [[F.element_from_json(x) for x in v] for v in obj["basis"]]
    return FqSubspace(amb, vecs)


def load_subspace(path: str) -> FqSubspace:
    with open(path) as fh:
        return subspace_from_json(json.load(fh))


def save_subspace(U: FqSubspace, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(U.dumps() + "\n")


def sum_spaces(U1: FqSubspace, U2: FqSubspace) -> FqSubspace:
    if U1.ambient != U2.ambient:
        raise AmbientMismatch("subspaces live in different ambient spaces")
    return FqSubspace(U1.ambient, list(U1.basis) + list(U2.basis))


def intersect(U1: FqSubspace, U2: FqSubspace) -> FqSubspace:
    from .linalg import intersect_rowspaces

    if U1.ambient != U2.ambient:
        raise AmbientMismatch("subspaces live in different ambient spaces")
    amb = U1.ambient
    rn = amb.dim_q
    A = Mat(amb.base, [list(r) for r in U1.rows], rn)
    B = Mat(amb.base, [list(r) for r in U2.rows], rn)
    I = intersect_rowspaces(A, B)
    return FqSubspace._from_canonical(amb, I.entries)


def fqn_span_dim(amb: AmbientSpace, vectors: Iterable) -> int:
    vecs = [amb.check_vector(v) for v in vectors]
    if not vecs:
        return 0
    return rank(Mat(amb.big, vecs, amb.r))


# ---------------------------------------------------------------------------


class FqnSubspace:
    """An F_{q^n}-subspace, stored as the RREF of its basis over F_{q^n}."""

    def __init__(self, amb: AmbientSpace, vectors: Iterable = ()):
        self.ambient = amb
        vecs = [amb.check_vector(v) for v in vectors]
        if vecs:
            R = row_basis(Mat(amb.big, vecs, amb.r))
            self.basis = tuple(tuple(r) for r in R.entries)
        else:
            self.basis = ()
        self.h = len(self.basis)

    @classmethod
    def _from_rref(cls, amb: AmbientSpace, rows) -> "FqnSubspace":
        obj = cls.__new__(cls)
        obj.ambient = amb
        obj.basis = tuple(tuple(int(x) for x in r) for r in rows)
        obj.h = len(obj.basis)
        return obj

    @property
    def dim(self) -> int:
        return self.h

    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(row) if x) for row in self.basis]

    def __eq__(self, other) -> bool:
        return isinstance(other, FqnSubspace) and self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient.key, self.basis))

    def __repr__(self) -> str:
        return f"FqnSubspace({self.ambient!r}, dim={self.h})"

    def sort_key(self) -> tuple:
        """Position in the enumeration order of enumerate_h_subspaces."""
        piv = self.pivots()
        free = [self.basis[i][c] for i, pc in enumerate(piv) for c in range(pc + 1, self.ambient.r)
                if c not in piv]
        return (tuple(piv), tuple(free))

    def to_json(self) -> dict:
        amb = self.ambient
        return {"q": amb.q, "n": amb.n, "r": amb.r,
                "basis": [[amb.big.digits(x) for x in v] for v in self.basis]}

    @classmethod
    def from_json(cls, obj: dict) -> "FqnSubspace":
        amb = ambient(int(obj["q"]), int(obj["n"]), int(obj["r"]))
        return cls(amb, [[amb.big.element_from_json(x) for x in v] for v in obj["basis"]])


def expand(W: FqnSubspace) -> FqSubspace:
    """W seen as an F_q-subspace of dimension n * dim W."""
    amb = W.ambient
    vecs = [amb.scale(z, w) for w in W.basis for z in amb.flatten_basis]
    return FqSubspace(amb, vecs)


# ---------------------------------------------------------------------------
# enumeration of h-dimensional F_{q^n}-subspaces


@dataclass(frozen=True)
class PivotBlock:
    """All RREF h x r matrices with a given pivot pattern."""

    pivots: tuple[int, ...]
    free: tuple[tuple[int, int], ...]  # (row, column) of the free entries, row-major
    count: int


def pivot_blocks(amb: AmbientSpace, h: int) -> list[PivotBlock]:
    Q = amb.big.order
    out = []
    for piv in itertools.combinations(range(amb.r), h):
        free = tuple((i, c) for i, pc in enumerate(piv) for c in range(pc + 1, amb.r) if c not in piv)
        out.append(PivotBlock(piv, free, Q ** len(free)))
    return out


def block_matrices(amb: AmbientSpace, block: PivotBlock, lo: int, hi: int | None = None) -> np.ndarray:
    """RREF matrices with indices lo..hi-1 inside a block, shape (hi-lo, h, r).

    ``lo`` may instead be an explicit array of indices (then ``hi`` is None).
    """
    Q = amb.big.order
    h = len(block.pivots)
    if hi is None:
        idx = np.asarray(lo, dtype=np.int64)
    else:
        idx = np.arange(lo, hi, dtype=np.int64)
    M = np.zeros((idx.size, h, amb.r), dtype=np.int64)
    for i, pc in enumerate(block.pivots):
        M[:, i, pc] = 1
    rem = idx
    for (i, c) in reversed(block.free):
        rem, M[:, i, c] = np.divmod(rem, Q)
    return M


def count_h_subspaces(amb: AmbientSpace, h: int) -> int:
    return gaussian_binomial(amb.r, h, amb.big.order)


def enumerate_h_subspaces(amb: AmbientSpace, h: int, budget: int | None = DEFAULT_BUDGET,
                          start: int = 0, stop: int | None = None) -> Iterator[FqnSubspace]:
    """Every h-dim F_{q^n}-subspace once, in (pivot pattern, free entries) order.

    ``start``/``stop`` select a contiguous index range of the global order so
    the stream can be split between workers.
    """
    if not 0 < h <= amb.r:
        raise ParamError(f"h={h} outside 1..{amb.r}")
    total = count_h_subspaces(amb, h)
    if budget is not None and total > budget:
        raise BudgetExceeded(f"{total} subspaces exceed the budget {budget}")
    stop = total if stop is None else min(stop, total)
    offset = 0
    for block in pivot_blocks(amb, h):
        lo = max(start - offset, 0)
        hi = min(stop - offset, block.count)
        for a in range(lo, hi, 4096):
            b = min(a + 4096, hi)
            for M in block_matrices(amb, block, a, b):
                yield FqnSubspace._from_rref(amb, M.tolist())
        offset += block.count
        if offset >= stop:
            break


def random_h_subspace(amb: AmbientSpace, h: int, rng: np.random.Generator) -> FqnSubspace:
    """Uniform random h-dim F_{q^n}-subspace (rejection on random matrices)."""
    while True:
        M = rng.integers(0, amb.big.order, size=(h, amb.r))
        W = FqnSubspace(amb, M.tolist())
        if W.h == h:
            return W


# ---------------------------------------------------------------------------
# the field model F_{q^{rn}}


class FieldModel:
    """V(r,q^n) identified with F_{q^{rn}} via (v_0..v_{r-1}) -> sum v_i w^i.

    w is the canonical generator of the degree-rn extension and the big field
    sits inside it through a SubfieldMap.
    """

    def __init__(self, amb: AmbientSpace):
        self.ambient = amb
        try:
            self.L = GF(amb.p, amb.r * amb.n * amb.s)
            self.emb = subfield_map(amb.big, self.L)
        except Exception as exc:  # pragma: no cover - defensive
            raise MissingTowerConfig(str(exc)) from exc
        L = self.L
        omega = L.gen.code
        self.omega_pows = [L.pow(omega, i) for i in range(amb.r)]
        N = amb.n * amb.s
        big = amb.big
        rows = []
        for i in range(amb.r):
            for k in range(N):
                rows.append(L.digits(L.mul(self.emb.embed_code(big.p ** k),
                                           self.omega_pows[i])))
        self._fwd = np.array(rows, dtype=np.int64)
        self._inv = _inverse_mod_p(self._fwd, amb.p)

    def to_field(self, vectors) -> np.ndarray:
        """Codes in L of vectors (..., r)."""
        V = np.asarray(vectors, dtype=np.int64)
        D = self.ambient.big.batch.digits(V).reshape(V.shape[:-1] + (-1,))
        return self.L.batch.codes((D @ self._fwd) % self.ambient.p)

    def from_field(self, codes) -> np.ndarray:
        X = np.asarray(codes, dtype=np.int64)
        D = self.L.batch.digits(X)
        C = (D @ self._inv) % self.ambient.p
        C = C.reshape(X.shape + (self.ambient.r, -1))
        return self.ambient.big.batch.codes(C)

    def subspace_to_field(self, U: FqSubspace) -> list[int]:
        """Images in L of U's F_q-basis."""
        if U.t == 0:
            return []
        return [int(x) for x in self.to_field(np.asarray(U.basis, dtype=np.int64))]

    def subspace_from_field(self, basis_codes: Sequence[int]) -> FqSubspace:
        if not len(basis_codes):
            return FqSubspace(self.ambient, [])
        V = self.from_field(np.asarray(basis_codes, dtype=np.int64))
        return FqSubspace(self.ambient, V.tolist())


def to_field_model(U: FqSubspace) -> list[FieldElement]:
    M = U.ambient.field_model
    return [FieldElement(M.L, c) for c in M.subspace_to_field(U)]


def from_field_model(amb: AmbientSpace, elements: Sequence) -> FqSubspace:
    M = amb.field_model
    codes = [e.code if isinstance(e, FieldElement) else int(e) for e in elements]
    return M.subspace_from_field(codes)


def fq_span_codes(F: FieldSpec, q: int, basis: Sequence[int]) -> np.ndarray:
    """All F_q-combinations of elements of F (needs GF(q) inside F)."""
    p, s = prime_power(q)
    amb_scalars = _fp_basis_of_fq(F, s)
    gens = [F.mul(b, t) for b in basis for t in amb_scalars]
    E = np.zeros(1, dtype=np.int64)
    for g in gens:
        mults = [F.mul(c, g) for c in range(p)]
        E = np.concatenate([F.batch.add(E, np.int64(m)) for m in mults])
    return E


def _fp_basis_of_fq(F: FieldSpec, s: int) -> list[int]:
    if s == 1:
        return [1]
    m = subfield_map(GF(F.p, s), F)
    th = m.image_of_generator
    return [F.pow(th, j) for j in range(s)]


def fq_rank_in_field(F: FieldSpec, q: int, elems: Sequence[int]) -> int:
    """F_q-dimension of the span of field elements."""
    p, s = prime_power(q)
    sc = _fp_basis_of_fq(F, s)
    rows = [F.digits(F.mul(e, t)) for e in elems for t in sc]
    if not rows:
        return 0
    return rank_mod_p(np.array(rows), p) // s


def fq_basis_in_field(F: FieldSpec, q: int, elems: Sequence[int]) -> list[int]:
    """A greedy F_q-independent subset of ``elems`` spanning the same space."""
    out: list[int] = []
    r = 0
    for e in elems:
        r2 = fq_rank_in_field(F, q, out + [e])
        if r2 > r:
            out.append(e)
            r = r2
    return out

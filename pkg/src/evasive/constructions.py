"""Explicit evasive subspaces.

Every constructor returns an :class:`FqSubspace`; the claimed evasiveness
parameters are documented per function and measured by the test-suite.
"""

from __future__ import annotations

import numpy as np

from .errors import AmbientMismatch, NoKnownScattered, ParamError
from .linalg import kernel_mod_p
from .subspaces import AmbientSpace, FqSubspace, ambient, fq_basis_in_field


def _frob_q(amb: AmbientSpace, x: int, i: int) -> int:
    return amb.big.frob(x, amb.s * i)


def gabidulin(q: int, n: int, r: int) -> FqSubspace:
    """{(x, x^q, ..., x^(q^(r-1))) : x in F_q^n}: dimension n, (r-1, r-1)-evasive."""
    if n < r:
        raise ParamError(f"gabidulin needs n >= r (got n={n}, r={r})")
    amb = ambient(q, n, r)
    vecs = [tuple(_frob_q(amb, z, i) for i in range(r)) for z in amb.flatten_basis]
    return FqSubspace(amb, vecs)


def subfield_basis(amb: AmbientSpace, m: int) -> list[int]:
    """An F_q-basis of the subfield F_{q^m} of F_{q^n} (kernel of x^(q^m) - x)."""
    if amb.n % m:
        raise ParamError(f"{m} does not divide n={amb.n}")
    big = amb.big
    B = big.batch
    N = big.m
    F = B.frob_matrix(amb.s * m) - np.eye(N, dtype=np.int64)
    # row-vector convention: digits @ F = 0  <=>  F^T digits^T = 0
    K = kernel_mod_p(F.T, amb.p)
    elems = [int(c) for c in B.codes(K)] if K.size else []
    return fq_basis_in_field(big, amb.q, elems)


def subgeometry(q: int, n: int, r: int, m: int) -> FqSubspace:
    """F_{q^m}^r inside F_{q^n}^r: dimension mr, (h, mh)-evasive for h < r."""
    if m < 1 or n % m:
        raise ParamError(f"subgeometry needs m | n (got m={m}, n={n})")
    amb = ambient(q, n, r)
    basis = subfield_basis(amb, m)
    return FqSubspace(amb, [amb.unit_vector(i, b) for i in range(r) for b in basis])


def default_gammas(q: int, n: int, r: int) -> list[int]:
    amb = ambient(q, n, r)
    return [amb.big.pow(amb.big.gen.code, i) for i in range(r)]


def guruswami(q: int, n: int, r: int, h: int, gammas=None) -> FqSubspace:
    """Common kernel of f_i(x) = sum_j gamma_j^i x_j^(q^(r-j)), i = 1..h.

    Dimension n(r-h); (k, (r-1)k)-evasive for every 1 <= k <= h.
    """
    if n < r:
        raise ParamError(f"guruswami needs n >= r (got n={n}, r={r})")
    if not 1 <= h < r:
        raise ParamError(f"guruswami needs 1 <= h < r (got h={h}, r={r})")
    amb = ambient(q, n, r)
    big = amb.big
    if gammas is None:
        gammas = default_gammas(q, n, r)
    gammas = [g.code if hasattr(g, "code") else int(g) for g in gammas]
    if len(gammas) != r or len(set(gammas)) != r or 0 in gammas:
        raise ParamError("gammas must be r distinct nonzero elements")
    N = big.m
    rows = []
    for j in range(r):  # coordinate x_{j+1}, raised to q^(r-1-j)
        for k in range(N):
            x = big.p ** k
            y = _frob_q(amb, x, r - 1 - j)
            img = []
            for i in range(1, h + 1):
                img.extend(big.digits(big.mul(big.pow(gammas[j], i), y)))
            rows.append(img)
    # rows: images of the F_p-basis of V; kernel = left null space
    A = np.array(rows, dtype=np.int64)
    K = kernel_mod_p(A.T, amb.p)
    vecs = _fp_rows_to_vectors(amb, K)
    return FqSubspace(amb, vecs)


def _fp_rows_to_vectors(amb: AmbientSpace, K: np.ndarray) -> list[tuple[int, ...]]:
    """Rows of raw F_p digit vectors (coordinate-major) to vectors of codes."""
    if K.size == 0:
        return []
    N = amb.big.m
    codes = amb.big.batch.codes(K.reshape(K.shape[0], amb.r, N))
    return [tuple(int(x) for x in v) for v in codes]


def direct_sum(U1: FqSubspace, U2: FqSubspace) -> FqSubspace:
    """U1 ⊕ U2 in V(r1 + r2, q^n)."""
    a1, a2 = U1.ambient, U2.ambient
    if (a1.q, a1.n) != (a2.q, a2.n):
        raise AmbientMismatch("direct summands need the same q and n")
    amb = ambient(a1.q, a1.n, a1.r + a2.r)
    vecs = [tuple(v) + (0,) * a2.r for v in U1.basis] + [(0,) * a1.r + tuple(v) for v in U2.basis]
    return FqSubspace(amb, vecs)


def direct_sum_many(parts) -> FqSubspace:
    parts = list(parts)
    if not parts:
        raise ParamError("need at least one summand")
    U = parts[0]
    for P in parts[1:]:
        U = direct_sum(U, P)
    return U


def guruswami_sum(q: int, n: int, r: int, h: int, copies: int, gammas=None) -> FqSubspace:
    return direct_sum_many([guruswami(q, n, r, h, gammas) for _ in range(copies)])


def zero_subspace(q: int, n: int, r: int) -> FqSubspace:
    return FqSubspace(ambient(q, n, r), [])


def whole_space(q: int, n: int, r: int) -> FqSubspace:
    return ambient(q, n, r).whole()


def extend_random(U: FqSubspace, s: int, seed: int = 0) -> FqSubspace:
    """U plus s vectors drawn (PCG64, given seed) outside the growing span."""
    amb = U.ambient
    if s < 0 or U.t + s > amb.dim_q:
        raise ParamError(f"cannot extend a {U.t}-dim subspace by {s} in dimension {amb.dim_q}")
    rng = np.random.default_rng(seed)
    vecs = list(U.basis)
    cur = U
    while cur.t < U.t + s:
        v = tuple(int(x) for x in rng.integers(0, amb.big.order, size=amb.r))
        nxt = FqSubspace(amb, vecs + [v])
        if nxt.t > cur.t:
            vecs.append(v)
            cur = nxt
    return cur


def hyperplane_lift(W: FqSubspace, s: int, k: int | None = None) -> FqSubspace:
    """W ⊕ <z^i e_{r+1} : i < s> in V(r+1, q^n).

    If W is (r-1, k)-evasive of dimension d and d - k <= s <= n, the result is
    (r, k+s)-evasive of dimension d + s.  Pass ``k`` to have the lower limit
    on s checked.
    """
    amb = W.ambient
    if not 0 <= s <= amb.n:
        raise ParamError(f"s={s} must lie in 0..n={amb.n}")
    if k is not None and s < W.t - k:
        raise ParamError(f"s={s} is below d - k = {W.t - k}")
    new = ambient(amb.q, amb.n, amb.r + 1)
    vecs = [tuple(v) + (0,) for v in W.basis]
    vecs += [new.unit_vector(amb.r, z) for z in amb.flatten_basis[:s]]
    return FqSubspace(new, vecs)


def b1(q: int, n: int, r: int, k: int) -> FqSubspace:
    """Gabidulin plus k-r+1 dimensions of the last axis: (r-1, k)-evasive, dim n+k-r+1."""
    if k < r - 1:
        raise ParamError(f"b1 needs k >= r-1 (got k={k}, r={r})")
    if not k < r - 2 + n / (r - 1):
        raise ParamError(f"b1 needs k < r - 2 + n/(r-1) (got k={k})")
    W = gabidulin(q, n, r)
    amb = W.ambient
    extra = [amb.unit_vector(r - 1, z) for z in amb.flatten_basis[:k - r + 1]]
    return FqSubspace(amb, list(W.basis) + extra)


def ex00(q: int, n: int, r: int, k: int, seed: int = 0) -> FqSubspace:
    """(r-1, k)-evasive subspace of dimension n+k-1 for k >= (r-2)(n-1)+1."""
    if r < 2:
        raise ParamError("ex00 needs r >= 2")
    if k < (r - 2) * (n - 1) + 1:
        raise ParamError(f"ex00 needs k >= (r-2)(n-1)+1 = {(r - 2) * (n - 1) + 1}")
    if n + k - 1 > r * n:
        raise ParamError(f"dimension n+k-1 = {n + k - 1} exceeds rn = {r * n}")
    if r == 2:
        if k >= n:
            return whole_space(q, n, 2)
        return b1(q, n, 2, k)
    U = gabidulin(q, n, 2)
    kk = 1
    for _ in range(2, r):
        U = hyperplane_lift(U, n - 1, kk)
        kk += n - 1
    return extend_random(U, k - kk, seed)


# ---------------------------------------------------------------------------
# scattered sources and their duals


def search_scattered(q: int, n: int, r: int, t: int, seed: int = 0, max_restarts: int = 200) -> FqSubspace:
    """Greedy seeded search for a t-dim scattered subspace, each step fiber-verified."""
    from .evasive_check import profile

    amb = ambient(q, n, r)
    rng = np.random.default_rng(seed)
    for _ in range(max_restarts):
        U = FqSubspace(amb, [])
        for _tries in range(200 * t):
            if U.t == t:
                break
            v = tuple(int(x) for x in rng.integers(0, amb.big.order, size=r))
            cand = FqSubspace(amb, list(U.basis) + [v])
            if cand.t > U.t and profile(cand, 1, "fiber", verify=False).k_star == 1:
                U = cand
        if U.t == t:
            return U
    raise NoKnownScattered(f"no {t}-dim scattered subspace found in {amb!r}")


def known_scattered(q: int, n: int, r: int) -> FqSubspace:
    """A scattered subspace of the largest known dimension for small cases.

    r even: sum of r/2 copies of gabidulin(q, n, 2); n = 2: the subgeometry
    F_q^r; (r, n) = (3, 5): the kernel of P_{a,b,c}; r odd and n even: a
    seeded greedy search of dimension rn/2.
    """
    if r % 2 == 0 and n >= 2:
        return direct_sum_many([gabidulin(q, n, 2) for _ in range(r // 2)])
    if n == 2:
        return subgeometry(q, n, r, 1)
    if (r, n) == (3, 5):
        from .scattered35 import scattered_subspace

        return scattered_subspace(q)
    if n % 2 == 0 and r * n <= 24:
        return search_scattered(q, n, r, r * n // 2)
    raise NoKnownScattered(f"no scattered source configured for V({r},{q}^{n})")


def from_scattered_dual(q: int, n: int, r: int) -> FqSubspace:
    """Ordinary dual of a t-dim scattered subspace: (r-1, (r-1)n+1-t)-evasive, dim rn-t."""
    from .duality import ordinary_dual

    return ordinary_dual(known_scattered(q, n, r))

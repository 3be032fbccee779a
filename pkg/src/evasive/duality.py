"""Ordinary (trace-form) duality and Delsarte duality of F_q-subspaces."""

from __future__ import annotations

import numpy as np

from .errors import NotSpanning, ParamError
from .field import trace_code
from .linalg import Mat, kernel_basis, kernel_mod_p, matmul, row_basis
from .subspaces import FqnSubspace, FqSubspace, ambient, expand, fqn_span_dim, intersect


def ordinary_dual(U: FqSubspace) -> FqSubspace:
    """{v : Tr_{q^n/q}(u . v) = 0 for all u in U}; dimension rn - t."""
    amb = U.ambient
    big = amb.big
    if U.t == 0:
        return amb.whole()
    N = big.m
    # image of the F_p-basis vector x^k e_i: (Tr(u_{j,i} x^k))_j, as digits
    rows = []
    for i in range(amb.r):
        for k in range(N):
            x = big.p ** k
            img = []
            for u in U.basis:
                img.extend(big.digits(trace_code(big, big.mul(u[i], x), amb.s, amb.n)))
            rows.append(img)
    K = kernel_mod_p(np.array(rows, dtype=np.int64).T, amb.p)
    if K.size == 0:
        return amb.zero()
    codes = big.batch.codes(K.reshape(K.shape[0], amb.r, N))
    D = FqSubspace(amb, codes.tolist())
    if D.t != amb.dim_q - U.t:
        raise AssertionError("trace form is degenerate")  # pragma: no cover
    return D


def fqn_orthogonal(W: FqnSubspace) -> FqnSubspace:
    """{v : w . v = 0 for all w in W}, an F_{q^n}-subspace of dimension r - dim W."""
    amb = W.ambient
    if W.h == 0:
        return FqnSubspace(amb, [amb.unit_vector(i) for i in range(amb.r)])
    K = kernel_basis(Mat(amb.big, [list(w) for w in W.basis], amb.r))
    return FqnSubspace(amb, K.entries)


def duality_identity_check(U: FqSubspace, R: FqnSubspace) -> tuple[int, int]:
    """Both sides of dim(U^perp ∩ R^perp) - dim(U ∩ R) = rn - t - n*dim(R)."""
    amb = U.ambient
    lhs = intersect(ordinary_dual(U), expand(fqn_orthogonal(R))).t - intersect(U, expand(R)).t
    rhs = amb.dim_q - U.t - amb.n * R.h
    return lhs, rhs


def _check_basis(U: FqSubspace, basis) -> list:
    if basis is None:
        return list(U.basis)
    basis = [tuple(v) for v in basis]
    if len(basis) != U.t or FqSubspace(U.ambient, basis) != U:
        raise ParamError("the given vectors are not an F_q-basis of U")
    return basis


def generator_matrix(U: FqSubspace, basis=None) -> Mat:
    """r x t matrix over F_{q^n} whose columns are an F_q-basis of U (canonical by default)."""
    amb = U.ambient
    basis = _check_basis(U, basis)
    return Mat(amb.big, [[u[i] for u in basis] for i in range(amb.r)], U.t)


def parity_check_matrix(U: FqSubspace, basis=None) -> Mat:
    """(t - r) x t matrix H in RREF with H G^T = 0."""
    G = generator_matrix(U, basis)
    return row_basis(kernel_basis(G)) if U.t > 0 else G


def delsarte_dual(U: FqSubspace, basis=None) -> FqSubspace:
    """F_q-span of the columns of the parity-check matrix, in V(t - r, q^n).

    ``basis`` selects the F_q-basis used for the generator matrix; different
    bases give semilinearly equivalent results.
    """
    amb = U.ambient
    if U.t <= amb.r:
        raise ParamError(f"Delsarte dual needs t > r (got t={U.t}, r={amb.r})")
    if fqn_span_dim(amb, U.basis) < amb.r:
        raise NotSpanning("U does not span V over F_q^n")
    H = parity_check_matrix(U, basis)
    G = generator_matrix(U, basis)
    if any(any(row) for row in matmul(H, G.transpose()).entries):
        raise AssertionError("parity check fails")  # pragma: no cover
    new = ambient(amb.q, amb.n, U.t - amb.r)
    cols = [[H.entries[i][j] for i in range(H.rows)] for j in range(U.t)]
    return FqSubspace(new, cols)

"""Measuring how an F_q-subspace meets the h-dimensional F_{q^n}-subspaces.

Three strategies compute the same number k* = max_W dim_q(U ∩ W):

``full_enum``
    every h-dim W in RREF enumeration order.
``span_enum``
    only spans of vectors of U of F_{q^n}-dimension at most h; a maximising W
    can always be shrunk to <U ∩ W>, so nothing is lost.
``fiber`` (h = 1)
    in the field model each nonzero u determines its line by u^(q^n - 1); the
    fiber sizes are q^j - 1 and k* is the largest j.

The batched kernel behind the first two: for W in RREF with pivot columns P
and non-pivot columns f, v lies in W iff v_f = sum_i W[i,f] v_{P_i} for all f.
Those r - h F_{q^n}-linear forms applied to an F_p-basis of U give a matrix
whose F_p-rank is s * (t - dim_q(U ∩ W)).
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AmbientMismatch, BudgetExceeded, NotSpanning, ParamError, StrategyInapplicable
from .linalg import Mat, batch_rank_mod_p, row_basis
from .subspaces import (
    DEFAULT_BUDGET,
    AmbientSpace,
    FqnSubspace,
    FqSubspace,
    block_matrices,
    count_h_subspaces,
    expand,
    fqn_span_dim,
    intersect,
    pivot_blocks,
)

STRATEGIES = ("full_enum", "span_enum", "fiber")
FIBER_LIMIT = 1 << 22  # largest |U| handled by the fiber strategy in "auto"


def budget_from_env(default: int = DEFAULT_BUDGET) -> int:
    value = os.environ.get("EVASIVE_BUDGET")
    return int(value) if value else default


@dataclass
class EvasivenessCertificate:
    q: int
    n: int
    r: int
    dim: int
    h: int
    k_star: int
    witness: FqnSubspace
    strategy: str
    examined: int
    ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_json(self, timing: bool = True) -> dict:
        """JSON form; ``timing=False`` drops the wall-clock field for reproducible files."""
        out = {
            "q": self.q,
            "n": self.n,
            "r": self.r,
            "dim": self.dim,
            "h": self.h,
            "k_star": self.k_star,
            "witness": self.witness.to_json(),
            "strategy": self.strategy,
            "examined": self.examined,
        }
        if timing:
            out["ms"] = round(self.ms, 3)
        if self.extra:
            out["extra"] = self.extra
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "EvasivenessCertificate":
        return cls(obj["q"], obj["n"], obj["r"], obj["dim"], obj["h"], obj["k_star"],
                   FqnSubspace.from_json(obj["witness"]), obj["strategy"], obj["examined"],
                   obj.get("ms", 0.0), obj.get("extra", {}))


def intersection_dim(U: FqSubspace, W: FqnSubspace) -> int:
    """dim_q(U ∩ W) by exact row-space intersection."""
    if U.ambient != W.ambient:
        raise AmbientMismatch("U and W live in different ambient spaces")
    return intersect(U, expand(W)).t


# ---------------------------------------------------------------------------
# batched kernel


def _max_chunk(T: int, h: int, f: int) -> int:
    return max(1, (1 << 20) // max(1, T * max(h, 1) * max(f, 1)))


def batch_intersection_dims(U: FqSubspace, M: np.ndarray, pivots: Sequence[int]) -> np.ndarray:
    """dim_q(U ∩ rowspace(M_b)) for a stack M of RREF matrices sharing ``pivots``."""
    amb = U.ambient
    M = np.asarray(M, dtype=np.int64)
    B = M.shape[0]
    t = U.t
    free = [c for c in range(amb.r) if c not in set(pivots)]
    if t == 0 or not free:
        return np.full(B, t, dtype=np.int64)
    Ub = U.fp_basis()
    T = Ub.shape[0]
    Bo = amb.big.batch
    piv = list(pivots)
    uP = Ub[:, piv]
    uF = Ub[:, free]
    out = np.empty(B, dtype=np.int64)
    step = _max_chunk(T, len(piv), len(free))
    for lo in range(0, B, step):
        hi = min(lo + step, B)
        Wf = M[lo:hi][:, :, free]
        S = np.zeros((hi - lo, T, len(free)), dtype=np.int64)
        for i in range(len(piv)):
            S = Bo.add(S, Bo.mul(Wf[:, None, i, :], uP[None, :, i, None]))
        phi = Bo.sub(np.broadcast_to(uF[None], S.shape), S)
        D = Bo.digits(phi).reshape(hi - lo, T, -1)
        out[lo:hi] = t - batch_rank_mod_p(D, amb.p) // amb.s
    return out


# ---------------------------------------------------------------------------
# full enumeration


def _full_enum_range(U: FqSubspace, h: int, start: int, stop: int, chunk: int = 1 << 14):
    """(k_max, first global index attaining it, examined) over [start, stop)."""
    amb = U.ambient
    best, best_idx, examined = -1, -1, 0
    offset = 0
    for block in pivot_blocks(amb, h):
        lo = max(start - offset, 0)
        hi = min(stop - offset, block.count)
        for a in range(lo, hi, chunk):
            b = min(a + chunk, hi)
            dims = batch_intersection_dims(U, block_matrices(amb, block, a, b), block.pivots)
            examined += b - a
            j = int(dims.argmax())
            if dims[j] > best:
                best, best_idx = int(dims[j]), offset + a + j
        offset += block.count
        if offset >= stop:
            break
    return best, best_idx, examined


def subspace_at(amb: AmbientSpace, h: int, index: int) -> FqnSubspace:
    """The index-th subspace in enumeration order."""
    offset = 0
    for block in pivot_blocks(amb, h):
        if index < offset + block.count:
            M = block_matrices(amb, block, index - offset, index - offset + 1)[0]
            return FqnSubspace._from_rref(amb, M.tolist())
        offset += block.count
    raise ParamError(f"index {index} beyond the number of {h}-subspaces")


def _full_enum(U: FqSubspace, h: int, budget: int, jobs: int = 1):
    amb = U.ambient
    total = count_h_subspaces(amb, h)
    if total > budget:
        raise BudgetExceeded(f"{total} subspaces of dimension {h} exceed the budget {budget}")
    if jobs <= 1 or total < 4096:
        best, idx, examined = _full_enum_range(U, h, 0, total)
    else:
        bounds = [total * i // jobs for i in range(jobs + 1)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_full_enum_range, [U] * jobs, [h] * jobs, bounds[:-1], bounds[1:]))
        best = max(p[0] for p in parts)
        idx = min(p[1] for p in parts if p[0] == best)
        examined = sum(p[2] for p in parts)
    return best, subspace_at(amb, h, idx), examined


# ---------------------------------------------------------------------------
# spans of U-vectors


def _direction(amb: AmbientSpace, v: Sequence[int]) -> tuple[int, ...]:
    F = amb.big
    for x in v:
        if x:
            inv = F.inv(x)
            return tuple(F.mul(inv, y) for y in v)
    return tuple(v)


def _canonical_span(amb: AmbientSpace, vecs) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(r) for r in row_basis(Mat(amb.big, [list(v) for v in vecs], amb.r)).entries)


def _pad_to_h(amb: AmbientSpace, rows, h: int) -> FqnSubspace:
    """Extend a subspace to dimension h with unit vectors, lowest index first."""
    vecs = [list(r) for r in rows]
    i = 0
    while len(_canonical_span(amb, vecs)) < h:
        cand = vecs + [list(amb.unit_vector(i))]
        if len(_canonical_span(amb, cand)) > len(_canonical_span(amb, vecs)):
            vecs = cand
        i += 1
    return FqnSubspace(amb, vecs)


def _span_enum(U: FqSubspace, h: int, budget: int):
    amb = U.ambient
    elems = U.elements()
    dirs: dict[tuple, None] = {}
    for v in elems.tolist():
        if any(v):
            dirs.setdefault(_direction(amb, v), None)
    directions = list(dirs)
    examined = 0
    best, best_rows = -1, None

    def score(spans: list[tuple]) -> None:
        nonlocal best, best_rows, examined
        groups: dict[tuple, list] = {}
        for sp in spans:
            piv = tuple(next(j for j, x in enumerate(row) if x) for row in sp)
            groups.setdefault(piv, []).append(sp)
        # scan in generation order so the first maximiser wins
        order = {sp: i for i, sp in enumerate(spans)}
        results = {}
        for piv, group in groups.items():
            dims = batch_intersection_dims(U, np.array(group, dtype=np.int64), piv)
            for sp, d in zip(group, dims.tolist()):
                results[sp] = d
        for sp in sorted(results, key=order.__getitem__):
            if results[sp] > best:
                best, best_rows = results[sp], sp
        examined += len(spans)

    level = [(d,) for d in directions]
    level = [_canonical_span(amb, sp) for sp in level]
    for dim in range(1, h + 1):
        if examined + len(level) > budget:
            raise BudgetExceeded(f"span enumeration exceeds the budget {budget}")
        score(level)
        if dim == h:
            break
        nxt: dict[tuple, None] = {}
        for sp in level:
            for d in directions:
                cand = _canonical_span(amb, list(sp) + [d])
                if len(cand) == dim + 1:
                    nxt.setdefault(cand, None)
            if len(nxt) > budget:
                raise BudgetExceeded(f"span enumeration exceeds the budget {budget}")
        level = list(nxt)
        if not level:
            break
    if best_rows is None:
        best, best_rows = 0, ()
    return best, _pad_to_h(amb, best_rows, h), examined


# ---------------------------------------------------------------------------
# fibers of x -> x^(q^n - 1) in the field model


def fiber_counts(U: FqSubspace):
    """(unique directions d, fiber sizes, a representative code per d) in the field model."""
    amb = U.ambient
    model = amb.field_model
    X = model.to_field(U.elements())
    X = X[X != 0]
    D = model.L.batch.pow_pk_minus_one(X, amb.n * amb.s)
    vals, first, counts = np.unique(D, return_index=True, return_counts=True)
    return vals, counts, X[first]


def _fiber(U: FqSubspace, h: int):
    if h != 1:
        raise StrategyInapplicable("the fiber strategy handles h = 1 only")
    amb = U.ambient
    if U.t == 0:
        return 0, _pad_to_h(amb, (), 1), 0
    vals, counts, reps = fiber_counts(U)
    q = amb.q
    j = int(counts.max())
    k = _log_q_plus_one(j, q)
    # witness: the line through the smallest-direction fiber of maximal size
    pick = int(np.nonzero(counts == j)[0][0])
    v = amb.field_model.from_field(np.array([reps[pick]]))[0]
    return k, FqnSubspace(amb, [v.tolist()]), int(vals.size)


def _log_q_plus_one(size: int, q: int) -> int:
    j = round(math.log(size + 1, q))
    if q ** j != size + 1:
        raise ParamError(f"fiber of size {size} is not q^j - 1")
    return j


# ---------------------------------------------------------------------------


def choose_strategy(U: FqSubspace, h: int, budget: int) -> str:
    """Pick the cheapest exact strategy.

    span_enum grows like (number of points of U)^h and runs in Python, so it
    is weighted against the vectorised full enumeration.
    """
    if h == 1 and len(U) <= FIBER_LIMIT:
        return "fiber"
    total = count_h_subspaces(U.ambient, h)
    if total > budget:
        return "span_enum"
    points = (U.ambient.q ** U.t - 1) // (U.ambient.q - 1)
    if total <= 200_000 or total <= 20 * points ** h // math.factorial(h):
        return "full_enum"
    return "span_enum"


def profile(U: FqSubspace, h: int, strategy: str = "auto", budget: int | None = None,
            jobs: int = 1, verify: bool = True) -> EvasivenessCertificate:
    """Maximum of dim_q(U ∩ W) over all h-dimensional F_{q^n}-subspaces W."""
    amb = U.ambient
    if not 0 < h <= amb.r:
        raise ParamError(f"h={h} outside 1..{amb.r}")
    if fqn_span_dim(amb, U.basis) < h:
        raise NotSpanning(f"U spans fewer than {h} dimensions over F_q^n")
    budget = budget_from_env() if budget is None else budget
    if strategy == "auto":
        strategy = choose_strategy(U, h, budget)
    t0 = time.perf_counter()
    if strategy == "full_enum":
        k, W, examined = _full_enum(U, h, budget, jobs)
    elif strategy == "span_enum":
        k, W, examined = _span_enum(U, h, budget)
    elif strategy == "fiber":
        k, W, examined = _fiber(U, h)
    else:
        raise StrategyInapplicable(f"unknown strategy {strategy!r}")
    ms = (time.perf_counter() - t0) * 1000.0
    if verify and intersection_dim(U, W) != k:
        raise AssertionError("witness does not reproduce the measured intersection")  # pragma: no cover
    return EvasivenessCertificate(amb.q, amb.n, amb.r, U.t, h, k, W, strategy, examined, ms)


def is_evasive(U: FqSubspace, h: int, k: int, **kw) -> tuple[bool, EvasivenessCertificate]:
    cert = profile(U, h, **kw)
    return cert.k_star <= k, cert


def verify_certificate(U: FqSubspace, cert: EvasivenessCertificate) -> bool:
    return intersection_dim(U, cert.witness) == cert.k_star


def sampled_profile(U: FqSubspace, h: int, samples: int, seed: int = 0) -> dict:
    """Max of dim_q(U ∩ W) over uniformly sampled h-subspaces W (a lower bound on k*)."""
    amb = U.ambient
    rng = np.random.default_rng(seed)
    blocks = pivot_blocks(amb, h)
    total = count_h_subspaces(amb, h)
    idx = np.sort(rng.integers(0, total, size=samples, dtype=np.int64))
    offsets = np.cumsum([0] + [b.count for b in blocks])
    hist: dict[int, int] = {}
    best, best_idx = -1, -1
    for bi, block in enumerate(blocks):
        sel = idx[(idx >= offsets[bi]) & (idx < offsets[bi + 1])]
        for lo in range(0, sel.size, 1 << 14):
            part = sel[lo:lo + (1 << 14)]
            dims = batch_intersection_dims(U, block_matrices(amb, block, part - offsets[bi]), block.pivots)
            for d, c in zip(*np.unique(dims, return_counts=True)):
                hist[int(d)] = hist.get(int(d), 0) + int(c)
            j = int(dims.argmax())
            if dims[j] > best:
                best, best_idx = int(dims[j]), int(part[j])
    return {"h": h, "samples": samples, "seed": seed, "max_observed": best,
            "histogram": dict(sorted(hist.items())),
            "witness": subspace_at(amb, h, best_idx).to_json()}


def q_system_params(U: FqSubspace, **kw) -> tuple[int, int, int]:
    """(m, r, d) with d = m - max dim_q(U ∩ H) over F_{q^n}-hyperplanes H."""
    amb = U.ambient
    if fqn_span_dim(amb, U.basis) < amb.r:
        raise NotSpanning("U does not span V over F_q^n")
    if amb.r == 1:
        return U.t, 1, U.t
    cert = profile(U, amb.r - 1, **kw)
    return U.t, amb.r, U.t - cert.k_star

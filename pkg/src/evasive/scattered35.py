"""Scattered subspaces of dimension 7 in V(3, q^5), modelled inside F_{q^15}.

For a, b in F_{q^15}, R(x) = R_{a,b}(x) is the q-polynomial whose kernel is
<a, b>_{F_{q^3}} (F_q-dimension 6); for x̄ outside that kernel and c = R(x̄),
P(x) = c R(x)^q - c^q R(x) has q-degree 7 and kernel <ker R, x̄>_{F_q}.

Scatteredness of ker P is certified two ways:

* ``fiber_check``: x -> x^(q^5 - 1) is constant exactly on the punctured
  F_{q^5}-lines, so U is scattered iff every fiber has q - 1 elements;
* ``d_sweep``: for every d with d^(1 + q^5 + q^10) = 1 the 12x12 and 10x10
  matrices built from the coefficients of P must not both be singular.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BudgetExceeded,
    DependentPair,
    NotPrimitive,
    NotSubspace,
    ParamError,
    RecipeFailed,
    XbarInKernel,
)
from .field import GF, FieldElement, FieldSpec, preset, prime_power, subfield_map
from .linalg import det_codes, kernel_mod_p
from .subspaces import FqSubspace, ambient, fq_basis_in_field

# exponents e with lambda = xi^e, xi the root of the preset degree-15 modulus
TABLE1: dict[tuple[int, int], int] = {
    (2, 1): 31369, (2, 2): 14336, (2, 4): 184, (2, 7): 136,
    (2, 8): 4102, (2, 11): 16767, (2, 13): 28172, (2, 14): 11248,
    (3, 1): 11227515, (3, 2): 10565258, (3, 4): 5832991, (3, 7): 12725576,
    (3, 8): 11963627, (3, 11): 11963627, (3, 13): 13348604, (3, 14): 13348604,
    (5, 1): 24079949306,
}

RECIPES = ("paper", "frobenius", "prime")


def big_field(p: int, s: int) -> FieldSpec:
    """F_{q^15} for q = p^s: the preset for s = 1, first irreducible otherwise."""
    return preset(p) if s == 1 else GF(p, 15 * s)


# ---------------------------------------------------------------------------


class QPoly:
    """sum_i alphas[i] x^(q^i) over a field L containing F_q."""

    def __init__(self, L: FieldSpec, q: int, alphas: Sequence):
        self.L = L
        self.q = q
        p, self.s = prime_power(q)
        if p != L.p or L.m % self.s:
            raise ParamError(f"GF({q}) is not a subfield of {L!r}")
        self.alphas = [a.code if isinstance(a, FieldElement) else int(a) for a in alphas]

    @property
    def degree(self) -> int:
        d = len(self.alphas) - 1
        while d > 0 and self.alphas[d] == 0:
            d -= 1
        return d

    def __call__(self, x):
        code = x.code if isinstance(x, FieldElement) else int(x)
        out = self.eval_code(code)
        return FieldElement(self.L, out) if isinstance(x, FieldElement) else out

    def eval_code(self, x: int) -> int:
        L = self.L
        acc = 0
        y = x
        for a in self.alphas:
            if a:
                acc = L.add(acc, L.mul(a, y))
            y = L.frob(y, self.s)
        return acc

    def eval_batch(self, X: np.ndarray) -> np.ndarray:
        B = self.L.batch
        X = np.asarray(X, dtype=np.int64)
        acc = np.zeros_like(X)
        y = X
        for a in self.alphas:
            if a:
                acc = B.add(acc, B.mulconst(y, a))
            y = B.frob(y, self.s)
        return acc

    def fp_matrix(self) -> np.ndarray:
        """Matrix over F_p acting on digit row vectors."""
        L = self.L
        return np.array([L.digits(self.eval_code(L.p ** k)) for k in range(L.m)], dtype=np.int64)

    def kernel_fp(self) -> list[int]:
        K = kernel_mod_p(self.fp_matrix().T, self.L.p)
        return [int(c) for c in self.L.batch.codes(K)] if K.size else []

    def kernel_basis(self) -> list[int]:
        """An F_q-basis (codes) of the kernel, in canonical order."""
        return fq_basis_in_field(self.L, self.q, self.kernel_fp())

    def kernel_dim(self) -> int:
        return len(self.kernel_fp()) // self.s


def _fr(L: FieldSpec, s: int, x: int, i: int) -> int:
    return L.frob(x, s * i)


def _code(x) -> int:
    return x.code if isinstance(x, FieldElement) else int(x)


def build_R(a, b, q: int) -> QPoly:
    """x^(q^6)(a b^(q^3) - a^(q^3) b) + x^(q^3)(a^(q^6) b - a b^(q^6)) + x(a^(q^3) b^(q^6) - a^(q^6) b^(q^3))."""
    L = a.field
    s = prime_power(q)[1]
    a, b = _code(a), _code(b)
    f = lambda x, i: _fr(L, s, x, i)  # noqa: E731
    mul, sub = L.mul, L.sub
    if mul(f(a, 3), b) == mul(a, f(b, 3)):
        raise DependentPair("a^(q^3) b = a b^(q^3)")
    c6 = sub(mul(a, f(b, 3)), mul(f(a, 3), b))
    c3 = sub(mul(f(a, 6), b), mul(a, f(b, 6)))
    c0 = sub(mul(f(a, 3), f(b, 6)), mul(f(a, 6), f(b, 3)))
    alphas = [0] * 7
    alphas[0], alphas[3], alphas[6] = c0, c3, c6
    return QPoly(L, q, alphas)


def alphas_explicit(a, b, c, q: int) -> list[int]:
    """The eight coefficients of c R^q - c^q R written out term by term."""
    L = a.field
    s = prime_power(q)[1]
    a, b, c = _code(a), _code(b), _code(c)
    f = lambda x, i: _fr(L, s, x, i)  # noqa: E731
    mul, sub, neg = L.mul, L.sub, L.neg
    cq = f(c, 1)
    return [
        neg(mul(cq, sub(mul(f(a, 3), f(b, 6)), mul(f(a, 6), f(b, 3))))),
        mul(c, sub(mul(f(a, 4), f(b, 7)), mul(f(a, 7), f(b, 4)))),
        0,
        neg(mul(cq, sub(mul(f(a, 6), b), mul(a, f(b, 6))))),
        mul(c, sub(mul(f(a, 7), f(b, 1)), mul(f(a, 1), f(b, 7)))),
        0,
        neg(mul(cq, sub(mul(a, f(b, 3)), mul(f(a, 3), b)))),
        mul(c, sub(mul(f(a, 1), f(b, 4)), mul(f(a, 4), f(b, 1)))),
    ]


def build_P(a, b, xbar, q: int) -> tuple[QPoly, FieldElement]:
    """P = c R^q - c^q R with c = R(xbar); returns (P, c)."""
    R = build_R(a, b, q)
    L = R.L
    s = R.s
    c = R.eval_code(_code(xbar))
    if c == 0:
        raise XbarInKernel("xbar lies in ker R")
    cq = L.frob(c, s)
    alphas = [0] * 8
    for i, coef in enumerate(R.alphas):
        if coef:
            alphas[i + 1] = L.add(alphas[i + 1], L.mul(c, L.frob(coef, s)))
            alphas[i] = L.sub(alphas[i], L.mul(cq, coef))
    return QPoly(L, q, alphas), FieldElement(L, c)


# ---------------------------------------------------------------------------
# the two matrices


def _pattern(alphas: Sequence[int]) -> list[int]:
    a = list(alphas)
    if len(a) != 8:
        raise ParamError("expected eight coefficients alpha_0..alpha_7")
    return [a[7], a[6], 0, a[4], a[3], 0, a[1], a[0], 0]


def _m1_rows(L, s, alphas, dvals):
    # 5 coefficient rows; row 5+j carries 1 at column j and -d^(q^(6-j)) at column j+5
    pat = _pattern(alphas)
    M = [[0] * 12 for _ in range(12)]
    for i in range(5):
        for k, x in enumerate(pat):
            if i + k < 12 and x:
                M[i][i + k] = L.frob(x, s * (4 - i))
    for j in range(7):
        M[5 + j][j] = 1
        M[5 + j][j + 5] = dvals[6 - j]
    return M


def _m2_rows(L, s, alphas, dvals):
    # 4 coefficient rows; row 4+j carries 1 at column j and -d^(q^(5-j)) at column j+5
    pat = _pattern(alphas)
    M = [[0] * 10 for _ in range(10)]
    for i in range(4):
        for k, x in enumerate(pat):
            if i + k < 10 and x:
                M[i][i + k] = L.frob(x, s * (3 - i))
    for j in range(6):
        M[4 + j][j] = 1
        if j + 5 < 10:
            M[4 + j][j + 5] = dvals[5 - j]
    return M


def subres_matrices(alphas: Sequence, d, q: int, L: FieldSpec | None = None):
    """The 12x12 and 10x10 matrices for a given d, as Mat objects."""
    from .linalg import Mat

    if L is None:
        L = d.field
    s = prime_power(q)[1]
    dc = _code(d)
    if dc == 0:
        raise ParamError("d must be nonzero")
    alphas = [_code(a) for a in alphas]
    dvals = {j: L.neg(L.frob(dc, s * j)) for j in range(7)}
    return Mat(L, _m1_rows(L, s, alphas, dvals), 12), Mat(L, _m2_rows(L, s, alphas, dvals), 10)


def _multilinear_coefficients(L: FieldSpec, builder, nvars: int) -> dict[int, int]:
    """Coefficients c_S (bit i of S <-> variable D_i) of det as a polynomial in
    D_i, where the matrix entry is -D_i; obtained by Moebius inversion over
    0/1 substitutions."""
    one_neg = L.neg(1)
    vals = {}
    for mask in range(1 << nvars):
        dv = {j: (one_neg if mask >> j & 1 else 0) for j in range(nvars)}
        vals[mask] = det_codes(L, builder(dv))
    coef = {}
    for S in range(1 << nvars):
        acc = 0
        T = S
        while True:
            sign = bin(S ^ T).count("1") & 1
            acc = L.sub(acc, vals[T]) if sign else L.add(acc, vals[T])
            if T == 0:
                break
            T = (T - 1) & S
        if acc:
            coef[S] = acc
    return coef


def det_polynomials(alphas: Sequence, q: int, L: FieldSpec) -> tuple[dict[int, int], dict[int, int]]:
    """(coefficients of det M1 in D_0..D_6, coefficients of det M2 in D_0..D_5)."""
    s = prime_power(q)[1]
    alphas = [_code(a) for a in alphas]
    c1 = _multilinear_coefficients(L, lambda dv: _m1_rows(L, s, alphas, dv), 7)
    c2 = _multilinear_coefficients(L, lambda dv: _m2_rows(L, s, alphas, dv), 6)
    return c1, c2


def eval_multilinear(L: FieldSpec, coef: dict[int, int], D: dict[int, np.ndarray], shape) -> np.ndarray:
    """sum_S c_S prod_{i in S} D_i on arrays."""
    B = L.batch
    out = np.zeros(shape, dtype=np.int64)
    for S, c in coef.items():
        term = None
        for i in range(7):
            if S >> i & 1:
                term = D[i] if term is None else B.mul(term, D[i])
        if term is None:
            out = B.add(out, np.full(shape, c, dtype=np.int64))
        else:
            out = B.add(out, B.mulconst(term, c))
    return out


def admissible_generator(L: FieldSpec, q: int, g: int | None = None) -> tuple[int, int]:
    """(gamma, N): gamma = g^(q^5 - 1) generates the N = q^10 + q^5 + 1 admissible d."""
    if g is None:
        g = L.gen.code if L.gen_is_primitive() else L.primitive_element_code()
    elif L.order_of(g) != L.order - 1:
        raise NotPrimitive("g is not a primitive element")
    return L.pow(g, q ** 5 - 1), q ** 10 + q ** 5 + 1


def power_range(L: FieldSpec, gamma: int, lo: int, hi: int, block: int = 1 << 15) -> Iterable[tuple[int, np.ndarray]]:
    """Yield (start, gamma^start .. gamma^(end-1)) in blocks."""
    B = L.batch
    base = np.empty(min(block, max(hi - lo, 1)), dtype=np.int64)
    base[0] = 1
    filled = 1
    while filled < base.size:
        step = min(filled, base.size - filled)
        base[filled:filled + step] = B.mulconst(base[:step], L.pow(gamma, filled))
        filled += step
    for start in range(lo, hi, base.size):
        n = min(base.size, hi - start)
        yield start, B.mulconst(base[:n], L.pow(gamma, start))


@dataclass
class SweepResult:
    scattered: bool
    bad_d: list[int]
    m2_zero: list[int]
    N: int
    method: str
    ms: float = 0.0

    def to_json(self) -> dict:
        return {"scattered": self.scattered, "bad_d": self.bad_d, "m2_zero": self.m2_zero,
                "N": self.N, "method": self.method, "ms": round(self.ms, 3)}


def _sweep_range(args):
    L, q, alphas, gamma, lo, hi, method = args
    s = prime_power(q)[1]
    B = L.batch
    zeros2: list[int] = []
    bad: list[int] = []
    if method == "closed":
        c1, c2 = det_polynomials(alphas, q, L)
        for start, d in power_range(L, gamma, lo, hi):
            D = {i: B.frob(d, s * i) for i in range(6)}
            v = eval_multilinear(L, c2, D, d.shape)
            for dz in d[v == 0].tolist():
                zeros2.append(dz)
    else:
        for start, d in power_range(L, gamma, lo, hi):
            for dc in d.tolist():
                dvals = {j: L.neg(L.frob(dc, s * j)) for j in range(7)}
                if det_codes(L, _m2_rows(L, s, alphas, dvals)) == 0:
                    zeros2.append(dc)
    for dc in zeros2:
        dvals = {j: L.neg(L.frob(dc, s * j)) for j in range(7)}
        if det_codes(L, _m1_rows(L, s, alphas, dvals)) == 0:
            bad.append(dc)
    return zeros2, bad


def d_sweep(alphas: Sequence, q: int, L: FieldSpec, method: str = "closed", jobs: int = 1,
            g: int | None = None, budget: int | None = None) -> SweepResult:
    """Check both matrices at every admissible d = gamma^j, j < q^10 + q^5 + 1."""
    alphas = [_code(a) for a in alphas]
    gamma, N = admissible_generator(L, q, g)
    if budget is not None and N > budget:
        raise BudgetExceeded(f"{N} admissible d exceed the budget {budget}")
    L.batch.ensure_tables()
    t0 = time.perf_counter()
    if jobs <= 1:
        zeros2, bad = _sweep_range((L, q, alphas, gamma, 0, N, method))
    else:
        bounds = [N * i // jobs for i in range(jobs + 1)]
        args = [(L, q, alphas, gamma, bounds[i], bounds[i + 1], method) for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_sweep_range, args))
        zeros2 = [z for part in parts for z in part[0]]
        bad = [z for part in parts for z in part[1]]
    ms = (time.perf_counter() - t0) * 1000.0
    return SweepResult(not bad, sorted(bad), sorted(zeros2), N, method, ms)


# ---------------------------------------------------------------------------
# fibers


def projective_points(L: FieldSpec, q: int, basis: Sequence[int]) -> np.ndarray:
    """One representative per F_q-line of the span of ``basis`` (leading coefficient 1)."""
    from .subspaces import fq_span_codes

    basis = [_code(b) for b in basis]
    out = []
    B = L.batch
    for i, u in enumerate(basis):
        tail = fq_span_codes(L, q, basis[i + 1:]) if i + 1 < len(basis) else np.zeros(1, dtype=np.int64)
        out.append(B.add(tail, np.int64(u)))
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


@dataclass
class FiberReport:
    max_j: int
    offending: list[int]
    points: int
    sizes: dict[int, int] = field(default_factory=dict)

    @property
    def scattered(self) -> bool:
        return self.max_j <= 1

    def to_json(self) -> dict:
        return {"max_j": self.max_j, "scattered": self.scattered, "points": self.points,
                "offending": self.offending[:20], "fiber_sizes": self.sizes}


def _proj_fiber_j(count: int, q: int) -> int:
    j, tot = 1, 1
    while tot < count:
        tot = tot * q + 1
        j += 1
    if tot != count:
        raise NotSubspace(f"projective fiber of size {count} is not (q^j-1)/(q-1)")
    return j


def fiber_check_basis(L: FieldSpec, q: int, basis: Sequence, n: int = 5) -> FiberReport:
    """Fibers of x -> x^(q^n - 1) on the F_q-span of ``basis`` (counted on projective points)."""
    s = prime_power(q)[1]
    pts = projective_points(L, q, basis)
    if pts.size == 0:
        return FiberReport(0, [], 0)
    D = L.batch.pow_pk_minus_one(pts, n * s)
    vals, counts = np.unique(D, return_counts=True)
    jmax = _proj_fiber_j(int(counts.max()), q)
    sizes: dict[int, int] = {}
    for c, k in zip(*np.unique(counts, return_counts=True)):
        sizes[_proj_fiber_j(int(c), q)] = int(k)
    offending = [int(v) for v in vals[counts > 1]]
    return FiberReport(jmax, offending, int(pts.size), sizes)


def fiber_check(elements: Sequence, q: int, n: int = 5, L: FieldSpec | None = None,
                spot_checks: int = 200, seed: int = 0) -> tuple[int, list[int]]:
    """(max j, offending d) for U given as its full element set.

    The set must be closed under addition (spot-checked) and have q^t elements.
    """
    codes = np.array(sorted({_code(e) for e in elements}), dtype=np.int64)
    if L is None:
        first = next(iter(elements))
        L = first.field
    t = 0
    while q ** t < codes.size:
        t += 1
    if q ** t != codes.size or 0 not in set(codes[:1].tolist()):
        raise NotSubspace("size is not a power of q or 0 is missing")
    rng = np.random.default_rng(seed)
    members = set(codes.tolist())
    for _ in range(spot_checks):
        x, y = rng.choice(codes, 2)
        if L.add(int(x), int(y)) not in members:
            raise NotSubspace("set is not closed under addition")
    s = prime_power(q)[1]
    X = codes[codes != 0]
    if X.size == 0:
        return 0, []
    D = L.batch.pow_pk_minus_one(X, n * s)
    vals, counts = np.unique(D, return_counts=True)
    size = int(counts.max())
    j = 0
    while q ** j - 1 < size:
        j += 1
    if q ** j - 1 != size:
        raise NotSubspace(f"fiber of size {size} is not q^j - 1")
    return j, [int(v) for v in vals[counts > q - 1]]


# ---------------------------------------------------------------------------
# recipes, tabulated lambdas, search


def recipe_pair(name: str, lam: int, L: FieldSpec, q: int) -> tuple[int, int]:
    p, s = prime_power(q)
    if name == "paper":
        return L.pow(lam, 2), L.pow(lam, 4)
    if name == "frobenius":
        return L.frob(lam, s), L.frob(lam, 2 * s)
    if name == "prime":
        return L.frob(lam, 1), L.frob(lam, 2)
    raise ParamError(f"unknown recipe {name!r}")


@dataclass
class Instance:
    p: int
    s: int
    q: int
    lam_exponent: int | None
    recipe: str
    a: int
    b: int
    xbar: int
    c: int
    alphas: list[int]
    kernel: list[int]
    fiber: FiberReport
    L: FieldSpec

    @property
    def dim(self) -> int:
        return len(self.kernel)

    @property
    def scattered(self) -> bool:
        return self.fiber.scattered and self.dim == 7

    def to_json(self) -> dict:
        L = self.L
        return {
            "p": self.p, "s": self.s, "q": self.q, "lambda_exponent": self.lam_exponent,
            "recipe": self.recipe, "field": L.to_json(),
            "a": L.digits(self.a), "b": L.digits(self.b), "xbar": L.digits(self.xbar),
            "c": L.digits(self.c), "alphas": [L.digits(x) for x in self.alphas],
            "kernel_basis": [L.digits(x) for x in self.kernel],
            "dim": self.dim, "k_star": self.fiber.max_j, "scattered": self.scattered,
            "fiber": self.fiber.to_json(),
        }

    def subspace(self) -> FqSubspace:
        """The kernel as an F_q-subspace of V(3, q^5) through the field model."""
        amb = ambient(self.q, 5, 3)
        model = amb.field_model
        if model.L != self.L:
            raise ParamError("field model differs from the field of the instance")
        return model.subspace_from_field(self.kernel)


def build_instance(p: int, s: int, lam: int, recipe: str, lam_exponent: int | None = None,
                   L: FieldSpec | None = None, max_points: int = 5_000_000) -> Instance:
    q = p ** s
    L = big_field(p, s) if L is None else L
    a, b = recipe_pair(recipe, lam, L, q)
    P, c = build_P(FieldElement(L, a), FieldElement(L, b), FieldElement(L, lam), q)
    kernel = P.kernel_basis()
    npts = (q ** len(kernel) - 1) // (q - 1)
    if npts > max_points:
        raise BudgetExceeded(f"{npts} projective points exceed the budget {max_points}")
    fib = fiber_check_basis(L, q, kernel)
    return Instance(p, s, q, lam_exponent, recipe, a, b, lam, c.code, P.alphas, kernel, fib, L)


def lambda_for(p: int, s: int, exponent: int) -> tuple[FieldSpec, int]:
    """xi^exponent in F_{p^15}, embedded into F_{q^15} when s > 1."""
    F = preset(p)
    if not F.gen_is_primitive():
        raise NotPrimitive(f"the canonical generator of {F!r} is not primitive")
    lam = F.pow(F.gen.code, exponent)
    L = big_field(p, s)
    if s > 1:
        lam = subfield_map(F, L).embed_code(lam)
    return L, lam


def reproduce_table1(p: int, s: int, recipes: Sequence[str] = RECIPES,
                     max_points: int = 5_000_000) -> Instance:
    """Verify the tabulated lambda for (p, s): kernel of dimension 7, fiber-scattered."""
    if (p, s) not in TABLE1:
        raise ParamError(f"(p, s) = ({p}, {s}) is not tabulated")
    e = TABLE1[(p, s)]
    L, lam = lambda_for(p, s, e)
    tried = []
    for name in recipes:
        try:
            inst = build_instance(p, s, lam, name, e, L, max_points)
        except (DependentPair, XbarInKernel) as exc:
            tried.append(f"{name}: {exc}")
            continue
        if inst.scattered:
            return inst
        tried.append(f"{name}: dim {inst.dim}, max fiber j = {inst.fiber.max_j}")
    raise RecipeFailed(f"no recipe gives a scattered kernel for (p, s) = ({p}, {s}): " + "; ".join(tried))


def _try_lambda(p: int, s: int, e: int, recipes: Sequence[str], L: FieldSpec, emb) -> Instance | None:
    F = preset(p)
    lam = F.pow(F.gen.code, e)
    if emb is not None:
        lam = emb.embed_code(lam)
    for name in recipes:
        try:
            inst = build_instance(p, s, lam, name, e, L)
        except (DependentPair, XbarInKernel):
            continue
        if inst.scattered:
            return inst
    return None


def _search_chunk(args) -> list[Instance]:
    p, s, exps, recipes = args
    L = big_field(p, s)
    emb = subfield_map(preset(p), L) if s > 1 else None
    out = []
    for e in exps:
        inst = _try_lambda(p, s, e, recipes, L, emb)
        if inst is not None:
            out.append(inst)
    return out


def search(p: int, s: int = 1, start: int = 1, budget: int = 10_000, recipe: str = "paper",
           max_hits: int = 1, candidates: Iterable[int] | None = None, jobs: int = 1,
           chunk: int = 64) -> list[Instance]:
    """Scan lambda = xi^e for e = start, start+1, ... (or the given exponents).

    ``recipe="auto"`` tries every recipe in order for each lambda.  With
    ``jobs > 1`` the stream is processed in rounds of ``jobs`` chunks; hits are
    sorted by position in the stream, so the result does not depend on ``jobs``.
    """
    recipes = RECIPES if recipe == "auto" else (recipe,)
    for name in recipes:
        if name not in RECIPES:
            raise ParamError(f"unknown recipe {name!r}")
    stream = iter(candidates) if candidates is not None else itertools.count(start)
    exps = list(itertools.islice(stream, budget))
    hits: list[Instance] = []
    if jobs <= 1:
        L = big_field(p, s)
        emb = subfield_map(preset(p), L) if s > 1 else None
        for e in exps:
            inst = _try_lambda(p, s, e, recipes, L, emb)
            if inst is not None:
                hits.append(inst)
                if len(hits) >= max_hits:
                    break
    else:
        pos = {e: i for i, e in enumerate(exps)}
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for lo in range(0, len(exps), jobs * chunk):
                parts = [exps[i:i + chunk] for i in range(lo, min(lo + jobs * chunk, len(exps)), chunk)]
                for part in ex.map(_search_chunk, [(p, s, part, recipes) for part in parts]):
                    hits.extend(part)
                if len(hits) >= max_hits:
                    break
        hits.sort(key=lambda inst: pos[inst.lam_exponent])
        hits = hits[:max_hits]
    if not hits:
        raise BudgetExceeded(f"no scattered kernel among {len(exps)} candidates")
    return hits


def scattered_subspace(q: int) -> FqSubspace:
    """A 7-dim scattered subspace of V(3, q^5) from the tabulated lambda."""
    p, s = prime_power(q)
    return reproduce_table1(p, s).subspace()


# ---------------------------------------------------------------------------
# random 7-dimensional subspaces


def _proj_coefficients(q: int, t: int) -> np.ndarray:
    """All vectors of F_q^t (q prime) with leading nonzero entry 1."""
    rows = []
    for i in range(t):
        tail = np.array(list(itertools.product(range(q), repeat=t - i - 1)), dtype=np.int64)
        tail = tail.reshape(q ** (t - i - 1), t - i - 1)
        block = np.zeros((tail.shape[0], t), dtype=np.int64)
        block[:, i] = 1
        block[:, i + 1:] = tail
        rows.append(block)
    return np.concatenate(rows)


def random_scan(q: int, samples: int, seed: int = 0, t: int = 7, chunk: int = 2048) -> dict:
    """Fraction of uniformly random t-dim F_q-subspaces of F_{q^15} that are scattered."""
    from scipy.stats import binomtest

    if q not in (2, 3):
        raise ParamError("random_scan supports q in {2, 3}")
    L = preset(q)
    L.batch.ensure_tables()
    rng = np.random.default_rng(seed)
    C = _proj_coefficients(q, t)
    hits = 0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        G = rng.integers(0, q, size=(n, t, 15))
        # keep full-rank draws only; redraw the rest
        from .linalg import batch_rank_mod_p

        bad = batch_rank_mod_p(G, q) < t
        while bad.any():
            G[bad] = rng.integers(0, q, size=(int(bad.sum()), t, 15))
            bad = batch_rank_mod_p(G, q) < t
        X = np.einsum("pi,bij->bpj", C, G) % q
        codes = L.batch.codes(X)
        D = L.batch.pow_pk_minus_one(codes, 5)
        D.sort(axis=1)
        hits += int((np.diff(D, axis=1) != 0).all(axis=1).sum())
        done += n
    ci = binomtest(hits, samples).proportion_ci(confidence_level=0.95)
    return {"q": q, "samples": samples, "seed": seed, "scattered": hits,
            "fraction": hits / samples, "ci95": [float(ci.low), float(ci.high)]}

"""Exact arithmetic in finite fields GF(p^m).

Elements are integer codes: the coefficient vector (c_0, ..., c_{m-1}) of
c_0 + c_1 x + ... + c_{m-1} x^{m-1} modulo the defining polynomial is packed
as sum(c_i * p**i).  For p = 2 this is the usual bit-packed representation.
Hot paths work on plain ints through the bound methods of :class:`FieldSpec`
(``F.add``, ``F.mul``, ...); :class:`FieldElement` wraps a code for the public
operator-overloaded API.  Vectorised arithmetic on numpy code arrays lives in
:class:`BatchOps` (``F.batch``).
"""

from __future__ import annotations

import itertools

import functools
import random
from typing import Iterable, Sequence

import numpy as np
import sympy

from .errors import (
    DivisionByZero,
    ParamError,
    SpecMismatch,
    ZeroElement,
    ZeroPolynomial,
)

# python-list exp/log tables are built eagerly below this order
LOG_TABLE_LIMIT = 1 << 17
# numpy exp/log tables are built on first batch use below this order ...
NP_TABLE_AUTO = 1 << 20
# ... and on explicit request (sweeps) below this one
NP_TABLE_LIMIT = 1 << 24
# full addition table for odd characteristic
ADD_TABLE_LIMIT = 729


def _modulus_from_terms(degree: int, terms: dict[int, int]) -> tuple[int, ...]:
    coeffs = [0] * (degree + 1)
    for k, c in terms.items():
        coeffs[k] = c
    return tuple(coeffs)


# Degree-15 moduli used for F_{p^15}, ascending coefficient order.
PRESET_MODULI: dict[int, tuple[int, ...]] = {
    2: _modulus_from_terms(15, {15: 1, 5: 1, 4: 1, 2: 1, 0: 1}),
    3: _modulus_from_terms(15, {15: 1, 8: 2, 5: 1, 2: 2, 1: 1, 0: 1}),
    5: _modulus_from_terms(15, {15: 1, 5: 2, 3: 3, 2: 3, 1: 4, 0: 3}),
}


@functools.lru_cache(maxsize=None)
def factor_order(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of a group order p^m - 1, as sorted (prime, exp)."""
    return tuple(sorted(sympy.factorint(n).items()))


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, s) with q = p**s, or raise ParamError."""
    if q < 2:
        raise ParamError(f"{q} is not a prime power")
    f = sympy.factorint(q)
    if len(f) != 1:
        raise ParamError(f"{q} is not a prime power")
    (p, s), = f.items()
    return int(p), int(s)


# ---------------------------------------------------------------------------
# polynomials over a field: lists of codes, ascending, no trailing zeros


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_add(F: "FieldSpec", a: Sequence[int], b: Sequence[int]) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    add = F.add
    for i, c in enumerate(b):
        out[i] = add(out[i], c)
    return _trim(out)


def poly_sub(F: "FieldSpec", a: Sequence[int], b: Sequence[int]) -> list[int]:
    return poly_add(F, a, [F.neg(c) for c in b])


def poly_mul(F: "FieldSpec", a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    add, mul = F.add, F.mul
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = add(out[i + j], mul(x, y))
    return _trim(out)


def poly_divmod(F: "FieldSpec", a: Sequence[int], f: Sequence[int]) -> tuple[list[int], list[int]]:
    f = _trim(list(f))
    if not f:
        raise ZeroPolynomial("division by the zero polynomial")
    a = list(a)
    df = len(f) - 1
    inv_lead = F.inv(f[-1])
    terms = [(j, c) for j, c in enumerate(f[:-1]) if c]
    quot = [0] * max(len(a) - df, 0)
    sub, mul = F.sub, F.mul
    for k in range(len(a) - 1, df - 1, -1):
        c = a[k]
        if c:
            c = mul(c, inv_lead)
            quot[k - df] = c
            a[k] = 0
            base = k - df
            for j, fj in terms:
                a[base + j] = sub(a[base + j], mul(c, fj))
    return _trim(quot), _trim(a[:df])


def poly_mod(F: "FieldSpec", a: Sequence[int], f: Sequence[int]) -> list[int]:
    return poly_divmod(F, a, f)[1]


def poly_monic(F: "FieldSpec", a: Sequence[int]) -> list[int]:
    a = _trim(list(a))
    if not a:
        return a
    inv = F.inv(a[-1])
    return [F.mul(c, inv) for c in a]


def poly_gcd(F: "FieldSpec", a: Sequence[int], b: Sequence[int]) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, poly_mod(F, a, b)
    return poly_monic(F, a)


def poly_eval(F: "FieldSpec", a: Sequence[int], x: int) -> int:
    acc = 0
    add, mul = F.add, F.mul
    for c in reversed(a):
        acc = add(mul(acc, x), c)
    return acc


def poly_frob_mod(F: "FieldSpec", h: Sequence[int], f: Sequence[int]) -> list[int]:
    """h(x)^p mod f, using (sum h_i x^i)^p = sum h_i^p x^{ip}."""
    if not h:
        return []
    p = F.p
    g = [0] * (p * (len(h) - 1) + 1)
    frob = F.frob
    for i, c in enumerate(h):
        if c:
            g[i * p] = frob(c, 1)
    return poly_mod(F, g, f)


def is_irreducible(p: int, modulus: Sequence[int]) -> bool:
    """Rabin's test for a monic polynomial over GF(p).

    f of degree m is irreducible iff x^(p^m) = x mod f and
    gcd(x^(p^(m/l)) - x, f) = 1 for every prime l dividing m.
    """
    f = [int(c) % p for c in modulus]
    _trim(f)
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    if f[0] == 0:
        return False
    Fp = GF(p)
    x = [0, 1]
    h = x
    frob_powers = {}
    for k in range(1, m + 1):
        h = poly_frob_mod(Fp, h, f)
        frob_powers[k] = h
    if poly_sub(Fp, frob_powers[m], x):
        return False
    for ell in sympy.primefactors(m):
        g = poly_gcd(Fp, f, poly_sub(Fp, frob_powers[m // ell], x))
        if len(g) > 1:
            return False
    return True


def first_irreducible(p: int, m: int) -> tuple[int, ...]:
    """First monic irreducible of degree m, lower coefficients in code order."""
    if m == 1:
        return (0, 1)
    for code in range(1, p ** m):
        lower = []
        c = code
        for _ in range(m):
            c, r = divmod(c, p)
            lower.append(r)
        if lower[0] == 0:
            continue
        cand = tuple(lower) + (1,)
        if is_irreducible(p, cand):
            return cand
    raise ParamError(f"no irreducible polynomial of degree {m} over GF({p})")  # pragma: no cover


def default_modulus(p: int, m: int) -> tuple[int, ...]:
    if m == 15 and p in PRESET_MODULI:
        return PRESET_MODULI[p]
    return first_irreducible(p, m)


@functools.lru_cache(maxsize=None)
def GF(p: int, m: int = 1, modulus: tuple[int, ...] | None = None) -> "FieldSpec":
    """Shared FieldSpec for GF(p^m); the paper presets are used for m = 15."""
    if modulus is None:
        modulus = default_modulus(p, m)
    return FieldSpec(p, m, tuple(modulus))


def preset(p: int) -> "FieldSpec":
    """F_{p^15} defined by the preset degree-15 modulus (p in 2, 3, 5)."""
    if p not in PRESET_MODULI:
        raise ParamError(f"no preset modulus for p={p}")
    return GF(p, 15, PRESET_MODULI[p])


# ---------------------------------------------------------------------------


class FieldSpec:
    """The field GF(p^m) = GF(p)[x]/(modulus).

    Construction verifies that p is prime and that the modulus is monic and
    irreducible.  Instances are immutable; obtain shared ones through GF().
    """

    def __init__(self, p: int, m: int, modulus: Sequence[int], check: bool = True):
        if not sympy.isprime(p):
            raise ParamError(f"characteristic {p} is not prime")
        modulus = tuple(int(c) % p for c in modulus)
        if m < 1 or len(modulus) != m + 1 or modulus[-1] != 1:
            raise ParamError("modulus must be monic of degree m")
        if check and not is_irreducible(p, modulus):
            raise ParamError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.m = m
        self.modulus = modulus
        self.order = p ** m
        self._key = (p, m, modulus)
        # x^m = sum_j red_j x^j
        self._red = [(j, (-c) % p) for j, c in enumerate(modulus[:-1]) if c]
        self._pows = [p ** i for i in range(m + 1)]
        self._exp = self._log = None
        self._np_exp = self._np_log = None
        self._batch = None
        self._primitive = None
        self._setup()

    # -- construction of the arithmetic kernels -----------------------------

    def _setup(self) -> None:
        p, m = self.p, self.m
        if m == 1:
            self.add = lambda a, b: (a + b) % p
            self.sub = lambda a, b: (a - b) % p
            self.neg = lambda a: (-a) % p
            self.mul = lambda a, b: (a * b) % p
        elif p == 2:
            self.add = self.sub = int.__xor__
            self.neg = lambda a: a
            self._modmask = sum(c << i for i, c in enumerate(self.modulus))
            self.mul = self._mul_bin
        else:
            if self.order <= ADD_TABLE_LIMIT:
                self._digit_table = [self._digits_slow(a) for a in range(self.order)]
                self._digits = self._digit_table.__getitem__
                addt = [[self._from_digits([(x + y) % p for x, y in zip(da, db)])
                         for db in self._digit_table] for da in self._digit_table]
                negt = [self._from_digits([(-x) % p for x in da]) for da in self._digit_table]
                self.add = lambda a, b: addt[a][b]
                self.neg = negt.__getitem__
                self.sub = lambda a, b: addt[a][negt[b]]
            else:
                self._digits = self._digits_slow
                self.add = self._add_odd
                self.sub = self._sub_odd
                self.neg = self._neg_odd
            self.mul = self._mul_odd
        if m > 1 and self.order <= LOG_TABLE_LIMIT:
            self._build_tables()

    def _build_tables(self) -> None:
        g = self.primitive_element_code()
        Q1 = self.order - 1
        exp = [0] * (2 * Q1)
        log = [0] * self.order
        x = 1
        slow = self.mul
        for k in range(Q1):
            exp[k] = x
            log[x] = k
            x = slow(x, g)
        exp[Q1:] = exp[:Q1]
        self._exp, self._log = exp, log

        def mul(a, b):
            if a == 0 or b == 0:
                return 0
            return exp[log[a] + log[b]]

        self.mul = mul

    # -- digit conversion ---------------------------------------------------

    def _digits_slow(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.m):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def digits(self, a: int) -> list[int]:
        """Coefficient vector of the element with code a (ascending)."""
        if self.p == 2:
            return [(a >> i) & 1 for i in range(self.m)]
        if self.m == 1:
            return [a]
        return list(self._digits(a))

    def _from_digits(self, ds: Iterable[int]) -> int:
        code = 0
        mult = 1
        p = self.p
        for d in ds:
            code += d * mult
            mult *= p
        return code

    def from_coeffs(self, coeffs: Sequence[int]) -> "FieldElement":
        coeffs = [int(c) % self.p for c in coeffs]
        if len(coeffs) > self.m:
            coeffs = self._reduce_poly(coeffs)
        return FieldElement(self, self._from_digits(coeffs))

    def _reduce_poly(self, coeffs: list[int]) -> list[int]:
        p, m = self.p, self.m
        c = list(coeffs)
        for k in range(len(c) - 1, m - 1, -1):
            t = c[k] % p
            if t:
                for j, r in self._red:
                    c[k - m + j] += t * r
            c[k] = 0
        return [x % p for x in c[:m]] + [0] * max(0, m - len(c))

    # -- scalar kernels -----------------------------------------------------

    def _mul_bin(self, a: int, b: int) -> int:
        top = 1 << self.m
        mask = self._modmask
        r = 0
        if a < b:
            a, b = b, a
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= mask
        return r

    def _add_odd(self, a: int, b: int) -> int:
        p = self.p
        return self._from_digits([(x + y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def _sub_odd(self, a: int, b: int) -> int:
        p = self.p
        return self._from_digits([(x - y) % p for x, y in zip(self._digits(a), self._digits(b))])

    def _neg_odd(self, a: int) -> int:
        p = self.p
        return self._from_digits([(-x) % p for x in self._digits(a)])

    def _mul_odd(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        p, m = self.p, self.m
        da = self._digits(a)
        db = [(j, y) for j, y in enumerate(self._digits(b)) if y]
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in db:
                    prod[i + j] += x * y
        red = self._red
        for k in range(2 * m - 2, m - 1, -1):
            t = prod[k] % p
            if t:
                base = k - m
                for j, r in red:
                    prod[base + j] += t * r
        code = 0
        for k in range(m - 1, -1, -1):
            code = code * p + prod[k] % p
        return code

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise DivisionByZero("zero to a negative power")
            return 0
        Q1 = self.order - 1
        e %= Q1
        if self._exp is not None:
            return self._exp[(self._log[a] * e) % Q1]
        if self.m == 1:
            return pow(a, e, self.p)
        result = 1
        base = a
        mul = self.mul
        while e:
            if e & 1:
                result = mul(result, base)
            e >>= 1
            if e:
                base = mul(base, base)
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self._exp is not None:
            return self._exp[(self.order - 1) - self._log[a]]
        if self._np_log is not None:
            return int(self._np_exp[(-int(self._np_log[a])) % (self.order - 1)])
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._inv_euclid(a)

    def _inv_euclid(self, a: int) -> int:
        """Inverse via the extended Euclidean algorithm on F_p[x]."""
        p = self.p
        r0, r1 = list(self.modulus), self.digits(a)
        s0, s1 = [0], [1]

        def trim(v):
            while len(v) > 1 and v[-1] == 0:
                v.pop()
            return v

        r1 = trim(list(r1))
        while len(r1) > 1 or r1[0] != 0:
            # one division step r0 = quot * r1 + rem
            rem = list(r0)
            quot = [0] * max(len(rem) - len(r1) + 1, 1)
            il = pow(r1[-1], p - 2, p)
            for k in range(len(rem) - 1, len(r1) - 2, -1):
                c = rem[k] * il % p
                if c:
                    quot[k - len(r1) + 1] = c
                    for j, y in enumerate(r1):
                        rem[k - len(r1) + 1 + j] = (rem[k - len(r1) + 1 + j] - c * y) % p
            rem = trim(rem[:max(len(r1) - 1, 1)])
            prod = [0] * (len(quot) + len(s1) - 1)
            for i, x in enumerate(quot):
                if x:
                    for j, y in enumerate(s1):
                        prod[i + j] += x * y
            n = max(len(s0), len(prod))
            s2 = trim([((s0[i] if i < len(s0) else 0) - (prod[i] if i < len(prod) else 0)) % p for i in range(n)])
            r0, r1, s0, s1 = r1, rem, s1, s2
        # r0 is a nonzero constant
        c = pow(r0[0], p - 2, p)
        coeffs = [(x * c) % p for x in s0] + [0] * self.m
        return self._from_digits(coeffs[:self.m])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frob(self, a: int, k: int = 1) -> int:
        """a^(p^k)."""
        k %= self.m
        if k == 0 or a == 0 or self.m == 1:
            return a
        if self._exp is not None:
            return self._exp[(self._log[a] * self._pows[k]) % (self.order - 1)]
        if self.p == 2:
            mul = self.mul
            for _ in range(k):
                a = mul(a, a)
            return a
        return self.pow(a, self._pows[k])

    # -- structure ----------------------------------------------------------

    def order_of(self, a: int) -> int:
        if a == 0:
            raise ZeroElement("the zero element has no multiplicative order")
        n = self.order - 1
        for ell, _ in factor_order(n):
            while n % ell == 0 and self.pow(a, n // ell) == 1:
                n //= ell
        return n

    def primitive_element_code(self) -> int:
        """Smallest code of a primitive element (the generator x is tried first)."""
        if self._primitive is None:
            Q1 = self.order - 1
            cands = itertools.chain([self.p] if self.m > 1 else [], range(1, self.order))
            for g in cands:
                if g and self.order_of(g) == Q1:
                    self._primitive = g
                    break
        return self._primitive

    @property
    def gen(self) -> "FieldElement":
        """The canonical generator: the class of x modulo the modulus."""
        if self.m == 1:
            return FieldElement(self, (-self.modulus[0]) % self.p)
        return FieldElement(self, self.p)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    def gen_is_primitive(self) -> bool:
        return self.order_of(self.gen.code) == self.order - 1

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field != self:
                raise SpecMismatch(f"{value.field!r} element used as {self!r} element")
            return value
        if isinstance(value, (list, tuple)):
            return self.from_coeffs(value)
        value = int(value)
        if not 0 <= value < self.order:
            raise ParamError(f"code {value} outside GF({self.p}^{self.m})")
        return FieldElement(self, value)

    def const(self, c: int) -> int:
        """Code of the prime-field constant c."""
        return int(c) % self.p

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(self, a) for a in range(self.order))

    def random_code(self, rng: random.Random | np.random.Generator) -> int:
        if isinstance(rng, np.random.Generator):
            return int(rng.integers(0, self.order))
        return rng.randrange(self.order)

    # -- numpy support ------------------------------------------------------

    @property
    def batch(self) -> "BatchOps":
        if self._batch is None:
            self._batch = BatchOps(self)
        return self._batch

    def np_tables(self, force: bool = False) -> tuple[np.ndarray, np.ndarray] | None:
        """(exp, log) arrays; built automatically for small fields, on request
        (``force``) up to NP_TABLE_LIMIT."""
        if self._np_exp is not None:
            return self._np_exp, self._np_log
        limit = NP_TABLE_LIMIT if force else NP_TABLE_AUTO
        if self.m == 1 or self.order > limit:
            return None
        Q1 = self.order - 1
        if self._exp is not None:
            exp = np.array(self._exp[:Q1], dtype=np.int64)
        else:
            g = self.primitive_element_code()
            exp = np.empty(Q1, dtype=np.int64)
            exp[0] = 1
            filled = 1
            B = self.batch
            B._tables = False
            while filled < Q1:
                step = min(filled, Q1 - filled)
                gL = self.pow(g, filled)
                exp[filled:filled + step] = B.mulconst(exp[:step], gL)
                filled += step
        log = np.zeros(self.order, dtype=np.int64)
        log[exp] = np.arange(Q1, dtype=np.int64)
        self._np_exp, self._np_log = exp, log
        if self._batch is not None:
            self._batch._tables = None
        return exp, log

    # -- misc ---------------------------------------------------------------

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldSpec":
        return GF(int(obj["p"]), int(obj["m"]), tuple(int(c) for c in obj["modulus"]))

    def element_to_json(self, a) -> list[int]:
        code = a.code if isinstance(a, FieldElement) else int(a)
        return self.digits(code)

    def element_from_json(self, obj) -> int:
        """Code of a serialised element: a coefficient list or {"generator_pow": k}."""
        if isinstance(obj, dict):
            if "generator_pow" not in obj:
                raise ParamError(f"unrecognised element encoding {obj!r}")
            if not self.gen_is_primitive():
                raise ParamError("generator_pow form needs a primitive canonical generator")
            return self.pow(self.gen.code, int(obj["generator_pow"]))
        return self.from_coeffs(obj).code

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldSpec) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"

    def __reduce__(self):
        return (GF, (self.p, self.m, self.modulus))


class FieldElement:
    """An element of a FieldSpec, with the usual operators."""

    __slots__ = ("field", "code")

    def __init__(self, field: FieldSpec, code: int):
        self.field = field
        self.code = code

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field is not self.field and other.field != self.field:
                raise SpecMismatch(f"cannot combine {self.field!r} and {other.field!r}")
            return other.code
        if isinstance(other, (int, np.integer)):
            return self.field.const(int(other))
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.add(self.code, b))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.sub(self.code, b))

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.sub(b, self.code))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.code))

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.mul(self.code, b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.div(self.code, b))

    def __rtruediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.div(b, self.code))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.code, int(e)))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.code))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.code == other.code
        if isinstance(other, (int, np.integer)):
            return self.code == self.field.const(int(other))
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field._key, self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __lt__(self, other: "FieldElement") -> bool:
        return self.code < other.code

    @property
    def coeffs(self) -> list[int]:
        return self.field.digits(self.code)

    def frobenius(self, q: int, i: int = 1) -> "FieldElement":
        return frobenius(self, q, i)

    def trace(self, q: int, n: int) -> "FieldElement":
        return rel_trace(self, q, n)

    def order(self) -> int:
        return element_order(self)

    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                if i == 0:
                    terms.append(str(c))
                    continue
                mono = "x" if i == 1 else f"x^{i}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(reversed(terms)) or "0"


# ---------------------------------------------------------------------------
# module-level operations


def _q_exponent(F: FieldSpec, q: int) -> int:
    p, s = prime_power(q)
    if p != F.p:
        raise SpecMismatch(f"q={q} is not a power of the characteristic {F.p}")
    return s


def field_arith(x: FieldElement, y: FieldElement | None, op: str, e: int | None = None) -> FieldElement:
    """Dispatch form of the element operators: op in add, sub, mul, div, inv, pow."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "inv":
        return x.inverse()
    if op == "pow":
        return x ** e
    raise ParamError(f"unknown operation {op!r}")


def frobenius(x: FieldElement, q: int, i: int = 1) -> FieldElement:
    """x^(q^i) for q a power of the characteristic."""
    s = _q_exponent(x.field, q)
    if i < 0:
        raise ParamError("Frobenius exponent must be non-negative")
    return FieldElement(x.field, x.field.frob(x.code, s * i))


def rel_trace(x: FieldElement, q: int, n: int) -> FieldElement:
    """Tr_{q^n/q}(x) = x + x^q + ... + x^(q^(n-1)); x must lie in GF(q^n)."""
    F = x.field
    s = _q_exponent(F, q)
    if F.frob(x.code, s * n) != x.code:
        raise SpecMismatch(f"element does not lie in GF({q}^{n})")
    return FieldElement(F, trace_code(F, x.code, s, n))


def trace_code(F: FieldSpec, a: int, s: int, n: int) -> int:
    acc = 0
    y = a
    for _ in range(n):
        acc = F.add(acc, y)
        y = F.frob(y, s)
    return acc


def element_order(x: FieldElement) -> int:
    return x.field.order_of(x.code)


def is_primitive(x: FieldElement) -> bool:
    return x.code != 0 and element_order(x) == x.field.order - 1


def find_roots(F: FieldSpec, poly: Sequence, seed: int = 0) -> list[FieldElement]:
    """All distinct roots in F of a polynomial given by ascending coefficients.

    Uses gcd with x^Q - x followed by trace splitting, with a seeded generator
    so the result (sorted by code) is deterministic.
    """
    f = _trim([F(c).code if not isinstance(c, int) else F(c).code for c in poly])
    if not f:
        raise ZeroPolynomial("the zero polynomial has every element as a root")
    if len(f) == 1:
        return []
    f = poly_monic(F, f)
    x = [0, 1]
    if F.order <= 4096:
        roots = [a for a in range(F.order) if poly_eval(F, f, a) == 0]
        return [FieldElement(F, a) for a in roots]
    h = poly_mod(F, x, f)
    for _ in range(F.m):
        h = poly_frob_mod(F, h, f)
    g = poly_gcd(F, f, poly_sub(F, h, x))
    roots: list[int] = []
    _split_roots(F, g, roots, random.Random(seed))
    return [FieldElement(F, a) for a in sorted(roots)]


def _split_roots(F: FieldSpec, g: list[int], out: list[int], rng: random.Random) -> None:
    deg = len(g) - 1
    if deg <= 0:
        return
    if deg == 1:
        out.append(F.neg(g[0]))
        return
    while True:
        delta = rng.randrange(1, F.order)
        t = poly_mod(F, [0, delta], g)
        acc = list(t)
        for _ in range(F.m - 1):
            t = poly_frob_mod(F, t, g)
            acc = poly_add(F, acc, t)
        parts = []
        for c in range(F.p):
            d = poly_gcd(F, g, poly_sub(F, acc, [c] if c else []))
            if len(d) > 1:
                parts.append(d)
        if len(parts) >= 2:
            for d in parts:
                _split_roots(F, d, out, rng)
            return


class SubfieldMap:
    """Embedding GF(p^a) -> GF(p^b), a | b, sending the source generator to a root
    of the source modulus in the target (the smallest such root by code)."""

    def __init__(self, source: FieldSpec, target: FieldSpec, image_of_generator: int | None = None):
        if source.p != target.p or target.m % source.m:
            raise SpecMismatch(f"no embedding of {source!r} into {target!r}")
        self.source = source
        self.target = target
        if image_of_generator is None:
            if source.m == 1:
                image_of_generator = source.gen.code
            else:
                roots = find_roots(target, list(source.modulus))
                image_of_generator = roots[0].code
        elif poly_eval(target, list(source.modulus), image_of_generator) != 0:
            raise ParamError("image of the generator is not a root of the source modulus")
        self.image_of_generator = image_of_generator
        self._basis = [target.pow(image_of_generator, i) for i in range(source.m)]
        self._inverse = None

    def embed_code(self, a: int) -> int:
        T = self.target
        acc = 0
        for c, b in zip(self.source.digits(a), self._basis):
            if c:
                acc = T.add(acc, T.mul(c, b))
        return acc

    def embed(self, x: FieldElement) -> FieldElement:
        if x.field != self.source:
            raise SpecMismatch(f"{x.field!r} element passed to embedding of {self.source!r}")
        return FieldElement(self.target, self.embed_code(x.code))

    __call__ = embed

    def preimage_code(self, y: int) -> int:
        """Inverse on the image; raises SpecMismatch outside the image."""
        from .linalg import solve_mod_p

        if self._inverse is None:
            rows = [self.target.digits(b) for b in self._basis]
            self._inverse = rows
        sol = solve_mod_p(self._inverse, self.target.digits(y), self.target.p)
        if sol is None:
            raise SpecMismatch("element is not in the image of the embedding")
        return self.source._from_digits(sol)

    def preimage(self, y: FieldElement) -> FieldElement:
        return FieldElement(self.source, self.preimage_code(y.code))

    @property
    def image(self) -> FieldElement:
        return FieldElement(self.target, self.image_of_generator)


@functools.lru_cache(maxsize=None)
def subfield_map(source: FieldSpec, target: FieldSpec) -> SubfieldMap:
    return SubfieldMap(source, target)


def embed(map_: SubfieldMap, x: FieldElement) -> FieldElement:
    return map_.embed(x)


# ---------------------------------------------------------------------------


class BatchOps:
    """Vectorised arithmetic on int64 arrays of element codes.

    Products of two varying operands use a carry-less multiply (p = 2) or a
    digit convolution followed by reduction.  F_p-linear maps (Frobenius,
    multiplication by a constant) are m x m matrices over F_p.  Fields with numpy exp/log tables use them.
    """

    CHUNK = 1 << 15

    def __init__(self, F: FieldSpec):
        if F.order >= 1 << 62:
            raise ParamError(f"{F!r} is too large for int64 codes")
        self.F = F
        self.p, self.m = F.p, F.m
        self.pows = np.array([F.p ** i for i in range(F.m)], dtype=np.int64)
        self._frob = {}
        self._tables = None

    def ensure_tables(self) -> bool:
        """Build numpy exp/log tables if the field is small enough; report success."""
        self._tables = None
        return self.F.np_tables(force=True) is not None and self.tables() is not None

    def tables(self):
        if self._tables is None:
            t = self.F.np_tables()
            self._tables = t if t is not None else False
        return self._tables or None

    def digits(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        if self.p == 2:
            return (codes[..., None] >> np.arange(self.m, dtype=np.int64)) & 1
        out = np.empty(codes.shape + (self.m,), dtype=np.int64)
        c = codes.copy()
        for i in range(self.m):
            c, out[..., i] = np.divmod(c, self.p)
        return out

    def codes(self, digits: np.ndarray) -> np.ndarray:
        d = np.asarray(digits, dtype=np.int64) % self.p
        return d @ self.pows

    def add(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.m == 1:
            return (np.asarray(a) + b) % self.p
        return self.codes(self.digits(a) + self.digits(b))

    def sub(self, a, b):
        if self.p == 2:
            return np.bitwise_xor(a, b)
        if self.m == 1:
            return (np.asarray(a) - b) % self.p
        return self.codes(self.digits(a) - self.digits(b))

    def neg(self, a):
        if self.p == 2:
            return np.asarray(a)
        return self.codes(-self.digits(a))

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        shape = a.shape
        a = a.ravel()
        b = b.ravel()
        if self.m == 1:
            return ((a * b) % self.p).reshape(shape)
        t = self.tables()
        if t:
            exp, log = t
            Q1 = self.F.order - 1
            out = exp[(log[a] + log[b]) % Q1]
            out[(a == 0) | (b == 0)] = 0
            return out.reshape(shape)
        out = np.empty(a.shape, dtype=np.int64)
        kernel = self._mul_clmul if self.p == 2 and 2 * self.m - 1 <= 63 else self._mul_conv
        for lo in range(0, a.size, self.CHUNK):
            hi = min(lo + self.CHUNK, a.size)
            out[lo:hi] = kernel(a[lo:hi], b[lo:hi])
        return out.reshape(shape)

    def _mul_clmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Carry-less product then reduction, bit-sliced over the chunk."""
        m = self.m
        acc = np.zeros_like(a)
        for i in range(m):
            acc ^= (a * ((b >> i) & 1)) << i
        mask = np.int64(self.F._modmask)
        for k in range(2 * m - 2, m - 1, -1):
            acc ^= ((acc >> k) & 1) * (mask << (k - m))
        return acc

    def _mul_conv(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Digit convolution then sparse reduction by the modulus."""
        m, p = self.m, self.p
        A = self.digits(a)
        B = self.digits(b)
        acc = np.zeros((a.size, 2 * m - 1), dtype=np.int64)
        for i in range(m):
            acc[:, i:i + m] += A[:, i:i + 1] * B
        for k in range(2 * m - 2, m - 1, -1):
            t = acc[:, k] % p
            for j, r in self.F._red:
                acc[:, k - m + j] += t * r
        return (acc[:, :m] % p) @ self.pows

    def matrix(self, fn) -> np.ndarray:
        """F_p matrix (acting on digit row vectors) of an F_p-linear map on codes."""
        F = self.F
        return np.array([F.digits(fn(F.p ** i)) for i in range(F.m)], dtype=np.int64)

    def linear(self, a, M: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        shape = a.shape
        a = a.ravel()
        out = np.empty(a.shape, dtype=np.int64)
        Mf = M.astype(np.float64)
        for lo in range(0, a.size, 4 * self.CHUNK):
            hi = min(lo + 4 * self.CHUNK, a.size)
            D = self.digits(a[lo:hi]).astype(np.float64)
            out[lo:hi] = (np.rint(D @ Mf).astype(np.int64) % self.p) @ self.pows
        return out.reshape(shape)

    def mulconst_matrix(self, c: int) -> np.ndarray:
        return self.matrix(lambda a: self.F.mul(a, c))

    def mulconst(self, a, c: int) -> np.ndarray:
        t = self.tables()
        a = np.asarray(a, dtype=np.int64)
        if t:
            if c == 0:
                return np.zeros_like(a)
            exp, log = t
            out = exp[(log[a] + log[c]) % (self.F.order - 1)]
            out[a == 0] = 0
            return out
        if self.m == 1:
            return (a * c) % self.p
        return self.linear(a, self.mulconst_matrix(c))

    def frob_matrix(self, k: int) -> np.ndarray:
        k %= self.m
        if k not in self._frob:
            self._frob[k] = self.matrix(lambda a: self.F.frob(a, k))
        return self._frob[k]

    def frob(self, a, k: int) -> np.ndarray:
        k %= self.m
        a = np.asarray(a, dtype=np.int64)
        if k == 0 or self.m == 1:
            return a.copy()
        t = self.tables()
        if t:
            exp, log = t
            Q1 = self.F.order - 1
            out = exp[(log[a] * (self.p ** k % Q1)) % Q1]
            out[a == 0] = 0
            return out
        return self.linear(a, self.frob_matrix(k))

    def pow(self, a, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        Q1 = self.F.order - 1
        t = self.tables()
        if t and e >= 0:
            exp, log = t
            out = exp[(log[a] * (e % Q1)) % Q1]
            out[a == 0] = 0 if e > 0 else 1
            return out
        if e < 0:
            raise ParamError("negative batch powers are not supported")
        result = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def frob_product(self, a, k: int) -> np.ndarray:
        """prod_{i<k} a^(p^i), i.e. a^((p^k - 1)/(p - 1)), by Frobenius doubling."""
        a = np.asarray(a, dtype=np.int64)
        acc = None
        acc_len = 0
        for bit in bin(k)[2:]:
            if acc is None:
                acc, acc_len = a.copy(), 1
                continue
            acc = self.mul(acc, self.frob(acc, acc_len))
            acc_len *= 2
            if bit == "1":
                acc = self.mul(a, self.frob(acc, 1))
                acc_len += 1
        return acc if acc is not None else np.ones_like(a)

    def pow_pk_minus_one(self, a, k: int) -> np.ndarray:
        """a^(p^k - 1) for every entry."""
        t = self.tables()
        if t:
            return self.pow(a, self.p ** k - 1)
        y = self.pow(a, self.p - 1) if self.p > 2 else np.asarray(a, dtype=np.int64)
        return self.frob_product(y, k)

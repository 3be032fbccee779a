"""Upper bounds on the dimension of (h,k)_q-evasive subspaces of V(r, q^n).

Each bound is a pure function that raises when its hypotheses fail;
``best_bounds`` collects the applicable ones into a :class:`BoundReport`.
Cardinality bounds are turned into dimension bounds by taking the largest e
with q^e <= bound, since |U| is a power of q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor

from .errors import GuardFailed, ParamError


@dataclass(frozen=True)
class Cardinality:
    """The number q**exponent, kept symbolic."""

    q: int
    exponent: int

    @property
    def value(self) -> int:
        return self.q ** self.exponent


def log_floor(value: int, q: int) -> int:
    """Largest e with q^e <= value (value >= 1)."""
    if value < 1:
        raise ParamError("value must be positive")
    e, x = 0, q
    while x <= value:
        e += 1
        x *= q
    return e


def singleton_like(m: int, n: int, delta: int, q: int) -> Cardinality:
    """|C| <= q^(min(m,n) (max(m,n) - delta + 1)) for rank-metric codes of distance delta."""
    if not 1 <= delta <= max(m, n):
        raise ParamError(f"delta={delta} outside 1..max(m,n)")
    return Cardinality(q, min(m, n) * (max(m, n) - delta + 1))


def bound_hyperplane(q: int, n: int, r: int, k: int) -> tuple[int | None, int | None]:
    """Bounds for (r-1, k)-evasive subspaces: n+k-1 and, for small k, n+k-r+1."""
    if r < 2 or k < r - 1:
        raise ParamError(f"needs r >= 2 and k >= r-1 (got r={r}, k={k})")
    b1 = n + k - 1 if k < (r - 1) * n else None
    b2 = n + k - r + 1 if Fraction(k) < r - 2 + Fraction(n, r - 1) else None
    return b1, b2


def bound_counting(q: int, n: int, r: int, h: int, k: int) -> int:
    """floor((q^k - 1)(q^rn - 1)/(q^hn - 1) + 1), an upper bound on |U|."""
    if not 1 <= h <= r or k < h:
        raise ParamError(f"needs 1 <= h <= r and k >= h (got h={h}, k={k})")
    return (q ** k - 1) * (q ** (r * n) - 1) // (q ** (h * n) - 1) + 1


def bound_counting_dim(q: int, n: int, r: int, h: int, k: int) -> int:
    return log_floor(bound_counting(q, n, r, h, k), q)


def bound_csmpz(q: int, n: int, r: int, h: int, k: int) -> int:
    """floor(rn - rnh/(k+1)), valid for k < n."""
    if k >= n:
        raise GuardFailed(f"needs k < n (got k={k}, n={n})")
    if not 1 <= h <= k:
        raise ParamError(f"needs 1 <= h <= k (got h={h}, k={k})")
    return floor(Fraction(r * n) - Fraction(r * n * h, k + 1))


def bound_general(q: int, n: int, r: int, h1: int, k1: int, d2: int, k2: int) -> int:
    """floor(rn - rn h1/d2) given a (h1-1, k2)-evasive subspace of dim d2 in V(h1, q^n)
    and d2 + h1 - k2 - 1 > k1."""
    if not d2 + h1 - k2 - 1 > k1:
        raise GuardFailed(f"guard d2 + h1 - k2 - 1 = {d2 + h1 - k2 - 1} > k1 = {k1} fails")
    if d2 <= 0:
        raise ParamError("d2 must be positive")
    return floor(Fraction(r * n) - Fraction(r * n * h1, d2))


def bound_scattered(q: int, n: int, r: int) -> int:
    """floor(rn/2) for scattered subspaces."""
    return (r * n) // 2


# ---------------------------------------------------------------------------


KNOWN_RESULTS = (
    {
        "name": "h-scattered-divisible",
        "statement": "if (h+1) | r and n >= h+1, maximum (h,h)_q-evasive subspaces have dimension rn/(h+1)",
        "applies": lambda q, n, r, h, k: h == k and r % (h + 1) == 0 and n >= h + 1,
        "dimension": lambda q, n, r, h, k: r * n // (h + 1),
        "source": "prior literature on h-scattered subspaces",
    },
    {
        "name": "scattered-rn-even",
        "statement": "if rn is even, maximum (1,1)_q-evasive subspaces have dimension rn/2",
        "applies": lambda q, n, r, h, k: h == k == 1 and (r * n) % 2 == 0,
        "dimension": lambda q, n, r, h, k: r * n // 2,
        "source": "prior literature on scattered subspaces",
    },
    {
        "name": "n-3-scattered",
        "statement": "if rn is even, maximum (n-3,n-3)_q-evasive subspaces of V(r(n-2)/2, q^n) have dimension rn/2",
        "applies": lambda q, n, r, h, k: False,  # parametrised by an outer r; listed for reference
        "dimension": None,
        "source": "prior literature on h-scattered subspaces",
    },
    {
        "name": "h-scattered-hyperplanes",
        "statement": "h-scattered subspaces of dimension rn/(h+1) are (r-1, rn/(h+1)-n+h)_q-evasive",
        "applies": lambda q, n, r, h, k: False,
        "dimension": None,
        "source": "prior literature on h-scattered subspaces",
    },
)


def known_results(q: int, n: int, r: int, h: int, k: int) -> list[dict]:
    out = []
    for entry in KNOWN_RESULTS:
        if entry["applies"](q, n, r, h, k):
            out.append({"name": entry["name"], "statement": entry["statement"],
                        "maximum": entry["dimension"](q, n, r, h, k), "source": entry["source"]})
    return out


@dataclass
class BoundEntry:
    name: str
    guard: bool
    value: int | None
    kind: str = "dimension"  # or "cardinality"


@dataclass
class BoundReport:
    q: int
    n: int
    r: int
    h: int
    k: int
    entries: list[BoundEntry] = field(default_factory=list)
    known: list[dict] = field(default_factory=list)

    @property
    def binding(self) -> int | None:
        dims = [self._as_dim(e) for e in self.entries if e.guard and e.value is not None]
        return min(dims) if dims else None

    @property
    def binding_names(self) -> list[str]:
        b = self.binding
        return [e.name for e in self.entries if e.guard and e.value is not None and self._as_dim(e) == b]

    def _as_dim(self, e: BoundEntry) -> int:
        return log_floor(e.value, self.q) if e.kind == "cardinality" else e.value

    def to_json(self) -> dict:
        return {
            "q": self.q, "n": self.n, "r": self.r, "h": self.h, "k": self.k,
            "entries": [{"name": e.name, "guard": e.guard, "value": e.value, "kind": e.kind,
                         "dimension": self._as_dim(e) if e.guard and e.value is not None else None}
                        for e in self.entries],
            "binding": self.binding,
            "binding_names": self.binding_names,
            "known": [{k: v for k, v in d.items()} for d in self.known],
        }

    def table(self) -> str:
        lines = [f"(q,n,r,h,k) = ({self.q},{self.n},{self.r},{self.h},{self.k})"]
        for e in self.entries:
            shown = "-" if not e.guard or e.value is None else str(self._as_dim(e))
            lines.append(f"  {e.name:<22} guard={'yes' if e.guard else 'no ':<3} dim<= {shown}")
        lines.append(f"  binding: {self.binding} ({', '.join(self.binding_names)})")
        return "\n".join(lines)


def best_bounds(q: int, n: int, r: int, h: int, k: int) -> BoundReport:
    if not 1 <= h <= r or k < h:
        raise ParamError(f"needs 1 <= h <= r and k >= h (got h={h}, k={k})")
    rep = BoundReport(q, n, r, h, k)
    rep.entries.append(BoundEntry("trivial", True, r * n))
    rep.entries.append(BoundEntry("counting", True, bound_counting(q, n, r, h, k), "cardinality"))
    if h == k == 1:
        rep.entries.append(BoundEntry("scattered", True, bound_scattered(q, n, r)))
    try:
        rep.entries.append(BoundEntry("csmpz", True, bound_csmpz(q, n, r, h, k)))
    except GuardFailed:
        rep.entries.append(BoundEntry("csmpz", False, None))
    if h == r - 1 and r >= 2:
        b1, b2 = bound_hyperplane(q, n, r, k)
        rep.entries.append(BoundEntry("hyperplane_b1", b1 is not None, b1))
        rep.entries.append(BoundEntry("hyperplane_b2", b2 is not None, b2))
    rep.known = known_results(q, n, r, h, k)
    return rep


def case_rows(n: int, r: int = 3) -> list[tuple[int, int]]:
    """(h, k) pairs of the small-case analysis for r = 3.

    h = 1: 1 <= k < n; h = 2: 2 <= k < n (k >= n is settled by n+k-1).
    (1,1) is dropped for even n, where rn/2 is known to be attained.
    """
    if r != 3:
        raise ParamError("the case analysis is for r = 3")
    rows = [(1, k) for k in range(1, n) if not (k == 1 and n % 2 == 0)]
    rows += [(2, k) for k in range(2, n)]
    return rows


def case_table(q: int, n: int, r: int = 3) -> list[BoundReport]:
    return [best_bounds(q, n, r, h, k) for h, k in case_rows(n, r)]

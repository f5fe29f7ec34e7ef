"""Domain types: bundles, exact values, valuation oracles, profiles, allocations.

Bundles are plain ``int`` bitmasks: bit ``g`` is set iff good ``g`` belongs to
the bundle.  A proper subset therefore always has a strictly smaller mask.
Values are :class:`fractions.Fraction`; nothing in the engine rounds.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Union

from .errors import CapacityError, MalformedInputError

# Full-table enumeration (2^m entries) is refused above this many goods.
MAX_TABLE_GOODS = 20

Bundle = int
Value = Fraction
Number = Union[int, Fraction, str]


# -- bundles ----------------------------------------------------------------

def bundle(goods: Iterable[int] = ()) -> Bundle:
    mask = 0
    for g in goods:
        if g < 0:
            raise MalformedInputError(f"negative good index {g}")
        mask |= 1 << g
    return mask


def members(mask: Bundle) -> list[int]:
    """Ascending good indices of ``mask``."""
    out = []
    g = 0
    while mask:
        if mask & 1:
            out.append(g)
        mask >>= 1
        g += 1
    return out


def size(mask: Bundle) -> int:
    return mask.bit_count()


def full(m: int) -> Bundle:
    return (1 << m) - 1


def subsets_of_size(pool: Bundle, k: int) -> Iterator[Bundle]:
    """All ``k``-element subsets of ``pool``, in lexicographic order of members."""
    for combo in combinations(members(pool), k):
        yield bundle(combo)


def submasks(mask: Bundle) -> Iterator[Bundle]:
    """Every submask of ``mask`` (including 0 and ``mask``), descending."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def min_mask_subset(pool: Bundle, k: int) -> Bundle:
    """The ``k`` lowest-indexed goods of ``pool`` (the minimum-mask k-subset)."""
    out = 0
    for g in members(pool)[:k]:
        out |= 1 << g
    return out


def check_bundle(mask: Bundle, m: int) -> None:
    if not isinstance(mask, int) or mask < 0 or mask >> m:
        raise MalformedInputError(f"bundle {mask!r} is not a subset of {m} goods")


def as_value(x: Number) -> Value:
    try:
        return Fraction(x)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise MalformedInputError(f"not an exact rational: {x!r}") from exc


def format_value(x: Value) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- valuations ---------------------------------------------------------------

class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Valuation:
    """A total map from bundles over ``m`` goods to exact values.

    Subclasses provide ``value`` and ``key``.  ``key`` is what every comparison
    in the engine goes through; for plain oracles it is the value itself, for
    a strictified oracle it is a tie-broken tuple.
    """

    m: int

    def value(self, mask: Bundle) -> Value:
        raise NotImplementedError

    def key(self, mask: Bundle):
        return self.value(mask)

    def compare(self, s: Bundle, t: Bundle) -> Ordering:
        return compare(self, s, t)


@dataclass(frozen=True)
class TableValuation(Valuation):
    """Explicit value for each of the 2^m bundles, indexed by bitmask."""

    values: tuple[Value, ...]
    m: int = field(init=False)

    def __post_init__(self):
        values = tuple(as_value(x) for x in self.values)
        n = len(values)
        if n == 0 or n & (n - 1):
            raise MalformedInputError(f"table length {n} is not a power of two")
        m = n.bit_length() - 1
        if m < 1:
            raise MalformedInputError("a table needs at least one good")
        if m > MAX_TABLE_GOODS:
            raise CapacityError(f"table valuations are capped at m={MAX_TABLE_GOODS}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "m", m)

    @classmethod
    def from_function(cls, m: int, fn) -> "TableValuation":
        if m > MAX_TABLE_GOODS:
            raise CapacityError(f"table valuations are capped at m={MAX_TABLE_GOODS}")
        return cls(tuple(fn(mask) for mask in range(1 << m)))

    def value(self, mask: Bundle) -> Value:
        check_bundle(mask, self.m)
        return self.values[mask]

    def key(self, mask: Bundle):
        return self.values[mask]


@dataclass(frozen=True)
class AdditiveValuation(Valuation):
    """Bundle value is the sum of nonnegative per-good weights."""

    weights: tuple[Value, ...]
    m: int = field(init=False)

    def __post_init__(self):
        weights = tuple(as_value(w) for w in self.weights)
        if not weights:
            raise MalformedInputError("an additive valuation needs at least one good")
        if any(w < 0 for w in weights):
            raise MalformedInputError("additive weights must be nonnegative")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "m", len(weights))

    def value(self, mask: Bundle) -> Value:
        check_bundle(mask, self.m)
        return self.key(mask)

    def key(self, mask: Bundle):
        w = self.weights
        total = Fraction(0)
        g = 0
        while mask:
            if mask & 1:
                total += w[g]
            mask >>= 1
            g += 1
        return total

    def to_table(self) -> TableValuation:
        return TableValuation.from_function(self.m, self.key)


@dataclass(frozen=True)
class StrictifiedValuation(Valuation):
    """Wraps a weak valuation and breaks ties by (size, mask).

    ``value`` still reports the wrapped value; only comparisons see the
    tie-break, so no two distinct bundles ever compare equal.
    """

    base: Valuation
    m: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "m", self.base.m)

    def value(self, mask: Bundle) -> Value:
        return self.base.value(mask)

    def key(self, mask: Bundle):
        return (self.base.key(mask), mask.bit_count(), mask)


def value(v: Valuation, s: Bundle) -> Value:
    return v.value(s)


def compare(v: Valuation, s: Bundle, t: Bundle) -> Ordering:
    check_bundle(s, v.m)
    check_bundle(t, v.m)
    a, b = v.key(s), v.key(t)
    if a < b:
        return Ordering.LESS
    if a > b:
        return Ordering.GREATER
    return Ordering.EQUAL


def table_keys(v: Valuation) -> list:
    """Comparison keys for all 2^m bundles, indexed by mask.

    Valuations are immutable, so the list is computed once and kept on the
    instance; callers must not mutate it.
    """
    cached = v.__dict__.get("_table_keys")
    if cached is not None:
        return cached
    if v.m > MAX_TABLE_GOODS:
        raise CapacityError(f"full enumeration is capped at m={MAX_TABLE_GOODS}")
    keys = [_plain(v.key(mask)) for mask in range(1 << v.m)]
    object.__setattr__(v, "_table_keys", keys)
    return keys


def _plain(key):
    # integral Fractions become ints: same order, much cheaper comparisons
    if isinstance(key, Fraction):
        return key.numerator if key.denominator == 1 else key
    if isinstance(key, tuple):
        return tuple(_plain(part) for part in key)
    return key


def rank_table(v: Valuation) -> list[int]:
    """Dense integer ranks of every bundle, order-isomorphic to ``v.key``.

    Ties share a rank.  Used where many comparisons are needed and only the
    induced order matters.
    """
    keys = table_keys(v)
    distinct = sorted(set(keys))
    index = {k: i for i, k in enumerate(distinct)}
    return [index[k] for k in keys]


# -- profiles and allocations ----------------------------------------------------

@dataclass(frozen=True)
class Profile:
    valuations: tuple[Valuation, ...]

    def __post_init__(self):
        vals = tuple(self.valuations)
        if len(vals) < 2:
            raise MalformedInputError("a profile needs at least two agents")
        ms = {v.m for v in vals}
        if len(ms) != 1:
            raise MalformedInputError(f"agents disagree on the number of goods: {sorted(ms)}")
        object.__setattr__(self, "valuations", vals)

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return self.valuations[0].m

    def __getitem__(self, i: int) -> Valuation:
        return self.valuations[i]

    def __iter__(self):
        return iter(self.valuations)

    def __len__(self):
        return len(self.valuations)


@dataclass(frozen=True)
class Allocation:
    """One bundle per agent; bundles are disjoint and cover all goods."""

    bundles: tuple[Bundle, ...]

    def __post_init__(self):
        object.__setattr__(self, "bundles", tuple(self.bundles))

    @classmethod
    def from_lists(cls, lists: Sequence[Iterable[int]]) -> "Allocation":
        return cls(tuple(bundle(goods) for goods in lists))

    def validate(self, m: int, n: int) -> None:
        if len(self.bundles) != n:
            raise MalformedInputError(f"allocation has {len(self.bundles)} bundles, expected {n}")
        seen = 0
        for i, b in enumerate(self.bundles):
            check_bundle(b, m)
            if seen & b:
                raise MalformedInputError(
                    f"bundle of agent {i} overlaps earlier bundles on goods {members(seen & b)}"
                )
            seen |= b
        if seen != full(m):
            raise MalformedInputError(f"goods {members(full(m) & ~seen)} are not allocated")

    def sizes(self) -> list[int]:
        return [b.bit_count() for b in self.bundles]

    def as_lists(self) -> list[list[int]]:
        return [members(b) for b in self.bundles]

    def __getitem__(self, i: int) -> Bundle:
        return self.bundles[i]

    def __len__(self):
        return len(self.bundles)


@dataclass(frozen=True)
class Violation:
    envier: int
    envied: int
    good: int


@dataclass(frozen=True)
class EfxReport:
    violations: tuple[Violation, ...] = ()

    @property
    def is_efx(self) -> bool:
        return not self.violations

    def __bool__(self):
        # truthy iff there is something to report
        return bool(self.violations)

    def enviers(self) -> set[int]:
        return {v.envier for v in self.violations}


# -- classifier output and allocator traces -------------------------------------------

@dataclass(frozen=True)
class RoleAssignment:
    """Maps role positions to agent ids.

    ``order[p]`` is the agent playing role ``p``.  Position 0 is the
    unconstrained agent (and position 1 the second one for the two-arbitrary
    patterns); the strongest size-monotone class sits at the tail.
    """

    pattern: str
    order: tuple[int, ...]
    ell: int
    r: int
    classes: tuple[str, ...] = ()

    def __post_init__(self):
        order = tuple(self.order)
        if sorted(order) != list(range(len(order))):
            raise MalformedInputError(f"role order {order} is not a permutation")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "classes", tuple(self.classes))

    @property
    def two_arbitrary(self) -> bool:
        return self.pattern.startswith(("ThmN2", "Relax2"))


class Branch(str, enum.Enum):
    INITIAL_EFX = "InitialEFX"
    CANDIDATE_EFX = "CandidateEFX"
    CASE_A = "CaseA"
    CASE_B = "CaseB"
    BAR_EFX = "BarEFX"
    CONTINUE = "Continue"


@dataclass(frozen=True)
class IterRecord:
    """One iteration of the two-arbitrary-agent repair loop.

    ``c`` is the size of the bundle kept by the first arbitrary agent,
    ``w``/``y`` the two anchor bundles, ``max_size`` the largest bundle of the
    allocation this iteration ends with.  ``case`` is CaseA/CaseB when the
    candidate failed and the fallback allocation was built.  ``allocation``
    holds that allocation indexed by agent (not by role position), and
    ``agent1_bundle`` the first arbitrary agent's share of it.
    """

    c: int
    w: Bundle
    y: Bundle
    max_size: int
    outcome: Branch
    case: Branch | None = None
    agent1_bundle: Bundle = 0
    allocation: tuple[Bundle, ...] = ()


@dataclass(frozen=True)
class IterTrace:
    records: tuple[IterRecord, ...] = ()

    @property
    def depth(self) -> int:
        return self.records[-1].c if self.records else 0

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

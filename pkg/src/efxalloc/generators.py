"""Seeded instance families and the two hand-built counterexample valuations.

Randomness comes from :class:`random.Random` (Mersenne Twister, MT19937)
seeded with an integer; Python guarantees the same stream for the same
integer seed on every platform.  Values are drawn with ``randrange`` in a
fixed iteration order (agents ascending, then masks ascending), so a seed and
a parameter set pin down the profile exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import CapacityError, MalformedInputError
from .model import (
    AdditiveValuation,
    Profile,
    TableValuation,
    Valuation,
)
from .predicates import (
    is_set_monotonic,
    set_monotonic_witness,
    size_monotonic_witness,
    is_strict,
)

MAX_GEN_TABLE_GOODS = 16
RAW_VALUE_RANGE = 1000
# per-size step for size-dominant tables; noise stays strictly below it
SIZE_STEP = 1000


def _rng(seed: int) -> random.Random:
    if not isinstance(seed, int):
        raise MalformedInputError(f"seed must be an integer, got {seed!r}")
    return random.Random(seed)


def _check_table_m(m: int) -> None:
    if m < 1:
        raise MalformedInputError(f"need m >= 1, got {m}")
    if m > MAX_GEN_TABLE_GOODS:
        raise CapacityError(f"table generators are capped at m={MAX_GEN_TABLE_GOODS}")


def _lift_monotone(values: list[int], m: int, lo: int = 0, hi: int | None = None) -> None:
    """In place: v(S) = max(v(S), v(S - g)) for every S with lo < |S| <= hi.

    Masks are visited in increasing order, so every S - g is final before S;
    the result is the running maximum over the in-range part of the lattice.
    """
    hi = m if hi is None else hi
    for mask in range(1, 1 << m):
        s = mask.bit_count()
        if not lo < s <= hi:
            continue
        best = values[mask]
        rest = mask
        while rest:
            low = rest & -rest
            rest ^= low
            sub = mask ^ low
            if sub.bit_count() >= lo and values[sub] > best:
                best = values[sub]
        values[mask] = best


def _strict_encode(values: list[int], m: int) -> list[int]:
    """Integer table order-isomorphic to the (value, size, mask) tie-break."""
    span = 1 << m
    return [(values[s] * (m + 1) + s.bit_count()) * span + s for s in range(span)]


def _monotone_values(rng: random.Random, m: int) -> list[int]:
    values = [0] + [rng.randrange(1, RAW_VALUE_RANGE + 1) for _ in range(1, 1 << m)]
    _lift_monotone(values, m)
    return _strict_encode(values, m)


def _banded_values(rng: random.Random, m: int, k: int, l: int) -> list[int]:
    """Nonnegative, v(empty) = 0, monotone only between sizes k and l."""
    values = [0] + [rng.randrange(1, RAW_VALUE_RANGE + 1) for _ in range(1, 1 << m)]
    _lift_monotone(values, m, k, l)
    return values


def _sized_values(rng: random.Random, m: int) -> list[int]:
    return [
        0 if s == 0 else s.bit_count() * SIZE_STEP + rng.randrange(SIZE_STEP)
        for s in range(1 << m)
    ]


# -- public generators ---------------------------------------------------------------

def gen_additive(seed: int, n: int, m: int, weight_range: tuple[int, int] = (1, 100)) -> Profile:
    """Independent uniform integer weights per agent and good."""
    lo, hi = weight_range
    if lo < 0 or hi < lo:
        raise MalformedInputError(f"bad weight range {weight_range}")
    if n < 2 or m < 1:
        raise MalformedInputError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    rng = _rng(seed)
    profile = Profile(tuple(
        AdditiveValuation(tuple(rng.randrange(lo, hi + 1) for _ in range(m)))
        for _ in range(n)
    ))
    if m <= MAX_GEN_TABLE_GOODS:
        for v in profile:
            assert is_set_monotonic(v), "additive generator produced a non-monotone valuation"
    return profile


def gen_monotone_table(seed: int, n: int, m: int) -> Profile:
    """Random strict set-monotone tables.

    Per agent: a random value per bundle, lifted to the running maximum over
    subsets, then made strict with the (value, size, mask) tie-break encoded
    into one integer.
    """
    if n < 2:
        raise MalformedInputError(f"need n >= 2, got {n}")
    _check_table_m(m)
    rng = _rng(seed)
    profile = Profile(tuple(TableValuation(tuple(_monotone_values(rng, m))) for _ in range(n)))
    for v in profile:
        assert is_set_monotonic(v) and is_strict(v), "monotone generator broke its class"
    return profile


ClassSpec = Union[str, tuple]


def parse_class_spec(token: ClassSpec) -> tuple:
    """Normalise one agent's class demand.

    Accepted: ``"arbitrary"``, ``(k, l)`` / ``"k:l"`` / ``"size:k:l"`` for a
    ⟨k,l⟩-size-monotone agent, ``"set:k:l"`` for an agent that is only
    ⟨k,l⟩-set monotone.
    """
    if isinstance(token, tuple):
        if len(token) == 2:
            return ("size", int(token[0]), int(token[1]))
        if len(token) == 3 and token[0] in ("size", "set"):
            return (token[0], int(token[1]), int(token[2]))
        raise MalformedInputError(f"bad class spec {token!r}")
    text = str(token).strip().lower()
    if text in ("arbitrary", "arb", "a"):
        return ("arbitrary",)
    parts = text.split(":")
    try:
        if len(parts) == 2:
            return ("size", int(parts[0]), int(parts[1]))
        if len(parts) == 3 and parts[0] in ("size", "set"):
            return (parts[0], int(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise MalformedInputError(f"bad class spec {token!r}")


def gen_sized_profile(seed: int, m: int, specs: Sequence[ClassSpec]) -> Profile:
    """One valuation per class demand.

    Size-monotone demands get v(S) = |S|*STEP + noise with noise < STEP, which
    meets every ⟨k,l⟩ size range at once.  Arbitrary agents get a strict
    monotone table; ``set:k:l`` agents a table monotone only inside that band.
    """
    _check_table_m(m)
    classes = [parse_class_spec(s) for s in specs]
    if len(classes) < 2:
        raise MalformedInputError("need at least two agents")
    rng = _rng(seed)
    vals: list[Valuation] = []
    for cls in classes:
        if cls[0] == "arbitrary":
            vals.append(TableValuation(tuple(_monotone_values(rng, m))))
        elif cls[0] == "set":
            vals.append(TableValuation(tuple(_banded_values(rng, m, cls[1], cls[2]))))
        else:
            vals.append(TableValuation(tuple(_sized_values(rng, m))))
    profile = Profile(tuple(vals))
    for v, cls in zip(profile, classes):
        if cls[0] == "size":
            assert size_monotonic_witness(v, cls[1], cls[2]) is None, "sized agent broke its range"
            assert is_set_monotonic(v)
        elif cls[0] == "set":
            assert set_monotonic_witness(v, cls[1], cls[2]) is None, "banded agent broke its range"
        else:
            assert is_set_monotonic(v) and is_strict(v)
    return profile


# -- hand-built counterexamples ------------------------------------------------------------

# goods a, b, c, d are indices 0, 1, 2, 3
A, B, C, D = 1, 2, 4, 8


def _fixture_a_values() -> list[int]:
    # ⟨1,2⟩ and ⟨2,3⟩ size monotone; v(ab) > v(cd) > v(bc) > v(ad) and the
    # remaining pair {ac, bd} kept above {bc, ad} so that {bc, ad} is the
    # partition of E with the smallest larger half.
    table = {
        0: 0,
        A: 4, B: 3, C: 2, D: 1,
        A | B: 30, C | D: 29, A | C: 28, B | D: 27, B | C: 26, A | D: 25,
        A | B | C: 40, A | B | D: 39, A | C | D: 38, B | C | D: 37,
        A | B | C | D: 50,
    }
    return [table[mask] for mask in range(16)]


FIXTURE_B_WEIGHTS = (10, 3, 2, 1)


@dataclass(frozen=True)
class Fixture:
    name: str
    valuation: Valuation
    expected: dict = field(default_factory=dict)


def counterexample_fixtures() -> dict[str, Fixture]:
    """The size-monotone-but-not-MMS table and the additive-but-not-size-monotone one."""
    a = TableValuation(tuple(_fixture_a_values()))
    b = AdditiveValuation(FIXTURE_B_WEIGHTS)
    expected_a = {"mms_feasible": False, "size_1_2": True, "size_2_3": True, "set_monotonic": True}
    expected_b = {"mms_feasible": True, "size_1_2": False, "size_2_3": False, "set_monotonic": True}
    return {
        "mms-violation": Fixture("mms-violation", a, expected_a),
        "additive-not-size-monotonic": Fixture("additive-not-size-monotonic", b, expected_b),
        "additive-not-size-monotonic-table": Fixture(
            "additive-not-size-monotonic-table", b.to_table(), expected_b
        ),
    }


def fixture_profile(name: str, n: int = 2) -> Profile:
    """A profile of ``n`` agents that all hold the named fixture valuation."""
    fixtures = counterexample_fixtures()
    if name not in fixtures:
        raise MalformedInputError(f"unknown fixture {name!r}; choose from {sorted(fixtures)}")
    return Profile((fixtures[name].valuation,) * n)

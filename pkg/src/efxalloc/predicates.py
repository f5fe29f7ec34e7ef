"""Decision procedures for the definitional properties and theorem classes.

All comparisons go through ``Valuation.key`` so a strictified oracle is
judged by its strict order and a plain oracle by its exact values.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Optional

from .errors import CapacityError, MalformedInputError, PreconditionError
from .model import (
    MAX_TABLE_GOODS,
    Allocation,
    Bundle,
    EfxReport,
    Profile,
    RoleAssignment,
    Valuation,
    Violation,
    check_bundle,
    full,
    members,
    table_keys,
)

MAX_MMS_GOODS = 14

Witness = Optional[tuple[Bundle, Bundle]]


# -- EFX ----------------------------------------------------------------------

def efx_relation(v: Valuation, x: Bundle, y: Bundle) -> bool:
    """True iff ``x`` is envy-free from ``y`` up to any one good under ``v``.

    Vacuously true when ``y`` is empty.
    """
    check_bundle(x, v.m)
    check_bundle(y, v.m)
    own = v.key(x)
    return all(own >= v.key(y & ~(1 << g)) for g in members(y))


def check_efx(profile: Profile, alloc: Allocation) -> EfxReport:
    """Every (envier, envied, removed good) triple that breaks EFX."""
    alloc.validate(profile.m, profile.n)
    found = []
    for i, v in enumerate(profile):
        own = v.key(alloc[i])
        for j, other in enumerate(alloc.bundles):
            if i == j:
                continue
            for g in members(other):
                if own < v.key(other & ~(1 << g)):
                    found.append(Violation(i, j, g))
    return EfxReport(tuple(found))


def is_efx(profile: Profile, alloc: Allocation) -> bool:
    return check_efx(profile, alloc).is_efx


# -- monotonicity classes --------------------------------------------------------

def _check_range(v: Valuation, k: int, l: int) -> None:
    if not (1 <= k < l <= v.m):
        raise MalformedInputError(f"range <{k},{l}> is outside 1 <= k < l <= {v.m}")


def _layers(v: Valuation):
    if v.m > MAX_TABLE_GOODS:
        raise CapacityError(f"class checks enumerate 2^m bundles; capped at m={MAX_TABLE_GOODS}")
    keys = table_keys(v)
    by_size = [[] for _ in range(v.m + 1)]
    for mask in range(1 << v.m):
        by_size[mask.bit_count()].append(mask)
    return keys, by_size


def set_monotonic_witness(v: Valuation, k: int, l: int) -> Witness:
    """First nested pair X ⊂ Y with k <= |X| < |Y| <= l and v(X) > v(Y).

    ``k = 0`` is allowed here and pulls the empty bundle into the range.
    Only covering pairs (|Y| = |X| + 1) need checking: any longer chain inside
    the range is made of covering steps that also lie inside the range.
    """
    l = min(l, v.m)
    if k >= l:
        return None
    keys, by_size = _layers(v)
    full_mask = full(v.m)
    for s in range(max(k, 0), l):
        for x in by_size[s]:
            kx = keys[x]
            rest = full_mask & ~x
            while rest:
                low = rest & -rest
                rest ^= low
                if kx > keys[x | low]:
                    return (x, x | low)
    return None


def size_monotonic_witness(v: Valuation, k: int, l: int) -> Witness:
    """A pair |X| < |Y| inside [k, l] with v(X) > v(Y), or None.

    Checking adjacent layers suffices: max(layer s) <= min(layer s+1) for all
    consecutive s chains into every s < t.
    """
    l = min(l, v.m)
    if k >= l:
        return None
    keys, by_size = _layers(v)
    for s in range(max(k, 0), l):
        hi = max(by_size[s], key=keys.__getitem__)
        lo = min(by_size[s + 1], key=keys.__getitem__)
        if keys[hi] > keys[lo]:
            return (hi, lo)
    return None


def is_set_monotonic_range(v: Valuation, k: int, l: int, *, witness: bool = False):
    _check_range(v, k, l)
    w = set_monotonic_witness(v, k, l)
    return (w is None, w) if witness else w is None


def is_size_monotonic_range(v: Valuation, k: int, l: int, *, witness: bool = False):
    _check_range(v, k, l)
    w = size_monotonic_witness(v, k, l)
    return (w is None, w) if witness else w is None


def is_set_monotonic(v: Valuation) -> bool:
    """Monotone over the whole subset lattice, empty bundle included."""
    return set_monotonic_witness(v, 0, v.m) is None


def is_strict(v: Valuation) -> bool:
    keys = table_keys(v)
    return len(set(keys)) == len(keys)


# -- MMS feasibility ----------------------------------------------------------------

@dataclass(frozen=True)
class MmsWitness:
    """A subset and two of its 2-partitions breaking MMS feasibility.

    ``low`` has the smaller max side, ``high`` the larger min side, and
    max(low) < min(high).
    """

    subset: Bundle
    low: tuple[Bundle, Bundle]
    high: tuple[Bundle, Bundle]


def is_mms_feasible(v: Valuation, *, witness: bool = False):
    """Brute-force MMS-feasibility check, O(3^m).

    For every X the smallest max-side over its 2-partitions must be at least
    the largest min-side.
    """
    if v.m > MAX_MMS_GOODS:
        raise CapacityError(f"MMS brute force is capped at m={MAX_MMS_GOODS}")
    keys = table_keys(v)
    found = None
    for x in range(1 << v.m):
        best_max = best_min = None
        sub = x
        while True:
            other = x & ~sub
            if sub <= other:  # each unordered partition once
                a, b = keys[sub], keys[other]
                hi, lo = (a, b) if a >= b else (b, a)
                if best_max is None or hi < best_max[0]:
                    best_max = (hi, (sub, other))
                if best_min is None or lo > best_min[0]:
                    best_min = (lo, (sub, other))
            if sub == 0:
                break
            sub = (sub - 1) & x
        if best_max[0] < best_min[0]:
            found = MmsWitness(x, best_max[1], best_min[1])
            break
    ok = found is None
    return (ok, found) if witness else ok


# -- theorem classifier ---------------------------------------------------------------

THEOREMS = (
    "ThmN1-i", "ThmN1-ii",
    "ThmN2-i", "ThmN2-ii",
    "Relax1-i", "Relax1-ii", "Relax1-iii",
    "Relax2-i", "Relax2-ii",
)

# A class is a tuple of (kind, k, l) requirements; kind is "size" or "set".
# "setfull" means monotone over the whole lattice (the base profile hypothesis).


def _parameters(theorem: str, n: int, m: int) -> tuple[int, int]:
    if theorem.startswith(("ThmN1", "Relax1")):
        return divmod(m, n)
    return divmod(m - 1, n - 1)


def _pattern(theorem: str, n: int, ell: int, r: int):
    """(arbitrary-role classes, weak class, strong class, #strong) or None.

    Roles: the unconstrained agents come first, then n_weak agents of the
    weak class, then n_strong agents of the strong class.
    """
    full_set = (("setfull", 0, 0),)
    if theorem == "ThmN1-i":
        if r > 1:
            return None
        weak = full_set + (("size", ell - 1, ell),)
        return [full_set], weak, weak, r
    if theorem == "ThmN1-ii":
        if not 1 < r <= n - 1:
            return None
        return ([full_set], full_set + (("size", ell - 1, ell),),
                full_set + (("size", ell, ell + 1),), r)
    if theorem == "ThmN2-i":
        if r > 1:
            return None
        weak = full_set + (("size", 1, ell),)
        return [full_set, full_set], weak, weak, r
    if theorem == "ThmN2-ii":
        if not 1 < r <= n - 2:
            return None
        return ([full_set, full_set], full_set + (("size", 1, ell),),
                full_set + (("size", 1, ell + 1),), r)
    if theorem == "Relax1-i":
        if r > 1:
            return None
        weak = (("size", ell - 1, ell),)
        strong = (("size", ell - 1, ell), ("set", ell, ell + 1))
        return [(("set", ell - 1, ell),)], weak, strong, r
    if theorem == "Relax1-ii":
        if not 1 < r <= n - 2:
            return None
        weak = (("size", ell - 1, ell),)
        strong = (("size", ell, ell + 1), ("set", ell - 1, ell))
        return [(("set", ell - 1, ell),)], weak, strong, r
    if theorem == "Relax1-iii":
        if r != n - 1:
            return None
        strong = (("size", ell, ell + 1), ("set", ell - 1, ell))
        return [()], strong, strong, r
    if theorem == "Relax2-i":
        if r > 1:
            return None
        weak = (("size", 1, ell),)
        strong = (("size", 1, ell), ("set", ell, ell + 1))
        arb = (("set", 1, ell),)
        return [arb, arb], weak, strong, r
    if theorem == "Relax2-ii":
        if not 1 < r <= n - 2:
            return None
        arb = (("set", 1, ell),)
        return [arb, arb], (("size", 1, ell),), (("size", 1, ell + 1),), r
    raise MalformedInputError(f"unknown theorem pattern {theorem!r}")


def satisfies(v: Valuation, cls) -> bool:
    """Whether ``v`` meets every (kind, k, l) requirement of a class."""
    for kind, k, l in cls:
        if kind == "setfull":
            ok = is_set_monotonic(v)
        elif kind == "set":
            ok = set_monotonic_witness(v, k, l) is None
        else:
            ok = size_monotonic_witness(v, k, l) is None
        if not ok:
            return False
    return True


def describe_class(cls) -> str:
    parts = []
    for kind, k, l in cls:
        parts.append("set-monotonic" if kind == "setfull" else f"<{k},{l}>-{kind}")
    return " & ".join(parts) or "unconstrained"


def classify_profile(profile: Profile, theorem: str) -> Optional[RoleAssignment]:
    """Find a role assignment under which ``profile`` meets ``theorem``.

    Placements of the unconstrained agent(s) are tried in lexicographic agent
    order; the first one whose remaining agents split into the weak and strong
    classes wins.  Among agents fitting both classes, the lowest-indexed ones
    take the weak slots.  Returns None when no assignment exists.
    """
    n, m = profile.n, profile.m
    if m <= n:
        raise PreconditionError(f"m={m} <= n={n}: use the trivial allocator")
    ell, r = _parameters(theorem, n, m)
    pat = _pattern(theorem, n, ell, r)
    if pat is None:
        return None
    arb_classes, weak, strong, n_strong = pat
    n_arb = len(arb_classes)
    n_weak = n - n_arb - n_strong

    cache: dict = {}

    def fits(agent, cls):
        key = (agent, cls)
        if key not in cache:
            cache[key] = satisfies(profile[agent], cls)
        return cache[key]

    for placed in permutations(range(n), n_arb):
        if not all(fits(a, c) for a, c in zip(placed, arb_classes)):
            continue
        rest = [a for a in range(n) if a not in placed]
        only_weak, only_strong, both = [], [], []
        for a in rest:
            w, s = fits(a, weak), fits(a, strong)
            if w and s:
                both.append(a)
            elif w:
                only_weak.append(a)
            elif s:
                only_strong.append(a)
            else:
                break
        else:
            if len(only_weak) > n_weak or len(only_strong) > n_strong:
                continue
            take = n_weak - len(only_weak)
            weak_agents = sorted(only_weak + both[:take])
            strong_agents = sorted(only_strong + both[take:])
            classes = (
                tuple(describe_class(c) for c in arb_classes)
                + (describe_class(weak),) * len(weak_agents)
                + (describe_class(strong),) * len(strong_agents)
            )
            return RoleAssignment(
                theorem, tuple(placed) + tuple(weak_agents) + tuple(strong_agents),
                ell, r, classes,
            )
    return None


def role_requirements(profile: Profile, roles: RoleAssignment) -> list:
    """Per-position class requirements implied by ``roles`` (for re-validation)."""
    pat = _pattern(roles.pattern, profile.n, roles.ell, roles.r)
    if pat is None:
        raise PreconditionError(f"{roles.pattern} does not apply at r={roles.r}")
    arb_classes, weak, strong, n_strong = pat
    n_weak = profile.n - len(arb_classes) - n_strong
    return list(arb_classes) + [weak] * n_weak + [strong] * n_strong


def validate_roles(profile: Profile, roles: RoleAssignment) -> bool:
    reqs = role_requirements(profile, roles)
    return all(satisfies(profile[a], c) for a, c in zip(roles.order, reqs))

"""Exhaustive ground truth: every good-to-agent assignment, every k-subset."""

from __future__ import annotations

import os
from itertools import combinations, product
from typing import Iterator, Optional

from .errors import CapacityError, InfeasibleError, MalformedInputError
from .model import Allocation, Bundle, Profile, Valuation, members, rank_table

DEFAULT_BUDGET = 10**7


def default_budget() -> int:
    raw = os.environ.get("EFX_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError as exc:
        raise MalformedInputError(f"EFX_BUDGET must be an integer, got {raw!r}") from exc


def _check_budget(m: int, n: int, budget: Optional[int]) -> None:
    budget = default_budget() if budget is None else budget
    if n**m > budget:
        raise CapacityError(f"{n}^{m} = {n**m} allocations exceed the budget of {budget}")


def _assignments(m: int, n: int) -> Iterator[tuple[int, ...]]:
    # good 0 is the most significant digit
    return product(range(n), repeat=m)


def _to_bundles(assignment, n: int) -> list[Bundle]:
    bundles = [0] * n
    for g, agent in enumerate(assignment):
        bundles[agent] |= 1 << g
    return bundles


def enumerate_allocations(m: int, n: int, *, budget: Optional[int] = None) -> Iterator[Allocation]:
    """All n^m allocations, in lexicographic order of the assignment vector."""
    if m < 1 or n < 1:
        raise MalformedInputError(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    _check_budget(m, n, budget)
    for assignment in _assignments(m, n):
        yield Allocation(tuple(_to_bundles(assignment, n)))


def _efx_fast(ranks, bundles) -> bool:
    for i, table in enumerate(ranks):
        own = table[bundles[i]]
        for j, other in enumerate(bundles):
            if i == j or not other:
                continue
            rest = other
            while rest:
                low = rest & -rest
                rest ^= low
                if table[other ^ low] > own:
                    return False
    return True


def brute_force_efx(profile: Profile, mode: str = "first", *, budget: Optional[int] = None):
    """Filter every allocation through the EFX test.

    ``mode`` is ``first`` (lowest assignment or None), ``all`` (list) or
    ``count`` (int).  Bundles are compared through integer rank tables, which
    are order-isomorphic to the valuations.
    """
    if mode not in ("first", "all", "count"):
        raise MalformedInputError(f"unknown mode {mode!r}")
    n, m = profile.n, profile.m
    _check_budget(m, n, budget)
    ranks = [rank_table(v) for v in profile]
    hits = []
    count = 0
    for assignment in _assignments(m, n):
        bundles = _to_bundles(assignment, n)
        if _efx_fast(ranks, bundles):
            if mode == "first":
                return Allocation(tuple(bundles))
            count += 1
            if mode == "all":
                hits.append(Allocation(tuple(bundles)))
    if mode == "first":
        return None
    return hits if mode == "all" else count


def brute_force_best_bundle(v: Valuation, pool: Bundle, k: int) -> Bundle:
    """Enumerate every k-subset of ``pool``; highest (key, mask) wins."""
    goods = members(pool)
    if k < 0 or k > len(goods):
        raise InfeasibleError(f"cannot pick {k} goods from a pool of {len(goods)}")
    best = None
    for combo in combinations(goods, k):
        s = 0
        for g in combo:
            s |= 1 << g
        cand = (v.key(s), s)
        if best is None or cand > best:
            best = cand
    return best[1]

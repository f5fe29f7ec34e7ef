"""Seeded instance suites shared by ``efx bench`` and the acceptance tests.

A trial seed determines everything: the agent count, the good count, which
agents are unconstrained (their positions are shuffled so the classifier has
to find them) and every valuation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .generators import gen_sized_profile
from .model import Profile

SUITES = ("thm-n1", "thm-n2", "oracle-cross")


@dataclass(frozen=True)
class SuiteInstance:
    seed: int
    suite: str
    profile: Profile
    arbitrary: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def m(self) -> int:
        return self.profile.m


def _shape(rng: random.Random, min_n: int, max_n: int, max_m: int) -> tuple[int, int]:
    n = rng.randint(min_n, max_n)
    m = rng.randint(n + 1, max_m)
    return n, m


def _build(seed: int, suite: str, n: int, m: int, n_arbitrary: int, rng: random.Random):
    specs = ["arbitrary"] * n_arbitrary + [f"1:{m}"] * (n - n_arbitrary)
    rng.shuffle(specs)
    profile = gen_sized_profile(seed, m, specs)
    arbitrary = tuple(i for i, s in enumerate(specs) if s == "arbitrary")
    return SuiteInstance(seed, suite, profile, arbitrary)


def thm_n1_instance(seed: int, max_n: int = 5, max_m: int = 10) -> SuiteInstance:
    """One unconstrained agent among size-monotone ones; 2 <= n <= max_n < m <= max_m."""
    rng = random.Random(seed)
    n, m = _shape(rng, 2, max_n, max_m)
    return _build(seed, "thm-n1", n, m, 1, rng)


def thm_n2_instance(seed: int, max_n: int = 5, max_m: int = 9) -> SuiteInstance:
    """Two unconstrained agents among size-monotone ones."""
    rng = random.Random(seed)
    n, m = _shape(rng, 2, max_n, max_m)
    return _build(seed, "thm-n2", n, m, 2, rng)


def two_agent_instance(seed: int, ms: tuple[int, ...] = (4, 5, 6)) -> SuiteInstance:
    """Two unconstrained strict monotone agents, m drawn from ``ms``."""
    rng = random.Random(seed)
    m = rng.choice(ms)
    return _build(seed, "n2", 2, m, 2, rng)


def suite_instance(suite: str, seed: int, max_n: int = 5, max_m: int = 9) -> SuiteInstance:
    if suite == "thm-n1":
        return thm_n1_instance(seed, max_n, max_m)
    if suite == "thm-n2":
        return thm_n2_instance(seed, max_n, max_m)
    if suite == "oracle-cross":
        if random.Random(seed).random() < 0.5:
            return thm_n1_instance(seed, max_n, max_m)
        return thm_n2_instance(seed, max_n, max_m)
    raise ValueError(f"unknown suite {suite!r}")

"""Constructive EFX allocators.

* :func:`allocate_trivial` -- at most one good per agent (m <= n).
* :func:`allocate_thm_n1` -- one unconstrained agent, the rest size-monotone
  on a narrow band: sequential greedy picks of the best size-``ell`` bundle.
* :func:`allocate_thm_n2` -- two unconstrained agents: start from a best
  singleton for agent 1 and repeatedly grow agent 1's bundle by one good
  until nobody envies anybody up to any good.

Every allocator strictifies its input first and certifies its result with
:func:`~efxalloc.predicates.check_efx` before returning.  A failed
certification is a :class:`~efxalloc.errors.ProofMismatchError`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import InfeasibleError, PreconditionError, ProofMismatchError
from .model import (
    AdditiveValuation,
    Allocation,
    Branch,
    Bundle,
    IterRecord,
    IterTrace,
    Profile,
    RoleAssignment,
    StrictifiedValuation,
    Valuation,
    full,
    members,
    min_mask_subset,
    subsets_of_size,
)
from .predicates import THEOREMS, check_efx, classify_profile
from .strictify import strictify_profile

logger = logging.getLogger(__name__)


# -- constrained argmax ------------------------------------------------------------

def _additive_weights(v: Valuation):
    if isinstance(v, AdditiveValuation):
        return v.weights
    if isinstance(v, StrictifiedValuation) and isinstance(v.base, AdditiveValuation):
        return v.base.weights
    return None


def best_bundle(v: Valuation, pool: Bundle, k: int) -> Bundle:
    """The best ``k``-subset of ``pool`` under ``v``.

    Value ties are broken toward the larger mask, which is exactly the order a
    strictified ``v`` induces on same-size bundles, so the answer is the
    unique argmax of ``strictify(v)``.  Additive oracles take the top-k goods
    by (weight, index) instead of enumerating.
    """
    goods = members(pool)
    if k < 0 or k > len(goods):
        raise InfeasibleError(f"cannot pick {k} goods from a pool of {len(goods)}")
    weights = _additive_weights(v)
    if weights is not None:
        top = sorted(goods, key=lambda g: (weights[g], g), reverse=True)[:k]
        return sum(1 << g for g in top)
    best = None
    best_key = None
    for s in subsets_of_size(pool, k):
        key = (v.key(s), s)
        if best_key is None or key > best_key:
            best, best_key = s, key
    return best


def greedy_fill(
    profile: Profile,
    order: Sequence[int],
    sizes: Sequence[int],
    pool: Bundle,
    pickers: Sequence[int] | set[int],
) -> list[Bundle]:
    """Hand out ``pool`` position by position.

    Position ``p`` (agent ``order[p]``) receives ``sizes[p]`` goods from what
    is left: its own best bundle when ``p`` is a picker, otherwise the
    minimum-mask subset of that size.
    """
    if sum(sizes) != pool.bit_count():
        raise ProofMismatchError(
            "size accounting", f"sizes {list(sizes)} do not sum to |pool|={pool.bit_count()}"
        )
    if len(order) != len(sizes):
        raise ProofMismatchError("size accounting", "order and sizes differ in length")
    pickers = set(pickers)
    remaining = pool
    out = []
    for p, (agent, k) in enumerate(zip(order, sizes)):
        if p in pickers:
            b = best_bundle(profile[agent], remaining, k)
        else:
            b = min_mask_subset(remaining, k)
        out.append(b)
        remaining &= ~b
    return out


def _assemble(n: int, order: Sequence[int], bundles: Sequence[Bundle]) -> Allocation:
    by_agent = [0] * n
    for agent, b in zip(order, bundles):
        by_agent[agent] = b
    return Allocation(tuple(by_agent))


def _certify(profile: Profile, alloc: Allocation, step: str) -> None:
    alloc.validate(profile.m, profile.n)
    report = check_efx(profile, alloc)
    if not report.is_efx:
        raise ProofMismatchError(step, f"EFX violations {list(report.violations)[:5]}")


# -- m <= n ----------------------------------------------------------------------

def allocate_trivial(profile: Profile) -> Allocation:
    """Good ``i`` to agent ``i``; agents past the last good get nothing."""
    n, m = profile.n, profile.m
    if m > n:
        raise PreconditionError(f"trivial allocation needs m <= n, got m={m}, n={n}")
    return Allocation(tuple((1 << i) if i < m else 0 for i in range(n)))


def singletons_beat_empty(profile: Profile) -> bool:
    """v_i({x}) >= v_i(empty) for every agent and good: enough for singleton bundles."""
    return all(v.key(1 << g) >= v.key(0) for v in profile for g in range(profile.m))


# -- one unconstrained agent --------------------------------------------------------

def _require_roles(profile: Profile, roles: Optional[RoleAssignment], families) -> RoleAssignment:
    n, m = profile.n, profile.m
    if m <= n:
        raise PreconditionError(f"m={m} <= n={n}: use the trivial allocator")
    if roles is None:
        raise PreconditionError("no applicable role assignment")
    if not roles.pattern.startswith(families):
        raise PreconditionError(f"role pattern {roles.pattern} does not fit this allocator")
    if len(roles.order) != n:
        raise PreconditionError(f"role order covers {len(roles.order)} agents, profile has {n}")
    return roles


def allocate_thm_n1(profile: Profile, roles: Optional[RoleAssignment]) -> Allocation:
    """Sequential greedy allocation for one unconstrained agent.

    With ``ell, r = divmod(m, n)``: the first ``n - r`` role positions pick
    their best size-``ell`` bundle from what is left, in order; the last
    ``r`` positions take minimum-mask bundles of size ``ell + 1``.
    """
    roles = _require_roles(profile, roles, ("ThmN1", "Relax1"))
    n, m = profile.n, profile.m
    ell, r = divmod(m, n)
    if (ell, r) != (roles.ell, roles.r):
        raise PreconditionError(f"roles carry ell={roles.ell}, r={roles.r}; expected {ell}, {r}")
    strict = strictify_profile(profile)
    sizes = [ell] * (n - r) + [ell + 1] * r
    bundles = greedy_fill(strict, roles.order, sizes, full(m), range(n - r))
    alloc = _assemble(n, roles.order, bundles)
    _certify(strict, alloc, "greedy allocation")
    return alloc


# -- two unconstrained agents --------------------------------------------------------

@dataclass
class _State:
    """Bundles in role order plus the derived quantities the loop needs."""

    bundles: list[Bundle]

    @property
    def max_size(self) -> int:
        return max(b.bit_count() for b in self.bundles)


def _tail_sizes(count: int, goods: int, small: int) -> list[int]:
    """Split ``goods`` among ``count`` agents into sizes ``small``/``small + 1``.

    The larger bundles go last.
    """
    big = goods - count * small
    if not 0 <= big <= count:
        raise ProofMismatchError(
            "size accounting",
            f"{goods} goods cannot be split into {count} bundles of size {small} or {small + 1}",
        )
    return [small] * (count - big) + [small + 1] * big


def allocate_thm_n2(profile: Profile, roles: Optional[RoleAssignment]) -> tuple[Allocation, IterTrace]:
    """Iterative envy repair for two unconstrained agents.

    Role positions 0 and 1 are the unconstrained agents ("agent 1" and
    "agent 2"); positions 2.. are size-monotone, strongest class last.

    Start: agent 1 takes its best single good ``W1``; agent 2 its best
    ``ell``-bundle of the rest; the size-monotone agents follow greedily
    with ``ell``-bundles and the last ``r`` of them take ``ell + 1`` goods.
    Only agent 1 can be envious here.

    Step ``c`` (``c = 2, 3, ...``), with ``M`` the largest bundle size of the
    previous allocation and ``Wprev`` agent 1's bundle:

    * ``W`` = agent 1's best ``c``-bundle ``S`` whose complement still holds
      an ``(M-1)``-bundle agent 1 strictly prefers to ``Wprev``;
    * ``Y`` = agent 1's best ``(M-1)``-bundle outside ``W``;
    * candidate: agent 2 takes whichever of ``W``, ``Y`` it prefers, agent 1
      the other, the rest is shared out with sizes ``M-1``/``M``;
    * if the candidate is not EFX, the fallback keeps ``W`` for agent 1 and
      lets agent 2 pick first from the rest.  Only agent 1 may envy in the
      fallback; if it does, go to step ``c + 1``.

    Returns the EFX allocation and the per-step trace.
    """
    roles = _require_roles(profile, roles, ("ThmN2", "Relax2"))
    n, m = profile.n, profile.m
    ell, r = divmod(m - 1, n - 1)
    if (ell, r) != (roles.ell, roles.r):
        raise PreconditionError(f"roles carry ell={roles.ell}, r={roles.r}; expected {ell}, {r}")
    strict = strictify_profile(profile)
    order = roles.order
    v1 = strict[order[0]]
    v2 = strict[order[1]]
    everything = full(m)
    records: list[IterRecord] = []

    def report(bundles):
        return check_efx(strict, _assemble(n, order, bundles))

    def agent1_only(rep, step):
        stray = {order.index(v.envier) for v in rep.violations} - {0}
        if stray:
            raise ProofMismatchError(step, f"role positions {sorted(stray)} envy; only agent 1 may")

    # initial allocation
    w1 = best_bundle(v1, everything, 1)
    rest_sizes = [ell] * (n - 1 - r) + [ell + 1] * r
    rest = greedy_fill(strict, order[1:], rest_sizes, everything & ~w1, range(n - 1 - r))
    bundles = [w1] + rest
    rep = report(bundles)
    state = _State(bundles)
    if rep.is_efx:
        records.append(IterRecord(1, w1, rest[0], state.max_size, Branch.INITIAL_EFX,
                                  agent1_bundle=w1, allocation=_assemble(n, order, bundles).bundles))
        return _finish(strict, n, order, bundles, records)
    agent1_only(rep, "initial allocation")
    records.append(IterRecord(1, w1, rest[0], state.max_size, Branch.CONTINUE,
                              agent1_bundle=w1, allocation=_assemble(n, order, bundles).bundles))

    c = 1
    while True:
        c += 1
        if c > m:
            raise ProofMismatchError("loop bound", f"step {c} exceeds m={m}")
        prev_w = state.bundles[0]
        big = state.max_size
        target = big - 1
        if c > target:
            # reaching size c is only possible when the previous max was c + 1
            raise ProofMismatchError(
                f"step {c}: final-iteration law", f"previous max size is {big}, expected {c + 1}"
            )
        prev_key = v1.key(prev_w)

        # W: best c-bundle whose complement still holds a target-size bundle beating prev_w
        w = None
        w_key = None
        for s in subsets_of_size(everything, c):
            k = v1.key(s)
            if w_key is not None and k < w_key:
                continue
            outside = everything & ~s
            if outside.bit_count() < target:
                continue
            if v1.key(best_bundle(v1, outside, target)) > prev_key:
                w, w_key = s, k
        if w is None:
            raise ProofMismatchError(f"step {c}: anchor family", "no admissible c-bundle (G empty)")
        y = best_bundle(v1, everything & ~w, target)
        if not v1.key(y) > prev_key:
            raise ProofMismatchError(f"step {c}: second anchor", "no bundle beats the previous one (H empty)")

        # candidate: agent 2 chooses between W and Y
        agent2_takes_w = v2.key(w) > v2.key(y)
        pair = [y, w] if agent2_takes_w else [w, y]
        pool = everything & ~(w | y)
        sizes = _tail_sizes(n - 2, pool.bit_count(), target)
        tail = greedy_fill(strict, order[2:], sizes, pool, range(sizes.count(target)))
        candidate = pair + tail
        rep = report(candidate)
        if rep.is_efx:
            records.append(IterRecord(
                c, w, y, _State(candidate).max_size, Branch.CANDIDATE_EFX,
                agent1_bundle=candidate[0], allocation=_assemble(n, order, candidate).bundles,
            ))
            return _finish(strict, n, order, candidate, records)
        case = Branch.CASE_A if agent2_takes_w else Branch.CASE_B

        # fallback: agent 1 keeps W, agent 2 picks first among the rest
        pool = everything & ~w
        sizes = _tail_sizes(n - 1, pool.bit_count(), target)
        rest = greedy_fill(strict, order[1:], sizes, pool, range(sizes.count(target)))
        bar = [w] + rest
        rep = report(bar)
        state = _State(bar)
        if rep.is_efx:
            records.append(IterRecord(c, w, y, state.max_size, Branch.BAR_EFX, case=case,
                                      agent1_bundle=w, allocation=_assemble(n, order, bar).bundles))
            return _finish(strict, n, order, bar, records)
        agent1_only(rep, f"step {c}: fallback allocation")
        if c == target:
            # any envied remainder would be a better admissible c-bundle than W
            raise ProofMismatchError(
                f"step {c}: termination",
                f"agent 1 still envies with |W|={c} and previous max size {big}",
            )
        records.append(IterRecord(c, w, y, state.max_size, Branch.CONTINUE, case=case,
                                  agent1_bundle=w, allocation=_assemble(n, order, bar).bundles))


def _finish(strict, n, order, bundles, records):
    alloc = _assemble(n, order, bundles)
    _certify(strict, alloc, "final allocation")
    return alloc, IterTrace(tuple(records))


# -- dispatch ----------------------------------------------------------------------

AUTO_ORDER = THEOREMS


@dataclass(frozen=True)
class Solution:
    allocation: Optional[Allocation]
    method: str
    trace: Optional[IterTrace] = None
    roles: Optional[RoleAssignment] = None


def auto_allocate(profile: Profile, *, budget: Optional[int] = None) -> Solution:
    """Pick the strongest applicable construction, else search exhaustively.

    ``method`` is one of ``trivial``, ``thm-n1``, ``thm-n2``, ``brute-force``
    or ``none`` (exhaustive search found nothing).  With m <= n the singleton
    allocation is used whenever no agent prefers nothing to a single good.
    """
    from .oracle import brute_force_efx

    if profile.m <= profile.n:
        if singletons_beat_empty(profile):
            return Solution(allocate_trivial(profile), "trivial")
        theorems = ()
    else:
        theorems = AUTO_ORDER
    strict = strictify_profile(profile)
    for theorem in theorems:
        roles = classify_profile(strict, theorem)
        if roles is None:
            continue
        logger.debug("profile fits %s with order %s", theorem, roles.order)
        if roles.two_arbitrary:
            alloc, trace = allocate_thm_n2(profile, roles)
            return Solution(alloc, "thm-n2", trace, roles)
        return Solution(allocate_thm_n1(profile, roles), "thm-n1", None, roles)
    found = brute_force_efx(profile, "first", budget=budget)
    if found is None:
        return Solution(None, "none")
    return Solution(found, "brute-force")

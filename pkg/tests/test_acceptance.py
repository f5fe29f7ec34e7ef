"""The ten acceptance criteria, one test each.

Every test records a pass/fail line that the terminal summary prints.
"""

import random
import time
from itertools import product

import pytest

from efxalloc import (
    AdditiveValuation,
    Allocation,
    Profile,
    allocate_thm_n1,
    allocate_thm_n2,
    allocate_trivial,
    best_bundle,
    bundle,
    check_efx,
)
from efxalloc.generators import gen_monotone_table, gen_sized_profile, counterexample_fixtures
from efxalloc.io import format_allocation, format_instance, parse_allocation, parse_instance, trace_json
from efxalloc.oracle import brute_force_best_bundle, brute_force_efx
from efxalloc.predicates import (
    classify_profile,
    is_mms_feasible,
    is_set_monotonic_range,
    is_size_monotonic_range,
    is_strict,
)
from efxalloc.strictify import strictify, strictify_profile
from efxalloc.suites import thm_n1_instance, thm_n2_instance, two_agent_instance

from conftest import random_table, record_criterion, trace_problems

pytestmark = pytest.mark.acceptance

SUITE_SEEDS = range(500)
ORACLE_LIMIT = 10**6


def _roles(profile, theorems):
    strict = strictify_profile(profile)
    for theorem in theorems:
        roles = classify_profile(strict, theorem)
        if roles is not None:
            return roles
    return None


def run_n1(seed):
    inst = thm_n1_instance(seed)
    roles = _roles(inst.profile, ("ThmN1-i", "ThmN1-ii"))
    return inst, roles, allocate_thm_n1(inst.profile, roles), None


def run_n2(seed):
    inst = thm_n2_instance(seed)
    roles = _roles(inst.profile, ("ThmN2-i", "ThmN2-ii"))
    alloc, trace = allocate_thm_n2(inst.profile, roles)
    return inst, roles, alloc, trace


def output_bytes(alloc, trace):
    text = format_allocation(alloc)
    if trace is not None:
        text += trace_json(trace) + "\n"
    return text.encode()


def conclude(number, title, failures, detail=""):
    record_criterion(number, title, not failures, detail)
    assert not failures, failures[:5]


@pytest.fixture(scope="module")
def suite_runs():
    """First run of both suites, kept for the oracle and determinism checks."""
    return {}


def test_criterion_01_one_unconstrained_agent(suite_runs):
    failures = []
    patterns = set()
    start = time.perf_counter()
    runs = []
    for seed in SUITE_SEEDS:
        inst, roles, alloc, trace = run_n1(seed)
        runs.append((inst, roles, alloc, trace))
        p = inst.profile
        if not 2 <= p.n <= 5 or not p.n < p.m <= 10:
            failures.append(f"seed {seed}: shape n={p.n} m={p.m}")
        patterns.add(roles.pattern)
        if not check_efx(p, alloc).is_efx:
            failures.append(f"seed {seed}: violations")
        sizes = alloc.sizes()
        ell, r = divmod(p.m, p.n)
        if sizes.count(ell + 1) != r or sizes.count(ell) != p.n - r:
            failures.append(f"seed {seed}: sizes {sizes}")
    elapsed = time.perf_counter() - start
    suite_runs["n1"] = runs
    if elapsed >= 30:
        failures.append(f"took {elapsed:.1f}s")
    if patterns != {"ThmN1-i", "ThmN1-ii"}:
        failures.append(f"patterns covered: {sorted(patterns)}")
    conclude(1, "one-unconstrained-agent suite", failures,
             f"({len(SUITE_SEEDS) - len(failures)}/{len(SUITE_SEEDS)}, {elapsed:.1f}s)")


def test_criterion_02_two_unconstrained_agents(suite_runs):
    failures = []
    patterns = set()
    depths = []
    start = time.perf_counter()
    runs = []
    for seed in SUITE_SEEDS:
        inst, roles, alloc, trace = run_n2(seed)
        runs.append((inst, roles, alloc, trace))
        p = inst.profile
        if not 2 <= p.n <= 5 or not p.n < p.m <= 9:
            failures.append(f"seed {seed}: shape n={p.n} m={p.m}")
        patterns.add(roles.pattern)
        depths.append(trace.depth)
        if not check_efx(p, alloc).is_efx:
            failures.append(f"seed {seed}: violations")
        failures += [f"seed {seed}: {msg}" for msg in trace_problems(p, roles, trace, alloc)]
    elapsed = time.perf_counter() - start
    suite_runs["n2"] = runs
    if elapsed >= 120:
        failures.append(f"took {elapsed:.1f}s")
    if patterns != {"ThmN2-i", "ThmN2-ii"}:
        failures.append(f"patterns covered: {sorted(patterns)}")
    conclude(2, "two-unconstrained-agents suite", failures,
             f"(max depth {max(depths)}, {elapsed:.1f}s)")


def test_criterion_03_two_agent_completeness():
    failures = []
    start = time.perf_counter()
    for seed in range(200):
        inst = two_agent_instance(seed)
        p = inst.profile
        for v in p:
            if not is_strict(v) or not is_set_monotonic_range(v, 1, p.m):
                failures.append(f"seed {seed}: generator class")
        roles = _roles(p, ("ThmN2-i", "ThmN2-ii"))
        alloc, _ = allocate_thm_n2(p, roles)
        if alloc not in brute_force_efx(p, "all"):
            failures.append(f"seed {seed}: output not among exhaustive EFX allocations")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        failures.append(f"took {elapsed:.1f}s")
    conclude(3, "two-agent completeness probe", failures, f"(200 instances, {elapsed:.1f}s)")


def test_criterion_04_oracle_cross_check(suite_runs, tmp_path):
    failures = []
    checked = 0
    runs = suite_runs.get("n1", []) + suite_runs.get("n2", [])
    if len(runs) != 2 * len(SUITE_SEEDS):
        runs = [run_n1(s) for s in SUITE_SEEDS] + [run_n2(s) for s in SUITE_SEEDS]
    inst_file = tmp_path / "instance.txt"
    alloc_file = tmp_path / "allocation.txt"
    for inst, _, alloc, _ in runs:
        p = inst.profile
        if p.n ** p.m > ORACLE_LIMIT:
            continue
        checked += 1
        inst_file.write_text(format_instance(p))
        alloc_file.write_text(format_allocation(alloc))
        parsed = parse_instance(inst_file.read_text())
        parsed_alloc = parse_allocation(alloc_file.read_text(), parsed.n)
        if parsed != p or parsed_alloc != alloc:
            failures.append(f"{inst.suite} seed {inst.seed}: round trip changed the data")
        if not check_efx(parsed, parsed_alloc).is_efx:
            failures.append(f"{inst.suite} seed {inst.seed}: re-check failed")
        if brute_force_efx(parsed, "first") is None:
            failures.append(f"{inst.suite} seed {inst.seed}: oracle found nothing")
    conclude(4, "oracle cross-check", failures, f"({checked} instances within n^m <= 10^6)")


def test_criterion_05_few_goods():
    failures = []
    cases = 0
    for n in range(2, 6):
        for m in range(1, n + 1):
            for seed in range(50):
                p = gen_monotone_table(seed * 100 + n * 10 + m, n, m)
                cases += 1
                if check_efx(p, allocate_trivial(p)).violations:
                    failures.append(f"n={n} m={m} seed={seed}")
    conclude(5, "singleton allocation for m <= n", failures, f"({cases} profiles)")


def test_criterion_06_strictify():
    failures = []
    rng = random.Random(606)
    allocations = 0
    for t in range(100):
        n, m = rng.randint(2, 3), rng.randint(1, 6)
        p = Profile(tuple(random_table(rng, m, hi=rng.choice([1, 3])) for _ in range(n)))
        sp = strictify_profile(p)
        for v, s in zip(p, sp):
            for x, y in product(range(1 << m), repeat=2):
                if v.value(x) < v.value(y) and not s.key(x) < s.key(y):
                    failures.append(f"profile {t}: order not embedded at {x},{y}")
                if x != y and s.key(x) == s.key(y):
                    failures.append(f"profile {t}: tie at {x},{y}")
        for _ in range(50):
            owner = [rng.randrange(n) for _ in range(m)]
            alloc = Allocation(tuple(sum(1 << g for g in range(m) if owner[g] == i) for i in range(n)))
            allocations += 1
            if check_efx(sp, alloc).is_efx and not check_efx(p, alloc).is_efx:
                failures.append(f"profile {t}: EFX did not transfer for {alloc.as_lists()}")
    conclude(6, "strictification", failures, f"(100 profiles, {allocations} allocations)")


def test_criterion_07_fixtures():
    failures = []
    fx = counterexample_fixtures()
    a_val = fx["mms-violation"].valuation
    ok, w = is_mms_feasible(a_val, witness=True)
    a, b, c, d = (bundle([g]) for g in range(4))
    observed = {
        "A mms": ok,
        "A <1,2>": is_size_monotonic_range(a_val, 1, 2),
        "A <2,3>": is_size_monotonic_range(a_val, 2, 3),
    }
    for key in ("additive-not-size-monotonic", "additive-not-size-monotonic-table"):
        v = fx[key].valuation
        observed[f"{key} mms"] = is_mms_feasible(v)
        observed[f"{key} <1,2>"] = is_size_monotonic_range(v, 1, 2)
        observed[f"{key} <2,3>"] = is_size_monotonic_range(v, 2, 3)
    expected = {
        "A mms": False, "A <1,2>": True, "A <2,3>": True,
        "additive-not-size-monotonic mms": True,
        "additive-not-size-monotonic <1,2>": False,
        "additive-not-size-monotonic <2,3>": False,
        "additive-not-size-monotonic-table mms": True,
        "additive-not-size-monotonic-table <1,2>": False,
        "additive-not-size-monotonic-table <2,3>": False,
    }
    failures += [f"{k}: got {observed[k]}" for k in expected if observed[k] != expected[k]]
    if w is None or set(w.high) != {a | b, c | d} or set(w.low) != {b | c, a | d}:
        failures.append(f"witness partitions {w}")
    elif max(a_val.key(x) for x in w.low) >= min(a_val.key(x) for x in w.high):
        failures.append("witness does not separate the partitions")
    conclude(7, "hand-built fixtures", failures)


def test_criterion_08_size_implies_set():
    failures = []
    rng = random.Random(808)
    antecedents = 0
    for t in range(200):
        m = rng.randint(2, 6)
        kind = t % 4
        if kind == 0:
            v = random_table(rng, m, hi=rng.choice([2, 50]))
        elif kind == 1:
            v = gen_sized_profile(t, m, [f"{rng.randint(1, m - 1)}:{m}", "arbitrary"])[0]
        elif kind == 2:
            v = gen_monotone_table(t, 2, m)[0]
        else:
            v = AdditiveValuation(tuple(rng.randint(0, 4) for _ in range(m)))
        for k in range(1, m):
            for l in range(k + 1, m + 1):
                if is_size_monotonic_range(v, k, l):
                    antecedents += 1
                    if not is_set_monotonic_range(v, k, l):
                        failures.append(f"valuation {t}: <{k},{l}>")
    if antecedents == 0:
        failures.append("no size-monotone ranges exercised")
    conclude(8, "size monotone implies set monotone", failures, f"({antecedents} ranges held)")


def test_criterion_09_fast_path():
    failures = []
    rng = random.Random(909)
    comparisons = 0
    for t in range(200):
        m = rng.randint(1, 12)
        # a narrow weight range forces plenty of ties
        v = AdditiveValuation(tuple(rng.randint(0, rng.choice([2, 5, 100])) for _ in range(m)))
        for pool in ((1 << m) - 1, rng.randrange(1 << m)):
            for k in range(pool.bit_count() + 1):
                comparisons += 1
                fast = best_bundle(v, pool, k)
                if fast != brute_force_best_bundle(v, pool, k) or fast != best_bundle(v.to_table(), pool, k):
                    failures.append(f"instance {t}: pool {pool:b} k={k}")
                if fast != best_bundle(strictify(v), pool, k):
                    failures.append(f"instance {t}: strictified disagrees at k={k}")
    conclude(9, "additive fast path", failures, f"({comparisons} queries)")


def test_criterion_10_determinism(suite_runs):
    failures = []
    for key, run in (("n1", run_n1), ("n2", run_n2)):
        first = suite_runs.get(key) or [run(s) for s in SUITE_SEEDS]
        for seed, (inst, _, alloc, trace) in zip(SUITE_SEEDS, first):
            again_inst, _, again_alloc, again_trace = run(seed)
            if format_instance(again_inst.profile) != format_instance(inst.profile):
                failures.append(f"{key} seed {seed}: instance differs")
            if output_bytes(again_alloc, again_trace) != output_bytes(alloc, trace):
                failures.append(f"{key} seed {seed}: output differs")
    conclude(10, "determinism", failures, f"({2 * len(SUITE_SEEDS)} reruns)")

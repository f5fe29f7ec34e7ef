import random

import pytest

from efxalloc import TableValuation
from efxalloc.strictify import strictify

ACCEPTANCE_RESULTS = []


def record_criterion(number, title, ok, detail=""):
    ACCEPTANCE_RESULTS.append((number, title, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:>2}: {title} {detail}".rstrip())


def random_table(rng, m, hi=3):
    """Weak, unstructured table: small value range so ties are common."""
    return TableValuation(tuple(rng.randint(0, hi) for _ in range(1 << m)))


@pytest.fixture
def rng():
    return random.Random(12345)


def trace_problems(profile, roles, trace, alloc):
    """Every way a repair trace breaks its bookkeeping invariants, as strings.

    Agent 1's anchor bundle at step c has exactly c goods, agent 1's value
    strictly increases from step to step, the largest bundle size never
    grows and shrinks by at most one per step, and the last recorded
    allocation is the returned one.
    """
    v1 = strictify(profile[roles.order[0]])
    recs = trace.records
    out = []
    if not recs:
        return ["empty trace"]
    if [r.c for r in recs] != list(range(1, len(recs) + 1)):
        out.append(f"steps {[r.c for r in recs]} are not 1, 2, ...")
    if trace.depth > profile.m:
        out.append(f"depth {trace.depth} exceeds m={profile.m}")
    for prev, rec in zip((None,) + recs, recs):
        if rec.w.bit_count() != rec.c:
            out.append(f"step {rec.c}: anchor has {rec.w.bit_count()} goods")
        if prev is None:
            continue
        if not v1.key(rec.agent1_bundle) > v1.key(prev.agent1_bundle):
            out.append(f"step {rec.c}: agent 1 value did not increase")
        if prev.max_size - rec.max_size not in (0, 1):
            out.append(f"step {rec.c}: max size went {prev.max_size} -> {rec.max_size}")
    if tuple(recs[-1].allocation) != alloc.bundles:
        out.append("last record differs from the returned allocation")
    return out

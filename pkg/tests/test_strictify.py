import random
from itertools import product

from hypothesis import given, settings, strategies as st

from efxalloc import AdditiveValuation, Allocation, Profile, TableValuation, check_efx
from efxalloc.model import Ordering, compare
from efxalloc.predicates import is_set_monotonic_range, is_size_monotonic_range, is_strict
from efxalloc.strictify import is_strictified, strictify, strictify_profile

from conftest import random_table


def test_tie_broken_by_size_then_mask():
    v = strictify(AdditiveValuation((1, 1)))
    assert compare(v, 0b01, 0b10) is Ordering.LESS
    # {0} has value 1, {} has value 0
    assert compare(v, 0b01, 0b00) is Ordering.GREATER


def test_equal_value_larger_bundle_wins():
    v = strictify(TableValuation((0, 2, 0, 2)))
    assert compare(v, 0b01, 0b11) is Ordering.LESS


def test_idempotent():
    v = strictify(AdditiveValuation((2, 2, 1)))
    assert strictify(v) is v
    p = strictify_profile(Profile((AdditiveValuation((1,)), AdditiveValuation((2,)))))
    assert is_strictified(p)
    assert strictify_profile(p) == p


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(1, 5))
def test_order_embedding_and_totality(seed, m):
    rng = random.Random(seed)
    v = random_table(rng, m)
    s = strictify(v)
    assert is_strict(s)
    for x, y in product(range(1 << m), repeat=2):
        if v.value(x) < v.value(y):
            assert s.key(x) < s.key(y)
        if x != y:
            assert s.key(x) != s.key(y)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(2, 4))
def test_classes_preserved(seed, m):
    rng = random.Random(seed)
    v = random_table(rng, m, hi=2)
    s = strictify(v)
    for k in range(1, m):
        for l in range(k + 1, m + 1):
            if is_size_monotonic_range(v, k, l):
                assert is_size_monotonic_range(s, k, l)
            if is_set_monotonic_range(v, k, l):
                assert is_set_monotonic_range(s, k, l)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_efx_transfers_back(seed):
    rng = random.Random(seed)
    n, m = rng.randint(2, 3), rng.randint(1, 5)
    p = Profile(tuple(random_table(rng, m, hi=2) for _ in range(n)))
    sp = strictify_profile(p)
    for _ in range(20):
        owner = [rng.randrange(n) for _ in range(m)]
        alloc = Allocation(tuple(sum(1 << g for g in range(m) if owner[g] == i) for i in range(n)))
        if check_efx(sp, alloc).is_efx:
            assert check_efx(p, alloc).is_efx

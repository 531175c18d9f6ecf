import itertools

import pytest
from hypothesis import given, settings, strategies as st

from treeplan.generators import gen_random_strips
from treeplan.novelty import NOT_NOVEL, NoveltyStore, assess_and_record, pair_index
from treeplan.oracles import novelty_bruteforce
from treeplan.search import Search, SearchConfig
from treeplan.task import make_state, state_facts


def test_pair_index_examples():
    assert pair_index(0, 1) == 0
    idx = {pair_index(i, j) for i, j in itertools.combinations(range(4), 2)}
    assert idx == set(range(6))
    with pytest.raises(ValueError):
        pair_index(2, 2)
    with pytest.raises(ValueError):
        pair_index(3, 1)
    with pytest.raises(ValueError):
        pair_index(-1, 1)


@pytest.mark.parametrize("n", [2, 7, 31, 64])
def test_pair_index_bijective(n):
    idx = [pair_index(i, j) for i, j in itertools.combinations(range(n), 2)]
    assert sorted(idx) == list(range(n * (n - 1) // 2))


def test_fresh_partition_and_repeat():
    store = NoveltyStore(5)
    s = make_state([0, 2])
    assert assess_and_record(store, s, None, (4,)) == 1
    assert assess_and_record(store, s, None, (4,)) == NOT_NOVEL == 3
    assert assess_and_record(store, s, None, (5,)) == 1


def test_width_two():
    store = NoveltyStore(4)
    store.assess_and_record(make_state([0, 1]), None, ())
    store.assess_and_record(make_state([2, 3]), None, ())
    assert store.assess_and_record(make_state([0, 2]), None, ()) == 2
    assert store.assess_and_record(make_state([0, 2]), None, ()) == 3


def test_fired_adds_only_inspects_new_tuples():
    store = NoveltyStore(4)
    store.assess_and_record(make_state([0, 1]), None, ())
    # fact 2 is new: w=1; (0,1) is not re-inspected
    assert store.assess_and_record(make_state([0, 1, 2]), [2], ()) == 1


def test_errors():
    store = NoveltyStore(3)
    with pytest.raises(ValueError):
        store.assess_and_record(make_state([5]), None, ())
    with pytest.raises(ValueError):
        store.assess_and_record(make_state([0]), [1], ())
    with pytest.raises(ValueError):
        store.assess_and_record(make_state([0]), [7], ())


def test_memory_cap():
    n = 6
    store = NoveltyStore(n, max_bits=2 * (n + n * (n - 1) // 2))
    assert store.max_partitions == 2
    s = make_state([1, 3])
    assert store.assess_and_record(s, None, (0,)) == 1
    assert store.assess_and_record(s, None, (1,)) == 1
    assert store.disabled
    assert store.assess_and_record(s, None, (2,)) == NOT_NOVEL
    assert store.refused == 1
    assert store.assess_and_record(make_state([4]), None, (1,)) == 1  # existing partitions still work
    assert store.total_bits <= len(store.partitions) * (n + n * n / 2)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sets(st.integers(0, 9), max_size=6), st.integers(0, 2)), max_size=40))
def test_monotone_and_partition_independent(stream):
    store = NoveltyStore(10)
    solo = {k: NoveltyStore(10) for k in range(3)}
    for facts, key in stream:
        s = make_state(facts)
        w = store.assess_and_record(s, None, key)
        assert w == solo[key].assess_and_record(s, None, key)
        assert store.assess_and_record(s, None, key) == NOT_NOVEL


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sets(st.integers(0, 7), max_size=5), st.integers(0, 1)), max_size=30))
def test_full_state_matches_bruteforce(stream):
    store = NoveltyStore(8)
    history = []
    for facts, key in stream:
        expect = novelty_bruteforce(history, facts, key)
        assert store.assess_and_record(make_state(facts), None, key) == expect
        history.append((facts, key))


class RecordingStore(NoveltyStore):
    """Store that checks every incremental answer against the brute-force oracle."""

    def __init__(self, n):
        super().__init__(n)
        self.history = []
        self.checked = 0

    def assess_and_record(self, s, fired_adds, h_tuple):
        expect = novelty_bruteforce(self.history, state_facts(s), h_tuple)
        w = super().assess_and_record(s, fired_adds, h_tuple)
        assert w == expect, (state_facts(s), h_tuple, fired_adds)
        self.history.append((state_facts(s), h_tuple))
        self.checked += 1
        return w


@pytest.mark.parametrize("search, partition", [
    ("gbfs", "hff"), ("gbfs", "hff,goalcount"), ("guctn2", "hff"), ("bilevel", "hff,goalcount"),
])
def test_incremental_equals_bruteforce_on_search_traces(search, partition):
    checked = 0
    used_fired = 0
    for seed in range(50):
        task = gen_random_strips(seed, 14, 40, pre_size=1, init_size=3, goal_size=4)
        cfg = SearchConfig(search=search, novelty="w2", novelty_partition=partition,
                           max_expansions=150)
        engine = Search(task, cfg)
        engine.novelty = store = RecordingStore(task.num_facts)
        orig = store.assess_and_record

        def spy(s, fired, key):
            nonlocal used_fired
            used_fired += fired is not None
            return orig(s, fired, key)

        store.assess_and_record = spy
        engine.run()
        checked += store.checked
    assert checked > 1000
    assert used_fired > 50  # the fired-adds shortcut was exercised

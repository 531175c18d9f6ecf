import pytest

from treeplan.bandit import ArmStats
from treeplan.heuristics import TableHeuristic
from treeplan.probe import BalancedTree, prebuild
from treeplan.search import Search, SearchConfig, SearchNode
from treeplan.tree import BackpropQueue, TreeNode, TreeOpenList

from helpers import audit_tree


def rec(state, g, h):
    r = SearchNode(state, g)
    r.hs = (h,)
    r.novelty = (1,)
    r.evaluated = True
    return r


def small_tree(policy="normal2"):
    """root with three leaf children (h 5, 2, 7), built through the open-list hooks."""
    tree = TreeOpenList(policy=policy)
    root = rec(0, 0, 4)
    tree.insert_root(root)
    root.expanded = True
    kids = [rec(i, 1, h) for i, h in ((1, 5), (2, 2), (3, 7))]
    tree._current = tree.root
    tree.on_expanded(root, kids, [0, 0, 0])
    return tree, kids


def test_root_leaf_selection():
    tree = TreeOpenList()
    tree.insert_root(rec(0, 0, 3))
    assert tree.select_leaf() == (tree.root, 0)


def test_stats_after_expansion():
    tree, kids = small_tree()
    r = tree.root
    # own sample 4 plus children 5, 2, 7
    assert r.t == 4 and r.mean == pytest.approx(4.5)
    assert r.key == 2
    audit_tree(tree)


def test_greedy_descends_to_min_key():
    tree, kids = small_tree("greedy")
    leaf, edges = tree.select_leaf()
    assert leaf.rec is kids[1] and edges == 1
    assert tree.nec_evals == 3


def test_undersampled_child_first():
    # leaves hold one sample, below normal2's two-sample minimum: the first child wins
    tree, kids = small_tree("normal2")
    assert tree.select_leaf()[0].rec is kids[0]
    # ucb1 is defined from one sample: equal exploration terms, least mean wins
    tree, kids = small_tree("ucb1")
    assert tree.select_leaf()[0].rec is kids[1]


def test_locked_subtree_avoided():
    tree, kids = small_tree("greedy")
    target = tree.root.children[1]
    target.pinned = True
    tree.B.add(target)
    tree.drain()
    assert target.locked
    for _ in range(5):
        leaf, _ = tree.select_leaf()
        assert leaf is not target
    audit_tree(tree)


def test_all_children_locked_locks_parent():
    tree, kids = small_tree()
    for c in tree.root.children:
        c.pinned = True
        tree.B.add(c)
    tree.drain()
    assert tree.root.locked
    with pytest.raises(LookupError):
        tree.select_leaf()
    assert tree.pop() is None


def test_new_child_h_enters_parent_mean():
    tree = TreeOpenList()
    root = rec(0, 0, 6)
    tree.insert_root(root)
    tree._current = tree.root
    tree.on_expanded(root, [rec(1, 1, 4)], [0])
    assert tree.root.t == 2 and tree.root.mean == 5


def test_exclude_own_sample():
    tree = TreeOpenList(include_own=False)
    root = rec(0, 0, 6)
    tree.insert_root(root)
    assert tree.root.t == 1  # a leaf always carries its own value
    tree._current = tree.root
    tree.on_expanded(root, [rec(1, 1, 4), rec(2, 1, 8)], [0, 0])
    assert tree.root.stats == ArmStats(2, 6.0, 8.0)


def test_backprop_queue_order_and_dedup():
    B = BackpropQueue()
    nodes = [TreeNode(rec(i, g, 0)) for i, g in enumerate((1, 4, 2, 4))]
    for n in nodes + nodes[:2]:
        B.add(n)
    assert len(B) == 4
    assert [B.popmax().rec.g for _ in range(4)] == [4, 4, 2, 1]
    with pytest.raises(IndexError):
        B.popmax()
    B.add(nodes[0])
    B.discard(nodes[0])
    assert not B


@pytest.mark.parametrize("depth", [2, 3, 5])
def test_balanced_descent(depth):
    problem = BalancedTree(3, seed=1)
    search = Search(problem, SearchConfig(search="guctn2"), heuristics=[TableHeuristic(problem, problem.h)])
    tree = prebuild(search, depth)
    leaf, edges = tree.select_leaf()
    assert edges == depth
    assert tree.nec_evals == 3 * depth
    assert not leaf.children
    assert audit_tree(tree) == sum(3 ** d for d in range(depth + 1))


def test_chain_backprop_bounded_by_path():
    from helpers import graph_task
    names = [f"n{i}" for i in range(6)]
    task = graph_task(list(zip(names, names[1:])), "n0", "n5")
    search = Search(task, SearchConfig(search="guctn2", heuristic="goalcount", max_expansions=4))
    search.start()
    tree = search.open
    for depth in range(4):
        before = tree.backprops
        assert search.step()
        assert tree.backprops - before <= depth + 1
    audit_tree(tree)


def test_policy_and_mode_validation():
    with pytest.raises(ValueError):
        TreeOpenList(policy="thompson")
    with pytest.raises(ValueError):
        TreeOpenList(mode="sideways")
    from treeplan.bilevel import Budget
    with pytest.raises(ValueError):
        TreeOpenList(mode="fixed", budget=Budget("depth"))

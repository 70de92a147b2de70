import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treebal import (OrderedTree, PatternTree, TermError, parse_term,
                     tree_at_round)
from treebal.contraction import (ContractionRun, contraction_patterns,
                                 internal_leaves, round_count)
from treebal.generators import random_full_binary

# 21-node full binary tree with single-letter labels; small enough to check
# every contraction artifact by hand.
GOLDEN = "a(b(c(d,e(f,g)),h(i,j)),k(l(m(n,o),p),q(r,s(t,u))))"

GOLDEN_CONTEXTS = [("e", "g"), ("h", "j"), ("m", "o"), ("s", "u"),
                   ("l", "o"), ("k", "q"), ("c", "d"), ("b", "d"),
                   ("k", "u")]


def golden_tree():
    return OrderedTree.from_term(parse_term(GOLDEN))


def by_label(T):
    return {lab: v for v, lab in enumerate(T.labels)}


def test_round_count():
    assert round_count(0) == 0
    assert round_count(1) == 2
    assert round_count(2) == 4
    assert round_count(3) == 4
    assert round_count(8) == 8
    assert round_count(9) == 8


def test_internal_leaves_golden():
    T = golden_tree()
    ids = by_label(T)
    assert internal_leaves(T) == [ids[c] for c in "fgijnoprt"]


def test_golden_pattern_set():
    T = golden_tree()
    ids = by_label(T)
    want = {("S", T.root)}
    want |= {("C", ids[v], ids[w]) for v, w in GOLDEN_CONTEXTS}
    assert contraction_patterns(T).patterns == frozenset(want)


def test_golden_rounds_and_width():
    T = golden_tree()
    run = ContractionRun(T)
    assert run.total_rounds == 8
    pt = PatternTree(run.hierarchical_definition())
    assert pt.width() == 5
    assert pt.depth() == 4


def test_golden_round_schedule():
    """The per-round prune groups, frozen by hand."""
    T = golden_tree()
    ids = by_label(T)
    run = ContractionRun(T)
    got = [sorted((rec.pattern[1], rec.pattern[2]) for rec in rd.prunes)
           for rd in run.rounds]
    def c(v, w):
        return (ids[v], ids[w])
    assert got[0] == sorted([c("e", "g"), c("h", "j"), c("m", "o"), c("s", "u")])
    assert got[1] == [c("l", "o")]
    assert got[2] == [c("k", "q")]
    assert got[3] == [c("c", "d")]
    assert got[4] == []
    assert got[5] == [c("b", "d")]
    assert got[6] == [c("k", "u")]
    assert got[7] == []


def test_golden_intermediate_trees():
    T = golden_tree()
    ids = by_label(T)
    s1 = tree_at_round(T, 1)
    assert {v for v in s1.leaf_numbers} == {ids[c] for c in "gjopr"}
    s8 = tree_at_round(T, 8)
    assert s8.nodes == {ids["a"], ids["d"], ids["u"]}
    with pytest.raises(TermError):
        tree_at_round(T, 9)


def test_rejects_non_binary():
    T = OrderedTree.from_term(parse_term("f(a,b,c)"))
    with pytest.raises(TermError):
        contraction_patterns(T)


def test_trivial_trees():
    for text in ["a", "f(a,b)"]:
        T = OrderedTree.from_term(parse_term(text))
        assert contraction_patterns(T).patterns == frozenset({("S", T.root)})


# --- independent sequential oracle ----------------------------------------


def oracle_patterns(T):
    """Plain-dict reimplementation of the schedule; returns context pairs."""
    leaves = T.leaves()
    inner = leaves[1:-1]
    parent = dict(enumerate(T.parent))
    children = {v: list(T.children[v]) for v in range(T.n)}
    number = {w: k + 1 for k, w in enumerate(inner)}
    pats = []
    live = list(inner)
    total = round_count(len(inner))
    for r in range(1, total + 1):
        keep = []
        for w in live:
            v = parent[w]
            left = children[v][0] == w
            if number[w] % 2 == 1 and left == (r % 2 == 1):
                u = parent[v]
                sib = children[v][1 if left else 0]
                down = T.children[u][0]
                if not T.is_ancestor(down, w):
                    down = T.children[u][1]
                pats.append(("C", down, sib))
                children[u][children[u].index(v)] = sib
                parent[sib] = u
            else:
                keep.append(w)
        if r % 2 == 0:
            for w in keep:
                number[w] //= 2
        live = keep
    assert not live
    return set(pats)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 30), st.integers(3, 120))
def test_patterns_match_oracle(seed, half):
    T = OrderedTree.from_term(random_full_binary(2 * half + 1, seed=seed))
    want = oracle_patterns(T) | {("S", T.root)}
    assert contraction_patterns(T).patterns == frozenset(want)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 30), st.integers(3, 80))
def test_width_bound_and_well_nested(seed, half):
    T = OrderedTree.from_term(random_full_binary(2 * half + 1, seed=seed))
    hd = contraction_patterns(T)
    pt = PatternTree(hd)  # raises if not well-nested
    assert pt.width() <= 5


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 30), st.integers(3, 40))
def test_tree_at_round_matches_run(seed, half):
    """The direct divisibility construction agrees with the simulation."""
    T = OrderedTree.from_term(random_full_binary(2 * half + 1, seed=seed))
    run = ContractionRun(T)
    # replay the run to materialize every T_i
    parent = dict(enumerate(T.parent))
    children = {v: list(T.children[v]) for v in range(T.n)}
    nodes = set(range(T.n))
    for i, rd in enumerate(run.rounds, start=1):
        for rec in rd.prunes:
            children[rec.u][children[rec.u].index(rec.v)] = rec.w_prime
            parent[rec.w_prime] = rec.u
            nodes -= {rec.w, rec.v}
        state = tree_at_round(T, i)
        assert state.nodes == nodes
        for v in nodes:
            kids = [c for c in children[v] if c in nodes]
            assert state.children.get(v, []) == (children[v] if kids else [])

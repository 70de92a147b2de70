import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treebal import (HierarchicalDefinition, OrderedTree, PatternTree,
                     TermError, context, coverage_size, covers, parse_term,
                     pattern_leq, patterns_disjoint, subtree)
from treebal.generators import random_term
from treebal.patterns import check_well_nested, covered_nodes


def nodes_of(T, p):
    """Reference coverage by explicit enumeration."""
    v = p[1]
    below = {u for u in range(T.n) if T.is_ancestor(v, u)}
    if p[0] == "C":
        below -= {u for u in range(T.n) if T.is_ancestor(p[2], u)}
    return below


def random_pattern(T, r):
    v = r.randrange(T.n)
    if T.size[v] > 1 and r.random() < 0.5:
        w = v + 1 + r.randrange(T.size[v] - 1)
        return context(v, w)
    return subtree(v)


def test_context_rejects_equal_nodes():
    with pytest.raises(TermError):
        context(3, 3)


def test_coverage_examples():
    T = OrderedTree.from_term(parse_term("f(g(a,b),c)"))
    assert covered_nodes(T, subtree(1)) == [1, 2, 3]
    assert covered_nodes(T, context(0, 1)) == [0, 4]
    assert coverage_size(T, context(0, 1)) == 2
    assert covers(T, context(0, 1), 4)
    assert not covers(T, context(0, 1), 2)


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2 ** 30))
def test_pattern_algebra_matches_set_oracle(seed):
    r = random.Random(seed)
    T = OrderedTree.from_term(random_term(r.randint(2, 25), seed=seed))
    p = random_pattern(T, r)
    q = random_pattern(T, r)
    sp, sq = nodes_of(T, p), nodes_of(T, q)
    assert set(covered_nodes(T, p)) == sp
    assert coverage_size(T, p) == len(sp)
    assert pattern_leq(T, p, q) == (sp <= sq)
    assert patterns_disjoint(T, p, q) == (not (sp & sq))
    u = r.randrange(T.n)
    assert covers(T, p, u) == (u in sp)


def grow_well_nested(T, r, tries=30):
    pats = [subtree(T.root)]
    for _ in range(tries):
        p = random_pattern(T, r)
        if p in pats:
            continue
        if check_well_nested(T, pats + [p]):
            pats.append(p)
    return pats


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 30))
def test_pattern_tree_matches_brute_force(seed):
    r = random.Random(seed)
    T = OrderedTree.from_term(random_term(r.randint(2, 20), seed=seed))
    pats = grow_well_nested(T, r)
    hd = HierarchicalDefinition(T, pats, check=True)
    pt = PatternTree(hd)
    sets = {p: frozenset(nodes_of(T, p)) for p in pats}
    for i, p in enumerate(pt.order):
        j = pt.parent[i]
        if j < 0:
            assert p == ("S", T.root)
            continue
        q = pt.order[j]
        assert sets[p] <= sets[q]
        # minimality: no other pattern strictly between p and q
        for o in pats:
            so = sets[o]
            if sets[p] < so < sets[q]:
                pytest.fail(f"{o} lies strictly between {p} and {q}")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 30))
def test_boundary_and_branching_size(seed):
    r = random.Random(seed)
    T = OrderedTree.from_term(random_term(r.randint(2, 20), seed=seed))
    pt = PatternTree(HierarchicalDefinition(T, grow_well_nested(T, r), check=True))
    for p in pt.order:
        b = pt.boundary(p)
        assert pt.branching_size(p) == len(b) + len(pt.direct_subpatterns(p))
        # boundary nodes are covered by p but by no direct subpattern
        for q in pt.direct_subpatterns(p):
            assert not (b & set(covered_nodes(T, q)))


def test_rejects_non_nested():
    T = OrderedTree.from_term(parse_term("f(g(a,b),h(c,d))"))
    bad = [subtree(T.root), context(0, 2), context(1, 3)]
    assert not check_well_nested(T, bad)
    with pytest.raises(TermError):
        PatternTree(HierarchicalDefinition(T, bad))


def test_requires_root_pattern():
    T = OrderedTree.from_term(parse_term("f(a,b)"))
    with pytest.raises(TermError):
        HierarchicalDefinition(T, [subtree(1)])

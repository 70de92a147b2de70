"""Patterns over ordered trees and well-nested hierarchical definitions.

A pattern is either the full subtree below a node v, written ``("S", v)``, or
a context slice ``("C", v, w)``: the subtree below v with the subtree below
the proper descendant w removed (w's subtree is the hole).  Patterns are plain
tuples so sets and dict keys stay cheap.
"""

from __future__ import annotations

from .terms import OrderedTree, TermError

Pattern = tuple  # ("S", v) | ("C", v, w)


def subtree(v: int) -> Pattern:
    return ("S", v)


def context(v: int, w: int) -> Pattern:
    if v == w:
        raise TermError("context hole must be a proper descendant")
    return ("C", v, w)


def pattern_root(p: Pattern) -> int:
    return p[1]


def pattern_hole(p: Pattern):
    return p[2] if p[0] == "C" else None


def check_pattern(T: OrderedTree, p: Pattern) -> None:
    if p[0] == "S":
        T._check(p[1])
    elif p[0] == "C":
        v, w = p[1], p[2]
        if not (T.is_ancestor(v, w) and v != w):
            raise TermError(f"hole {w} is not a proper descendant of root {v}")
    else:
        raise TermError(f"bad pattern tag {p[0]!r}")


def coverage_size(T: OrderedTree, p: Pattern) -> int:
    if p[0] == "S":
        return T.size[p[1]]
    return T.size[p[1]] - T.size[p[2]]


def covers(T: OrderedTree, p: Pattern, u: int) -> bool:
    """Does u lie in V[p]?"""
    if not T.is_ancestor(p[1], u):
        return False
    return p[0] == "S" or not T.is_ancestor(p[2], u)


def covered_nodes(T: OrderedTree, p: Pattern) -> list[int]:
    v = p[1]
    end = v + T.size[v]
    if p[0] == "S":
        return list(range(v, end))
    w = p[2]
    return list(range(v, w)) + list(range(w + T.size[w], end))


def pattern_leq(T: OrderedTree, p: Pattern, q: Pattern) -> bool:
    """Is V[p] a subset of V[q]?  Interval arithmetic only."""
    pv, qv = p[1], q[1]
    if not T.is_ancestor(qv, pv):
        return False
    if q[0] == "S":
        return True
    qw = q[2]
    # q's hole must miss all of V[p].
    if p[0] == "S":
        # Hole subtree must be disjoint from p's subtree.
        return not T.is_ancestor(pv, qw) and not T.is_ancestor(qw, pv)
    pw = p[2]
    if T.is_ancestor(qw, pv):
        return False
    if not T.is_ancestor(pv, qw):
        return True
    # qw inside p's root subtree: ok iff the hole of p swallows q's hole side.
    return T.is_ancestor(pw, qw)


def patterns_disjoint(T: OrderedTree, p: Pattern, q: Pattern) -> bool:
    pv, qv = p[1], q[1]
    if not T.is_ancestor(pv, qv) and not T.is_ancestor(qv, pv):
        return True
    # Make p the one whose root is the ancestor.
    if T.is_ancestor(qv, pv):
        p, q = q, p
        pv, qv = qv, pv
    if p[0] == "S":
        return False  # p covers q's root
    pw = p[2]
    if not T.is_ancestor(pw, qv):
        return False  # q's root is covered by p
    # q lives inside p's hole; disjoint iff q never escapes it, which it
    # cannot since q's whole subtree is below qv ⪯ pw... except q may be a
    # context whose coverage is still inside pw's subtree.
    return True


def check_well_nested(T: OrderedTree, P) -> bool:
    """Pairwise: disjoint or one contains the other."""
    P = list(P)
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            p, q = P[i], P[j]
            if not (patterns_disjoint(T, p, q) or pattern_leq(T, p, q)
                    or pattern_leq(T, q, p)):
                return False
    return True


class HierarchicalDefinition:
    """A well-nested pattern set on a tree, containing the root pattern."""

    __slots__ = ("tree", "patterns")

    def __init__(self, tree: OrderedTree, patterns, check: bool = False,
                 validate: bool = True):
        self.tree = tree
        self.patterns = frozenset(patterns)
        if ("S", tree.root) not in self.patterns:
            raise TermError("missing largest pattern")
        if validate:
            for p in self.patterns:
                check_pattern(tree, p)
        if check and not check_well_nested(tree, self.patterns):
            raise TermError("pattern set is not well-nested")

    def __len__(self):
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __contains__(self, p):
        return p in self.patterns


class PatternTree:
    """Containment order of a well-nested pattern set.

    Exposes, per pattern: parent (minimal strictly containing pattern),
    children in dfs order of roots, boundary ∂p, branching-tree size, and
    depth; plus the global width and depth of the definition.
    """

    __slots__ = ("hd", "order", "parent", "children", "index")

    def __init__(self, hd: HierarchicalDefinition):
        self.hd = hd
        T = hd.tree
        # Sort so that containers come before containees: root dfs-in
        # ascending, then coverage descending breaks ties among patterns
        # rooted at the same node (bigger pattern first), then subtree
        # before context on exact ties.
        pats = sorted(hd.patterns,
                      key=lambda p: (p[1], -coverage_size(T, p), p[0]))
        self.order = pats
        self.index = {p: i for i, p in enumerate(pats)}
        n = len(pats)
        self.parent = [-1] * n
        self.children = [[] for _ in range(n)]
        # Sweep stack: patterns whose root subtree still spans the current
        # position.  An entry can be shadowed temporarily while the sweep
        # passes through its hole, so parent lookup scans past shadowed
        # entries instead of popping them.
        stack: list[int] = []
        for i, p in enumerate(pats):
            r = p[1]
            while stack and r > T.dfs_out(pats[stack[-1]][1]):
                stack.pop()
            parent = -1
            for j in reversed(stack):
                q = pats[j]
                if q[0] == "C" and T.is_ancestor(q[2], r):
                    continue  # inside q's hole; q is shadowed here
                if pattern_leq(T, p, q):
                    parent = j
                break
            if parent >= 0:
                self.parent[i] = parent
                self.children[parent].append(i)
            elif i != 0:
                raise TermError("pattern set is not well-nested")
            stack.append(i)
        # Verify the sweep produced a single tree rooted at the largest pattern.
        if n and pats[0] != ("S", T.root):
            raise TermError("largest pattern is not the containment root")

    def depth(self) -> int:
        """Height of the pattern tree (edges)."""
        depths = [0] * len(self.order)
        best = 0
        for i in range(1, len(self.order)):
            depths[i] = depths[self.parent[i]] + 1
            if depths[i] > best:
                best = depths[i]
        return best

    def boundary(self, p: Pattern) -> set[int]:
        """∂p: covered nodes not covered by any direct subpattern."""
        T = self.hd.tree
        i = self.index[p]
        nodes = set(covered_nodes(T, p))
        for j in self.children[i]:
            nodes.difference_update(covered_nodes(T, self.order[j]))
        return nodes

    def branching_size(self, p: Pattern) -> int:
        """|∂p| + number of direct subpatterns.

        Computed arithmetically: |∂p| = |V[p]| − Σ |V[q]| over direct
        subpatterns q, which avoids materializing node sets.
        """
        T = self.hd.tree
        i = self.index[p]
        covered = coverage_size(T, p)
        for j in self.children[i]:
            covered -= coverage_size(T, self.order[j])
        return covered + len(self.children[i])

    def width(self) -> int:
        return max(self.branching_size(p) for p in self.order)

    def direct_subpatterns(self, p: Pattern) -> list[Pattern]:
        return [self.order[j] for j in self.children[self.index[p]]]

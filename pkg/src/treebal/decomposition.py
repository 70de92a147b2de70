"""From an arbitrary ordered tree to a normal-form hierarchical definition.

Pipeline: embed into a full binary tree, split it along m-critical nodes into
bridges of size <= m, contract the critical skeleton, lift everything back,
and normalize so that every pattern decomposes into one of two shapes:

* type 1: boundary is exactly the pattern's root; every direct subpattern is
  the full subtree of a child; for a context the hole sits at a child.
* type 2: no boundary; exactly two direct subpatterns tiling the pattern.

The resulting definition has depth O(log n) and O(n / log n) pattern
classes, which is what the TSLP builder consumes.
"""

from __future__ import annotations

from bisect import bisect_left

from .contraction import contraction_patterns
from .patterns import (HierarchicalDefinition, Pattern, PatternTree,
                       coverage_size, covered_nodes)
from .terms import OrderedTree, TermError


# ---------------------------------------------------------------------------
# Critical nodes, bridges, skeleton


def choose_m(n: int, ell: int) -> int:
    """Bridge size bound for an n-node tree with ell labels.

    Grows like (log n)/2 so the number of distinct bridge shapes stays well
    below n while the skeleton shrinks to O(n/log n) nodes.  The label count
    is accepted for interface stability but does not change the clamp-driven
    outcome at practical sizes.
    """
    if n < 1 or ell < 1:
        raise TermError("need n >= 1 and ell >= 1")
    m = (n.bit_length() - 1) // 2 - 2
    return max(2, min(m, n)) if n > 2 else 2


def critical_nodes(T: OrderedTree, m: int) -> set[int]:
    """Inner nodes v with ceil(|T[v]|/m) != ceil(|T[w]|/m) for all children w."""
    if not 1 < m <= T.n:
        raise TermError("need 1 < m <= n")
    size = T.size
    crit = set()
    for v in range(T.n):
        ch = T.children[v]
        if ch and all(-(-size[v] // m) != -(-size[w] // m) for w in ch):
            crit.add(v)
    return crit


def _first_leaf(T: OrderedTree, v: int) -> int:
    while T.children[v]:
        v = T.children[v][0]
    return v


def bridges_and_contraction(T: OrderedTree, m: int):
    """Split T along its critical skeleton.

    Returns (C, B, T_C, tc_nodes): the separator node set C (critical nodes,
    the root, and one auxiliary leaf for every C-free child side), the list
    of bridge patterns B (the connected components of V minus C), the
    skeleton tree T_C obtained by contracting each bridge to an edge, and
    tc_nodes mapping T_C ids back to T ids.
    """
    if not T.is_full_binary():
        raise TermError("tree is not full binary")
    base = critical_nodes(T, m) | {T.root}
    base_sorted = sorted(base)
    aux = set()
    for c in base:
        for w in T.children[c]:
            lo = bisect_left(base_sorted, w)
            if lo >= len(base_sorted) or base_sorted[lo] >= w + T.size[w]:
                aux.add(_first_leaf(T, w))
    C = base | aux
    tc_nodes = sorted(C)
    index = {v: i for i, v in enumerate(tc_nodes)}
    # Parent in T_C = nearest strict ancestor within C (preorder stack sweep).
    parent = [-1] * len(tc_nodes)
    children: list[list[int]] = [[] for _ in tc_nodes]
    stack: list[int] = []
    for i, v in enumerate(tc_nodes):
        while stack and not T.is_ancestor(tc_nodes[stack[-1]], v):
            stack.pop()
        if stack:
            parent[i] = stack[-1]
            children[stack[-1]].append(i)
        stack.append(i)
    for i, v in enumerate(tc_nodes):
        expect = 2 if T.children[v] else 0
        if len(children[i]) != expect:
            raise TermError("critical skeleton is not full binary")
    depth = [0] * len(tc_nodes)
    size = [1] * len(tc_nodes)
    for i in range(len(tc_nodes)):
        for j in children[i]:
            depth[j] = depth[i] + 1
    for i in range(len(tc_nodes) - 1, -1, -1):
        for j in children[i]:
            size[i] += size[j]
    T_C = OrderedTree([T.labels[v] for v in tc_nodes], parent, children,
                      size, depth)
    B: list[Pattern] = []
    for i, v in enumerate(tc_nodes):
        for j in children[i]:
            c = tc_nodes[j]
            lc = T.children[v][0]
            top = lc if T.is_ancestor(lc, c) else T.children[v][1]
            if top != c:
                B.append(("C", top, c))
    return C, B, T_C, tc_nodes


def _bridge_subpatterns(T: OrderedTree, p: Pattern) -> list[Pattern]:
    """Q_p: for every node covered by bridge p, the maximal subpattern of p
    rooted there."""
    hole = p[2]
    out = []
    for x in covered_nodes(T, p):
        if T.is_ancestor(x, hole):
            out.append(("C", x, hole))
        else:
            out.append(("S", x))
    return out


def compress(T: OrderedTree) -> HierarchicalDefinition:
    """Well-nested pattern set with O(n/log n) classes on a full binary tree:
    contraction patterns of the critical skeleton plus all bridge
    subpatterns."""
    if T.n == 1:
        return HierarchicalDefinition(T, {("S", T.root)})
    m = choose_m(T.n, len(set(T.labels)))
    _, B, T_C, tc = bridges_and_contraction(T, m)
    pats: set[Pattern] = set()
    for p in contraction_patterns(T_C):
        if p[0] == "S":
            pats.add(("S", tc[p[1]]))
        else:
            pats.add(("C", tc[p[1]], tc[p[2]]))
    for p in B:
        pats.update(_bridge_subpatterns(T, p))
    pats.add(("S", T.root))
    return HierarchicalDefinition(T, pats)


# ---------------------------------------------------------------------------
# Binarization


class BinaryEmbedding:
    """Embedding of a k-ordered tree into a full binary tree.

    Nodes in the image of ``phi`` keep their labels; padding nodes (right
    spine chains for rank >= 3, a padding right leaf for rank 1) share one
    fresh label.  ``owner[b]`` is the T-node whose zone contains T'-node b;
    ``spine[b]`` is 0 for image nodes and the 1-based spine position for
    padding nodes.
    """

    __slots__ = ("tree", "btree", "phi", "owner", "spine", "pad_label")

    def __init__(self, tree, btree, phi, owner, spine, pad_label):
        self.tree = tree
        self.btree = btree
        self.phi = phi
        self.owner = owner
        self.spine = spine
        self.pad_label = pad_label


def binarize(T: OrderedTree) -> BinaryEmbedding:
    pad = "_p"
    labels_seen = set(T.labels)
    while pad in labels_seen:
        pad += "_"
    b_labels: list[str] = []
    b_parent: list[int] = []
    b_children: list[list[int]] = []
    owner: list[int] = []
    spine: list[int] = []
    phi = [-1] * T.n

    def emit(label, par, own, sp):
        bid = len(b_labels)
        b_labels.append(label)
        b_parent.append(par)
        b_children.append([])
        owner.append(own)
        spine.append(sp)
        if par >= 0:
            b_children[par].append(bid)
        return bid

    # Work items; pushed right-first so the stack pops in preorder.
    stack = [("n", T.root, -1)]
    while stack:
        item = stack.pop()
        if item[0] == "n":
            _, u, par = item
            bid = emit(T.labels[u], par, u, 0)
            phi[u] = bid
            ch = T.children[u]
            r = len(ch)
            if r == 1:
                stack.append(("p", u, bid, 1, True))
                stack.append(("n", ch[0], bid))
            elif r == 2:
                stack.append(("n", ch[1], bid))
                stack.append(("n", ch[0], bid))
            elif r >= 3:
                stack.append(("p", u, bid, 1, False))
                stack.append(("n", ch[0], bid))
        else:
            _, u, par, t, leaf = item
            bid = emit(pad, par, u, t)
            if leaf:
                continue
            ch = T.children[u]
            r = len(ch)
            if t == r - 2:
                stack.append(("n", ch[r - 1], bid))
                stack.append(("n", ch[r - 2], bid))
            else:
                stack.append(("p", u, bid, t + 1, False))
                stack.append(("n", ch[t], bid))
    n2 = len(b_labels)
    depth = [0] * n2
    size = [1] * n2
    for v in range(1, n2):
        depth[v] = depth[b_parent[v]] + 1
    for v in range(n2 - 1, 0, -1):
        size[b_parent[v]] += size[v]
    btree = OrderedTree(b_labels, b_parent, b_children, size, depth)
    return BinaryEmbedding(T, btree, phi, owner, spine, pad_label=pad)


def lift(Pp: HierarchicalDefinition, emb: BinaryEmbedding) -> HierarchicalDefinition:
    """Pull a pattern set on the binarized tree back to the original tree.

    Each binary-tree pattern covers a union of zones up to partial zones at
    its root and hole; those decompose into a constant number of original
    subtrees plus at most one context.
    """
    if Pp.tree is not emb.btree:
        raise TermError("pattern set does not belong to the embedding")
    T = emb.tree
    owner, spine = emb.owner, emb.spine
    out: set[Pattern] = set()
    for p in Pp:
        vq = p[1]
        u0, i = owner[vq], spine[vq]
        if p[0] == "S":
            if i == 0:
                out.add(("S", u0))
            else:
                out.update(("S", c) for c in T.children[u0][i:])
            continue
        wq = p[2]
        u1, t = owner[wq], spine[wq]
        pieces: list[Pattern] = []
        if u1 == u0:
            if i == 0:
                # Hole at our own padding: only the first t child subtrees
                # survive; the owner's zone is cut so it is not covered.
                pieces = [("S", c) for c in T.children[u0][:t]]
            else:
                pieces = [("S", c) for c in T.children[u0][i:t]]
        else:
            below = [("S", c) for c in T.children[u1][:t]] if t else []
            if i == 0:
                pieces = [("C", u0, u1)] + below
            else:
                cand = T.children[u0][i:]
                cj = next(c for c in cand if T.is_ancestor(c, u1))
                pieces = [("S", c) for c in cand if c != cj]
                if cj != u1:
                    pieces.append(("C", cj, u1))
                pieces += below
        out.update(pieces)
    out.add(("S", T.root))
    return HierarchicalDefinition(T, out)


# ---------------------------------------------------------------------------
# Normalization


def _shape_ok(T: OrderedTree, p: Pattern, subs: list[Pattern],
              boundary_size: int) -> bool:
    if boundary_size == 0 and len(subs) == 2:
        return True  # type 2
    if boundary_size != 1:
        return False
    r = p[1]
    if any(q[1] == r for q in subs):
        return False  # the single boundary node is not the root
    for q in subs:
        if q[0] != "S" or T.parent[q[1]] != r:
            return False
    if p[0] == "C" and T.parent[p[2]] != r:
        return False
    return True  # type 1


def _boundary_walk(T: OrderedTree, p: Pattern, subs: list[Pattern]) -> list[int]:
    """Nodes of p covered by no direct subpattern.  Cost is proportional to
    the branching tree, not the coverage."""
    sub_at = {q[1]: q for q in subs}
    hole = p[2] if p[0] == "C" else None
    out = []
    stack = [p[1]]
    while stack:
        x = stack.pop()
        if x == hole:
            continue
        q = sub_at.get(x)
        if q is not None:
            if q[0] == "C":
                stack.append(q[2])  # resume below the subpattern's hole
            continue
        out.append(x)
        stack.extend(T.children[x])
    return out


def _maxsub(T: OrderedTree, p: Pattern, w: int) -> Pattern:
    if p[0] == "C" and w != p[2] and T.is_ancestor(w, p[2]):
        return ("C", w, p[2])
    return ("S", w)


def is_normal_form(T: OrderedTree, P: HierarchicalDefinition) -> bool:
    pt = PatternTree(P)
    for idx, p in enumerate(pt.order):
        subs = [pt.order[j] for j in pt.children[idx]]
        b = coverage_size(T, p) - sum(coverage_size(T, q) for q in subs)
        if not _shape_ok(T, p, subs, b):
            return False
    return True


def normalize(T: OrderedTree,
              P: HierarchicalDefinition,
              max_sweeps: int = 1000) -> HierarchicalDefinition:
    """Add subpatterns until every pattern is type 1 or type 2.

    Per failing pattern: the maximal subpattern at every boundary node and
    at every direct-subpattern root, plus the root-to-first-child split for
    contexts whose hole is not at a child.  Additions are determined by the
    local pattern structure, so equivalent patterns stay equivalent.
    """
    pats = set(P.patterns)
    for _ in range(max_sweeps):
        pt = PatternTree(HierarchicalDefinition(T, pats, validate=False))
        additions: set[Pattern] = set()
        dirty = False
        for idx, p in enumerate(pt.order):
            subs = [pt.order[j] for j in pt.children[idx]]
            b = coverage_size(T, p) - sum(coverage_size(T, q) for q in subs)
            if _shape_ok(T, p, subs, b):
                continue
            dirty = True
            r = p[1]
            for q in subs:
                additions.add(_maxsub(T, p, q[1]))
            for w in _boundary_walk(T, p, subs):
                if w != r:
                    additions.add(_maxsub(T, p, w))
            if p[0] == "C" and T.parent[p[2]] != r:
                c0 = next(c for c in T.children[r]
                          if T.is_ancestor(c, p[2]))
                additions.add(("C", r, c0))
        additions -= pats
        if not dirty:
            return HierarchicalDefinition(T, pats)
        if not additions:
            raise TermError("normalization is stuck")
        pats |= additions
    raise TermError("normalization did not converge")


def hierarchical_definition(T: OrderedTree) -> HierarchicalDefinition:
    """Full pipeline: binarize if needed, compress, lift, normalize."""
    if T.n == 1:
        return HierarchicalDefinition(T, {("S", T.root)})
    if T.is_full_binary():
        return normalize(T, compress(T))
    emb = binarize(T)
    return normalize(T, lift(compress(emb.btree), emb))


# ---------------------------------------------------------------------------
# Pattern equivalence classes


class PatternClassTable:
    """Canonical class ids: equal id iff the patterns' trees together with
    their sub-decompositions are isomorphic (labels and child order
    included)."""

    __slots__ = ("table", "count")

    def __init__(self, table: dict, count: int):
        self.table = table
        self.count = count

    def class_of(self, p: Pattern) -> int:
        return self.table[p]


def pattern_classes(T: OrderedTree, P: HierarchicalDefinition) -> PatternClassTable:
    pt = PatternTree(P)
    intern: dict[tuple, int] = {}
    cls: dict[Pattern, int] = {}
    for idx in range(len(pt.order) - 1, -1, -1):
        p = pt.order[idx]
        subs = [pt.order[j] for j in pt.children[idx]]
        sub_at = {q[1]: q for q in subs}
        hole = p[2] if p[0] == "C" else None
        # Flat token stream of the branching tree; nodes are self-delimiting
        # because boundary tokens carry their child counts.
        tokens: list = []
        stack = [p[1]]
        while stack:
            x = stack.pop()
            if x == hole:
                tokens.append("x")
                continue
            q = sub_at.get(x)
            if q is not None:
                if q[0] == "C":
                    tokens.append(("P1", cls[q]))
                    stack.append(q[2])
                else:
                    tokens.append(("P0", cls[q]))
                continue
            ch = T.children[x]
            tokens.append((T.labels[x], len(ch)))
            stack.extend(reversed(ch))
        code = tuple(tokens)
        cls[p] = intern.setdefault(code, len(intern))
    return PatternClassTable(cls, len(intern))

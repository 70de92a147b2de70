"""Prune-and-bypass tree contraction on full binary trees.

Internal leaves (all leaves except the leftmost and rightmost) are numbered
1..n left to right.  Rounds alternate: an even round 2i -> 2i+1 prunes the
odd-numbered internal leaves that are left children, the following odd round
prunes the odd-numbered ones that are right children and then halves the
surviving (even) numbers.  After 2*(floor(log2 n) + 1) rounds only the two
outermost leaves remain.

Each prune of a leaf w with parent v, grandparent u and sibling w' also
removes v and reattaches w' to u; the context that disappears into the new
edge (u, w') is recorded as a pattern.  The collected patterns plus the root
subtree pattern form a well-nested hierarchical definition of width <= 5.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .patterns import HierarchicalDefinition, Pattern
from .terms import OrderedTree, TermError


def _require_full_binary(T: OrderedTree) -> None:
    if not T.is_full_binary():
        raise TermError("tree is not full binary")


def internal_leaves(T: OrderedTree) -> list[int]:
    """Leaves in dfs order minus the first and last one."""
    _require_full_binary(T)
    leaves = T.leaves()
    return leaves[1:-1]


def round_count(n_int: int) -> int:
    if n_int <= 0:
        return 0
    return 2 * (n_int.bit_length())  # 2*(floor(log2 n)+1)


@dataclass
class PruneRecord:
    """One prune-and-bypass step: leaf w, parent v, grandparent u, sibling w',
    and the recorded context pattern (u_orig_child, w')."""
    w: int
    v: int
    u: int
    w_prime: int
    pattern: Pattern


@dataclass
class ContractionRound:
    index: int  # the round that produced this state; state is T_{index}
    prunes: list[PruneRecord] = field(default_factory=list)


@dataclass
class ContractionState:
    """The tree T_i: surviving nodes with their current parent/child maps."""
    round_index: int
    nodes: set[int]
    parent: dict[int, int]
    children: dict[int, list[int]]
    leaf_numbers: dict[int, int]  # surviving internal leaf -> current number

    def leaves(self) -> list[int]:
        return sorted(v for v in self.nodes if not self.children.get(v))


class ContractionRun:
    """Full trace of the contraction of one tree."""

    def __init__(self, T: OrderedTree):
        _require_full_binary(T)
        self.tree = T
        self.rounds: list[ContractionRound] = []
        self.patterns: list[Pattern] = []
        self._run()

    def _run(self) -> None:
        T = self.tree
        ileaves = internal_leaves(T)
        n_int = len(ileaves)
        self.n_int = n_int
        self.total_rounds = round_count(n_int)
        parent = {v: T.parent[v] for v in range(T.n)}
        children = {v: list(T.children[v]) for v in range(T.n)}
        number = {w: k + 1 for k, w in enumerate(ileaves)}
        current = list(ileaves)
        for r in range(1, self.total_rounds + 1):
            rec = ContractionRound(index=r)
            want_left = (r % 2 == 1)
            survivors = []
            for w in current:
                num = number[w]
                v = parent[w]
                is_left = children[v][0] == w
                if num % 2 == 1 and is_left == want_left:
                    u = parent[v]
                    w_prime = children[v][1] if is_left else children[v][0]
                    # Child of u in the original tree on the path down to w.
                    lc = T.children[u][0]
                    u_prime = lc if T.is_ancestor(lc, w) else T.children[u][1]
                    pat = ("C", u_prime, w_prime)
                    rec.prunes.append(PruneRecord(w, v, u, w_prime, pat))
                    self.patterns.append(pat)
                    # Bypass: w' takes v's place under u.
                    children[u][children[u].index(v)] = w_prime
                    parent[w_prime] = u
                    del parent[w], parent[v], children[v]
                    del number[w]
                else:
                    survivors.append(w)
            if not want_left:
                for w in survivors:
                    number[w] //= 2
            current = survivors
            self.rounds.append(rec)
        if current:
            raise TermError("contraction did not terminate on schedule")

    def hierarchical_definition(self) -> HierarchicalDefinition:
        pats = set(self.patterns)
        pats.add(("S", self.tree.root))
        return HierarchicalDefinition(self.tree, pats)


def contraction_patterns(T: OrderedTree) -> HierarchicalDefinition:
    """CP(T): all contraction patterns plus the largest pattern."""
    _require_full_binary(T)
    if len(internal_leaves(T)) == 0:
        return HierarchicalDefinition(T, {("S", T.root)})
    return ContractionRun(T).hierarchical_definition()


def _closure_state(T: OrderedTree, leaf_ids: list[int], round_index: int,
                   numbers: dict[int, int]) -> ContractionState:
    """Build the tree induced by a leaf set: inner nodes are the pairwise
    lcas of dfs-consecutive leaves, parents are nearest strict ancestors
    within the closure."""
    inner = {T.lca(a, b) for a, b in zip(leaf_ids, leaf_ids[1:])}
    nodes = sorted(inner | set(leaf_ids))
    parent: dict[int, int] = {}
    children: dict[int, list[int]] = {v: [] for v in nodes}
    stack: list[int] = []
    for v in nodes:  # dfs preorder
        while stack and not T.is_ancestor(stack[-1], v):
            stack.pop()
        if stack:
            parent[v] = stack[-1]
            children[stack[-1]].append(v)
        else:
            parent[v] = -1
        stack.append(v)
    return ContractionState(round_index, set(nodes), parent, children, numbers)


def tree_at_round(T: OrderedTree, i: int) -> ContractionState:
    """Materialize T_i directly from the leaf-survival rule.

    T_{2j} keeps the internal leaves whose number is divisible by 2^j; the
    odd round in between keeps the leaves of T_{2j+2} plus those leaves of
    T_{2j} that are right children there (a left-prune round cannot remove
    them).
    """
    _require_full_binary(T)
    ileaves = internal_leaves(T)
    n_int = len(ileaves)
    m = round_count(n_int)
    if not 0 <= i <= m:
        raise TermError(f"round index {i} out of range 0..{m}")
    all_leaves = T.leaves()
    first, last = all_leaves[0], all_leaves[-1]
    number = {w: k + 1 for k, w in enumerate(ileaves)}
    j = i // 2
    even_keep = [w for w in ileaves if number[w] % (1 << j) == 0]
    if i % 2 == 0:
        keep = even_keep
    else:
        # T_{2j+1}: the leaves of T_{2j+2}, plus those leaves of T_{2j} that
        # are right children in T_{2j} (they survive the left-prune round).
        state = _closure_state(T, [first] + even_keep + [last], 2 * j, {})
        keep = []
        for w in even_keep:
            if number[w] % (1 << (j + 1)) == 0:
                keep.append(w)
            else:
                p = state.parent[w]
                if state.children[p][-1] == w and len(state.children[p]) == 2:
                    keep.append(w)
    leaf_ids = [first] + keep + [last]
    nums = {w: number[w] >> j for w in keep}
    return _closure_state(T, leaf_ids, i, nums)


def state_to_dot(state: ContractionState, T: OrderedTree,
                 name: str = "round") -> str:
    lines = [f"digraph {name} {{", "  node [shape=circle];"]
    for v in sorted(state.nodes):
        label = T.labels[v]
        lines.append(f'  n{v} [label="{label}"];')
    for v in sorted(state.nodes):
        for c in state.children.get(v, []):
            lines.append(f"  n{v} -> n{c};")
    lines.append("}")
    return "\n".join(lines)

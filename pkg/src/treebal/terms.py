"""Terms and contexts over a ranked alphabet, plus an indexed ordered-tree view.

All algorithms are iterative: inputs routinely exceed Python's recursion
limit (caterpillar terms of depth 10^4 and more).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

#: Reserved hole symbol.  Never a member of any alphabet.
PARAM = "x"

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class TermError(ValueError):
    pass


class ParseError(TermError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class RankedAlphabet:
    """A finite set of function symbols with fixed arities."""

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.symbols]
        if len(set(names)) != len(names):
            raise TermError("duplicate symbol names in alphabet")
        for name, rank in self.symbols:
            if not _IDENT.fullmatch(name):
                raise TermError(f"invalid symbol name {name!r}")
            if rank < 0:
                raise TermError(f"negative rank for symbol {name!r}")
            if name == PARAM:
                raise TermError(f"{PARAM!r} is reserved for the hole")
        object.__setattr__(self, "_ranks", dict(self.symbols))

    @classmethod
    def of(cls, **ranks: int) -> "RankedAlphabet":
        return cls(tuple(ranks.items()))

    def rank(self, name: str) -> int:
        try:
            return self._ranks[name]
        except KeyError:
            raise TermError(f"unknown symbol {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._ranks

    def max_rank(self) -> int:
        return max((r for _, r in self.symbols), default=0)

    def label_count(self) -> int:
        return len(self.symbols)


class Term:
    """An immutable term; the hole symbol may appear as a leaf (contexts)."""

    __slots__ = ("symbol", "children", "size", "height", "_hash")

    def __init__(self, symbol: str, children: tuple["Term", ...] = ()):
        self.symbol = symbol
        self.children = children
        self.size = 1 + sum(c.size for c in children)
        self.height = 1 + max((c.height for c in children), default=-1)
        self._hash = hash((symbol, tuple(c._hash for c in children)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if a.symbol != b.symbol or len(a.children) != len(b.children) \
                    or a._hash != b._hash:
                return False
            stack.extend(zip(a.children, b.children))
        return True

    def __repr__(self):
        s = render_term(self)
        return s if len(s) <= 60 else s[:57] + "..."

    def holes(self) -> int:
        """Number of hole leaves, counted iteratively."""
        count = 0
        stack = [self]
        while stack:
            t = stack.pop()
            if t.symbol == PARAM:
                count += 1
            stack.extend(t.children)
        return count


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "(),":
            tokens.append((ch, ch, i))
            i += 1
            continue
        m = _IDENT.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {ch!r}", i)
        tokens.append(("ident", m.group(), i))
        i = m.end()
    tokens.append(("end", "", n))
    return tokens


def parse_term(text: str, alphabet: RankedAlphabet | None = None,
               allow_hole: bool = False) -> Term:
    """Parse ``sym`` or ``sym(t,...,t)``.

    With an explicit alphabet, every symbol must be declared and used at its
    declared rank.  Without one, ranks are inferred from first use and any
    inconsistent reuse is an error.
    """
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    inferred: dict[str, int] = {}

    def check(name: str, rank: int, offset: int):
        if name == PARAM:
            if not allow_hole:
                raise ParseError(f"{PARAM!r} is reserved for the hole", offset)
            if rank != 0:
                raise ParseError("hole symbol takes no arguments", offset)
            return
        if alphabet is not None:
            try:
                declared = alphabet.rank(name)
            except TermError:
                raise ParseError(f"unknown symbol {name!r}", offset) from None
            if declared != rank:
                raise ParseError(
                    f"arity mismatch for {name!r}: declared {declared}, used {rank}",
                    offset)
        else:
            declared = inferred.setdefault(name, rank)
            if declared != rank:
                raise ParseError(
                    f"arity mismatch for {name!r}: first used with {declared}, now {rank}",
                    offset)

    # Iterative recursive descent: each frame is (symbol, offset, children).
    stack: list[tuple[str, int, list[Term]]] = []
    result: Term | None = None
    while True:
        kind, value, offset = peek()
        if kind != "ident":
            raise ParseError("expected a symbol", offset)
        pos += 1
        kind2, _, offset2 = peek()
        if kind2 == "(":
            pos += 1
            stack.append((value, offset, []))
            continue
        # A leaf; close as many frames as possible.
        check(value, 0, offset)
        node = Term(value)
        while True:
            if not stack:
                result = node
                break
            stack[-1][2].append(node)
            kind3, _, offset3 = peek()
            if kind3 == ",":
                pos += 1
                node = None
                break
            if kind3 != ")":
                raise ParseError("expected ',' or ')'", offset3)
            pos += 1
            symbol, soffset, children = stack.pop()
            check(symbol, len(children), soffset)
            node = Term(symbol, tuple(children))
        if node is None:
            continue
        if result is not None:
            break
    kind, _, offset = peek()
    if kind != "end":
        raise ParseError("trailing input after term", offset)
    return result


def render_term(t: Term) -> str:
    out: list[str] = []
    # Work items: a term to emit, or a literal string.
    stack: list[object] = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        out.append(item.symbol)
        if item.children:
            out.append("(")
            stack.append(")")
            for i, c in enumerate(reversed(item.children)):
                if i:
                    stack.append(",")
                stack.append(c)
    return "".join(out)


def infer_alphabet(*terms: Term) -> RankedAlphabet:
    ranks: dict[str, int] = {}
    for t in terms:
        stack = [t]
        while stack:
            u = stack.pop()
            if u.symbol != PARAM:
                r = ranks.setdefault(u.symbol, len(u.children))
                if r != len(u.children):
                    raise TermError(f"inconsistent rank for {u.symbol!r}")
            stack.extend(u.children)
    return RankedAlphabet(tuple(sorted(ranks.items())))


class Context:
    """A term with exactly one hole leaf."""

    __slots__ = ("term",)

    def __init__(self, term: Term):
        if term.holes() != 1:
            raise TermError("a context has exactly one hole")
        self.term = term

    def __eq__(self, other):
        return isinstance(other, Context) and self.term == other.term

    def __hash__(self):
        return hash(("context", self.term))

    def __repr__(self):
        return f"Context({render_term(self.term)})"

    def hole_path(self) -> tuple[int, ...]:
        """Child indices from the root down to the hole."""
        path = []
        t = self.term
        while t.symbol != PARAM:
            for i, c in enumerate(t.children):
                if c.holes() == 1:
                    path.append(i)
                    t = c
                    break
        return tuple(path)

    def apply_term(self, t: Term) -> Term:
        return _splice(self.term, t)

    def apply_context(self, c: "Context") -> "Context":
        return Context(_splice(self.term, c.term))


def _splice(host: Term, plug: Term) -> Term:
    """Replace the unique hole leaf of ``host`` by ``plug``."""
    spine: list[Term] = []
    t = host
    idx: list[int] = []
    while t.symbol != PARAM:
        for i, c in enumerate(t.children):
            if c.holes() >= 1:
                spine.append(t)
                idx.append(i)
                t = c
                break
        else:  # pragma: no cover - validated by Context
            raise TermError("no hole to splice into")
    node = plug
    for parent, i in zip(reversed(spine), reversed(idx)):
        children = parent.children[:i] + (node,) + parent.children[i + 1:]
        node = Term(parent.symbol, children)
    return node


def parse_context(text: str, alphabet: RankedAlphabet | None = None) -> Context:
    return Context(parse_term(text, alphabet, allow_hole=True))


class OrderedTree:
    """Rooted ordered labelled tree with dense preorder ids.

    Node ids are depth-first preorder numbers, so the subtree of ``v`` is the
    contiguous id range ``[v, v + size[v])`` and ``dfs_less`` is integer
    comparison.
    """

    __slots__ = ("labels", "parent", "children", "size", "depth", "n",
                 "_euler", "_euler_first", "_sparse")

    def __init__(self, labels, parent, children, size, depth):
        self.labels = labels
        self.parent = parent
        self.children = children
        self.size = size
        self.depth = depth
        self.n = len(labels)
        self._euler = None
        self._euler_first = None
        self._sparse = None

    @property
    def root(self) -> int:
        return 0

    @classmethod
    def from_term(cls, t: Term) -> "OrderedTree":
        n = t.size
        labels = [None] * n
        parent = [-1] * n
        children = [None] * n
        size = [0] * n
        depth = [0] * n
        stack = [(t, -1, 0)]
        next_id = 0
        while stack:
            node, par, dep = stack.pop()
            v = next_id
            next_id += 1
            labels[v] = node.symbol
            parent[v] = par
            size[v] = node.size
            depth[v] = dep
            children[v] = []
            if par >= 0:
                children[par].append(v)
            for c in reversed(node.children):
                stack.append((c, v, dep + 1))
        # Reversed push order makes pops preorder-correct but appends children
        # in reverse; fix up.
        # (We pushed children reversed so they pop left-to-right; appends are
        # then already in left-to-right order.)
        return cls(labels, parent, children, size, depth)

    @classmethod
    def from_structure(cls, labels, children_lists) -> "OrderedTree":
        """Build from explicit child lists given in node-id order; re-ids nodes
        into preorder."""
        n = len(labels)
        order = []
        stack = [0]
        while stack:
            v = stack.pop()
            order.append(v)
            for c in reversed(children_lists[v]):
                stack.append(c)
        remap = {old: new for new, old in enumerate(order)}
        new_labels = [labels[old] for old in order]
        new_children = [[remap[c] for c in children_lists[old]] for old in order]
        parent = [-1] * n
        depth = [0] * n
        size = [1] * n
        for v in range(n):
            for c in new_children[v]:
                parent[c] = v
                depth[c] = depth[v] + 1
        for v in range(n - 1, -1, -1):
            for c in new_children[v]:
                size[v] += size[c]
        return cls(new_labels, parent, new_children, size, depth)

    def to_term(self) -> Term:
        built: list[Term | None] = [None] * self.n
        # Post-order over preorder ids: children ids are all larger, so a
        # reverse-id sweep sees children before parents.
        for v in range(self.n - 1, -1, -1):
            built[v] = Term(self.labels[v], tuple(built[c] for c in self.children[v]))
        return built[0]

    # -- queries ---------------------------------------------------------

    def _check(self, v: int):
        if not 0 <= v < self.n:
            raise IndexError(f"node id {v} out of range")

    def is_ancestor(self, u: int, v: int) -> bool:
        """Reflexive ancestor test."""
        if u < 0 or v < 0 or u >= self.n or v >= self.n:
            raise IndexError(f"node id out of range: {u}, {v}")
        return u <= v < u + self.size[u]

    def dfs_less(self, u: int, v: int) -> bool:
        if u < 0 or v < 0 or u >= self.n or v >= self.n:
            raise IndexError(f"node id out of range: {u}, {v}")
        return u < v

    def subtree_size(self, u: int) -> int:
        self._check(u)
        return self.size[u]

    def dfs_in(self, u: int) -> int:
        return u

    def dfs_out(self, u: int) -> int:
        return u + self.size[u] - 1

    def _build_lca(self):
        n = self.n
        euler = np.empty(2 * n - 1 if n else 0, dtype=np.int64)
        first = np.empty(n, dtype=np.int64)
        # Iterative Euler tour.
        pos = 0
        stack = [(0, 0)]  # (node, next child index)
        seen = [False] * n
        while stack:
            v, ci = stack[-1]
            if not seen[v]:
                seen[v] = True
                first[v] = pos
            euler[pos] = v
            pos += 1
            if ci < len(self.children[v]):
                stack[-1] = (v, ci + 1)
                stack.append((self.children[v][ci], 0))
            else:
                stack.pop()
        euler = euler[:pos]
        depth = np.asarray(self.depth, dtype=np.int64)[euler]
        m = len(euler)
        levels = max(1, m.bit_length())
        sparse = [np.arange(m)]
        for k in range(1, levels):
            half = 1 << (k - 1)
            if half * 2 > m:
                break
            prev = sparse[-1]
            left = prev[: m - 2 * half + 1]
            right = prev[half: m - half + 1]
            take_right = depth[right] < depth[left]
            sparse.append(np.where(take_right, right, left))
        self._euler = euler
        self._euler_first = first
        self._sparse = (sparse, depth)

    def lca(self, u: int, v: int) -> int:
        self._check(u)
        self._check(v)
        if self.is_ancestor(u, v):
            return u
        if self.is_ancestor(v, u):
            return v
        if self._euler is None:
            self._build_lca()
        sparse, depth = self._sparse
        lo = int(self._euler_first[u])
        hi = int(self._euler_first[v])
        if lo > hi:
            lo, hi = hi, lo
        span = hi - lo + 1
        k = span.bit_length() - 1
        table = sparse[k]
        i1 = int(table[lo])
        i2 = int(table[hi - (1 << k) + 1])
        best = i1 if depth[i1] <= depth[i2] else i2
        return int(self._euler[best])

    def leaves(self) -> list[int]:
        return [v for v in range(self.n) if not self.children[v]]

    def is_full_binary(self) -> bool:
        return all(len(c) in (0, 2) for c in self.children)


def tree_of(t: Term) -> OrderedTree:
    return OrderedTree.from_term(t)

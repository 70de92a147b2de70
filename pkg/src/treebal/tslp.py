"""Tree straight-line programs as circuits over terms and contexts.

Gate kinds: ``con`` (constructor f, term-sorted), ``hat`` (hole constructor
f with the hole at 1-based position i, context-sorted), ``sub`` (plug a term
into a context's hole), ``comp`` (context composition: comp(s,t)(x) =
s(t(x))), and ``copy``.  Gate ids are dense and topologically ordered.
"""

from __future__ import annotations

import os

from .patterns import HierarchicalDefinition, PatternTree, coverage_size
from .terms import PARAM, OrderedTree, Term, TermError

DEFAULT_UNFOLD_CAP = 10 ** 8


class CapacityError(TermError):
    pass


class TslpCircuit:
    """Immutable gate list; children ids always precede the gate."""

    __slots__ = ("op", "sym", "hidx", "children", "sort", "output", "ranks")

    def __init__(self, op, sym, hidx, children, sort, output, ranks):
        self.op = op
        self.sym = sym
        self.hidx = hidx
        self.children = children
        self.sort = sort
        self.output = output
        self.ranks = ranks
        self.validate()

    @property
    def n(self) -> int:
        return len(self.op)

    def validate(self) -> None:
        for g in range(self.n):
            op = self.op[g]
            kids = self.children[g]
            if any(not 0 <= c < g for c in kids):
                raise TermError(f"gate {g} is not topologically ordered")
            if op == "con":
                r = self.ranks[self.sym[g]]
                if len(kids) != r or any(self.sort[c] != "T" for c in kids):
                    raise TermError(f"gate {g}: constructor arity/sort")
                ok = self.sort[g] == "T"
            elif op == "hat":
                r = self.ranks[self.sym[g]]
                if not 1 <= self.hidx[g] <= r:
                    raise TermError(f"gate {g}: hole index out of range")
                if len(kids) != r - 1 or any(self.sort[c] != "T" for c in kids):
                    raise TermError(f"gate {g}: hole-constructor arity/sort")
                ok = self.sort[g] == "C"
            elif op == "sub":
                ok = (len(kids) == 2 and self.sort[kids[0]] == "C"
                      and self.sort[kids[1]] == "T" and self.sort[g] == "T")
            elif op == "comp":
                ok = (len(kids) == 2 and self.sort[kids[0]] == "C"
                      and self.sort[kids[1]] == "C" and self.sort[g] == "C")
            elif op == "copy":
                ok = len(kids) == 1 and self.sort[kids[0]] == self.sort[g]
            else:
                raise TermError(f"gate {g}: unknown op {op!r}")
            if not ok:
                raise TermError(f"gate {g}: sort discipline violated ({op})")
        if self.sort[self.output] != "T":
            raise TermError("output gate must be term-sorted")

    def stats(self) -> dict:
        depth = [0] * self.n
        for g in range(self.n):
            if self.children[g]:
                depth[g] = 1 + max(depth[c] for c in self.children[g])
        return {"size": self.n, "depth": depth[self.output] if self.n else 0}

    def to_dot(self, name: str = "tslp") -> str:
        lines = [f"digraph {name} {{", "  node [shape=record];"]
        for g in range(self.n):
            op = self.op[g]
            if op == "con":
                lab = self.sym[g]
            elif op == "hat":
                lab = f"{self.sym[g]}^{self.hidx[g]}"
            else:
                lab = op
            color = "lightblue" if self.sort[g] == "T" else "lightyellow"
            shape = f'label="{g}: {lab}", style=filled, fillcolor={color}'
            lines.append(f"  g{g} [{shape}];")
            for c in self.children[g]:
                lines.append(f"  g{g} -> g{c};")
        lines.append(f'  out [shape=plaintext, label="out"];')
        lines.append(f"  out -> g{self.output};")
        lines.append("}")
        return "\n".join(lines)


class TslpBuilder:
    def __init__(self, ranks: dict):
        self.op: list[str] = []
        self.sym: list = []
        self.hidx: list = []
        self.children: list[tuple] = []
        self.sort: list[str] = []
        self.ranks = dict(ranks)

    def _add(self, op, sym, hidx, kids, sort) -> int:
        self.op.append(op)
        self.sym.append(sym)
        self.hidx.append(hidx)
        self.children.append(tuple(kids))
        self.sort.append(sort)
        return len(self.op) - 1

    def con(self, sym, kids=()) -> int:
        return self._add("con", sym, None, kids, "T")

    def hat(self, sym, i, kids=()) -> int:
        return self._add("hat", sym, i, kids, "C")

    def sub(self, c, t) -> int:
        return self._add("sub", None, None, (c, t), "T")

    def comp(self, outer, inner) -> int:
        return self._add("comp", None, None, (outer, inner), "C")

    def copy(self, g) -> int:
        return self._add("copy", None, None, (g,), self.sort[g])

    def finish(self, output: int) -> TslpCircuit:
        return TslpCircuit(self.op, self.sym, self.hidx, self.children,
                           self.sort, output, self.ranks)


# ---------------------------------------------------------------------------
# Construction from a normal-form hierarchical definition


def build_tslp(T: OrderedTree, P: HierarchicalDefinition) -> TslpCircuit:
    """One gate per pattern; the gate tree mirrors the pattern tree."""
    ranks = {}
    for v in range(T.n):
        ranks.setdefault(T.labels[v], len(T.children[v]))
    pt = PatternTree(P)
    b = TslpBuilder(ranks)
    gate: dict = {}
    for idx in range(len(pt.order) - 1, -1, -1):
        p = pt.order[idx]
        subs = [pt.order[j] for j in pt.children[idx]]
        bsize = coverage_size(T, p) - sum(coverage_size(T, q) for q in subs)
        r = p[1]
        if bsize == 1:
            # type 1: a constructor (or hole constructor) at the root
            by_root = {q[1]: q for q in subs}
            f = T.labels[r]
            if p[0] == "S":
                kids = [gate[by_root[c]] for c in T.children[r]]
                gate[p] = b.con(f, kids)
            else:
                w = p[2]
                if T.parent[w] != r:
                    raise TermError("pattern is not in normal form")
                hole_pos = T.children[r].index(w) + 1
                kids = [gate[by_root[c]] for c in T.children[r] if c != w]
                gate[p] = b.hat(f, hole_pos, kids)
        elif bsize == 0 and len(subs) == 2:
            # type 2: split into an outer context and an inner part
            outer = next(q for q in subs if q[1] == r)
            inner = next(q for q in subs if q is not outer)
            if p[0] == "S":
                gate[p] = b.sub(gate[outer], gate[inner])
            else:
                gate[p] = b.comp(gate[outer], gate[inner])
        else:
            raise TermError("pattern is not in normal form")
    return b.finish(gate[("S", T.root)])


# ---------------------------------------------------------------------------
# Transformations


def minimal_dag(C: TslpCircuit) -> TslpCircuit:
    """Hash-cons gates bottom-up; identical (op, symbol, hole, children)
    collapse to one gate.  Idempotent."""
    intern: dict[tuple, int] = {}
    remap = [0] * C.n
    b = TslpBuilder(C.ranks)
    for g in range(C.n):
        key = (C.op[g], C.sym[g], C.hidx[g],
               tuple(remap[c] for c in C.children[g]))
        hit = intern.get(key)
        if hit is None:
            hit = b._add(C.op[g], C.sym[g], C.hidx[g], key[3], C.sort[g])
            intern[key] = hit
        remap[g] = hit
    return b.finish(remap[C.output])


def eliminate_copies(C: TslpCircuit) -> TslpCircuit:
    """Contract every copy chain to its first non-copy target; drops the
    copy gates and any gates left unreachable."""
    target = list(range(C.n))
    for g in range(C.n):
        if C.op[g] == "copy":
            t = C.children[g][0]
            seen = {g}
            while C.op[t] == "copy":
                if t in seen:
                    raise TermError("copy cycle")
                seen.add(t)
                t = C.children[t][0]
            target[g] = t
    keep = [g for g in range(C.n) if C.op[g] != "copy"]
    remap = {}
    b = TslpBuilder(C.ranks)
    for g in keep:
        kids = tuple(remap[target[c]] for c in C.children[g])
        remap[g] = b._add(C.op[g], C.sym[g], C.hidx[g], kids, C.sort[g])
    return b.finish(remap[target[C.output]])


def resolve_address(C: TslpCircuit, g: int, rho) -> int | None:
    """Follow 1-based child indices from gate g; None when a step is
    undefined."""
    cur = g
    for d in rho:
        kids = C.children[cur]
        if not 1 <= d <= len(kids):
            return None
        cur = kids[d - 1]
    return cur


# ---------------------------------------------------------------------------
# Unfolding


def _splice_at(host: Term, path, plug: Term) -> Term:
    spine = []
    t = host
    for i in path:
        spine.append(t)
        t = t.children[i]
    node = plug
    for parent, i in zip(reversed(spine), reversed(path)):
        node = Term(parent.symbol,
                    parent.children[:i] + (node,) + parent.children[i + 1:])
    return node


def unfold(C: TslpCircuit, cap: int | None = None) -> Term:
    """The unique term the circuit derives.  Contexts are carried as a term
    plus the path to the hole so substitution shares structure."""
    if cap is None:
        cap = int(os.environ.get("TREEBAL_UNFOLD_CAP", DEFAULT_UNFOLD_CAP))
    reach = _reachable(C)
    sizes: dict[int, int] = {}
    for g in reach:
        op = C.op[g]
        if op in ("con", "hat"):
            s = 1 + sum(sizes[c] for c in C.children[g])
        elif op in ("sub", "comp"):
            s = sizes[C.children[g][0]] + sizes[C.children[g][1]]
        else:
            s = sizes[C.children[g][0]]
        if s > cap:
            raise CapacityError(
                f"unfolded size exceeds cap {cap} at gate {g}")
        sizes[g] = s
    hole = Term(PARAM)
    val: dict[int, object] = {}
    for g in reach:
        op = C.op[g]
        kids = C.children[g]
        if op == "con":
            val[g] = Term(C.sym[g], tuple(val[c] for c in kids))
        elif op == "hat":
            i = C.hidx[g] - 1
            args = [val[c] for c in kids]
            args.insert(i, hole)
            val[g] = (Term(C.sym[g], tuple(args)), (i,))
        elif op == "sub":
            body, path = val[kids[0]]
            val[g] = _splice_at(body, path, val[kids[1]])
        elif op == "comp":
            b1, p1 = val[kids[0]]
            b2, p2 = val[kids[1]]
            val[g] = (_splice_at(b1, p1, b2), p1 + p2)
        else:
            val[g] = val[kids[0]]
    return val[C.output]


def _reachable(C: TslpCircuit) -> list[int]:
    seen = set()
    stack = [C.output]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        stack.extend(C.children[g])
    return sorted(seen)


# ---------------------------------------------------------------------------
# Textual productions


def productions(C: TslpCircuit) -> str:
    """One production per gate, in the four normal forms."""
    lines = []
    for g in range(C.n):
        op = C.op[g]
        kids = C.children[g]
        if op == "con":
            args = ",".join(f"N{c}" for c in kids)
            rhs = f"{C.sym[g]}({args})" if kids else C.sym[g]
            lines.append(f"N{g} -> {rhs}")
        elif op == "hat":
            args = [f"N{c}" for c in kids]
            args.insert(C.hidx[g] - 1, "x")
            lines.append(f"N{g}(x) -> {C.sym[g]}({','.join(args)})")
        elif op == "sub":
            lines.append(f"N{g} -> N{kids[0]}(N{kids[1]})")
        elif op == "comp":
            lines.append(f"N{g}(x) -> N{kids[0]}(N{kids[1]}(x))")
        else:
            raise TermError("copy gates have no production form")
    lines.append(f"start N{C.output}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# End-to-end balance


def balance(t: Term) -> TslpCircuit:
    """Normal-form TSLP for t: depth O(log n), size O(n/log n)."""
    from .decomposition import hierarchical_definition

    T = OrderedTree.from_term(t)
    P = hierarchical_definition(T)
    return minimal_dag(build_tslp(T, P))

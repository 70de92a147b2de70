"""Balancing regular expressions.

The balanced circuit over the regular-expression algebra has logarithmic
depth, hence logarithmic star height.  Context gates are linear term
functions of two closed forms:

* Type3: x -> a x b + c
* Type4: x -> alpha (a x b + c)* gamma + delta

Composition stays inside these forms; the only nontrivial step is
Type4-after-Type4, which uses the Kleene identity

    (alpha beta* gamma + delta)*
        = delta* alpha (beta + gamma delta* alpha)* gamma delta* + delta*

Verification is by language equivalence via memoized Brzozowski
derivatives over hash-consed expressions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import OrderedTree, Term, TermError
from .tslp import TslpCircuit, build_tslp, minimal_dag

# ---------------------------------------------------------------------------
# Hash-consed regular expressions


class Regex:
    """Interned AST node; equal languages up to the built-in similarity
    laws (flattening, neutral elements, idempotent union, collapsed stars)
    share one object, so identity is structural equality."""

    __slots__ = ("kind", "sym", "args", "uid", "nullable")

    def __init__(self, kind, sym, args, uid, nullable):
        self.kind = kind
        self.sym = sym
        self.args = args
        self.uid = uid
        self.nullable = nullable

    def __repr__(self):
        return f"Regex({render_regex(self)})"


_intern: dict[tuple, Regex] = {}


def _mk(kind, sym, args, nullable) -> Regex:
    key = (kind, sym, tuple(a.uid for a in args))
    hit = _intern.get(key)
    if hit is None:
        hit = Regex(kind, sym, args, len(_intern), nullable)
        _intern[key] = hit
    return hit


REMPTY = _mk("0", None, (), False)
REPS = _mk("1", None, (), True)


def rsym(ch: str) -> Regex:
    return _mk("sym", ch, (), False)


def runion(*parts: Regex) -> Regex:
    items: set[Regex] = set()
    for p in parts:
        if p.kind == "or":
            items.update(p.args)
        elif p is not REMPTY:
            items.add(p)
    if not items:
        return REMPTY
    if len(items) == 1:
        return next(iter(items))
    args = tuple(sorted(items, key=lambda r: r.uid))
    return _mk("or", None, args, any(a.nullable for a in args))


def rcat(*parts: Regex) -> Regex:
    items: list[Regex] = []
    for p in parts:
        if p is REMPTY:
            return REMPTY
        if p is REPS:
            continue
        if p.kind == "cat":
            items.extend(p.args)
        else:
            items.append(p)
    if not items:
        return REPS
    if len(items) == 1:
        return items[0]
    return _mk("cat", None, tuple(items), all(a.nullable for a in items))


def rstar(r: Regex) -> Regex:
    if r is REMPTY or r is REPS:
        return REPS
    if r.kind == "star":
        return r
    return _mk("star", None, (r,), True)


def _cat_tail(args: tuple) -> Regex:
    if len(args) == 1:
        return args[0]
    return _mk("cat", None, args, all(a.nullable for a in args))


_deriv_memo: dict[tuple, Regex] = {}


def deriv(r: Regex, ch: str) -> Regex:
    """Brzozowski derivative, memoized over the interned dag."""
    out = _deriv_memo
    stack = [r]
    while stack:
        t = stack[-1]
        key = (t.uid, ch)
        if key in out:
            stack.pop()
            continue
        kind = t.kind
        if kind in ("0", "1"):
            out[key] = REMPTY
            stack.pop()
        elif kind == "sym":
            out[key] = REPS if t.sym == ch else REMPTY
            stack.pop()
        elif kind == "or":
            missing = [a for a in t.args if (a.uid, ch) not in out]
            if missing:
                stack.extend(missing)
                continue
            out[key] = runion(*(out[(a.uid, ch)] for a in t.args))
            stack.pop()
        elif kind == "star":
            inner = t.args[0]
            if (inner.uid, ch) not in out:
                stack.append(inner)
                continue
            out[key] = rcat(out[(inner.uid, ch)], t)
            stack.pop()
        else:  # cat
            head, tail = t.args[0], _cat_tail(t.args[1:])
            need = [head]
            if head.nullable:
                need.append(tail)
            missing = [a for a in need if (a.uid, ch) not in out]
            if missing:
                stack.extend(missing)
                continue
            d = rcat(out[(head.uid, ch)], tail)
            if head.nullable:
                d = runion(d, out[(tail.uid, ch)])
            out[key] = d
            stack.pop()
    return out[(r.uid, ch)]


def alphabet(r: Regex) -> set[str]:
    seen: set[int] = set()
    syms: set[str] = set()
    stack = [r]
    while stack:
        t = stack.pop()
        if t.uid in seen:
            continue
        seen.add(t.uid)
        if t.kind == "sym":
            syms.add(t.sym)
        stack.extend(t.args)
    return syms


_pd_memo: dict[tuple, frozenset] = {}


def partial_deriv(r: Regex, ch: str) -> frozenset:
    """Antimirov partial derivatives: a set of expressions whose union is
    the derivative.  At most one state per symbol occurrence, so the
    determinized automaton stays small where plain derivatives explode."""
    out = _pd_memo
    stack = [r]
    while stack:
        t = stack[-1]
        key = (t.uid, ch)
        if key in out:
            stack.pop()
            continue
        kind = t.kind
        if kind in ("0", "1"):
            out[key] = frozenset()
            stack.pop()
        elif kind == "sym":
            out[key] = frozenset((REPS,)) if t.sym == ch else frozenset()
            stack.pop()
        elif kind == "or":
            missing = [a for a in t.args if (a.uid, ch) not in out]
            if missing:
                stack.extend(missing)
                continue
            acc: set = set()
            for a in t.args:
                acc |= out[(a.uid, ch)]
            out[key] = frozenset(acc)
            stack.pop()
        elif kind == "star":
            inner = t.args[0]
            if (inner.uid, ch) not in out:
                stack.append(inner)
                continue
            out[key] = frozenset(rcat(d, t) for d in out[(inner.uid, ch)])
            stack.pop()
        else:  # cat
            head, tail = t.args[0], _cat_tail(t.args[1:])
            need = [head]
            if head.nullable:
                need.append(tail)
            missing = [a for a in need if (a.uid, ch) not in out]
            if missing:
                stack.extend(missing)
                continue
            acc = {rcat(d, tail) for d in out[(head.uid, ch)]}
            if head.nullable:
                acc |= out[(tail.uid, ch)]
            out[key] = frozenset(acc)
            stack.pop()
    return out[(r.uid, ch)]


def regex_equiv(r1: Regex, r2: Regex, budget: int = 10 ** 5) -> bool:
    """Exact language equality: bisimulation over determinized
    partial-derivative automata."""
    syms = sorted(alphabet(r1) | alphabet(r2))

    def step(state: frozenset, ch: str) -> frozenset:
        acc: set = set()
        for q in state:
            acc |= partial_deriv(q, ch)
        return frozenset(acc)

    seen: set[tuple] = set()
    work = [(frozenset((r1,)), frozenset((r2,)))]
    while work:
        a, b = work.pop()
        key = (a, b)
        if key in seen:
            continue
        if any(q.nullable for q in a) != any(q.nullable for q in b):
            return False
        seen.add(key)
        if len(seen) > budget:
            raise TermError("equivalence state budget exceeded")
        if a == b:
            continue  # identical residual state sets need no expansion
        for ch in syms:
            work.append((step(a, ch), step(b, ch)))
    return True


def star_height(r: Regex) -> int:
    h: dict[int, int] = {}
    stack = [r]
    while stack:
        t = stack[-1]
        if t.uid in h:
            stack.pop()
            continue
        missing = [a for a in t.args if a.uid not in h]
        if missing:
            stack.extend(missing)
            continue
        inner = max((h[a.uid] for a in t.args), default=0)
        h[t.uid] = inner + (1 if t.kind == "star" else 0)
        stack.pop()
    return h[r.uid]


# ---------------------------------------------------------------------------
# Concrete syntax


def parse_regex(text: str) -> Regex:
    """Grammar: ``0 | 1 | sym | r+r | r.r | r* | (r)`` with star > concat >
    union; concatenation may be implicit."""
    operands: list[Regex] = []
    ops: list[str] = []  # "+", ".", "("

    def reduce_op(op):
        if len(operands) < 2:
            raise TermError("missing operand")
        b = operands.pop()
        a = operands.pop()
        operands.append(runion(a, b) if op == "+" else rcat(a, b))

    def push_binary(op, prec):
        while ops and ops[-1] != "(" and (2 if ops[-1] == "." else 1) >= prec:
            reduce_op(ops.pop())
        ops.append(op)

    prev_operand = False
    for i, ch in enumerate(text):
        if ch.isspace():
            continue
        if ch == "(":
            if prev_operand:
                push_binary(".", 2)
            ops.append("(")
            prev_operand = False
        elif ch == ")":
            while ops and ops[-1] != "(":
                reduce_op(ops.pop())
            if not ops:
                raise ParseFailure("unbalanced ')'", i)
            ops.pop()
            prev_operand = True
        elif ch == "*":
            if not prev_operand or not operands:
                raise ParseFailure("'*' needs an operand", i)
            operands.append(rstar(operands.pop()))
        elif ch == "+":
            if not prev_operand:
                raise ParseFailure("'+' needs a left operand", i)
            push_binary("+", 1)
            prev_operand = False
        elif ch == ".":
            if not prev_operand:
                raise ParseFailure("'.' needs a left operand", i)
            push_binary(".", 2)
            prev_operand = False
        elif ch.isalnum():
            if prev_operand:
                push_binary(".", 2)
            if ch == "0":
                operands.append(REMPTY)
            elif ch == "1":
                operands.append(REPS)
            else:
                operands.append(rsym(ch))
            prev_operand = True
        else:
            raise ParseFailure(f"unexpected character {ch!r}", i)
    while ops:
        op = ops.pop()
        if op == "(":
            raise ParseFailure("unbalanced '('", len(text))
        reduce_op(op)
    if len(operands) != 1:
        raise ParseFailure("empty or malformed expression", len(text))
    return operands[0]


class ParseFailure(TermError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


def render_regex(r: Regex) -> str:
    # prec: or=1, cat=2, atom/star=3
    out: dict[int, tuple[str, int]] = {}
    stack = [r]
    while stack:
        t = stack[-1]
        if t.uid in out:
            stack.pop()
            continue
        missing = [a for a in t.args if a.uid not in out]
        if missing:
            stack.extend(missing)
            continue
        kind = t.kind
        if kind == "0":
            out[t.uid] = ("0", 3)
        elif kind == "1":
            out[t.uid] = ("1", 3)
        elif kind == "sym":
            out[t.uid] = (t.sym, 3)
        elif kind == "star":
            s, p = out[t.args[0].uid]
            out[t.uid] = ((s if p >= 3 else f"({s})") + "*", 3)
        elif kind == "cat":
            parts = []
            for a in t.args:
                s, p = out[a.uid]
                parts.append(s if p >= 2 else f"({s})")
            out[t.uid] = ("".join(parts), 2)
        else:
            parts = []
            for a in t.args:
                s, p = out[a.uid]
                parts.append(s if p >= 1 else f"({s})")
            out[t.uid] = ("+".join(parts), 1)
        stack.pop()
    return out[r.uid][0]


# ---------------------------------------------------------------------------
# Circuits over the regular-expression operations


class RegexCircuit:
    __slots__ = ("op", "sym", "children", "output")

    def __init__(self, op, sym, children, output):
        self.op = op
        self.sym = sym
        self.children = children
        self.output = output

    @property
    def n(self) -> int:
        return len(self.op)

    def stats(self) -> dict:
        depth = [0] * self.n
        for g in range(self.n):
            if self.children[g]:
                depth[g] = 1 + max(depth[c] for c in self.children[g])
        return {"size": self.n, "depth": depth[self.output] if self.n else 0}

    def star_height(self) -> int:
        """Maximum number of star gates on a path from the output down."""
        h = [0] * self.n
        for g in range(self.n):
            inner = max((h[c] for c in self.children[g]), default=0)
            h[g] = inner + (1 if self.op[g] == "star" else 0)
        return h[self.output]

    def to_dot(self, name: str = "regex") -> str:
        lines = [f"digraph {name} {{"]
        for g in range(self.n):
            lab = {"sym": self.sym[g], "eps": "1", "empty": "0",
                   "or": "+", "cat": ".", "star": "*"}[self.op[g]]
            lines.append(f'  g{g} [label="{lab}"];')
            for c in self.children[g]:
                lines.append(f"  g{g} -> g{c};")
        lines.append(f"  out -> g{self.output};")
        lines.append("}")
        return "\n".join(lines)

    def unfold_regex(self, gate: int | None = None) -> Regex:
        """The (shared, interned) expression a gate denotes."""
        val: list[Regex | None] = [None] * self.n
        for g in range(self.n):
            op = self.op[g]
            kids = self.children[g]
            if op == "sym":
                val[g] = rsym(self.sym[g])
            elif op == "eps":
                val[g] = REPS
            elif op == "empty":
                val[g] = REMPTY
            elif op == "or":
                val[g] = runion(val[kids[0]], val[kids[1]])
            elif op == "cat":
                val[g] = rcat(val[kids[0]], val[kids[1]])
            else:
                val[g] = rstar(val[kids[0]])
        return val[gate if gate is not None else self.output]


class RegexBuilder:
    """Hash-consing builder with the light neutral-element simplifications
    (x+0 = x, x.1 = x, 0* = 1* = 1, double star collapsed)."""

    def __init__(self):
        self.op: list[str] = []
        self.sym: list = []
        self.children: list[tuple] = []
        self._intern: dict[tuple, int] = {}
        self.EMPTY = self._add("empty", None, ())
        self.EPS = self._add("eps", None, ())

    def _add(self, op, sym, kids) -> int:
        key = (op, sym, kids)
        hit = self._intern.get(key)
        if hit is None:
            self.op.append(op)
            self.sym.append(sym)
            self.children.append(kids)
            hit = len(self.op) - 1
            self._intern[key] = hit
        return hit

    def symbol(self, ch) -> int:
        return self._add("sym", ch, ())

    def union(self, a, b) -> int:
        if a == self.EMPTY:
            return b
        if b == self.EMPTY or a == b:
            return a
        # x* + 1 = x*
        if a == self.EPS and self.op[b] == "star":
            return b
        if b == self.EPS and self.op[a] == "star":
            return a
        return self._add("or", None, (a, b))

    def cat(self, a, b) -> int:
        if a == self.EMPTY or b == self.EMPTY:
            return self.EMPTY
        if a == self.EPS:
            return b
        if b == self.EPS:
            return a
        return self._add("cat", None, (a, b))

    def star(self, a) -> int:
        if a in (self.EMPTY, self.EPS):
            return self.EPS
        if self.op[a] == "star":
            return a
        return self._add("star", None, (a,))

    def finish(self, output) -> RegexCircuit:
        return RegexCircuit(self.op, self.sym, self.children, output)


# ---------------------------------------------------------------------------
# Kleene forms


@dataclass(frozen=True)
class Type3:
    """x -> a x b + c (gate ids)."""
    a: int
    b: int
    c: int


@dataclass(frozen=True)
class Type4:
    """x -> alpha (a x b + c)* gamma + delta (gate ids)."""
    a: int
    b: int
    c: int
    al: int
    ga: int
    de: int


KleeneForm = Type3 | Type4


def _cat3(b: RegexBuilder, x, y, z):
    return b.cat(b.cat(x, y), z)


def compose_forms(b: RegexBuilder, F, G):
    """F after G, closed over {Type3, Type4}."""
    if isinstance(F, Type3) and isinstance(G, Type3):
        return Type3(b.cat(F.a, G.a), b.cat(G.b, F.b),
                     b.union(_cat3(b, F.a, G.c, F.b), F.c))
    if isinstance(F, Type3):
        return Type4(G.a, G.b, G.c,
                     b.cat(F.a, G.al), b.cat(G.ga, F.b),
                     b.union(_cat3(b, F.a, G.de, F.b), F.c))
    if isinstance(G, Type3):
        return Type4(b.cat(F.a, G.a), b.cat(G.b, F.b),
                     b.union(_cat3(b, F.a, G.c, F.b), F.c),
                     F.al, F.ga, F.de)
    # Type4 after Type4: push the outer through with one dagger identity.
    alp = b.cat(F.a, G.al)
    gap = b.cat(G.ga, F.b)
    dep = b.union(_cat3(b, F.a, G.de, F.b), F.c)
    ds = b.star(dep)
    return Type4(G.a, G.b,
                 b.union(G.c, _cat3(b, gap, ds, alp)),
                 _cat3(b, F.al, ds, alp),
                 _cat3(b, gap, ds, F.ga),
                 b.union(_cat3(b, F.al, ds, F.ga), F.de))


def star_type3(b: RegexBuilder, F: Type3) -> Type4:
    """(a x b + c)* as a Type4 with unit outer coefficients."""
    return Type4(F.a, F.b, F.c, b.EPS, b.EPS, b.EPS)


def dagger_star(b: RegexBuilder, F: Type4) -> Type4:
    """Star of a Type4 via the dagger identity."""
    ds = b.star(F.de)
    return Type4(F.a, F.b,
                 b.union(F.c, _cat3(b, F.ga, ds, F.al)),
                 b.cat(ds, F.al), b.cat(F.ga, ds), ds)


def star_form(b: RegexBuilder, F) -> Type4:
    return star_type3(b, F) if isinstance(F, Type3) else dagger_star(b, F)


def apply_form(b: RegexBuilder, F, v: int) -> int:
    if isinstance(F, Type3):
        return b.union(_cat3(b, F.a, v, F.b), F.c)
    inner = b.union(_cat3(b, F.a, v, F.b), F.c)
    return b.union(_cat3(b, F.al, b.star(inner), F.ga), F.de)


# ---------------------------------------------------------------------------
# Regex <-> term bridging and the balance pipeline


def regex_to_term(r: Regex) -> Term:
    """Binary term over {or, cat, star, eps, emp, sym_<ch>}."""
    val: dict[int, Term] = {}
    stack = [r]
    while stack:
        t = stack[-1]
        if t.uid in val:
            stack.pop()
            continue
        missing = [a for a in t.args if a.uid not in val]
        if missing:
            stack.extend(missing)
            continue
        kind = t.kind
        if kind == "0":
            v = Term("emp")
        elif kind == "1":
            v = Term("eps")
        elif kind == "sym":
            v = Term(f"sym_{t.sym}")
        elif kind == "star":
            v = Term("star", (val[t.args[0].uid],))
        else:
            name = "cat" if kind == "cat" else "or"
            args = [val[a.uid] for a in t.args]
            v = args[0] if len(args) == 1 else args.pop(0)
            # fold the flattened argument list into binary applications
            acc = args[-1]
            for x in reversed(args[:-1]):
                acc = Term(name, (x, acc))
            v = Term(name, (v, acc)) if args else v
        val[t.uid] = v
        stack.pop()
    return val[r.uid]


def term_to_regex(t: Term) -> Regex:
    order = []
    stack = [t]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(node.children)
    val: dict[int, Regex] = {}
    for node in reversed(order):
        sym = node.symbol
        if sym == "emp":
            v = REMPTY
        elif sym == "eps":
            v = REPS
        elif sym.startswith("sym_"):
            v = rsym(sym[4:])
        elif sym == "star":
            v = rstar(val[id(node.children[0])])
        elif sym == "or":
            v = runion(*(val[id(c)] for c in node.children))
        elif sym == "cat":
            v = rcat(*(val[id(c)] for c in node.children))
        else:
            raise TermError(f"not a regex term symbol: {sym!r}")
        val[id(node)] = v
    return val[id(t)]


def classify_context_gates(C: TslpCircuit) -> dict:
    """V0 for term gates; V2 for context gates that reach a star hole
    constructor through composition gates only; V1 otherwise."""
    out: dict[int, str] = {}
    for g in range(C.n):
        if C.sort[g] == "T":
            out[g] = "V0"
        elif C.op[g] == "hat":
            out[g] = "V2" if C.sym[g] == "star" else "V1"
        elif C.op[g] == "comp":
            l, r = C.children[g]
            out[g] = "V2" if "V2" in (out[l], out[r]) else "V1"
        else:  # copy
            out[g] = out[C.children[g][0]]
    return out


def transform(C: TslpCircuit) -> RegexCircuit:
    """Replace term gates by regex gates and context gates by their 3 or 6
    coefficient gates plus constant glue."""
    b = RegexBuilder()
    val: dict[int, object] = {}
    for g in range(C.n):
        op = C.op[g]
        kids = C.children[g]
        if op == "con":
            sym = C.sym[g]
            if sym == "or":
                val[g] = b.union(val[kids[0]], val[kids[1]])
            elif sym == "cat":
                val[g] = b.cat(val[kids[0]], val[kids[1]])
            elif sym == "star":
                val[g] = b.star(val[kids[0]])
            elif sym == "eps":
                val[g] = b.EPS
            elif sym == "emp":
                val[g] = b.EMPTY
            elif sym.startswith("sym_"):
                val[g] = b.symbol(sym[4:])
            else:
                raise TermError(f"not a regex symbol: {sym!r}")
        elif op == "hat":
            sym = C.sym[g]
            if sym == "or":
                val[g] = Type3(b.EPS, b.EPS, val[kids[0]])
            elif sym == "cat":
                if C.hidx[g] == 1:
                    val[g] = Type3(b.EPS, val[kids[0]], b.EMPTY)
                else:
                    val[g] = Type3(val[kids[0]], b.EPS, b.EMPTY)
            elif sym == "star":
                val[g] = star_type3(b, Type3(b.EPS, b.EPS, b.EMPTY))
            else:
                raise TermError(f"not a regex context symbol: {sym!r}")
        elif op == "comp":
            val[g] = compose_forms(b, val[kids[0]], val[kids[1]])
        elif op == "sub":
            val[g] = apply_form(b, val[kids[0]], val[kids[1]])
        else:
            val[g] = val[kids[0]]
    return b.finish(val[C.output])


def balance_regex(r: Regex) -> RegexCircuit:
    """Equivalent circuit over the regex operations, depth O(log n)."""
    from .decomposition import hierarchical_definition

    T = OrderedTree.from_term(regex_to_term(r))
    P = hierarchical_definition(T)
    return transform(minimal_dag(build_tslp(T, P)))


def dagger_sides(alpha: Regex, beta: Regex, gamma: Regex,
                 delta: Regex) -> tuple[Regex, Regex]:
    """Both sides of the dagger identity, for verification."""
    lhs = rstar(runion(rcat(alpha, rstar(beta), gamma), delta))
    ds = rstar(delta)
    rhs = runion(
        rcat(ds, alpha, rstar(runion(beta, rcat(gamma, ds, alpha))),
             gamma, ds),
        ds)
    return lhs, rhs

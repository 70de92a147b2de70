"""Evaluation of terms, contexts and TSLP circuits over user algebras.

An algebra interprets every symbol of its signature by a function on an
opaque carrier.  Contexts evaluate to unary linear term functions; circuits
evaluate gate by gate, with context gates represented by composable
function objects that are applied iteratively (no recursion, no unfolding).
"""

from __future__ import annotations

from .terms import PARAM, Context, Term, TermError
from .tslp import TslpCircuit, build_tslp
from .terms import OrderedTree


class Algebra:
    """Symbol interpretations over an opaque carrier.

    ``ops`` maps symbol names to callables; ``family`` optionally resolves
    whole symbol families (e.g. numeric constants ``k<digits>``) and returns
    a callable or None.  ``equal`` is the value equality; defaults to ==.
    """

    def __init__(self, ops: dict, family=None, equal=None, name: str = "?"):
        self.ops = dict(ops)
        self.family = family
        self.equal = equal or (lambda a, b: a == b)
        self.name = name

    def op(self, sym: str):
        fn = self.ops.get(sym)
        if fn is None and self.family is not None:
            fn = self.family(sym)
            if fn is not None:
                self.ops[sym] = fn
        if fn is None:
            raise TermError(f"symbol {sym!r} is not interpreted in {self.name}")
        return fn


def _postorder_unique(t: Term) -> list[Term]:
    """Unique subterm objects, children before parents (by identity, so
    shared structure is evaluated once)."""
    seen: set[int] = set()
    order: list[Term] = []
    stack: list[Term] = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        order.append(node)
        stack.extend(node.children)
    order.reverse()
    return order


def eval_term(t: Term, A: Algebra):
    val: dict[int, object] = {}
    for node in _postorder_unique(t):
        if node.symbol == PARAM:
            raise TermError("cannot evaluate a context as a term")
        val[id(node)] = A.op(node.symbol)(*(val[id(c)] for c in node.children))
    return val[id(t)]


def eval_context(s: Context, A: Algebra, a):
    val: dict[int, object] = {}
    for node in _postorder_unique(s.term):
        if node.symbol == PARAM:
            val[id(node)] = a
        else:
            val[id(node)] = A.op(node.symbol)(
                *(val[id(c)] for c in node.children))
    return val[id(s.term)]


# ---------------------------------------------------------------------------
# Linear term functions


class Prim:
    """One hole constructor: x maps to f(a_1, .., x, .., a_{r-1})."""

    __slots__ = ("fn", "args", "pos")

    def __init__(self, fn, args, pos):
        self.fn = fn
        self.args = args
        self.pos = pos  # 0-based hole position


class Compose:
    """outer after inner: x maps to outer(inner(x))."""

    __slots__ = ("outer", "inner")

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner


class Identity:
    __slots__ = ()


def apply_ltf(f, x):
    """Apply a linear term function iteratively (safe for deep chains)."""
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Compose):
            stack.append(g.outer)
            stack.append(g.inner)
        elif isinstance(g, Prim):
            args = list(g.args)
            args.insert(g.pos, x)
            x = g.fn(*args)
        elif isinstance(g, Identity):
            pass
        else:
            x = g(x)
    return x


def compose_ltf(outer, inner):
    if isinstance(outer, Identity):
        return inner
    if isinstance(inner, Identity):
        return outer
    return Compose(outer, inner)


def eval_tslp(C: TslpCircuit, A: Algebra):
    """Evaluate a circuit without unfolding it: term gates to carrier
    values, context gates to linear term functions."""
    val: dict[int, object] = {}
    for g in range(C.n):
        op = C.op[g]
        kids = C.children[g]
        if op == "con":
            val[g] = A.op(C.sym[g])(*(val[c] for c in kids))
        elif op == "hat":
            val[g] = Prim(A.op(C.sym[g]), [val[c] for c in kids],
                          C.hidx[g] - 1)
        elif op == "sub":
            val[g] = apply_ltf(val[kids[0]], val[kids[1]])
        elif op == "comp":
            val[g] = compose_ltf(val[kids[0]], val[kids[1]])
        else:
            val[g] = val[kids[0]]
    return val[C.output]


# ---------------------------------------------------------------------------
# Logarithmic-depth term over the derived signature


def balanced_fa_term(t: Term) -> Term:
    """An equivalent term over the derived signature {f, hat_f_i, sub,
    comp} of logarithmic depth.

    ``hat_<f>_<i>`` is the hole constructor of f at 1-based position i;
    ``sub`` plugs a term into a context; ``comp`` composes contexts.
    Evaluate with ``derived_algebra(A)`` to recover the value of t in A.
    """
    from .decomposition import hierarchical_definition

    T = OrderedTree.from_term(t)
    C = build_tslp(T, hierarchical_definition(T))
    out: list[Term | None] = [None] * C.n
    for g in range(C.n):
        kids = tuple(out[c] for c in C.children[g])
        op = C.op[g]
        if op == "con":
            out[g] = Term(C.sym[g], kids)
        elif op == "hat":
            out[g] = Term(f"hat_{C.sym[g]}_{C.hidx[g]}", kids)
        elif op == "sub":
            out[g] = Term("sub", kids)
        elif op == "comp":
            out[g] = Term("comp", kids)
        else:
            out[g] = kids[0]
    return out[C.output]


def derived_algebra(A: Algebra) -> Algebra:
    """Interpret the signature produced by balanced_fa_term over F(A)."""

    def family(sym: str):
        if sym.startswith("hat_"):
            f, i = sym[4:].rsplit("_", 1)
            pos = int(i) - 1
            fn = A.op(f)
            return lambda *args: Prim(fn, list(args), pos)
        base = A.ops.get(sym)
        if base is None and A.family is not None:
            base = A.family(sym)
        return base

    ops = {
        "sub": lambda f, v: apply_ltf(f, v),
        "comp": lambda f, g: compose_ltf(f, g),
    }
    return Algebra(ops, family=family, equal=A.equal,
                   name=f"F({A.name})")


# ---------------------------------------------------------------------------
# Built-in algebras


def _const_value(sym: str):
    if len(sym) > 1 and sym[0] == "k" and sym[1:].isdigit():
        return int(sym[1:])
    return None


def modp(p: int) -> Algebra:
    def family(sym):
        v = _const_value(sym)
        if v is None:
            return None
        r = v % p
        return lambda: r
    return Algebra({"add": lambda a, b: (a + b) % p,
                    "mul": lambda a, b: (a * b) % p},
                   family=family, name=f"modp:{p}")


def matmodp(p: int) -> Algebra:
    """2x2 matrices over the integers mod p; multiplication does not
    commute.  Constant k<d> is a deterministic matrix derived from d."""

    def add(a, b):
        return tuple((x + y) % p for x, y in zip(a, b))

    def mul(a, b):
        a00, a01, a10, a11 = a
        b00, b01, b10, b11 = b
        return ((a00 * b00 + a01 * b10) % p, (a00 * b01 + a01 * b11) % p,
                (a10 * b00 + a11 * b10) % p, (a10 * b01 + a11 * b11) % p)

    def family(sym):
        d = _const_value(sym)
        if d is None:
            return None
        m = (d % p, (3 * d + 1) % p, (7 * d + 2) % p, (d * d + 5) % p)
        return lambda: m

    return Algebra({"add": add, "mul": mul}, family=family,
                   name=f"matmodp:{p}")


INF = float("inf")


def minplus() -> Algebra:
    def family(sym):
        v = _const_value(sym)
        if v is None:
            return None
        return lambda: v
    return Algebra({"add": min, "mul": lambda a, b: a + b},
                   family=family, name="minplus")


def free() -> Algebra:
    """The free term algebra: every symbol is its own constructor."""
    def family(sym):
        return lambda *args: Term(sym, tuple(args))
    return Algebra({}, family=family, name="free")


def get_algebra(desc: str) -> Algebra:
    name, _, arg = desc.partition(":")
    if name == "modp":
        return modp(int(arg or 2 ** 31 - 1))
    if name == "matmodp":
        return matmodp(int(arg or 97))
    if name == "minplus":
        return minplus()
    if name == "free":
        return free()
    raise TermError(f"unknown algebra {desc!r}")

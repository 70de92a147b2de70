"""Balancing semiring expressions: terms over {add, mul, constants} become
+/x circuits of logarithmic depth.

Context gates of the balanced TSLP are affine maps x -> a.x.b + c where any
of a, b, c may be missing.  Missing coefficients are encoded by absence —
no zero or one element is ever fabricated, so the transform works in
semirings without units.  Addition is assumed commutative (a hole in either
argument of add yields the same x + c form).
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Algebra, eval_term  # noqa: F401  (eval_term re-exported for oracles)
from .terms import OrderedTree, Term, TermError
from .tslp import TslpCircuit, build_tslp, minimal_dag


class SemiringCircuit:
    """Dag of binary add/mul gates over constant inputs."""

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

    def to_dot(self, name: str = "semiring") -> str:
        sign = {"add": "+", "mul": "*"}
        lines = [f"digraph {name} {{"]
        for g in range(self.n):
            lab = self.sym[g] if self.op[g] == "const" else sign[self.op[g]]
            lines.append(f'  g{g} [label="{lab}"];')
            for c in self.children[g]:
                lines.append(f"  g{g} -> g{c};")
        lines.append(f"  out -> g{self.output};")
        lines.append("}")
        return "\n".join(lines)


class _Builder:
    """Hash-consing gate builder for add/mul/const."""

    def __init__(self):
        self.op: list[str] = []
        self.sym: list = []
        self.children: list[tuple] = []
        self._intern: dict[tuple, int] = {}

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

    def const(self, sym) -> int:
        return self._add("const", sym, ())

    def add(self, a, b) -> int:
        return self._add("add", None, (a, b))

    def mul(self, a, b) -> int:
        return self._add("mul", None, (a, b))

    def finish(self, output) -> SemiringCircuit:
        return SemiringCircuit(self.op, self.sym, self.children, output)


@dataclass(frozen=True)
class AffineForm:
    """x -> a.x.b + c with absent coefficients meaning the factor/summand
    is simply not there.  One of the 8 shapes, by presence flags."""

    a: int | None = None
    b: int | None = None
    c: int | None = None

    def shape(self) -> str:
        parts = []
        if self.a is not None:
            parts.append("a·")
        parts.append("x")
        if self.b is not None:
            parts.append("·b")
        if self.c is not None:
            parts.append("+c")
        return "".join(parts)


def _mul_opt(b: _Builder, x, y):
    if x is None:
        return y
    if y is None:
        return x
    return b.mul(x, y)


def _add_opt(b: _Builder, x, y):
    if x is None:
        return y
    if y is None:
        return x
    return b.add(x, y)


def affine_compose(b: _Builder, F: AffineForm, G: AffineForm) -> AffineForm:
    """F after G: a_F (a_G x b_G + c_G) b_F + c_F."""
    a = _mul_opt(b, F.a, G.a)
    bb = _mul_opt(b, G.b, F.b)
    mid = None
    if G.c is not None:
        mid = _mul_opt(b, F.a, G.c)
        mid = _mul_opt(b, mid, F.b)
    c = _add_opt(b, mid, F.c)
    return AffineForm(a, bb, c)


def affine_apply(b: _Builder, F: AffineForm, v: int) -> int:
    r = _mul_opt(b, F.a, v)
    r = _mul_opt(b, r, F.b)
    return _add_opt(b, r, F.c)


def _check_signature(C: TslpCircuit) -> None:
    for sym, r in C.ranks.items():
        if sym in ("add", "mul"):
            if r != 2:
                raise TermError(f"{sym} must be binary")
        elif r != 0:
            raise TermError(f"non-semiring symbol {sym!r} of rank {r}")


def classify_gates(C: TslpCircuit) -> dict:
    """Gate -> "V0" for term gates, or the affine shape string for context
    gates."""
    _check_signature(C)
    shapes: dict[int, object] = {}
    flags: dict[int, tuple] = {}
    for g in range(C.n):
        op = C.op[g]
        if C.sort[g] == "T":
            shapes[g] = "V0"
            continue
        if op == "hat":
            if C.sym[g] == "mul":
                fl = (True, False, False) if C.hidx[g] == 2 else (False, True, False)
            else:  # add: x + c either way, addition commutes
                fl = (False, False, True)
        elif op == "comp":
            fa, fb, fc = flags[C.children[g][0]]
            ga, gb, gc = flags[C.children[g][1]]
            fl = (fa or ga, fb or gb, fc or gc)
        else:  # copy
            fl = flags[C.children[g][0]]
        flags[g] = fl
        a, bb, c = fl
        shapes[g] = AffineForm(0 if a else None, 0 if bb else None,
                               0 if c else None).shape()
    return shapes


def transform(C: TslpCircuit) -> SemiringCircuit:
    """Replace every TSLP gate by at most a handful of +/x gates."""
    _check_signature(C)
    b = _Builder()
    val: dict[int, object] = {}
    for g in range(C.n):
        op = C.op[g]
        kids = C.children[g]
        if op == "con":
            sym = C.sym[g]
            if sym == "add":
                val[g] = b.add(val[kids[0]], val[kids[1]])
            elif sym == "mul":
                val[g] = b.mul(val[kids[0]], val[kids[1]])
            else:
                val[g] = b.const(sym)
        elif op == "hat":
            other = val[kids[0]]
            if C.sym[g] == "mul":
                if C.hidx[g] == 2:
                    val[g] = AffineForm(a=other)
                else:
                    val[g] = AffineForm(b=other)
            else:
                val[g] = AffineForm(c=other)
        elif op == "comp":
            val[g] = affine_compose(b, val[kids[0]], val[kids[1]])
        elif op == "sub":
            val[g] = affine_apply(b, val[kids[0]], val[kids[1]])
        else:
            val[g] = val[kids[0]]
    return b.finish(val[C.output])


def balance_semiring(t: Term) -> SemiringCircuit:
    """Equivalent +/x circuit of size O(n/log n) and depth O(log n)."""
    from .decomposition import hierarchical_definition

    T = OrderedTree.from_term(t)
    P = hierarchical_definition(T)
    return transform(minimal_dag(build_tslp(T, P)))


def eval_semiring_circuit(C: SemiringCircuit, S: Algebra):
    val = [None] * C.n
    for g in range(C.n):
        op = C.op[g]
        if op == "const":
            val[g] = S.op(C.sym[g])()
        elif op == "add":
            val[g] = S.op("add")(val[C.children[g][0]], val[C.children[g][1]])
        else:
            val[g] = S.op("mul")(val[C.children[g][0]], val[C.children[g][1]])
    return val[C.output]

"""Deterministic term generators for tests, demos and the command line."""

from __future__ import annotations

import random

from .terms import Term, TermError


def caterpillar(n: int, seed: int = 0, labels: int = 2) -> Term:
    """Left-deep chain of binary nodes; depth grows linearly in n.

    n is rounded up to the nearest odd size so the tree is full binary.
    """
    rng = random.Random(seed)
    syms = [f"f{i}" for i in range(max(1, labels // 2))]
    consts = [f"c{i}" for i in range(max(1, labels - len(syms)))]
    t = Term(rng.choice(consts))
    while t.size < n:
        t = Term(rng.choice(syms), (t, Term(rng.choice(consts))))
    return t


def complete(n: int, seed: int = 0, labels: int = 2) -> Term:
    """Largest complete binary tree with at most max(3, n) nodes."""
    rng = random.Random(seed)
    syms = [f"f{i}" for i in range(max(1, labels // 2))]
    consts = [f"c{i}" for i in range(max(1, labels - len(syms)))]
    h = 1
    while (1 << (h + 2)) - 1 <= max(3, n):
        h += 1
    level = [Term(rng.choice(consts)) for _ in range(1 << h)]
    while len(level) > 1:
        level = [Term(rng.choice(syms), (level[i], level[i + 1]))
                 for i in range(0, len(level), 2)]
    return level[0]


def random_full_binary(n: int, seed: int = 0, labels: int = 2) -> Term:
    """Uniformly random full binary shape with about n nodes (n rounded up
    to odd), labels drawn independently."""
    if n < 1:
        raise TermError("n >= 1 required")
    rng = random.Random(seed)
    syms = [f"f{i}" for i in range(max(1, labels // 2))]
    consts = [f"c{i}" for i in range(max(1, labels - len(syms)))]
    n_leaves = max(1, (n + 1) // 2)
    # Growth process: repeatedly split a random leaf into a binary node.
    children: list[list[int]] = [[]]
    leaf_ids = [0]
    for _ in range(n_leaves - 1):
        k = rng.randrange(len(leaf_ids))
        v = leaf_ids[k]
        a, b = len(children), len(children) + 1
        children.append([])
        children.append([])
        children[v] = [a, b]
        leaf_ids[k] = a
        leaf_ids.append(b)
    built: list[Term | None] = [None] * len(children)
    for v in range(len(children) - 1, -1, -1):
        ch = children[v]
        if ch:
            built[v] = Term(rng.choice(syms), (built[ch[0]], built[ch[1]]))
        else:
            built[v] = Term(rng.choice(consts))
    return built[0]


def random_term(n: int, seed: int = 0, max_rank: int = 4,
                labels: int = 8) -> Term:
    """Random term of roughly n nodes with mixed ranks up to max_rank."""
    if n < 1 or max_rank < 1:
        raise TermError("n >= 1 and max_rank >= 1 required")
    rng = random.Random(seed)
    names = [f"s{i}" for i in range(labels)]
    # Fixed rank per name so the output parses under rank inference.
    ranks = {name: (i % max_rank) + 1 for i, name in enumerate(names)}
    consts = [f"k{i}" for i in range(max(2, labels // 2))]
    budget = n - 1

    def pick_inner():
        return rng.choice(names)

    root_children: list = []
    # Grow by repeatedly expanding a random open slot.
    slots: list[list] = [root_children]
    while budget > 0 and slots:
        slot = slots.pop(rng.randrange(len(slots)))
        if budget > 1 and rng.random() < 0.7:
            name = pick_inner()
            kids: list = []
            slot.append((name, kids))
            budget -= 1
            for _ in range(ranks[name]):
                slots.append(kids)
        else:
            slot.append((rng.choice(consts), []))
            budget -= 1
    # Fill any remaining open arity with constants.
    def finish(pairs):
        stack = [pairs]
        while stack:
            ps = stack.pop()
            for name, kids in ps:
                want = ranks.get(name, 0)
                while len(kids) < want:
                    kids.append((rng.choice(consts), []))
                stack.append(kids)
    if not root_children:
        root_children.append((rng.choice(consts), []))
    finish(root_children)

    out: dict[int, Term] = {}
    order = []
    stack = [root_children[0]]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(node[1])
    for node in reversed(order):
        nm, ks = node
        out[id(node)] = Term(nm, tuple(out[id(k)] for k in ks))
    return out[id(order[0])]


def generate(shape: str, n: int, seed: int = 0, labels: int = 2) -> Term:
    if shape == "caterpillar":
        return caterpillar(n, seed, labels)
    if shape == "complete":
        return complete(n, seed, labels)
    if shape == "random":
        return random_full_binary(n, seed, labels)
    if shape == "mixed":
        return random_term(n, seed)
    raise TermError(f"unknown shape {shape!r}")

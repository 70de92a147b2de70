import random

import pytest


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, ok, detail in sorted(RESULTS):
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num} [{verdict}] {title}: {detail}")

from treebal import OrderedTree, Term
from treebal.generators import random_full_binary, random_term


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def random_binary_tree(n_leaf_splits: int, seed: int) -> OrderedTree:
    return OrderedTree.from_term(random_full_binary(2 * n_leaf_splits + 1,
                                                    seed=seed))


def small_terms(count: int, max_size: int, seed: int):
    """A deterministic batch of mixed-rank terms."""
    r = random.Random(seed)
    for _ in range(count):
        yield random_term(r.randint(1, max_size), seed=r.randrange(1 << 30))


def all_full_binary_structures(n: int):
    """Every full binary tree shape with exactly n nodes (n odd)."""
    if n == 1:
        yield Term("a")
        return
    for k in range(1, n - 1, 2):
        for left in all_full_binary_structures(k):
            for right in all_full_binary_structures(n - 1 - k):
                yield Term("f", (left, right))

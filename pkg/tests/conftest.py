"""Shared test helpers (imported as `from conftest import ...`)."""

from fractions import Fraction

from tropgrass.trees import PhyloTree


def random_phylo_tree(rng, n, allow_zero_internal=True, allow_negative_leaf=True):
    """Random tree on n >= 3 leaves via random pairwise merges.

    Internal vertices all have degree 3. Internal weights are nonnegative
    (zero with decent probability unless disabled); leaf weights may be
    negative rationals.
    """
    if n < 3:
        raise ValueError("need n >= 3")

    def leaf_w():
        lo = -6 if allow_negative_leaf else 0
        return Fraction(rng.randrange(lo, 13), rng.choice((1, 2, 3, 4)))

    def internal_w():
        if allow_zero_internal:
            return Fraction(max(0, rng.randrange(-2, 9)), rng.choice((1, 2, 3)))
        return Fraction(rng.randrange(1, 9), rng.choice((1, 2, 3)))

    leafset = set(range(1, n + 1))
    active = list(range(1, n + 1))
    next_id = n + 1
    edges = []

    def join(u, children):
        for c in children:
            w = leaf_w() if c in leafset else internal_w()
            edges.append((u, c, w))

    while len(active) > 3:
        a, b = rng.sample(active, 2)
        active.remove(a)
        active.remove(b)
        join(next_id, (a, b))
        active.append(next_id)
        next_id += 1
    join(next_id, tuple(active))
    return PhyloTree(n, tuple(edges), tuple(range(1, n + 1)))

"""Seeded generators of random simple polytopes and unimodular matrices."""

import random
from fractions import Fraction

from posgeom.errors import DomainError
from posgeom.polytope import Polytope


def random_simple_polytopes(count, seed=0, max_facets=8):
    """Polytopes with d in {2, 3}, n <= max_facets and the origin inside."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.choice((2, 3))
        m = rng.randint(d + 1, max_facets)
        U = [[rng.randint(-3, 3) for _ in range(d)] for _ in range(m)]
        if any(not any(row) for row in U):
            continue
        z = [Fraction(rng.randint(1, 6), rng.randint(1, 3)) for _ in range(m)]
        try:
            P = Polytope.from_hrep(U, z)
        except DomainError:
            continue
        if P.is_simple():
            out.append(P)
    return out


def random_unimodular(d, rng):
    """Product of random elementary integer matrices, det = +-1."""
    M = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(4):
        i, j = rng.sample(range(d), 2)
        k = rng.choice((-2, -1, 1, 2))
        M = [[M[r][c] + (k * M[j][c] if r == i else 0) for c in range(d)] for r in range(d)]
    if rng.random() < 0.5:
        M[0] = [-x for x in M[0]]
    return M

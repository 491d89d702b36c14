"""Independent oracles the test suite checks the library against.

Each function here deliberately re-derives its answer by a different route
than the library: the volume oracle expands the self-intersection against a
full pairing matrix instead of the closed form, and the wall oracle
re-enumerates the arrangement over raw bitmask subsets.
"""

from __future__ import annotations

from fractions import Fraction

from mmp_elliptic.kodaira import (
    FiberState,
    canonical_contribution,
    intersection_data,
    lct_threshold,
)

F = Fraction

WALL_CONSTANTS = [F(1, 6), F(1, 4), F(1, 3), F(1, 2), F(2, 3), F(3, 4), F(5, 6)]


def gram_volume(X):
    """Expand (K + S + sum of marked divisors)^2 in the curve basis
    {fiber class, section, per-fiber components} with the full pairing matrix.
    Classes from different fibers pair to zero; unnamed pairs default to zero.
    """
    comp = X.elliptic[0]
    d = comp.degL
    k = 2 * comp.genus - 2 + d

    pair: dict[frozenset, Fraction] = {}

    def put(a, b, v):
        pair[frozenset((a, b))] = v

    def get(a, b):
        return pair.get(frozenset((a, b)), F(0))

    put("f", "S", F(1))
    put("S", "S", -d)
    divisor: dict[str, Fraction] = {"f": k, "S": F(1)}

    for f in comp.fibers:
        a = X.fiber_coeff(f)
        if f.state == FiberState.WEIERSTRASS:
            name = f"F_{f.fid}"
            put(name, "S", F(1))
            divisor[name] = a
        else:
            data = intersection_data(f.ftype)
            alpha = canonical_contribution(f.ftype, f.state)
            A, E = f"A_{f.fid}", f"E_{f.fid}"
            put(A, A, data.A_sq)
            put(E, E, data.E_sq)
            put(A, E, data.AE)
            put(A, "S", F(1))
            divisor[A] = a
            divisor[E] = alpha + 1  # E marked with one plus the canonical excess
    total = F(0)
    for x, cx in divisor.items():
        for y, cy in divisor.items():
            total += cx * cy * get(x, y)
    return total


def brute_force_walls(r, types, rational_base):
    """Exhaustive re-enumeration over bitmask subsets, written independently
    of the library's combination-based generator."""
    found = set()
    for i in range(1, r + 1):
        c = lct_threshold(types[i - 1])
        if c is not None:
            found.add(("WI", frozenset({i}), c, False))
            found.add(("WI", frozenset({i}), F(1), True))
    for mask in range(1, 1 << r):
        subset = frozenset(i + 1 for i in range(r) if mask >> i & 1)
        found.add(("WII", subset, F(1), False))
        for c in WALL_CONSTANTS:
            found.add(("WIII", subset, c, False))
    if rational_base:
        found.add(("WII", frozenset(range(1, r + 1)), F(2), False))
    return found


def wall_keys(walls):
    return {(w.kind.value, w.subset, w.constant, w.boundary) for w in walls}

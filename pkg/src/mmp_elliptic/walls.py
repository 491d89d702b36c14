"""Hyperplane walls in the weight cube and chamber bookkeeping.

Walls come in three kinds: fiber-model transitions on single coordinates
(WI), section contractions on subset sums equal to one (plus the total sum
equal to two over a rational base) (WII), and pseudoelliptic collapses on
subset sums equal to a threshold constant (WIII).  Boundary walls at a
coordinate equal to zero or one carry a flag.  Everything is exact; the full
arrangement on r markers is exponential in r and is enumerated lazily.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Iterator

from .curves import WeightVector
from .kodaira import THRESHOLD_CONSTANTS, KodairaType, lct_threshold
from .surfaces import BrokenEllipticSurface, subtree_markers


class WallKind(str, Enum):
    WI = "WI"
    WII = "WII"
    WIII = "WIII"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Wall:
    """The locus where the weight sum over `subset` equals `constant`."""

    kind: WallKind
    subset: frozenset[int]
    constant: Fraction
    boundary: bool = False

    def value_at(self, weights: WeightVector) -> Fraction:
        return sum((weights.weight(i) for i in sorted(self.subset)), Fraction(0))

    def side(self, weights: WeightVector) -> str:
        v = self.value_at(weights)
        if v < self.constant:
            return "below"
        if v > self.constant:
            return "above"
        return "on"

    def sort_key(self):
        return (self.kind.value, tuple(sorted(self.subset)), self.constant, self.boundary)

    def __str__(self) -> str:
        lhs = " + ".join(f"a{i}" for i in sorted(self.subset))
        tag = " (boundary)" if self.boundary else ""
        return f"{self.kind.value}: {lhs} = {self.constant}{tag}"


@dataclass(frozen=True)
class Chamber:
    """Sign vector of a weight vector against a wall collection."""

    signs: tuple[tuple[Wall, str], ...]

    def sign(self, wall: Wall) -> str:
        for w, s in self.signs:
            if w == wall:
                return s
        raise KeyError(f"wall {wall} not part of this chamber's arrangement")

    def on_walls(self) -> tuple[Wall, ...]:
        return tuple(w for w, s in self.signs if s == "on")

    def interior(self) -> bool:
        return not self.on_walls()


@dataclass(frozen=True)
class SegmentCrossing:
    """One crossing time along a weight segment, with every wall hit there."""

    t: Fraction
    walls_hit: tuple[Wall, ...]


def iter_walls(
    r: int, fiber_types: Iterable[KodairaType], rational_base: bool
) -> Iterator[Wall]:
    """Lazy enumeration of the full arrangement; see `enumerate_walls`."""
    types = list(fiber_types)
    if len(types) != r:
        raise ValueError(f"expected {r} fiber types, got {len(types)}")
    seen: set[tuple] = set()

    def emit(wall: Wall) -> Iterator[Wall]:
        key = (wall.kind, wall.subset, wall.constant)
        if key not in seen:
            seen.add(key)
            yield wall

    for i, ftype in enumerate(types, start=1):
        c = lct_threshold(ftype)  # may raise UnsupportedFiberType for N2
        if c is not None:
            yield from emit(Wall(WallKind.WI, frozenset({i}), c))
            yield from emit(Wall(WallKind.WI, frozenset({i}), Fraction(1), boundary=True))
    indices = range(1, r + 1)
    for size in range(1, r + 1):
        for sub in combinations(indices, size):
            yield from emit(Wall(WallKind.WII, frozenset(sub), Fraction(1)))
    if rational_base:
        yield from emit(Wall(WallKind.WII, frozenset(indices), Fraction(2)))
    for size in range(1, r + 1):
        for sub in combinations(indices, size):
            for c in THRESHOLD_CONSTANTS:
                yield from emit(Wall(WallKind.WIII, frozenset(sub), c))


def enumerate_walls(
    r: int, fiber_types: Iterable[KodairaType], rational_base: bool = False
) -> list[Wall]:
    """The finite wall set for r markers of the given types, deduplicated.

    WI walls exist only for markers whose type has a threshold (a transition
    wall at the threshold and a boundary wall at one); WII walls are all
    nonempty subset sums equal to one, plus the total sum equal to two over a
    rational base; WIII walls are all nonempty subset sums equal to each
    threshold constant.  Deterministically ordered.
    """
    return sorted(iter_walls(r, fiber_types, rational_base), key=Wall.sort_key)


def locate(weights: WeightVector, walls: Iterable[Wall]) -> Chamber:
    """Sign vector of the weight vector against each wall."""
    ordered = sorted(walls, key=Wall.sort_key)
    return Chamber(tuple((w, w.side(weights)) for w in ordered))


def walls_containing(weights: WeightVector, walls: Iterable[Wall]) -> list[Wall]:
    return [w for w in sorted(walls, key=Wall.sort_key) if w.side(weights) == "on"]


def segment_walls(
    A: WeightVector, B: WeightVector, walls: Iterable[Wall]
) -> list[SegmentCrossing]:
    """Interior crossing times of the segment A(t) = (1-t)A + tB, t from 1 to 0.

    Requires A <= B entrywise.  Walls containing the whole segment are not
    crossings and are omitted; endpoints on walls are reported separately by
    `walls_containing`.  Output is sorted by decreasing t, each crossing
    listing every wall hit at that time.
    """
    if not A.leq(B):
        raise ValueError("segment requires A <= B entrywise")
    hits: dict[Fraction, list[Wall]] = {}
    for w in walls:
        at_a = w.value_at(A) - w.constant
        at_b = w.value_at(B) - w.constant
        slope = at_b - at_a  # value along the segment is at_a + t * slope
        if slope == 0:
            continue
        t = -at_a / slope
        if 0 < t < 1:
            hits.setdefault(t, []).append(w)
    return [
        SegmentCrossing(t, tuple(sorted(hits[t], key=Wall.sort_key)))
        for t in sorted(hits, reverse=True)
    ]


def active_walls(X: BrokenEllipticSurface, walls: Iterable[Wall]) -> list[Wall]:
    """Filter an arrangement down to walls the given model can actually feel.

    A WI wall is active when its marker backs a single marked fiber whose type
    carries that threshold (or, for the boundary wall, any threshold).  A WII
    subset-sum-one wall is active when the subset is exactly the marker set of
    a rational leaf component; the sum-two wall when the base is an
    irreducible rational curve carrying every marker.  A WIII wall is active
    when the subset is exactly the marker set of an attached tree (at any
    nesting depth) whose host fiber has that threshold.
    """
    singleton_fibers: dict[int, KodairaType] = {}
    owners = [(c.cid, c.fibers) for c in X.components()] + [
        (n.pid, n.fibers) for n in X.pseudo_nodes()
    ]
    host_keys = {(t.host_component, t.host_fiber) for t in X.trees}
    for node in X.pseudo_nodes():
        for link in node.children:
            host_keys.add((node.pid, link.via_fiber))
    for owner, fibers in owners:
        for f in fibers:
            if (owner, f.fid) in host_keys:
                continue
            if len(f.markers) == 1:
                (i,) = f.markers
                singleton_fibers[i] = f.ftype

    leaf_sets: set[frozenset[int]] = set()
    whole_base_set: frozenset[int] | None = None
    for c in X.elliptic:
        if c.genus != 0:
            continue
        n_ends = len(X.glue_ends(c.cid))
        if n_ends == 1:
            leaf_sets.add(X.marker_set(c.cid))
        if n_ends == 0 and len(X.components()) == 1:
            whole_base_set = X.marker_set(c.cid)

    tree_sets: set[tuple[frozenset[int], Fraction]] = set()

    def host_threshold(owner: str, fid: str) -> Fraction | None:
        comp: object
        try:
            comp = X.component(owner)
        except KeyError:
            comp = next(n for n in X.pseudo_nodes() if n.pid == owner)
        return lct_threshold(comp.fiber(fid).ftype)

    for att in X.trees:
        c = host_threshold(att.host_component, att.host_fiber)
        if c is not None:
            tree_sets.add((subtree_markers(att.root), c))
    for node in X.pseudo_nodes():
        for link in node.children:
            c = host_threshold(node.pid, link.via_fiber)
            if c is not None:
                tree_sets.add((subtree_markers(link.node), c))

    out = []
    for w in sorted(walls, key=Wall.sort_key):
        if w.kind == WallKind.WI:
            if len(w.subset) != 1:
                continue
            (i,) = w.subset
            ftype = singleton_fibers.get(i)
            if ftype is None:
                continue
            if w.boundary and w.constant == 1:
                out.append(w)
            elif lct_threshold(ftype) == w.constant:
                out.append(w)
        elif w.kind == WallKind.WII:
            if w.constant == 1 and w.subset in leaf_sets:
                out.append(w)
            elif w.constant == 2 and whole_base_set is not None and w.subset == whole_base_set:
                out.append(w)
        else:
            if (w.subset, w.constant) in tree_sets:
                out.append(w)
    return out


def wall_to_obj(w: Wall) -> dict:
    from .rationals import rat_to_str

    return {
        "kind": w.kind.value,
        "subset": sorted(w.subset),
        "constant": rat_to_str(w.constant),
        "boundary": w.boundary,
    }


def wall_from_obj(obj: dict) -> Wall:
    from .rationals import rat_from_str

    return Wall(
        WallKind(obj["kind"]),
        frozenset(int(i) for i in obj["subset"]),
        rat_from_str(obj["constant"]),
        bool(obj.get("boundary", False)),
    )

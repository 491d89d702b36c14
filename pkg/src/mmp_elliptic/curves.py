"""Weighted pointed nodal curves on dual graphs.

A curve is a connected dual graph: vertices carry a geometric genus, edges are
nodes (self-loops allowed, parallel edges allowed), and markers are weighted
smooth points assigned to vertices.  The module provides the weighted
stability test and the reduction that collapses components of non-positive
weighted degree.  The surface engine projects onto this module, which makes it
the independent cross-check for every base-curve assertion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .rationals import rat, rat_to_str


class CurveError(Exception):
    """Structural problem with a marked nodal curve (unknown vertex, disconnected graph)."""


@dataclass(frozen=True)
class Vertex:
    vid: int
    genus: int

    def __post_init__(self) -> None:
        if self.genus < 0:
            raise ValueError("genus must be non-negative")


@dataclass(frozen=True)
class Marker:
    index: int
    vertex: int


@dataclass(frozen=True)
class MarkedNodalCurve:
    """Dual graph of a pointed nodal curve. Canonicalized on construction."""

    vertices: tuple[Vertex, ...]
    edges: tuple[tuple[int, int], ...]
    markers: tuple[Marker, ...]

    def __post_init__(self) -> None:
        verts = tuple(sorted(self.vertices, key=lambda v: v.vid))
        ids = [v.vid for v in verts]
        if len(set(ids)) != len(ids):
            raise CurveError("duplicate vertex ids")
        known = set(ids)
        edges = []
        for a, b in self.edges:
            if a not in known or b not in known:
                raise CurveError(f"edge ({a},{b}) references unknown vertex")
            edges.append((min(a, b), max(a, b)))
        for m in self.markers:
            if m.vertex not in known:
                raise CurveError(f"marker {m.index} sits on unknown vertex {m.vertex}")
        idx = [m.index for m in self.markers]
        if len(set(idx)) != len(idx):
            raise CurveError("marker indices must be distinct")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        object.__setattr__(self, "markers", tuple(sorted(self.markers, key=lambda m: m.index)))

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.vid == vid:
                return v
        raise CurveError(f"unknown vertex {vid}")

    def valence(self, vid: int) -> int:
        """Edge-endpoint count at the vertex; a self-loop counts twice."""
        self.vertex(vid)
        return sum((a == vid) + (b == vid) for a, b in self.edges)

    def neighbors(self, vid: int) -> list[int]:
        out = set()
        for a, b in self.edges:
            if a == vid and b != vid:
                out.add(b)
            elif b == vid and a != vid:
                out.add(a)
        return sorted(out)

    def markers_on(self, vid: int) -> tuple[Marker, ...]:
        return tuple(m for m in self.markers if m.vertex == vid)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0].vid}
        frontier = [self.vertices[0].vid]
        while frontier:
            v = frontier.pop()
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    frontier.append(w)
        return len(seen) == len(self.vertices)


@dataclass(frozen=True)
class WeightVector:
    """Rational weights in [0,1], indexed by marker index starting at 1."""

    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        ent = tuple(rat(e) for e in self.entries)
        for e in ent:
            if not 0 <= e <= 1:
                raise ValueError(f"weight {e} outside [0, 1]")
        object.__setattr__(self, "entries", ent)

    @property
    def r(self) -> int:
        return len(self.entries)

    def weight(self, index: int) -> Fraction:
        if not 1 <= index <= self.r:
            raise KeyError(f"marker index {index} outside 1..{self.r}")
        return self.entries[index - 1]

    def leq(self, other: "WeightVector") -> bool:
        return self.r == other.r and all(a <= b for a, b in zip(self.entries, other.entries))

    def total(self) -> Fraction:
        return sum(self.entries, Fraction(0))


def interpolate(A: WeightVector, B: WeightVector, t: Fraction) -> WeightVector:
    """The point (1-t)*A + t*B of the weight segment, exact."""
    if A.r != B.r:
        raise ValueError("weight vectors have different lengths")
    return WeightVector(tuple((1 - t) * a + t * b for a, b in zip(A.entries, B.entries)))


def component_degree(curve: MarkedNodalCurve, vid: int, weights: WeightVector) -> Fraction:
    """Degree of the weighted dualizing sheaf on one component:
    2g - 2 + valence + sum of marker weights on the vertex."""
    v = curve.vertex(vid)
    total = sum((weights.weight(m.index) for m in curve.markers_on(vid)), Fraction(0))
    return 2 * v.genus - 2 + curve.valence(vid) + total


def is_hassett_stable(curve: MarkedNodalCurve, weights: WeightVector) -> bool:
    """Weighted stability: strictly positive degree on every component, and
    every marker present on the curve carries a strictly positive weight."""
    if any(weights.weight(m.index) <= 0 for m in curve.markers):
        return False
    return all(component_degree(curve, v.vid, weights) > 0 for v in curve.vertices)


def contract_into_neighbor(curve: MarkedNodalCurve, vid: int) -> MarkedNodalCurve:
    """Collapse the component at `vid` onto its lowest-id neighbor.

    One connecting edge disappears; further edges at `vid` are rerouted to the
    absorber (an edge back to the absorber becomes a self-loop), genera add,
    and markers are transported.  This is the single primitive used both by
    the reduction loop and by the surface engine's base-curve projection.
    """
    nbrs = curve.neighbors(vid)
    if not nbrs:
        raise CurveError(f"vertex {vid} has no neighbor to absorb it")
    target = nbrs[0]
    removed_one = False
    new_edges = []
    for a, b in curve.edges:
        if not removed_one and {a, b} == {vid, target}:
            removed_one = True
            continue
        na = target if a == vid else a
        nb = target if b == vid else b
        new_edges.append((na, nb))
    old = curve.vertex(vid)
    new_vertices = tuple(
        Vertex(v.vid, v.genus + old.genus) if v.vid == target else v
        for v in curve.vertices
        if v.vid != vid
    )
    new_markers = tuple(
        Marker(m.index, target) if m.vertex == vid else m for m in curve.markers
    )
    return MarkedNodalCurve(new_vertices, tuple(new_edges), new_markers)


def hassett_reduce(curve: MarkedNodalCurve, weights: WeightVector) -> MarkedNodalCurve:
    """Repeatedly collapse components of non-positive weighted degree.

    Scans vertices in ascending id and contracts the first offender into its
    lowest-id neighbor; the result is independent of this convention, which
    exists only for determinism.  Stops at a stable curve or a single vertex.
    """
    if not curve.is_connected():
        raise CurveError("cannot reduce a disconnected curve")
    current = curve
    while len(current.vertices) > 1:
        unstable = [
            v.vid
            for v in current.vertices
            if component_degree(current, v.vid, weights) <= 0
        ]
        if not unstable:
            break
        current = contract_into_neighbor(current, unstable[0])
    return current


# -- serialization ----------------------------------------------------------


def curve_to_obj(curve: MarkedNodalCurve) -> dict:
    return {
        "vertices": [{"id": v.vid, "genus": v.genus} for v in curve.vertices],
        "edges": [[a, b] for a, b in curve.edges],
        "markers": [{"index": m.index, "vertex": m.vertex} for m in curve.markers],
    }


def curve_from_obj(obj: dict) -> MarkedNodalCurve:
    try:
        vertices = tuple(Vertex(int(v["id"]), int(v["genus"])) for v in obj["vertices"])
        edges = tuple((int(a), int(b)) for a, b in obj.get("edges", []))
        markers = tuple(
            Marker(int(m["index"]), int(m["vertex"])) for m in obj.get("markers", [])
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CurveError(f"malformed curve object: {exc}") from exc
    return MarkedNodalCurve(vertices, edges, markers)


def curve_to_json(curve: MarkedNodalCurve) -> str:
    return json.dumps(curve_to_obj(curve), indent=2, sort_keys=True)


def curve_from_json(text: str) -> MarkedNodalCurve:
    return curve_from_obj(json.loads(text))


def curve_to_dot(curve: MarkedNodalCurve, weights: WeightVector | None = None) -> str:
    """Deterministic DOT rendering of the dual graph."""
    lines = ["graph dual {", "  node [shape=circle];"]
    for v in curve.vertices:
        marks = curve.markers_on(v.vid)
        label = f"v{v.vid} g={v.genus}"
        if marks:
            parts = []
            for m in marks:
                if weights is not None:
                    parts.append(f"{m.index}:{rat_to_str(weights.weight(m.index))}")
                else:
                    parts.append(str(m.index))
            label += "\\nmarkers " + ",".join(parts)
        lines.append(f'  v{v.vid} [label="{label}"];')
    for a, b in curve.edges:
        lines.append(f"  v{a} -- v{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Wall-crossing transformations and the stable-reduction walk.

Decreasing the weight vector of a valid broken-surface model triggers a fixed
repertoire of rewrites: marked fibers slide between their twisted,
intermediate, and Weierstrass models (WI walls); sections of rational
components contract, either flipping a leaf component into a pseudoelliptic
tree or forming a type II pseudoelliptic (WII walls); attached trees collapse
to a point or a curve once their marked weight drops to the host threshold
(WIII walls).  `reduce` walks a weight segment, applies every transformation
at its exact crossing time in the batch order WI, WII, WIII, and returns the
ordered trace with a model snapshot after each record.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Callable

from .curves import WeightVector, interpolate
from .kodaira import FiberState, fiber_model_at, lct_threshold
from .surfaces import (
    AttachEnd,
    BrokenEllipticSurface,
    ChildLink,
    EllipticComponent,
    MarkedFiber,
    PseudoComponent,
    TreeAttachment,
    TypeIIComponent,
    section_degree,
    subtree_markers,
    validate,
)
from .walls import Wall, WallKind


class WallNotSatisfied(Exception):
    """The model's weights do not lie on the requested wall."""


class RuleNotApplicable(Exception):
    """No transformation of the requested kind applies to the model."""


class InvalidModel(Exception):
    """Stable reduction was asked to start from an invalid model."""


class InconsistentTarget(Exception):
    """The target weight vector is outside the cube or not below the start."""


class RecordKind(str, Enum):
    FIBER_TO_WEIERSTRASS = "FiberToWeierstrass"
    FIBER_TO_TWISTED = "FiberToTwisted"
    FIBER_TO_INTERMEDIATE = "FiberToIntermediate"
    LA_NAVE_FLIP = "LaNaveFlip"
    TYPE_II_PSEUDO_FORMATION = "TypeIIPseudoFormation"
    WHOLE_SECTION_CONTRACTION = "WholeSectionContraction"
    TREE_COLLAPSE_TO_POINT = "TreeCollapseToPoint"
    TREE_COLLAPSE_TO_CURVE = "TreeCollapseToCurve"

    def __str__(self) -> str:
        return self.value


_WALL_OF_KIND = {
    RecordKind.FIBER_TO_WEIERSTRASS: WallKind.WI,
    RecordKind.FIBER_TO_TWISTED: WallKind.WI,
    RecordKind.FIBER_TO_INTERMEDIATE: WallKind.WI,
    RecordKind.LA_NAVE_FLIP: WallKind.WII,
    RecordKind.TYPE_II_PSEUDO_FORMATION: WallKind.WII,
    RecordKind.WHOLE_SECTION_CONTRACTION: WallKind.WII,
    RecordKind.TREE_COLLAPSE_TO_POINT: WallKind.WIII,
    RecordKind.TREE_COLLAPSE_TO_CURVE: WallKind.WIII,
}


@dataclass(frozen=True)
class TransformationRecord:
    """One applied transformation: time on the walk, wall, kind, what moved,
    and the full model immediately afterwards."""

    t: Fraction
    wall: Wall
    kind: RecordKind
    affected: tuple[str, ...]
    snapshot_after: BrokenEllipticSurface
    note: str = ""

    def __post_init__(self) -> None:
        if _WALL_OF_KIND[self.kind] != self.wall.kind:
            raise ValueError(f"record kind {self.kind} inconsistent with wall kind {self.wall.kind}")


@dataclass(frozen=True)
class ReductionTrace:
    """Ordered log of a stable-reduction walk.

    Record times are non-increasing; several records share a time exactly when
    multiple walls are crossed at once, in which case the fixed batch order
    WI, WII, WIII applies.  `halted` is set when a tree collapsed onto a curve,
    which the engine cannot re-mark automatically; the walk stops there, the
    final weights stay at the halting wall, and for a collapse nested inside a
    larger tree the final model may fail the derived-coefficient identity
    above the collapse point.  When `halted` is None the final model is valid
    and carries the target weights.
    """

    start: BrokenEllipticSurface
    target_weights: WeightVector
    records: tuple[TransformationRecord, ...]
    final: BrokenEllipticSurface
    halted: str | None = None


# -- structural rewriting helpers ---------------------------------------------


def _map_node(node: PseudoComponent, fn: Callable[[str, MarkedFiber], MarkedFiber]) -> PseudoComponent:
    return replace(
        node,
        fibers=tuple(fn(node.pid, f) for f in node.fibers),
        children=tuple(ChildLink(l.via_fiber, _map_node(l.node, fn)) for l in node.children),
    )


def _map_fibers(
    X: BrokenEllipticSurface, fn: Callable[[str, MarkedFiber], MarkedFiber]
) -> BrokenEllipticSurface:
    return replace(
        X,
        elliptic=tuple(
            replace(c, fibers=tuple(fn(c.cid, f) for f in c.fibers)) for c in X.elliptic
        ),
        pseudo2=tuple(
            replace(c, fibers=tuple(fn(c.cid, f) for f in c.fibers)) for c in X.pseudo2
        ),
        trees=tuple(
            TreeAttachment(t.host_component, t.host_fiber, _map_node(t.root, fn))
            for t in X.trees
        ),
    )


def _with_weights(X: BrokenEllipticSurface, W: WeightVector) -> BrokenEllipticSurface:
    """Move the model to new weights, recomputing every marker-backed coefficient."""
    X2 = replace(X, weights=W)

    def recoeff(owner: str, f: MarkedFiber) -> MarkedFiber:
        if not f.markers:
            return f
        return replace(f, coeff=X2.fiber_coeff(f))

    return _map_fibers(X2, recoeff)


def at_weights(X: BrokenEllipticSurface, W: WeightVector) -> BrokenEllipticSurface:
    """The model re-evaluated at other weights: coefficients recomputed from
    the markers and plain fiber states moved to the log canonical model at the
    new coefficient.  Tree hosts stay intermediate; their range is re-checked
    by `validate`, not here."""
    moved, _ = _fiber_transition_events(_with_weights(X, W))
    return moved


def _host_keys(X: BrokenEllipticSurface) -> set[tuple[str, str]]:
    keys = {(t.host_component, t.host_fiber) for t in X.trees}
    for node in X.pseudo_nodes():
        for link in node.children:
            keys.add((node.pid, link.via_fiber))
    return keys


def _replace_component_fibers(
    X: BrokenEllipticSurface, cid: str, fibers: tuple[MarkedFiber, ...]
) -> BrokenEllipticSurface:
    if X.is_elliptic(cid):
        return replace(
            X,
            elliptic=tuple(
                replace(c, fibers=fibers) if c.cid == cid else c for c in X.elliptic
            ),
        )
    return replace(
        X,
        pseudo2=tuple(
            replace(c, fibers=fibers) if c.cid == cid else c for c in X.pseudo2
        ),
    )


def _weight_sum(W: WeightVector, markers: frozenset[int]) -> Fraction:
    return sum((W.weight(i) for i in sorted(markers)), Fraction(0))


# -- WI: fiber model transitions ----------------------------------------------


def _fiber_transition_events(
    X: BrokenEllipticSurface, allow_leave_one: WeightVector | None = None
) -> tuple[BrokenEllipticSurface, list[tuple[str, MarkedFiber, FiberState]]]:
    """Recompute marked-fiber states at the current weights.

    Tree-hosting intermediate fibers are pinned (their lifecycle is governed
    by flips and collapses).  A twisted fiber at coefficient one only drops to
    its intermediate model when `allow_leave_one` (the walk target) strictly
    lowers its backing weight; an intermediate fiber at coefficient one is the
    flip-boundary representative and is left alone.
    """
    hosts = _host_keys(X)
    events: list[tuple[str, MarkedFiber, FiberState]] = []

    def fix(owner: str, f: MarkedFiber) -> MarkedFiber:
        if (owner, f.fid) in hosts or not f.markers or f.ftype.family == "N2":
            return f
        want = fiber_model_at(f.ftype, f.coeff)
        if want == f.state:
            if (
                f.state == FiberState.TWISTED
                and allow_leave_one is not None
                and _weight_sum(allow_leave_one, f.markers) < f.coeff
            ):
                events.append((owner, f, FiberState.INTERMEDIATE))
                return replace(f, state=FiberState.INTERMEDIATE)
            return f
        if want == FiberState.TWISTED and f.state == FiberState.INTERMEDIATE and f.coeff == 1:
            return f  # boundary representative of the just-below-one model
        events.append((owner, f, want))
        return replace(f, state=want)

    X2 = _map_fibers(X, fix)
    return X2, events


def _record_fiber_event(
    t: Fraction, owner: str, f: MarkedFiber, new_state: FiberState, snapshot: BrokenEllipticSurface
) -> TransformationRecord:
    if new_state == FiberState.WEIERSTRASS:
        kind = RecordKind.FIBER_TO_WEIERSTRASS
        wall = Wall(WallKind.WI, f.markers, lct_threshold(f.ftype) or Fraction(0))
    elif new_state == FiberState.INTERMEDIATE:
        kind = RecordKind.FIBER_TO_INTERMEDIATE
        wall = Wall(WallKind.WI, f.markers, Fraction(1), boundary=True)
    else:
        kind = RecordKind.FIBER_TO_TWISTED
        wall = Wall(WallKind.WI, f.markers, Fraction(1), boundary=True)
    return TransformationRecord(t, wall, kind, (owner, f.fid), snapshot)


# -- WII: section contractions -------------------------------------------------


def _attach_tree_to_end(
    X: BrokenEllipticSurface, end: "AttachEnd", root: PseudoComponent
) -> BrokenEllipticSurface:
    """Turn a former attaching fiber into the intermediate host of a new tree."""
    peer = X.component(end.component)
    c = lct_threshold(end.ftype)
    if c is None:
        raise RuleNotApplicable(
            f"attaching fiber {end.fiber_id} of type {end.ftype} admits no intermediate model"
        )
    markers = subtree_markers(root)
    host_fiber = MarkedFiber(
        end.fiber_id,
        end.ftype,
        _weight_sum(X.weights, markers),
        FiberState.INTERMEDIATE,
        markers,
    )
    X = _replace_component_fibers(X, end.component, peer.fibers + (host_fiber,))
    return replace(
        X, trees=X.trees + (TreeAttachment(end.component, end.fiber_id, root),)
    )


def _detach_component(
    X: BrokenEllipticSurface, cid: str
) -> tuple[BrokenEllipticSurface, PseudoComponent, "AttachEnd"]:
    """Remove a 1-attachment component and package it as a pseudo tree root.

    Returns the stripped model, the new root (with the component's hosted
    trees as children), and the peer attaching end the root must be glued to.
    """
    ends = X.glue_ends(cid)
    if len(ends) != 1:
        raise RuleNotApplicable(f"component {cid} has {len(ends)} attachments; need exactly 1")
    glue, my_end = ends[0]
    peer_end = glue.peer_of(cid)
    comp = X.component(cid)
    children = tuple(ChildLink(t.host_fiber, t.root) for t in X.trees_on(cid))
    root = PseudoComponent(
        pid=cid,
        degL=comp.degL,
        attach_ftype=my_end.ftype,
        fibers=comp.fibers,
        children=children,
        isotrivial_jinf=comp.isotrivial_jinf,
    )
    stripped = replace(
        X,
        elliptic=tuple(c for c in X.elliptic if c.cid != cid),
        pseudo2=tuple(c for c in X.pseudo2 if c.cid != cid),
        glues=tuple(g for g in X.glues if g.gid != glue.gid),
        trees=tuple(t for t in X.trees if t.host_component != cid),
    )
    return stripped, root, peer_end


def _apply_la_nave_flip(
    X: BrokenEllipticSurface, cid: str, t: Fraction
) -> tuple[BrokenEllipticSurface, TransformationRecord]:
    """Contract the section of a leaf component and re-attach it as the root
    of a type I pseudoelliptic tree on the peer's attaching fiber.

    Any type II pseudoelliptic left with a single attachment by this move has
    lost its right to exist and is folded into the tree as well, re-rooting it
    one step further along the chain.
    """
    wall_subset = X.marker_set(cid)
    constant = _weight_sum(X.weights, wall_subset)
    affected = [cid]
    current, root, peer_end = _detach_component(X, cid)
    current = _attach_tree_to_end(current, peer_end, root)
    # chain cascade: a type II pseudoelliptic attached along one remaining
    # fiber is a type I pseudoelliptic, so the tree swallows it
    while (
        any(c.cid == peer_end.component for c in current.pseudo2)
        and len(current.glue_ends(peer_end.component)) == 1
    ):
        affected.append(peer_end.component)
        current, root, peer_end = _detach_pseudo2(current, peer_end.component)
        current = _attach_tree_to_end(current, peer_end, root)
    wall = Wall(WallKind.WII, wall_subset, constant, boundary=constant != 1)
    rec = TransformationRecord(t, wall, RecordKind.LA_NAVE_FLIP, tuple(affected), current)
    return current, rec


def _detach_pseudo2(
    X: BrokenEllipticSurface, cid: str
) -> tuple[BrokenEllipticSurface, PseudoComponent, "AttachEnd"]:
    ends = X.glue_ends(cid)
    if len(ends) != 1:
        raise RuleNotApplicable(f"type II component {cid} still has {len(ends)} attachments")
    glue, my_end = ends[0]
    peer_end = glue.peer_of(cid)
    comp = X.component(cid)
    children = tuple(ChildLink(t.host_fiber, t.root) for t in X.trees_on(cid))
    root = PseudoComponent(
        pid=cid,
        degL=comp.degL,
        attach_ftype=my_end.ftype,
        fibers=comp.fibers,
        children=children,
        isotrivial_jinf=comp.isotrivial_jinf,
    )
    stripped = replace(
        X,
        pseudo2=tuple(c for c in X.pseudo2 if c.cid != cid),
        glues=tuple(g for g in X.glues if g.gid != glue.gid),
        trees=tuple(t for t in X.trees if t.host_component != cid),
    )
    return stripped, root, peer_end


def _apply_type2_formation(
    X: BrokenEllipticSurface, cid: str, t: Fraction
) -> tuple[BrokenEllipticSurface, TransformationRecord]:
    """Contract the section of a multiply-attached rational component in place."""
    comp = X.component(cid)
    assert isinstance(comp, EllipticComponent)
    new = TypeIIComponent(
        comp.cid, comp.vertex, comp.genus, comp.degL, comp.fibers, comp.isotrivial_jinf
    )
    current = replace(
        X,
        elliptic=tuple(c for c in X.elliptic if c.cid != cid),
        pseudo2=X.pseudo2 + (new,),
    )
    subset = X.marker_set(cid)
    constant = _weight_sum(X.weights, subset)
    wall = Wall(WallKind.WII, subset, constant, boundary=True)
    rec = TransformationRecord(
        t, wall, RecordKind.TYPE_II_PSEUDO_FORMATION, (cid,), current
    )
    return current, rec


def _apply_whole_contraction(
    X: BrokenEllipticSurface, cid: str, t: Fraction
) -> tuple[BrokenEllipticSurface, TransformationRecord]:
    """Contract the section of an unattached component: the whole surface
    becomes pseudoelliptic.  The component keeps its base vertex so the model
    still projects to a curve."""
    comp = X.component(cid)
    assert isinstance(comp, EllipticComponent)
    new = TypeIIComponent(
        comp.cid, comp.vertex, comp.genus, comp.degL, comp.fibers, comp.isotrivial_jinf
    )
    current = replace(
        X,
        elliptic=tuple(c for c in X.elliptic if c.cid != cid),
        pseudo2=X.pseudo2 + (new,),
    )
    subset = X.marker_set(cid)
    constant = _weight_sum(X.weights, subset)
    wall = Wall(WallKind.WII, subset, constant, boundary=constant != 2)
    rec = TransformationRecord(
        t, wall, RecordKind.WHOLE_SECTION_CONTRACTION, (cid,), current
    )
    return current, rec


def _apply_section_contraction(
    X: BrokenEllipticSurface, cid: str, t: Fraction
) -> tuple[BrokenEllipticSurface, TransformationRecord]:
    n_ends = len(X.glue_ends(cid))
    if n_ends == 1:
        return _apply_la_nave_flip(X, cid, t)
    if n_ends == 0:
        return _apply_whole_contraction(X, cid, t)
    return _apply_type2_formation(X, cid, t)


# -- WIII: pseudoelliptic collapses ---------------------------------------------


def _iter_subtrees(X: BrokenEllipticSurface):
    """Yield (host owner id, host fiber id, subtree root, depth), all levels."""

    def walk(owner: str, fid: str, node: PseudoComponent, depth: int):
        yield (owner, fid, node, depth)
        for link in node.children:
            yield from walk(node.pid, link.via_fiber, link.node, depth + 1)

    for att in X.trees:
        yield from walk(att.host_component, att.host_fiber, att.root, 0)


def _host_fiber_of(X: BrokenEllipticSurface, owner: str, fid: str) -> MarkedFiber:
    try:
        return X.component(owner).fiber(fid)
    except KeyError:
        for node in X.pseudo_nodes():
            if node.pid == owner:
                return node.fiber(fid)
        raise


def _collapsed_fiber(
    old: MarkedFiber, markers: frozenset[int], coeff: Fraction, to_curve: bool
) -> MarkedFiber:
    if to_curve:
        # the tree contracts onto the E component, which survives as an
        # unmarked twisted fiber of coefficient one; the tree's markers have
        # no home afterwards and the caller must halt the walk
        return MarkedFiber(old.fid, old.ftype, Fraction(1), FiberState.TWISTED, frozenset())
    return MarkedFiber(
        old.fid,
        old.ftype,
        coeff,
        fiber_model_at(old.ftype, coeff),
        markers,
        nonminimal_cusp=True,
    )


def _collapse_subtree(
    X: BrokenEllipticSurface, owner: str, fid: str, node: PseudoComponent, t: Fraction
) -> tuple[BrokenEllipticSurface, TransformationRecord, bool]:
    """Remove one attached subtree; the host fiber becomes the Weierstrass
    fiber of its own type carrying the tree's markers, or an unmarked twisted
    fiber when the collapse is onto a curve."""
    markers = subtree_markers(node)
    coeff = _weight_sum(X.weights, markers)
    to_curve = node.isotrivial_jinf and node.degL == 0
    old = _host_fiber_of(X, owner, fid)
    newf = _collapsed_fiber(old, markers, coeff, to_curve)
    is_top = any(t2.host_component == owner and t2.host_fiber == fid for t2 in X.trees)
    if is_top:
        current = replace(
            X,
            trees=tuple(
                t2 for t2 in X.trees if not (t2.host_component == owner and t2.host_fiber == fid)
            ),
        )
        host = current.component(owner)
        fibers = tuple(newf if f.fid == fid else f for f in host.fibers)
        current = _replace_component_fibers(current, owner, fibers)
    else:

        def prune(n: PseudoComponent) -> PseudoComponent:
            if n.pid == owner:
                return replace(
                    n,
                    fibers=tuple(newf if f.fid == fid else f for f in n.fibers),
                    children=tuple(l for l in n.children if l.via_fiber != fid),
                )
            return replace(
                n, children=tuple(ChildLink(l.via_fiber, prune(l.node)) for l in n.children)
            )

        current = replace(
            X,
            trees=tuple(TreeAttachment(t2.host_component, t2.host_fiber, prune(t2.root)) for t2 in X.trees),
        )
    kind = RecordKind.TREE_COLLAPSE_TO_CURVE if to_curve else RecordKind.TREE_COLLAPSE_TO_POINT
    c = lct_threshold(old.ftype)
    wall = Wall(WallKind.WIII, markers, c if c is not None else coeff)
    note = f"host {owner}/{fid}"
    if to_curve:
        note += (
            f"; markers {sorted(markers)} contracted onto the attaching curve:"
            " requires manual review"
        )
    affected = tuple(n.pid for n in node.nodes())
    rec = TransformationRecord(t, wall, kind, affected, current, note)
    return current, rec, to_curve


# -- batch application at one time ----------------------------------------------


def _wii_candidates(X: BrokenEllipticSurface) -> list[str]:
    return [c.cid for c in X.elliptic if section_degree(X, c.cid) <= 0]


def _wiii_candidates(X: BrokenEllipticSurface) -> list[tuple[str, str, PseudoComponent, int]]:
    out = []
    for owner, fid, node, depth in _iter_subtrees(X):
        host = _host_fiber_of(X, owner, fid)
        c = lct_threshold(host.ftype)
        if c is None:
            continue
        if _weight_sum(X.weights, subtree_markers(node)) <= c:
            out.append((owner, fid, node, depth))
    # deepest first so nested collapses precede their hosts'
    out.sort(key=lambda item: (-item[3], item[2].pid))
    return out


def _apply_batch(
    X: BrokenEllipticSurface,
    t: Fraction,
    records: list[TransformationRecord],
    leave_one_target: WeightVector | None,
) -> tuple[BrokenEllipticSurface, bool]:
    """Apply all transformations pending at the current weights.

    Returns the rewritten model and whether the walk must halt (curve collapse).
    Batch order per pass: WI fiber transitions, then WII section contractions
    in ascending component id, then WIII collapses deepest-first; passes repeat
    until the model is quiescent, so cascades stay inside one batch.
    """
    current = X
    first = True
    while True:
        progressed = False

        current, events = _fiber_transition_events(
            current, leave_one_target if first else None
        )
        for owner, fiber, new_state in events:
            records.append(_record_fiber_event(t, owner, fiber, new_state, current))
            progressed = True
        first = False

        wii = _wii_candidates(current)
        if wii:
            multi = len(wii) > 1
            cid = sorted(wii)[0]
            current, rec = _apply_section_contraction(current, cid, t)
            if multi:
                rec = replace(rec, note=(rec.note + "; simultaneous section walls").strip("; "))
            records.append(rec)
            progressed = True

        if not progressed:
            wiii = _wiii_candidates(current)
            if wiii:
                owner, fid, node, _ = wiii[0]
                current, rec, halted = _collapse_subtree(current, owner, fid, node, t)
                records.append(rec)
                if halted:
                    return current, True
                progressed = True

        if not progressed:
            return current, False


# -- the public operations --------------------------------------------------------


def cross_wall(
    X: BrokenEllipticSurface, wall: Wall, decreasing: bool = True
) -> tuple[BrokenEllipticSurface, TransformationRecord]:
    """Apply the single transformation attached to one wall.

    The model's weights must lie on the wall.  The model may be the limit of
    the above-chamber family (states not yet transitioned), which is exactly
    the input the crossing consumes; full validation is therefore not required
    here.  Standalone records carry t = 1.
    """
    if wall.side(X.weights) != "on":
        raise WallNotSatisfied(f"weights are not on {wall}")
    t = Fraction(1)
    if wall.kind == WallKind.WI:
        owner_fiber = None
        hosts = _host_keys(X)
        for owner, fibers in [(c.cid, c.fibers) for c in X.components()] + [
            (n.pid, n.fibers) for n in X.pseudo_nodes()
        ]:
            for f in fibers:
                if f.markers == wall.subset and (owner, f.fid) not in hosts:
                    owner_fiber = (owner, f)
        if owner_fiber is None:
            raise RuleNotApplicable(f"no marked fiber carries exactly {sorted(wall.subset)}")
        owner, fiber = owner_fiber
        if decreasing and wall.constant == 1:
            if fiber.state != FiberState.TWISTED:
                raise RuleNotApplicable("fiber is not twisted; nothing to blow up at one")
            new_state = FiberState.INTERMEDIATE
        elif not decreasing and wall.constant == 1:
            if fiber.state != FiberState.INTERMEDIATE:
                raise RuleNotApplicable("only an intermediate fiber contracts to twisted at one")
            new_state = FiberState.TWISTED
        elif decreasing:
            if fiber.state != FiberState.INTERMEDIATE:
                raise RuleNotApplicable("fiber is not intermediate; no Weierstrass contraction")
            if lct_threshold(fiber.ftype) != wall.constant:
                raise WallNotSatisfied(
                    f"wall constant {wall.constant} is not the threshold of {fiber.ftype}"
                )
            new_state = FiberState.WEIERSTRASS
        else:
            raise RuleNotApplicable("weight increases only cross the boundary wall at one")

        def fix(o: str, f: MarkedFiber) -> MarkedFiber:
            if o == owner and f.fid == fiber.fid:
                return replace(f, state=new_state)
            return f

        current = _map_fibers(X, fix)
        return current, _record_fiber_event(t, owner, fiber, new_state, current)

    if not decreasing:
        raise RuleNotApplicable("section contractions and collapses only occur when decreasing")

    if wall.kind == WallKind.WII:
        matches = sorted(c.cid for c in X.elliptic if X.marker_set(c.cid) == wall.subset)
        if not matches:
            raise RuleNotApplicable(
                f"no elliptic component carries exactly markers {sorted(wall.subset)}"
            )
        return _apply_section_contraction(X, matches[0], t)

    matches3 = [
        (owner, fid, node)
        for owner, fid, node, _ in _iter_subtrees(X)
        if subtree_markers(node) == wall.subset
        and lct_threshold(_host_fiber_of(X, owner, fid).ftype) == wall.constant
    ]
    if not matches3:
        raise RuleNotApplicable(
            f"no attached tree carries exactly markers {sorted(wall.subset)}"
        )
    owner, fid, node = matches3[0]
    current, rec, _ = _collapse_subtree(X, owner, fid, node, t)
    return current, rec


def increase_to_one(
    X: BrokenEllipticSurface, marker_index: int
) -> tuple[BrokenEllipticSurface, TransformationRecord]:
    """Push one marker's weight to 1 across the boundary wall.

    Stable (type I_n) and N0 fibers keep their birational model; an
    intermediate fiber contracts its reduced component and becomes twisted.
    The record kind marks the boundary-wall event in both cases.
    """
    w = X.weights.weight(marker_index)
    if w == 1:
        raise RuleNotApplicable(f"marker {marker_index} already has weight 1")
    hosts = _host_keys(X)
    found = None
    for owner, fibers in [(c.cid, c.fibers) for c in X.components()] + [
        (n.pid, n.fibers) for n in X.pseudo_nodes()
    ]:
        for f in fibers:
            if marker_index in f.markers and (owner, f.fid) not in hosts:
                found = (owner, f)
    if found is None:
        raise RuleNotApplicable(f"marker {marker_index} backs no marked fiber")
    owner, fiber = found
    if fiber.markers != frozenset({marker_index}):
        raise RuleNotApplicable(
            f"marker {marker_index} is folded into the composite fiber {fiber.fid}"
        )
    stable_like = fiber.ftype.is_stable or fiber.ftype.family == "N0"
    if not stable_like and fiber.state != FiberState.INTERMEDIATE:
        raise RuleNotApplicable(
            f"fiber {fiber.fid} is {fiber.state} of type {fiber.ftype};"
            " only intermediate or stable fibers cross the boundary"
        )
    entries = list(X.weights.entries)
    entries[marker_index - 1] = Fraction(1)
    current = _with_weights(X, WeightVector(tuple(entries)))
    if stable_like:
        wall = Wall(WallKind.WI, fiber.markers, Fraction(1), boundary=True)
        rec = TransformationRecord(
            Fraction(1),
            wall,
            RecordKind.FIBER_TO_TWISTED,
            (owner, fiber.fid),
            current,
            "stable fiber; birational model unchanged",
        )
        return current, rec

    def fix(o: str, f: MarkedFiber) -> MarkedFiber:
        if o == owner and f.fid == fiber.fid:
            return replace(f, state=FiberState.TWISTED)
        return f

    current = _map_fibers(current, fix)
    wall = Wall(WallKind.WI, fiber.markers, Fraction(1), boundary=True)
    rec = TransformationRecord(
        Fraction(1), wall, RecordKind.FIBER_TO_TWISTED, (owner, fiber.fid), current
    )
    return current, rec


def _event_times(
    X: BrokenEllipticSurface, A: WeightVector, B: WeightVector, t_cur: Fraction
) -> Fraction | None:
    """Largest t strictly below t_cur (and >= 0) where a wall relevant to the
    current model structure is crossed."""

    best: Fraction | None = None

    def consider(markers: frozenset[int], constant: Fraction) -> None:
        nonlocal best
        vA = _weight_sum(A, markers)
        vB = _weight_sum(B, markers)
        slope = vB - vA
        if slope == 0:
            return
        t = (constant - vA) / slope
        if 0 <= t < t_cur and (best is None or t > best):
            best = t

    hosts = _host_keys(X)
    for owner, fibers in [(c.cid, c.fibers) for c in X.components()] + [
        (n.pid, n.fibers) for n in X.pseudo_nodes()
    ]:
        for f in fibers:
            if (owner, f.fid) in hosts or not f.markers:
                continue
            if f.state == FiberState.INTERMEDIATE and f.ftype.family != "N2":
                a0 = lct_threshold(f.ftype)
                if a0 is not None:
                    consider(f.markers, a0)
    for c in X.elliptic:
        base = 2 * c.genus - 2 + len(X.glue_ends(c.cid))
        consider(X.marker_set(c.cid), Fraction(-base))
    for owner, fid, node, _ in _iter_subtrees(X):
        host = _host_fiber_of(X, owner, fid)
        c0 = lct_threshold(host.ftype)
        if c0 is not None:
            consider(subtree_markers(node), c0)
    return best


def reduce(X: BrokenEllipticSurface, target: WeightVector) -> ReductionTrace:
    """Walk the weight segment from the model's weights down to `target`,
    applying every wall transformation at its exact crossing time.

    The walk enforces, rather than assumes, the firing conventions: a section
    contracts as soon as its degree is non-positive, a tree collapses as soon
    as its marked weight reaches the host threshold, and fiber models are the
    log canonical ones at each visited weight (the boundary value a = a0
    already being Weierstrass).  An empty segment is a no-op.
    """
    if target.r != X.weights.r:
        raise InconsistentTarget(
            f"target has {target.r} entries; the model has {X.weights.r} markers"
        )
    if not target.leq(X.weights):
        raise InconsistentTarget("target must be entrywise <= the current weights")
    problems = validate(X)
    if problems:
        raise InvalidModel("; ".join(str(p) for p in problems))
    if target.entries == X.weights.entries:
        return ReductionTrace(X, target, (), X)

    A, B = target, X.weights
    records: list[TransformationRecord] = []
    current = X

    current, halted = _apply_batch(current, Fraction(1), records, leave_one_target=A)
    t_cur = Fraction(1)
    while not halted:
        t_next = _event_times(current, A, B, t_cur)
        if t_next is None:
            if t_cur == 0:
                break
            t_next = Fraction(0)
        current = _with_weights(current, interpolate(A, B, t_next))
        current, halted = _apply_batch(current, t_next, records, leave_one_target=None)
        t_cur = t_next
        if t_cur == 0:
            break

    halt_note = None
    if halted:
        halt_rec = records[-1]
        halt_note = f"{halt_rec.kind} at t = {halt_rec.t}: {halt_rec.note}"
    return ReductionTrace(X, target, tuple(records), current, halt_note)

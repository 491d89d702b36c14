import random
from dataclasses import replace
from fractions import Fraction

import pytest

from mmp_elliptic.curves import WeightVector, hassett_reduce, interpolate
from mmp_elliptic.kodaira import FiberState, parse_fiber_type
from mmp_elliptic.reduction import (
    InconsistentTarget,
    InvalidModel,
    RecordKind,
    RuleNotApplicable,
    WallNotSatisfied,
    cross_wall,
    increase_to_one,
    reduce,
)
from mmp_elliptic.surfaces import (
    AttachEnd,
    BrokenEllipticSurface,
    EllipticComponent,
    Glue,
    TypeIIComponent,
    base_curve,
    model_shape,
    validate,
)
from mmp_elliptic.walls import Wall, WallKind, enumerate_walls, locate

from modelkit import (
    admissible_target,
    flipped_degeneration,
    mk_fiber,
    random_model,
    random_target,
    rational_degeneration,
)

F = Fraction


def weights(*entries):
    return WeightVector(tuple(F(e) if not isinstance(e, Fraction) else e for e in entries))


def test_example_degeneration_full_trace():
    X = rational_degeneration(F(1))
    target = weights(*([1] * 10 + [F(1, 3), F(1, 3)]))
    trace = reduce(X, target)
    assert trace.halted is None
    kinds = [r.kind for r in trace.records]
    assert kinds == [RecordKind.LA_NAVE_FLIP, RecordKind.TREE_COLLAPSE_TO_POINT]
    flip, collapse = trace.records

    # the flip fires where the two alpha-markers sum to one (alpha = 1/2)
    assert interpolate(target, X.weights, flip.t).weight(11) == F(1, 2)
    assert flip.wall == Wall(WallKind.WII, frozenset({11, 12}), F(1))
    host = flip.snapshot_after.component("c1").fiber("a1")
    assert host.state == FiberState.INTERMEDIATE
    assert host.markers == frozenset({11, 12})
    assert flip.snapshot_after.trees[0].root.pid == "c2"

    # the collapse fires where the tree's weight reaches 5/6 (alpha = 5/12)
    assert interpolate(target, X.weights, collapse.t).weight(11) == F(5, 12)
    assert collapse.wall == Wall(WallKind.WIII, frozenset({11, 12}), F(5, 6))
    cusp = collapse.snapshot_after.component("c1").fiber("a1")
    assert str(cusp.ftype) == "II"
    assert cusp.state == FiberState.WEIERSTRASS
    assert cusp.coeff == F(5, 6)
    assert cusp.nonminimal_cusp

    # final model: irreducible, the residual pair tracked at weight 2/3
    final = trace.final
    assert final.weights == target
    assert len(final.elliptic) == 1 and not final.trees and not final.glues
    assert final.component("c1").fiber("a1").coeff == F(2, 3)
    assert validate(final) == []

    # base curves commute with the weighted-curve reduction at every stage
    original = base_curve(X)
    for rec in trace.records:
        assert base_curve(rec.snapshot_after) == hassett_reduce(
            original, rec.snapshot_after.weights
        )
    assert base_curve(final) == hassett_reduce(original, target)
    assert len(base_curve(final).vertices) == 1


def test_reduce_noop_on_equal_weights():
    X = rational_degeneration(F(9, 20))
    trace = reduce(X, X.weights)
    assert trace.records == ()
    assert trace.final == X


def test_reduce_same_chamber_is_trivial():
    X = rational_degeneration(F(1))
    t1 = weights(*([1] * 10 + [F(11, 20), F(11, 20)]))
    t2 = weights(*([1] * 10 + [F(3, 5), F(3, 5)]))
    walls = enumerate_walls(12, [parse_fiber_type("I1")] * 12)
    assert locate(t1, walls) == locate(t2, walls)
    r1, r2 = reduce(X, t1), reduce(X, t2)
    assert r1.records == () and r2.records == ()
    assert model_shape(r1.final) == model_shape(r2.final)


def test_reduce_rejects_bad_targets_and_models():
    X = rational_degeneration(F(1))
    with pytest.raises(InconsistentTarget):
        reduce(X, weights(*([1] * 11)))
    with pytest.raises(InconsistentTarget):
        reduce(rational_degeneration(F(1, 3)), weights(*([1] * 10 + [F(1, 2), F(1, 2)])))
    bad = replace(
        X,
        elliptic=tuple(
            replace(c, degL=F(-1)) if c.cid == "c1" else c for c in X.elliptic
        ),
    )
    with pytest.raises(InvalidModel):
        reduce(bad, weights(*([1] * 10 + [F(1, 3), F(1, 3)])))


def test_marked_twisted_fiber_steps_down_through_intermediate():
    w = weights(1, 1, 1, 1)
    fibers = tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (1, 2, 3)) + (
        mk_fiber("f4", "II", 4, w),
    )
    comp = EllipticComponent("c1", 1, 0, F(1), fibers)
    X = BrokenEllipticSurface(w, (comp,))
    assert X.component("c1").fiber("f4").state == FiberState.TWISTED
    trace = reduce(X, weights(1, 1, 1, F(1, 3)))
    kinds = [r.kind for r in trace.records]
    assert kinds == [RecordKind.FIBER_TO_INTERMEDIATE, RecordKind.FIBER_TO_WEIERSTRASS]
    blowup, contraction = trace.records
    assert blowup.t == 1
    assert blowup.wall.boundary
    # the Weierstrass contraction happens exactly at the threshold 5/6
    assert interpolate(trace.target_weights, X.weights, contraction.t).weight(4) == F(5, 6)
    assert trace.final.component("c1").fiber("f4").state == FiberState.WEIERSTRASS
    for rec in trace.records:
        assert validate(rec.snapshot_after) == []


def test_type_ii_formation_at_zero_boundary():
    w = weights(1, 1, F(1, 2), 1, 1)
    c1 = EllipticComponent("c1", 1, 0, F(1), tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (1, 2)))
    c2 = EllipticComponent("c2", 2, 0, F(1), (mk_fiber("f3", "I1", 3, w),))
    c3 = EllipticComponent("c3", 3, 0, F(1), tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (4, 5)))
    glues = (
        Glue("g1", AttachEnd("c1", "a1", parse_fiber_type("II")), AttachEnd("c2", "b1", parse_fiber_type("III"))),
        Glue("g2", AttachEnd("c2", "b2", parse_fiber_type("IV")), AttachEnd("c3", "a3", parse_fiber_type("I*0"))),
    )
    X = BrokenEllipticSurface(w, (c1, c3), (), glues)
    X = replace(X, elliptic=X.elliptic + (c2,))
    assert validate(X) == []
    target = weights(1, 1, 0, 1, 1)
    trace = reduce(X, target)
    assert [r.kind for r in trace.records] == [RecordKind.TYPE_II_PSEUDO_FORMATION]
    rec = trace.records[0]
    assert rec.t == 0 and rec.wall.boundary and rec.wall.constant == 0
    final = trace.final
    assert [c.cid for c in final.pseudo2] == ["c2"]
    assert validate(final) == []
    curve = base_curve(final)
    assert [v.vid for v in curve.vertices] == [1, 3]
    assert curve.edges == ((1, 3),)
    assert base_curve(final) == hassett_reduce(base_curve(X), target)


def test_whole_section_contraction_at_sum_two():
    w = weights(1, 1, 1)
    comp = EllipticComponent("c1", 1, 0, F(1), tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (1, 2, 3)))
    X = BrokenEllipticSurface(w, (comp,))
    target = weights(F(1, 2), F(1, 2), F(1, 2))
    trace = reduce(X, target)
    assert [r.kind for r in trace.records] == [RecordKind.WHOLE_SECTION_CONTRACTION]
    rec = trace.records[0]
    at_wall = interpolate(target, X.weights, rec.t)
    assert sum(at_wall.entries, F(0)) == 2
    assert rec.wall.constant == 2 and not rec.wall.boundary
    final = trace.final
    assert not final.elliptic and len(final.pseudo2) == 1
    assert validate(final) == []
    assert len(base_curve(final).vertices) == 1


def test_broken_chain_cascade_folds_type_ii_into_tree():
    w = weights(1, 1, F(3, 4), F(3, 4))
    left = EllipticComponent("a_left", 1, 0, F(1), tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (1, 2)))
    right = EllipticComponent("z_right", 3, 0, F(1), tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (3, 4)))
    mid = TypeIIComponent("mid", 2, 0, F(1), ())
    glues = (
        Glue("g1", AttachEnd("a_left", "a1", parse_fiber_type("III*")), AttachEnd("mid", "b1", parse_fiber_type("II*"))),
        Glue("g2", AttachEnd("mid", "b2", parse_fiber_type("II")), AttachEnd("z_right", "a3", parse_fiber_type("IV*"))),
    )
    X = BrokenEllipticSurface(w, (left, right), (mid,), glues)
    assert validate(X) == []
    target = weights(1, 1, F(1, 3), F(1, 3))
    trace = reduce(X, target)
    kinds = [r.kind for r in trace.records]
    assert kinds == [RecordKind.LA_NAVE_FLIP, RecordKind.TREE_COLLAPSE_TO_POINT]
    flip = trace.records[0]
    assert flip.affected == ("z_right", "mid")
    snap = flip.snapshot_after
    assert not snap.pseudo2  # the chain middle was folded into the tree
    assert snap.trees[0].root.pid == "mid"
    assert [l.node.pid for l in snap.trees[0].root.children] == ["z_right"]
    host = snap.component("a_left").fiber("a1")
    assert str(host.ftype) == "III*" and host.markers == frozenset({3, 4})
    # the nested subtree hits its own type II threshold 5/6 before the outer
    # III* tree could reach 1/4, so the inner pseudoelliptic collapses first
    collapse = trace.records[1]
    at_wall = interpolate(target, X.weights, collapse.t)
    assert at_wall.weight(3) + at_wall.weight(4) == F(5, 6)
    assert collapse.affected == ("z_right",)
    final = trace.final
    assert validate(final) == []
    root = final.trees[0].root
    assert root.pid == "mid" and not root.children
    folded = root.fiber("b2")
    assert str(folded.ftype) == "II" and folded.state == FiberState.WEIERSTRASS
    assert folded.markers == frozenset({3, 4}) and folded.coeff == F(2, 3)
    # the outer tree still carries weight 2/3 > 1/4 and survives to the target
    outer = final.component("a_left").fiber("a1")
    assert outer.state == FiberState.INTERMEDIATE and outer.coeff == F(2, 3)
    original = base_curve(X)
    for rec in trace.records:
        assert base_curve(rec.snapshot_after) == hassett_reduce(original, rec.snapshot_after.weights)


def test_nested_tree_forms_when_host_leaf_contracts():
    w = weights(1, 1, 1, 1, 1)
    c1 = EllipticComponent("c1", 1, 0, F(1), tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (1, 2)))
    c2 = EllipticComponent("c2", 2, 0, F(1), (mk_fiber("f3", "I1", 3, w),))
    c3 = EllipticComponent("c3", 3, 0, F(1), tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (4, 5)))
    glues = (
        Glue("g1", AttachEnd("c1", "a1", parse_fiber_type("III*")), AttachEnd("c2", "b1", parse_fiber_type("II*"))),
        Glue("g2", AttachEnd("c2", "b2", parse_fiber_type("II")), AttachEnd("c3", "a3", parse_fiber_type("IV*"))),
    )
    X = BrokenEllipticSurface(w, (c1, c2, c3), (), glues)
    assert validate(X) == []
    target = weights(1, 1, F(1, 12), F(11, 24), F(11, 24))
    trace = reduce(X, target)
    kinds = [r.kind for r in trace.records]
    assert kinds == [RecordKind.LA_NAVE_FLIP, RecordKind.LA_NAVE_FLIP]
    final = trace.final
    assert validate(final) == []
    att = final.trees[0]
    assert att.host_component == "c1" and att.root.pid == "c2"
    assert [l.node.pid for l in att.root.children] == ["c3"]
    # eq. (4.1) at both levels: outer host carries 3+4+5, inner host 4+5
    outer = final.component("c1").fiber("a1")
    assert outer.markers == frozenset({3, 4, 5}) and outer.coeff == F(1)
    inner = att.root.fiber("b2")
    assert inner.markers == frozenset({4, 5}) and inner.coeff == F(11, 12)
    assert base_curve(final) == hassett_reduce(base_curve(X), target)


def test_cross_wall_fiber_transitions():
    w = weights(1, 1, 1, F(3, 4))
    fibers = tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (1, 2, 3)) + (
        mk_fiber("f4", "III", 4, w),
    )
    comp = EllipticComponent("c1", 1, 0, F(1), fibers)
    X = BrokenEllipticSurface(w, (comp,))
    assert X.component("c1").fiber("f4").state == FiberState.WEIERSTRASS
    wall = Wall(WallKind.WI, frozenset({4}), F(3, 4))
    with pytest.raises(RuleNotApplicable):
        cross_wall(X, wall, decreasing=True)  # already Weierstrass at the boundary
    inter = replace(
        X,
        elliptic=(
            replace(
                comp,
                fibers=tuple(
                    replace(f, state=FiberState.INTERMEDIATE) if f.fid == "f4" else f
                    for f in comp.fibers
                ),
            ),
        ),
    )
    Y, rec = cross_wall(inter, wall, decreasing=True)
    assert rec.kind == RecordKind.FIBER_TO_WEIERSTRASS
    assert Y.component("c1").fiber("f4").state == FiberState.WEIERSTRASS
    off = Wall(WallKind.WI, frozenset({4}), F(2, 3))
    with pytest.raises(WallNotSatisfied):
        cross_wall(inter, off, decreasing=True)


def test_cross_wall_flip_matches_reduce():
    X = rational_degeneration(F(1, 2))
    wall = Wall(WallKind.WII, frozenset({11, 12}), F(1))
    Y, rec = cross_wall(X, wall, decreasing=True)
    assert rec.kind == RecordKind.LA_NAVE_FLIP
    assert model_shape(Y) == model_shape(flipped_degeneration(F(1, 2)))
    with pytest.raises(RuleNotApplicable):
        cross_wall(X, wall, decreasing=False)


def test_manual_crossings_compose_to_the_engine_walk():
    # replay the walk by hand: move onto each wall, apply the single crossing,
    # and compare against the engine's snapshots
    from mmp_elliptic.reduction import at_weights

    X = rational_degeneration(F(1))
    target = weights(*([1] * 10 + [F(1, 3), F(1, 3)]))
    trace = reduce(X, target)

    on_flip_wall = at_weights(X, weights(*([1] * 10 + [F(1, 2), F(1, 2)])))
    stepped, rec1 = cross_wall(on_flip_wall, Wall(WallKind.WII, frozenset({11, 12}), F(1)))
    assert stepped == trace.records[0].snapshot_after

    on_collapse_wall = at_weights(stepped, weights(*([1] * 10 + [F(5, 12), F(5, 12)])))
    stepped2, rec2 = cross_wall(
        on_collapse_wall, Wall(WallKind.WIII, frozenset({11, 12}), F(5, 6))
    )
    assert stepped2 == trace.records[1].snapshot_after
    assert at_weights(stepped2, target) == trace.final


def test_cross_wall_collapse():
    X = flipped_degeneration(F(5, 12))
    # the flipped fixture at alpha = 5/12 sits exactly on the WIII wall
    wall = Wall(WallKind.WIII, frozenset({11, 12}), F(5, 6))
    Y, rec = cross_wall(X, wall, decreasing=True)
    assert rec.kind == RecordKind.TREE_COLLAPSE_TO_POINT
    assert not Y.trees
    assert Y.component("c1").fiber("a1").coeff == F(5, 6)


def test_increase_to_one_stable_fiber():
    w = weights(1, 1, 1, F(9, 10))
    fibers = tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (1, 2, 3)) + (
        mk_fiber("f4", "I4", 4, w),
    )
    X = BrokenEllipticSurface(w, (EllipticComponent("c1", 1, 0, F(1), fibers),))
    Y, rec = increase_to_one(X, 4)
    assert Y.weights.weight(4) == 1
    assert Y.component("c1").fiber("f4").state == FiberState.WEIERSTRASS
    assert rec.kind == RecordKind.FIBER_TO_TWISTED and rec.note
    with pytest.raises(RuleNotApplicable):
        increase_to_one(Y, 4)


def test_increase_to_one_intermediate_fiber():
    w = weights(1, 1, 1, F(9, 10))
    fibers = tuple(mk_fiber(f"f{i}", "I1", i, w) for i in (1, 2, 3)) + (
        mk_fiber("f4", "IV", 4, w),
    )
    X = BrokenEllipticSurface(w, (EllipticComponent("c1", 1, 0, F(1), fibers),))
    assert X.component("c1").fiber("f4").state == FiberState.INTERMEDIATE
    Y, rec = increase_to_one(X, 4)
    assert Y.component("c1").fiber("f4").state == FiberState.TWISTED
    assert Y.component("c1").fiber("f4").coeff == 1
    assert rec.kind == RecordKind.FIBER_TO_TWISTED
    assert validate(Y) == []


def last_record_per_time(records):
    """Commutativity with the curve reduction holds once a whole time-step's
    batch has been applied, i.e. after the last record at each crossing time."""
    out = {}
    for rec in records:
        out[rec.t] = rec
    return out.values()


def _tree_nodes(X):
    return sum(len(att.root.nodes()) for att in X.trees)


def _marked_indices(X):
    out = set()
    hosts = {(t.host_component, t.host_fiber) for t in X.trees}
    for node in X.pseudo_nodes():
        for link in node.children:
            hosts.add((node.pid, link.via_fiber))
    for owner, fibers in [(c.cid, c.fibers) for c in X.components()] + [
        (n.pid, n.fibers) for n in X.pseudo_nodes()
    ]:
        for f in fibers:
            if (owner, f.fid) not in hosts:
                out |= f.markers
    return out


def test_fuzz_traces_are_valid_and_commute():
    rng = random.Random(99)
    kinds_seen = set()
    for _ in range(120):
        X = random_model(rng, max_components=3, max_markers=6)
        target = admissible_target(rng, X)
        if target is None:
            continue
        trace = reduce(X, target)
        original = base_curve(X)
        markers_before = _marked_indices(X)
        prev = X
        for rec in trace.records:
            kinds_seen.add(rec.kind)
            assert rec.kind in RecordKind
            assert validate(rec.snapshot_after) == []
            # trees only grow through flips and only shrink through collapses,
            # and no marker ever disappears from the marked locus
            delta = _tree_nodes(rec.snapshot_after) - _tree_nodes(prev)
            if rec.kind == RecordKind.LA_NAVE_FLIP:
                assert delta >= 1
            elif rec.kind == RecordKind.TREE_COLLAPSE_TO_POINT:
                assert delta <= -1
            else:
                assert delta == 0
            assert _marked_indices(rec.snapshot_after) == markers_before
            prev = rec.snapshot_after
        for rec in last_record_per_time(trace.records):
            assert base_curve(rec.snapshot_after) == hassett_reduce(
                original, rec.snapshot_after.weights
            )
        if trace.halted is None:
            assert trace.final.weights == target
            assert validate(trace.final) == []
            assert base_curve(trace.final) == hassett_reduce(original, target)
    assert RecordKind.LA_NAVE_FLIP in kinds_seen
    assert RecordKind.TREE_COLLAPSE_TO_POINT in kinds_seen


def test_factorization_through_intermediate_weights():
    rng = random.Random(41)
    checked = 0
    for _ in range(40):
        X = random_model(rng, max_components=3, max_markers=6)
        A = random_target(rng, X.weights)
        M = WeightVector(
            tuple((a + b) / 2 for a, b in zip(A.entries, X.weights.entries))
        )
        via_mid = reduce(X, M)
        if via_mid.halted is not None:
            continue
        two_step = reduce(via_mid.final, A)
        direct = reduce(X, A)
        if two_step.halted is not None or direct.halted is not None:
            continue
        assert two_step.final == direct.final
        checked += 1
    assert checked >= 30


def test_isotrivial_tree_collapse_to_curve_halts():
    X = flipped_degeneration(F(9, 20))
    att = X.trees[0]
    iso_root = replace(att.root, isotrivial_jinf=True, degL=F(0))
    X = replace(X, trees=(replace(att, root=iso_root),))
    assert validate(X) == []
    target = weights(*([1] * 10 + [F(1, 6), F(1, 6)]))
    trace = reduce(X, target)
    assert trace.halted is not None
    assert trace.records[-1].kind == RecordKind.TREE_COLLAPSE_TO_CURVE
    assert "manual review" in trace.records[-1].note
    final = trace.final
    assert validate(final) == []
    # the host fiber survives as an unmarked twisted fiber of coefficient one
    host = final.component("c1").fiber("a1")
    assert host.state == FiberState.TWISTED and host.coeff == 1 and not host.markers
    # the walk stopped at the wall, not at the target
    assert final.weights.weight(11) == F(5, 12)

"""JSON wire format for broken-surface models.

The schema mirrors the in-memory types one to one so that every structural
invariant is checkable at parse time: a weight list, a component list
(elliptic and type II pseudoelliptic), a top-level attachment list pairing
the two ends of each gluing, and nested pseudoelliptic trees.  Parsing
validates; serialization is canonical and round-trips exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .curves import WeightVector
from .kodaira import KodairaType, FiberState, parse_fiber_type
from .rationals import rat_from_str, rat_to_str
from .surfaces import (
    AttachEnd,
    BrokenEllipticSurface,
    ChildLink,
    EllipticComponent,
    Glue,
    MarkedFiber,
    PseudoComponent,
    TreeAttachment,
    TypeIIComponent,
    validate,
)

_STATES = {
    "Weierstrass": FiberState.WEIERSTRASS,
    "Intermediate": FiberState.INTERMEDIATE,
    "Twisted": FiberState.TWISTED,
}


class ModelJSONError(Exception):
    """Parse failure with a machine-readable kind.

    kind is one of "malformed-json", "schema-violation", "model-invalid";
    the last embeds the validator's findings.
    """

    def __init__(self, kind: str, detail: str) -> None:
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise ModelJSONError("schema-violation", f"{where}: missing field {key!r}")
    return obj[key]


def _rational(value, where: str) -> Fraction:
    try:
        return rat_from_str(str(value))
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelJSONError("schema-violation", f"{where}: bad rational {value!r} ({exc})")


def _ftype(value, where: str) -> KodairaType:
    try:
        return parse_fiber_type(str(value))
    except ValueError as exc:
        raise ModelJSONError("schema-violation", f"{where}: {exc}")


def _fiber(obj: dict, where: str) -> MarkedFiber:
    fid = str(_need(obj, "id", where))
    ftype = _ftype(_need(obj, "type", where), f"{where}/{fid}")
    coeff = _rational(_need(obj, "coeff", where), f"{where}/{fid}")
    if not 0 <= coeff <= 1:
        raise ModelJSONError(
            "schema-violation", f"{where}/{fid}: coefficient {rat_to_str(coeff)} outside [0, 1]"
        )
    state_name = str(obj.get("state", ""))
    if state_name:
        if state_name not in _STATES:
            raise ModelJSONError("schema-violation", f"{where}/{fid}: unknown state {state_name!r}")
        state = _STATES[state_name]
    else:
        from .kodaira import fiber_model_at, UnsupportedFiberType

        try:
            state = fiber_model_at(ftype, coeff)
        except UnsupportedFiberType:
            state = FiberState.WEIERSTRASS
    markers = frozenset(int(i) for i in obj.get("markers", []))
    return MarkedFiber(fid, ftype, coeff, state, markers, bool(obj.get("nonminimal_cusp", False)))


def _node(obj: dict, where: str) -> PseudoComponent:
    pid = str(_need(obj, "id", where))
    fibers = tuple(_fiber(f, f"{where}/{pid}") for f in obj.get("fibers", []))
    children = []
    for child in obj.get("children", []):
        via = str(_need(child, "via_fiber", f"{where}/{pid}"))
        children.append(ChildLink(via, _node(_need(child, "node", f"{where}/{pid}"), f"{where}/{pid}")))
    return PseudoComponent(
        pid=pid,
        degL=_rational(_need(obj, "degL", f"{where}/{pid}"), f"{where}/{pid}"),
        attach_ftype=_ftype(_need(obj, "attach_type", f"{where}/{pid}"), f"{where}/{pid}"),
        fibers=fibers,
        children=tuple(children),
        isotrivial_jinf=bool(obj.get("isotrivial_jinf", False)),
    )


def _end(obj: dict, where: str) -> AttachEnd:
    return AttachEnd(
        str(_need(obj, "component", where)),
        str(_need(obj, "fiber", where)),
        _ftype(_need(obj, "type", where), where),
    )


def model_from_obj(obj: dict, check: bool = True) -> BrokenEllipticSurface:
    if not isinstance(obj, dict):
        raise ModelJSONError("schema-violation", "top level must be an object")
    raw_weights = _need(obj, "weights", "model")
    weights_list = [
        _rational(w, f"weights[{i}]") for i, w in enumerate(raw_weights, start=1)
    ]
    for i, w in enumerate(weights_list, start=1):
        if not 0 <= w <= 1:
            raise ModelJSONError(
                "schema-violation", f"weights[{i}]: {rat_to_str(w)} outside [0, 1]"
            )
    try:
        weights = WeightVector(tuple(weights_list))
    except ValueError as exc:
        raise ModelJSONError("schema-violation", f"weights: {exc}")

    elliptic: list[EllipticComponent] = []
    pseudo2: list[TypeIIComponent] = []
    for cobj in _need(obj, "components", "model"):
        cid = str(_need(cobj, "id", "components"))
        kind = str(cobj.get("kind", "elliptic"))
        fibers = tuple(_fiber(f, cid) for f in cobj.get("fibers", []))
        common = dict(
            cid=cid,
            vertex=int(_need(cobj, "vertex", cid)),
            genus=int(_need(cobj, "genus", cid)),
            degL=_rational(_need(cobj, "degL", cid), cid),
            fibers=fibers,
            isotrivial_jinf=bool(cobj.get("isotrivial_jinf", False)),
        )
        if kind == "elliptic":
            elliptic.append(EllipticComponent(**common))
        elif kind == "pseudo2":
            pseudo2.append(TypeIIComponent(**common))
        else:
            raise ModelJSONError("schema-violation", f"{cid}: unknown component kind {kind!r}")

    glues = []
    for gobj in obj.get("attachments", []):
        gid = str(_need(gobj, "id", "attachments"))
        glues.append(
            Glue(gid, _end(_need(gobj, "a", gid), gid), _end(_need(gobj, "b", gid), gid))
        )

    trees = []
    for tobj in obj.get("trees", []):
        trees.append(
            TreeAttachment(
                str(_need(tobj, "host", "trees")),
                str(_need(tobj, "host_fiber", "trees")),
                _node(_need(tobj, "root", "trees"), "trees"),
            )
        )

    try:
        surface = BrokenEllipticSurface(
            weights, tuple(elliptic), tuple(pseudo2), tuple(glues), tuple(trees)
        )
    except (ValueError, KeyError) as exc:
        raise ModelJSONError("schema-violation", str(exc))
    if check:
        problems = validate(surface)
        if problems:
            raise ModelJSONError(
                "model-invalid", "; ".join(str(p) for p in problems)
            )
    return surface


def parse_model(text: str | bytes, check: bool = True) -> BrokenEllipticSurface:
    """Parse and validate a model; errors carry line/field context."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelJSONError("malformed-json", f"line {exc.lineno} col {exc.colno}: {exc.msg}")
    return model_from_obj(obj, check=check)


def _fiber_obj(f: MarkedFiber) -> dict:
    out = {
        "id": f.fid,
        "type": str(f.ftype),
        "coeff": rat_to_str(f.coeff),
        "state": str(f.state),
        "markers": sorted(f.markers),
    }
    if f.nonminimal_cusp:
        out["nonminimal_cusp"] = True
    return out


def _node_obj(n: PseudoComponent) -> dict:
    out = {
        "id": n.pid,
        "degL": rat_to_str(n.degL),
        "attach_type": str(n.attach_ftype),
        "fibers": [_fiber_obj(f) for f in n.fibers],
        "children": [
            {"via_fiber": l.via_fiber, "node": _node_obj(l.node)} for l in n.children
        ],
    }
    if n.isotrivial_jinf:
        out["isotrivial_jinf"] = True
    return out


def model_to_obj(X: BrokenEllipticSurface) -> dict:
    components = []
    for c in X.elliptic:
        components.append(
            {
                "id": c.cid,
                "kind": "elliptic",
                "vertex": c.vertex,
                "genus": c.genus,
                "degL": rat_to_str(c.degL),
                "isotrivial_jinf": c.isotrivial_jinf,
                "fibers": [_fiber_obj(f) for f in c.fibers],
            }
        )
    for c in X.pseudo2:
        components.append(
            {
                "id": c.cid,
                "kind": "pseudo2",
                "vertex": c.vertex,
                "genus": c.genus,
                "degL": rat_to_str(c.degL),
                "isotrivial_jinf": c.isotrivial_jinf,
                "fibers": [_fiber_obj(f) for f in c.fibers],
            }
        )
    components.sort(key=lambda c: c["id"])

    def end_obj(e: AttachEnd) -> dict:
        return {"component": e.component, "fiber": e.fiber_id, "type": str(e.ftype)}

    return {
        "weights": [rat_to_str(w) for w in X.weights.entries],
        "components": components,
        "attachments": [
            {"id": g.gid, "a": end_obj(g.a), "b": end_obj(g.b)} for g in X.glues
        ],
        "trees": [
            {
                "host": t.host_component,
                "host_fiber": t.host_fiber,
                "root": _node_obj(t.root),
            }
            for t in X.trees
        ],
    }


def serialize_model(X: BrokenEllipticSurface) -> str:
    """Canonical JSON text: fixed key order, sorted components, two-space indent."""
    return json.dumps(model_to_obj(X), indent=2) + "\n"

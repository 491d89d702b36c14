"""Broken elliptic surface pairs as decorated dual graphs.

A model consists of elliptic components fibered over base-curve vertices,
type II pseudoelliptic components (section contracted, still attached along
twisted fibers), gluings between components, and rooted trees of type I
pseudoelliptic components hanging off intermediate fibers.  Marked fibers
carry their Kodaira type, model state, a rational coefficient, and the set of
weight-vector indices backing that coefficient.

Coefficients of tree-hosting intermediate fibers are derived: they equal the
sum of the weights of every marker carried by the attached subtree, with each
marker counted once.  The validator re-checks that identity together with the
per-fiber state rules, so inconsistent configurations are reported as data
rather than silently propagated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import (
    MarkedNodalCurve,
    Marker,
    Vertex,
    WeightVector,
    contract_into_neighbor,
)
from .kodaira import (
    FiberState,
    KodairaType,
    UnsupportedFiberType,
    canonical_contribution,
    fiber_model_at,
    intersection_data,
    lct_threshold,
)


class NoSectionError(Exception):
    """Section-specific query on a component without a section."""


class UnsupportedConfiguration(Exception):
    """The requested quantity is only defined for a restricted model class."""


class MissingThreshold(Exception):
    """A pseudoelliptic fate query hit a host fiber type without a threshold."""


@dataclass(frozen=True)
class Violation:
    """One validation failure: a stable code, the offending location, detail text."""

    code: str
    where: str
    detail: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.where}: {self.detail}"


@dataclass(frozen=True)
class MarkedFiber:
    """A marked (pseudo)fiber: type, coefficient, model state, backing markers.

    `markers` lists the weight-vector indices whose weights sum to `coeff`;
    it has several indices only after a pseudoelliptic collapse folded a whole
    tree's marking onto one fiber.  `nonminimal_cusp` records that the fiber
    arose from such a collapse.
    """

    fid: str
    ftype: KodairaType
    coeff: Fraction
    state: FiberState
    markers: frozenset[int] = frozenset()
    nonminimal_cusp: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.coeff <= 1:
            raise ValueError(f"fiber {self.fid}: coefficient {self.coeff} outside [0, 1]")


@dataclass(frozen=True)
class AttachEnd:
    component: str
    fiber_id: str
    ftype: KodairaType


@dataclass(frozen=True)
class Glue:
    """One gluing of two components along coefficient-one attaching fibers.

    Each side names its own fiber; the two fibers are identified curves on the
    surface but distinct fibers of their respective fibrations.
    """

    gid: str
    a: AttachEnd
    b: AttachEnd

    def ends(self) -> tuple[AttachEnd, AttachEnd]:
        return (self.a, self.b)

    def end_of(self, cid: str) -> list[AttachEnd]:
        return [e for e in (self.a, self.b) if e.component == cid]

    def peer_of(self, cid: str) -> AttachEnd:
        if self.a.component == cid:
            return self.b
        if self.b.component == cid:
            return self.a
        raise KeyError(f"glue {self.gid} does not touch {cid}")


@dataclass(frozen=True)
class EllipticComponent:
    """An elliptic surface component over one base vertex, with section."""

    cid: str
    vertex: int
    genus: int
    degL: Fraction
    fibers: tuple[MarkedFiber, ...]
    isotrivial_jinf: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "fibers", tuple(sorted(self.fibers, key=lambda f: f.fid)))

    def fiber(self, fid: str) -> MarkedFiber:
        for f in self.fibers:
            if f.fid == fid:
                return f
        raise KeyError(f"component {self.cid} has no fiber {fid}")


@dataclass(frozen=True)
class TypeIIComponent:
    """A pseudoelliptic component attached along >= 2 twisted fibers, or the
    residue of a whole-surface section contraction (then with no gluings)."""

    cid: str
    vertex: int
    genus: int
    degL: Fraction
    fibers: tuple[MarkedFiber, ...]
    isotrivial_jinf: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "fibers", tuple(sorted(self.fibers, key=lambda f: f.fid)))

    def fiber(self, fid: str) -> MarkedFiber:
        for f in self.fibers:
            if f.fid == fid:
                return f
        raise KeyError(f"component {self.cid} has no fiber {fid}")


@dataclass(frozen=True)
class PseudoComponent:
    """A type I pseudoelliptic tree node.

    The node glues upward along a twisted pseudofiber of type `attach_ftype`;
    each child hangs off the E component of one of this node's intermediate
    pseudofibers, named by the child link.
    """

    pid: str
    degL: Fraction
    attach_ftype: KodairaType
    fibers: tuple[MarkedFiber, ...]
    children: tuple["ChildLink", ...] = ()
    isotrivial_jinf: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "fibers", tuple(sorted(self.fibers, key=lambda f: f.fid)))
        object.__setattr__(
            self, "children", tuple(sorted(self.children, key=lambda c: c.node.pid))
        )

    def fiber(self, fid: str) -> MarkedFiber:
        for f in self.fibers:
            if f.fid == fid:
                return f
        raise KeyError(f"pseudo component {self.pid} has no fiber {fid}")

    def nodes(self) -> list["PseudoComponent"]:
        out = [self]
        for link in self.children:
            out.extend(link.node.nodes())
        return out


@dataclass(frozen=True)
class ChildLink:
    via_fiber: str
    node: PseudoComponent


@dataclass(frozen=True)
class TreeAttachment:
    """A pseudoelliptic tree glued to the E component of an intermediate fiber
    on an elliptic or type II pseudoelliptic host."""

    host_component: str
    host_fiber: str
    root: PseudoComponent


def subtree_markers(node: PseudoComponent) -> frozenset[int]:
    """All weight indices marked anywhere in the tree below (and on) `node`.

    Host pseudofibers repeat their child's markers, so a plain union is the
    each-marker-once total that drives every derived coefficient.
    """
    out: set[int] = set()
    for n in node.nodes():
        for f in n.fibers:
            out |= f.markers
    return frozenset(out)


@dataclass(frozen=True)
class BrokenEllipticSurface:
    """The full decorated dual graph of a weighted broken elliptic surface."""

    weights: WeightVector
    elliptic: tuple[EllipticComponent, ...]
    pseudo2: tuple[TypeIIComponent, ...] = ()
    glues: tuple[Glue, ...] = ()
    trees: tuple[TreeAttachment, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "elliptic", tuple(sorted(self.elliptic, key=lambda c: c.cid))
        )
        object.__setattr__(
            self, "pseudo2", tuple(sorted(self.pseudo2, key=lambda c: c.cid))
        )
        object.__setattr__(self, "glues", tuple(sorted(self.glues, key=lambda g: g.gid)))
        object.__setattr__(
            self,
            "trees",
            tuple(sorted(self.trees, key=lambda t: (t.host_component, t.host_fiber))),
        )

    # -- lookups ----------------------------------------------------------

    def components(self) -> tuple[EllipticComponent | TypeIIComponent, ...]:
        return tuple(sorted(self.elliptic + self.pseudo2, key=lambda c: c.cid))

    def component(self, cid: str) -> EllipticComponent | TypeIIComponent:
        for c in self.components():
            if c.cid == cid:
                return c
        raise KeyError(f"no component {cid}")

    def is_elliptic(self, cid: str) -> bool:
        return any(c.cid == cid for c in self.elliptic)

    def glue_ends(self, cid: str) -> list[tuple[Glue, AttachEnd]]:
        """Every attaching-fiber end on the given component, glue included."""
        out = []
        for g in self.glues:
            for end in g.ends():
                if end.component == cid:
                    out.append((g, end))
        return out

    def attach_fibers(self, cid: str) -> list[tuple[MarkedFiber, str]]:
        """The implied coefficient-one attaching fibers on a component,
        paired with the peer component id."""
        out = []
        for g, end in self.glue_ends(cid):
            state = fiber_model_at(end.ftype, Fraction(1))
            fiber = MarkedFiber(end.fiber_id, end.ftype, Fraction(1), state)
            out.append((fiber, g.peer_of(cid).component))
        return out

    def trees_on(self, cid: str) -> tuple[TreeAttachment, ...]:
        return tuple(t for t in self.trees if t.host_component == cid)

    def tree(self, tree_id: str) -> TreeAttachment:
        for t in self.trees:
            if t.root.pid == tree_id:
                return t
        raise KeyError(f"no attached tree rooted at {tree_id}")

    def pseudo_nodes(self) -> list[PseudoComponent]:
        out: list[PseudoComponent] = []
        for t in self.trees:
            out.extend(t.root.nodes())
        return out

    def all_ids(self) -> list[str]:
        return [c.cid for c in self.components()] + [n.pid for n in self.pseudo_nodes()]

    # -- derived quantities -------------------------------------------------

    def fiber_coeff(self, fiber: MarkedFiber) -> Fraction:
        """Ground-truth coefficient: the weight sum over the fiber's markers."""
        return sum((self.weights.weight(i) for i in sorted(fiber.markers)), Fraction(0))

    def marker_set(self, cid: str) -> frozenset[int]:
        """Every weight index whose marked fiber projects to this component's
        base point set, including markers carried by hosted trees."""
        comp = self.component(cid)
        out: set[int] = set()
        for f in comp.fibers:
            out |= f.markers
        return frozenset(out)


# -- base curve projection ----------------------------------------------------


def pre_base_curve(X: BrokenEllipticSurface) -> MarkedNodalCurve:
    """Dual graph before contracting type II pseudoelliptic vertices."""
    vertices = tuple(Vertex(c.vertex, c.genus) for c in X.components())
    vmap = {c.cid: c.vertex for c in X.components()}
    edges = tuple(
        (vmap[g.a.component], vmap[g.b.component]) for g in X.glues
    )
    markers = []
    for c in X.components():
        for f in c.fibers:
            for i in sorted(f.markers):
                markers.append(Marker(i, c.vertex))
    return MarkedNodalCurve(vertices, edges, tuple(markers))


def base_curve(X: BrokenEllipticSurface) -> MarkedNodalCurve:
    """The dual graph of the image curve.

    Type II pseudoelliptic components are contracted by the fibration, so
    their vertices collapse onto a neighbor with the same deterministic rule
    the weighted-curve reducer uses; pseudoelliptic trees contribute nothing.
    A component with no neighbor (a whole-surface pseudoelliptic) keeps its
    vertex so the projection stays a curve.
    """
    curve = pre_base_curve(X)
    for c in sorted(X.pseudo2, key=lambda c: c.vertex):
        if len(curve.vertices) > 1 and curve.neighbors(c.vertex):
            curve = contract_into_neighbor(curve, c.vertex)
    return curve


# -- section adjunction -------------------------------------------------------


def section_degree(X: BrokenEllipticSurface, cid: str) -> Fraction:
    """Degree of the log canonical divisor on the section over one component:
    2g - 2 + (number of attaching fibers) + (sum of marked-fiber coefficients).

    Coefficients are evaluated from the weight vector, so the result is exact
    even if cached fiber coefficients are stale.
    """
    comp = X.component(cid)
    if not X.is_elliptic(cid):
        raise NoSectionError(f"component {cid} is pseudoelliptic; its section is contracted")
    valence = len(X.glue_ends(cid))
    marked = sum((X.fiber_coeff(f) for f in comp.fibers), Fraction(0))
    return 2 * comp.genus - 2 + valence + marked


def should_contract_section(X: BrokenEllipticSurface, cid: str) -> bool:
    """True exactly when the weighted degree on the section is non-positive."""
    return section_degree(X, cid) <= 0


# -- pseudoelliptic fate ------------------------------------------------------


PSEUDO_BIG = "Big"
PSEUDO_TO_POINT = "ContractToPoint"
PSEUDO_TO_CURVE = "ContractToCurve"


def pseudo_fate(X: BrokenEllipticSurface, tree_id: str) -> str:
    """What the log canonical map does to an attached pseudoelliptic tree.

    With S the tree's total marked weight and c the threshold of the host
    fiber type: the tree stays (Big) while S > c and contracts once S <= c,
    to a curve instead of a point only for trees whose root is flagged as an
    isotrivial j-infinity quotient with trivial fundamental line bundle.
    """
    att = X.tree(tree_id)
    host = X.component(att.host_component)
    hfiber = host.fiber(att.host_fiber)
    c = lct_threshold(hfiber.ftype)
    if c is None:
        raise MissingThreshold(f"host fiber type {hfiber.ftype} has no threshold")
    total = sum((X.weights.weight(i) for i in sorted(subtree_markers(att.root))), Fraction(0))
    if total > c:
        return PSEUDO_BIG
    if att.root.isotrivial_jinf and att.root.degL == 0:
        return PSEUDO_TO_CURVE
    return PSEUDO_TO_POINT


# -- volume -------------------------------------------------------------------


def volume(X: BrokenEllipticSurface) -> Fraction:
    """Self-intersection of the log canonical divisor on an irreducible model.

    Only defined for a single elliptic component with every marked fiber in
    Weierstrass or intermediate state: there the canonical bundle formula and
    the tabulated intermediate pairings determine the expansion

        (K + S + F)^2 = 2k - degL + sum_i (2 a_i + corr_i),
        k = 2g - 2 + degL,

    where corr vanishes for a Weierstrass fiber and for an intermediate fiber
    of type t equals a^2 A^2 + 2a(alpha+1) A.E + (alpha+1)^2 E^2 from the
    local table.  Everything else raises UnsupportedConfiguration.
    """
    if len(X.elliptic) != 1 or X.pseudo2 or X.trees or X.glues:
        raise UnsupportedConfiguration("volume needs an irreducible elliptic model")
    comp = X.elliptic[0]
    k = 2 * comp.genus - 2 + comp.degL
    total = 2 * k - comp.degL
    for f in comp.fibers:
        a = X.fiber_coeff(f)
        total += 2 * a
        if f.state == FiberState.TWISTED:
            raise UnsupportedConfiguration(
                f"fiber {f.fid} is twisted; its local pairings are not tabulated"
            )
        if f.state == FiberState.INTERMEDIATE:
            data = intersection_data(f.ftype)
            alpha = canonical_contribution(f.ftype, FiberState.INTERMEDIATE)
            c1 = alpha + 1
            total += a * a * data.A_sq + 2 * a * c1 * data.AE + c1 * c1 * data.E_sq
    return total


# -- validation ---------------------------------------------------------------


def _check_fiber_state(
    X: BrokenEllipticSurface,
    owner: str,
    f: MarkedFiber,
    hosts: dict[tuple[str, str], frozenset[int]],
    out: list[Violation],
) -> None:
    derived = X.fiber_coeff(f)
    key = (owner, f.fid)
    if key in hosts:
        expected = hosts[key]
        if f.markers != expected:
            out.append(
                Violation(
                    "eq-4.1",
                    f"{owner}/{f.fid}",
                    f"host fiber markers {sorted(f.markers)} != tree markers {sorted(expected)}",
                )
            )
            return
        if f.coeff != derived:
            out.append(
                Violation(
                    "eq-4.1",
                    f"{owner}/{f.fid}",
                    f"host coefficient {f.coeff} != tree marked weight {derived}",
                )
            )
        if f.state != FiberState.INTERMEDIATE:
            out.append(
                Violation("host-state", f"{owner}/{f.fid}", "tree host fibers must be intermediate")
            )
            return
        try:
            a0 = lct_threshold(f.ftype)
        except UnsupportedFiberType:
            out.append(Violation("fiber-type", f"{owner}/{f.fid}", "N2 cannot host a tree"))
            return
        if a0 is None:
            out.append(
                Violation(
                    "host-state", f"{owner}/{f.fid}", f"type {f.ftype} has no intermediate model"
                )
            )
        elif not a0 <= derived <= 1:
            # the closed bottom end is the nef limit exactly on the collapse
            # wall; strictly below it the tree must already have collapsed
            out.append(
                Violation(
                    "host-state",
                    f"{owner}/{f.fid}",
                    f"host coefficient {derived} outside [{a0}, 1]",
                )
            )
        return
    if not f.markers:
        # marker-less fibers carry the fixed coefficient one of the boundary:
        # only a twisted fiber (e.g. the residue of a collapse onto a curve)
        # is representable without backing markers
        try:
            a0 = lct_threshold(f.ftype)
        except UnsupportedFiberType:
            a0 = None
        if f.state != FiberState.TWISTED or f.coeff != 1 or a0 is None:
            out.append(
                Violation(
                    "unmarked-fiber",
                    f"{owner}/{f.fid}",
                    "a fiber without markers must be twisted with coefficient one",
                )
            )
        return
    if f.coeff != derived:
        out.append(
            Violation(
                "coeff",
                f"{owner}/{f.fid}",
                f"cached coefficient {f.coeff} != marker weight sum {derived}",
            )
        )
    if f.ftype.family == "N2":
        if derived != 0 or f.state != FiberState.WEIERSTRASS:
            out.append(
                Violation(
                    "fiber-type",
                    f"{owner}/{f.fid}",
                    "N2 state rules are unmodeled; only coefficient 0 Weierstrass is accepted",
                )
            )
        return
    want = fiber_model_at(f.ftype, derived)
    boundary_intermediate = (
        f.state == FiberState.INTERMEDIATE
        and derived == 1
        and lct_threshold(f.ftype) is not None
    )
    if f.state != want and not boundary_intermediate:
        out.append(
            Violation(
                "fiber-state",
                f"{owner}/{f.fid}",
                f"state {f.state} but coefficient {derived} implies {want}",
            )
        )


def validate(X: BrokenEllipticSurface) -> list[Violation]:
    """Every invariant violation in the model, as data; empty means valid."""
    out: list[Violation] = []

    ids = X.all_ids()
    if len(set(ids)) != len(ids):
        out.append(Violation("ids", "surface", "component/node ids are not unique"))
    verts = [c.vertex for c in X.components()]
    if len(set(verts)) != len(verts):
        out.append(Violation("vertices", "surface", "two components share a base vertex"))

    # gluings
    for g in X.glues:
        for end in g.ends():
            try:
                comp = X.component(end.component)
            except KeyError:
                out.append(Violation("glue", g.gid, f"unknown component {end.component}"))
                continue
            if any(f.fid == end.fiber_id for f in comp.fibers):
                out.append(
                    Violation(
                        "glue",
                        g.gid,
                        f"attach fiber id {end.fiber_id} collides with a marked fiber",
                    )
                )
            try:
                a0 = lct_threshold(end.ftype)
            except UnsupportedFiberType:
                out.append(Violation("glue", g.gid, "N2 attaching fibers are unsupported"))
                continue
            if a0 is None and not end.ftype.is_stable:
                out.append(
                    Violation(
                        "glue",
                        g.gid,
                        f"type {end.ftype} is neither twisted-capable nor stable",
                    )
                )
    end_ids: set[tuple[str, str]] = set()
    for g in X.glues:
        for end in g.ends():
            key = (end.component, end.fiber_id)
            if key in end_ids:
                out.append(Violation("glue", g.gid, f"attach fiber {key} used twice"))
            end_ids.add(key)

    # fiber id uniqueness per component
    for comp in X.components():
        fids = [f.fid for f in comp.fibers]
        if len(set(fids)) != len(fids):
            out.append(Violation("ids", comp.cid, "duplicate fiber ids"))
    for node in X.pseudo_nodes():
        fids = [f.fid for f in node.fibers]
        if len(set(fids)) != len(fids):
            out.append(Violation("ids", node.pid, "duplicate pseudofiber ids"))

    # host fiber map: (owner, fiber id) -> markers required by eq. (4.1)
    hosts: dict[tuple[str, str], frozenset[int]] = {}
    for att in X.trees:
        try:
            host = X.component(att.host_component)
        except KeyError:
            out.append(Violation("tree", att.root.pid, f"unknown host {att.host_component}"))
            continue
        try:
            host.fiber(att.host_fiber)
        except KeyError:
            out.append(
                Violation(
                    "tree",
                    att.root.pid,
                    f"host {att.host_component} has no fiber {att.host_fiber}",
                )
            )
            continue
        hosts[(att.host_component, att.host_fiber)] = subtree_markers(att.root)
    for node in X.pseudo_nodes():
        for link in node.children:
            try:
                node.fiber(link.via_fiber)
            except KeyError:
                out.append(
                    Violation(
                        "tree",
                        link.node.pid,
                        f"parent {node.pid} has no pseudofiber {link.via_fiber}",
                    )
                )
                continue
            hosts[(node.pid, link.via_fiber)] = subtree_markers(link.node)

    # marker disjointness over non-host fibers
    seen: dict[int, str] = {}
    owners: list[tuple[str, tuple[MarkedFiber, ...]]] = [
        (c.cid, c.fibers) for c in X.components()
    ] + [(n.pid, n.fibers) for n in X.pseudo_nodes()]
    for owner, fibers in owners:
        for f in fibers:
            if (owner, f.fid) in hosts:
                continue
            for i in f.markers:
                if not 1 <= i <= X.weights.r:
                    out.append(
                        Violation("marker", f"{owner}/{f.fid}", f"marker {i} outside 1..{X.weights.r}")
                    )
                elif i in seen:
                    out.append(
                        Violation(
                            "marker",
                            f"{owner}/{f.fid}",
                            f"marker {i} already used by {seen[i]}",
                        )
                    )
                else:
                    seen[i] = f"{owner}/{f.fid}"

    # per-fiber states, coefficients, eq. (4.1)
    for owner, fibers in owners:
        for f in fibers:
            _check_fiber_state(X, owner, f, hosts, out)

    # pseudo node attach types must admit a twisted model
    for node in X.pseudo_nodes():
        try:
            a0 = lct_threshold(node.attach_ftype)
        except UnsupportedFiberType:
            out.append(Violation("tree", node.pid, "N2 attaching pseudofiber"))
            continue
        if a0 is None and not node.attach_ftype.is_stable:
            out.append(
                Violation("tree", node.pid, f"attach type {node.attach_ftype} cannot be twisted")
            )

    # type II components need >= 2 attachments unless they are the residue of
    # a whole-surface section contraction
    for c in X.pseudo2:
        n_ends = len(X.glue_ends(c.cid))
        if n_ends < 2 and not (n_ends == 0 and len(X.components()) == 1):
            out.append(
                Violation(
                    "type-ii",
                    c.cid,
                    f"type II component has {n_ends} attaching fiber(s); needs >= 2",
                )
            )

    # degL bookkeeping: S^2 = -degL <= 0, and degL = 0 forces every singular
    # fiber on an elliptic component to be twisted
    for comp in X.components():
        if comp.degL < 0:
            out.append(Violation("degL", comp.cid, "negative fundamental line bundle degree"))
    for node in X.pseudo_nodes():
        if node.degL < 0:
            out.append(Violation("degL", node.pid, "negative fundamental line bundle degree"))
    for comp in X.elliptic:
        if comp.degL == 0:
            for f in comp.fibers:
                if not f.ftype.is_smooth and f.state != FiberState.TWISTED:
                    out.append(
                        Violation(
                            "degL",
                            f"{comp.cid}/{f.fid}",
                            "degL = 0 permits only smooth or twisted fibers",
                        )
                    )
            for g, end in X.glue_ends(comp.cid):
                if end.ftype.is_stable and not end.ftype.is_smooth:
                    out.append(
                        Violation(
                            "degL",
                            f"{comp.cid}/{end.fiber_id}",
                            "degL = 0 permits only smooth or twisted attaching fibers",
                        )
                    )

    # connectivity of the component graph
    if len(X.components()) > 1:
        adjacency: dict[str, set[str]] = {c.cid: set() for c in X.components()}
        for g in X.glues:
            if g.a.component in adjacency and g.b.component in adjacency:
                adjacency[g.a.component].add(g.b.component)
                adjacency[g.b.component].add(g.a.component)
        start = X.components()[0].cid
        seen_c = {start}
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for w in adjacency[v]:
                if w not in seen_c:
                    seen_c.add(w)
                    frontier.append(w)
        if len(seen_c) != len(X.components()):
            out.append(Violation("connectivity", "surface", "component graph is disconnected"))

    return out


# -- isomorphism signature ----------------------------------------------------


def model_shape(X: BrokenEllipticSurface):
    """Weight-independent structure of the model, for graph-isomorphism checks.

    Two reductions of one input model land in the same chamber exactly when
    these shapes coincide: same components, gluings, trees, fiber types,
    states, and marker assignments; coefficients are deliberately omitted.
    """

    def fiber_shape(f: MarkedFiber):
        return (f.fid, str(f.ftype), int(f.state), tuple(sorted(f.markers)), f.nonminimal_cusp)

    def node_shape(n: PseudoComponent):
        return (
            n.pid,
            n.degL,
            str(n.attach_ftype),
            tuple(fiber_shape(f) for f in n.fibers),
            tuple((l.via_fiber, node_shape(l.node)) for l in n.children),
            n.isotrivial_jinf,
        )

    return (
        tuple(
            (c.cid, c.vertex, c.genus, c.degL, tuple(fiber_shape(f) for f in c.fibers))
            for c in X.elliptic
        ),
        tuple(
            (c.cid, c.vertex, c.genus, c.degL, tuple(fiber_shape(f) for f in c.fibers))
            for c in X.pseudo2
        ),
        tuple(
            (g.gid,)
            + tuple(
                (e.component, e.fiber_id, str(e.ftype))
                for e in sorted(g.ends(), key=lambda e: (e.component, e.fiber_id))
            )
            for g in X.glues
        ),
        tuple((t.host_component, t.host_fiber, node_shape(t.root)) for t in X.trees),
    )

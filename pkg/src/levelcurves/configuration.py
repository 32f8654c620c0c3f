"""Combinatorial model of critical level-curve configurations.

A configuration is a recursive record of the critical level curves and zeros
of a polynomial on its tract: each node is either a single point with a zero
multiplicity, or a planar embedded graph (rotation system) carrying a level
H, a vertex argument a(x), per-face zero counts z(D), distinguished-point
data, one child configuration per bounded face, and an orientation-preserving
gradient correspondence between the distinguished points of each face
boundary and those of its child.

Equality of configurations is equality up to orientation-preserving
homeomorphism of the plane; it is decided by canonical-code comparison.

Conventions.  Darts 2e and 2e+1 are the two ends of edge e.  Rotations list
darts counterclockwise around each vertex.  The face traversal
``next(d) = sigma^{-1}(opposite(d))`` walks every bounded face
counterclockwise, which is also the direction of increasing argument along
the curve; the orbit through ``outer_anchor`` is the unbounded face.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .polynomials import atypicality_degree

TWO_PI = 2.0 * math.pi

ARG_QUANTUM = 10 ** 9      # args are quantized to 1e-9 of a full turn
LEVEL_QUANTUM = 10 ** 9    # levels quantized to 1e-9


def norm_arg(a: float) -> float:
    """Normalize an angle into [0, 2*pi), snapping near-zero to exactly 0."""
    a = a % TWO_PI
    if a > TWO_PI - 1e-8:
        a = 0.0
    if abs(a) < 1e-8:
        a = 0.0
    return a


def quantize_arg(a: float) -> int:
    return round(a / TWO_PI * ARG_QUANTUM) % ARG_QUANTUM


def quantize_level(h: float) -> int:
    return round(h * LEVEL_QUANTUM)


# ---------------------------------------------------------------------------
# members
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointMember:
    """A zero of multiplicity Z, viewed as a single-point configuration node."""

    Z: int


@dataclass(frozen=True)
class GraphMember:
    """One critical level curve as an embedded graph with auxiliary data.

    rotation    -- per vertex, dart ids in counterclockwise order
    vertex_args -- a(x) per vertex, in [0, 2*pi)
    edge_marks  -- per edge, number of interior distinguished points
    face_z      -- per bounded face (keyed by the minimal dart of its orbit),
                   the number of zeros it encloses
    outer_anchor-- a dart on the unbounded face orbit
    """

    level: float
    rotation: tuple
    vertex_args: tuple
    edge_marks: tuple
    face_z: dict
    outer_anchor: int

    def __post_init__(self):
        object.__setattr__(self, "rotation", tuple(tuple(r) for r in self.rotation))
        object.__setattr__(self, "vertex_args", tuple(norm_arg(a) for a in self.vertex_args))
        object.__setattr__(self, "edge_marks", tuple(int(m) for m in self.edge_marks))
        object.__setattr__(self, "face_z", dict(self.face_z))

    # -- structure ---------------------------------------------------------

    @property
    def n_darts(self) -> int:
        return 2 * len(self.edge_marks)

    @property
    def n_vertices(self) -> int:
        return len(self.rotation)

    def vertex_of(self, d: int) -> int:
        for v, rot in enumerate(self.rotation):
            if d in rot:
                return v
        raise KeyError(d)

    def _vertex_map(self):
        vm = [None] * self.n_darts
        for v, rot in enumerate(self.rotation):
            for d in rot:
                vm[d] = v
        return vm

    def sigma_next(self, d: int) -> int:
        v = self._vm()[d]
        rot = self.rotation[v]
        i = rot.index(d)
        return rot[(i + 1) % len(rot)]

    def sigma_prev(self, d: int) -> int:
        v = self._vm()[d]
        rot = self.rotation[v]
        i = rot.index(d)
        return rot[(i - 1) % len(rot)]

    def _vm(self):
        if not hasattr(self, "_vm_cache"):
            object.__setattr__(self, "_vm_cache", self._vertex_map())
        return self._vm_cache

    def face_next(self, d: int) -> int:
        return self.sigma_prev(d ^ 1)

    def face_orbit(self, d0: int):
        orbit = [d0]
        d = self.face_next(d0)
        while d != d0:
            orbit.append(d)
            d = self.face_next(d)
        return orbit

    def faces(self):
        """All face orbits keyed by their minimal dart."""
        seen = set()
        out = {}
        for d in range(self.n_darts):
            if d in seen:
                continue
            orbit = self.face_orbit(d)
            seen.update(orbit)
            key = min(orbit)
            out[key] = self.face_orbit(key)
        return out

    def outer_key(self) -> int:
        return min(self.face_orbit(self.outer_anchor))

    def bounded_faces(self):
        faces = self.faces()
        outer = self.outer_key()
        return {k: orb for k, orb in faces.items() if k != outer}

    def vertex_multiplicity(self, v: int) -> int:
        return len(self.rotation[v]) // 2 - 1

    def Z(self) -> int:
        return sum(self.face_z.values())

    def is_distinguished_vertex(self, v: int) -> bool:
        return quantize_arg(self.vertex_args[v]) == 0

    # -- argument bookkeeping ----------------------------------------------

    def increasing_dart(self, e: int) -> int:
        """The dart of edge e whose traversal direction has increasing argument.

        That is the dart lying in a bounded face orbit.
        """
        outer = set(self.face_orbit(self.outer_anchor))
        d = 2 * e
        return d ^ 1 if d in outer else d

    def edge_delta(self, e: int) -> float:
        """Total argument increase along edge e (bounded-face direction)."""
        d = self.increasing_dart(e)
        vm = self._vm()
        a1 = self.vertex_args[vm[d]]
        a2 = self.vertex_args[vm[d ^ 1]]
        r2 = TWO_PI if quantize_arg(a2) == 0 else a2
        r1 = a1
        return r2 - r1 + TWO_PI * self.edge_marks[e]

    # -- distinguished point walks ------------------------------------------

    def face_walk(self, key: int):
        return self.face_orbit(key)

    def outer_walk(self):
        """Darts of the unbounded face traversed with increasing argument."""
        orbit = self.face_orbit(self.outer_anchor)
        walk = [d ^ 1 for d in reversed(orbit)]
        i = walk.index(min(walk))
        return walk[i:] + walk[:i]

    def walk_crossings(self, walk):
        """Distinguished points met along a dart walk, in traversal order.

        Each item is ("v", departure_dart) for a distinguished corner or
        ("e", edge, index) for an interior distinguished point.
        """
        vm = self._vm()
        out = []
        for d in walk:
            if self.is_distinguished_vertex(vm[d]):
                out.append(("v", d))
            e = d >> 1
            out.extend(("e", e, i) for i in range(self.edge_marks[e]))
        return out

    def face_crossings(self, key: int):
        return self.walk_crossings(self.face_walk(key))

    def outer_crossings(self):
        return self.walk_crossings(self.outer_walk())


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------


@dataclass
class Configuration:
    """Recursive configuration node: a member plus one child per bounded face.

    ``offsets`` stores, for each bounded face with a graph child, the index
    into the child's outer distinguished-point cycle that the first
    distinguished point of the face boundary maps to; orientation
    preservation determines the rest of the gradient correspondence.
    """

    member: object                      # PointMember | GraphMember
    children: dict = field(default_factory=dict)
    offsets: dict = field(default_factory=dict)

    def is_point(self) -> bool:
        return isinstance(self.member, PointMember)

    def Z(self) -> int:
        return self.member.Z if self.is_point() else self.member.Z()

    def walk(self, path=()):
        """Yield (path, configuration) over the tree, parents first."""
        yield path, self
        if not self.is_point():
            for key in sorted(self.children):
                yield from self.children[key].walk(path + (key,))

    def at(self, path):
        node = self
        for key in path:
            node = node.children[key]
        return node

    def replaced(self, path, new_node) -> "Configuration":
        """Functional replacement of the node at ``path``."""
        if not path:
            return new_node
        key = path[0]
        children = dict(self.children)
        children[key] = self.children[key].replaced(path[1:], new_node)
        return Configuration(self.member, children, dict(self.offsets))


def config_point(Z: int) -> Configuration:
    return Configuration(PointMember(Z))


def figure_eight(level, arg, marks, z1, z2) -> GraphMember:
    """Single-vertex two-loop graph; petals are faces keyed by darts 0 and 2."""
    return GraphMember(
        level=level,
        rotation=((0, 1, 2, 3),),
        vertex_args=(arg,),
        edge_marks=tuple(marks),
        face_z={0: z1, 2: z2},
        outer_anchor=1,
    )


def rose(level, arg, petal_z) -> GraphMember:
    """Single vertex with one loop per petal; petal i is the face keyed by 2i."""
    m = len(petal_z)
    a = norm_arg(arg)
    marks = []
    for z in petal_z:
        marks.append(z - 1 if quantize_arg(a) == 0 else z)
    return GraphMember(
        level=level,
        rotation=(tuple(range(2 * m)),),
        vertex_args=(a,),
        edge_marks=tuple(marks),
        face_z={2 * i: petal_z[i] for i in range(m)},
        outer_anchor=1,
    )


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate(config: Configuration):
    """Check every structural rule; returns a list of violations (empty = ok)."""
    violations = []

    def check_member(member, path):
        where = f"node {path}"
        if isinstance(member, PointMember):
            if member.Z < 1:
                violations.append(f"{where}: point multiplicity must be positive")
            return True
        g = member
        nd = g.n_darts
        seen = [0] * nd
        for rot in g.rotation:
            for d in rot:
                if not (0 <= d < nd):
                    violations.append(f"{where}: dart {d} out of range")
                    return False
                seen[d] += 1
        if any(c != 1 for c in seen):
            violations.append(f"{where}: rotation lists must partition the darts")
            return False
        if not (0 <= g.outer_anchor < nd):
            violations.append(f"{where}: outer anchor {g.outer_anchor} is not a dart")
            return False
        if not (0.0 < g.level < 1.0):
            violations.append(f"{where}: level must lie in (0,1)")
        for v, rot in enumerate(g.rotation):
            if len(rot) < 4 or len(rot) % 2:
                violations.append(
                    f"{where}: vertex {v} has {len(rot)} edge-ends; "
                    "needs an even count of at least 4"
                )
        # connectivity over darts via rotation + opposite
        reach = {0}
        stack = [0]
        while stack:
            d = stack.pop()
            for nxt in (d ^ 1, g.sigma_next(d)):
                if nxt not in reach:
                    reach.add(nxt)
                    stack.append(nxt)
        if len(reach) != nd:
            violations.append(f"{where}: graph is not connected")
            return False
        outer = set(g.face_orbit(g.outer_anchor))
        for e in range(len(g.edge_marks)):
            if ((2 * e) in outer) + ((2 * e + 1) in outer) != 1:
                violations.append(
                    f"{where}: edge {e} is not incident to the unbounded face "
                    "exactly once (not of analytic level curve type)"
                )
        bounded = g.bounded_faces()
        if set(g.face_z) != set(bounded):
            violations.append(f"{where}: face_z keys do not match the bounded faces")
            return False
        for key, orbit in bounded.items():
            z = g.face_z[key]
            if z < 1:
                violations.append(f"{where}: face {key} has non-positive zero count")
            total = sum(g.edge_delta(d >> 1) for d in orbit)
            if abs(total - TWO_PI * z) > 1e-6:
                violations.append(
                    f"{where}: argument increase {total:.6f} around face {key} "
                    f"does not match 2*pi*z(D) = {TWO_PI * z:.6f}"
                )
        for e in range(len(g.edge_marks)):
            if g.edge_marks[e] < 0:
                violations.append(f"{where}: edge {e} has negative mark count")
            if g.edge_delta(e) <= 1e-12:
                violations.append(
                    f"{where}: argument does not strictly increase along edge {e}"
                )
        return True

    for path, node in config.walk():
        sound = check_member(node.member, path)
        if node.is_point():
            if node.children:
                violations.append(f"node {path}: point member cannot have children")
            continue
        if not sound:
            continue
        g = node.member
        bounded = g.bounded_faces()
        for key in bounded:
            child = node.children.get(key)
            if child is None:
                violations.append(f"node {path}: face {key} has no child")
                continue
            if child.Z() != g.face_z[key]:
                violations.append(
                    f"node {path}: face {key} zero count {g.face_z[key]} "
                    f"differs from child total {child.Z()}"
                )
            if not child.is_point():
                if child.member.level >= g.level:
                    violations.append(
                        f"node {path}: face {key} violates the maximum-modulus rule "
                        f"(child level {child.member.level} >= parent {g.level})"
                    )
                off = node.offsets.get(key)
                if off is None or not (0 <= off < g.face_z[key]):
                    violations.append(
                        f"node {path}: face {key} needs a gradient offset in "
                        f"[0, {g.face_z[key]})"
                    )
        for key in node.children:
            if key not in bounded:
                violations.append(f"node {path}: child attached to unknown face {key}")
    return violations


# ---------------------------------------------------------------------------
# critical values and the containment order
# ---------------------------------------------------------------------------


def critical_values_of(config: Configuration):
    """Multiset of critical values carried by a configuration."""
    values = []
    for _, node in config.walk():
        if node.is_point():
            values.extend([0j] * (node.member.Z - 1))
        else:
            g = node.member
            for v in range(g.n_vertices):
                val = g.level * complex(math.cos(g.vertex_args[v]), math.sin(g.vertex_args[v]))
                values.extend([val] * g.vertex_multiplicity(v))
    values.sort(key=lambda w: (abs(w), w.real, w.imag))
    return values


def sorted_value_vector(config: Configuration):
    return tuple(critical_values_of(config))


@dataclass
class PrecOrder:
    """Strict containment order over the nodes and faces of a configuration."""

    pairs: set                  # (descendant path, ancestor path)
    face_zero_count: dict       # (path, face) -> zeros below that face
    face_value_count: dict      # (path, face) -> critical values below that face

    def precedes(self, a, b) -> bool:
        return (a, b) in self.pairs


def prec_order(config: Configuration) -> PrecOrder:
    pairs = set()
    fz = {}
    fv = {}

    def ancestors(path):
        for i in range(len(path)):
            yield path[:i]

    for path, node in config.walk():
        for anc in ancestors(path):
            pairs.add((path, anc))
        if node.is_point():
            continue
        for key, child in node.children.items():
            zeros = 0
            nvals = 0
            for _, sub in child.walk():
                if sub.is_point():
                    zeros += sub.member.Z
                    nvals += sub.member.Z - 1
                else:
                    g = sub.member
                    nvals += sum(g.vertex_multiplicity(v) for v in range(g.n_vertices))
            fz[(path, key)] = zeros
            fv[(path, key)] = nvals
    return PrecOrder(pairs, fz, fv)


# ---------------------------------------------------------------------------
# canonical codes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalCode:
    data: bytes

    def __eq__(self, other):
        return isinstance(other, CanonicalCode) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def hex(self):
        import hashlib

        return hashlib.sha256(self.data).hexdigest()[:16]


def _numbering_from(g: GraphMember, start: int):
    """Deterministic dart numbering from a starting dart.

    Darts are appended by expanding vertices in rotation order and following
    edge opposites, so equal rotation systems yield equal numberings.
    """
    num = {start: 0}
    order = [start]
    expanded = set()
    vm = g._vm()
    i = 0
    while i < len(order):
        d = order[i]
        v = vm[d]
        if v not in expanded:
            expanded.add(v)
            rot = g.rotation[v]
            j = rot.index(d)
            for k in range(1, len(rot)):
                e = rot[(j + k) % len(rot)]
                if e not in num:
                    num[e] = len(order)
                    order.append(e)
        if (d ^ 1) not in num:
            num[d ^ 1] = len(order)
            order.append(d ^ 1)
        i += 1
    return num, order


def _canonical_graph_data(node: Configuration):
    """Minimal encoding over starting darts, plus canonical outer-bag starts."""
    g = node.member
    child_data = {}
    for key, child in node.children.items():
        child_data[key] = _canonical(child)

    faces = g.faces()
    outer_key = g.outer_key()
    internal_walk = g.outer_walk()
    internal_bag = g.outer_crossings()
    # prefix[i] = number of crossings strictly before segment i of the walk
    prefix = []
    count = 0
    vm = g._vm()
    for d in internal_walk:
        prefix.append(count)
        if g.is_distinguished_vertex(vm[d]):
            count += 1
        count += g.edge_marks[d >> 1]

    best = None
    best_starts = []
    for start in range(g.n_darts):
        num, order = _numbering_from(g, start)
        sigma = tuple(num[g.sigma_next(d)] for d in order)
        theta = tuple(num[d ^ 1] for d in order)

        vertex_keys = {}
        for v in range(g.n_vertices):
            vertex_keys[v] = min(num[d] for d in g.rotation[v])
        vert_stream = tuple(
            quantize_arg(g.vertex_args[v])
            for v in sorted(range(g.n_vertices), key=lambda v: vertex_keys[v])
        )
        edge_keys = {e: min(num[2 * e], num[2 * e + 1]) for e in range(len(g.edge_marks))}
        edge_stream = tuple(
            g.edge_marks[e]
            for e in sorted(range(len(g.edge_marks)), key=lambda e: edge_keys[e])
        )

        face_entries = []
        for key, orbit in faces.items():
            fkey = min(num[d] for d in orbit)
            if key == outer_key:
                face_entries.append((fkey, -1, b"", -1))
                continue
            anchor = min(orbit, key=lambda d: num[d])
            # shift of the face walk so it starts at the canonical anchor
            walk = g.face_walk(key)
            crossings = g.face_crossings(key)
            fprefix = []
            c = 0
            for d in walk:
                fprefix.append(c)
                if g.is_distinguished_vertex(vm[d]):
                    c += 1
                c += g.edge_marks[d >> 1]
            p0 = fprefix[walk.index(anchor)]
            child = node.children[key]
            ccode, cstarts = child_data[key]
            m = g.face_z[key]
            if cstarts is None:
                off = -1
            else:
                raw = node.offsets[key]
                off = min((raw + p0 - c0) % m for c0 in cstarts)
            face_entries.append((fkey, g.face_z[key], ccode.data, off))
        face_entries.sort()

        stream = repr(
            (
                quantize_level(g.level),
                g.n_darts,
                sigma,
                theta,
                vert_stream,
                edge_stream,
                tuple(face_entries),
            )
        ).encode()

        if best is None or stream < best:
            best = stream
            best_starts = [num]
        elif stream == best:
            best_starts.append(num)

    # canonical outer-bag start positions, one per minimizing numbering
    starts = set()
    for num in best_starts:
        j = min(range(len(internal_walk)), key=lambda j: num[internal_walk[j]])
        starts.add(prefix[j] % max(1, len(internal_bag)))
    return CanonicalCode(b"G" + best), sorted(starts)


def _canonical(node: Configuration):
    if getattr(node, "_canon", None) is not None:
        return node._canon
    if node.is_point():
        result = (CanonicalCode(b"P%d" % node.member.Z), None)
    else:
        result = _canonical_graph_data(node)
    node._canon = result
    return result


def canonical_code(config: Configuration) -> CanonicalCode:
    """Order-independent encoding; equal codes mean equal configurations."""
    return _canonical(config)[0]


def equals(c1: Configuration, c2: Configuration) -> bool:
    return canonical_code(c1) == canonical_code(c2)


# ---------------------------------------------------------------------------
# single-edge faces (used by the scattering construction)
# ---------------------------------------------------------------------------


def find_single_edge_face(g: GraphMember) -> int:
    """A bounded face whose boundary is one edge, via the face-vertex tree.

    Joining each bounded face to the vertices on its boundary yields a tree
    whose leaves are faces; a leaf face has a single boundary edge.
    """
    vm = g._vm()
    bounded = g.bounded_faces()
    adj = {("f", k): set() for k in bounded}
    for v in range(g.n_vertices):
        adj[("v", v)] = set()
    for k, orbit in bounded.items():
        for d in orbit:
            adj[("f", k)].add(("v", vm[d]))
            adj[("v", vm[d])].add(("f", k))
    for v in range(g.n_vertices):
        if len(adj[("v", v)]) < 2:
            raise ValueError(
                "hypotheses violated: a vertex is incident to fewer than two bounded faces"
            )
    n_edges = sum(len(s) for s in adj.values()) // 2
    if n_edges != len(adj) - 1:
        raise ValueError("hypotheses violated: face-vertex incidence graph is not a tree")
    for k, orbit in sorted(bounded.items()):
        if len(adj[("f", k)]) == 1 and len(orbit) == 1:
            return k
    raise ValueError("no single-edge face found; graph is not of analytic level curve type")


# ---------------------------------------------------------------------------
# scattering perturbation
# ---------------------------------------------------------------------------


def _distinct_moduli(values):
    mods = sorted({round(abs(v), 12) for v in values})
    return [m for m in mods]


def _min_modulus_gap(values):
    mods = _distinct_moduli(values)
    gaps = [m2 - m1 for m1, m2 in zip(mods, mods[1:])]
    positive = [m for m in mods if m > 1e-12]
    if positive:
        gaps.append(positive[0])
    return min(gaps) if gaps else math.inf


def scatter_perturb(config: Configuration, nu: float) -> Configuration:
    """Strictly reduce the degeneracy of a configuration's value vector.

    Splits a multiple zero into a small figure-eight, rescales the level of a
    tied single-vertex curve, or scatters one vertex of a tied multi-vertex
    curve by detaching a single-edge face.  Critical values move by less than
    ``nu``; the output is again a valid configuration.
    """
    values = sorted_value_vector(config)
    M = atypicality_degree(values)
    if M == 0:
        return config
    if values and not nu < 1.0 - abs(values[-1]):
        raise ValueError("perturbation size must leave room below the unit level")
    if not nu < _min_modulus_gap(values):
        raise ValueError("perturbation size must be below the smallest modulus gap")

    tied_mod = abs(values[M - 1])

    if tied_mod < 1e-12:
        return _scatter_zero_case(config, nu)

    # graph members whose level is tied at the critical modulus
    level_members = []
    for path, node in config.walk():
        if not node.is_point() and abs(node.member.level - tied_mod) <= 1e-9 * max(tied_mod, 1.0):
            level_members.append((path, node))
    if not level_members:
        raise ValueError("no member found at the tied level")

    for path, node in level_members:
        g = node.member
        if g.n_vertices == 1 and g.vertex_multiplicity(0) == 1:
            return _scatter_rescale_case(config, path, nu)
    return _scatter_split_case(config, level_members[0][0], nu)


def _scatter_zero_case(config: Configuration, nu: float) -> Configuration:
    """Replace a multiple zero by a figure-eight at level nu/2."""
    target = None
    for path, node in config.walk():
        if node.is_point() and node.member.Z >= 2:
            target = (path, node)
            break
    if target is None:
        raise ValueError("zero critical value without a multiple zero")
    path, node = target
    k = node.member.Z
    member = figure_eight(level=nu / 2.0, arg=0.0, marks=(k - 2, 0), z1=k - 1, z2=1)
    new_node = Configuration(
        member,
        children={0: config_point(k - 1), 2: config_point(1)},
        offsets={},
    )
    out = config.replaced(path, new_node)
    # the incoming gradient correspondence of the enclosing face, if any,
    # starts at the new vertex; offset 0 aligns the first boundary point to it
    if path:
        parent = out.at(path[:-1])
        parent.offsets[path[-1]] = 0
    return out


def _scatter_rescale_case(config: Configuration, path, nu: float) -> Configuration:
    node = config.at(path)
    g = node.member
    member = GraphMember(
        level=(1.0 + nu / 2.0) * g.level,
        rotation=g.rotation,
        vertex_args=g.vertex_args,
        edge_marks=g.edge_marks,
        face_z=g.face_z,
        outer_anchor=g.outer_anchor,
    )
    return config.replaced(path, Configuration(member, dict(node.children), dict(node.offsets)))


@dataclass
class _Surgery:
    """Bookkeeping for the removal of one loop edge from a graph member."""

    old: GraphMember
    new: GraphMember
    loop_edge: int
    loop_vertex: int
    emap: dict          # surviving old edge -> (new edge, mark index shift)
    dart_map: dict      # surviving old dart -> new dart (None if absorbed)
    dissolved: bool

    def map_crossing(self, item):
        """Translate a distinguished-point identity across the surgery."""
        if item[0] == "e":
            _, e, i = item
            if e == self.loop_edge:
                return None
            new_e, shift = self.emap[e]
            return ("e", new_e, i + shift)
        _, d = item
        if (d >> 1) == self.loop_edge:
            return None
        vm = self.old._vm()
        if self.dissolved and vm[d] == self.loop_vertex:
            # a distinguished corner at the dissolved vertex becomes an
            # interior point of the merged edge
            new_e, shift = self.emap[d >> 1]
            return ("e", new_e, shift - 1) if shift > 0 else None
        nd = self.dart_map.get(d)
        return ("v", nd) if nd is not None else None

    def map_face_key(self, key):
        for d in self.old.face_orbit(key):
            nd = self.dart_map.get(d)
            if nd is None:
                continue
            nkey = min(self.new.face_orbit(nd))
            if nkey in self.new.face_z:
                return nkey
        raise ValueError("face did not survive the surgery")

    def crossing_shift(self, old_cross, new_cross):
        """Cyclic shift between a face's old and new crossing enumerations."""
        if not old_cross:
            return 0
        for idx, item in enumerate(old_cross):
            mapped = self.map_crossing(item)
            if mapped is not None and mapped in new_cross:
                return (idx - new_cross.index(mapped)) % len(old_cross)
        return 0

    def first_crossing_after_loop(self):
        """First surviving distinguished point reached just after the loop."""
        g = self.old
        bag = self.new.outer_crossings()
        if not bag:
            raise ValueError("remainder graph carries no distinguished points")
        walk = g.outer_walk()
        loop_positions = [i for i, d in enumerate(walk) if (d >> 1) == self.loop_edge]
        start = (loop_positions[0] + 1) if loop_positions else 0
        order = walk[start:] + walk[:start]
        vm = g._vm()
        for d in order:
            items = []
            if g.is_distinguished_vertex(vm[d]):
                items.append(("v", d))
            e = d >> 1
            items.extend(("e", e, i) for i in range(g.edge_marks[e]))
            for item in items:
                mapped = self.map_crossing(item)
                if mapped is not None and mapped in bag:
                    return mapped
        return bag[0]

    def bag_position_at_loop(self):
        """Index in the old outer cycle of the first point at or after the loop."""
        g = self.old
        walk = g.outer_walk()
        vm = g._vm()
        ordered = []
        for d in walk:
            if g.is_distinguished_vertex(vm[d]):
                ordered.append(("v", d))
            e = d >> 1
            ordered.extend(("e", e, i) for i in range(g.edge_marks[e]))
        for i, item in enumerate(ordered):
            if item[0] == "v" and vm[item[1]] == self.loop_vertex:
                return i
            if item[0] == "e" and item[1] == self.loop_edge:
                return i
        return 0


def _scatter_split_case(config: Configuration, path, nu: float) -> Configuration:
    """Detach a single-edge face of a multi-vertex curve into a figure-eight."""
    node = config.at(path)
    g = node.member
    f1 = find_single_edge_face(g)
    loop_dart = g.face_orbit(f1)[0]
    e1 = loop_dart >> 1
    vm = g._vm()
    z_vertex = vm[loop_dart]
    z_dist = g.is_distinguished_vertex(z_vertex)
    z_f1 = g.face_z[f1]
    z_rest = g.Z() - z_f1

    surgery = _remove_loop(g, e1)
    rest_member = surgery.new
    rest_children = {}
    rest_offsets = {}

    # carry surviving faces over; anchors may shift, so re-express offsets
    for key in g.bounded_faces():
        if key == f1:
            continue
        new_key = surgery.map_face_key(key)
        rest_children[new_key] = node.children[key]
        if key in node.offsets:
            old_cross = g.face_crossings(key)
            new_cross = rest_member.face_crossings(new_key)
            shift = surgery.crossing_shift(old_cross, new_cross)
            rest_offsets[new_key] = (node.offsets[key] + shift) % g.face_z[key]
    rest_node = Configuration(rest_member, rest_children, rest_offsets)

    # the new figure-eight: petal 0 holds the detached face's child, petal 2
    # holds the remainder of the curve, one level step above
    a = g.vertex_args[z_vertex]
    n1 = z_f1 - 1 if z_dist else z_f1
    n2 = z_rest - 1 if z_dist else z_rest
    hat = figure_eight(
        level=(1.0 + nu / 2.0) * g.level, arg=a, marks=(n1, n2), z1=z_f1, z2=z_rest
    )

    children = {0: node.children[f1], 2: rest_node}
    offsets = {}
    if not node.children[f1].is_point():
        # boundary enumerations of the old face and the new petal both start
        # at the scattered vertex (or the first point after it)
        offsets[0] = node.offsets[f1]
    # petal 2 -> remainder: enumerate the remainder's outer points beginning
    # with the edge that followed the detached loop
    rest_bag = rest_member.outer_crossings()
    first = surgery.first_crossing_after_loop()
    offsets[2] = rest_bag.index(first)
    hat_node = Configuration(hat, children, offsets)

    out = config.replaced(path, hat_node)
    if path:
        parent_path, key = path[:-1], path[-1]
        parent = out.at(parent_path)
        old_parent_offset = config.at(parent_path).offsets.get(key, 0)
        # re-aim the enclosing face's correspondence at the figure-eight's
        # cycle, which begins at the scattered vertex; the old image cycle is
        # re-anchored at the crossing met first at the detached loop
        m = g.Z()
        parent.offsets[key] = (old_parent_offset - surgery.bag_position_at_loop()) % m
    return out


def _remove_loop(g: GraphMember, e1: int) -> _Surgery:
    """Delete loop edge e1; dissolve its vertex when only two darts remain."""
    vm = g._vm()
    zv = vm[2 * e1]
    remaining = [d for d in g.rotation[zv] if (d >> 1) != e1]
    old_edges = [e for e in range(len(g.edge_marks)) if e != e1]
    dissolved = len(remaining) == 2

    if not dissolved:
        emap = {}
        marks = []
        for new_e, old_e in enumerate(old_edges):
            emap[old_e] = (new_e, 0)
            marks.append(g.edge_marks[old_e])
        dart_map = {}
        for old_e in old_edges:
            new_e = emap[old_e][0]
            dart_map[2 * old_e] = 2 * new_e
            dart_map[2 * old_e + 1] = 2 * new_e + 1
        rotation = tuple(
            tuple(dart_map[d] for d in r if (d >> 1) != e1) for r in g.rotation
        )
        outer = g.outer_anchor
        if (outer >> 1) == e1:
            outer = next(d for d in g.face_orbit(g.outer_anchor) if (d >> 1) != e1)
        member = GraphMember(
            level=g.level,
            rotation=rotation,
            vertex_args=g.vertex_args,
            edge_marks=tuple(marks),
            face_z={},
            outer_anchor=dart_map[outer],
        )
        surgery = _Surgery(g, member, e1, zv, emap, dart_map, False)
        surgery.new = _with_face_z(member, surgery)
        return surgery

    # the two surviving darts at the vertex join into one edge, oriented
    # along the increasing-argument direction through the dissolved vertex
    da, db = remaining
    ea, eb = da >> 1, db >> 1
    if ea == eb:
        raise ValueError("cannot dissolve a vertex whose remaining edges coincide")
    inc_a = g.increasing_dart(ea)
    if vm[inc_a ^ 1] == zv:
        first_e, first_d, second_e = ea, inc_a, eb
    else:
        first_e, first_d, second_e = eb, g.increasing_dart(eb), ea
    extra = 1 if g.is_distinguished_vertex(zv) else 0
    merged_marks = g.edge_marks[first_e] + extra + g.edge_marks[second_e]

    keep = [e for e in old_edges if e not in (ea, eb)]
    emap = {}
    marks = []
    for new_e, old_e in enumerate(keep):
        emap[old_e] = (new_e, 0)
        marks.append(g.edge_marks[old_e])
    merged_id = len(keep)
    emap[first_e] = (merged_id, 0)
    emap[second_e] = (merged_id, g.edge_marks[first_e] + extra)
    marks.append(merged_marks)

    second_inc = g.increasing_dart(second_e)
    dart_map = {}
    for old_e in keep:
        dart_map[2 * old_e] = 2 * emap[old_e][0]
        dart_map[2 * old_e + 1] = 2 * emap[old_e][0] + 1
    dart_map[first_d] = 2 * merged_id
    dart_map[second_inc ^ 1] = 2 * merged_id + 1
    # first_d^1 and second_inc sat at the dissolved vertex and are absorbed

    rotation = []
    args = []
    for v, r in enumerate(g.rotation):
        if v == zv:
            continue
        rotation.append(tuple(dart_map[d] for d in r if d in dart_map))
        args.append(g.vertex_args[v])

    outer_candidates = [
        d for d in g.face_orbit(g.outer_anchor) if d in dart_map
    ]
    if not outer_candidates:
        raise ValueError("unbounded face lost all anchor darts")
    member = GraphMember(
        level=g.level,
        rotation=tuple(rotation),
        vertex_args=tuple(args),
        edge_marks=tuple(marks),
        face_z={},
        outer_anchor=dart_map[outer_candidates[0]],
    )
    surgery = _Surgery(g, member, e1, zv, emap, dart_map, True)
    surgery.new = _with_face_z(member, surgery)
    return surgery


def _with_face_z(member: GraphMember, surgery: _Surgery) -> GraphMember:
    """Transfer bounded-face zero counts across the edge surgery."""
    g = surgery.old
    face_z = {}
    for key, orbit in g.bounded_faces().items():
        if all((d >> 1) == surgery.loop_edge for d in orbit):
            continue
        anchor = None
        for d in orbit:
            nd = surgery.dart_map.get(d)
            if nd is not None:
                anchor = nd
                break
        if anchor is None:
            raise ValueError("bounded face lost its anchor during surgery")
        face_z[min(member.face_orbit(anchor))] = g.face_z[key]
    return GraphMember(
        level=member.level,
        rotation=member.rotation,
        vertex_args=member.vertex_args,
        edge_marks=member.edge_marks,
        face_z=face_z,
        outer_anchor=member.outer_anchor,
    )


def _bag_position_from_loop(g, e1, z_vertex, bag):
    """Position in the outer bag of the first crossing at or after the loop."""
    if not bag:
        return 0
    walk = g.outer_walk()
    vm = g._vm()
    ordered = []
    for d in walk:
        if g.is_distinguished_vertex(vm[d]):
            ordered.append(("v", d))
        e = d >> 1
        ordered.extend(("e", e, i) for i in range(g.edge_marks[e]))
    loop_first = None
    for i, item in enumerate(ordered):
        if item[0] == "v" and vm[item[1]] == z_vertex:
            loop_first = i
            break
        if item[0] == "e" and item[1] == e1:
            loop_first = i
            break
    return loop_first if loop_first is not None else 0


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def config_to_json(config: Configuration) -> dict:
    if config.is_point():
        return {"kind": "point", "Z": config.member.Z}
    g = config.member
    faces = []
    for key in sorted(g.face_z):
        child = config.children[key]
        faces.append(
            {
                "anchor": key,
                "z": g.face_z[key],
                "child": config_to_json(child),
                "gradient_offset": config.offsets.get(key),
            }
        )
    return {
        "kind": "graph",
        "H": g.level,
        "rotation": [list(r) for r in g.rotation],
        "args": list(g.vertex_args),
        "edge_marks": list(g.edge_marks),
        "outer_anchor": g.outer_anchor,
        "faces": faces,
    }


def config_from_json(data: dict) -> Configuration:
    if data["kind"] == "point":
        return config_point(int(data["Z"]))
    if data["kind"] != "graph":
        raise ValueError(f"unknown configuration node kind {data.get('kind')!r}")
    member = GraphMember(
        level=float(data["H"]),
        rotation=tuple(tuple(r) for r in data["rotation"]),
        vertex_args=tuple(float(a) for a in data["args"]),
        edge_marks=tuple(int(m) for m in data["edge_marks"]),
        face_z={int(f["anchor"]): int(f["z"]) for f in data["faces"]},
        outer_anchor=int(data["outer_anchor"]),
    )
    children = {}
    offsets = {}
    for f in data["faces"]:
        key = int(f["anchor"])
        children[key] = config_from_json(f["child"])
        if f.get("gradient_offset") is not None:
            offsets[key] = int(f["gradient_offset"])
    return Configuration(member, children, offsets)


def dumps(config: Configuration, **kw) -> str:
    return json.dumps(config_to_json(config), **kw)


def loads(text: str) -> Configuration:
    return config_from_json(json.loads(text))

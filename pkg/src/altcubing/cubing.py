"""Cubical decomposition of the link exterior and its vertex links.

Each crossing ``n`` contributes an upper and a lower cube sharing the
square whose sides are the region edges ``C(R_m)`` around the crossing.
A cube corner is ``(i, h)``: ``i`` is the PD slot of the arc end the corner
sits over, ``h = 0`` on the shared square and ``h = 1`` on the boundary
face (top of the upper cube, bottom of the lower cube).

Edge labels are tuples: ``("A", n)``, ``("B", n)`` for the vertical edges
at crossing ``n``, ``("R", m)`` for the region edges and ``("bd", k)`` for
edges of the induced boundary cubing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .diagram import QuadrantLabeling

__all__ = [
    "MalformedPath",
    "UnknownVertex",
    "Cube",
    "CubedComplex",
    "LinkComplex",
    "DehnComplex",
    "EdgePath",
    "NpcReport",
    "build_cubing",
    "vertex_link",
    "is_flag",
    "check_npc",
    "dehn_complex",
    "is_local_geodesic",
    "essential_edges_report",
    "family_paths",
]

P_PLUS, P_MINUS = ("P+",), ("P-",)
SIDES = ("upper", "lower")


class MalformedPath(ValueError):
    pass


class UnknownVertex(KeyError):
    pass


def vertex_a(n):
    return ("a", n)


def vertex_b(n):
    return ("b", n)


CORNERS = tuple((i, h) for h in (0, 1) for i in range(4))
CUBE_EDGES = (
    tuple(((i, 0), ((i + 1) % 4, 0)) for i in range(4))
    + tuple(((i, 1), ((i + 1) % 4, 1)) for i in range(4))
    + tuple(((i, 0), (i, 1)) for i in range(4))
)
# faces as corner cycles
CUBE_FACES = {
    "square": tuple((i, 0) for i in range(4)),
    "boundary": tuple((i, 1) for i in range(4)),
    **{f"side{i}": ((i, 0), ((i + 1) % 4, 0), ((i + 1) % 4, 1), (i, 1)) for i in range(4)},
}


@dataclass(frozen=True)
class Cube:
    crossing: int
    side: str
    vertices: dict  # corner -> vertex label
    edges: dict  # frozenset({corner, corner}) -> edge label


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic representative: the smaller key
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def classes(self):
        out = {}
        for x in list(self.parent):
            out.setdefault(self.find(x), []).append(x)
        return out


@dataclass(frozen=True)
class CubedComplex:
    """The cube complex together with its face pairings.

    ``gluings`` maps ``(cube, face)`` to ``(cube', face', corner map)``;
    boundary faces are absent.  Cubes are keyed ``(n, side)`` and ordered
    lexicographically by crossing, side, corner.
    """

    c: int
    cubes: dict
    gluings: dict
    vertices: tuple
    edges: dict  # global edge label -> (vertex, vertex)
    squares: tuple  # global square ids (class representatives)
    boundary_squares: tuple
    corner_vertex_edges: dict = field(repr=False)  # (cube, corner) -> {edge label}
    _face_class: dict = field(repr=False)
    _edge_end_class: dict = field(repr=False)

    @property
    def interior_vertices(self):
        return (P_PLUS, P_MINUS)

    @property
    def boundary_vertices(self):
        return tuple(v for v in self.vertices if v not in (P_PLUS, P_MINUS))

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.squares) - len(self.cubes)

    def boundary_degree(self, v) -> int:
        """Number of boundary-cubing edges at boundary vertex ``v``."""
        return sum(1 for lab, ends in self.edges.items()
                   if lab[0] == "bd" for e in ends if e == v)


def _cube_labels(q: QuadrantLabeling, n: int, side: str):
    c = q.c
    quads = q.quadrants_at(n)  # quads[p] sits between slot p and p+1
    arc_at = {}
    for p in range(4):
        g = quads[p]
        if p % 2:  # slot p is over, p+1 under
            arc_at[p], arc_at[(p + 1) % 4] = q.alpha[g], q.beta[g]
        else:
            arc_at[p], arc_at[(p + 1) % 4] = q.beta[g], q.alpha[g]
    verts, lateral = {}, {}
    for i in range(4):
        over = i % 2 == 1
        verts[(i, 0)] = P_MINUS if over else P_PLUS
        if side == "upper":
            if over:
                m = q.under_crossing(arc_at[i])
                verts[(i, 1)], lateral[i] = vertex_b(m), ("B", m)
            else:
                verts[(i, 1)], lateral[i] = vertex_a(n), ("A", n)
        else:
            if over:
                verts[(i, 1)], lateral[i] = vertex_b(n), ("B", n)
            else:
                m = q.over_crossing(arc_at[i])
                verts[(i, 1)], lateral[i] = vertex_a(m), ("A", m)
    edges = {}
    for i in range(4):
        edges[frozenset({(i, 0), ((i + 1) % 4, 0)})] = ("R", q.mu[quads[i]])
        edges[frozenset({(i, 0), (i, 1)})] = lateral[i]
    assert len(edges) == 8 and c >= 1
    return verts, edges, arc_at


def build_cubing(q: QuadrantLabeling) -> CubedComplex:
    """Two cubes per crossing, glued along shared prism walls."""
    c = q.c
    cubes, arcs = {}, {}
    for n in range(1, c + 1):
        for side in SIDES:
            verts, edges, arc_at = _cube_labels(q, n, side)
            cubes[(n, side)] = Cube(n, side, verts, edges)
            arcs[n] = arc_at

    gluings = {}

    def glue(k1, f1, k2, f2, cmap):
        inv = {b: a for a, b in cmap.items()}
        gluings[(k1, f1)] = (k2, f2, cmap)
        gluings[(k2, f2)] = (k1, f1, inv)

    for n in range(1, c + 1):
        glue((n, "upper"), "square", (n, "lower"), "square",
             {(i, 0): (i, 0) for i in range(4)})
    # upper side face at quadrant (n, i) meets the lower cube at the
    # crossing where the over-arc of that quadrant passes under
    for n in range(1, c + 1):
        quads = q.quadrants_at(n)
        for i in range(4):
            g = quads[i]
            o, u = (i, (i + 1) % 4) if i % 2 else ((i + 1) % 4, i)
            arc = arcs[n][o]
            m = q.under_crossing(arc)
            targets = [j for j in range(4)
                       if j % 2 == 0 and arcs[m][j] == arc]
            hits = []
            for uj in targets:
                for fj in ((uj - 1) % 4, uj):
                    if q.mu[q.quadrants_at(m)[fj]] == q.mu[g]:
                        hits.append((uj, fj))
            if len(hits) != 1:
                raise ValueError(f"ambiguous side gluing at crossing {n}, quadrant {g}")
            uj, fj = hits[0]
            oj = (fj + 1) % 4 if fj == uj else fj
            cmap = {(o, 0): (oj, 0), (u, 0): (uj, 0), (o, 1): (oj, 1), (u, 1): (uj, 1)}
            glue((n, "upper"), f"side{i}", (m, "lower"), f"side{fj}", cmap)

    # global identifications
    vert_uf, end_uf, face_uf = _UnionFind(), _UnionFind(), _UnionFind()
    for key in cubes:
        for corner in CORNERS:
            vert_uf.find((key, corner))
        for a, b in CUBE_EDGES:
            end_uf.find((key, a, b))
            end_uf.find((key, b, a))
        for f, fc in CUBE_FACES.items():
            for corner in fc:
                face_uf.find((key, f, corner))
    for (k1, f1), (k2, f2, cmap) in gluings.items():
        fc = CUBE_FACES[f1]
        for a in fc:
            vert_uf.union((k1, a), (k2, cmap[a]))
            face_uf.union((k1, f1, a), (k2, f2, cmap[a]))
        for a, b in zip(fc, fc[1:] + fc[:1]):
            end_uf.union((k1, a, b), (k2, cmap[a], cmap[b]))
            end_uf.union((k1, b, a), (k2, cmap[b], cmap[a]))

    for cls in vert_uf.classes().values():
        labels = {cubes[k].vertices[corner] for k, corner in cls}
        if len(labels) != 1:
            raise ValueError(f"inconsistent vertex identification: {labels}")

    # global edge = class of an edge end; label boundary edges by class
    edge_label, edge_verts, bd_index = {}, {}, {}
    for key, cube in cubes.items():
        for a, b in CUBE_EDGES:
            r = end_uf.find((key, a, b))
            lab = cube.edges.get(frozenset({a, b}))
            if lab is None:
                rr = min(r, end_uf.find((key, b, a)))
                lab = bd_index.setdefault(rr, ("bd", len(bd_index)))
            if r in edge_label and edge_label[r] != lab:
                raise ValueError(f"edge {lab} glued to {edge_label[r]}")
            edge_label[r] = lab
            edge_label[end_uf.find((key, b, a))] = lab
            edge_verts.setdefault(lab, set()).add(
                frozenset({cube.vertices[a], cube.vertices[b]}))
    edges = {}
    for lab, ends in edge_verts.items():
        if len(ends) != 1:
            raise ValueError(f"edge {lab} has inconsistent endpoints {ends}")
        (pair,) = ends
        pair = tuple(sorted(pair)) if len(pair) == 2 else (next(iter(pair)),) * 2
        edges[lab] = pair

    corner_edges = {}
    for key, cube in cubes.items():
        for corner in CORNERS:
            labs = []
            for a, b in CUBE_EDGES:
                if corner == a:
                    labs.append(edge_label[end_uf.find((key, a, b))])
                elif corner == b:
                    labs.append(edge_label[end_uf.find((key, b, a))])
            corner_edges[(key, corner)] = tuple(labs)

    face_class = {x: face_uf.find(x) for x in face_uf.parent}
    square_uf = _UnionFind()
    for key in cubes:
        for f in CUBE_FACES:
            square_uf.find((key, f))
    for (k1, f1), (k2, f2, _) in gluings.items():
        square_uf.union((k1, f1), (k2, f2))
    squares = tuple(sorted(square_uf.classes()))
    boundary = tuple(sorted(square_uf.find((k, "boundary")) for k in cubes))

    vertices = tuple(sorted({v for cube in cubes.values() for v in cube.vertices.values()}))
    return CubedComplex(
        c=c,
        cubes=dict(sorted(cubes.items())),
        gluings=gluings,
        vertices=vertices,
        edges=dict(sorted(edges.items(), key=lambda kv: repr(kv[0]))),
        squares=squares,
        boundary_squares=boundary,
        corner_vertex_edges=corner_edges,
        _face_class=face_class,
        _edge_end_class={k: edge_label[v] for k, v in
                         ((x, end_uf.find(x)) for x in end_uf.parent)},
    )


@dataclass(frozen=True)
class LinkComplex:
    """Geometric link of a vertex: an all-right spherical 2-complex.

    Vertices are edge labels of the cube complex (the edge directions
    leaving the vertex).  ``edges`` and ``triangles`` keep multiplicity,
    so a non-simplicial link shows up as repeated entries.
    """

    vertex: tuple
    vertices: tuple
    vertex_class: dict
    edges: tuple  # (u, v, face id)
    triangles: tuple  # (u, v, w) per cube corner

    def adjacent(self, u, v) -> bool:
        return any({a, b} == {u, v} for a, b, _ in self.edges)

    def neighbours(self, u) -> set:
        out = set()
        for a, b, _ in self.edges:
            if a == u:
                out.add(b)
            elif b == u:
                out.add(a)
        return out


def _vertex_tag(v, lab, region_color):
    if v in (P_PLUS, P_MINUS):
        if lab[0] in ("A", "B"):
            return "crossing"
        if lab[0] == "R":
            return region_color.get(lab[1], "region")
    return "pole" if lab[0] != "bd" else "boundary"


def vertex_link(cc: CubedComplex, v, region_color: dict | None = None) -> LinkComplex:
    """Link of ``v`` assembled from the cube corners carrying ``v``."""
    if v not in cc.vertices:
        raise UnknownVertex(v)
    region_color = region_color or {}
    triangles, edges = [], []
    seen_faces = set()
    for key, cube in cc.cubes.items():
        for corner in CORNERS:
            if cube.vertices[corner] != v:
                continue
            labs = cc.corner_vertex_edges[(key, corner)]
            triangles.append(tuple(labs))
            for f, fc in CUBE_FACES.items():
                if corner not in fc:
                    continue
                fid = cc._face_class[(key, f, corner)]
                if fid in seen_faces:
                    continue
                seen_faces.add(fid)
                k = fc.index(corner)
                nb = (fc[k - 1], fc[(k + 1) % 4])
                ends = [cc._edge_end_class[(key, corner, x)] for x in nb]
                edges.append((ends[0], ends[1], fid))
    verts = tuple(sorted({x for t in triangles for x in t}))
    tags = {lab: _vertex_tag(v, lab, region_color) for lab in verts}
    return LinkComplex(v, verts, tags, tuple(edges), tuple(triangles))


def is_flag(lk: LinkComplex) -> tuple[bool, dict | None]:
    """Simplicial and flag; on failure return an offending configuration."""
    pairs = {}
    for a, b, fid in lk.edges:
        if a == b:
            return False, {"kind": "loop", "vertices": [a]}
        key = frozenset({a, b})
        if key in pairs:
            return False, {"kind": "doubled_edge", "vertices": sorted([a, b])}
        pairs[key] = fid
    tri_sets = set()
    for t in lk.triangles:
        s = frozenset(t)
        if len(s) != 3:
            return False, {"kind": "degenerate_triangle", "vertices": sorted(t)}
        if s in tri_sets:
            return False, {"kind": "doubled_triangle", "vertices": sorted(s)}
        for a, b in combinations(t, 2):
            if frozenset({a, b}) not in pairs:
                return False, {"kind": "missing_edge", "vertices": sorted([a, b])}
        tri_sets.add(s)
    nbrs = {u: set() for u in lk.vertices}
    for key in pairs:
        a, b = tuple(key)
        nbrs[a].add(b)
        nbrs[b].add(a)
    for a, b in (tuple(k) for k in pairs):
        for w in nbrs[a] & nbrs[b]:
            if frozenset({a, b, w}) not in tri_sets:
                return False, {"kind": "empty_triangle", "vertices": sorted([a, b, w])}
            # the link is 2-dimensional: no 4-cliques allowed
            for x in nbrs[a] & nbrs[b] & nbrs[w]:
                return False, {"kind": "empty_tetrahedron", "vertices": sorted([a, b, w, x])}
    return True, None


@dataclass(frozen=True)
class NpcReport:
    npc: bool
    double_npc: bool
    failures: tuple

    def to_dict(self):
        return {"npc": self.npc, "double_npc": self.double_npc,
                "failures": [dict(f) for f in self.failures]}


def _double_link_flag(lk: LinkComplex) -> bool:
    # doubling a hemisphere across the equator gives 8 octant triangles
    if len(lk.triangles) != 4:
        return False
    poles = [u for u, t in lk.vertex_class.items() if t == "pole"]
    if len(poles) != 1:
        return False
    equator = [u for u in lk.vertices if u != poles[0]]
    mirrored = LinkComplex(
        lk.vertex,
        lk.vertices + (("mirror",) + poles[0],),
        lk.vertex_class,
        lk.edges + tuple((("mirror",) + poles[0], u, ("mirror", u)) for u in equator),
        lk.triangles + tuple(tuple(("mirror",) + poles[0] if x == poles[0] else x for x in t)
                             for t in lk.triangles),
    )
    return is_flag(mirrored)[0]


def check_npc(cc: CubedComplex, region_color: dict | None = None) -> NpcReport:
    """Gromov link condition at every vertex, and for the double."""
    failures = []
    boundary_links_ok = True
    for v in cc.vertices:
        lk = vertex_link(cc, v, region_color)
        ok, cert = is_flag(lk)
        if not ok:
            failures.append({"vertex": "".join(map(str, v)), **cert})
        if v not in (P_PLUS, P_MINUS):
            if len(lk.triangles) != 4 or not _double_link_flag(lk):
                boundary_links_ok = False
    npc = not failures
    return NpcReport(npc=npc, double_npc=npc and boundary_links_ok,
                     failures=tuple(failures))


@dataclass(frozen=True)
class DehnComplex:
    vertices: tuple
    edges: tuple  # region labels
    squares: dict  # crossing -> boundary word [(region, +1/-1), ...]

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.squares)


def dehn_complex(cc: CubedComplex) -> DehnComplex:
    squares = {}
    for (n, side), cube in cc.cubes.items():
        if side != "upper":
            continue
        word = []
        for i in range(4):
            lab = cube.edges[frozenset({(i, 0), ((i + 1) % 4, 0)})]
            # region edges run from P- to P+
            word.append((lab[1], 1 if cube.vertices[(i, 0)] == P_MINUS else -1))
        squares[n] = tuple(word)
    regions = sorted({lab[1] for lab in cc.edges if lab[0] == "R"})
    return DehnComplex((P_PLUS, P_MINUS), tuple(("R", m) for m in regions), squares)


@dataclass(frozen=True)
class EdgePath:
    """Piecewise geodesic made of cube-complex edges through P+ / P-.

    A single ``("C", n)`` segment stands for the crossing arc, which runs
    straight through the two cubes of crossing ``n``.
    """

    family: str
    index: int
    segments: tuple
    interior: tuple
    orthogonal_at_boundary: bool = True

    @property
    def name(self) -> str:
        return f"{self.family}_{self.index}"


def family_paths(q: QuadrantLabeling) -> list[EdgePath]:
    """alpha_n, beta_n, gamma_n, delta_m for the labeled diagram."""
    c = q.c
    near = {q.mu[g] for g in q.preimage(q.nu, [1, c])}
    paths = [EdgePath("alpha", n, (("A", 1), ("A", n)), (P_PLUS,))
             for n in range(2, c + 1)]
    paths += [EdgePath("beta", n, (("B", c), ("B", n)), (P_MINUS,))
              for n in range(1, c)]
    paths += [EdgePath("gamma", n, (("C", n),), ()) for n in range(1, c + 1)]
    paths += [EdgePath("delta", m, (("A", 1), ("R", m), ("B", c)), (P_PLUS, P_MINUS))
              for m in range(c + 2) if m not in near]
    return paths


def is_local_geodesic(cc: CubedComplex, p: EdgePath,
                      links: dict | None = None) -> tuple[bool, dict | None]:
    """Tangent directions at each interior vertex must be non-adjacent.

    In an all-right flag link, non-adjacent vertices are at distance at
    least pi, which is the local geodesic criterion.
    """
    if len(p.segments) != len(p.interior) + 1:
        raise MalformedPath(f"{p.name}: {len(p.segments)} segments, {len(p.interior)} vertices")
    if not p.interior:
        if p.segments[0][0] != "C":
            raise MalformedPath(f"{p.name}: single segment must be a crossing arc")
        return True, None
    links = links if links is not None else {}
    for k, v in enumerate(p.interior):
        if v not in (P_PLUS, P_MINUS):
            raise MalformedPath(f"{p.name}: interior vertex {v} is not P+ or P-")
        inc, out = p.segments[k], p.segments[k + 1]
        for lab in (inc, out):
            if lab not in cc.edges or v not in cc.edges[lab]:
                raise MalformedPath(f"{p.name}: edge {lab} does not meet {v[0]}")
        if v not in links:
            links[v] = vertex_link(cc, v)
        lk = links[v]
        if inc == out or lk.adjacent(inc, out):
            return False, {"vertex": v[0], "incoming": list(inc), "outgoing": list(out)}
    return True, None


def essential_edges_report(cc: CubedComplex, q: QuadrantLabeling,
                           extra_paths: list[EdgePath] | None = None) -> dict:
    """Certify every ideal-edge path as a local geodesic orthogonal to the boundary.

    ``extra_paths`` are checked alongside the standard families (a test hook).
    """
    links = {}
    families = {"alpha": [], "beta": [], "gamma": [], "delta": []}
    essential = True
    for path in family_paths(q) + list(extra_paths or []):
        ok, cert = is_local_geodesic(cc, path, links)
        ok = ok and path.orthogonal_at_boundary
        essential &= ok
        entry = {"index": path.index, "local_geodesic": ok}
        if cert:
            entry["certificate"] = cert
        families.setdefault(path.family, []).append(entry)
    return {"essential": essential, "families": families}

"""Octahedral decomposition and the collapsed ideal triangulation.

Tetrahedron ``S_g`` has ideal vertices ``T`` (over-strand end of the
crossing arc), ``U`` (under-strand end), ``P+`` and ``P-``.  A face is
named by the vertex it omits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cubing import EdgePath, family_paths, _UnionFind
from .diagram import QuadrantLabeling

__all__ = [
    "TooFewCrossings",
    "OpenFace",
    "Tetrahedron",
    "OctahedralDecomposition",
    "IdealTriangulation",
    "build_octahedral",
    "collapse",
    "edge_families",
    "triangulation_census",
]

T, U, PP, PM = "T", "U", "P+", "P-"
VERTS = (T, U, PP, PM)


class TooFewCrossings(ValueError):
    pass


class OpenFace(RuntimeError):
    pass


@dataclass(frozen=True)
class Tetrahedron:
    g: int
    crossing: int
    region: int
    edges: dict  # frozenset of two vertices -> edge label

    def edge(self, a: str, b: str):
        return self.edges[frozenset((a, b))]


@dataclass(frozen=True)
class OctahedralDecomposition:
    c: int
    tetrahedra: dict  # g -> Tetrahedron
    octahedra: dict  # n -> tuple of g, counterclockwise
    cycles: dict  # n -> Z_n as a tuple of region labels
    gluings: dict  # (g, omitted vertex) -> (g', omitted vertex', vertex map)


def _tet_edges(q: QuadrantLabeling, g: int) -> dict:
    n, a, b = q.nu[g], q.alpha[g], q.beta[g]
    return {
        frozenset((T, U)): ("C", n),
        frozenset((T, PP)): ("A", n),
        frozenset((U, PM)): ("B", n),
        frozenset((U, PP)): ("A", q.over_crossing(b)),
        frozenset((T, PM)): ("B", q.under_crossing(a)),
        frozenset((PM, PP)): ("R", q.mu[g]),
    }


def build_octahedral(q: QuadrantLabeling) -> OctahedralDecomposition:
    """The 4c tetrahedra S_g and their face pairings."""
    c = q.c
    tets = {g: Tetrahedron(g, q.nu[g], q.mu[g], _tet_edges(q, g)) for g in q.quadrants}
    octahedra = {n: tuple(q.quadrants_at(n)) for n in range(1, c + 1)}
    cycles = {n: tuple(q.mu[g] for g in octahedra[n]) for n in octahedra}

    gluings = {}

    def only(cands, what):
        cands = list(cands)
        if len(cands) != 1:
            raise ValueError(f"face pairing for {what} is not unique: {cands}")
        return cands[0]

    for g in q.quadrants:
        n, a, b, m = q.nu[g], q.alpha[g], q.beta[g], q.mu[g]
        same = [h for h in q.quadrants if h != g and q.nu[h] == n]
        # across the over arc end / under arc end inside the octahedron
        h = only((h for h in same if q.alpha[h] == a), (g, PP))
        gluings[(g, PP)] = (h, PP, {T: T, U: U, PM: PM})
        h = only((h for h in same if q.beta[h] == b), (g, PM))
        gluings[(g, PM)] = (h, PM, {T: T, U: U, PP: PP})
        # vertical walls over the dual edges: far end of the bounding arcs
        h = only((h for h in q.quadrants if q.beta[h] == a and q.mu[h] == m), (g, U))
        gluings[(g, U)] = (h, T, {T: U, PP: PP, PM: PM})
        h = only((h for h in q.quadrants if q.alpha[h] == b and q.mu[h] == m), (g, T))
        gluings[(g, T)] = (h, U, {U: T, PP: PP, PM: PM})

    for (g, v), (h, w, vmap) in gluings.items():
        back = gluings[(h, w)]
        if back[0] != g or back[1] != v:
            raise ValueError(f"face pairing is not an involution at {(g, v)}")
        face = [x for x in VERTS if x != v]
        for i in range(3):
            for j in range(i + 1, 3):
                x, y = face[i], face[j]
                if tets[g].edge(x, y) != tets[h].edge(vmap[x], vmap[y]):
                    raise ValueError(f"edge mismatch gluing {(g, v)} to {(h, w)}")
    return OctahedralDecomposition(c, tets, octahedra, cycles, gluings)


@dataclass(frozen=True)
class IdealTriangulation:
    c: int
    gamma: tuple
    collapsed_to_edge: dict  # g -> edge label it becomes
    collapsed_to_triangle: tuple
    collapsed_edges: tuple
    edge_families: tuple  # EdgePath representatives
    gluings: dict  # (g, omitted) -> (g', omitted', vertex map) among survivors
    edge_classes: tuple  # edges of the triangulation, as sorted label tuples

    @property
    def tetrahedra(self) -> int:
        return len(self.gamma)


def _vertex_classes(tet: Tetrahedron, collapsed: set) -> list[set]:
    uf = _UnionFind()
    for v in VERTS:
        uf.find(v)
    for pair, lab in tet.edges.items():
        if lab in collapsed:
            a, b = sorted(pair)
            uf.union(a, b)
    return [set(v) for v in uf.classes().values()]


def collapse(od: OctahedralDecomposition, q: QuadrantLabeling) -> IdealTriangulation:
    """Shrink A(P_0) and B(P_0) to an ideal vertex and contract degenerate cells."""
    c = q.c
    if c < 4:
        raise TooFewCrossings(f"need at least 4 crossings, got {c}")
    collapsed = {("A", 1), ("B", c), ("R", 0), ("R", c + 1)}
    survivors, to_edge, to_tri = [], {}, []
    merge = {}
    for g, tet in od.tetrahedra.items():
        classes = _vertex_classes(tet, collapsed)
        if len(classes) == 4:
            survivors.append(g)
        elif len(classes) == 3:
            to_tri.append(g)
            (big,) = [s for s in classes if len(s) == 2]
            merge[g] = tuple(sorted(big))
        else:
            left = [tet.edge(*sorted((x, y))) for x in VERTS for y in VERTS
                    if x < y and not any({x, y} <= s for s in classes)]
            rest = {lab for lab in left if lab not in collapsed}
            to_edge[g] = sorted(rest)[0] if len(rest) == 1 else tuple(sorted(rest))

    # closed-form set description of the survivors, checked against the geometry
    excluded = (q.preimage(q.alpha, [1, 2 * c - 1]) | q.preimage(q.beta, [1, 2 * c - 1])
                | q.preimage(q.mu, [0, c + 1]))
    gamma = tuple(g for g in q.quadrants if g not in excluded)
    if set(gamma) != set(survivors):
        raise ValueError("surviving tetrahedra disagree with the quadrant set formula")

    gluings = {}
    alive = set(survivors)
    for g in survivors:
        for v in VERTS:
            h, w, vmap = od.gluings[(g, v)]
            vmap = {k: vmap[k] for k in VERTS if k != v}
            steps = 0
            while h not in alive:
                steps += 1
                if h not in merge or w not in merge[h] or steps > 4 * c:
                    raise OpenFace(f"face {v} of S_{g} reaches a degenerate cell at S_{h}")
                x, y = merge[h]
                # the two faces avoiding the shrunk edge become one triangle
                other = y if w == x else x
                swap = {x: y, y: x}
                through = {k: swap.get(k, k) for k in VERTS}
                h2, w2, vmap2 = od.gluings[(h, other)]
                vmap = {k: vmap2[through[val]] for k, val in vmap.items()}
                h, w = h2, w2
            gluings[(g, v)] = (h, w, vmap)

    edge_uf = _UnionFind()
    for g in survivors:
        for pair in od.tetrahedra[g].edges:
            edge_uf.find((g, tuple(sorted(pair))))
    for (g, v), (h, w, vmap) in gluings.items():
        face = [x for x in VERTS if x != v]
        for i in range(3):
            for j in range(i + 1, 3):
                x, y = face[i], face[j]
                edge_uf.union((g, tuple(sorted((x, y)))),
                              (h, tuple(sorted((vmap[x], vmap[y])))))
    classes = []
    for members in edge_uf.classes().values():
        labs = sorted({od.tetrahedra[g].edge(*pair) for g, pair in members})
        classes.append(tuple(labs))
    classes.sort()

    return IdealTriangulation(
        c=c,
        gamma=gamma,
        collapsed_to_edge=dict(sorted(to_edge.items())),
        collapsed_to_triangle=tuple(sorted(to_tri)),
        collapsed_edges=tuple(sorted(collapsed)),
        edge_families=tuple(family_paths(q)),
        gluings=gluings,
        edge_classes=tuple(classes),
    )


def edge_families(it: IdealTriangulation, q: QuadrantLabeling) -> list[EdgePath]:
    return list(it.edge_families)


def triangulation_census(it: IdealTriangulation) -> dict:
    """Counts plus a closure check of the face pairing."""
    for (g, v), (h, w, vmap) in it.gluings.items():
        back = it.gluings.get((h, w))
        if back is None or back[0] != g or back[1] != v:
            raise OpenFace(f"face {v} of S_{g} has no partner")
        if any(back[2][vmap[k]] != k for k in vmap):
            raise OpenFace(f"face {v} of S_{g} is paired inconsistently")
    fams = {}
    for p in it.edge_families:
        fams.setdefault(p.family, []).append(p.index)
    return {
        "tetrahedra": it.tetrahedra,
        "gamma": list(it.gamma),
        "collapsed_edges": [list(map(_jsonable, e)) for e in it.collapsed_to_edge.items()],
        "collapsed_triangles": list(it.collapsed_to_triangle),
        "face_pairs": len(it.gluings) // 2,
        "edges": len(it.edge_classes),
        "edge_families": fams,
    }


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x

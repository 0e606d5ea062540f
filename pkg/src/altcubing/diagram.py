"""Planar-diagram parsing, validation and quadrant labeling.

A crossing is a quadruple ``(i, j, k, l)`` of arc labels read
counterclockwise, starting at the incoming under-strand.  Slots 0 and 2
carry the under-strand (in, out), slots 1 and 3 the over-strand.  A
*corner* ``(x, p)`` is the quadrant at crossing ``x`` between slot ``p``
and slot ``p + 1`` (mod 4).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DiagramError",
    "MalformedInput",
    "NonPlanar",
    "Disconnected",
    "BadBasepoint",
    "Diagram",
    "ValidationReport",
    "QuadrantLabeling",
    "SIGMA_CONVENTIONS",
    "parse_pd",
    "validate",
    "checkerboard",
    "label_quadrants",
    "valid_basepoints",
    "add_kink",
    "braid_closure",
]

BLACK, WHITE = "black", "white"
SIGMA_CONVENTIONS = ("checkerboard", "position")


class DiagramError(ValueError):
    """Base class for diagram construction failures."""


class MalformedInput(DiagramError):
    pass


class NonPlanar(DiagramError):
    pass


class Disconnected(DiagramError):
    pass


class BadBasepoint(DiagramError):
    pass


Corner = tuple[int, int]


@dataclass(frozen=True)
class Diagram:
    """Validated combinatorics of a connected link diagram on S^2.

    Crossings are indexed ``0..c-1`` in input order; arc labels keep the
    values from the PD text.  ``regions[m]`` lists the corners of face
    ``m`` in walk order.
    """

    crossing_count: int
    pd_rows: tuple[tuple[int, int, int, int], ...]
    regions: tuple[tuple[Corner, ...], ...]
    coloring: tuple[str, ...]
    components: int
    # arc -> (crossing, slot) where the arc ends / starts
    arc_head: dict[int, Corner] = field(repr=False, compare=False)
    arc_tail: dict[int, Corner] = field(repr=False, compare=False)
    corner_region: dict[Corner, int] = field(repr=False, compare=False)

    @property
    def arcs(self) -> list[int]:
        return sorted(self.arc_head)

    def occurrences(self, arc: int) -> list[Corner]:
        return [(x, p) for x, row in enumerate(self.pd_rows)
                for p, a in enumerate(row) if a == arc]

    def next_arc(self, arc: int) -> int:
        """The arc that continues ``arc`` through its head crossing."""
        x, p = self.arc_head[arc]
        return self.pd_rows[x][(p + 2) % 4]

    def flanking_regions(self, x: int, p: int) -> tuple[int, int]:
        """Regions on either side of the arc end at slot ``p`` of ``x``."""
        return (self.corner_region[(x, (p - 1) % 4)],
                self.corner_region[(x, p)])

    def is_over(self, x: int, p: int) -> bool:
        return p % 2 == 1

    def to_pd_text(self) -> str:
        return "; ".join("X " + " ".join(map(str, row)) for row in self.pd_rows)


@dataclass(frozen=True)
class ValidationReport:
    alternating: bool
    reduced: bool
    prime: bool
    crossing_count_ok: bool

    @property
    def ok(self) -> bool:
        return all(self.to_dict().values())

    def to_dict(self) -> dict[str, bool]:
        return {
            "alternating": self.alternating,
            "reduced": self.reduced,
            "prime": self.prime,
            "crossing_count_ok": self.crossing_count_ok,
        }


@dataclass(frozen=True)
class QuadrantLabeling:
    """Quadrant functions nu, mu, alpha, beta, sigma on ``1..4c``.

    Crossings are renumbered ``1..c``, regions ``0..c+1`` and arc
    midpoints ``0..2c-1`` so that the basepoint normalization holds:
    quadrants 1, 2 sit at crossing 1 and 4c-1, 4c at crossing c, all four
    flanking arc 0, in regions 0 and c+1.
    """

    c: int
    nu: dict[int, int]
    mu: dict[int, int]
    alpha: dict[int, int]
    beta: dict[int, int]
    sigma: dict[int, int]
    basepoint: int  # original PD label of the arc renamed P_0
    convention: str
    crossing_of: dict[int, int]  # new crossing index -> diagram crossing
    arc_of: dict[int, int]  # midpoint index -> PD arc label
    region_of: dict[int, int]  # new region index -> diagram region
    corner_of: dict[int, Corner]  # quadrant -> diagram corner
    region_color: dict[int, str]  # new region index -> colour

    @property
    def quadrants(self) -> range:
        return range(1, 4 * self.c + 1)

    def preimage(self, fn: dict[int, int], values) -> set[int]:
        values = set(values)
        return {g for g, v in fn.items() if v in values}

    def quadrants_at(self, n: int) -> list[int]:
        """Quadrants of crossing ``n`` in counterclockwise order."""
        x = self.crossing_of[n]
        by_slot = {self.corner_of[g][1]: g for g in self.preimage(self.nu, [n])}
        assert self.corner_of[by_slot[0]][0] == x
        return [by_slot[p] for p in range(4)]

    def over_crossing(self, l: int) -> int:
        """Crossing at which midpoint arc ``l`` passes over."""
        return self.nu[min(self.preimage(self.alpha, [l]))]

    def under_crossing(self, l: int) -> int:
        """Crossing at which midpoint arc ``l`` passes under."""
        return self.nu[min(self.preimage(self.beta, [l]))]




def _tokenize(text: str) -> list[tuple[int, ...]]:
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines()).strip()
    if not body:
        raise MalformedInput("empty PD text")
    if "X" in body.upper():
        chunks = [ch for ch in re.split(r"[Xx]", body) if ch.strip(" \t\r\n;,[]()")]
        if re.sub(r"[Xx0-9,;\s\[\]()]", "", body):
            raise MalformedInput("unexpected characters in PD text")
        rows = []
        for ch in chunks:
            nums = re.findall(r"-?\d+", ch)
            rows.append(tuple(int(v) for v in nums))
    else:
        if re.sub(r"[0-9,;\s\[\]()\n-]", "", body):
            raise MalformedInput("unexpected characters in PD text")
        nums = [int(v) for v in re.findall(r"-?\d+", body)]
        if len(nums) % 4:
            raise MalformedInput("number of labels is not a multiple of 4")
        rows = [tuple(nums[i:i + 4]) for i in range(0, len(nums), 4)]
    for row in rows:
        if len(row) != 4:
            raise MalformedInput(f"crossing {row} does not have 4 labels")
    return rows


def _orient(rows, occ) -> tuple[dict[int, Corner], dict[int, Corner]]:
    """Orient every arc; under slots fix directions, the rest propagates."""
    head: dict[int, Corner] = {}
    tail: dict[int, Corner] = {}
    queue = deque()

    def assign(arc, h, t):
        if arc in head:
            if head[arc] != h:
                raise MalformedInput(f"inconsistent orientation on arc {arc}")
            return
        head[arc], tail[arc] = h, t
        queue.append(arc)

    def other(arc, corner):
        a, b = occ[arc]
        return b if a == corner else a

    for x, row in enumerate(rows):
        assign(row[0], (x, 0), other(row[0], (x, 0)))
        assign(row[2], other(row[2], (x, 2)), (x, 2))
    while True:
        while queue:
            arc = queue.popleft()
            for x, p in (head[arc], tail[arc]):
                q = (p + 2) % 4
                nxt = rows[x][q]
                if (x, p) == head[arc]:
                    # leaving through the opposite slot
                    assign(nxt, other(nxt, (x, q)), (x, q))
                else:
                    assign(nxt, (x, q), other(nxt, (x, q)))
        missing = [a for a in occ if a not in head]
        if not missing:
            break
        a = min(missing)
        (x0, p0), (x1, p1) = occ[a]
        assign(a, (x1, p1), (x0, p0))
    return head, tail


def _faces(rows, occ) -> list[tuple[Corner, ...]]:
    seen: set[Corner] = set()
    faces = []
    for x in range(len(rows)):
        for p in range(4):
            if (x, p) in seen:
                continue
            face = []
            cx, cp = x, p
            while (cx, cp) not in seen:
                seen.add((cx, cp))
                face.append((cx, cp))
                # leave along slot cp+1, arrive at the far end of that arc
                q = (cp + 1) % 4
                arc = rows[cx][q]
                a, b = occ[arc]
                cx, cp = b if a == (cx, q) else a
            faces.append(tuple(face))
    return faces


def _connected(rows, occ) -> bool:
    c = len(rows)
    adj = [set() for _ in range(c)]
    for (x0, _), (x1, _) in occ.values():
        adj[x0].add(x1)
        adj[x1].add(x0)
    seen = {0}
    stack = [0]
    while stack:
        for y in adj[stack.pop()]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == c


def parse_pd(text: str) -> Diagram:
    """Parse planar-diagram text such as ``"X 1 4 2 5; X 3 6 4 1; ..."``.

    Bare whitespace/comma separated quadruples are accepted too.

    Raises
    ------
    MalformedInput
        Labels outside ``1..2c`` or not occurring exactly twice.
    Disconnected
        The 4-valent graph is not connected.
    NonPlanar
        The corner walk does not yield ``c + 2`` faces.
    """
    rows = _tokenize(text)
    c = len(rows)
    occ: dict[int, list[Corner]] = {}
    for x, row in enumerate(rows):
        for p, a in enumerate(row):
            if not 1 <= a <= 2 * c:
                raise MalformedInput(f"arc label {a} outside 1..{2 * c}")
            occ.setdefault(a, []).append((x, p))
    bad = sorted(a for a, v in occ.items() if len(v) != 2)
    if bad or len(occ) != 2 * c:
        raise MalformedInput(f"arc labels must occur exactly twice (offending: {bad})")
    if not _connected(rows, occ):
        raise Disconnected("diagram is not connected")
    faces = _faces(rows, occ)
    if len(faces) != c + 2:
        raise NonPlanar(f"{len(faces)} faces, expected {c + 2}")
    head, tail = _orient(rows, occ)
    corner_region = {corner: m for m, face in enumerate(faces) for corner in face}

    # components: follow arcs through crossings
    todo = set(occ)
    components = 0
    while todo:
        components += 1
        a = min(todo)
        while a in todo:
            todo.discard(a)
            x, p = head[a]
            a = rows[x][(p + 2) % 4]

    d = Diagram(
        crossing_count=c,
        pd_rows=tuple(tuple(r) for r in rows),
        regions=tuple(faces),
        coloring=(),
        components=components,
        arc_head=head,
        arc_tail=tail,
        corner_region=corner_region,
    )
    object.__setattr__(d, "coloring", checkerboard(d))
    return d


def checkerboard(d: Diagram, marker: int | None = None) -> tuple[str, ...]:
    """Proper two-colouring of the regions.

    ``marker`` is the region that receives white; by default the region to
    the left of the head of the smallest arc label.
    """
    n = len(d.regions)
    adj: list[set[int]] = [set() for _ in range(n)]
    for x in range(d.crossing_count):
        for p in range(4):
            r, s = d.flanking_regions(x, p)
            adj[r].add(s)
            adj[s].add(r)
    if marker is None:
        x, p = d.arc_head[min(d.arc_head)]
        marker = d.corner_region[(x, (p - 1) % 4)]
    color: list[str | None] = [None] * n
    color[marker] = WHITE
    queue = deque([marker])
    while queue:
        r = queue.popleft()
        for s in adj[r]:
            want = BLACK if color[r] == WHITE else WHITE
            if color[s] is None:
                color[s] = want
                queue.append(s)
            elif color[s] != want:
                raise NonPlanar("regions are not checkerboard colourable")
    return tuple(color)  # type: ignore[arg-type]


def _alternating(d: Diagram) -> bool:
    for arc in d.arc_head:
        (x0, p0), (x1, p1) = d.occurrences(arc)
        if (p0 + p1) % 2 == 0:
            return False
    return True


def _reduced(d: Diagram) -> bool:
    cr = d.corner_region
    return not any(cr[(x, p)] == cr[(x, p + 2)]
                   for x in range(d.crossing_count) for p in (0, 1))


def _prime(d: Diagram) -> bool:
    """No pair of arcs whose removal separates crossings."""
    c = d.crossing_count
    edges = [(d.arc_tail[a][0], d.arc_head[a][0]) for a in d.arcs]
    for i in range(len(edges)):
        for j in range(i + 1, len(edges)):
            adj = [[] for _ in range(c)]
            for k, (u, v) in enumerate(edges):
                if k not in (i, j):
                    adj[u].append(v)
                    adj[v].append(u)
            seen = {0}
            stack = [0]
            while stack:
                for y in adj[stack.pop()]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if len(seen) != c:
                return False
    return True


def validate(d: Diagram) -> ValidationReport:
    """Flag check; failures are reported, never raised."""
    return ValidationReport(
        alternating=_alternating(d),
        reduced=_reduced(d),
        prime=_prime(d),
        crossing_count_ok=d.crossing_count >= 4,
    )


def _basepoint_problem(d: Diagram, arc: int) -> str | None:
    if arc not in d.arc_head:
        return f"no arc labelled {arc}"
    xh, ph = d.arc_head[arc]
    xt, pt = d.arc_tail[arc]
    if ph % 2 == 0 or pt % 2 == 1:
        return f"arc {arc} does not run from an under-passage into an over-passage"
    if xh == xt:
        return f"arc {arc} starts and ends at the same crossing"
    r0, r1 = d.flanking_regions(xh, ph)
    if r0 == r1:
        return f"arc {arc} has the same region on both sides"
    nxt = d.next_arc(arc)
    prv = d.pd_rows[xt][0]
    if len({arc, nxt, prv}) != 3:
        return f"arc {arc} lies on a component that is too short"
    return None


def valid_basepoints(d: Diagram) -> list[int]:
    return [a for a in d.arcs if _basepoint_problem(d, a) is None]


def _sigma(d: Diagram, x: int, p: int, convention: str) -> int:
    # Odd corners are swept when the over-strand turns counterclockwise;
    # in an alternating diagram they all share one checkerboard colour.
    if convention == "checkerboard":
        return 1 if p % 2 == 1 else -1
    if convention == "position":
        # +1 on the corner between outgoing over and outgoing under strands
        # (slot 2) and on its opposite, -1 on the other two.
        out_over = 1 if d.arc_tail[d.pd_rows[x][1]] == (x, 1) else 3
        start = 1 if out_over == 1 else 2  # corner between slot 2 and out_over
        return 1 if (p - start) % 2 == 0 else -1
    raise ValueError(f"unknown sigma convention {convention!r}")


def label_quadrants(d: Diagram, basepoint: int | None = None,
                    convention: str = "checkerboard") -> QuadrantLabeling:
    """Compute nu, mu, alpha, beta, sigma normalized at ``basepoint``.

    ``basepoint`` is a PD arc label; the arc becomes P_0.  It must run from
    an under-passage (at the crossing renamed X_c) into an over-passage (at
    the crossing renamed X_1).  The default is the smallest admissible
    label.
    """
    if basepoint is None:
        ok = valid_basepoints(d)
        if not ok:
            raise BadBasepoint("no arc admits the basepoint normalization")
        basepoint = ok[0]
    problem = _basepoint_problem(d, basepoint)
    if problem:
        raise BadBasepoint(problem)
    c = d.crossing_count

    x1, p1 = d.arc_head[basepoint]
    xc, _ = d.arc_tail[basepoint]
    others = [x for x in range(c) if x not in (x1, xc)]
    crossing_of = {1: x1, c: xc}
    crossing_of.update({i + 2: x for i, x in enumerate(others)})
    new_crossing = {x: n for n, x in crossing_of.items()}

    # arc midpoints: P_0, its successors, other components, predecessor last
    pred = d.pd_rows[xc][0]
    order = []
    a = basepoint
    while a != pred:
        order.append(a)
        a = d.next_arc(a)
    seen = set(order) | {pred}
    for start in d.arcs:
        a = start
        while a not in seen:
            seen.add(a)
            order.append(a)
            a = d.next_arc(a)
    order.append(pred)
    arc_of = dict(enumerate(order))
    new_arc = {a: l for l, a in arc_of.items()}

    r0 = d.corner_region[(x1, (p1 - 1) % 4)]
    r1 = d.corner_region[(x1, p1)]
    rest = [m for m in range(c + 2) if m not in (r0, r1)]
    region_of = {0: r0, c + 1: r1}
    region_of.update({i + 1: m for i, m in enumerate(rest)})
    new_region = {m: k for k, m in region_of.items()}

    corner_of: dict[int, Corner] = {1: (x1, (p1 - 1) % 4), 2: (x1, p1)}
    # P_0 is the outgoing under-strand at X_c: corners (xc, 1) and (xc, 2)
    if d.corner_region[(xc, 1)] == r0:
        corner_of[4 * c - 1], corner_of[4 * c] = (xc, 1), (xc, 2)
    else:
        corner_of[4 * c - 1], corner_of[4 * c] = (xc, 2), (xc, 1)
    if d.corner_region[corner_of[4 * c]] != r1:
        raise BadBasepoint(f"regions flanking arc {basepoint} do not match at both ends")
    used = set(corner_of.values())
    g = 3
    for n in range(1, c + 1):
        x = crossing_of[n]
        for p in range(4):
            if (x, p) not in used:
                corner_of[g] = (x, p)
                g += 1

    nu, mu, alpha, beta, sigma = {}, {}, {}, {}, {}
    for g, (x, p) in corner_of.items():
        row = d.pd_rows[x]
        a, b = row[p], row[(p + 1) % 4]
        over, under = (a, b) if p % 2 == 1 else (b, a)
        nu[g] = new_crossing[x]
        mu[g] = new_region[d.corner_region[(x, p)]]
        alpha[g] = new_arc[over]
        beta[g] = new_arc[under]
        sigma[g] = _sigma(d, x, p, convention)
    q = QuadrantLabeling(
        c=c, nu=nu, mu=mu, alpha=alpha, beta=beta, sigma=sigma,
        basepoint=basepoint, convention=convention,
        crossing_of=crossing_of, arc_of=arc_of, region_of=region_of,
        corner_of=dict(sorted(corner_of.items())),
        region_color={k: d.coloring[m] for k, m in region_of.items()},
    )
    _check_normalization(q)
    return q


def _check_normalization(q: QuadrantLabeling) -> None:
    c = q.c
    nu, mu, al, be = q.nu, q.mu, q.alpha, q.beta
    conditions = [
        nu[1] == nu[2] == 1,
        all(nu[g] == 1 for g in q.preimage(al, [1])),
        nu[4 * c] == nu[4 * c - 1] == c,
        all(nu[g] == c for g in q.preimage(be, [2 * c - 1])),
        mu[1] == mu[4 * c - 1] == 0,
        mu[2] == mu[4 * c] == c + 1,
        al[1] == al[2] == be[4 * c - 1] == be[4 * c] == 0,
    ]
    if not all(conditions):
        raise BadBasepoint(f"normalization fails for basepoint {q.basepoint}")


def add_kink(d: Diagram, arc: int | None = None) -> str:
    """PD text of ``d`` with a nugatory kink inserted on ``arc``.

    The kink is twisted so that an alternating diagram stays alternating;
    the result has ``c + 1`` crossings and is never reduced.
    """
    if arc is None:
        arc = min(d.arcs)
    c = d.crossing_count
    v, w = 2 * c + 1, 2 * c + 2  # loop, and the piece running on to the head
    rows = [list(r) for r in d.pd_rows]
    hx, hp = d.arc_head[arc]
    rows[hx][hp] = w
    if d.arc_tail[arc][1] % 2 == 0:
        # left an under-passage: pass over first (arc -> v), then under (v -> w)
        kink = [v, arc, w, v]
    else:
        # left an over-passage: pass under first (arc -> v), then over (v -> w)
        kink = [arc, v, v, w]
    text = "; ".join("X " + " ".join(map(str, r)) for r in rows + [kink])
    return _relabel_consecutive(text)


def _relabel_consecutive(text: str) -> str:
    rows = _tokenize(text)
    labels = sorted({a for r in rows for a in r})
    mapping = {a: i + 1 for i, a in enumerate(labels)}
    return "; ".join("X " + " ".join(str(mapping[a]) for a in r) for r in rows)


def random_relabel(text: str, rng: np.random.Generator) -> str:
    """Permute crossing order and arc labels; the diagram is unchanged."""
    rows = _tokenize(text)
    labels = sorted({a for r in rows for a in r})
    perm = rng.permutation(len(labels))
    mapping = {a: int(perm[i]) + 1 for i, a in enumerate(labels)}
    order = rng.permutation(len(rows))
    return "; ".join("X " + " ".join(str(mapping[a]) for a in rows[i]) for i in order)


def braid_closure(word, strands: int | None = None) -> str:
    """PD text of the closure of a braid word.

    ``word`` lists signed generators: ``i`` for sigma_i and ``-i`` for its
    inverse, strands numbered from 1 and running upward.  The closure is
    alternating when the sign of sigma_i is ``(-1)**(i + 1)`` throughout.
    """
    word = [int(s) for s in word]
    if not word or 0 in word:
        raise MalformedInput("braid word must be non-empty with non-zero letters")
    n = strands or max(abs(s) for s in word) + 1
    if max(abs(s) for s in word) >= n:
        raise MalformedInput("generator index exceeds strand count")
    bottom = list(range(n))
    cur = list(bottom)
    nxt = n
    rows = []
    for s in word:
        i = abs(s) - 1
        bl, br = cur[i], cur[i + 1]
        tl, tr = nxt, nxt + 1
        nxt += 2
        if s > 0:
            # BL -> TR passes over
            rows.append([br, tr, tl, bl])
        else:
            rows.append([bl, br, tr, tl])
        cur[i], cur[i + 1] = tl, tr
    # close up: the top end of each strand is the bottom end of the same position
    ident = {top: bot for top, bot in zip(cur, bottom)}
    text = "; ".join("X " + " ".join(str(ident.get(a, a) + 1) for a in r) for r in rows)
    return _relabel_consecutive(text)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from altcubing.catalog import entry
from altcubing.diagram import (BadBasepoint, Disconnected, MalformedInput, NonPlanar,
                               add_kink, braid_closure, checkerboard, label_quadrants,
                               parse_pd, random_relabel, valid_basepoints, validate)

from conftest import CATALOG, TREFOIL

FIG8 = "X 4 2 5 1; X 8 6 1 5; X 6 3 7 4; X 2 7 3 8"


def flip_crossing(d, x):
    """PD text with crossing ``x`` switched, orientation kept consistent."""
    rows = [list(r) for r in d.pd_rows]
    a, b, c, e = rows[x]
    # the old over-strand becomes the under-strand; start at its incoming end
    rows[x] = [e, a, b, c] if d.arc_head[e] == (x, 3) else [b, c, e, a]
    return "; ".join("X " + " ".join(map(str, r)) for r in rows)


def region_sizes(d):
    return sorted(len(r) for r in d.regions)


# --- parsing -----------------------------------------------------------------

def test_figure_eight_parse():
    d = parse_pd(FIG8)
    assert d.crossing_count == 4
    assert d.components == 1
    assert len(d.regions) == 6
    assert region_sizes(d) == [2, 2, 3, 3, 3, 3]
    assert sorted(d.coloring) == ["black"] * 3 + ["white"] * 3


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_parses_with_euler_face_count(name):
    d = parse_pd(entry(name).pd_text)
    c = d.crossing_count
    assert len(d.regions) == c + 2
    assert sum(len(r) for r in d.regions) == 4 * c
    labels = [a for row in d.pd_rows for a in row]
    assert sorted(set(labels)) == list(range(1, 2 * c + 1))
    assert all(labels.count(a) == 2 for a in set(labels))


def test_trefoil_regions_and_colours():
    for text in (TREFOIL, "X 1 4 2 5; X 3 6 4 1; X 5 2 6 3"):
        d = parse_pd(text)
        assert d.crossing_count == 3 and len(d.regions) == 5
        assert sorted(d.coloring.count(col) for col in ("black", "white")) == [2, 3]


def test_component_counts():
    assert parse_pd(entry("L5a1").pd_text).components == 2
    assert parse_pd(entry("L6a4").pd_text).components == 3
    assert parse_pd(entry("6_2").pd_text).components == 1


def test_bare_numbers_and_comments():
    bare = "4 2 5 1\n8 6 1 5\n6 3 7 4\n2 7 3 8"
    commented = "# figure eight\nX 4 2 5 1  # first\nX 8 6 1 5; X 6 3 7 4\nX 2 7 3 8\n"
    ref = parse_pd(FIG8)
    for text in (bare, commented, "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]"):
        d = parse_pd(text)
        assert d.pd_rows == ref.pd_rows


@pytest.mark.parametrize("text, exc", [
    ("", MalformedInput),
    ("hello", MalformedInput),
    ("X 1 2 3", MalformedInput),
    ("X 1 2 3 4; X 1 2 3 9", MalformedInput),
    ("X 1 2 3 4; X 1 2 3 3", MalformedInput),
    ("X 4 2 5 1; X 8 6 1 5; X 6 3 7 4; X 2 7 3 8; "
     "X 12 10 13 9; X 16 14 9 13; X 14 11 15 12; X 10 15 11 16", Disconnected),
    ("X 1 4 2 5; X 5 10 6 11; X 3 9 4 8; X 9 3 10 2; X 11 7 12 6; X 7 1 8 12", NonPlanar),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_pd(text)


def test_inconsistent_orientation_rejected():
    # rotating a row makes the under-strand run against its arcs
    with pytest.raises(MalformedInput):
        parse_pd("X 2 5 1 4; X 8 6 1 5; X 6 3 7 4; X 2 7 3 8")


# --- validation --------------------------------------------------------------

@pytest.mark.parametrize("name", CATALOG)
def test_catalog_validates(name):
    assert validate(parse_pd(entry(name).pd_text)).ok


def test_trefoil_too_small():
    rep = validate(parse_pd(TREFOIL))
    assert rep.to_dict() == {"alternating": True, "reduced": True, "prime": True,
                             "crossing_count_ok": False}


def test_flipped_crossing_not_alternating():
    d = parse_pd(FIG8)
    rep = validate(parse_pd(flip_crossing(d, 0)))
    assert not rep.alternating
    assert rep.reduced and rep.crossing_count_ok


def test_kink_is_not_reduced():
    for name in CATALOG:
        d = parse_pd(entry(name).pd_text)
        for arc in d.arcs[:3]:
            k = parse_pd(add_kink(d, arc))
            rep = validate(k)
            assert k.crossing_count == d.crossing_count + 1
            assert rep.alternating
            assert not rep.reduced


def test_connected_sum_not_prime():
    # square knot: trefoil # mirror trefoil, both factors alternating
    rep = validate(parse_pd(braid_closure([1, 1, 1, -2, -2, -2])))
    assert rep.alternating and rep.reduced
    assert not rep.prime


def test_report_json_fields():
    assert set(validate(parse_pd(FIG8)).to_dict()) == {
        "alternating", "reduced", "prime", "crossing_count_ok"}


# --- colouring ---------------------------------------------------------------

@pytest.mark.parametrize("name", CATALOG)
def test_checkerboard_is_proper(name):
    d = parse_pd(entry(name).pd_text)
    for x in range(d.crossing_count):
        for p in range(4):
            r, s = d.flanking_regions(x, p)
            assert d.coloring[r] != d.coloring[s]


def test_checkerboard_marker():
    d = parse_pd(FIG8)
    for m in range(len(d.regions)):
        col = checkerboard(d, marker=m)
        assert col[m] == "white"
        assert col == d.coloring or all(a != b for a, b in zip(col, d.coloring))


# --- quadrant labeling -------------------------------------------------------

@pytest.mark.parametrize("name", CATALOG)
def test_labeling_cardinalities(name):
    d = parse_pd(entry(name).pd_text)
    for bp in valid_basepoints(d):
        q = label_quadrants(d, bp)
        c = q.c
        assert all(len(q.preimage(q.nu, [n])) == 4 for n in range(1, c + 1))
        assert all(len(q.preimage(q.alpha, [l])) == 2 for l in range(2 * c))
        assert all(len(q.preimage(q.beta, [l])) == 2 for l in range(2 * c))
        sizes = sorted(len(q.preimage(q.mu, [m])) for m in range(c + 2))
        assert sizes == region_sizes(d)
        assert sum(sizes) == 4 * c


@pytest.mark.parametrize("name", CATALOG)
def test_normalization(name):
    d = parse_pd(entry(name).pd_text)
    for bp in valid_basepoints(d):
        q = label_quadrants(d, bp)
        c = q.c
        assert q.nu[1] == q.nu[2] == 1 and q.nu[4 * c] == q.nu[4 * c - 1] == c
        assert q.mu[1] == q.mu[4 * c - 1] == 0 and q.mu[2] == q.mu[4 * c] == c + 1
        assert q.alpha[1] == q.alpha[2] == q.beta[4 * c - 1] == q.beta[4 * c] == 0
        assert {q.nu[g] for g in q.preimage(q.alpha, [1])} == {1}
        assert {q.nu[g] for g in q.preimage(q.beta, [2 * c - 1])} == {c}


def test_alpha_beta_bound_the_quadrant():
    d = parse_pd(FIG8)
    q = label_quadrants(d)
    for g, (x, p) in q.corner_of.items():
        row = d.pd_rows[x]
        pair = {q.arc_of[q.alpha[g]], q.arc_of[q.beta[g]]}
        assert pair == {row[p], row[(p + 1) % 4]}
        # alpha is on the over-strand: odd slot
        over_slot = p if p % 2 else (p + 1) % 4
        assert q.arc_of[q.alpha[g]] == row[over_slot]


def test_sigma_follows_colour():
    for name in CATALOG:
        d = parse_pd(entry(name).pd_text)
        q = label_quadrants(d)
        for n in range(1, q.c + 1):
            assert sum(q.sigma[g] for g in q.quadrants_at(n)) == 0
        for m in range(q.c + 2):
            assert len({q.sigma[g] for g in q.preimage(q.mu, [m])}) == 1


def test_position_convention_differs_by_crossing_sign():
    d = parse_pd(FIG8)
    a = label_quadrants(d, convention="checkerboard")
    b = label_quadrants(d, convention="position")
    for n in range(1, 5):
        ratio = {a.sigma[g] * b.sigma[g] for g in a.quadrants_at(n)}
        assert len(ratio) == 1
    with pytest.raises(ValueError):
        label_quadrants(d, convention="sideways")


def test_figure_eight_basepoints():
    d = parse_pd(FIG8)
    assert valid_basepoints(d) == [1, 3, 5, 7]
    for arc in (2, 4, 6, 8):
        with pytest.raises(BadBasepoint):
            label_quadrants(d, arc)
    with pytest.raises(BadBasepoint):
        label_quadrants(d, 99)


def test_labeling_deterministic():
    d = parse_pd(entry("6_3").pd_text)
    assert label_quadrants(d) == label_quadrants(parse_pd(entry("6_3").pd_text))


# --- braid closures ----------------------------------------------------------

def test_braid_closure_figure_eight():
    d = parse_pd(braid_closure([1, -2, 1, -2]))
    assert d.crossing_count == 4 and d.components == 1
    assert region_sizes(d) == region_sizes(parse_pd(FIG8))
    assert validate(d).ok


@pytest.mark.parametrize("word", [[], [0, 1], [3]])
def test_braid_closure_rejects(word):
    with pytest.raises(MalformedInput):
        braid_closure(word, strands=3)


# --- properties --------------------------------------------------------------

def invariants(d):
    q = label_quadrants(d)
    return (
        d.crossing_count, d.components, tuple(region_sizes(d)),
        tuple(sorted(validate(d).to_dict().items())),
        len(valid_basepoints(d)),
        tuple(sorted(len(q.preimage(q.mu, [m])) for m in range(q.c + 2))),
    )


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(CATALOG), seed=st.integers(0, 2 ** 32 - 1))
def test_relabel_invariance(name, seed):
    text = entry(name).pd_text
    other = random_relabel(text, np.random.default_rng(seed))
    assert invariants(parse_pd(other)) == invariants(parse_pd(text))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_basepoints_share_cardinalities(seed):
    rng = np.random.default_rng(seed)
    name = CATALOG[int(rng.integers(len(CATALOG)))]
    d = parse_pd(entry(name).pd_text)
    bps = valid_basepoints(d)
    a, b = (label_quadrants(d, bp) for bp in rng.choice(bps, 2))

    def card(q):
        return (sorted(len(q.preimage(q.mu, [m])) for m in range(q.c + 2)),
                sorted(q.sigma.values()))
    assert card(a) == card(b)

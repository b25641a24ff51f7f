import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from constellation_kit.affine import (
    AffineConstellation,
    Signature,
    TABLE1_CELLS,
    canonicalize_class,
    complete_foliation_set,
    complete_parallel_class,
    constellation_from_dict,
    constellation_to_dict,
    dominates,
    make_class,
    make_line,
    make_plane,
    materialize,
    signature_of,
    sub_constellation,
    table1_constellation,
    verify_constellation,
    verify_plane_axioms,
)
from constellation_kit.errors import (
    BadIndex,
    MalformedLine,
    NotDisjoint,
    NotEnoughFoliations,
    NotPrimePower,
    OrderMismatch,
)

PLANE_ORDERS = [2, 3, 4, 5, 7, 8, 9]


# -- lines and classes --

def test_line_validation():
    make_line(3, [0, 4, 8])
    with pytest.raises(MalformedLine):
        make_line(3, [0, 4])  # wrong length
    with pytest.raises(MalformedLine):
        make_line(3, [0, 4, 9])  # out of range
    assert make_line(3, [4, 0, 8]).points == (0, 4, 8)  # constructor sorts
    from constellation_kit.affine import Line

    with pytest.raises(MalformedLine):
        Line(3, (4, 0, 8))  # raw type insists on increasing points
    with pytest.raises(MalformedLine):
        make_line(3, [0, 4, 4])


def test_class_foliation_flag():
    rows = [make_line(3, [3 * r, 3 * r + 1, 3 * r + 2]) for r in range(3)]
    assert make_class(3, rows).is_full_foliation
    assert not make_class(3, rows[:2]).is_full_foliation


# -- plane construction --

@pytest.mark.parametrize("q", PLANE_ORDERS)
def test_make_plane_valid(q):
    C = make_plane(q)
    assert verify_constellation(C).valid
    assert verify_plane_axioms(C).valid
    M = materialize(C)
    assert len(M.classes) == q + 1
    assert sum(len(cl.lines) for cl in M.classes) == q * (q + 1)
    assert all(cl.is_full_foliation for cl in M.classes)


def test_order3_twelve_lines():
    M = materialize(make_plane(3))
    assert sum(len(cl.lines) for cl in M.classes) == 12
    assert len(M.classes) == 4


def test_order2_six_lines():
    M = materialize(make_plane(2))
    assert sum(len(cl.lines) for cl in M.classes) == 6
    assert len(M.classes) == 3


def test_no_order6_plane():
    with pytest.raises(NotPrimePower):
        make_plane(6)


# -- verification --

def test_tampered_table1_invalid():
    C = table1_constellation()
    # swap one point of one line of the last class to break condition (b)
    cl = C.classes[-1]
    ln = cl.lines[0]
    pts = list(ln.points)
    swap = next(p for p in range(36) if p not in ln.point_set)
    pts[0] = swap
    bad = make_line(6, sorted(pts))
    tampered = AffineConstellation(
        6,
        C.classes[:-1] + (make_class(6, (bad,) + cl.lines[1:]),),
    )
    rep = verify_constellation(tampered)
    assert not rep.valid
    assert any(v.kind in ("cross-class", "within-class") for v in rep.violations)
    # each violation names the offending line pair
    v = rep.violations[0]
    assert len(v.where) == 4


def test_table1_fails_plane_axioms():
    rep = verify_plane_axioms(table1_constellation())
    assert not rep.valid
    assert any(v.kind == "axiom-i" for v in rep.violations)


# -- completion --

def test_complete_parallel_class_complement():
    lines = [make_line(3, [0, 1, 2]), make_line(3, [3, 4, 5])]
    assert complete_parallel_class(3, lines).points == (6, 7, 8)


def test_complete_parallel_class_not_disjoint():
    with pytest.raises(NotDisjoint):
        complete_parallel_class(3, [make_line(3, [0, 1, 2]), make_line(3, [2, 4, 6])])


def test_table1_third_foliation_completion():
    # the stored 5 lines of the first-digit foliation imply the cells
    # carrying first digit 6
    C = table1_constellation()
    fol = C.classes[2]
    implied = complete_parallel_class(6, fol.lines)
    expected = tuple(
        sorted(
            6 * r + c
            for r in range(6)
            for c in range(6)
            if TABLE1_CELLS[r][c][0] == 6
        )
    )
    assert implied.points == expected


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_footnote4_recovers_dropped_foliation(q):
    M = materialize(make_plane(q))
    for drop in range(len(M.classes)):
        kept = AffineConstellation(
            q, tuple(cl for i, cl in enumerate(M.classes) if i != drop)
        )
        rec = complete_foliation_set(kept)
        assert set(rec.lines) == set(M.classes[drop].lines)


def test_order2_diagonals():
    horiz = make_class(2, [make_line(2, [0, 1]), make_line(2, [2, 3])])
    vert = make_class(2, [make_line(2, [0, 2]), make_line(2, [1, 3])])
    rec = complete_foliation_set(AffineConstellation(2, (horiz, vert)))
    assert set(ln.points for ln in rec.lines) == {(0, 3), (1, 2)}


def test_table1_not_enough_foliations():
    with pytest.raises(NotEnoughFoliations):
        complete_foliation_set(table1_constellation())


def test_automatic_intersection_property():
    """The completed line meets every transversal line exactly once (checked
    on planes up to order 7)."""
    for q in (3, 5, 7):
        M = materialize(make_plane(q))
        cl = M.classes[0]
        implied = complete_parallel_class(q, cl.lines[:-1])
        assert implied == cl.lines[-1]
        for other in M.classes[1:]:
            for ln in other.lines:
                assert len(ln.point_set & implied.point_set) == 1


# -- sub-constellations and signatures --

def test_sub_constellation_221():
    C = materialize(make_plane(3))
    sub = sub_constellation(C, [(0, 1), (0, 1), (0,), ()])
    assert signature_of(sub).sizes == (2, 2, 1)
    assert verify_constellation(sub).valid


def test_sub_constellation_identity_and_errors():
    C = materialize(make_plane(3))
    keep_all = [tuple(range(len(cl.lines))) for cl in C.classes]
    assert sub_constellation(C, keep_all) == C
    with pytest.raises(BadIndex):
        sub_constellation(C, [(), (), (), ()])
    with pytest.raises(BadIndex):
        sub_constellation(C, [(0, 9), (), (), ()])


def test_sub_constellation_preserves_validity():
    import random

    rng = random.Random(42)
    for q in (3, 4, 5, 7, 8):
        C = materialize(make_plane(q))
        for _ in range(5):
            keep = [
                tuple(
                    sorted(
                        rng.sample(
                            range(len(cl.lines)), rng.randint(0, len(cl.lines))
                        )
                    )
                )
                for cl in C.classes
            ]
            if not any(keep):
                continue
            assert verify_constellation(sub_constellation(C, keep)).valid


def test_signature_of_table1():
    sig = signature_of(table1_constellation())
    assert sig == Signature(6, (5, 5, 5, 4))
    assert str(sig) == "<5^3,4>_6"


def test_dominates_examples():
    top = Signature(6, (5, 5, 5, 4))
    assert dominates(top, Signature(6, (5, 4, 3, 2)))
    assert not dominates(Signature(6, (5, 5, 3, 1)), Signature(6, (5, 4, 3, 2)))
    with pytest.raises(OrderMismatch):
        dominates(top, Signature(3, (2, 2)))


@st.composite
def signatures(draw):
    order = draw(st.integers(3, 8))
    n = draw(st.integers(1, order + 1))
    sizes = sorted(
        (draw(st.integers(1, order - 1)) for _ in range(n)), reverse=True
    )
    return Signature(order, tuple(sizes))


@settings(max_examples=50, deadline=None)
@given(signatures(), signatures(), signatures())
def test_dominates_partial_order(a, b, c):
    fix = lambda s: Signature(a.order, s.sizes)  # noqa: E731 — same-order copies
    b, c = fix(b), fix(c)
    assert dominates(a, a)
    if dominates(a, b) and dominates(b, a):
        assert a == b
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


# -- Table 1 construction --

def test_table1_valid_and_caption_conditions():
    C = table1_constellation()
    assert verify_constellation(C).valid
    first = [[TABLE1_CELLS[r][c][0] for c in range(6)] for r in range(6)]
    second = [[TABLE1_CELLS[r][c][1] for c in range(6)] for r in range(6)]
    # first digits are Latin
    for r in range(6):
        assert sorted(first[r]) == [1, 2, 3, 4, 5, 6]
    for c in range(6):
        assert sorted(first[r][c] for r in range(6)) == [1, 2, 3, 4, 5, 6]
    # second digits distinct within each row and column
    for r in range(6):
        present = [s for s in second[r] if s is not None]
        assert len(present) == len(set(present))
    for c in range(6):
        present = [second[r][c] for r in range(6) if second[r][c] is not None]
        assert len(present) == len(set(present))
    # 24 distinct two-digit labels
    pairs = {
        (first[r][c], second[r][c])
        for r in range(6)
        for c in range(6)
        if second[r][c] is not None
    }
    assert len(pairs) == 24


def test_table1_classes_shape():
    C = table1_constellation()
    # rows, columns, first-digit foliation stored with 5 lines; 4 extra lines
    assert [len(cl.lines) for cl in C.classes] == [5, 5, 5, 4]


def test_canonicalize_class():
    rows = make_class(3, [make_line(3, [3 * r, 3 * r + 1, 3 * r + 2]) for r in range(3)])
    canon = canonicalize_class(rows)
    assert len(canon.lines) == 2
    assert materialize(AffineConstellation(3, (canon,))).classes[0] == rows


# -- serialization --

def test_constellation_json_roundtrip():
    for C in (make_plane(3), table1_constellation(), make_plane(4)):
        doc = constellation_to_dict(C)
        assert constellation_from_dict(json.loads(json.dumps(doc))) == C

import pytest

from stickweave.ab import ABInstance, ABTile, compile_wang_to_ab, solve_ab_torus
from stickweave.compiler import (
    COLOR_SEGMENTS, EncodingLayout, build_state_table, decode_assignment_to_ab,
    fill_assignment_from_ab, horizontal_verification, left_value_to_tile, search_rows,
    vertical_verification,
)
from stickweave.errors import DecodeError
from stickweave.schematic import GapAssignment, check_gap_conditions

from conftest import CORPUS

# t=2, k=2 instance with every colour pairing represented
TWO_TWO = ABInstance(2, (ABTile(0, 1, 1, 0), ABTile(1, 0, 0, 1)),
                     (ABTile(1, 1, 0, 0), ABTile(0, 1, 1, 0)))


def test_layout_numbers():
    lay = EncodingLayout(1, 1)
    assert (lay.s, lay.d, lay.v) == (16, 12, 36)
    assert (lay.e1, lay.e15, lay.e2, lay.e3, lay.e4) == (1, 5, 9, 9, 17)
    lay = EncodingLayout(3, 2)
    assert (lay.s, lay.d, lay.v, lay.e3, lay.e4) == (32, 24, 168, 17, 25)
    assert lay.e35 == lay.e3 + 4


def test_encoding_state_sets():
    comp = build_state_table(TWO_TWO)
    lay = comp.layout
    assert lay.d == 24
    b = comp.table.bucket(lay.e2)
    assert sorted(b.L) == [24, 48, 72, 96]
    assert sorted(b.R) == [24, 48, 72, 96]
    k1 = build_state_table(ABInstance(1, (ABTile(0, 0, 0, 0),) * 2, (ABTile(0, 0, 0, 0),) * 2))
    assert sorted(k1.table.bucket(9).L) == [12, 24, 36, 48]


def test_color_segment_tables():
    comp = build_state_table(TWO_TWO)
    k, t = 2, 2
    tab = comp.table
    for m in range(1, 5):
        assert tab.bucket(1 + m).I == (0, 6 * k)
    # A1 has upper-right colour 1, B1 lower-left colour 0
    assert 12 * k * 1 + 2 * k + 1 in tab.bucket(2).R
    assert 12 * k * 3 + 4 * k + 0 in tab.bucket(2).R
    assert len(tab.bucket(2).R) == 2 * t
    assert sorted(tab.bucket(3).L) == [24, 48, 72, 96]


def test_vertical_segment_tables():
    lay = EncodingLayout(3, 1)
    comp = build_state_table(ABInstance(1, (ABTile(0, 0, 0, 0),) * 3, (ABTile(0, 0, 0, 0),) * 3))
    tab, d = comp.table, lay.d
    assert tab.bucket(lay.e2 + 1).I == (-d + 1, 1)
    assert tab.bucket(lay.e2 + 5).I == (-1, d - 1)
    assert tab.bucket(lay.e2 + 2).I == (0, 0)
    assert sorted(tab.bucket(lay.e2 + 2).L) == [12, 24, 36, 49, 61]
    # the last odd state of the run is the encoding state e3
    assert tab.bucket(lay.e3).L == frozenset(d * i for i in range(1, 7))


def test_left_value_to_tile():
    lay = EncodingLayout(2, 1)
    assert left_value_to_tile(lay, 12) == ("A", 1)
    assert left_value_to_tile(lay, 36) == ("B", 1)
    with pytest.raises(DecodeError):
        left_value_to_tile(lay, 13)
    with pytest.raises(DecodeError):
        left_value_to_tile(lay, 60)


@pytest.mark.parametrize("t", [2, 3])
def test_vertical_verification(t):
    lay = EncodingLayout(t, 1)
    A = set(range(1, t + 1))
    Bs = set(range(t + 1, 2 * t + 1))
    down = vertical_verification(lay)
    assert all(down[i] == {i} for i in A)
    assert all(down[i] == Bs for i in Bs)
    up = vertical_verification(lay, lower=False)
    assert all(up[i] == A for i in A)
    assert all(up[i] == {i} for i in Bs)


@pytest.mark.parametrize("segment", sorted(COLOR_SEGMENTS))
def test_horizontal_verification(segment):
    comp = build_state_table(TWO_TWO)
    pinned, corners = COLOR_SEGMENTS[segment]
    d = comp.layout.d

    def allowed(p, q):  # tile p directly left of tile q
        fp, _ = TWO_TWO.combined(p)
        fq, _ = TWO_TWO.combined(q)
        if fp == fq:
            return False
        return fp != pinned or TWO_TWO.corner_color(p, corners[fp]) == TWO_TWO.corner_color(q, corners[fq])

    for (i, j, _, _), ends in horizontal_verification(comp, segment).items():
        feasible = allowed(i, j) and allowed(j, i)
        assert bool(ends) == feasible, (i, j)
        if feasible:
            assert ends == {(d * i, d * j)}


def test_color_loading_value():
    comp = build_state_table(TWO_TWO)
    lay = comp.layout
    assign = GapAssignment(period=(lay.s, 2))
    assign.set(1, 0, lay.encode(1), 1)
    assign.set(1, 1, lay.encode(3), 1)
    for sol in search_rows(assign, comp.table, 1, 5, target_fixed=False):
        assert sol.get(2, 0)[1] == 12 * 2 * 1 + 2 * 2 + TWO_TWO.corner_color(1, "ur")
        assert sol.get(2, 1)[1] == 12 * 2 * 3 + 4 * 2 + TWO_TWO.corner_color(3, "ll")


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_fill_decode_round_trip(name):
    ab = compile_wang_to_ab(CORPUS[name])
    comp = build_state_table(ab)
    for w, h in [(1, 1), (2, 1), (1, 2), (2, 2)]:
        for tiling in solve_ab_torus(ab, w, h, 50)[:2]:
            assign = fill_assignment_from_ab(comp, tiling)
            assert check_gap_conditions(assign, comp.table) == []
            lay = comp.layout
            assert assign.get(lay.e1, 0) == lay.encode(tiling.a_at(0, 0))
            assert decode_assignment_to_ab(comp, assign) == tiling


def test_decode_rejects_two_a_columns():
    ab = compile_wang_to_ab(CORPUS["checkerboard"])
    comp = build_state_table(ab)
    tiling = solve_ab_torus(ab, 2, 1)[0]
    assign = fill_assignment_from_ab(comp, tiling)
    lay = comp.layout
    assign.set(lay.e1, 1, lay.encode(1))
    with pytest.raises(DecodeError, match="alternation"):
        decode_assignment_to_ab(comp, assign)

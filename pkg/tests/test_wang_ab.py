import itertools

import pytest
from hypothesis import given, settings, strategies as st

from stickweave.ab import (
    ABInstance, ABTile, ab_tiling_violations, compile_wang_to_ab, solve_ab_torus,
    verify_wang_ab_bijection,
)
from stickweave.errors import CapExceeded, MalformedInput
from stickweave.wang import (
    TorusTiling, WangInstance, WangTile, solve_wang_torus, tiling_violations,
)

from conftest import BROKEN, CHECKERBOARD, CORPUS, UNIFORM, wang


def brute_force_count(instance, w, h):
    total = 0
    for cells in itertools.product(range(1, instance.n + 1), repeat=w * h):
        if not tiling_violations(instance, TorusTiling(w, h, cells)):
            total += 1
    return total


def test_single_uniform_tile():
    assert len(solve_wang_torus(UNIFORM, 1, 1)) == 1


def test_wrap_edge_mismatch():
    assert solve_wang_torus(BROKEN, 1, 1) == []


def test_checkerboard_two_tilings():
    sols = solve_wang_torus(CHECKERBOARD, 2, 1)
    assert [s.assignment for s in sols] == [(1, 2), (2, 1)]


@pytest.mark.parametrize("name", sorted(CORPUS))
@pytest.mark.parametrize("w,h", [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)])
def test_solver_matches_brute_force(name, w, h):
    inst = CORPUS[name]
    sols = solve_wang_torus(inst, w, h)
    assert len(sols) == brute_force_count(inst, w, h)
    assert all(not tiling_violations(inst, s) for s in sols)
    assert [s.assignment for s in sols] == sorted(s.assignment for s in sols)


def test_shift_invariance():
    sols = solve_wang_torus(CORPUS["three"], 3, 2)
    keys = {s.assignment for s in sols}
    for s in sols:
        for dr in range(2):
            for dc in range(3):
                assert s.shifted(dr, dc).assignment in keys


def test_determinism():
    a = solve_wang_torus(CORPUS["mixed"], 2, 2)
    b = solve_wang_torus(CORPUS["mixed"], 2, 2)
    assert a == b


def test_cap_is_reported():
    with pytest.raises(CapExceeded) as info:
        solve_wang_torus(CHECKERBOARD, 2, 2, limit=3)
    assert len(info.value.partial) == 3


def test_patch_mode_is_looser():
    assert len(solve_wang_torus(BROKEN, 1, 1, periodic=False)) == 1


def test_bad_color_rejected():
    with pytest.raises(MalformedInput):
        WangInstance(1, (WangTile(1, 2, 1, 1),))


def test_json_round_trip():
    inst = CORPUS["mixed"]
    assert WangInstance.from_json(inst.to_json()) == inst


def test_compile_example_tile():
    # Wang tile: left 1, right 2, up 1, down 2 with k = 2
    ab = compile_wang_to_ab(wang(2, (1, 2, 2, 1)))
    assert ab.a(1).as_tuple() == (0, 1, 1, 3)
    assert ab.b(1).as_tuple() == (3, 2, 2, 0)


def test_compile_uniform():
    ab = compile_wang_to_ab(UNIFORM)
    assert ab.a(1).as_tuple() == (0, 1, 1, 2)
    assert ab.b(1).as_tuple() == (2, 1, 1, 0)


def test_compile_color_universe():
    inst = CORPUS["three"]
    ab = compile_wang_to_ab(inst)
    used = {c for tile in ab.a_tiles + ab.b_tiles for c in tile.as_tuple()}
    assert ab.t == inst.n
    assert used <= set(range(inst.n + inst.k + 1))
    assert ab.colors == inst.n + inst.k + 1


def test_ab_single_tile_all_equal():
    ab = ABInstance(1, (ABTile(0, 0, 0, 0),), (ABTile(0, 0, 0, 0),))
    for w, h in [(1, 1), (2, 1), (2, 3)]:
        assert len(solve_ab_torus(ab, w, h)) == 1


def test_ab_broken_has_no_tilings():
    ab = compile_wang_to_ab(BROKEN)
    for w in (1, 2):
        for h in (1, 2):
            assert solve_ab_torus(ab, w, h) == []


def test_ab_checkerboard_count():
    assert len(solve_ab_torus(compile_wang_to_ab(CHECKERBOARD), 2, 1)) == 2


def test_ab_solutions_valid():
    ab = compile_wang_to_ab(CORPUS["three"])
    for sol in solve_ab_torus(ab, 3, 1):
        assert ab_tiling_violations(ab, sol) == []


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_bijection_small(name):
    for w, h in [(1, 1), (2, 1), (2, 2)]:
        report = verify_wang_ab_bijection(CORPUS[name], w, h)
        assert report.ok, report.problems


def test_glue_colors_pair_indices():
    inst = CORPUS["three"]
    ab = compile_wang_to_ab(inst)
    for sol in solve_ab_torus(ab, 3, 2):
        for r in range(sol.h):
            for c in range(sol.w):
                # A(r, c) glues to the B tile diagonally below-right
                assert sol.a_at(r, c) == sol.b_at(r - 1, c)


tiles = st.tuples(*[st.integers(1, 2)] * 4)


@settings(max_examples=40, deadline=None)
@given(st.lists(tiles, min_size=1, max_size=3), st.integers(1, 2), st.integers(1, 2))
def test_bijection_random(raw, w, h):
    inst = WangInstance(2, tuple(WangTile(*t) for t in raw))
    report = verify_wang_ab_bijection(inst, w, h)
    assert report.ok, report.problems

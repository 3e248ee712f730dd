"""The twelve acceptance criteria, one test each.

Every test records a PASS/FAIL line through ``record``; the lines are
printed together in the terminal summary.
"""
import random
import time

import pytest

from conftest import ACCEPTANCE, CORPUS
from stickweave.ab import ABInstance, ABTile, compile_wang_to_ab, require_bijection, solve_ab_torus
from stickweave.compiler import (COLOR_SEGMENTS, EncodingLayout, build_state_table,
                                 decode_assignment_to_ab, fill_assignment_from_ab,
                                 horizontal_verification, vertical_verification)
from stickweave.forcing import all_cases
from stickweave.geometry import (ALLOWED_ANGLES, compatibility, encode_indexed, encode_spots,
                                 instantiate_patch, interior_cells, local_patch,
                                 staple_orientations, staple_surround_check, verify_planar)
from stickweave.schematic import (BucketSpec, StateTable, assignment_key, below_left, below_right,
                                  check_gap_conditions, enumerate_windows, gap_valid_assignments,
                                  random_window)
from stickweave.stick import (base_rules, check_patch, labels, orientation_census,
                              synthesize_weave, toy_schematic, weave_rules)

FULL33 = StateTable.uniform(3, 3, (-2, 2))
B = BucketSpec


def record(k: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_c01_wang_ab_bijection():
    t0 = time.time()
    corpus = {k: v for k, v in CORPUS.items() if v.n <= 3 and v.k <= 3}
    assert len(corpus) >= 5
    problems, checked, tilings = [], 0, 0
    for name, inst in corpus.items():
        for w in (1, 2, 3):
            for h in (1, 2, 3):
                rep = require_bijection(inst, w, h)
                problems += rep.problems
                checked += 1
                tilings += rep.wang_count
    dt = time.time() - t0
    record(1, not problems and dt < 300,
           f"{len(corpus)} instances x 9 tori, {tilings} tilings matched, {dt:.1f}s")


SMALL_TABLES = {
    "s1v2": StateTable.uniform(1, 2),
    "s2v2-zero": StateTable.uniform(2, 2, (0, 0)),
    "s4v2-mixed": StateTable(4, 2, (B({1}, {1, 2}, (0, 1)), B({2}, {1, 2}, (-1, 0)),
                                    B({1, 2}, {2}, (-1, 1)), B({1, 2}, {1}, (0, 0)))),
    "s2v3-sparse": StateTable(2, 3, (B({1, 3}, {2, 3}, (-2, 1)), B({2}, {1, 2, 3}, (-1, 2)))),
}


def test_c02_schematic_equivalence():
    sizes = {}
    ok = True
    for name, table in [("s3v3-full", FULL33)] + sorted(SMALL_TABLES.items()):
        geo = {assignment_key(w.assignment()) for w in enumerate_windows(table, 2, 1)}
        gap = {assignment_key(a) for a in gap_valid_assignments(table, 2, 1)}
        ok &= geo == gap
        sizes[name] = len(geo)
    record(2, ok and sizes["s3v3-full"] > 0, f"window sets equal for {sizes}")


def _cycle_violations(assign, table):
    """Independent restatement of the three row-to-row conditions."""
    bad = 0
    for r, c, state, x, y in assign.cells():
        child_state = assign.state(r + 1)
        if child_state is not None and child_state != table.sigma(state):
            bad += 1
        bl, br = assign.get(*below_left(r, c)), assign.get(*below_right(r, c))
        if bl is None or br is None:
            continue
        x2, y2 = bl[1], br[0]
        lo, hi = table.bucket(child_state).I
        if x + y != x2 + y2 or not lo <= x2 - x <= hi:
            bad += 1
    return bad


def test_c03_random_windows():
    rng = random.Random(2024)
    bad = checked = 0
    for k in range(1000):
        rows, cols = (2, 1) if k % 3 == 0 else (3, 2) if k % 3 == 1 else (4, 1)
        a = random_window(FULL33, rows, cols, rng).assignment()
        bad += _cycle_violations(a, FULL33) + len(check_gap_conditions(a, FULL33))
        checked += sum(1 for _ in a.cells())
    record(3, bad == 0, f"1000 windows, {checked} gaps, {bad} violations")


def test_c04_vertical_verification():
    ok = True
    for t in (2, 3):
        lay = EncodingLayout(t, 1)
        d = lay.d
        A, Bs = range(1, t + 1), range(t + 1, 2 * t + 1)
        down = vertical_verification(lay)
        ok &= all({d * e for e in down[i]} == {d * i} for i in A)
        ok &= all({d * e for e in down[i]} == {d * j for j in Bs} for i in Bs)
    record(4, ok, "t=2,3, k=1: A-starts end at d*v_j, B-starts reach exactly d(t+1)..2dt")


def test_c05_horizontal_verification():
    ab = ABInstance(2, (ABTile(0, 1, 1, 0), ABTile(1, 0, 0, 1)),
                    (ABTile(1, 1, 0, 0), ABTile(0, 1, 1, 0)))
    comp = build_state_table(ab)
    d = comp.layout.d
    checked, bad = 0, 0
    for segment, (pinned, corners) in COLOR_SEGMENTS.items():
        def allowed(p, q):
            fp, _ = ab.combined(p)
            fq, _ = ab.combined(q)
            if fp == fq:
                return False
            return fp != pinned or ab.corner_color(p, corners[fp]) == ab.corner_color(q, corners[fq])
        for (i, j, _, _), ends in horizontal_verification(comp, segment).items():
            feasible = allowed(i, j) and allowed(j, i)
            checked += 1
            if bool(ends) != feasible or (feasible and ends != {(d * i, d * j)}):
                bad += 1
    record(5, bad == 0, f"t=2, k=2: {checked} start pairs over 4 colour segments, {bad} mismatches")


def test_c06_round_trip():
    t0 = time.time()
    done = bad = 0
    for name, inst in CORPUS.items():
        ab = compile_wang_to_ab(inst)
        comp = build_state_table(ab)
        for w, h in [(1, 1), (2, 1), (1, 2), (2, 2)]:
            for tiling in solve_ab_torus(ab, w, h):
                assign = fill_assignment_from_ab(comp, tiling)
                if check_gap_conditions(assign, comp.table) or decode_assignment_to_ab(comp, assign) != tiling:
                    bad += 1
                done += 1
    dt = time.time() - t0
    record(6, bad == 0 and done > 0 and dt < 600, f"{done} tilings round-tripped, {bad} failures, {dt:.1f}s")


@pytest.fixture(scope="module")
def weave_windows():
    rng = random.Random(99)
    shapes = [(2, 1)] * 6 + [(3, 1)] * 2 + [(3, 2)] * 2 + [(2, 2)] * 2
    return [random_window(FULL33, r, c, rng) for r, c in shapes]


def test_c07_weave_self_consistency(weave_windows):
    rules = weave_rules(FULL33)
    viols = sticks = 0
    for w in weave_windows:
        patch = synthesize_weave(w.schematic, FULL33)
        sticks += len(patch)
        viols += len(check_patch(patch, rules))
    record(7, viols == 0 and len(weave_windows) >= 10,
           f"{len(weave_windows)} windows, {sticks} sticks, {len(rules)} forbidden pairs, {viols} violations")


def test_c08_forcing():
    worst, failed, total = 0.0, [], 0
    for n in (5, 6):
        for case in all_cases(n):
            t0 = time.time()
            ok, _ = case.run()
            dt = time.time() - t0
            worst = max(worst, dt)
            total += 1
            if not ok or dt >= 60:
                failed.append(case.name)
    record(8, not failed, f"{total} cases at n=5,6, slowest {worst:.2f}s, failed {failed}")


def test_c09_geometry_rule_equivalence():
    n = 5
    rules = base_rules(n)
    enc = encode_spots(rules)
    ring = labels(n)
    mism = sum(compatibility(enc, i, j) != ((u, v) not in rules)
               for i, u in enumerate(ring, 1) for j, v in enumerate(ring, 1))
    toy = encode_indexed(3, [(1, 3), (2, 2), (3, 3)])
    allowed = [compatibility(toy, *p) for p in [(1, 1), (1, 2), (2, 3)]]
    prohibited = [compatibility(toy, *p) for p in [(1, 3), (2, 2), (3, 3)]]
    ok = mism == 0 and all(allowed) and not any(prohibited)
    record(9, ok, f"n=5: {len(ring) ** 2} ordered pairs, {mism} mismatches; toy allowed {allowed}, "
                  f"prohibited {prohibited}")


@pytest.fixture(scope="module")
def toy_planar():
    n = 5
    rules = base_rules(n)
    sticks = synthesize_weave(toy_schematic(n, 3, 3))
    pset = instantiate_patch(sticks, encode_spots(rules), rules)
    return sticks, pset, verify_planar(pset)


@pytest.fixture(scope="module")
def marked_planar(weave_windows):
    # the s=3, v=3 weave with its marking rules, around one gap foot
    rules = weave_rules(FULL33)
    patch = synthesize_weave(weave_windows[0].schematic, FULL33)
    focus, chosen, disk = local_patch(patch, rules.n, radius=2)
    pset = instantiate_patch(chosen, encode_spots(rules), rules)
    return pset, verify_planar(pset, interior_cells(pset.cells) & disk)


def test_c10_planarity(toy_planar, marked_planar):
    _, pset, rep = toy_planar
    pset2, rep2 = marked_planar
    angles = set()
    for p in pset.pieces[:60]:
        angles |= set(p.angles())
    ok = rep.ok and rep2.ok and rep.region_cells > 0 and rep2.region_cells > 0 and angles <= ALLOWED_ANGLES
    record(10, ok, f"n=5 toy weave: {rep.summary()}; n=51 marked weave: {rep2.summary()}")


def test_c11_orientation_census(weave_windows, toy_planar, marked_planar):
    sticks_seen = set()
    for w in weave_windows:
        sticks_seen |= orientation_census(synthesize_weave(w.schematic, FULL33))
    toy_sticks, pset, _ = toy_planar
    sticks_seen |= orientation_census(toy_sticks)
    staples = staple_orientations(pset) | staple_orientations(marked_planar[0])
    ok = sticks_seen == {0, 2, 5} and len(staples) == 1
    record(11, ok, f"stick rotations {sorted(sticks_seen)} + staple classes {sorted(staples)} "
                   f"= {len(sticks_seen) + len(staples)} orientations")


def test_c12_staple_surround():
    res = staple_surround_check()
    record(12, res["configurations"] == [], f"{res['nodes']} wedge sequences tried, none closes")

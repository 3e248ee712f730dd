import copy
import random

import pytest
from hypothesis import given, settings, strategies as st

from stickweave.errors import CapExceeded, MalformedInput, VerificationFailure
from stickweave.forcing import all_cases, stack
from stickweave.schematic import (MarkingLayout, Schematic, SchematicRow, StateTable,
                                  bucket_layout, random_window, validate_schematic)
from stickweave.stick import (
    MatchingRuleSet, StickPlacement, back_side, backtracking_tiler, base_rule_families,
    base_rules, check_patch, front_side, labels, load_patch, marking_rules,
    orientation_census, save_patch, synthesize_weave, weave_rules,
)

FULL33 = StateTable.uniform(3, 3, (-2, 2))


@pytest.fixture(scope="module")
def rules33():
    return weave_rules(FULL33)


@pytest.fixture(scope="module")
def windows33():
    rng = random.Random(7)
    return [random_window(FULL33, 2, 1, rng) for _ in range(3)]


@pytest.mark.parametrize("n", [5, 6, 9])
def test_label_ring(n):
    ring = labels(n)
    assert len(ring) == len(set(ring)) == 4 * n + 2
    assert back_side(n) == ring[1:2 * n + 1]
    assert front_side(n) == ring[2 * n + 2:]


def test_base_rules_counts():
    assert len(base_rules(6)) == 44
    fam = base_rule_families(6)
    assert fam[5] == {("a1", "y1"), ("a1", "y2"), ("c1", "y1"), ("c1", "y2")}
    assert base_rule_families(5)[7] == {("d1", "z2"), ("d2", "z2"), ("d3", "z2")}
    assert set().union(*fam.values()) == set(base_rules(6).forbidden)
    with pytest.raises(MalformedInput):
        base_rules(4)


def test_rules_json_roundtrip(rules33):
    assert MatchingRuleSet.from_json(rules33.to_json()) == rules33
    assert ("y2", "y1") in rules33


def _layout(n_block, arrows=(), right=(), left=()):
    return MarkingLayout(n_block, tuple(arrows), frozenset(right), frozenset(left), {}, {})


def test_marking_literal_example():
    from stickweave.schematic import ArrowMark
    lay = _layout(9, [ArrowMark("top", "L", 3)])
    n = 10
    assert ("a7", "y2") in marking_rules(lay, n, "literal")  # a_{n-p}
    assert ("a5", "y2") in marking_rules(lay, n)  # a_{n-p-2}
    lay = _layout(9, [ArrowMark("top", "R", 3)])
    assert ("a6", "y1") in marking_rules(lay, n) and ("a6", "y1") in marking_rules(lay, n, "literal")


def test_marking_no_triangles():
    n = 10
    lit = marking_rules(_layout(9), n, "literal").forbidden
    assert all(("a%d" % (n - i), "x1") in lit for i in range(1, n))
    assert all(("b%d" % (n - 1 - i), "z2") in lit for i in range(0, n - 1))
    geo = marking_rules(_layout(9), n).forbidden
    assert ("a1", "x1") not in geo and ("b9", "z2") not in geo
    assert len(geo) == 2 * (n - 2)


def test_marking_rejects_bad_length():
    with pytest.raises(MalformedInput):
        marking_rules(bucket_layout(FULL33), 7)


def test_check_patch_basics():
    assert check_patch([], base_rules(6)) == []
    n = 6
    pair = stack(n, 2)
    rules = base_rules(n)
    # a right-slanted stick beside a left-leaning pair
    bad = check_patch(pair + [StickPlacement(n, 0, 1)], rules)
    assert bad and all(v.kind == "rule" for v in bad)
    assert check_patch(pair + [StickPlacement(0, 0, 0)], rules)[0].kind == "overlap"


def test_stack_taller_than_n_breaks_rule_4():
    n = 6
    rules = base_rules(n)
    tall = stack(n, n + 1)
    fam4 = base_rule_families(n)[4]
    bad = check_patch(tall + [StickPlacement(n, n - 1, 2)], rules)
    assert any(v.labels in fam4 for v in bad)
    # the stick flanking the top n rows is the only one a height-n stack accepts
    assert backtracking_tiler([(n, k) for k in range(n)], rules, stack(n, n)) == [
        [StickPlacement(n, n - 1, 2)]]
    assert backtracking_tiler([(n, k) for k in range(n + 1)], rules, tall) == []


def test_single_block_weave():
    n_block = FULL33.n_block
    schem = Schematic(n_block, [SchematicRow(0, 0, [0], [])])
    sticks = synthesize_weave(schem)
    assert sticks == stack(n_block + 1, n_block + 1)
    assert check_patch(sticks, base_rules(n_block + 1)) == []


def test_weave_windows_clean(windows33, rules33):
    for w in windows33:
        sticks = synthesize_weave(w.schematic, FULL33)
        assert check_patch(sticks, rules33) == []
        assert orientation_census(sticks) == {0, 2, 5}


def test_weave_three_rows():
    w = random_window(FULL33, 3, 2, random.Random(11))
    assert check_patch(synthesize_weave(w.schematic, FULL33), weave_rules(FULL33)) == []


def test_literal_convention_is_inconsistent(windows33):
    lit = weave_rules(FULL33, "literal")
    assert check_patch(synthesize_weave(windows33[0].schematic, FULL33), lit)


def test_perturbed_splits_match_schematic(windows33, rules33):
    base = windows33[0].schematic
    seen = set()
    for ri, row in enumerate(base.rows):
        for gi, (L, R) in enumerate(row.gaps):
            for d in (-3, -1, 1, 3):
                if L + d < 1 or R - d < 1:
                    continue
                s = copy.deepcopy(base)
                s.rows[ri].gaps[gi] = (L + d, R - d)
                bad_s = bool(validate_schematic(s, FULL33))
                bad_w = bool(check_patch(synthesize_weave(s, FULL33, check=False), rules33))
                assert bad_s == bad_w
                seen.add(bad_s)
    assert True in seen


def test_invalid_schematic_refused(windows33):
    s = copy.deepcopy(windows33[0].schematic)
    L, R = s.rows[1].gaps[0]
    s.rows[1].gaps[0] = (L + R - 1, 1)
    with pytest.raises(VerificationFailure):
        synthesize_weave(s, FULL33)


def test_patch_json_roundtrip(tmp_path, windows33):
    sticks = synthesize_weave(windows33[0].schematic, FULL33)[:50]
    save_patch(sticks, tmp_path / "patch.json")
    assert load_patch(tmp_path / "patch.json") == sticks


def test_tiler_full_patch_is_unique():
    n = 5
    seeds = stack(n, n)
    cells = [c for p in seeds for c in p.cells(n)]
    assert backtracking_tiler(cells, base_rules(n), seeds) == [[]]


def test_tiler_cap():
    with pytest.raises(CapExceeded) as err:
        backtracking_tiler([(0, 0)], base_rules(5), cap=3)
    assert len(err.value.partial) == 3


@pytest.mark.parametrize("n", [5, 6])
def test_forcing_cases(n):
    for case in all_cases(n):
        ok, count = case.run()
        assert ok, (case.name, count)


def test_forcing_needs_rule_4():
    n = 5
    weakened = MatchingRuleSet(n, base_rules(n).forbidden - base_rule_families(n)[4])
    tall = [c for c in all_cases(n) if c.name == f"stack-height/{n + 1}/right"][0]
    assert tall.run()[0]
    assert not tall.run(weakened)[0]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 5), st.integers(-20, 20), st.integers(-20, 20))
def test_rotation_invariance(rot, dq, dr):
    # rotating a legal patch about the origin keeps it legal
    n = 5
    rules = base_rules(n)
    patch = stack(n, 3) + [StickPlacement(-1, 0, 5)]

    def turn(q, r, k):
        for _ in range(k):
            x, z = q, r
            y = -x - z
            q, r = -y, -x
        return q, r
    moved = []
    for p in patch:
        q, r = turn(p.q, p.r, rot)
        moved.append(StickPlacement(q + dq, r + dr, (p.rot + rot) % 6))
    assert check_patch(moved, rules) == []

"""Finite forcing checks behind the weave lemma, run with the bounded tiler.

Each case fixes some seed sticks, a region to cover, and a property every
completion (or the set of completions) must have. Stacks here use the
conventions of :mod:`stickweave.stick`: a left-leaning stack keeps the same q
range on every row, a right-leaning one shifts by -1 per row downward.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .stick import (DIRS, LEFT_ARROW, RIGHT_ARROW, MatchingRuleSet, StickPlacement,
                    backtracking_tiler, base_rules, candidate_placements, check_patch)

SLANT_LEFT, SLANT_RIGHT, FLAT = 2, 1, 0  # rot % 3


@dataclass
class ForcingCase:
    name: str
    n: int
    claim: str
    seeds: list
    region: list
    check: Callable[[list], bool]
    nonempty: bool = True  # the claim also needs at least one completion

    def run(self, rules: MatchingRuleSet | None = None, cap: int = 100_000) -> tuple[bool, int]:
        rules = rules or base_rules(self.n)
        comps = backtracking_tiler(self.region, rules, self.seeds, cap=cap)
        ok = self.check(comps) and (bool(comps) or not self.nonempty)
        return ok, len(comps)


def stack(n: int, height: int, q: int = 0, r: int = 0, lean: str = "left",
          rot: int = 0) -> list[StickPlacement]:
    dq = 0 if lean == "left" else -1
    return [StickPlacement(q + k * dq + (n - 1 if rot == 3 else 0), r + k, rot)
            for k in range(height)]


def ring(cells, width: int = 1) -> list:
    cells = set(cells)
    out, cur = set(), set(cells)
    for _ in range(width):
        cur = {(c[0] + d[0], c[1] + d[1]) for c in cur for d in DIRS} - cells - out
        out |= cur
    return sorted(out)


def _cells(placements, n):
    return [c for p in placements for c in p.cells(n)]


def _concaves_covered(p: StickPlacement, n: int, row: int, lo: int, hi: int) -> int:
    cells = set(p.cells(n))
    return sum((q, row) in cells for q in range(lo, hi))


def stack_side_cases(n: int) -> list[ForcingCase]:
    out = []
    for lean, cls in (("left", SLANT_LEFT), ("right", SLANT_RIGHT)):
        dq = 0 if lean == "left" else -1
        for rots in ((0, 0), (3, 3), (0, 3)):
            seeds = [StickPlacement(0 if rots[0] == 0 else n - 1, 0, rots[0]),
                     StickPlacement((0 if rots[1] == 0 else n - 1) + dq, 1, rots[1])]
            if check_patch(seeds, base_rules(n)):
                continue
            for side, reg in (("right", [(n, 0), (n + dq, 1)]), ("left", [(-1, 0), (-1 + dq, 1)])):
                out.append(ForcingCase(
                    f"stack-side/{lean}/{rots[0]}{rots[1]}/{side}", n,
                    f"the space {side} of a {lean}-leaning pair is one stick slanting {lean}",
                    seeds, reg,
                    lambda comps, cls=cls: all(len(c) == 1 and c[0].rot % 3 == cls for c in comps)))
    return out


def stack_height_cases(n: int) -> list[ForcingCase]:
    out = []
    for h, expect in ((n, True), (n + 1, False)):
        seeds = stack(n, h)
        for side, col in (("right", n), ("left", -1)):
            out.append(ForcingCase(
                f"stack-height/{h}/{side}", n,
                "a stick beside a stack taller than n breaks a rule" if not expect
                else "a stack of height n can be flanked",
                seeds, [(col, k) for k in range(h)],
                (lambda comps: bool(comps)) if expect else (lambda comps: not comps),
                nonempty=expect))
    return out


def pocket_cases(n: int) -> list[ForcingCase]:
    out = []
    V = StickPlacement(0, 0, LEFT_ARROW)
    pocket = [(1, r) for r in range(n - 1)]
    for hrot in (0, 3):
        for r0 in range(n - 1):
            H = StickPlacement(1 if hrot == 0 else n, r0, hrot)
            out.append(ForcingCase(
                f"pocket/{hrot}/{r0}", n,
                "a horizontal stick beside a left-slanted one forces horizontal sticks "
                "into every concave corner on that side",
                [V, H], pocket,
                lambda comps: all(all(p.rot % 3 == FLAT for p in c) for c in comps)))
    return out


def left_stack_height_cases(n: int) -> list[ForcingCase]:
    out = []
    for h in range(2, n):
        seeds = stack(n, h)
        above = {(q, -1) for q in range(1, n)}
        below = {(q, h) for q in range(n - 1)}

        def extended(c, above=above, below=below):
            return any(p.rot % 3 == FLAT and (above <= set(p.cells(n)) or below <= set(p.cells(n)))
                       for p in c)
        out.append(ForcingCase(
            f"left-stack-height/{h}", n,
            f"a left-leaning stack cannot stop at height {h}",
            seeds, ring(_cells(seeds, n)),
            lambda comps, extended=extended: all(extended(c) for c in comps),
            nonempty=False))
    return out


def slant_right_neighbour_cases(n: int) -> list[ForcingCase]:
    out = []
    S = StickPlacement(0, 0, 0)
    rules = base_rules(n)
    under = {(q, 1) for q in range(n - 1)}
    strip = [(q, r) for r in (1, 2) for q in range(-2, n + 1)]
    for T in candidate_placements((-1, 0), n, (1, 4)):
        if check_patch([S, T], rules):
            continue
        out.append(ForcingCase(
            f"slant-right-left-of-S/{T.q},{T.r},{T.rot}", n,
            "with a right-slanted stick left of S the space under S is a stacked stick",
            [S, T], strip,
            lambda comps: all(any(p.rot % 3 == FLAT and under <= set(p.cells(n)) for p in c)
                              for c in comps),
            nonempty=False))
    return out


def full_left_stack(n: int) -> list[StickPlacement]:
    """A left-leaning stack of height n with arrows down, flanked by left-slanted
    sticks whose arrows point away from it."""
    return stack(n, n) + [StickPlacement(-1, 0, LEFT_ARROW), StickPlacement(n, n - 1, RIGHT_ARROW)]


def space_a_cases(n: int) -> list[ForcingCase]:
    seeds = full_left_stack(n)
    return [ForcingCase(
        "space-A", n,
        "the space above-left of S is a downward horizontal stick meeting some, "
        "not all, concave corners of S",
        seeds, [(0, -1)],
        lambda comps: all(len(c) == 1 and c[0].rot == 0
                          and 1 <= _concaves_covered(c[0], n, -1, 1, n) <= n - 2 for c in comps))]


def stack_above_cases(n: int) -> list[ForcingCase]:
    out = []
    base = full_left_stack(n)
    for k in range(1, n - 2):
        T = stack(n, n, k - n + 1, -n)
        out.append(ForcingCase(
            f"right-of-T/{k}", n, "the space right of T is a left-slanted stick",
            base + T, [(k + 1, -1)],
            lambda comps: all(len(c) == 1 and c[0].rot % 3 == SLANT_LEFT for c in comps)))

        def space_b(comps, k=k):
            for c in comps:
                U = next(p for p in c if (n, -1) in p.cells(n))
                if U.rot != 0 or not 1 <= _concaves_covered(U, n, -1, 1, n) <= n - 2:
                    return False
                mid = sorted((p for p in c if p.rot % 3 == SLANT_LEFT), key=lambda p: p.q)
                arrows = [p.rot for p in mid]
                if not 2 <= len(mid) <= n - 3:
                    return False
                if arrows[0] != RIGHT_ARROW or arrows[-1] != LEFT_ARROW:
                    return False
                if any(a == LEFT_ARROW and b == RIGHT_ARROW for a, b in zip(arrows, arrows[1:])):
                    return False
            return True
        out.append(ForcingCase(
            f"space-B/{k}", n,
            "with T in place, B is a downward horizontal stick meeting some, not all, "
            "corners of S, and between T and U sit 2..n-3 left-slanted sticks, "
            "right-pointing then left-pointing",
            base + T, [(j, -1) for j in range(k + 1, n + 1)], space_b,
            nonempty=k <= n - 4))
        if k > n - 4:
            out[-1].check = lambda comps: not comps
    return out


def all_cases(n: int) -> list[ForcingCase]:
    return (stack_side_cases(n) + stack_height_cases(n) + pocket_cases(n)
            + left_stack_height_cases(n) + slant_right_neighbour_cases(n)
            + space_a_cases(n) + stack_above_cases(n))

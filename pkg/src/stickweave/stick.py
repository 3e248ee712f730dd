"""Stick polyhexes on a pointy-top hex grid, their matching rules, and weaves.

Cells are axial ``(q, r)`` with ``r`` growing downward. The six directions,
counter-clockwise from east, are E, NE, NW, W, SW, SE. A placement is an
anchor cell and a rotation ``rot`` (multiples of 60 degrees
counter-clockwise); cell ``j`` of the stick sits at ``anchor + j * DIRS[rot]``.

Rotation 0 is a horizontal stick with its arrow pointing down: the back side
(z1 a1 b1 ... b_{n-1} x2) runs right to left along the top and the front side
(z2 c1 d1 ... d_{n-1} x1) left to right along the bottom, with y1 on the east
end and y2 on the west end. Rotations 2 and 5 put the stick along the NW-SE
axis with the arrow pointing right and left respectively.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CapExceeded, MalformedInput, VerificationFailure
from .schematic import MarkingLayout, Schematic, SchematicRow, StateTable, bucket_layout, validate_schematic

DIRS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))
E, NE, NW, W, SW, SE = range(6)
HORIZONTAL, RIGHT_ARROW, LEFT_ARROW = 0, 2, 5


def labels(n: int) -> list[str]:
    """The 4n+2 edge labels in ring order."""
    ring = ["y1", "z1"]
    for i in range(1, n):
        ring += [f"a{i}", f"b{i}"]
    ring += ["x2", "y2", "z2"]
    for i in range(1, n):
        ring += [f"c{i}", f"d{i}"]
    ring.append("x1")
    return ring


def back_side(n: int) -> list[str]:
    return ["z1"] + [f"{s}{i}" for i in range(1, n) for s in "ab"] + ["x2"]


def front_side(n: int) -> list[str]:
    return ["z2"] + [f"{s}{i}" for i in range(1, n) for s in "cd"] + ["x1"]


def cell_edge_label(n: int, j: int, direction: int) -> str | None:
    """Label of edge ``direction`` of cell ``j`` in rotation 0; None if interior."""
    if direction == E:
        return "y1" if j == n - 1 else None
    if direction == W:
        return "y2" if j == 0 else None
    if direction == NE:
        return "z1" if j == n - 1 else f"b{n - 1 - j}"
    if direction == NW:
        return "x2" if j == 0 else f"a{n - j}"
    if direction == SW:
        return "z2" if j == 0 else f"d{j}"
    return "x1" if j == n - 1 else f"c{j + 1}"


def pair(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class MatchingRuleSet:
    n: int
    forbidden: frozenset

    def __contains__(self, item) -> bool:
        return pair(*item) in self.forbidden

    def __or__(self, other: "MatchingRuleSet") -> "MatchingRuleSet":
        if other.n != self.n:
            raise MalformedInput("rule sets for different stick lengths")
        return MatchingRuleSet(self.n, self.forbidden | other.forbidden)

    def __len__(self) -> int:
        return len(self.forbidden)

    def to_json(self) -> dict:
        return {"n": self.n, "forbidden": [list(p) for p in sorted(self.forbidden)]}

    @classmethod
    def from_json(cls, d: dict) -> "MatchingRuleSet":
        return cls(int(d["n"]), frozenset(pair(*p) for p in d["forbidden"]))


def base_rules(n: int) -> MatchingRuleSet:
    """Rules 1-11, which force a weave pattern for sticks of length >= 5."""
    if n < 5:
        raise MalformedInput("the weave rules need sticks of length at least 5")
    ys, xs, zs = ("y1", "y2"), ("x1", "x2"), ("z1", "z2")
    out = set()
    out |= {pair(a, b) for a in ys for b in ys}
    out |= {pair(a, b) for a in xs for b in xs} | {pair(a, b) for a in zs for b in zs}
    out |= {pair(a, b) for a in ys for b in xs}
    out |= {pair(a, b) for a in xs for b in zs}
    out |= {pair(y, e) for y in ys for e in ("a1", "c1")}
    out |= {pair("x1", f"c{i}") for i in range(1, n)}
    out |= {pair("z2", f"d{i}") for i in range(1, n - 1)}
    out |= {pair("x2", f"a{i}") for i in range(1, n)}
    out |= {pair("z1", f"b{i}") for i in range(1, n)}
    out |= {pair(y, "z2") for y in ys}
    out |= {pair(y, f"d{n - 1}") for y in ys}
    return MatchingRuleSet(n, frozenset(out))


def base_rule_families(n: int) -> dict[int, set]:
    """Rule number -> its pairs, for reporting which rule a violation breaks."""
    ys, xs, zs = ("y1", "y2"), ("x1", "x2"), ("z1", "z2")
    return {
        1: {pair(a, b) for a in ys for b in ys},
        2: {pair(a, b) for a in xs for b in xs} | {pair(a, b) for a in zs for b in zs},
        3: {pair(a, b) for a in ys for b in xs},
        4: {pair(a, b) for a in xs for b in zs},
        5: {pair(y, e) for y in ys for e in ("a1", "c1")},
        6: {pair("x1", f"c{i}") for i in range(1, n)},
        7: {pair("z2", f"d{i}") for i in range(1, n - 1)},
        8: {pair("x2", f"a{i}") for i in range(1, n)},
        9: {pair("z1", f"b{i}") for i in range(1, n)},
        10: {pair(y, "z2") for y in ys},
        11: {pair(y, f"d{n - 1}") for y in ys},
    }


def marking_rules(layout: MarkingLayout, n: int | None = None,
                  convention: str = "geometric") -> MatchingRuleSet:
    """Pairs forbidden by the block markings, for sticks of length ``n_block + 1``.

    ``geometric`` uses the label positions of this module's weave (top
    segment ``d`` of a block is concave corner ``d + 1`` of its top stick).
    ``literal`` applies the printed index formulas unchanged.
    """
    N = layout.n_block
    n = n if n is not None else N + 1
    if n != N + 1:
        raise MalformedInput(f"stick length {n} does not match block length {N}")
    out = set()

    def a(j):
        return f"a{n - j}"

    def b(j):
        return f"b{n - j}"

    def check(j):
        if not 1 <= j <= n - 1:
            raise MalformedInput(f"marking reaches concave corner {j}, outside 1..{n - 1}")
        return j

    for mark in layout.arrows:
        p = mark.position
        if convention == "literal":
            if mark.side == "top":
                out.add(pair(a(check(p)), "y2") if mark.direction == "L" else pair(a(check(p + 1)), "y1"))
            else:
                out.add(pair(f"c{check(p + 1)}", "y1") if mark.direction == "L"
                        else pair(f"c{check(p + 2)}", "y2"))
            continue
        j = check(mark.segment + 1)
        if mark.side == "top":
            # the stick above concave j touches a_{n-j} with its lower end
            out.add(pair(a(j), "y2" if mark.direction == "L" else "y1"))
        else:
            # the stick below bottom concave j touches c_j with its upper end
            out.add(pair(f"c{j}", "y1" if mark.direction == "L" else "y2"))
    if convention == "literal":
        right_ok = set(layout.right_triangles)
        left_ok = set(layout.left_triangles)
        for i in range(1, n):
            if i not in right_ok:
                out.add(pair(a(i), "x1"))
        for i in range(0, n - 1):
            if i not in left_ok:
                out.add(pair(f"b{n - 1 - i}", "z2"))
        return MatchingRuleSet(n, frozenset(out))
    # a block end over concave j: right end meets a_{n-j} with x1, left end meets b_{n-j} with z2
    right_ok = {p + 1 for p in layout.right_triangles}
    left_ok = {p + 2 for p in layout.left_triangles}
    # concave n-1 pairs a_1 with x1 inside every horizontal stack, and concave 1
    # pairs b_{n-1} with z2 between neighbouring left-pointing sticks
    for j in range(1, n - 1):
        if j not in right_ok:
            out.add(pair(a(j), "x1"))
    for j in range(2, n):
        if j not in left_ok:
            out.add(pair(b(j), "z2"))
    return MatchingRuleSet(n, frozenset(out))


# ---------------------------------------------------------------------------
# placements and patches


@dataclass(frozen=True)
class StickPlacement:
    q: int
    r: int
    rot: int

    def cells(self, n: int) -> list[tuple[int, int]]:
        dq, dr = DIRS[self.rot % 6]
        return [(self.q + j * dq, self.r + j * dr) for j in range(n)]

    @property
    def orientation(self) -> str:
        return ("horizontal", "slant-right", "slant-left")[self.rot % 3]

    def to_json(self) -> dict:
        return {"q": self.q, "r": self.r, "rot": self.rot}


@dataclass(frozen=True)
class PatchViolation:
    kind: str  # "overlap" or "rule"
    cell: tuple[int, int]
    other: tuple[int, int] | None
    labels: tuple[str, str] | None
    placements: tuple[int, int]

    def __str__(self) -> str:
        if self.kind == "overlap":
            return f"overlap at {self.cell} between placements {self.placements}"
        return f"forbidden pair {self.labels} across {self.cell}-{self.other} (placements {self.placements})"


def _occupancy(placements, n):
    occ: dict[tuple[int, int], tuple[int, int]] = {}
    clashes = []
    for idx, p in enumerate(placements):
        for j, cell in enumerate(p.cells(n)):
            if cell in occ:
                clashes.append(PatchViolation("overlap", cell, None, None, (occ[cell][0], idx)))
            else:
                occ[cell] = (idx, j)
    return occ, clashes


def edge_label(p: StickPlacement, n: int, j: int, direction: int) -> str | None:
    return cell_edge_label(n, j, (direction - p.rot) % 6)


def check_patch(placements: list[StickPlacement], rules: MatchingRuleSet) -> list[PatchViolation]:
    """Overlaps and forbidden coincident edge pairs, in a deterministic order."""
    n = rules.n
    occ, out = _occupancy(placements, n)
    for cell in sorted(occ):
        idx, j = occ[cell]
        for d in (E, SE, SW):  # each shared edge once
            other = (cell[0] + DIRS[d][0], cell[1] + DIRS[d][1])
            hit = occ.get(other)
            if hit is None or hit[0] == idx:
                continue
            u = edge_label(placements[idx], n, j, d)
            v = edge_label(placements[hit[0]], n, hit[1], (d + 3) % 6)
            if u is None or v is None:  # only under an overlap, already reported
                continue
            if pair(u, v) in rules.forbidden:
                out.append(PatchViolation("rule", cell, other, pair(u, v), (idx, hit[0])))
    return out


def orientation_census(placements: Iterable[StickPlacement]) -> set[int]:
    return {p.rot % 6 for p in placements}


def save_patch(placements, path) -> None:
    with open(path, "w") as fh:
        json.dump([p.to_json() for p in placements], fh)


def load_patch(path) -> list[StickPlacement]:
    with open(path) as fh:
        return [StickPlacement(int(d["q"]), int(d["r"]), int(d["rot"])) for d in json.load(fh)]


# ---------------------------------------------------------------------------
# schematic -> weave


def block_offsets(schem: Schematic) -> dict[tuple[int, int], int]:
    """Hex column of every block's top-row start, keyed ``(row index, block index)``.

    A block spans ``n_block + 1`` hex columns but ``n_block`` schematic cells,
    so offsets grow by one per block along a row. Rows are tied together by
    where block ends land on the row below.
    """
    N = schem.n_block
    rows = schem.rows
    off: dict[tuple[int, int], int] = {}
    for j, _ in enumerate(rows[0].block_starts):
        off[(0, j)] = j
    for k in range(1, len(rows)):
        up, low = rows[k - 1], rows[k]
        found = {}
        for i, x in enumerate(up.block_starts):
            o = off[(k - 1, i)]
            for j, y in enumerate(low.block_starts):
                if y < x < y + N:
                    found.setdefault(j, set()).add(o - 1)
                if y < x + N < y + N:
                    found.setdefault(j, set()).add(o)
        if not found:
            raise VerificationFailure(f"schematic row {low.row} is not attached to the row above")
        base = {o - j for j, os in found.items() for o in os}
        if len(base) != 1:
            raise VerificationFailure(f"schematic row {low.row} lands inconsistently on the row above")
        b0 = base.pop()
        for j, _ in enumerate(low.block_starts):
            off[(k, j)] = b0 + j
    return off


def synthesize_weave(schem: Schematic, table: StateTable | None = None,
                     check: bool = True) -> list[StickPlacement]:
    """Horizontal stacks for blocks and split vertical stacks for gaps."""
    if check and table is not None:
        bad = validate_schematic(schem, table)
        if bad:
            raise VerificationFailure("schematic is not valid", [str(v) for v in bad])
    n = schem.n_block + 1
    off = block_offsets(schem)
    out: list[StickPlacement] = []
    for k, row in enumerate(schem.rows):
        top = k * n
        cols = [x + off[(k, j)] for j, x in enumerate(row.block_starts)]
        for Q in cols:
            out.extend(StickPlacement(Q, top + h, HORIZONTAL) for h in range(n))
        for j, (left, right) in enumerate(row.gaps):
            start = cols[j] + n
            if start + left + right != cols[j + 1]:
                raise VerificationFailure(f"gap {j} of row {row.row} does not fill the space between stacks")
            for m in range(left):
                out.append(StickPlacement(start + m, top + n - 1, RIGHT_ARROW))
            for m in range(left, left + right):
                out.append(StickPlacement(start + m, top, LEFT_ARROW))
    return out


def weave_rules(table: StateTable, convention: str = "geometric") -> MatchingRuleSet:
    layout = bucket_layout(table)
    n = layout.n_block + 1
    return base_rules(n) | marking_rules(layout, n, convention)


# ---------------------------------------------------------------------------
# bounded tiler


def _fits(new: StickPlacement, n: int, occ, placements, rules) -> bool:
    cells = new.cells(n)
    if any(c in occ for c in cells):
        return False
    for j, cell in enumerate(cells):
        for d in range(6):
            other = (cell[0] + DIRS[d][0], cell[1] + DIRS[d][1])
            hit = occ.get(other)
            if hit is None:
                continue
            u = edge_label(new, n, j, d)
            v = edge_label(placements[hit[0]], n, hit[1], (d + 3) % 6)
            if pair(u, v) in rules.forbidden:
                return False
    return True


def candidate_placements(cell, n: int, rotations=range(6)) -> Iterator[StickPlacement]:
    for rot in rotations:
        dq, dr = DIRS[rot]
        for j in range(n):
            yield StickPlacement(cell[0] - j * dq, cell[1] - j * dr, rot)


def backtracking_tiler(region: Iterable[tuple[int, int]], rules: MatchingRuleSet,
                       seeds: list[StickPlacement] = (), cap: int = 10_000,
                       rotations=range(6)) -> list[list[StickPlacement]]:
    """Every rule-consistent way to cover ``region`` on top of ``seeds``.

    Added sticks may stick out of the region but never overlap. Returns the
    lists of added placements in discovery order.
    """
    n = rules.n
    seeds = list(seeds)
    occ, clashes = _occupancy(seeds, n)
    if clashes or check_patch(seeds, rules):
        return []
    todo = sorted(set(region))
    placed = list(seeds)
    found: list[list[StickPlacement]] = []

    def rec():
        cell = next((c for c in todo if c not in occ), None)
        if cell is None:
            if len(found) >= cap:
                raise CapExceeded(cap, found)
            found.append(placed[len(seeds):])
            return
        for cand in candidate_placements(cell, n, rotations):
            if _fits(cand, n, occ, placed, rules):
                idx = len(placed)
                placed.append(cand)
                for j, c in enumerate(cand.cells(n)):
                    occ[c] = (idx, j)
                rec()
                for c in cand.cells(n):
                    del occ[c]
                placed.pop()

    rec()
    return found


def toy_schematic(n: int = 5, rows: int = 2, blocks: int = 2) -> Schematic:
    """A small regular weave with every gap split 1+1, for geometry checks at
    short stick lengths where no state table fits."""
    N = n - 1
    if N < 4:
        raise MalformedInput("toy weave needs n >= 5")
    step, shift = N + 2, N - 1
    return Schematic(N, [SchematicRow(k, 0, [-shift * k + step * j for j in range(blocks)],
                                      [(1, 1)] * (blocks - 1)) for k in range(rows)])

"""Tiling schematics: rows of blocks separated by two-part gaps.

Coordinates along a row are integers. A block of length ``N`` starting at
``x`` covers ``[x, x + N]``; *position* ``p`` on that block is the point
``x + 1 + p`` and *segment* ``d`` is the unit cell ``[x + d, x + d + 1]``.
A right arrow mark facing position ``p`` sits on segment ``p``, a left arrow
facing ``p`` on segment ``p + 1``. Gap cells left of the direction change
carry right arrows; the rest carry left arrows.

Gap lattice: gap ``(r, c)`` lies between blocks ``c`` and ``c + 1`` of row
``r``. Below an odd row the lower-left neighbour keeps the column; below an
even row the lower-right neighbour does.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterator

from .errors import CapExceeded, DecodeError, MalformedInput

RIGHT, LEFT = "R", "L"


@dataclass(frozen=True)
class BucketSpec:
    L: frozenset
    R: frozenset
    I: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "L", frozenset(self.L))
        object.__setattr__(self, "R", frozenset(self.R))
        object.__setattr__(self, "I", (int(self.I[0]), int(self.I[1])))
        if not self.L or not self.R:
            raise MalformedInput("bucket value sets must be nonempty")
        if self.I[0] > self.I[1]:
            raise MalformedInput(f"empty interval {self.I}")

    def to_json(self) -> dict:
        return {"L": sorted(self.L), "R": sorted(self.R), "I": list(self.I)}

    @classmethod
    def from_json(cls, d: dict) -> "BucketSpec":
        return cls(frozenset(d["L"]), frozenset(d["R"]), tuple(d["I"]))


@dataclass(frozen=True)
class StateTable:
    s: int
    v: int
    buckets: tuple[BucketSpec, ...]

    def __post_init__(self):
        if self.s < 1 or self.v < 1:
            raise MalformedInput("need s >= 1 and v >= 1")
        if len(self.buckets) != self.s:
            raise MalformedInput(f"expected {self.s} buckets, got {len(self.buckets)}")
        for i, b in enumerate(self.buckets, 1):
            if not (b.L | b.R) <= set(range(1, self.v + 1)):
                raise MalformedInput(f"bucket {i}: values outside 1..{self.v}")
            if b.I[0] < -self.v + 1 or b.I[1] > self.v - 1:
                raise MalformedInput(f"bucket {i}: interval {b.I} outside +-{self.v - 1}")

    @property
    def ell_b(self) -> int:
        return (2 * self.v - 1) * (self.s - 1) + 2 * self.v

    @property
    def n_block(self) -> int:
        return self.s * self.ell_b + 2

    def sigma(self, i: int) -> int:
        return i + 1 if i < self.s else 1

    def sigma_inv(self, i: int) -> int:
        return i - 1 if i > 1 else self.s

    def bucket(self, i: int) -> BucketSpec:
        return self.buckets[i - 1]

    def left_length(self, state: int, x: int) -> int:
        return (2 * self.v - 1) * (self.sigma(state) - 1) + x

    def right_length(self, state: int, y: int) -> int:
        return (2 * self.v - 1) * (self.s - self.sigma(state)) + y

    def decode_lengths(self, left: int, right: int) -> tuple[int, int, int]:
        """(state, x, y) for canonical gap lengths; raises DecodeError otherwise."""
        step = 2 * self.v - 1
        if left < 1 or right < 1:
            raise DecodeError(f"gap part lengths ({left}, {right}) must be positive")
        sig = (left - 1) // step + 1
        x = left - step * (sig - 1)
        if not (1 <= sig <= self.s and 1 <= x <= self.v):
            raise DecodeError(f"left length {left} is not of the form (2v-1)(j-1)+x")
        y = right - step * (self.s - sig)
        if not 1 <= y <= self.v:
            raise DecodeError(f"right length {right} does not match left length {left}")
        return self.sigma_inv(sig), x, y

    def to_json(self) -> dict:
        return {"s": self.s, "v": self.v, "buckets": [b.to_json() for b in self.buckets]}

    @classmethod
    def from_json(cls, d: dict) -> "StateTable":
        try:
            return cls(int(d["s"]), int(d["v"]), tuple(BucketSpec.from_json(b) for b in d["buckets"]))
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad state_table.json: {exc}") from exc

    @classmethod
    def load(cls, path) -> "StateTable":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    @classmethod
    def uniform(cls, s: int, v: int, I: tuple[int, int] | None = None) -> "StateTable":
        """Every bucket allows every value; ``I`` defaults to the widest interval."""
        full = frozenset(range(1, v + 1))
        interval = I if I is not None else (-v + 1, v - 1)
        return cls(s, v, tuple(BucketSpec(full, full, interval) for _ in range(s)))


# ---------------------------------------------------------------------------
# markings


@dataclass(frozen=True)
class ArrowMark:
    side: str  # "top" or "bottom"
    direction: str  # RIGHT or LEFT
    position: int  # the block position the arrow faces

    @property
    def segment(self) -> int:
        return self.position if self.direction == RIGHT else self.position + 1


@dataclass(frozen=True)
class MarkingLayout:
    n_block: int
    arrows: tuple[ArrowMark, ...]
    right_triangles: frozenset
    left_triangles: frozenset
    top_segments: dict = field(hash=False, compare=False)
    bottom_segments: dict = field(hash=False, compare=False)


def bucket_layout(table: StateTable) -> MarkingLayout:
    s, v, lb = table.s, table.v, table.ell_b
    step = 2 * v - 1
    arrows: list[ArrowMark] = []
    right_tri, left_tri = set(), set()
    for i in range(1, s + 1):
        b = table.bucket(i)
        if not (b.L | b.R) <= set(range(1, v + 1)) or b.I[0] < -v + 1 or b.I[1] > v - 1:
            raise MalformedInput(f"bucket {i} has values out of range")
        base = (i - 1) * lb
        arrows.append(ArrowMark("top", RIGHT, base + 1))
        arrows.append(ArrowMark("top", LEFT, base + lb - 1))
        right_tri.update(base + v - y for y in b.R)
        left_tri.update(base + lb - v + x for x in b.L)
        arrows.append(ArrowMark("top", RIGHT, base + step * (i - 1) + v - b.I[1]))
        arrows.append(ArrowMark("top", LEFT, base + step * (i - 1) + v - b.I[0]))
        pair = base + step * (table.sigma(s - i + 1) - 1) + v
        arrows.append(ArrowMark("bottom", RIGHT, pair))
        arrows.append(ArrowMark("bottom", LEFT, pair))
    top, bottom = {}, {}
    for mark in arrows:
        segs = top if mark.side == "top" else bottom
        if segs.get(mark.segment, mark.direction) != mark.direction:
            raise MalformedInput(f"conflicting arrow marks on {mark.side} segment {mark.segment}")
        segs[mark.segment] = mark.direction
    return MarkingLayout(table.n_block, tuple(arrows), frozenset(right_tri), frozenset(left_tri),
                         top, bottom)


# ---------------------------------------------------------------------------
# gap assignments


def below_left(r: int, c: int) -> tuple[int, int]:
    return (r + 1, c) if r % 2 else (r + 1, c - 1)


def below_right(r: int, c: int) -> tuple[int, int]:
    return (r + 1, c + 1) if r % 2 else (r + 1, c)


@dataclass
class AssignmentRow:
    state: int
    gaps: dict[int, tuple[int, int]]


@dataclass
class GapAssignment:
    """States and (left|right) values on a window of the gap lattice.

    ``period`` is ``(rows, cols)`` for a periodic assignment, in which case
    row and column indices wrap.
    """

    rows: dict[int, AssignmentRow] = field(default_factory=dict)
    period: tuple[int, int] | None = None

    def row(self, r: int) -> AssignmentRow | None:
        if self.period:
            r %= self.period[0]
        return self.rows.get(r)

    def get(self, r: int, c: int) -> tuple[int, int] | None:
        row = self.row(r)
        if row is None:
            return None
        if self.period:
            c %= self.period[1]
        return row.gaps.get(c)

    def state(self, r: int) -> int | None:
        row = self.row(r)
        return None if row is None else row.state

    def set(self, r: int, c: int, value: tuple[int, int], state: int | None = None) -> None:
        if self.period:
            r %= self.period[0]
            c %= self.period[1]
        row = self.rows.get(r)
        if row is None:
            row = self.rows[r] = AssignmentRow(state, {})
        if state is not None:
            row.state = state
        row.gaps[c] = (int(value[0]), int(value[1]))

    def cells(self) -> Iterator[tuple[int, int, int, int, int]]:
        """Yield ``(row, col, state, x, y)`` in row-major order."""
        for r in sorted(self.rows):
            row = self.rows[r]
            for c in sorted(row.gaps):
                x, y = row.gaps[c]
                yield r, c, row.state, x, y

    def copy(self) -> "GapAssignment":
        return GapAssignment({r: AssignmentRow(row.state, dict(row.gaps)) for r, row in self.rows.items()},
                             self.period)

    def to_json(self) -> dict:
        out = []
        for r in sorted(self.rows):
            row = self.rows[r]
            cols = sorted(row.gaps)
            if cols and cols != list(range(cols[0], cols[-1] + 1)):
                raise MalformedInput(f"row {r} has non-contiguous columns")
            out.append({"row": r, "state": row.state, "first_col": cols[0] if cols else 0,
                        "gaps": [list(row.gaps[c]) for c in cols]})
        data = {"rows": out}
        if self.period:
            data["period"] = list(self.period)
        return data

    @classmethod
    def from_json(cls, d: dict) -> "GapAssignment":
        try:
            assign = cls(period=tuple(d["period"]) if d.get("period") else None)
            for k, row in enumerate(d["rows"]):
                r = row.get("row", k)
                first = row.get("first_col", 0)
                assign.rows[r] = AssignmentRow(int(row["state"]), {
                    first + j: (int(x), int(y)) for j, (x, y) in enumerate(row["gaps"])})
            return assign
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad assignment.json: {exc}") from exc

    @classmethod
    def load(cls, path) -> "GapAssignment":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    message: str

    def __str__(self) -> str:
        return f"{self.kind} at {self.where}: {self.message}"


def check_gap_conditions(assign: GapAssignment, table: StateTable) -> list[Violation]:
    """All gap-condition violations among the defined gaps of ``assign``."""
    out: list[Violation] = []
    for r, row in sorted(assign.rows.items()):
        i = row.state
        if i is None or not 1 <= i <= table.s:
            out.append(Violation("state", (r,), f"row state {i} outside 1..{table.s}"))
            continue
        b = table.bucket(i)
        nxt = assign.state(r + 1)
        if nxt is not None and nxt != table.sigma(i):
            out.append(Violation("state-cycle", (r,),
                                 f"row below state {i} has state {nxt}, expected {table.sigma(i)}"))
        for c in sorted(row.gaps):
            x, y = row.gaps[c]
            if x not in b.L:
                out.append(Violation("left-value", (r, c), f"left value {x} not in L_{i}"))
            if y not in b.R:
                out.append(Violation("right-value", (r, c), f"right value {y} not in R_{i}"))
            if nxt is None or nxt != table.sigma(i):
                continue
            bl, br = assign.get(*below_left(r, c)), assign.get(*below_right(r, c))
            if bl is None or br is None:
                continue
            x2, y2 = bl[1], br[0]
            if x + y != x2 + y2:
                out.append(Violation("sum", (r, c), f"{x}+{y} != {x2}+{y2}"))
            lo, hi = table.bucket(table.sigma(i)).I
            if not lo <= x2 - x <= hi:
                out.append(Violation("interval", (r, c),
                                     f"x'-x = {x2 - x} outside I_{table.sigma(i)} = [{lo}, {hi}]"))
    return out


# ---------------------------------------------------------------------------
# concrete schematics


@dataclass
class SchematicRow:
    row: int
    first_col: int
    block_starts: list[int]
    gaps: list[tuple[int, int]]  # (left length, right length) between consecutive blocks

    def gap_span(self, j: int, n_block: int) -> tuple[int, int, int]:
        """(start, split, end) coordinates of the j-th gap of this row."""
        a = self.block_starts[j] + n_block
        left, right = self.gaps[j]
        return a, a + left, a + left + right


@dataclass
class Schematic:
    n_block: int
    rows: list[SchematicRow]

    def row(self, r: int) -> SchematicRow | None:
        for row in self.rows:
            if row.row == r:
                return row
        return None

    def to_json(self) -> dict:
        return {"n_block": self.n_block, "rows": [
            {"row": row.row, "first_col": row.first_col, "block_starts": list(row.block_starts),
             "gaps": [{"left": a, "right": b} for a, b in row.gaps]} for row in self.rows]}

    @classmethod
    def from_json(cls, d: dict) -> "Schematic":
        try:
            rows = [SchematicRow(row.get("row", k), row.get("first_col", 0), list(row["block_starts"]),
                                 [(g["left"], g["right"]) for g in row["gaps"]])
                    for k, row in enumerate(d["rows"])]
            return cls(int(d["n_block"]), rows)
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad schematic.json: {exc}") from exc


def assignment_to_schematic(assign: GapAssignment, table: StateTable) -> Schematic:
    """Lay out a finite assignment window as concrete rows of blocks."""
    if assign.period:
        raise MalformedInput("unroll a periodic assignment into a finite window first")
    N, v, lb = table.n_block, table.v, table.ell_b
    rows = sorted(assign.rows)
    if not rows:
        raise DecodeError("empty assignment has no rows to anchor")
    laid: dict[int, SchematicRow] = {}
    for r in rows:
        row = assign.rows[r]
        cols = sorted(row.gaps)
        if not cols or cols != list(range(cols[0], cols[-1] + 1)):
            raise DecodeError(f"row {r} needs a contiguous, nonempty run of gaps")
        lengths = [(table.left_length(row.state, row.gaps[c][0]),
                    table.right_length(row.state, row.gaps[c][1])) for c in cols]
        starts = [0]
        for left, right in lengths:
            starts.append(starts[-1] + N + left + right)
        laid[r] = SchematicRow(r, cols[0], starts, lengths)
    for upper, lower in zip(rows, rows[1:]):
        if lower != upper + 1:
            raise DecodeError(f"rows {upper} and {lower} are not adjacent")
        up, low = laid[upper], laid[lower]
        sig = table.sigma(assign.rows[upper].state)
        shift = None
        for c in sorted(assign.rows[upper].gaps):
            j_up = c - up.first_col
            gap_start = up.block_starts[j_up] + N
            blc, brc = below_left(upper, c), below_right(upper, c)
            blk = brc[1] - low.first_col  # block under the gap sits left of the lower-right gap
            if not 0 <= blk < len(low.block_starts):
                continue
            bl = assign.get(*blc)
            if bl is not None:
                # left end of the upper gap lies on right triangle v - x' of bucket sigma
                shift = gap_start - (low.block_starts[blk] + 1 + (sig - 1) * lb + v - bl[1])
                break
            br = assign.get(*brc)
            if br is not None:
                gap_end = gap_start + sum(up.gaps[j_up])
                shift = gap_end - (low.block_starts[blk] + 1 + sig * lb - v + br[0])
                break
        if shift is None:
            raise DecodeError(f"row {lower} cannot be anchored under row {upper}")
        low.block_starts = [x + shift for x in low.block_starts]
    return Schematic(N, [laid[r] for r in rows])


def schematic_to_assignment(schem: Schematic, table: StateTable) -> GapAssignment:
    assign = GapAssignment()
    for row in schem.rows:
        if len(row.block_starts) != len(row.gaps) + 1:
            raise DecodeError(f"row {row.row}: block and gap counts disagree")
        states = set()
        for j, (left, right) in enumerate(row.gaps):
            col = row.first_col + j
            if row.block_starts[j + 1] - row.block_starts[j] - schem.n_block != left + right:
                raise DecodeError(f"gap ({row.row}, {col}): lengths do not match block spacing")
            try:
                state, x, y = table.decode_lengths(left, right)
            except DecodeError as exc:
                raise DecodeError(f"gap ({row.row}, {col}): {exc}") from None
            states.add(state)
            assign.set(row.row, col, (x, y), state)
        if len(states) > 1:
            raise DecodeError(f"row {row.row} mixes states {sorted(states)}")
    return assign


def _block_at(row: SchematicRow, a: int, b: int, N: int, margin: int) -> int | None:
    for j, x in enumerate(row.block_starts):
        if x + margin <= a and b <= x + N - margin:
            return j
    return None


def validate_schematic(schem: Schematic, table: StateTable,
                       layout: MarkingLayout | None = None) -> list[Violation]:
    """Geometric and marking violations of a finite schematic window."""
    layout = layout or bucket_layout(table)
    N = schem.n_block
    out: list[Violation] = []
    if N != table.n_block:
        out.append(Violation("block-length", (), f"blocks have length {N}, table needs {table.n_block}"))
        return out
    by_row = {row.row: row for row in schem.rows}
    for row in schem.rows:
        r = row.row
        if len(row.block_starts) != len(row.gaps) + 1:
            out.append(Violation("shape", (r,), "block and gap counts disagree"))
            continue
        lower, upper = by_row.get(r + 1), by_row.get(r - 1)
        for j, (left, right) in enumerate(row.gaps):
            where = (r, row.first_col + j)
            a, split, b = row.gap_span(j, N)
            if b != row.block_starts[j + 1]:
                out.append(Violation("shape", where, "gap lengths disagree with block spacing"))
                continue
            if left < 1 or right < 1:
                out.append(Violation("gap-size", where, f"parts ({left}, {right}) must both be >= 1"))
            if lower is not None:
                k = _block_at(lower, a, b, N, 1)
                if k is None:
                    lo_end = lower.block_starts[-1] + N
                    if lower.block_starts[0] <= a - 1 and b + 1 <= lo_end:
                        out.append(Violation("overlap", where,
                                             "gap is not inside a block of the row below"))
                else:
                    base = lower.block_starts[k]
                    if a - base - 1 not in layout.right_triangles:
                        out.append(Violation("triangle", where,
                                             f"block end above position {a - base - 1} has no right triangle"))
                    if b - base - 1 not in layout.left_triangles:
                        out.append(Violation("triangle", where,
                                             f"block end above position {b - base - 1} has no left triangle"))
                    for u in range(a, b):
                        want = layout.top_segments.get(u - base)
                        have = RIGHT if u < split else LEFT
                        if want is not None and want != have:
                            out.append(Violation("arrow-top", where,
                                                 f"gap cell on segment {u - base} points {have}, mark says {want}"))
                            break
            if upper is not None:
                k = _block_at(upper, a, b, N, 0)
                if k is not None:
                    base = upper.block_starts[k]
                    for u in range(a, b):
                        want = layout.bottom_segments.get(u - base)
                        have = RIGHT if u < split else LEFT
                        if want is not None and want != have:
                            out.append(Violation("arrow-bottom", where,
                                                 f"gap cell under segment {u - base} points {have}, mark says {want}"))
                            break
    return out


# ---------------------------------------------------------------------------
# exhaustive window enumeration
#
# A window with ``rows`` gap rows and ``cols`` gaps in its top gap row has
# block rows -1..rows. Block (k, j) sits on blocks (k+1, j) (left end, on a
# left triangle) and (k+1, j+1) (right end, on a right triangle). Gap (k, j)
# lies between blocks (k, j) and (k, j+1), under block (k-1, j) and over
# block (k+1, j+1). Gap rows 0..rows-1 are decoded; the outer rows only have
# to admit some legal split.


@dataclass(frozen=True)
class Window:
    schematic: Schematic
    decoded: tuple  # ((row, col, state, x, y) or (row, col, None, left, right), ...)

    def assignment(self) -> GapAssignment:
        assign = GapAssignment()
        for r, c, state, x, y in self.decoded:
            if state is None:
                raise DecodeError(f"gap ({r}, {c}) has non-canonical lengths ({x}, {y})")
            if assign.state(r) not in (None, state):
                raise DecodeError(f"row {r} mixes states")
            assign.set(r, c, (x, y), state)
        return assign


def _block_range(k: int, rows: int, cols: int) -> range:
    if k == -1:
        return range(0, cols)
    if k == rows:
        return range(1, cols + rows)
    return range(0, cols + k + 1)


def _legal_splits(a: int, b: int, layout: MarkingLayout,
                  lower: int | None, upper: int | None) -> list[int]:
    out = []
    for u in range(a + 1, b):
        ok = True
        for cell in range(a, b):
            have = RIGHT if cell < u else LEFT
            if lower is not None and layout.top_segments.get(cell - lower, have) != have:
                ok = False
                break
            if upper is not None and layout.bottom_segments.get(cell - upper, have) != have:
                ok = False
                break
        if ok:
            out.append(u)
    return out


def _lattice_offsets(rows: int, first_row: int) -> dict[int, int]:
    # window gap index j in row k is lattice column j + off[k]
    off = {0: 0}
    for k in range(0, rows):
        off[k + 1] = off[k] - 1 if (first_row + k) % 2 == 0 else off[k]
    off[-1] = off[0] + 1 if (first_row - 1) % 2 == 0 else off[0]
    return off


def _window_plan(rows: int, cols: int):
    """Placement steps ``(block, source, relation)`` in dependency order."""
    steps = [((-1, 0), None, None)]
    for j in _block_range(0, rows, cols):
        if j == 0:
            steps.append(((0, 0), (-1, 0), "under-left"))
        else:
            steps.append(((0, j), (-1, j - 1), "under-right"))
            if j in _block_range(-1, rows, cols):
                steps.append(((-1, j), (0, j), "over-left"))
    for k in range(0, rows):
        upper = _block_range(k, rows, cols)
        for j in _block_range(k + 1, rows, cols):
            if j in upper:
                steps.append(((k + 1, j), (k, j), "under-left"))
            else:
                steps.append(((k + 1, j), (k, j - 1), "under-right"))
    return steps


def _iter_windows(table: StateTable, rows: int, cols: int, first_row: int,
                  rng: random.Random | None = None) -> Iterator[Window]:
    if rows < 1 or cols < 1:
        raise MalformedInput("windows need at least one row and one gap")
    layout = bucket_layout(table)
    N = table.n_block
    left_tri, right_tri = sorted(layout.left_triangles), sorted(layout.right_triangles)
    plan = _window_plan(rows, cols)
    placed_at = {blk: n for n, (blk, _, _) in enumerate(plan)}

    # every gap, with the plan index after which it can be checked
    gaps = []
    for k in range(-1, rows + 1):
        rng_k = list(_block_range(k, rows, cols))
        for j in rng_k[:-1]:
            lower = (k + 1, j + 1) if k < rows else None
            upper = (k - 1, j) if k > -1 else None
            deps = [(k, j), (k, j + 1)] + [b for b in (lower, upper) if b is not None]
            ready = max(placed_at[b] for b in deps)
            gaps.append((ready, k, j, lower, upper))
    checks_after: dict[int, list] = {}
    for g in gaps:
        checks_after.setdefault(g[0], []).append(g[1:])

    off = _lattice_offsets(rows, first_row)
    starts: dict[tuple[int, int], int] = {}
    splits: dict[tuple[int, int], int] = {}

    def candidates(src, rel):
        s0 = starts[src]
        if rel == "under-left":
            vals = [s0 - 1 - p for p in left_tri]
        elif rel == "under-right":
            vals = [s0 + N - 1 - p for p in right_tri]
        else:
            vals = [s0 + 1 + p for p in left_tri]
        if rng is not None:
            rng.shuffle(vals)
        return vals

    def landing_ok(blk) -> bool:
        # both ends of every placed block above/below must land on triangles
        k, j = blk
        x = starts[blk]
        for (uk, uj), lower_is_left in (((k - 1, j), True), ((k - 1, j - 1), False)):
            if (uk, uj) in starts:
                u = starts[(uk, uj)]
                if lower_is_left and u - x - 1 not in layout.left_triangles:
                    return False
                if not lower_is_left and u + N - x - 1 not in layout.right_triangles:
                    return False
        for (lk, lj), lower_is_left in (((k + 1, j), True), ((k + 1, j + 1), False)):
            if (lk, lj) in starts:
                y = starts[(lk, lj)]
                if lower_is_left and x - y - 1 not in layout.left_triangles:
                    return False
                if not lower_is_left and x + N - y - 1 not in layout.right_triangles:
                    return False
        prev = starts.get((k, j - 1))
        if prev is not None and x - prev - N < 2:
            return False
        nxt = starts.get((k, j + 1))
        if nxt is not None and nxt - x - N < 2:
            return False
        return True

    def gap_options(k, j, lower, upper) -> list[int]:
        a, b = starts[(k, j)] + N, starts[(k, j + 1)]
        opts = _legal_splits(a, b, layout, starts.get(lower), starts.get(upper))
        if not 0 <= k < rows:
            return opts[:1]  # outer rows: any legal split will do
        if rng is not None:
            rng.shuffle(opts)
        return opts

    def emit() -> Window:
        srows = []
        decoded = []
        for k in range(-1, rows + 1):
            js = list(_block_range(k, rows, cols))
            lens = []
            for j in js[:-1]:
                a, b = starts[(k, j)] + N, starts[(k, j + 1)]
                lens.append((splits[(k, j)] - a, b - splits[(k, j)]))
                if 0 <= k < rows:
                    left, right = lens[-1]
                    r, c = first_row + k, j + off[k]
                    try:
                        decoded.append((r, c) + table.decode_lengths(left, right))
                    except DecodeError:
                        decoded.append((r, c, None, left, right))
            shift = starts[(-1, 0)]
            srows.append(SchematicRow(first_row + k, js[0] + off.get(k, 0),
                                      [starts[(k, j)] - shift for j in js], lens))
        return Window(Schematic(N, srows), tuple(decoded))

    def run_checks(idx, pos) -> Iterator[Window]:
        todo = checks_after.get(idx, [])
        if pos == len(todo):
            yield from place(idx + 1)
            return
        k, j, lower, upper = todo[pos]
        for u in gap_options(k, j, lower, upper):
            splits[(k, j)] = u
            yield from run_checks(idx, pos + 1)
        splits.pop((k, j), None)

    def place(idx) -> Iterator[Window]:
        if idx == len(plan):
            yield emit()
            return
        blk, src, rel = plan[idx]
        options = [0] if src is None else candidates(src, rel)
        for x in options:
            starts[blk] = x
            if landing_ok(blk):
                yield from run_checks(idx, 0)
        starts.pop(blk, None)

    yield from place(0)


def enumerate_windows(table: StateTable, rows: int = 2, max_cols: int = 1,
                      cap: int = 100_000, first_row: int = 0) -> list[Window]:
    """Every marking-valid window, with the top-left block anchored at 0."""
    found: list[Window] = []
    for w in _iter_windows(table, rows, max_cols, first_row):
        if len(found) >= cap:
            raise CapExceeded(cap, found)
        found.append(w)
    return found


def random_window(table: StateTable, rows: int, cols: int, rng: random.Random,
                  first_row: int = 0) -> Window:
    """A uniformly-branching random depth-first pick of one valid window."""
    for w in _iter_windows(table, rows, cols, first_row, rng):
        return w
    raise DecodeError("table admits no valid window of this size")


def has_children(table: StateTable, state: int, x: int, y: int) -> bool:
    """Whether a gap (x|y) in ``state`` admits some valid pair of gaps below it."""
    nxt = table.bucket(table.sigma(state))
    lo, hi = nxt.I
    return any(x + d in nxt.R and y - d in nxt.L for d in range(lo, hi + 1))


def gap_valid_assignments(table: StateTable, rows: int = 2, cols: int = 1,
                          first_row: int = 0, extendable: bool = True) -> list[GapAssignment]:
    """Brute-force list of gap-condition-valid assignments on the window shape.

    A window's bottom block row carries the markings that encode the next gap
    row, so with ``extendable`` every bottom-row gap must admit children.
    """
    off = _lattice_offsets(rows, first_row)
    shape = [(first_row + k, [j + off[k] for j in range(cols + k)]) for k in range(rows)]
    out = []
    for i0 in range(1, table.s + 1):
        states = [i0]
        for _ in range(rows - 1):
            states.append(table.sigma(states[-1]))

        def fill(k, pos, assign):
            if k == rows:
                last = assign.rows[shape[-1][0]]
                if extendable and not all(has_children(table, last.state, x, y)
                                          for x, y in last.gaps.values()):
                    return
                if not check_gap_conditions(assign, table):
                    out.append(assign.copy())
                return
            r, cs = shape[k]
            if pos == len(cs):
                if k and check_gap_conditions(assign, table):
                    return
                fill(k + 1, 0, assign)
                return
            b = table.bucket(states[k])
            for x in sorted(b.L):
                for y in sorted(b.R):
                    assign.set(r, cs[pos], (x, y), states[k])
                    fill(k, pos + 1, assign)
            del assign.rows[r].gaps[cs[pos]]
            if not assign.rows[r].gaps:
                del assign.rows[r]

        fill(0, 0, GapAssignment())
    return out


def assignment_key(assign: GapAssignment) -> tuple:
    return tuple(assign.cells())


def crop_assignment(assign: GapAssignment, rows: int = 2, cols: int = 1,
                    first_row: int = 0, first_col: int = 0) -> GapAssignment:
    """Finite window of a (usually periodic) assignment, in the shape windows use:
    row k holds ``cols + k`` gaps so every gap keeps both children."""
    off = _lattice_offsets(rows, first_row)
    out = GapAssignment()
    for k in range(rows):
        r = first_row + k
        for j in range(cols + k):
            c = first_col + j + off[k]
            val = assign.get(r, c)
            if val is None:
                raise DecodeError(f"gap ({r}, {c}) is missing")
            out.set(r, c, val, assign.state(r))
    return out

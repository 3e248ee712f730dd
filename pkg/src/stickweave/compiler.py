"""Compile an AB instance into a cyclic state table, and move tilings across.

One cycle of ``s = 16 + 8(t-1)`` states walks down two units of the AB
tiling. Encoding states store a tile index as a left value ``d*i``; the four
colour segments check colours across vertical edges; the two vertical
segments let one family change index between bands while pinning the other.

Rows use the canonical labelling: row ``r`` is in state ``((r-1) mod s)+1``,
so odd states sit in odd rows and a column runs straight down through them.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .ab import ABInstance, ABTorusTiling, ab_tiling_violations
from .errors import CapExceeded, DecodeError, MalformedInput, VerificationFailure
from .schematic import BucketSpec, GapAssignment, StateTable, below_left, below_right, check_gap_conditions


@dataclass(frozen=True)
class EncodingLayout:
    t: int
    k: int

    def __post_init__(self):
        if self.t < 1 or self.k < 1:
            raise MalformedInput("need t >= 1 and k >= 1")

    @property
    def d(self) -> int:
        return 12 * self.k

    @property
    def v(self) -> int:
        return (2 * self.t + 1) * self.d

    @property
    def s(self) -> int:
        return 16 + 8 * (self.t - 1)

    e1 = 1
    e15 = 5
    e2 = 9

    @property
    def e3(self) -> int:
        return 9 + 4 * (self.t - 1)

    @property
    def e35(self) -> int:
        return self.e3 + 4

    @property
    def e4(self) -> int:
        return 17 + 4 * (self.t - 1)

    def state(self, index: int) -> int:
        """Normalise a state index into 1..s."""
        return (index - 1) % self.s + 1

    @property
    def encoding_states(self) -> tuple[int, ...]:
        return tuple(self.state(e) for e in (self.e1, self.e15, self.e2, self.e3, self.e35, self.e4))

    def encode(self, i: int) -> tuple[int, int]:
        """Canonical gap values for tile number i in 1..2t."""
        return self.d * i, self.d * (2 * self.t + 1 - i)

    def to_json(self) -> dict:
        return {"t": self.t, "k": self.k, "d": self.d, "v": self.v, "s": self.s,
                "e1": self.e1, "e1.5": self.e15, "e2": self.e2, "e3": self.e3,
                "e3.5": self.e35, "e4": self.e4}


# which family takes the +2k offset, and which corner each family's colour is read from
COLOR_SEGMENTS = {
    "e1": ("A", {"A": "ur", "B": "ll"}),
    "e1.5": ("B", {"B": "lr", "A": "ul"}),
    "e3": ("A", {"A": "lr", "B": "ul"}),
    "e3.5": ("B", {"B": "ur", "A": "ll"}),
}


@dataclass(frozen=True)
class CompiledTable:
    layout: EncodingLayout
    table: StateTable
    ab: ABInstance

    def to_json(self) -> dict:
        data = self.table.to_json()
        data["layout"] = self.layout.to_json()
        return data


def left_value_to_tile(layout: EncodingLayout, x: int) -> tuple[str, int]:
    """``("A", i)`` or ``("B", i)`` for an encoding-state left value."""
    i, rem = divmod(x, layout.d)
    if rem or not 1 <= i <= 2 * layout.t:
        raise DecodeError(f"left value {x} is not d*i for 1 <= i <= {2 * layout.t} (d={layout.d})")
    return ("A", i) if i <= layout.t else ("B", i - layout.t)


def _vertical_specs(lay: EncodingLayout) -> dict[int, tuple[frozenset | None, tuple[int, int] | None]]:
    """Offsets 1..4(t-1) past e2 mapped to (L for odd offsets, I for even offsets)."""
    d, t = lay.d, lay.t
    out = {}
    for i in range(1, t):
        out[2 * i - 1] = (None, (-d + 1, 1))
        out[2 * (t - 1) + 2 * i - 1] = (None, (-1, d - 1))
        out[2 * i] = (frozenset({d * l for l in range(1, t + 1)}
                                | {d * l + i for l in range(t + 1, 2 * t - i + 1)}), (0, 0))
        out[2 * (t - 1) + 2 * i] = (frozenset({d * l for l in range(1, t + 1)}
                                              | {d * l + t - 1 - i for l in range(t + 1, t + 2 + i)}), (0, 0))
    return out


def build_state_table(ab: ABInstance) -> CompiledTable:
    lay = EncodingLayout(ab.t, ab.colors)
    t, k, d, v, s = lay.t, lay.k, lay.d, lay.v, lay.s
    D = d * (2 * t + 1)
    full = frozenset(range(1, v + 1))
    L_enc = frozenset(d * i for i in range(1, 2 * t + 1))
    R_enc = frozenset(d * (2 * t + 1 - i) for i in range(1, 2 * t + 1))
    L: dict[int, frozenset] = {}
    R: dict[int, frozenset] = {}
    I: dict[int, tuple[int, int]] = {}

    # colour segments: e -> e+4
    for name, (pinned, corners) in COLOR_SEGMENTS.items():
        e = {"e1": lay.e1, "e1.5": lay.e15, "e3": lay.e3, "e3.5": lay.e35}[name]

        def c(j):
            fam, _ = ab.combined(j)
            return ab.corner_color(j, corners[fam])

        def offset(j):
            fam, _ = ab.combined(j)
            return 2 * k if fam == pinned else 4 * k

        for m in range(1, 5):
            I[lay.state(e + m)] = (0, 6 * k)
        a, b, c3 = lay.state(e + 1), lay.state(e + 2), lay.state(e + 3)
        L[a], R[a] = full, frozenset(12 * k * j + offset(j) + c(j) for j in range(1, 2 * t + 1))
        L[b] = L_enc
        R[b] = frozenset({12 * k * (2 * t + 1 - j) + 2 * k for j in range(1, 2 * t + 1)}
                         | {12 * k * (2 * t + 1 - j) - 2 * k + cc
                            for j in range(1, 2 * t + 1) for cc in range(-k + 1, k)})
        L[c3] = full
        R[c3] = frozenset(12 * k * i + x for i in range(1, 2 * t + 1) for x in range(6 * k))

    # vertical segments: e2 -> e3 as listed, e4 -> e1 as its reflection x -> D - x
    for m, (Lm, Im) in _vertical_specs(lay).items():
        down, up = lay.state(lay.e2 + m), lay.state(lay.e4 + m)
        if m % 2:
            L[down] = R[down] = L[up] = R[up] = full
            I[down], I[up] = Im, (-Im[1], -Im[0])
        else:
            L[down], R[down], I[down] = Lm, full, Im
            L[up], R[up], I[up] = frozenset(D - x for x in Lm), full, Im

    for e in lay.encoding_states:
        L[e], R[e] = L_enc, R_enc
    missing = [i for i in range(1, s + 1) if i not in L or i not in I]
    if missing:
        raise AssertionError(f"states {missing} left unspecified")
    table = StateTable(s, v, tuple(BucketSpec(L[i], R[i], I[i]) for i in range(1, s + 1)))
    return CompiledTable(lay, table, ab)


# ---------------------------------------------------------------------------
# filling rows between fixed rows


def _column_chain(table: StateTable, states: list[int], x0: int, x_end: int | None) -> Iterator[list[int]]:
    """Left-value paths down one column through the odd ``states`` (first is fixed at x0)."""
    path = [x0]

    def walk(pos):
        if pos == len(states):
            if x_end is None or path[-1] == x_end:
                yield list(path)
            return
        lo, hi = table.bucket(table.sigma_inv(states[pos])).I  # even state in between
        Ls = table.bucket(states[pos]).L
        for x in range(path[-1] + lo, path[-1] + hi + 1):
            if x in Ls:
                path.append(x)
                yield from walk(pos + 1)
                path.pop()

    yield from walk(1)


def fill_vertical(assign: GapAssignment, table: StateTable, r0: int, r1: int) -> None:
    """Fill rows r0+1..r1-1 where every odd-state row below an odd row has I = {0}."""
    if (r1 - r0) % 2 or r0 % 2 == 0:
        raise ValueError("vertical fill runs between odd rows")
    ncols = assign.period[1]
    odd_rows = list(range(r0, r1 + 1, 2))
    states = [assign.state(r) or _canonical_state(table, r) for r in odd_rows]
    for c in range(ncols):
        x0, y0 = assign.get(r0, c)
        target = assign.get(r1, c)
        path = next(_column_chain(table, states, x0, target[0] if target else None), None)
        if path is None:
            raise VerificationFailure(f"no vertical path for column {c} from row {r0} to row {r1}")
        total = x0 + y0
        for r, st, x in zip(odd_rows[1:], states[1:], path[1:]):
            if r == r1 and target is not None:
                continue
            assign.set(r, c, (x, total - x), st)
    for r in range(r0 + 1, r1, 2):
        st = _canonical_state(table, r)
        for c in range(ncols):
            # even gap (r, c) sits on (r+1, c-1) and (r+1, c) with zero shift
            assign.set(r, c, (assign.get(r + 1, c - 1)[1], assign.get(r + 1, c)[0]), st)


def _canonical_state(table: StateTable, r: int) -> int:
    return (r - 1) % table.s + 1


def _bounds(table: StateTable, assign: GapAssignment, rows: list[int], ncols: int,
            target_fixed: bool) -> dict:
    """Backward interval bounds ``(lo_x, hi_x, lo_y, hi_y)`` for every gap in ``rows[1:]``."""
    bounds = {}
    last = rows[-1]
    st_last = assign.state(last) or _canonical_state(table, last)
    for c in range(ncols):
        if target_fixed:
            x, y = assign.get(last, c)
            bounds[(last, c)] = (x, x, y, y)
        else:
            b = table.bucket(st_last)
            bounds[(last, c)] = (min(b.L), max(b.L), min(b.R), max(b.R))
    for r in reversed(rows[1:-1]):
        lo, hi = table.bucket(_canonical_state(table, r + 1)).I
        b = table.bucket(_canonical_state(table, r))
        for c in range(ncols):
            bl = bounds[((r + 1), below_left(r, c)[1] % ncols)]
            br = bounds[((r + 1), below_right(r, c)[1] % ncols)]
            bounds[(r, c)] = (max(min(b.L), bl[2] - hi), min(max(b.L), bl[3] - lo),
                              max(min(b.R), br[0] + lo), min(max(b.R), br[1] + hi))
    return bounds


def search_rows(assign: GapAssignment, table: StateTable, r0: int, r1: int,
                target_fixed: bool = True, limit: int | None = None) -> Iterator[GapAssignment]:
    """Every way to fill rows r0+1..r1 (or r0+1..r1-1 when row r1 is fixed) of a
    periodic assignment, one shift per parent gap, in row-major order."""
    ncols = assign.period[1]
    rows = list(range(r0, r1 + 1))
    bounds = _bounds(table, assign, rows, ncols, target_fixed)
    work = assign.copy()
    # pending children values: (row, col) -> [x, y]
    pending: dict[tuple[int, int], list] = {}
    for r in rows[1:]:
        for c in range(ncols):
            pending[(r, c)] = [None, None]
    order = [(r, c) for r in rows[:-1] for c in range(ncols)]
    count = [0]

    def ok(r, c, side, value) -> bool:
        lo_x, hi_x, lo_y, hi_y = bounds[(r, c)]
        if side == 0:
            if not lo_x <= value <= hi_x:
                return False
        elif not lo_y <= value <= hi_y:
            return False
        if r == r1 and target_fixed:
            return True
        b = table.bucket(_canonical_state(table, r))
        return value in (b.L if side == 0 else b.R)

    def values(r, c):
        if r == r0:
            return work.get(r, c)
        return tuple(pending[(r, c)])

    def rec(pos):
        if pos == len(order):
            out = work.copy()
            for (r, c), (x, y) in pending.items():
                if r == r1 and target_fixed:
                    continue
                out.set(r, c, (x, y), _canonical_state(table, r))
            count[0] += 1
            if limit is not None and count[0] > limit:
                raise CapExceeded(limit)
            yield out
            return
        r, c = order[pos]
        x, y = values(r, c)
        lo, hi = table.bucket(_canonical_state(table, r + 1)).I
        blr, blc = below_left(r, c)
        brr, brc = below_right(r, c)
        bl, br = (blr, blc % ncols), (brr, brc % ncols)
        for delta in range(lo, hi + 1):
            xr, yl = x + delta, y - delta
            if not (ok(*bl, 1, xr) and ok(*br, 0, yl)):
                continue
            pending[bl][1] = xr
            pending[br][0] = yl
            yield from rec(pos + 1)
        pending[bl][1] = None
        pending[br][0] = None

    yield from rec(0)


def _copy_into(dst: GapAssignment, src: GapAssignment, rows) -> None:
    for r in rows:
        row = src.row(r)
        for c, val in row.gaps.items():
            dst.set(r, c, val, row.state)


# ---------------------------------------------------------------------------
# tilings <-> assignments


def encoding_rows(lay: EncodingLayout, tiling: ABTorusTiling) -> dict[tuple[int, int], tuple[int, int]]:
    """The fixed encoding gaps for one period, keyed ``(row, col)``."""
    t = lay.t
    rows = lay.s * tiling.h
    out = {}
    for r in range(tiling.h):
        for c in range(tiling.w):
            a = tiling.a_at(r, c)
            for e in (lay.e1, lay.e2, lay.e3, lay.e4):
                out[((e - lay.s * r) % rows, 2 * c)] = lay.encode(a)
            for e in (lay.e1, lay.e2):
                out[((e - lay.s * r) % rows, 2 * c + 1)] = lay.encode(t + tiling.b_at(r, c))
            for e in (lay.e3, lay.e4):
                out[((e - lay.s * r) % rows, 2 * c + 1)] = lay.encode(t + tiling.b_at(r - 1, c))
    return out


def fill_assignment_from_ab(compiled: CompiledTable, tiling: ABTorusTiling) -> GapAssignment:
    """A periodic gap assignment (one period) realising ``tiling``."""
    lay, table = compiled.layout, compiled.table
    bad = ab_tiling_violations(compiled.ab, tiling)
    if bad:
        raise MalformedInput(f"tiling is not valid for this instance: {bad[0]}")
    nrows, ncols = lay.s * tiling.h, 2 * tiling.w
    assign = GapAssignment(period=(nrows, ncols))
    enc = encoding_rows(lay, tiling)
    for (r, c), val in enc.items():
        assign.set(r, c, val, _canonical_state(table, r))
    # the e1.5 and e3.5 rows carry the same tiles as the rows above them
    for r in range(tiling.h):
        for e_from, e_mid in ((lay.e1, lay.e15), (lay.e3, lay.e35)):
            src = (e_from - lay.s * r) % nrows
            for c in range(ncols):
                assign.set(src + (e_mid - e_from), c, assign.get(src, c), _canonical_state(table, src + e_mid - e_from))
    for r in range(tiling.h):
        base = -lay.s * r
        for start, end in ((lay.e1, lay.e15), (lay.e15, lay.e2), (lay.e3, lay.e35), (lay.e35, lay.e4)):
            r0 = base + start
            sol = next(search_rows(assign, table, r0, r0 + 4), None)
            if sol is None:
                raise VerificationFailure(f"colour segment from row {r0 % nrows} cannot be filled")
            _copy_into(assign, sol, range(r0 + 1, r0 + 4))
        if lay.t > 1:
            fill_vertical(assign, table, base + lay.e2, base + lay.e3)
            fill_vertical(assign, table, base + lay.e4, base + lay.e1 + lay.s)
    problems = check_gap_conditions(assign, table)
    if problems:
        raise VerificationFailure("filled assignment breaks the gap conditions",
                                  [str(p) for p in problems])
    return assign


def decode_assignment_to_ab(compiled: CompiledTable, assign: GapAssignment) -> ABTorusTiling:
    """Read the AB tiling off the e1 rows of a periodic assignment."""
    lay, ab = compiled.layout, compiled.ab
    if not assign.period:
        raise DecodeError("decoding needs a periodic assignment")
    nrows, ncols = assign.period
    if nrows % lay.s or ncols % 2:
        raise DecodeError(f"period {assign.period} is not a multiple of ({lay.s}, 2)")
    e1_rows = sorted(r for r, row in assign.rows.items() if row.state == lay.e1)
    if not e1_rows:
        raise DecodeError("no row is in state e1")
    first = e1_rows[0]
    reps = {}
    for r in e1_rows:
        for c in range(ncols):
            val = assign.get(r, c)
            if val is None:
                raise DecodeError(f"gap ({r}, {c}) is missing")
            try:
                reps[(r, c)] = left_value_to_tile(lay, val[0])
            except DecodeError as exc:
                raise DecodeError(f"gap ({r}, {c}): {exc}") from None
    shift = next((c for c in range(ncols) if reps[(first, c)][0] == "A"), None)
    if shift is None:
        raise DecodeError(f"row {first} has no A-type gap")
    h, w = nrows // lay.s, ncols // 2
    a = [[0] * w for _ in range(h)]
    b = [[0] * w for _ in range(h)]
    for r in range(h):
        row = (first - lay.s * r) % nrows
        if (row, 0) not in reps:
            raise DecodeError(f"row {row} should be in state e1")
        for c in range(ncols):
            fam, idx = reps[(row, (c + shift) % ncols)]
            want = "A" if c % 2 == 0 else "B"
            if fam != want:
                raise DecodeError(f"gap ({row}, {(c + shift) % ncols}) holds a {fam} tile where the "
                                  f"alternation needs {want}: two adjacent columns of one family")
            (a if want == "A" else b)[r][c // 2] = idx
    tiling = ABTorusTiling(w, h, tuple(map(tuple, a)), tuple(map(tuple, b)))
    bad = ab_tiling_violations(ab, tiling)
    if bad:
        raise DecodeError(f"decoded tiling breaks colour matching: {bad[0]}")
    return tiling


# ---------------------------------------------------------------------------
# verification enumerators


def vertical_verification(lay: EncodingLayout, compiled: CompiledTable | None = None,
                          lower: bool = True) -> dict[int, set[int]]:
    """Start tile number -> set of end tile numbers over every single-column path.

    ``lower`` walks e2 -> e3; otherwise e4 -> e1 of the next cycle.
    """
    if compiled is None:
        compiled = build_state_table(_dummy_ab(lay.t, lay.k))
    table = compiled.table
    start = lay.e2 if lower else lay.e4
    end = lay.e3 if lower else lay.e1 + lay.s
    states = [lay.state(x) for x in range(start, end + 1, 2)]
    out = {}
    for i in range(1, 2 * lay.t + 1):
        ends = set()
        for path in _column_chain(table, states, lay.d * i, None):
            ends.add(left_value_to_tile_number(lay, path[-1]))
        out[i] = ends
    return out


def left_value_to_tile_number(lay: EncodingLayout, x: int) -> int:
    fam, i = left_value_to_tile(lay, x)
    return i if fam == "A" else i + lay.t


def _dummy_ab(t: int, k: int) -> ABInstance:
    from .ab import ABTile
    tiles = tuple(ABTile(0, 0, 0, 0) for _ in range(t))
    return ABInstance(k, tiles, tiles)


def horizontal_verification(compiled: CompiledTable, segment: str = "e1",
                            limit: int = 100_000) -> dict[tuple[int, int, int, int], set]:
    """Exhaustive two-column check of one colour segment.

    For every pair of start tiles ``(i, j)`` and every pair of start right
    values, fill the segment on a two-column torus with a free end row and
    record the set of end-row left values. Keys are ``(i, j, ri, rj)``.
    """
    lay, table = compiled.layout, compiled.table
    start = {"e1": lay.e1, "e1.5": lay.e15, "e3": lay.e3, "e3.5": lay.e35}[segment]
    two_t = 2 * lay.t
    results = {}
    for i in range(1, two_t + 1):
        for j in range(1, two_t + 1):
            for ri in range(1, two_t + 1):
                for rj in range(1, two_t + 1):
                    assign = GapAssignment(period=(lay.s * 4, 2))
                    assign.set(start, 0, (lay.d * i, lay.encode(ri)[1]), start)
                    assign.set(start, 1, (lay.d * j, lay.encode(rj)[1]), start)
                    ends = set()
                    for sol in search_rows(assign, table, start, start + 4, target_fixed=False, limit=limit):
                        ends.add((sol.get(start + 4, 0)[0], sol.get(start + 4, 1)[0]))
                    results[(i, j, ri, rj)] = ends
    return results

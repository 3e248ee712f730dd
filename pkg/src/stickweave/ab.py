"""AB tiles: 1x2 vertical dominoes on a parity lattice, and the Wang -> AB compiler.

An A tile sits with its lower-left corner at ``(2c, 2r)`` and a B tile at
``(2c + 1, 2r + 1)``. Placements are stored per lattice site, so the parity
rule holds by construction. The vertical edges that meet are::

    A(r, c).ur == B(r, c).ll          A(r, c).lr == B(r - 1, c).ul
    A(r, c).ul == B(r, c - 1).lr      A(r, c).ll == B(r - 1, c - 1).ur
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import CapExceeded, MalformedInput, VerificationFailure
from .wang import DEFAULT_CAP, TorusTiling, WangInstance, solve_wang_torus, tiling_violations


@dataclass(frozen=True)
class ABTile:
    upper_left: int
    upper_right: int
    lower_left: int
    lower_right: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.upper_left, self.upper_right, self.lower_left, self.lower_right)


@dataclass(frozen=True)
class ABInstance:
    colors: int
    a_tiles: tuple[ABTile, ...]
    b_tiles: tuple[ABTile, ...]

    def __post_init__(self):
        if not self.a_tiles or len(self.a_tiles) != len(self.b_tiles):
            raise MalformedInput("need |A| == |B| >= 1")
        for tile in self.a_tiles + self.b_tiles:
            if any(not 0 <= c < self.colors for c in tile.as_tuple()):
                raise MalformedInput(f"tile {tile} uses a color outside 0..{self.colors - 1}")

    @property
    def t(self) -> int:
        return len(self.a_tiles)

    def a(self, i: int) -> ABTile:
        return self.a_tiles[i - 1]

    def b(self, i: int) -> ABTile:
        return self.b_tiles[i - 1]

    def combined(self, j: int) -> tuple[str, ABTile]:
        """Tile number ``j`` in 1..2t, where t+1..2t are the B tiles."""
        if 1 <= j <= self.t:
            return "A", self.a(j)
        if self.t < j <= 2 * self.t:
            return "B", self.b(j - self.t)
        raise IndexError(j)

    def corner_color(self, j: int, corner: str) -> int:
        """Color of a named corner ('ul', 'ur', 'll', 'lr') of tile ``j`` in 1..2t."""
        _, tile = self.combined(j)
        return {
            "ul": tile.upper_left,
            "ur": tile.upper_right,
            "ll": tile.lower_left,
            "lr": tile.lower_right,
        }[corner]

    def to_json(self) -> dict:
        def enc(tile):
            return {"ul": tile.upper_left, "ur": tile.upper_right,
                    "ll": tile.lower_left, "lr": tile.lower_right}
        return {
            "t": self.t,
            "colors": self.colors,
            "a_tiles": [enc(x) for x in self.a_tiles],
            "b_tiles": [enc(x) for x in self.b_tiles],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ABInstance":
        try:
            def dec(d):
                return ABTile(d["ul"], d["ur"], d["ll"], d["lr"])
            inst = cls(int(data["colors"]), tuple(map(dec, data["a_tiles"])),
                       tuple(map(dec, data["b_tiles"])))
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad ab.json: {exc}") from exc
        if "t" in data and data["t"] != inst.t:
            raise MalformedInput(f"ab.json declares t={data['t']} but lists {inst.t} tiles")
        return inst

    @classmethod
    def load(cls, path) -> "ABInstance":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class ABTorusTiling:
    """Periodic AB tiling with period 2w x 2h, stored as ``a[r][c]`` and ``b[r][c]`` (1-based)."""

    w: int
    h: int
    a: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]

    def a_at(self, r: int, c: int) -> int:
        return self.a[r % self.h][c % self.w]

    def b_at(self, r: int, c: int) -> int:
        return self.b[r % self.h][c % self.w]

    def key(self) -> tuple:
        return tuple(v for r in range(self.h) for c in range(self.w) for v in (self.a[r][c], self.b[r][c]))

    def to_json(self) -> dict:
        return {"period": [2 * self.w, 2 * self.h], "a": [list(x) for x in self.a],
                "b": [list(x) for x in self.b]}

    @classmethod
    def from_json(cls, data: dict) -> "ABTorusTiling":
        a = tuple(tuple(row) for row in data["a"])
        b = tuple(tuple(row) for row in data["b"])
        return cls(len(a[0]), len(a), a, b)


def compile_wang_to_ab(wang: WangInstance) -> ABInstance:
    """One A and one B tile per Wang tile; color k+i glues the pair of tile i."""
    k = wang.k
    a_tiles, b_tiles = [], []
    for i, tile in enumerate(wang.tiles, 1):
        left, right, up, down = tile.west, tile.east, tile.north, tile.south
        a_tiles.append(ABTile(0, up, left, k + i))
        b_tiles.append(ABTile(k + i, right, down, 0))
    return ABInstance(wang.n + k + 1, tuple(a_tiles), tuple(b_tiles))


def ab_tiling_violations(ab: ABInstance, tiling: ABTorusTiling) -> list[str]:
    out = []
    for r in range(tiling.h):
        for c in range(tiling.w):
            ai, bi = tiling.a_at(r, c), tiling.b_at(r, c)
            if not (1 <= ai <= ab.t and 1 <= bi <= ab.t):
                out.append(f"unknown tile index at ({r},{c})")
                continue
            a = ab.a(ai)
            if a.upper_right != ab.b(tiling.b_at(r, c)).lower_left:
                out.append(f"A({r},{c}) upper-right vs B({r},{c}) lower-left")
            if a.lower_right != ab.b(tiling.b_at(r - 1, c)).upper_left:
                out.append(f"A({r},{c}) lower-right vs B({r - 1},{c}) upper-left")
            if a.upper_left != ab.b(tiling.b_at(r, c - 1)).lower_right:
                out.append(f"A({r},{c}) upper-left vs B({r},{c - 1}) lower-right")
            if a.lower_left != ab.b(tiling.b_at(r - 1, c - 1)).upper_right:
                out.append(f"A({r},{c}) lower-left vs B({r - 1},{c - 1}) upper-right")
    return out


def solve_ab_torus(ab: ABInstance, w: int, h: int, limit: int = DEFAULT_CAP) -> list[ABTorusTiling]:
    """All AB tilings with period 2w x 2h, ordered lexicographically by
    ``(a[0][0], b[0][0], a[0][1], b[0][1], ...)``."""
    if w < 1 or h < 1:
        raise MalformedInput("torus dimensions must be positive")
    a = [[0] * w for _ in range(h)]
    b = [[0] * w for _ in range(h)]
    order = [(kind, r, c) for r in range(h) for c in range(w) for kind in "AB"]
    found: list[ABTorusTiling] = []

    def pairs(kind, r, c):
        # (A site, A corner, B site, B corner) for every edge touching this site
        if kind == "A":
            return [((r, c), "ur", (r, c), "ll"), ((r, c), "lr", (r - 1, c), "ul"),
                    ((r, c), "ul", (r, c - 1), "lr"), ((r, c), "ll", (r - 1, c - 1), "ur")]
        return [((r, c), "ur", (r, c), "ll"), ((r + 1, c), "lr", (r, c), "ul"),
                ((r, c + 1), "ul", (r, c), "lr"), ((r + 1, c + 1), "ll", (r, c), "ur")]

    def color(tile: ABTile, corner: str) -> int:
        return getattr(tile, {"ul": "upper_left", "ur": "upper_right",
                              "ll": "lower_left", "lr": "lower_right"}[corner])

    def consistent(kind, r, c) -> bool:
        for (ar, ac), acorner, (br, bc), bcorner in pairs(kind, r, c):
            ai, bi = a[ar % h][ac % w], b[br % h][bc % w]
            if ai and bi and color(ab.a(ai), acorner) != color(ab.b(bi), bcorner):
                return False
        return True

    def search(pos: int) -> None:
        if pos == len(order):
            if len(found) >= limit:
                raise CapExceeded(limit, found)
            found.append(ABTorusTiling(w, h, tuple(map(tuple, a)), tuple(map(tuple, b))))
            return
        kind, r, c = order[pos]
        grid = a if kind == "A" else b
        for idx in range(1, ab.t + 1):
            grid[r][c] = idx
            if consistent(kind, r, c):
                search(pos + 1)
        grid[r][c] = 0

    search(0)
    return found


def wang_to_ab_tiling(tiling: TorusTiling) -> ABTorusTiling:
    """Replace Wang tile i at (r, c) by the S-tetromino A_i at (2c, 2r), B_i at (2c+1, 2r-1)."""
    w, h = tiling.width, tiling.height
    a = tuple(tuple(tiling.at(r, c) for c in range(w)) for r in range(h))
    b = tuple(tuple(tiling.at(r + 1, c) for c in range(w)) for r in range(h))
    return ABTorusTiling(w, h, a, b)


@dataclass
class BijectionReport:
    w: int
    h: int
    wang_count: int
    ab_count: int
    mapping: list[tuple[TorusTiling, ABTorusTiling]] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        return {"torus": [self.w, self.h], "wang_count": self.wang_count,
                "ab_count": self.ab_count, "ok": self.ok, "problems": self.problems}


def verify_wang_ab_bijection(wang: WangInstance, w: int, h: int,
                             limit: int = DEFAULT_CAP) -> BijectionReport:
    ab = compile_wang_to_ab(wang)
    wang_tilings = solve_wang_torus(wang, w, h, limit)
    ab_tilings = solve_ab_torus(ab, w, h, limit)
    report = BijectionReport(w, h, len(wang_tilings), len(ab_tilings))
    if report.wang_count != report.ab_count:
        report.problems.append(f"counts differ: {report.wang_count} Wang vs {report.ab_count} AB")
    ab_keys = {t.key() for t in ab_tilings}
    images = set()
    for wt in wang_tilings:
        if tiling_violations(wang, wt):
            report.problems.append(f"Wang solver returned an invalid tiling {wt.assignment}")
        image = wang_to_ab_tiling(wt)
        bad = ab_tiling_violations(ab, image)
        if bad:
            report.problems.append(f"image of {wt.assignment} is invalid: {bad[0]}")
        if image.key() not in ab_keys:
            report.problems.append(f"image of {wt.assignment} missing from AB solutions")
        images.add(image.key())
        report.mapping.append((wt, image))
    if len(images) != len(wang_tilings):
        report.problems.append("map is not injective")
    return report


def require_bijection(wang: WangInstance, w: int, h: int, limit: int = DEFAULT_CAP) -> BijectionReport:
    report = verify_wang_ab_bijection(wang, w, h, limit)
    if not report.ok:
        raise VerificationFailure("Wang/AB bijection failed", report.problems)
    return report

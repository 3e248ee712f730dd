"""Wang tile sets and a brute-force torus tiler.

Cells are addressed ``(row, col)`` with row 0 at the bottom, so the north
edge of ``(r, c)`` touches the south edge of ``(r + 1, c)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import CapExceeded, MalformedInput

DEFAULT_CAP = 10_000


@dataclass(frozen=True)
class WangTile:
    north: int
    east: int
    south: int
    west: int


@dataclass(frozen=True)
class WangInstance:
    k: int
    tiles: tuple[WangTile, ...]

    def __post_init__(self):
        if self.k < 1:
            raise MalformedInput("color count must be >= 1")
        if not self.tiles:
            raise MalformedInput("a Wang instance needs at least one tile")
        for i, t in enumerate(self.tiles, 1):
            for c in (t.north, t.east, t.south, t.west):
                if not 1 <= c <= self.k:
                    raise MalformedInput(f"tile {i} uses color {c} outside 1..{self.k}")

    @property
    def n(self) -> int:
        return len(self.tiles)

    def tile(self, index: int) -> WangTile:
        """1-based tile lookup."""
        return self.tiles[index - 1]

    def to_json(self) -> dict:
        return {
            "colors": self.k,
            "tiles": [{"n": t.north, "e": t.east, "s": t.south, "w": t.west} for t in self.tiles],
        }

    @classmethod
    def from_json(cls, data: dict) -> "WangInstance":
        try:
            tiles = tuple(WangTile(d["n"], d["e"], d["s"], d["w"]) for d in data["tiles"])
            return cls(int(data["colors"]), tiles)
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad wang.json: {exc}") from exc

    @classmethod
    def load(cls, path) -> "WangInstance":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class TorusTiling:
    """Tile indices (1-based) laid out row-major; ``periodic`` False means a bounded patch."""

    width: int
    height: int
    assignment: tuple[int, ...]
    periodic: bool = True

    def at(self, row: int, col: int) -> int:
        if self.periodic:
            row %= self.height
            col %= self.width
        return self.assignment[row * self.width + col]

    def rows(self) -> list[list[int]]:
        return [list(self.assignment[r * self.width:(r + 1) * self.width]) for r in range(self.height)]

    def shifted(self, drow: int, dcol: int) -> "TorusTiling":
        cells = tuple(
            self.at(r - drow, c - dcol) for r in range(self.height) for c in range(self.width)
        )
        return TorusTiling(self.width, self.height, cells, self.periodic)


def tiling_violations(instance: WangInstance, tiling: TorusTiling) -> list[str]:
    """Independent full-edge recheck of a tiling; empty list means valid."""
    out = []
    w, h = tiling.width, tiling.height
    if len(tiling.assignment) != w * h:
        return [f"assignment has {len(tiling.assignment)} cells, expected {w * h}"]
    for r in range(h):
        for c in range(w):
            idx = tiling.at(r, c)
            if not 1 <= idx <= instance.n:
                out.append(f"cell ({r},{c}) holds unknown tile {idx}")
                continue
            t = instance.tile(idx)
            if tiling.periodic or c + 1 < w:
                right = instance.tile(tiling.at(r, c + 1))
                if t.east != right.west:
                    out.append(f"east/west mismatch at ({r},{c})")
            if tiling.periodic or r + 1 < h:
                up = instance.tile(tiling.at(r + 1, c))
                if t.north != up.south:
                    out.append(f"north/south mismatch at ({r},{c})")
    return out


def solve_wang_torus(
    instance: WangInstance, w: int, h: int, limit: int = DEFAULT_CAP, periodic: bool = True
) -> list[TorusTiling]:
    """All tilings of a ``w`` x ``h`` torus (or bounded patch), lexicographic in the assignment.

    Cells are filled row-major; each candidate is checked against its already
    placed west and south neighbours, and against the wrap-around partners
    when the candidate closes a row or column.
    """
    if w < 1 or h < 1:
        raise MalformedInput("torus dimensions must be positive")
    n = instance.n
    tiles = instance.tiles
    grid = [0] * (w * h)
    found: list[TorusTiling] = []

    def fits(pos: int, t: WangTile) -> bool:
        r, c = divmod(pos, w)
        if c > 0 and tiles[grid[pos - 1] - 1].east != t.west:
            return False
        if r > 0 and tiles[grid[pos - w] - 1].north != t.south:
            return False
        if periodic:
            if c == w - 1:
                first = t if w == 1 else tiles[grid[r * w] - 1]
                if t.east != first.west:
                    return False
            if r == h - 1:
                bottom = t if h == 1 else tiles[grid[c] - 1]
                if t.north != bottom.south:
                    return False
        return True

    def search(pos: int) -> None:
        if pos == w * h:
            if len(found) >= limit:
                raise CapExceeded(limit, found)
            found.append(TorusTiling(w, h, tuple(grid), periodic))
            return
        for idx in range(1, n + 1):
            if fits(pos, tiles[idx - 1]):
                grid[pos] = idx
                search(pos + 1)
        grid[pos] = 0

    search(0)
    return found

"""Matching rules realised as shapes: bump/dent sticks plus a small 12-gon staple.

All coordinates live in Q(sqrt 3). Built polygons keep integer coordinates
over a fixed denominator ``S = 16 M`` (``M = 8n + 4`` spots per edge), where a
value ``(a, b)`` means ``(a + b sqrt3) / S``; every hex-lattice point and every
notch vertex is of that form, so all predicates are exact integer arithmetic.

Each unit edge of the stick is cut into ``M`` spots. A spot carries a notch
shaped like half a regular 12-gon of circumdiameter ``1 / (2M)``, either cut
into the tile (dent) or standing out of it (bump). Two dents facing each other
leave a hole that is exactly one staple.
"""
from __future__ import annotations

import functools
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import MalformedInput, VerificationFailure
from .stick import DIRS, MatchingRuleSet, StickPlacement, check_patch, labels

# ---------------------------------------------------------------------------
# Q(sqrt 3)


@dataclass(frozen=True)
class QS3:
    """p + q*sqrt(3) with rational p, q."""
    p: Fraction = Fraction(0)
    q: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))

    def __add__(self, o):
        o = _qs3(o)
        return QS3(self.p + o.p, self.q + o.q)

    __radd__ = __add__

    def __neg__(self):
        return QS3(-self.p, -self.q)

    def __sub__(self, o):
        return self + (-_qs3(o))

    def __rsub__(self, o):
        return _qs3(o) - self

    def __mul__(self, o):
        o = _qs3(o)
        return QS3(self.p * o.p + 3 * self.q * o.q, self.p * o.q + self.q * o.p)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _qs3(o)
        norm = o.p * o.p - 3 * o.q * o.q
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt 3)")
        return self * QS3(o.p / norm, -o.q / norm)

    def sign(self) -> int:
        return _sign(self.p, self.q)

    def __lt__(self, o):
        return (self - o).sign() < 0

    def __le__(self, o):
        return (self - o).sign() <= 0

    def __float__(self):
        return float(self.p) + float(self.q) * math.sqrt(3)

    def to_json(self) -> list[int]:
        return [self.p.numerator, self.p.denominator, self.q.numerator, self.q.denominator]

    @classmethod
    def from_json(cls, v) -> "QS3":
        return cls(Fraction(v[0], v[1]), Fraction(v[2], v[3]))


def _qs3(v) -> QS3:
    return v if isinstance(v, QS3) else QS3(Fraction(v))


def _sign(x, y) -> int:
    """Sign of x + y*sqrt3 for rationals or ints."""
    if x >= 0 and y >= 0:
        return 0 if x == 0 and y == 0 else 1
    if x <= 0 and y <= 0:
        return -1
    d = x * x - 3 * y * y
    if d == 0:
        return 0  # unreachable for nonzero rationals
    return (1 if x > 0 else -1) if d > 0 else (1 if y > 0 else -1)


ExactPoint = tuple  # (QS3, QS3)

# integer Z[sqrt3] helpers: an element is (a, b) = a + b sqrt3


def _zmul(u, v):
    return (u[0] * v[0] + 3 * u[1] * v[1], u[0] * v[1] + u[1] * v[0])


def _zsub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def _zsign(u) -> int:
    return _sign(u[0], u[1])


def _cross(d1, d2):
    """Cross product of two Z[sqrt3]^2 vectors, as a Z[sqrt3] element."""
    return _zsub(_zmul(d1[0], d2[1]), _zmul(d1[1], d2[0]))


def _dot(d1, d2):
    a, b = _zmul(d1[0], d2[0]), _zmul(d1[1], d2[1])
    return (a[0] + b[0], a[1] + b[1])


# 24 reference directions, multiples of 15 degrees, with Z[sqrt3] components
def _ref_dirs():
    base = [((2, 0), (0, 0)), ((2, 1), (1, 0)), ((0, 1), (1, 0)), ((1, 0), (1, 0)),
            ((1, 0), (0, 1)), ((1, 0), (2, 1))]  # 0,15,30,45,60,75 degrees
    out = []
    for quarter in range(4):
        for x, y in base:
            for _ in range(quarter):
                x, y = (-y[0], -y[1]), x
            out.append((x, y))
    return out


REF_DIRS = _ref_dirs()
SQ3 = math.sqrt(3)


def direction_index(d) -> int:
    """Angle of a nonzero Z[sqrt3]^2 vector in units of 15 degrees."""
    guess = round(math.degrees(math.atan2(d[1][0] + d[1][1] * SQ3, d[0][0] + d[0][1] * SQ3)) / 15) % 24
    ref = REF_DIRS[guess]
    if _zsign(_cross(ref, d)) == 0 and _zsign(_dot(ref, d)) > 0:
        return guess
    for k, ref in enumerate(REF_DIRS):
        if _zsign(_cross(ref, d)) == 0 and _zsign(_dot(ref, d)) > 0:
            return k
    raise VerificationFailure(f"edge direction {d} is not a multiple of 15 degrees")


# ---------------------------------------------------------------------------
# spot encoding


@dataclass(frozen=True)
class SpotEncoding:
    """Per edge (1-based ring index) a bump/dent vector of length 2 * edges."""
    edges: int
    bits: tuple  # bits[i-1][p-1] is True for a bump at spot p of edge i
    names: tuple = ()

    @property
    def spots(self) -> int:
        return 2 * self.edges

    def bumps(self, i: int) -> set[int]:
        return {p + 1 for p, b in enumerate(self.bits[i - 1]) if b}


def encode_indexed(edges: int, forbidden) -> SpotEncoding:
    """Encoding for edges numbered 1..edges and forbidden index pairs."""
    M = 2 * edges
    fb = set()
    for i, j in forbidden:
        if not (1 <= i <= edges and 1 <= j <= edges):
            raise MalformedInput(f"edge pair ({i}, {j}) outside 1..{edges}")
        fb.add((i, j))
        fb.add((j, i))
    bits = []
    for i in range(1, edges + 1):
        row = [False] * M
        row[i - 1] = True
        for j in range(1, edges + 1):
            if (i, j) in fb:
                row[M - j] = True  # spot M - j + 1
        bits.append(tuple(row))
    return SpotEncoding(edges, tuple(bits))


def encode_spots(rules: MatchingRuleSet, n: int | None = None) -> SpotEncoding:
    n = n or rules.n
    ring = labels(n)
    index = {lab: k + 1 for k, lab in enumerate(ring)}
    pairs = []
    for u, v in rules.forbidden:
        if u not in index or v not in index:
            raise MalformedInput(f"label outside the {4 * n + 2}-edge ring: {(u, v)}")
        pairs.append((index[u], index[v]))
    enc = encode_indexed(4 * n + 2, pairs)
    return SpotEncoding(enc.edges, enc.bits, tuple(ring))


def compatibility(enc: SpotEncoding, i: int, j: int) -> bool:
    """Whether edge i may lie against edge j: no two bumps meet."""
    M = enc.spots
    a, b = enc.bits[i - 1], enc.bits[j - 1]
    return not any(a[p] and b[M - 1 - p] for p in range(M))


# ---------------------------------------------------------------------------
# polygons


@dataclass
class TilePolygon:
    """Counter-clockwise ring of integer points; a point is ((ax, bx), (ay, by))
    meaning x = (ax + bx sqrt3) / scale, y likewise."""
    kind: str
    points: list
    scale: int
    meta: dict = field(default_factory=dict)

    def exact(self) -> list[ExactPoint]:
        S = self.scale
        return [(QS3(Fraction(x[0], S), Fraction(x[1], S)), QS3(Fraction(y[0], S), Fraction(y[1], S)))
                for x, y in self.points]

    def edges(self):
        pts = self.points
        for k in range(len(pts)):
            yield pts[k], pts[(k + 1) % len(pts)]

    def twice_area(self) -> QS3:
        tot = (0, 0)
        for (x0, y0), (x1, y1) in self.edges():
            c = _zsub(_zmul(x0, y1), _zmul(x1, y0))
            tot = (tot[0] + c[0], tot[1] + c[1])
        S2 = self.scale * self.scale
        return QS3(Fraction(tot[0], S2), Fraction(tot[1], S2))

    def area(self) -> QS3:
        return self.twice_area() * Fraction(1, 2)

    def angles(self) -> list[int]:
        """Interior angles in units of 15 degrees."""
        pts = self.points
        m = len(pts)
        cache: dict = {}
        dirs = []
        for k in range(m):
            d = _vsub(pts[(k + 1) % m], pts[k])
            if d not in cache:
                cache[d] = direction_index(d)
            dirs.append(cache[d])
        out = []
        for k in range(m):
            turn = (dirs[k] - dirs[k - 1]) % 24
            if turn > 12:
                turn -= 24
            out.append(12 - turn)
        return out

    def bbox(self):
        xs = [_approx(x, self.scale) for x, _ in self.points]
        ys = [_approx(y, self.scale) for _, y in self.points]
        return min(xs), min(ys), max(xs), max(ys)


def _approx(v, scale) -> float:
    return (v[0] + v[1] * SQ3) / scale


def _vsub(p, q):
    return (_zsub(p[0], q[0]), _zsub(p[1], q[1]))


def _vadd(p, q):
    return ((p[0][0] + q[0][0], p[0][1] + q[0][1]), (p[1][0] + q[1][0], p[1][1] + q[1][1]))


def _vscale(k: int, p):
    return ((k * p[0][0], k * p[0][1]), (k * p[1][0], k * p[1][1]))


# unit vectors at 30-degree steps, times 2: (cos, sin) * 2 in Z[sqrt3]
_TWICE_UNIT = [((2, 0), (0, 0)), ((0, 1), (1, 0)), ((1, 0), (0, 1)), ((0, 0), (2, 0)),
               ((-1, 0), (0, 1)), ((0, -1), (1, 0)), ((-2, 0), (0, 0)), ((0, -1), (-1, 0)),
               ((-1, 0), (0, -1)), ((0, 0), (-2, 0)), ((1, 0), (0, -1)), ((0, 1), (-1, 0))]


class Frame:
    """Integer coordinates over scale 16M for a stick of length n."""

    def __init__(self, n: int):
        self.n = n
        self.M = 8 * n + 4
        self.scale = 16 * self.M

    def center(self, q: int, r: int):
        # x = sqrt3 (q + r/2), y = -3r/2; times scale
        S = self.scale
        return ((0, S * (2 * q + r) // 2), (-3 * r * S // 2, 0))

    def corner(self, q: int, r: int, k: int):
        """Corner k of the pointy-top hex: angle 30 + 60k degrees, unit radius."""
        u = _TWICE_UNIT[(1 + 2 * k) % 12]
        return _vadd(self.center(q, r), _vscale(self.scale // 2, u))

    @functools.lru_cache(maxsize=None)
    def edge_ends(self, q: int, r: int, d: int):
        """Counter-clockwise ends of the edge of cell (q, r) facing direction d."""
        return self.corner(q, r, (d - 1) % 6), self.corner(q, r, d)


def _notch(frame: Frame, a, b, spot: int, bump: bool) -> list:
    """Points strictly after ``a`` along edge a->b for one spot, ending at the
    notch's far end. The edge direction is a multiple of 60 degrees."""
    M, S = frame.M, frame.scale
    d = _vsub(b, a)  # unit length, in scale units
    k = direction_index(d)  # multiple of 2 (30 degrees)
    step = k // 2  # index into _TWICE_UNIT
    # notch centre at t = (2 spot - 1) / (2M); radius 1/(4M)
    center = _vadd(a, _frac_vec(d, 2 * spot - 1, 2 * M))
    out = []
    rad_units = S // (4 * M)  # radius in scale units = 4
    for m in range(7):
        phi = 6 - m if not bump else 6 + m  # degrees / 30; 180 down to 0, or 180 up to 360
        u = _TWICE_UNIT[(step + phi) % 12]  # direction at angle edge + 30 phi, times 2
        off = ((u[0][0] * rad_units // 2, u[0][1] * rad_units // 2),
               (u[1][0] * rad_units // 2, u[1][1] * rad_units // 2))
        out.append(_vadd(center, off))
    return out


def _frac_vec(d, num: int, den: int):
    def f(v):
        if (v * num) % den:
            raise AssertionError("notch point off the integer grid")
        return v * num // den
    return ((f(d[0][0]), f(d[0][1])), (f(d[1][0]), f(d[1][1])))


def _stick_edges(frame: Frame, placement: StickPlacement):
    """(label index 1-based, start, end, cell, direction) in counter-clockwise ring order."""
    n = frame.n
    out = []
    rot = placement.rot % 6
    cells = placement.cells(n)
    # canonical ring: y1 (n-1,E), then top right-to-left, y2, bottom left-to-right
    ring = [(n - 1, 0), (n - 1, 1)]
    for i in range(1, n):
        ring += [(n - i, 2), (n - 1 - i, 1)]
    ring += [(0, 2), (0, 3), (0, 4)]
    for i in range(1, n):
        ring += [(i - 1, 5), (i, 4)]
    ring.append((n - 1, 5))
    for idx, (j, d) in enumerate(ring):
        dd = (d + rot) % 6
        q, r = cells[j]
        a, b = frame.edge_ends(q, r, dd)
        out.append((idx + 1, a, b, (q, r), dd))
    return out


def build_stick(frame: Frame, placement: StickPlacement, enc: SpotEncoding | None) -> TilePolygon:
    pts = []
    for idx, a, b, cell, d in _stick_edges(frame, placement):
        pts.append(a)
        if enc is None:
            continue
        bits = enc.bits[idx - 1]
        for p in range(1, frame.M + 1):
            pts.extend(_notch(frame, a, b, p, bits[p - 1]))
    stride = 1 + (7 * frame.M if enc is not None else 0)
    return TilePolygon("stick", pts, frame.scale, {"placement": placement, "stride": stride})


def build_staple(frame: Frame, center) -> TilePolygon:
    rad2 = frame.scale // (4 * frame.M)  # circumradius 1/(4M) in scale units
    pts = []
    for k in range(12):
        u = _TWICE_UNIT[k]
        pts.append(_vadd(center, ((u[0][0] * rad2 // 2, u[0][1] * rad2 // 2),
                                  (u[1][0] * rad2 // 2, u[1][1] * rad2 // 2))))
    return TilePolygon("staple", pts, frame.scale)


def build_polygons(n: int, enc: SpotEncoding) -> dict[str, TilePolygon]:
    """The modified stick at the origin in rotation 0, and one staple."""
    frame = Frame(n)
    stick = build_stick(frame, StickPlacement(0, 0, 0), enc)
    staple = build_staple(frame, ((0, 0), (0, 0)))
    return {"stick": stick, "staple": staple}


def staple_diameter(n: int) -> Fraction:
    return Fraction(1, 2 * (8 * n + 4))


def save_polygons(polys: dict, path) -> None:
    out = {k: [[x.to_json(), y.to_json()] for x, y in p.exact()] for k, p in polys.items()}
    with open(path, "w") as fh:
        json.dump(out, fh)


def load_polygons(path) -> dict[str, list[ExactPoint]]:
    with open(path) as fh:
        d = json.load(fh)
    return {k: [(QS3.from_json(x), QS3.from_json(y)) for x, y in v] for k, v in d.items()}


# ---------------------------------------------------------------------------
# patches


@dataclass
class PositionedSet:
    n: int
    frame: Frame
    pieces: list  # TilePolygon
    cells: set  # hex cells covered by the underlying sticks

    def count(self, kind: str) -> int:
        return sum(p.kind == kind for p in self.pieces)


def instantiate_patch(placements: list[StickPlacement], enc: SpotEncoding,
                      rules: MatchingRuleSet | None = None, n: int | None = None,
                      strict: bool = True) -> PositionedSet:
    """Modified sticks at the given placements with staples in every dent-dent hole."""
    n = n or (rules.n if rules else None)
    if n is None:
        raise MalformedInput("stick length unknown")
    if strict and rules is not None:
        bad = check_patch(placements, rules)
        if bad:
            raise VerificationFailure("patch breaks the matching rules", [str(v) for v in bad])
    frame = Frame(n)
    pieces = [build_stick(frame, p, enc) for p in placements]
    owner = {}
    for k, p in enumerate(placements):
        for c in p.cells(n):
            owner[c] = k
    # edge (cell, dir) -> label index
    label_at = {}
    for p in placements:
        for idx, a, b, cell, d in _stick_edges(frame, p):
            label_at[(cell, d)] = (idx, a, b)
    M = frame.M
    for (cell, d), (i, a, b) in sorted(label_at.items()):
        other = (cell[0] + DIRS[d][0], cell[1] + DIRS[d][1])
        back = label_at.get((other, (d + 3) % 6))
        if back is None or (cell, d) > (other, (d + 3) % 6):
            continue
        j = back[0]
        for p in range(1, M + 1):
            if not enc.bits[i - 1][p - 1] and not enc.bits[j - 1][M - p]:
                center = _vadd(a, _frac_vec(_vsub(b, a), 2 * p - 1, 2 * M))
                pieces.append(build_staple(frame, center))
    return PositionedSet(n, frame, pieces, set(owner))


def staple_count(placements, enc: SpotEncoding, n: int) -> int:
    """Dent-dent spot pairs over all coincident edges, from the encoding alone."""
    frame = Frame(n)
    label_at = {}
    for p in placements:
        for idx, a, b, cell, d in _stick_edges(frame, p):
            label_at[(cell, d)] = idx
    M, tot = frame.M, 0
    for (cell, d), i in label_at.items():
        other = ((cell[0] + DIRS[d][0], cell[1] + DIRS[d][1]), (d + 3) % 6)
        if other in label_at and (cell, d) < other:
            j = label_at[other]
            tot += sum(1 for p in range(M) if not enc.bits[i - 1][p] and not enc.bits[j - 1][M - 1 - p])
    return tot


# ---------------------------------------------------------------------------
# verification


@dataclass
class PlanarReport:
    unmatched: list = field(default_factory=list)  # boundary segments without a partner
    doubled: list = field(default_factory=list)  # segments used twice in one direction
    cover: list = field(default_factory=list)  # (cell, count) where the centre is not covered once
    angles: list = field(default_factory=list)  # (point, sum in 15-degree units)
    bad_angles: list = field(default_factory=list)  # corner angles outside the allowed set
    region_cells: int = 0
    checked_segments: int = 0
    checked_vertices: int = 0

    @property
    def ok(self) -> bool:
        return not (self.unmatched or self.doubled or self.cover or self.angles or self.bad_angles)

    def summary(self) -> str:
        return (f"region cells {self.region_cells}, segments {self.checked_segments}, "
                f"vertices {self.checked_vertices}: unmatched {len(self.unmatched)}, "
                f"doubled {len(self.doubled)}, cover {len(self.cover)}, "
                f"angle sums {len(self.angles)}, corner angles {len(self.bad_angles)}")


ALLOWED_ANGLES = {8, 16, 10, 14, 7, 17}  # 2pi/3, 4pi/3, 5pi/6, 7pi/6, 7pi/12, 17pi/12


def interior_cells(cells: set, depth: int = 1) -> set:
    cur = set(cells)
    for _ in range(depth):
        cur = {c for c in cur if all((c[0] + dq, c[1] + dr) in cur for dq, dr in DIRS)}
    return cur


def _in_hex(frame: Frame, cell, pt, k: int = 1) -> bool:
    """Point ``pt / k`` in the closed hexagon of ``cell`` (exact)."""
    for d in range(6):
        a, b = frame.edge_ends(cell[0], cell[1], d)
        if _zsign(_cross(_vsub(b, a), _vsub(pt, _vscale(k, a)))) < 0:
            return False
    return True


def _nearest_cell(q: float, r: float):
    """Axial rounding through cube coordinates."""
    x, z = q, r
    y = -x - z
    rx, ry, rz = round(x), round(y), round(z)
    dx, dy, dz = abs(rx - x), abs(ry - y), abs(rz - z)
    if dx > dy and dx > dz:
        rx = -ry - rz
    elif dy <= dz:
        rz = -rx - ry
    return (rx, rz)


def _cell_of(frame: Frame, pt) -> set:
    """Cells whose closed hexagon may contain ``pt``."""
    x, y = _approx(pt[0], frame.scale), _approx(pt[1], frame.scale)
    r = -2 * y / 3
    q = x / SQ3 - r / 2
    qi, ri = round(q), round(r)
    return {(qi + dq, ri + dr) for dq in (-1, 0, 1) for dr in (-1, 0, 1)}


def _point_in_polygon(poly: TilePolygon, pt) -> int:
    """1 strictly inside, 0 on the boundary, -1 outside (exact crossing count)."""
    inside = False
    S = poly.scale
    py = pt[1]
    fy = _approx(py, S)
    eps = 1e-9
    for a, b in poly.edges():
        ya, yb = _approx(a[1], S), _approx(b[1], S)
        if (ya > fy + eps and yb > fy + eps) or (ya < fy - eps and yb < fy - eps):
            continue  # edge entirely above or below the ray
        ab = _vsub(b, a)
        ap = _vsub(pt, a)
        cr = _zsign(_cross(ab, ap))
        if cr == 0 and _zsign(_dot(ab, ap)) >= 0 and _zsign(_dot(_vsub(a, b), _vsub(pt, b))) >= 0:
            return 0
        up = _zsign(_zsub(a[1], py)) > 0
        bu = _zsign(_zsub(b[1], py)) > 0
        if up != bu:
            s = _zsign(_zsub(b[1], a[1]))
            if cr * s > 0:
                inside = not inside
    return 1 if inside else -1


def verify_planar(pset: PositionedSet, region: set | None = None) -> PlanarReport:
    """Check that the pieces tile the region of hex cells exactly.

    Every boundary segment touching the region must be matched by the same
    segment reversed on exactly one other piece, and every region cell centre
    must be covered once. Matching on every segment keeps the coverage count
    constant across the region, so the two together rule out both overlaps and
    holes. Corner angles and vertex angle sums are checked as well.
    """
    frame = pset.frame
    region = interior_cells(pset.cells) if region is None else set(region)
    rep = PlanarReport(region_cells=len(region))
    seen: dict = {}
    vertex_angles: dict = defaultdict(int)
    near = {}

    def in_region(pt, k=1):
        key = (pt, k)
        if key not in near:
            x, y = _approx(pt[0], frame.scale * k), _approx(pt[1], frame.scale * k)
            r = -2 * y / 3
            q = x / SQ3 - r / 2
            qi, ri = _nearest_cell(q, r)
            cand = [c for c in ((qi, ri),) + tuple((qi + dq, ri + dr) for dq, dr in DIRS)
                    if math.hypot(x - SQ3 * (c[0] + c[1] / 2), y + 1.5 * c[1]) < 1.001]
            inside = [c in region for c in cand]
            if all(inside) or not any(inside):
                near[key] = inside[0]
            else:
                near[key] = any(c in region and _in_hex(frame, c, pt, k) for c in cand)
        return near[key]

    if region:
        cx = [SQ3 * (q + r / 2) for q, r in region]
        cy = [-1.5 * r for q, r in region]
        rx0, rx1, ry0, ry1 = min(cx) - 1.01, max(cx) + 1.01, min(cy) - 1.01, max(cy) + 1.01
    else:
        rx0 = ry0 = 1.0
        rx1 = ry1 = -1.0
    S = frame.scale

    def maybe(pt, k=1):
        x, y = _approx(pt[0], S * k), _approx(pt[1], S * k)
        return rx0 <= x <= rx1 and ry0 <= y <= ry1

    for k, poly in enumerate(pset.pieces):
        angs = poly.angles()
        pts = poly.points
        for m, (a, b) in enumerate(poly.edges()):
            mid2 = _vadd(a, b)  # midpoint, in doubled coordinates
            if not maybe(mid2, 2) or not in_region(mid2, 2):
                continue
            rep.checked_segments += 1
            key = (a, b)
            if key in seen:
                rep.doubled.append((k, seen[key], _float_pt(a, frame), _float_pt(b, frame)))
            seen[key] = k
        for m, pt in enumerate(pts):
            if angs[m] not in ALLOWED_ANGLES:
                rep.bad_angles.append((k, _float_pt(pt, frame), angs[m]))
            if maybe(pt) and in_region(pt):
                vertex_angles[pt] += angs[m]
    for (a, b), k in seen.items():
        if seen.get((b, a)) is None:
            rep.unmatched.append((k, _float_pt(a, frame), _float_pt(b, frame)))
    short = {pt for pt, tot in vertex_angles.items() if tot != 24}
    if short:
        # T-junctions: a vertex inside another piece's edge adds a straight angle
        cell = 1.0 / frame.M
        grid = defaultdict(list)
        for a, b in seen:
            xa, ya = _float_pt(a, frame)
            xb, yb = _float_pt(b, frame)
            for gx in range(int(math.floor(min(xa, xb) / cell)), int(math.floor(max(xa, xb) / cell)) + 1):
                for gy in range(int(math.floor(min(ya, yb) / cell)), int(math.floor(max(ya, yb) / cell)) + 1):
                    grid[(gx, gy)].append((a, b))
        for pt in short:
            x, y = _float_pt(pt, frame)
            hits = {seg for dx in (-1, 0, 1) for dy in (-1, 0, 1)
                    for seg in grid.get((int(math.floor(x / cell)) + dx, int(math.floor(y / cell)) + dy), ())}
            if any(_on_open_segment(a, b, pt) for a, b in hits):
                vertex_angles[pt] += 12
    for pt, tot in vertex_angles.items():
        rep.checked_vertices += 1
        if tot != 24:
            rep.angles.append((_float_pt(pt, frame), tot))
    boxes = [p.bbox() for p in pset.pieces]
    for c in sorted(region):
        ctr = frame.center(*c)
        x, y = _approx(ctr[0], frame.scale), _approx(ctr[1], frame.scale)
        hits = 0
        for poly, (x0, y0, x1, y1) in zip(pset.pieces, boxes):
            if x0 <= x <= x1 and y0 <= y <= y1 and _point_in_polygon(poly, ctr) == 1:
                hits += 1
        if hits != 1:
            rep.cover.append((c, hits))
    return rep


def _on_open_segment(a, b, pt) -> bool:
    ab, ap = _vsub(b, a), _vsub(pt, a)
    if _zsign(_cross(ab, ap)) != 0 or pt in (a, b):
        return False
    return _zsign(_dot(ab, ap)) > 0 and _zsign(_dot(_vsub(a, b), _vsub(pt, b))) > 0


def _half_approx(v):
    # only used for the float cell lookup
    return ((v[0][0] // 2, v[0][1] // 2), (v[1][0] // 2, v[1][1] // 2))


def _float_pt(pt, frame):
    return (round(_approx(pt[0], frame.scale), 6), round(_approx(pt[1], frame.scale), 6))


def hex_distance(a, b) -> int:
    dq, dr = a[0] - b[0], a[1] - b[1]
    return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


def local_patch(patch: list[StickPlacement], n: int, focus=None, radius: int = 2):
    """Sticks meeting the hex disk of ``radius`` about ``focus``.

    Full-size sticks are too long to realise whole, so toy-mode checks work on
    the sticks around one spot. The default focus is the foot of the first
    vertical stick, where stacks and gap sticks meet. Returns
    ``(focus, sticks, disk)``.
    """
    if focus is None:
        vert = [p for p in patch if p.rot % 3 == 2]
        focus = vert[0].cells(n)[0] if vert else patch[len(patch) // 2].cells(n)[0]
    chosen = [p for p in patch if any(hex_distance(c, focus) <= radius for c in p.cells(n))]
    disk = {c for p in chosen for c in p.cells(n) if hex_distance(c, focus) <= radius}
    return tuple(focus), chosen, disk


def staple_orientations(pset: PositionedSet) -> set[int]:
    """Distinct staple rotations, in 15-degree units modulo the 12-gon's 30-degree symmetry."""
    out = set()
    for p in pset.pieces:
        if p.kind == "staple":
            out.add(direction_index(_vsub(p.points[1], p.points[0])) % 2)
    return out


def area_balance(pset: PositionedSet, enc: SpotEncoding, placements) -> tuple[QS3, QS3]:
    """(sum of piece areas, hex area adjusted for notches on uncovered edges)."""
    n, frame = pset.n, pset.frame
    total = QS3()
    for p in pset.pieces:
        total = total + p.area()
    hexa = QS3(0, Fraction(3, 2))
    half = QS3(Fraction(3, 2) * Fraction(1, 16 * frame.M * frame.M))  # 12-gon area 3R^2, R = 1/(4M)
    expect = hexa * (n * len(placements))
    occupied = pset.cells
    for p in placements:
        for idx, a, b, cell, d in _stick_edges(frame, p):
            other = (cell[0] + DIRS[d][0], cell[1] + DIRS[d][1])
            if other in occupied:
                continue
            bumps = sum(enc.bits[idx - 1])
            expect = expect + half * (bumps - (frame.M - bumps))
    return total, expect


# ---------------------------------------------------------------------------
# staple


def staple_surround_check(max_wedges: int = 6) -> dict:
    """Search for a way to surround a point with staples only.

    Around any vertex of a staple tiling, each staple meets the point either
    at a corner (150 degrees) or along the inside of an edge (180 degrees).
    Every ordered sequence of such wedges with at least one corner is tried,
    up to ``max_wedges`` long; a tiling vertex needs the wedges to close up at
    exactly 360 degrees. Angles are in 15-degree units.
    """
    corner, flat, full = 10, 12, 24
    found, nodes = [], 0

    def extend(seq, total):
        nonlocal nodes
        nodes += 1
        if total == full and "corner" in seq:
            found.append(tuple(seq))
        if total >= full or len(seq) == max_wedges:
            return
        for kind, w in (("corner", corner), ("flat", flat)):
            extend(seq + [kind], total + w)

    extend([], 0)
    return {"configurations": found, "nodes": nodes}


# ---------------------------------------------------------------------------
# SVG


def emit_svg(pset: PositionedSet | None, precision: int = 4, scale: float = 40.0,
             violations=(), max_points: int = 200_000, focus=None) -> str:
    """Render pieces as SVG paths. Above ``max_points`` sticks are drawn as
    plain hex outlines and only staples within 3 units of ``focus`` (an xy
    pair) are kept, so large toy patches stay viewable."""
    pieces = pset.pieces if pset else []
    S = pset.frame.scale if pset else 1
    coarse = sum(len(p.points) for p in pieces) > max_points
    xs, ys = [], []
    paths = {"stick": [], "staple": []}
    for poly in pieces:
        pts = poly.points
        if coarse and poly.kind == "stick":
            pts = pts[::poly.meta.get("stride", 1)]
        coords = [(_approx(x, S) * scale, -_approx(y, S) * scale) for x, y in pts]
        if coarse and poly.kind == "staple" and focus is not None:
            if math.hypot(coords[0][0] / scale - focus[0], -coords[0][1] / scale - focus[1]) > 3:
                continue
        xs += [c[0] for c in coords]
        ys += [c[1] for c in coords]
        d = "M " + " L ".join(f"{x:.{precision}f} {y:.{precision}f}" for x, y in coords) + " Z"
        paths.setdefault(poly.kind, []).append(d)
    if xs:
        x0, y0, x1, y1 = min(xs) - 5, min(ys) - 5, max(xs) + 5, max(ys) + 5
    else:
        x0 = y0 = 0
        x1 = y1 = 10
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           f'viewBox="{x0:.{precision}f} {y0:.{precision}f} {x1 - x0:.{precision}f} {y1 - y0:.{precision}f}">']
    styles = {"stick": 'fill="#d9c8a9" stroke="#333" stroke-width="0.05"',
              "staple": 'fill="#3a6ea5" stroke="none"'}
    for kind in ("stick", "staple"):
        out.append(f'<g id="{kind}s" {styles[kind]}>')
        out += [f'<path d="{d}"/>' for d in paths.get(kind, [])]
        out.append("</g>")
    out.append('<g id="violations" fill="red">')
    for x, y in violations:
        out.append(f'<circle cx="{x * scale:.{precision}f}" cy="{-y * scale:.{precision}f}" r="0.5"/>')
    out.append("</g></svg>")
    return "\n".join(out)

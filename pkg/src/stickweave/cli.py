"""Command line: compile the pipeline stage by stage, verify artifacts, run solvers.

Exit codes: 0 pass, 2 verification failure, 3 cap exceeded, 4 malformed input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .ab import (ABInstance, compile_wang_to_ab, require_bijection,
                 solve_ab_torus)
from .compiler import build_state_table, decode_assignment_to_ab, fill_assignment_from_ab
from .errors import CapExceeded, DecodeError, MalformedInput, StickweaveError, VerificationFailure
from .schematic import (GapAssignment, Schematic, StateTable, assignment_to_schematic,
                        check_gap_conditions, crop_assignment, random_window, validate_schematic)
from .stick import (DIRS, MatchingRuleSet, backtracking_tiler, check_patch, load_patch,
                    orientation_census, save_patch, synthesize_weave, weave_rules)
from .wang import WangInstance, solve_wang_torus

STAGES = ("wang", "ab", "table", "assignment", "schematic", "patch", "geometry")
EXIT_OK, EXIT_FAIL, EXIT_CAP, EXIT_MALFORMED = 0, 2, 3, 4
TOY_MAX_N = 60


@dataclass
class PipelineConfig:
    input: Path
    start: str = "wang"
    stop: str = "geometry"
    torus: tuple[int, int] = (1, 1)
    window: tuple[int, int] = (2, 1)
    cap: int = 100_000
    max_cells: int = 2_000_000
    toy: bool = False
    focus: tuple[int, int] | None = None
    radius: int = 2
    out: Path = Path("out")
    seed: int = 0
    table: Path | None = None
    rules: Path | None = None

    def __post_init__(self):
        if self.start not in STAGES or self.stop not in STAGES:
            raise MalformedInput(f"stages are {', '.join(STAGES)}")
        if STAGES.index(self.start) > STAGES.index(self.stop):
            raise MalformedInput(f"--from {self.start} comes after --to {self.stop}")
        if self.cap < 1 or self.max_cells < 1 or self.radius < 0:
            raise MalformedInput("caps must be positive")
        if min(self.torus) < 1 or min(self.window) < 1:
            raise MalformedInput("sizes must be positive")

    def stages(self) -> list[str]:
        return list(STAGES[STAGES.index(self.start):STAGES.index(self.stop) + 1])


def _size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _pair(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(",")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected Q,R, got {text!r}") from None


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise MalformedInput(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: not JSON ({exc})") from None


def _write(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)


# ---------------------------------------------------------------------------
# compile


class Pipeline:
    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.wang = self.ab = self.compiled = self.table = None
        self.tiling = self.assignment = self.schematic = self.patch = self.rules = None
        self.report: dict = {"stages": []}

    def note(self, stage: str, **info) -> None:
        self.report["stages"].append({"stage": stage, **info})

    def load_first(self) -> None:
        cfg, start = self.cfg, self.cfg.start
        data = _load_json(cfg.input)
        if start == "wang":
            self.wang = WangInstance.from_json(data)
        elif start == "ab":
            self.ab = ABInstance.from_json(data)
        elif start == "table":
            self.table = StateTable.from_json(data)
        elif start == "assignment":
            self.assignment = GapAssignment.from_json(data)
            self.table = self._side_table()
        elif start == "schematic":
            self.schematic = Schematic.from_json(data)
            self.table = self._side_table()
        elif start == "patch":
            self.patch = load_patch(cfg.input)
            if cfg.rules is None:
                raise MalformedInput("--from patch needs --rules")
            self.rules = MatchingRuleSet.from_json(_load_json(cfg.rules))
        else:
            raise MalformedInput("geometry is a final stage; use verify planarity")
        self.note(start, input=str(cfg.input))

    def _side_table(self) -> StateTable:
        if self.cfg.table is None:
            raise MalformedInput(f"--from {self.cfg.start} needs --table")
        return StateTable.from_json(_load_json(self.cfg.table))

    def run(self) -> dict:
        self.load_first()
        for stage in self.cfg.stages()[1:]:
            getattr(self, "make_" + stage)()
        return self.report

    def make_ab(self):
        ab = compile_wang_to_ab(self.wang)
        if len(ab.a_tiles) != self.wang.n or len(ab.b_tiles) != self.wang.n:
            raise VerificationFailure("AB instance does not have |A| = |B| = n")
        w, h = self.cfg.torus
        rep = require_bijection(self.wang, w, h, self.cfg.cap)
        self.ab = ab
        _write(self.cfg.out / "ab.json", ab.to_json())
        self.note("ab", tiles=len(ab.a_tiles), torus=[w, h], wang_count=rep.wang_count,
                  ab_count=rep.ab_count)

    def make_table(self):
        self.compiled = build_state_table(self.ab)
        self.table = self.compiled.table
        data = self.compiled.to_json()
        if StateTable.from_json(data) != self.table:
            raise VerificationFailure("state table does not survive a JSON round trip")
        _write(self.cfg.out / "table.json", data)
        self.note("table", s=self.table.s, v=self.table.v, n_block=self.table.n_block)

    def make_assignment(self):
        if self.compiled is not None:
            w, h = self.cfg.torus
            tilings = solve_ab_torus(self.ab, w, h, self.cfg.cap)
            if not tilings:
                raise VerificationFailure(f"the AB instance has no tiling of the {w}x{h} torus")
            self.tiling = self.rng.choice(tilings)
            self.assignment = fill_assignment_from_ab(self.compiled, self.tiling)
            if decode_assignment_to_ab(self.compiled, self.assignment).key() != self.tiling.key():
                raise VerificationFailure("decoding the filled assignment does not return the tiling")
            _write(self.cfg.out / "ab_tiling.json", self.tiling.to_json())
        else:
            rows, cols = self.cfg.window
            self.assignment = random_window(self.table, rows, cols, self.rng).assignment()
        bad = check_gap_conditions(self.assignment, self.table)
        if bad:
            raise VerificationFailure("assignment breaks the gap conditions", [str(v) for v in bad])
        _write(self.cfg.out / "assignment.json", self.assignment.to_json())
        self.note("assignment", rows=len(self.assignment.rows),
                  periodic=bool(self.assignment.period))

    def make_schematic(self):
        assign = self.assignment
        if assign.period:
            rows, cols = self.cfg.window
            assign = crop_assignment(assign, rows, cols)
        self.schematic = assignment_to_schematic(assign, self.table)
        bad = validate_schematic(self.schematic, self.table)
        if bad:
            raise VerificationFailure("schematic breaks the marking rules", [str(v) for v in bad])
        _write(self.cfg.out / "schematic.json", self.schematic.to_json())
        self.note("schematic", rows=len(self.schematic.rows), n_block=self.schematic.n_block)

    def make_patch(self):
        n = self.schematic.n_block + 1
        blocks = sum(len(r.block_starts) for r in self.schematic.rows)
        cells = blocks * n * n + sum(L + R for r in self.schematic.rows for L, R in r.gaps) * n
        if cells > self.cfg.max_cells:
            raise CapExceeded(self.cfg.max_cells, [])
        self.patch = synthesize_weave(self.schematic, self.table)
        self.rules = weave_rules(self.table)
        bad = check_patch(self.patch, self.rules)
        if bad:
            raise VerificationFailure("weave breaks the matching rules", [str(v) for v in bad[:20]])
        census = orientation_census(self.patch)
        save_patch(self.patch, self.cfg.out / "patch.json")
        _write(self.cfg.out / "rules.json", self.rules.to_json())
        self.note("patch", sticks=len(self.patch), n=n, orientations=sorted(census))

    def make_geometry(self):
        rep = planarity(self.patch, self.rules, self.cfg)
        self.note("geometry", **rep)
        if not rep["ok"]:
            raise VerificationFailure("planarity check failed: " + rep["summary"])


def planarity(patch, rules: MatchingRuleSet, cfg: PipelineConfig) -> dict:
    """Build the toy-mode shapes around a focus cell and check they tile exactly."""
    from .geometry import (build_polygons, emit_svg, encode_spots, instantiate_patch,
                           interior_cells, local_patch, save_polygons, verify_planar)
    n = rules.n
    if not cfg.toy:
        raise MalformedInput("geometry runs only in toy mode (--toy)")
    if n > TOY_MAX_N:
        raise MalformedInput(f"stick length {n} is above the toy limit {TOY_MAX_N}")
    enc = encode_spots(rules)
    focus, chosen, disk = local_patch(patch, n, cfg.focus, cfg.radius)
    if not chosen:
        raise MalformedInput(f"no stick near focus {focus}")
    pset = instantiate_patch(chosen, enc, rules)
    region = interior_cells(pset.cells) & disk
    if not region:
        raise MalformedInput(f"no interior cells within {cfg.radius} of {focus}")
    rep = verify_planar(pset, region)
    cfg.out.mkdir(parents=True, exist_ok=True)
    save_polygons(build_polygons(n, enc), cfg.out / "polygons.json")
    with open(cfg.out / "geometry.svg", "w") as fh:
        fx = (3 ** 0.5 * (focus[0] + focus[1] / 2), -1.5 * focus[1])
        fh.write(emit_svg(pset, violations=[p for _, p, _ in rep.unmatched[:200]], focus=fx))
    out = {"ok": rep.ok, "summary": rep.summary(), "focus": list(focus), "sticks": len(chosen),
           "staples": pset.count("staple"), "region_cells": rep.region_cells,
           "unmatched": len(rep.unmatched), "doubled": len(rep.doubled),
           "cover_faults": len(rep.cover), "angle_faults": len(rep.angles) + len(rep.bad_angles)}
    _write(cfg.out / "planar_report.json", out)
    return out


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> dict:
    kind = args.kind
    if kind == "bijection":
        wang = WangInstance.from_json(_load_json(args.files[0]))
        w, h = args.torus
        rep = require_bijection(wang, w, h, args.cap)
        return {"check": kind, "ok": True, **rep.to_json()}
    if kind == "roundtrip":
        ab = ABInstance.from_json(_load_json(args.files[0]))
        compiled = build_state_table(ab)
        w, h = args.torus
        tilings = solve_ab_torus(ab, w, h, args.cap)
        for t in tilings:
            back = decode_assignment_to_ab(compiled, fill_assignment_from_ab(compiled, t))
            if back.key() != t.key():
                raise VerificationFailure(f"round trip changed tiling {t.key()}")
        return {"check": kind, "ok": True, "tilings": len(tilings)}
    table = StateTable.from_json(_load_json(args.table)) if args.table else None
    if kind == "gaps":
        if table is None:
            raise MalformedInput("verify gaps needs --table")
        assign = GapAssignment.from_json(_load_json(args.files[0]))
        bad = check_gap_conditions(assign, table)
        if bad:
            raise VerificationFailure("gap conditions violated", [str(v) for v in bad])
        return {"check": kind, "ok": True, "gaps": sum(len(r.gaps) for r in assign.rows.values())}
    if kind == "decode":
        ab = ABInstance.from_json(_load_json(args.files[0]))
        compiled = build_state_table(ab)
        assign = GapAssignment.from_json(_load_json(args.files[1]))
        bad = check_gap_conditions(assign, compiled.table)
        if bad:
            raise VerificationFailure("gap conditions violated", [str(v) for v in bad])
        tiling = decode_assignment_to_ab(compiled, assign)
        return {"check": kind, "ok": True, "tiling": tiling.to_json()}
    if kind == "schematic":
        if table is None:
            raise MalformedInput("verify schematic needs --table")
        bad = validate_schematic(Schematic.from_json(_load_json(args.files[0])), table)
        if bad:
            raise VerificationFailure("schematic violations", [str(v) for v in bad])
        return {"check": kind, "ok": True}
    if kind == "equivalence":
        from .schematic import assignment_key, enumerate_windows, gap_valid_assignments
        if table is None:
            raise MalformedInput("verify equivalence needs --table")
        rows, cols = args.window
        decoded = {assignment_key(w.assignment()) for w in enumerate_windows(table, rows, cols, args.cap)}
        direct = {assignment_key(a) for a in gap_valid_assignments(table, rows, cols)}
        if decoded != direct:
            raise VerificationFailure("schematic windows and gap-valid assignments differ",
                                      [f"{len(decoded - direct)} only decoded",
                                       f"{len(direct - decoded)} only gap-valid"])
        return {"check": kind, "ok": True, "windows": len(decoded)}
    if kind in ("patch", "planarity"):
        if args.rules is None:
            raise MalformedInput(f"verify {kind} needs --rules")
        rules = MatchingRuleSet.from_json(_load_json(args.rules))
        patch = load_patch(args.files[0])
        bad = check_patch(patch, rules)
        if bad:
            raise VerificationFailure("matching-rule violations", [str(v) for v in bad[:20]])
        if kind == "patch":
            return {"check": kind, "ok": True, "sticks": len(patch),
                    "orientations": sorted(orientation_census(patch))}
        cfg = PipelineConfig(Path(args.files[0]), "patch", "geometry", toy=args.toy,
                             focus=args.focus, radius=args.radius, out=Path(args.out))
        rep = planarity(patch, rules, cfg)
        if not rep["ok"]:
            raise VerificationFailure("planarity check failed: " + rep["summary"])
        return {"check": kind, **rep}
    raise MalformedInput(f"unknown check {kind}")


# ---------------------------------------------------------------------------
# solve


def _region(spec: str) -> list[tuple[int, int]]:
    if spec.startswith("hex:"):
        opts = dict(kv.split("=") for kv in spec[4:].split(","))
        rad = int(opts.get("radius", 1))
        q0, r0 = int(opts.get("q", 0)), int(opts.get("r", 0))
        return [(q0 + q, r0 + r) for q in range(-rad, rad + 1) for r in range(-rad, rad + 1)
                if abs(q) + abs(r) + abs(q + r) <= 2 * rad]
    return [tuple(c) for c in _load_json(spec)]


def cmd_solve(args) -> dict:
    w, h = args.torus
    if args.oracle == "wang":
        inst = WangInstance.from_json(_load_json(args.files[0]))
        found = solve_wang_torus(inst, w, h, args.cap)
        data = [list(t.assignment) for t in found]
    elif args.oracle == "ab":
        ab = ABInstance.from_json(_load_json(args.files[0]))
        found = solve_ab_torus(ab, w, h, args.cap)
        data = [t.to_json() for t in found]
    else:
        if args.rules is None or args.region is None:
            raise MalformedInput("solve stick needs --rules and --region")
        rules = MatchingRuleSet.from_json(_load_json(args.rules))
        seeds = load_patch(args.files[0]) if args.files else []
        # seeds may come from a larger patch; keep the ones touching the region
        region = _region(args.region)
        near = {(c[0] + d[0], c[1] + d[1]) for c in region for d in tuple(DIRS) + ((0, 0),)}
        seeds = [p for p in seeds if any(c in near for c in p.cells(rules.n))]
        found = backtracking_tiler(region, rules, seeds, cap=args.cap)
        data = [[p.to_json() for p in comp] for comp in found]
    _write(Path(args.out) / f"{args.oracle}_tilings.json", data)
    return {"oracle": args.oracle, "count": len(data), "torus": [w, h]}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="stickweave", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--torus", type=_size, default=(1, 1), metavar="WxH")
        p.add_argument("--window", type=_size, default=(2, 1), metavar="ROWSxCOLS")
        p.add_argument("--cap", type=int, default=100_000)
        p.add_argument("--toy", action="store_true")
        p.add_argument("--focus", type=_pair, default=None, metavar="Q,R")
        p.add_argument("--radius", type=int, default=2)
        p.add_argument("--out", default="out")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--table")
        p.add_argument("--rules")

    c = sub.add_parser("compile", help="run pipeline stages")
    c.add_argument("input")
    c.add_argument("--from", dest="start", default="wang", choices=STAGES)
    c.add_argument("--to", dest="stop", default="geometry", choices=STAGES)
    c.add_argument("--max-cells", type=int, default=2_000_000)
    common(c)

    v = sub.add_parser("verify", help="check an artifact")
    v.add_argument("kind", choices=["bijection", "roundtrip", "gaps", "decode", "schematic",
                                    "equivalence", "patch", "planarity"])
    v.add_argument("files", nargs="+")
    common(v)

    s = sub.add_parser("solve", help="run a bounded solver")
    s.add_argument("oracle", choices=["wang", "ab", "stick"])
    s.add_argument("files", nargs="*")
    s.add_argument("--region")
    common(s)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compile":
            cfg = PipelineConfig(Path(args.input), args.start, args.stop, args.torus, args.window,
                                 args.cap, args.max_cells, args.toy, args.focus, args.radius,
                                 Path(args.out), args.seed,
                                 Path(args.table) if args.table else None,
                                 Path(args.rules) if args.rules else None)
            pipe = Pipeline(cfg)
            try:
                report = pipe.run()
            except StickweaveError as exc:
                pipe.report["error"] = str(exc)
                _write(cfg.out / "report.json", pipe.report)
                raise
            _write(cfg.out / "report.json", report)
        elif args.command == "verify":
            report = cmd_verify(args)
        else:
            report = cmd_solve(args)
    except CapExceeded as exc:
        print(json.dumps({"status": "CAP", "error": str(exc), "partial": len(exc.partial)}))
        return EXIT_CAP
    except (VerificationFailure, DecodeError) as exc:
        out = {"status": "FAIL", "error": str(exc)}
        if getattr(exc, "violations", None):
            out["violations"] = list(exc.violations)[:20]
        print(json.dumps(out))
        return EXIT_FAIL
    except (MalformedInput, KeyError, TypeError, ValueError) as exc:
        print(json.dumps({"status": "MALFORMED", "error": str(exc)}))
        return EXIT_MALFORMED
    print(json.dumps({"status": "PASS", **report}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 failed check or no convergence, 2 unreadable or
malformed input, 3 a prerequisite stage failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cubing import (EdgePath, P_MINUS, P_PLUS, build_cubing, check_npc,
                     essential_edges_report)
from .diagram import Diagram, DiagramError, label_quadrants, parse_pd, validate
from .potential import NoConvergence, SolverOptions, build_potential, solve
from .triangulation import TooFewCrossings, build_octahedral, collapse

OK, FAILED, PARSE_ERROR, PRECONDITION = 0, 1, 2, 3


class StageError(Exception):
    def __init__(self, code: int, message: str, payload: dict | None = None):
        super().__init__(message)
        self.code = code
        self.payload = payload or {}


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _load(path) -> Diagram:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise StageError(PARSE_ERROR, f"cannot read {path}: {exc}")
    try:
        return parse_pd(text)
    except DiagramError as exc:
        raise StageError(PARSE_ERROR, f"{path}: {type(exc).__name__}: {exc}")


def _labeled(args, require_valid=True):
    d = _load(args.path)
    report = validate(d)
    if require_valid and not report.ok and not args.force:
        raise StageError(PRECONDITION, "diagram failed validation (use --force to override)",
                         {"validation": report.to_dict()})
    try:
        q = label_quadrants(d, args.basepoint)
    except DiagramError as exc:
        raise StageError(PRECONDITION, f"{type(exc).__name__}: {exc}")
    return d, q


def _npc(q):
    cc = build_cubing(q)
    return cc, check_npc(cc, q.region_color)


def _edges(cc, q, inject_delta=None):
    extra = None
    if inject_delta is not None:
        extra = [EdgePath("delta", inject_delta, (("A", 1), ("R", inject_delta), ("B", q.c)),
                          (P_PLUS, P_MINUS))]
    return essential_edges_report(cc, q, extra)


def cmd_check(args) -> int:
    d = _load(args.path)
    report = validate(d)
    payload = {"path": str(args.path), "crossings": d.crossing_count,
               "components": d.components, **report.to_dict()}
    text = "\n".join(f"{k}: {v}" for k, v in payload.items())
    _emit(args, payload, text)
    return OK if report.ok else FAILED


def cmd_npc(args) -> int:
    _, q = _labeled(args)
    _, rep = _npc(q)
    payload = rep.to_dict()
    lines = [f"npc: {rep.npc}", f"double_npc: {rep.double_npc}"]
    lines += [f"failure: {f}" for f in rep.failures]
    _emit(args, payload, "\n".join(lines))
    return OK if rep.npc else FAILED


def cmd_edges(args) -> int:
    _, q = _labeled(args)
    cc, rep = _npc(q)
    if not rep.npc:
        raise StageError(PRECONDITION, "cubing is not non-positively curved", rep.to_dict())
    out = _edges(cc, q, args.inject_delta)
    lines = [f"essential: {out['essential']}"]
    for fam, items in out["families"].items():
        bad = [e for e in items if not e["local_geodesic"]]
        lines.append(f"{fam}: {len(items)} paths, {len(bad)} failing")
        lines += [f"  {fam}_{e['index']}: {e.get('certificate')}" for e in bad]
    _emit(args, out, "\n".join(lines))
    return OK if out["essential"] else FAILED


def _solve(args, q):
    if not args.skip_checks:
        cc, rep = _npc(q)
        if not rep.npc:
            raise StageError(PRECONDITION, "cubing is not non-positively curved", rep.to_dict())
        if not _edges(cc, q)["essential"]:
            raise StageError(PRECONDITION, "some ideal edge is not certified essential")
    try:
        it = collapse(build_octahedral(q), q)
    except TooFewCrossings as exc:
        raise StageError(PRECONDITION, str(exc))
    ps = build_potential(it, q)
    opts = SolverOptions(tol=args.tol, seed=args.seed, restarts=args.restarts)
    try:
        return solve(ps, opts)
    except NoConvergence as exc:
        raise StageError(FAILED, str(exc), {"seed": args.seed})


def cmd_solve(args) -> int:
    _, q = _labeled(args)
    sol = _solve(args, q)
    payload = sol.to_dict()
    text = "\n".join([
        f"crossings: {sol.crossings}",
        f"tetrahedra: {sol.gamma_size}",
        f"volume: {sol.volume:.12f}",
        f"cs_mod_pi2: {sol.cs_mod_pi2:.12f}",
        f"residual: {sol.residual:.3e}",
        f"seed: {sol.seed}",
    ] + ([] if sol.geometric else ["warning: solution is not geometric"]))
    _emit(args, payload, text)
    return OK


def _batch_row(args, path: Path) -> dict:
    row = {"name": path.stem}
    sub = argparse.Namespace(**{**vars(args), "path": path, "skip_checks": True})
    try:
        d, q = _labeled(sub)
        row["c"] = d.crossing_count
        cc, rep = _npc(q)
        row["npc"] = rep.npc
        row["essential"] = _edges(cc, q)["essential"]
        sol = _solve(sub, q)
        row.update(gamma=sol.gamma_size, volume=sol.volume, cs=sol.cs_mod_pi2,
                   residual=sol.residual, ok=row["npc"] and row["essential"])
    except StageError as exc:
        row.update(ok=False, error=str(exc), code=exc.code)
    return row


def cmd_batch(args) -> int:
    folder = Path(args.path)
    if not folder.is_dir():
        raise StageError(PARSE_ERROR, f"{folder} is not a directory")
    rows = [_batch_row(args, p) for p in sorted(folder.glob("*.pd"), key=lambda p: p.stem)]
    lines = []
    for r in rows:
        if "error" in r:
            lines.append(f"{r['name']:<10} error: {r['error']}")
        else:
            lines.append(f"{r['name']:<10} c={r['c']:<3d} |Gamma|={r['gamma']:<3d} npc={r['npc']} "
                         f"essential={r['essential']} volume={r['volume']:.10f} "
                         f"cs={r['cs']:.10f} residual={r['residual']:.1e}")
    text = "\n".join([f"seed: {args.seed}"] + (lines or ["(no diagrams)"]))
    _emit(args, {"seed": args.seed, "rows": rows}, text)
    return OK if all(r["ok"] for r in rows) else FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altcubing",
        description="Cubings, ideal triangulations and volumes of alternating link diagrams.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, solver=False, basepoint=True):
        p.add_argument("path", type=Path)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if basepoint:
            p.add_argument("--basepoint", type=int, default=None,
                           help="arc label used as P_0 (default: smallest admissible)")
        p.add_argument("--force", action="store_true",
                       help="continue past failed validation flags")
        if solver:
            p.add_argument("--tol", type=float, default=1e-12)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--restarts", type=int, default=16)
            p.add_argument("--skip-checks", action="store_true",
                           help="do not run the curvature and edge checks first")

    p = sub.add_parser("check", help="validate a PD file")
    common(p)
    p.set_defaults(func=cmd_check)
    p = sub.add_parser("npc", help="Gromov link condition for the cubing")
    common(p)
    p.set_defaults(func=cmd_npc)
    p = sub.add_parser("edges", help="certify that every ideal edge is essential")
    common(p)
    p.add_argument("--inject-delta", type=int, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_edges)
    p = sub.add_parser("solve", help="volume and Chern-Simons invariant")
    common(p, solver=True)
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("batch", help="run the whole pipeline on every *.pd file in a directory")
    common(p, solver=True, basepoint=False)
    p.set_defaults(func=cmd_batch, basepoint=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        if getattr(args, "json", False):
            print(json.dumps({"error": str(exc), "code": exc.code, **exc.payload},
                             indent=2, sort_keys=True))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

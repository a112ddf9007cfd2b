"""Command line interface: ``tenttile list|info|render|dimension|boundary|tiling|correspond|verify-all``.

Reports go to stdout as JSON (``"schema": 1``); files go to ``--out``.
Exit codes: 0 success, 1 a verification failed, 2 usage error.
"""
from __future__ import annotations

import argparse
from dataclasses import asdict, dataclass
import json
from pathlib import Path
import sys

import numpy as np

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    precision: int = 64
    depth: int | None = None  # None: chosen from the resolution
    resolution: int | None = None  # None: per-command default
    window_scale: float = 4.0
    tol: float | None = None
    out: Path = Path(".")
    fmt: str = "json"

    def __post_init__(self):
        for name in ("precision", "depth", "resolution", "window_scale", "tol"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")

    def to_json(self) -> dict:
        out = asdict(self)
        out["out"] = str(self.out)
        return out


def _index(text: str) -> int:
    try:
        i = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer index: {text!r}")
    if not -5 <= i <= 5:
        raise argparse.ArgumentTypeError("index must lie in -5..5")
    return i


def _emit(payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    sys.stdout.write(json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n")


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, Path):
        return str(x)
    return x


def _tent_record(i: int):
    from .numberfield import registry_lookup
    if i == 0:
        raise UsageError("index 0 has no tent-tile")
    return registry_lookup(i)


# -----------------------------------------------------------------------------
# commands


def cmd_list(cfg: RunConfig, args) -> int:
    from .numberfield import all_records
    rows = []
    for r in all_records():
        rows.append({"index": r.index, "value": r.approx_value, "minpoly": r.minpoly.pretty(),
                     "exponent": r.exponent, "partner": r.partner if r.index else None,
                     "tent_tile": r.has_tent_tile})
    if cfg.fmt == "json":
        _emit({"command": "list", "records": rows})
    else:
        print(f"{'i':>3}  {'value':>8}  {'minimal polynomial':<26} {'m_i':>3}  partner")
        for row in rows:
            tail = str(row["partner"]) if row["tent_tile"] else "No tent-tile"
            print(f"{row['index']:>3}  {row['value']:>8}  {row['minpoly']:<26} {row['exponent']:>3}  {tail}")
    return EXIT_OK


def cmd_info(cfg: RunConfig, args) -> int:
    from .reference import TABLE_DIMENSIONS, TILING_STATUS
    from .substitution import substitution_for
    rec = _tent_record(args.index)
    info = {"index": rec.index, "value": rec.approx_value, "minpoly": list(rec.minpoly.coeffs),
            "contracting_dimension": rec.d, "exponent": rec.exponent, "partner": rec.partner,
            "table_dimension": TABLE_DIMENSIONS[rec.index], "tiling_status": TILING_STATUS[rec.index]}
    if abs(rec.index) != 2:
        sigma, corr = substitution_for(rec.index)
        info["substitution"] = {"name": sigma.name, "images": [list(w) for w in sigma.images],
                                "family": corr.family, "parameter": corr.parameter,
                                "quotient_condition": corr.quotient_condition}
    else:
        from .geometry import tent_interval_exact
        info["interval"] = list(tent_interval_exact(rec.index).numeric())
    _emit({"command": "info", **info})
    return EXIT_OK


def cmd_render(cfg: RunConfig, args) -> int:
    from . import export
    from .geometry import render_tent_measure, render_tent_tile, tent_interval_exact
    rec = _tent_record(args.index)
    cfg.out.mkdir(parents=True, exist_ok=True)
    fmt = cfg.fmt
    stem = cfg.out / f"{args.what}_{rec.index}"
    files = []
    if rec.d == 1:
        if args.what != "tent":
            raise UsageError("the quadratic records have no Rauzy model here")
        lo, hi = tent_interval_exact(rec.index).numeric()
        if fmt == "svg":
            files.append(export.write_svg_segment(stem.with_suffix(".svg"), lo, hi))
        elif fmt == "csv":
            files.append(export.write_csv(stem.with_suffix(".csv"), np.array([[lo], [hi]])))
        elif fmt == "json":
            files.append(_write_json(stem.with_suffix(".json"), {"interval": [lo, hi]}))
        else:
            raise UsageError("1-D tiles export as svg, csv or json")
        _emit({"command": "render", "index": rec.index, "what": "tent", "interval": [lo, hi],
               "files": [str(f) for f in files]})
        return EXIT_OK
    if rec.d == 3 and fmt not in ("json", "csv"):
        raise UsageError("3-D tiles export as csv or as a voxel grid (--format json)")
    res = cfg.resolution or (512 if rec.d == 2 else 128)
    labels = None
    if args.what == "tent":
        if cfg.depth is not None:
            cloud = render_tent_tile(rec, depth=cfg.depth, precision=cfg.precision)
        elif rec.d == 3:
            # 3-D pieces are too anisotropic for extent-based leaves; use a few leaves per voxel by mass
            cloud = render_tent_measure(rec, min(0.5, 1.0 / res ** 3), precision=cfg.precision)
        else:
            probe = render_tent_measure(rec, 1e-4, precision=cfg.precision)
            pixel = (probe.diameter() + 2 * probe.cell_size) / res
            cloud = render_tent_tile(rec, target=pixel / 2, precision=cfg.precision)
        pts, cell = cloud.points, cloud.cell_size
    else:
        from .rauzy import depth_for_cell, gifs_for, render_rauzy
        from .geometry import cloud_diameter
        gifs, _ = gifs_for(rec)
        depth = cfg.depth
        if depth is None:
            diam = cloud_diameter(render_rauzy(gifs, 4).union().points)
            depth = depth_for_cell(gifs, diam / res / 2)
        tiles = render_rauzy(gifs, depth)
        pts = np.vstack([c.points for c in tiles.clouds])
        labels = np.concatenate([np.full(len(c), k) for k, c in enumerate(tiles.clouds)])
        cell = tiles.cell_size
    if fmt == "csv":
        files.append(export.write_csv(stem.with_suffix(".csv"), pts, labels))
    elif rec.d == 3:
        grid, lo, c = export.raster(pts, res)
        files.append(export.write_voxels(stem.with_suffix(".vox.json"), grid, lo, c))
    else:
        if labels is not None and fmt == "pgm":
            grid = export.label_grid(pts, labels, res)
        else:
            grid, _, _ = export.raster(pts, res)
        if fmt == "pgm":
            files.append(export.write_pgm(stem.with_suffix(".pgm"), grid))
        elif fmt == "svg":
            files.append(export.write_svg_cells(stem.with_suffix(".svg"), grid > 0))
        else:
            files.append(_write_json(stem.with_suffix(".json"), {"points": pts, "labels": labels}))
    _emit({"command": "render", "index": rec.index, "what": args.what, "points": int(len(pts)),
           "cell_size": cell, "resolution": res, "files": [str(f) for f in files]})
    return EXIT_OK


def _write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(_plain({"schema": SCHEMA, **payload}), sort_keys=True) + "\n")
    return path


def cmd_dimension(cfg: RunConfig, args) -> int:
    from .boundary import build_boundary_graph, dimension_report, graph_dominant_eigenvalue, irreducible_factor
    from .reference import BOUNDARY_TARGETS
    rec = _tent_record(args.index)
    if rec.d == 1:
        _emit({"command": "dimension", "index": rec.index, "dim_H": 0.0,
               "note": "the tile is an interval; its boundary is two points"})
        return EXIT_OK
    rep = dimension_report(rec.index, with_lattice=args.lattice)
    mu = graph_dominant_eigenvalue(build_boundary_graph(rec.index, "sr"))
    out = rep.to_json()
    out["mu_sr_poly"] = list(irreducible_factor(mu.component_poly.coeffs, mu.lower, mu.upper))
    target = BOUNDARY_TARGETS[rec.index]
    tol = cfg.tol or target.dimension_tol
    out["table_value"] = target.dimension
    out["matches_table"] = abs(rep.box_dimension - target.dimension) <= tol
    _emit({"command": "dimension", **out})
    return EXIT_OK if out["matches_table"] else EXIT_FAIL


def cmd_boundary(cfg: RunConfig, args) -> int:
    from .boundary import build_boundary_graph, graph_dominant_eigenvalue, irreducible_factor
    rec = _tent_record(args.index)
    if rec.d == 1:
        raise UsageError("boundary graphs are built for the records with a substitution model")
    g = build_boundary_graph(rec.index, args.variant, rule=args.rule)
    mu = graph_dominant_eigenvalue(g)
    files = []
    if cfg.fmt in ("json", "csv") and args.write:
        cfg.out.mkdir(parents=True, exist_ok=True)
        stem = cfg.out / f"boundary_{args.variant}_{rec.index}"
        if cfg.fmt == "json":
            files.append(_write_json(stem.with_suffix(".json"), g.to_json()))
        else:
            path = stem.with_suffix(".csv")
            np.savetxt(path, g.adjacency(), fmt="%d", delimiter=",")
            files.append(path)
    _emit({"command": "boundary", "index": rec.index, "variant": args.variant, "rule": args.rule,
           "vertices": len(g.vertices), "edges": len(g.edges), "mu": mu.value,
           "mu_interval": [float(mu.lower), float(mu.upper)],
           "mu_poly": list(irreducible_factor(mu.component_poly.coeffs, mu.lower, mu.upper)),
           "charpoly": list(mu.charpoly.coeffs), "files": [str(f) for f in files]})
    return EXIT_OK


def cmd_tiling(cfg: RunConfig, args) -> int:
    from . import export
    from .tiling import UnknownTiling, verify_tiling, tiling_spec
    rec = _tent_record(args.index)
    spec = tiling_spec(rec.index)
    if spec.status == "unknown":
        _emit({"command": "tiling", "index": rec.index, "status": "unknown", "passed": None})
        return EXIT_OK
    try:
        v = verify_tiling(rec.index, threshold=cfg.tol or 0.02, window_scale=cfg.window_scale,
                          resolution=cfg.resolution, depth=cfg.depth, mode=args.mode,
                          negative_control=args.negative_control)
    except UnknownTiling as exc:
        raise UsageError(str(exc))
    files = []
    if cfg.fmt == "pgm":
        if spec.dim != 2:
            raise UsageError("multiplicity heatmaps are 2-D")
        cfg.out.mkdir(parents=True, exist_ok=True)
        files.append(export.write_pgm(cfg.out / f"tiling_{rec.index}.pgm", v.histogram.grid,
                                      maxval=max(int(v.histogram.grid.max()), 2)))
    out = v.to_json()
    out["spec"] = spec.to_json()
    _emit({"command": "tiling", **out, "files": [str(f) for f in files]})
    return EXIT_OK if v.passed else EXIT_FAIL


def cmd_correspond(cfg: RunConfig, args) -> int:
    from .rauzy import correspondence_check, exact_correspondence_certificate
    rec = _tent_record(args.index)
    if rec.d == 1:
        raise UsageError("the quadratic records have no Rauzy model here")
    cert = exact_correspondence_certificate(rec.index)
    out = {"command": "correspond", "index": rec.index,
           "exact_certificate": {"holds": cert.holds, "words": [list(w) for w in cert.words]}}
    ok = cert.holds
    if not args.exact_only:
        rep = correspondence_check(rec.index, depth=cfg.depth, tol=cfg.tol, rel_cell=args.rel_cell)
        out["numeric"] = rep.to_json()
        ok = ok and rep.passed
    _emit(out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_all(cfg: RunConfig, args) -> int:
    from .acceptance import CHECKS, run
    only = [k.strip() for k in args.only.split(",")] if args.only else None
    if only:
        bad = [k for k in only if k not in CHECKS]
        if bad:
            raise UsageError(f"unknown check(s) {bad}; choose from {list(CHECKS)}")
    results = run(only)
    for r in results:
        print(r.line(), file=sys.stderr)
    payload = {"command": "verify-all", "passed": all(r.passed for r in results),
               "criteria": [r.to_json() for r in results]}
    if args.write:
        cfg.out.mkdir(parents=True, exist_ok=True)
        _write_json(cfg.out / "verify_all.json", payload)
    _emit(payload)
    return EXIT_OK if payload["passed"] else EXIT_FAIL


# -----------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=64, help="bits for numeric embeddings")
    common.add_argument("--depth", type=int, default=None, help="render depth (default: from resolution)")
    common.add_argument("--resolution", type=int, default=None, help="raster cells per axis")
    common.add_argument("--window-scale", type=float, default=4.0, help="tiling window side in tile diameters")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--format", dest="fmt", choices=["csv", "pgm", "svg", "json"], default="json")

    p = argparse.ArgumentParser(prog="tenttile", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", parents=[common], help="the eleven records").set_defaults(func=cmd_list)
    s = sub.add_parser("info", parents=[common], help="record summary")
    s.add_argument("index", type=_index)
    s.set_defaults(func=cmd_info)
    s = sub.add_parser("render", parents=[common], help="point clouds and rasters")
    s.add_argument("index", type=_index)
    s.add_argument("--what", choices=["tent", "rauzy"], default="tent")
    s.set_defaults(func=cmd_render)
    s = sub.add_parser("dimension", parents=[common], help="boundary dimension report")
    s.add_argument("index", type=_index)
    s.add_argument("--lattice", action="store_true", help="also build the lattice boundary graph")
    s.set_defaults(func=cmd_dimension)
    s = sub.add_parser("boundary", parents=[common], help="boundary graph")
    s.add_argument("index", type=_index)
    s.add_argument("--variant", choices=["sr", "lat"], default="sr")
    s.add_argument("--rule", choices=["derived", "literal"], default="derived")
    s.add_argument("--write", action="store_true", help="write the graph (json) or adjacency (csv) to --out")
    s.set_defaults(func=cmd_boundary)
    s = sub.add_parser("tiling", parents=[common], help="rasterised lattice tiling check")
    s.add_argument("index", type=_index)
    s.add_argument("--mode", choices=["mass", "hit"], default="mass")
    s.add_argument("--negative-control", action="store_true", help="also run with a doubled lattice vector")
    s.set_defaults(func=cmd_tiling)
    s = sub.add_parser("correspond", parents=[common], help="Rauzy subtiles versus tent-tile images")
    s.add_argument("index", type=_index)
    s.add_argument("--rel-cell", type=float, default=1e-3, help="target cell size relative to the diameter")
    s.add_argument("--exact-only", action="store_true", help="only the symbolic certificate")
    s.set_defaults(func=cmd_correspond)
    s = sub.add_parser("verify-all", parents=[common], help="run the acceptance checks")
    s.add_argument("--only", default=None, help="comma separated subset of check keys")
    s.add_argument("--write", action="store_true", help="also write verify_all.json to --out")
    s.set_defaults(func=cmd_verify_all)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = RunConfig(args.precision, args.depth, args.resolution, args.window_scale, args.tol, args.out,
                        args.fmt)
        if args.command == "list" and args.fmt not in ("json", "csv"):
            raise UsageError("list prints json or a text table (--format csv)")
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"tenttile: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

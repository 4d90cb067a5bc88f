"""Command line front end.

    horodual verify      --config run.json --out out/
    horodual dualize     ...
    horodual admissible  ...
    horodual reconstruct ...
    horodual export      ...

Exit codes: 0 when everything passes, 1 when a check or the admissibility
test fails, 2 for an invalid configuration.
"""

import argparse
import csv
import os
import sys
import time

import numpy as np

from ..admissibility import admissibility_test, default_grid, reconstruct_surface, roundtrip_check
from ..duality import dualize
from ..errors import ConfigError, GeometryError
from ..factors import is_constant
from ..hypersurface import build_surface
from ..lorentz import HPoint
from ..sphere import sphere_grid
from .checks import CheckResult, Context, run_check
from .config import load_config
from .mesh import export_mesh, sample_surface
from .report import build_report, write_report

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
ROUNDTRIP_SAMPLES = 24


def _emit(cfg, command, results, extra, started, out=sys.stdout):
    payload = build_report(command, cfg, results, extra)
    timing = {"seconds": round(time.perf_counter() - started, 6)}
    json_path, _ = write_report(payload, timing, cfg.output["dir"], command)
    for r in results:
        d = r.to_dict()
        dev = "-" if d["deviation"] is None else f"{d['deviation']:.3e}"
        print(f"{d['status']:4s} {r.name:24s} dev={dev} tol={r.tol:.1e} {r.note}", file=out)
    print(f"{payload['status']}: report written to {json_path}", file=out)
    return EXIT_OK if payload["status"] == "pass" else EXIT_FAIL


def run_verify(cfg, out=sys.stdout):
    started = time.perf_counter()
    ctx = Context(cfg)
    results = [run_check(name, ctx) for name in cfg.checks]
    return _emit(cfg, "verify", results, None, started, out)


def run_dualize(cfg, out=sys.stdout):
    started = time.perf_counter()
    fam = build_surface(cfg.surface, cfg.n)
    ctx = Context(cfg)
    os.makedirs(cfg.output["dir"], exist_ok=True)
    path = os.path.join(cfg.output["dir"], "dual.csv")
    m = cfg.n - 1
    ranks = []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        dim = cfg.n + 1
        w.writerow([f"x{i}" for i in range(dim)] + [f"phi{i}" for i in range(dim)]
                   + [f"Istar{i}{j}" for i in range(m) for j in range(i, m)])
        for p in ctx.surface_points():
            d = dualize(fam.jet(p))
            ranks.append(d.rank)
            G = d.Istar_pullback
            w.writerow([repr(float(v)) for v in np.concatenate(
                [d.jet.x, d.phi, [G[i, j] for i in range(m) for j in range(i, m)]])])
    extra = {"samples": len(ranks), "min_rank": min(ranks), "dual_csv": "dual.csv"}
    return _emit(cfg, "dualize", [], extra, started, out)


def _admissibility(cfg):
    u = cfg.build_factor()
    rep = admissibility_test(u, default_grid(cfg.n, cfg.grid), cfg.n, eps=cfg.tol("admissible"))
    return u, rep


def run_admissible(cfg, out=sys.stdout):
    started = time.perf_counter()
    u, rep = _admissibility(cfg)
    print(rep.describe(), file=out)
    extra = {"admissibility": rep.to_dict(), "ok": rep.h_admissible}
    return _emit(cfg, "admissible", [], extra, started, out)


def run_reconstruct(cfg, out=sys.stdout):
    started = time.perf_counter()
    u, rep = _admissibility(cfg)
    print(rep.describe(), file=out)
    extra = {"admissibility": rep.to_dict(), "ok": rep.h_admissible}
    results = []
    if rep.h_admissible:
        x0 = HPoint.origin(cfg.n)
        fam = reconstruct_surface(u, x0, report=rep)
        count = min(cfg.grid or ROUNDTRIP_SAMPLES, ROUNDTRIP_SAMPLES)
        grid = sphere_grid(cfg.n, count, np.random.default_rng([cfg.seed, 5]))
        dev = roundtrip_check(u, x0, grid, report=rep)
        tol = 1e-9 if is_constant(u) else cfg.tol("roundtrip")
        results.append(CheckResult("roundtrip", dev, min(tol, cfg.tol("roundtrip")), len(grid),
                                   "analytic sphere" if is_constant(u) else "envelope"))
        if cfg.n == 3 and cfg.output.get("mesh", True):
            _write_mesh(cfg, fam)
            extra["mesh"] = "mesh.off"
    return _emit(cfg, "reconstruct", results, extra, started, out)


def _write_mesh(cfg, fam):
    os.makedirs(cfg.output["dir"], exist_ok=True)
    pts = sample_surface(fam, cfg.output["rows"], cfg.output["cols"])
    return export_mesh(pts, os.path.join(cfg.output["dir"], "mesh.off"), cfg.output["model"])


def run_export(cfg, out=sys.stdout):
    started = time.perf_counter()
    if cfg.n != 3:
        raise ConfigError("mesh export needs n = 3")
    fam = build_surface(cfg.surface, cfg.n)
    if not fam.spherical:
        raise ConfigError("mesh export needs a closed (spherical) surface")
    _write_mesh(cfg, fam)
    extra = {"mesh": "mesh.off", "model": cfg.output["model"],
             "vertices": cfg.output["rows"] * cfg.output["cols"]}
    return _emit(cfg, "export", [], extra, started, out)


COMMANDS = {"verify": run_verify, "dualize": run_dualize, "admissible": run_admissible,
            "reconstruct": run_reconstruct, "export": run_export}


def build_parser():
    ap = argparse.ArgumentParser(prog="horodual", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="JSON run configuration")
    ap.add_argument("--out", help="output directory (default: out)")
    ap.add_argument("--seed", type=int, help="seed for randomized fixtures")
    ap.add_argument("--tol", type=float, help="override every tolerance")
    ap.add_argument("--grid", type=int, help="sample count / per-axis grid resolution")
    return ap


def main(argv=None, out=sys.stdout):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed, tol=args.tol, grid=args.grid, out=args.out)
        return COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GeometryError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main_entry():
    sys.exit(main())

"""Command-line front end: JSON experiment configs in, tables and certificates out.

Usage::

    anadisk run config.json            # every block present in the config
    anadisk glue config.json --seed 3  # one block; flags override file fields
    anadisk report out/manifest.json   # verify the hashes of a previous run

Complex numbers are written as ``[re, im]`` pairs or plain reals; a point of
C^n is a list of ``n`` such numbers; in C^1 a bare number or an
``[re, im]`` pair is accepted.  Every JSON artifact carries
``schema_version`` and ``manifest.json`` lists each artifact with its
sha256 and the hash of the config plus code version.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .disk import BoundaryGrid, from_dict
from .envelope import (
    Ball,
    BoundaryData,
    Constant,
    EnvelopeConfig,
    LogNorm,
    NormPower,
    PolyZZbar,
    SmoothedIndicator,
    poletsky_value,
)
from .errors import AnadiskError
from .gluing import DEFAULT_R_SCHEDULE, convergence_profile, profile_csv
from .hull import CompactSet, HullConfig, hull_classify
from .leaves import FiniteLeaf, cluster_sample, essentiality, torus_leaf
from .measures import jensen_check, moments, pushforward, random_bremermann
from .potential import WalkConfig

SCHEMA_VERSION = 1
OUT_ENV = "ANADISK_OUT"
COMMANDS = ("measure", "glue", "envelope", "hull", "leaf", "report")

BLOCK_KEYS = {
    "measure": {"maps", "dmax", "probes", "slack", "grid_n"},
    "glue": {"f", "g", "alpha", "r_list", "n", "dmax", "recenter", "ambient_radius"},
    "envelope": {"function", "ball", "points", "degrees", "restarts", "grid_n"},
    "hull": {"K", "points", "degrees", "restarts", "tol", "eps"},
    "leaf": {"leaf", "queries", "walks", "per_member"},
    "report": {"manifest"},
}
GLOBAL_KEYS = {"schema_version", "seed", "grid_n", "output_dir", "threads"} | set(COMMANDS)


class ConfigError(Exception):
    """Invalid config; the message names the offending field."""


# ---------------------------------------------------------------- parsing helpers


def _complex(x, where):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ConfigError(f"{where}: expected a number or an [re, im] pair, got {x!r}")


def _point(x, where, n=None):
    """Parse a point of C^n.

    A list of ``n`` numbers is read as real coordinates; in C^1 a pair of
    numbers is read as ``[re, im]`` instead.
    """
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        x = [x]
    if not isinstance(x, list) or not x:
        raise ConfigError(f"{where}: expected a list of complex coordinates")
    if n == 1 and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return np.array([complex(x[0], x[1])])
    z = np.array([_complex(v, f"{where}[{i}]") for i, v in enumerate(x)])
    if n is not None and len(z) != n:
        raise ConfigError(f"{where}: expected {n} coordinates, got {len(z)}")
    return z


def _pair(z):
    return [float(np.real(z)), float(np.imag(z))]


def _map(tree, where):
    try:
        return from_dict(tree)
    except (AnadiskError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: invalid map tree ({exc})") from exc


def _block(cfg, name):
    blk = cfg.get(name)
    if not isinstance(blk, dict):
        raise ConfigError(f"{name}: block must be a JSON object")
    extra = set(blk) - BLOCK_KEYS[name]
    if extra:
        raise ConfigError(f"{name}.{sorted(extra)[0]}: unknown field")
    return blk


def validate(cfg) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError("config: top level must be a JSON object")
    extra = set(cfg) - GLOBAL_KEYS
    if extra:
        raise ConfigError(f"{sorted(extra)[0]}: unknown top-level field")
    v = cfg.get("schema_version", SCHEMA_VERSION)
    if v != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {v!r}")
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed: must be an integer in [0, 2**64)")
    for name in COMMANDS:
        if name in cfg:
            _block(cfg, name)
    return cfg


# ---------------------------------------------------------------- artifacts


class Writer:
    """Collects artifacts in memory; files are written once, in order."""

    def __init__(self, out: Path):
        self.out = out
        self.files: dict[str, bytes] = {}

    def text(self, name, text: str):
        self.files[name] = text.encode()

    def json(self, name, obj):
        obj = {"schema_version": SCHEMA_VERSION, **obj}
        self.text(name, json.dumps(obj, sort_keys=True, indent=1) + "\n")

    def svg(self, name, fig):
        buf = io.BytesIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        self.files[name] = buf.getvalue()

    def flush(self, cfg):
        self.out.mkdir(parents=True, exist_ok=True)
        arts = []
        for name, data in self.files.items():
            (self.out / name).write_bytes(data)
            arts.append({"path": name, "sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)})
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "code_version": __version__,
            "config": cfg,
            "config_hash": config_hash(cfg),
            "artifacts": arts,
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
        return manifest


def config_hash(cfg) -> str:
    text = json.dumps({"config": cfg, "code_version": __version__}, sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()


def _figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "anadisk"
    plt.rcParams["svg.fonttype"] = "none"
    fig, ax = plt.subplots(figsize=(5, 4))
    return plt, fig, ax


def _scatter(w: Writer, name, pts, title):
    plt, fig, ax = _figure()
    ax.scatter(pts.real, pts.imag, s=1, c="k", linewidths=0)
    ax.set_aspect("equal")
    ax.set_title(title)
    w.svg(name, fig)
    plt.close(fig)


# ---------------------------------------------------------------- commands


def _map_pool(threads, fn, items):
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def cmd_measure(cfg, w: Writer, threads):
    blk = _block(cfg, "measure")
    maps = blk.get("maps")
    if not isinstance(maps, list) or not maps:
        raise ConfigError("measure.maps: need a non-empty list of map trees")
    dmax = int(blk.get("dmax", 4))
    grid = BoundaryGrid(int(blk.get("grid_n", cfg.get("grid_n", 4096))))
    rng = np.random.default_rng(np.random.SeedSequence([cfg.get("seed", 0), 1]))
    out = []
    for i, tree in enumerate(maps):
        f = _map(tree, f"measure.maps[{i}]")
        mu = pushforward(f, grid)
        probes = random_bremermann(f.dim, int(blk.get("probes", 100)), rng)
        rep = jensen_check(mu, f.center(), probes, float(blk.get("slack", 0.0)))
        out.append({"map": tree, "moments": json.loads(moments(mu, dmax).to_json()),
                    "jensen": rep.to_dict()})
        _scatter(w, f"measure_{i}_support.svg", mu.points[:, 0], f"support of measure {i}, first coordinate")
    w.json("measure.json", {"measures": out})


def cmd_glue(cfg, w: Writer, threads):
    blk = _block(cfg, "glue")
    for k in ("f", "g"):
        if k not in blk:
            raise ConfigError(f"glue.{k}: missing map tree")
    f, g = _map(blk["f"], "glue.f"), _map(blk["g"], "glue.g")
    rows = convergence_profile(
        f, g, float(blk.get("alpha", 0.5)), blk.get("r_list", list(DEFAULT_R_SCHEDULE)),
        n=int(blk.get("n", cfg.get("grid_n", 200_000))), dmax=int(blk.get("dmax", 4)),
        seed=int(cfg.get("seed", 0)), recenter=bool(blk.get("recenter", True)),
        ambient_radius=blk.get("ambient_radius"))
    w.text("glue_profile.csv", profile_csv(rows))
    plt, fig, ax = _figure()
    ax.loglog([r.r for r in rows], [r.distance for r in rows], "o-", c="k")
    ax.set_xlabel("r")
    ax.set_ylabel("weak distance to the mixture")
    w.svg("glue_profile.svg", fig)
    plt.close(fig)


def _usc(spec, n, where):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"{where}: expected an object with a 'kind'")
    kind = spec["kind"]
    if kind == "norm_power":
        return NormPower(float(spec.get("p", 2.0)))
    if kind == "log_norm":
        return LogNorm()
    if kind == "constant":
        return Constant(float(spec.get("value", 0.0)))
    if kind == "real_part":
        return PolyZZbar.real_part(int(spec.get("index", 0)), n)
    if kind == "smoothed_indicator":
        return SmoothedIndicator(_compact(spec.get("E"), f"{where}.E"))
    raise ConfigError(f"{where}.kind: unknown function kind {kind!r}")


def cmd_envelope(cfg, w: Writer, threads):
    blk = _block(cfg, "envelope")
    bspec = blk.get("ball", {})
    center = _point(bspec["center"], "envelope.ball.center", bspec.get("dim")) if "center" in bspec else np.zeros(int(bspec.get("dim", 1)), complex)
    ball = Ball(tuple(center), float(bspec.get("radius", 1.0)))
    fspec = blk.get("function")
    if fspec is None:
        raise ConfigError("envelope.function: missing")
    phi = _usc(fspec, ball.dim, "envelope.function")
    if fspec.get("boundary", False):
        phi = BoundaryData(phi, ball)
    pts = [_point(p, f"envelope.points[{i}]", ball.dim) for i, p in enumerate(blk.get("points", []))]
    if not pts:
        raise ConfigError("envelope.points: need at least one point")
    ecfg = EnvelopeConfig(degrees=tuple(blk.get("degrees", (1, 2, 4, 8))),
                          restarts=int(blk.get("restarts", 4)),
                          grid_n=int(blk.get("grid_n", 2048)), seed=int(cfg.get("seed", 0)))
    res = _map_pool(threads, lambda z: poletsky_value(phi, z, ball, ecfg), pts)
    lines = [",".join([f"{p}_z{i + 1}" for i in range(ball.dim) for p in ("re", "im")] + ["value", "phi"])]
    for z, r in zip(pts, res):
        lines.append(",".join([repr(v) for c in z for v in _pair(c)]
                              + [repr(r.value), repr(float(phi(z[None, :])[0]))]))
    w.text("envelope.csv", "\n".join(lines) + "\n")
    w.json("envelope_witnesses.json", {"witnesses": [r.witness.to_dict() for r in res]})


def _compact(spec, where):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"{where}: expected an object with a 'kind'")
    kind, eps = spec["kind"], spec.get("eps")
    if kind == "circle":
        return CompactSet.circle(int(spec.get("m", 2048)), float(spec.get("radius", 1.0)), eps=eps)
    if kind == "torus":
        return CompactSet.torus(int(spec.get("m", 128)), eps=eps)
    if kind == "segment":
        return CompactSet.segment(_complex(spec.get("a", -1.0), f"{where}.a"),
                                  _complex(spec.get("b", 1.0), f"{where}.b"), eps=eps)
    if kind == "points":
        n = spec.get("dim", 1)
        return CompactSet.points([_point(p, f"{where}.points[{i}]", n) for i, p in enumerate(spec["points"])], eps=eps)
    if kind == "csv":
        return CompactSet.from_csv(Path(spec["path"]).read_text(), eps=eps)
    raise ConfigError(f"{where}.kind: unknown compact set kind {kind!r}")


def cmd_hull(cfg, w: Writer, threads):
    blk = _block(cfg, "hull")
    K = _compact(blk.get("K"), "hull.K")
    if blk.get("eps") is not None:
        K = K.with_eps(float(blk["eps"]))
    pts = [_point(p, f"hull.points[{i}]", K.dim) for i, p in enumerate(blk.get("points", []))]
    if not pts:
        raise ConfigError("hull.points: need at least one point")
    hcfg = HullConfig(degrees=tuple(blk.get("degrees", (1, 2, 4, 8))),
                      restarts=int(blk.get("restarts", 16)), tol=float(blk.get("tol", 1e-2)),
                      seed=int(cfg.get("seed", 0)))
    certs = _map_pool(threads, lambda z: hull_classify(K, z, hcfg), pts)
    for i, c in enumerate(certs):
        w.json(f"hull_certificate_{i}.json", c.to_dict())
    _scatter(w, "hull_K.svg", K.samples[:, 0], "compact set, first coordinate")


def _leaf(spec, where):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"{where}: expected an object with a 'kind'")
    if spec["kind"] == "torus_leaf":
        return torus_leaf(int(spec.get("J", 20)))
    if spec["kind"] == "members":
        return FiniteLeaf([_map(t, f"{where}.members[{i}]") for i, t in enumerate(spec["members"])],
                          spec.get("radius"))
    raise ConfigError(f"{where}.kind: unknown leaf kind {spec['kind']!r}")


def cmd_leaf(cfg, w: Writer, threads):
    blk = _block(cfg, "leaf")
    leaf = _leaf(blk.get("leaf"), "leaf.leaf")
    walks = int(blk.get("walks", 4000))
    seed = int(cfg.get("seed", 0))
    queries = blk.get("queries", [])
    parsed = []
    for i, q in enumerate(queries):
        if not isinstance(q, dict) or "z" not in q or "r" not in q:
            raise ConfigError(f"leaf.queries[{i}]: need fields z and r")
        parsed.append((_point(q["z"], f"leaf.queries[{i}].z", leaf.dim), float(q["r"])))
    reps = _map_pool(threads, lambda q: essentiality(leaf, q[0], q[1], WalkConfig(walks=walks, seed=seed)), parsed)
    w.json("leaf_essentiality.json", {"reports": [r.to_dict() for r in reps]})
    sample = cluster_sample(leaf, int(blk.get("per_member", 256)), members=leaf.tail())
    w.text("leaf_cluster.csv", sample.to_csv())
    _scatter(w, "leaf_cluster.svg", sample.points[:, 0], "cluster samples, first coordinate")
    w.json("leaf_members.json", {"members": json.loads(leaf.to_json())})


def cmd_report(cfg, w: Writer, threads):
    blk = _block(cfg, "report")
    path = Path(blk.get("manifest", ""))
    if not path.is_file():
        raise ConfigError(f"report.manifest: no such file {str(path)!r}")
    man = json.loads(path.read_text())
    rows = []
    for a in man.get("artifacts", []):
        f = path.parent / a["path"]
        ok = f.is_file() and hashlib.sha256(f.read_bytes()).hexdigest() == a["sha256"]
        rows.append({"path": a["path"], "ok": ok})
    w.json("report.json", {"manifest": str(path), "config_hash": man.get("config_hash"),
                           "config_hash_ok": man.get("config_hash") == config_hash(man.get("config")),
                           "artifacts": rows, "all_ok": all(r["ok"] for r in rows)})


HANDLERS = {"measure": cmd_measure, "glue": cmd_glue, "envelope": cmd_envelope,
            "hull": cmd_hull, "leaf": cmd_leaf, "report": cmd_report}


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anadisk", description="Numerical experiments with analytic disks.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command")
    for name in ("run",) + COMMANDS:
        sp = sub.add_parser(name, help="run every block of the config" if name == "run" else f"run the {name} block")
        sp.add_argument("config", nargs="?", help="JSON config file (a manifest is accepted too)")
        sp.add_argument("--seed", type=int, help="64-bit seed; overrides the config")
        sp.add_argument("--grid-n", type=int, help="boundary grid size; overrides the config")
        sp.add_argument("--threads", type=int, help="worker threads (default: logical cores)")
        sp.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./anadisk_out)")
    return p


def load_config(path) -> dict:
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    # a manifest carries the full config it was produced from
    if isinstance(cfg, dict) and "artifacts" in cfg and "config" in cfg:
        cfg = cfg["config"]
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = load_config(args.config) if args.config else {}
        if args.command == "report" and args.config and not cfg.get("report"):
            cfg = {"report": {"manifest": args.config}}
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.grid_n is not None:
            cfg["grid_n"] = args.grid_n
        validate(cfg)
        names = [c for c in COMMANDS if c in cfg] if args.command == "run" else [args.command]
        if not names or any(n not in cfg for n in names):
            parser.print_usage(sys.stderr)
            print(f"anadisk: config has no {'runnable' if args.command == 'run' else args.command} block",
                  file=sys.stderr)
            return 2
    except (ConfigError, OSError) as exc:
        print(f"anadisk: config error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out or cfg.get("output_dir") or os.environ.get(OUT_ENV, "anadisk_out"))
    threads = args.threads or cfg.get("threads") or os.cpu_count() or 1
    w = Writer(out)
    try:
        for name in names:
            HANDLERS[name](cfg, w, threads)
    except ConfigError as exc:
        print(f"anadisk: config error: {exc}", file=sys.stderr)
        return 2
    except AnadiskError as exc:
        print(json.dumps(exc.to_dict(), sort_keys=True), file=sys.stderr)
        return 1
    manifest = w.flush(cfg)
    print(json.dumps({"output_dir": str(out), "config_hash": manifest["config_hash"],
                      "artifacts": [a["path"] for a in manifest["artifacts"]]}, sort_keys=True))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

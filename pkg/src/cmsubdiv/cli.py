"""Command line experiment runner.

Exit codes: 0 success, 2 validation or contract failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__, analysis
from .core import ElementSequence, Space
from .errors import DomainError, NumericalError, SubdivisionError
from .generators import generate, make_curve
from .io import (ANALYSIS_KINDS, BUNDLE_SCHEMA, CONFIG_SCHEMA, REPORT_SCHEMAS, SPACE_FORMAT,
                 all_schemas, csv_text, decode, detect_format, dumps, encode, validate)
from .schemes import Scheme, SubdivisionRun, linear_mask, make_scheme, subdivide
from .spaces import make_space

OUTPUT_ENV = "CMSUBDIV_OUTPUT_DIR"
DEFAULT_LEVELS = 4


@dataclass
class Experiment:
    config_text: str
    config: dict
    space: Space
    scheme: Scheme
    data: ElementSequence
    data_meta: dict
    levels: int
    samples: int
    _run: SubdivisionRun | None = field(default=None, repr=False)

    @property
    def run(self) -> SubdivisionRun:
        if self._run is None:
            self._run = subdivide(self.data, self.scheme, self.space, self.levels)
        return self._run


def load_config(path: str | Path) -> tuple[str, dict]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read config: {exc}", path=str(path)) from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"config is not valid JSON: {exc}", path=str(path)) from None
    validate(cfg, CONFIG_SCHEMA, "config")
    return text, cfg


def _space(entry: dict) -> Space:
    return make_space(entry["id"], **entry.get("params", {}))


def _scheme(entry: dict) -> Scheme:
    return make_scheme(entry["id"], **entry.get("params", {}))


def load_data(cfg: dict, seed: int | None = None, base: Path | None = None,
              overrides: dict | None = None) -> tuple[dict, dict]:
    src = cfg["data"]
    if "inline" in src:
        return src["inline"], {"source": "inline"}
    if "file" in src:
        path = Path(src["file"])
        if base is not None and not path.is_absolute():
            path = base / path
        try:
            return json.loads(path.read_text()), {"source": "file", "file": src["file"]}
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot load data file: {exc}", file=src["file"]) from None
    params = dict(src.get("params", {}), **(overrides or {}))
    return generate(src["generator"], src["seed"] if seed is None else seed, **params)


def build_experiment(config_text: str, cfg: dict, seed: int | None = None,
                     levels: int | None = None, samples: int | None = None,
                     base: Path | None = None) -> Experiment:
    space = _space(cfg["space"])
    scheme = _scheme(cfg["scheme"])
    scheme.check_space(space)
    doc, meta = load_data(cfg, seed, base)
    fmt = detect_format(doc)
    if SPACE_FORMAT.get(cfg["space"]["id"]) != fmt:
        raise DomainError(f"{fmt} data cannot live in space {cfg['space']['id']!r}",
                          space=cfg["space"]["id"], format=fmt)
    _, P = decode(doc)
    K = levels if levels is not None else cfg.get("levels", DEFAULT_LEVELS)
    return Experiment(config_text, cfg, space, scheme, P, meta, K, samples or 2**10 + 1)


# --- analyses ------------------------------------------------------------------------------

def _analysis_contractivity(ex: Experiment, p: dict) -> dict:
    L_max = p.get("L_max", 4)
    K = p.get("K", max(ex.levels, 2 * L_max))
    r = analysis.estimate_contractivity(ex.scheme, ex.space, ex.data, L_max, K,
                                        start=p.get("start", 0))
    return r.to_dict()


def _analysis_displacement(ex: Experiment, p: dict) -> dict:
    return analysis.estimate_displacement(ex.scheme, ex.space, ex.data,
                                          p.get("K", ex.levels)).to_dict()


def _analysis_proximity1(ex: Experiment, p: dict) -> dict:
    src = ex.config["data"]
    if "generator" not in src:
        raise DomainError("proximity1 needs generator data to build a scaled family")
    other = _scheme(p["other"])
    key = p.get("scale_param", "delta")

    def family(s):
        doc, _ = load_data(ex.config, ex.data_meta.get("seed"), overrides={key: s})
        return decode(doc)[1]

    space2 = _space(p["other_space"]) if "other_space" in p else None
    r = analysis.check_proximity_type1(ex.scheme, other, ex.space, family, p["scales"],
                                       mu=p.get("mu", 0.5), space2=space2)
    return r.to_dict()


def _analysis_proximity2(ex: Experiment, p: dict) -> dict:
    other = _scheme(p["other"])
    space2 = _space(p["other_space"]) if "other_space" in p else ex.space
    dist = _space(p["distance_space"]) if "distance_space" in p else ex.space
    r = analysis.check_proximity_type2(ex.scheme, other, dist, ex.data, L=p.get("L", 1),
                                       K=p.get("K", 8), burn_in=p.get("burn_in", 2),
                                       space1=ex.space, space2=space2)
    return r.to_dict()


def _analysis_cauchy(ex: Experiment, p: dict) -> dict:
    return analysis.cauchy_trace(ex.run, p.get("samples", ex.samples)).to_dict()


def _analysis_divided_diff(ex: Experiment, p: dict) -> dict:
    trace = analysis.divided_differences(ex.run)
    c1 = analysis.c1_diagnostic(ex.run, p.get("L1_max", 2), p.get("start", 0))
    return dict(c1.to_dict(), level_distances=trace.level_distances)


def _analysis_approx_order(ex: Experiment, p: dict) -> dict:
    curve = make_curve(p["curve"]["id"], **p["curve"].get("params", {}))
    lip = p.get("lipschitz", curve.lipschitz)
    r = analysis.approximation_experiment(curve, lip, ex.space, ex.scheme, p["hs"],
                                          curve.t_range, curve.closed, p.get("K", 8),
                                          p.get("samples", ex.samples))
    return r.to_dict()


def _analysis_locality(ex: Experiment, p: dict) -> dict:
    j = p.get("j", len(ex.data) // 2)
    k = p.get("replace_with", j + 1)
    r = analysis.locality_check(ex.scheme, ex.space, ex.data, j, ex.data[k],
                                p.get("K", ex.levels))
    return r.to_dict()


ANALYSES = {
    "contractivity": _analysis_contractivity,
    "displacement": _analysis_displacement,
    "proximity1": _analysis_proximity1,
    "proximity2": _analysis_proximity2,
    "cauchy": _analysis_cauchy,
    "divided-diff": _analysis_divided_diff,
    "approx-order": _analysis_approx_order,
    "locality": _analysis_locality,
}
assert set(ANALYSES) == set(ANALYSIS_KINDS)


def _report_key(kind: str, seen: dict) -> str:
    seen[kind] = seen.get(kind, 0) + 1
    return kind if seen[kind] == 1 else f"{kind}:{seen[kind]}"


def run_analyses(ex: Experiment, entries: list[dict]) -> dict:
    """Run independent analyses concurrently; results keep config order."""
    ex.run  # shared run computed once before fanning out
    with ThreadPoolExecutor(max_workers=min(4, max(1, len(entries)))) as pool:
        futures = [pool.submit(ANALYSES[e["kind"]], ex, e.get("params", {})) for e in entries]
        results = [f.result() for f in futures]
    seen: dict = {}
    reports = {}
    for e, r in zip(entries, results):
        validate(r, REPORT_SCHEMAS[e["kind"]], f"{e['kind']} report")
        reports[_report_key(e["kind"], seen)] = r
    return reports


# --- bundle --------------------------------------------------------------------------------

def _level_dump(ex: Experiment) -> list[dict]:
    out = []
    for k, Q in enumerate(ex.run.levels):
        out.append({"level": k, "first_index": Q.grid.first_index,
                    "knots": [float(t) for t in Q.grid.knots],
                    "data": encode(ex.config["space"]["id"], Q.points)})
    return out


def make_bundle(ex: Experiment, reports: dict, dump_levels: bool) -> dict:
    bundle = {"config_echo": ex.config_text, "config": ex.config, "version": __version__,
              "data": ex.data_meta, "scheme": ex.scheme.describe(), "levels_run": ex.levels,
              "trims": ex.run.trims, "reports": reports}
    if dump_levels:
        bundle["levels"] = _level_dump(ex)
    validate(bundle, BUNDLE_SCHEMA, "result bundle")
    return bundle


def trace_files(ex: Experiment, reports: dict) -> dict[str, str]:
    files = {"delta.csv": csv_text(
        ["level", "length", "first_index", "delta"],
        [[k, len(Q), Q.grid.first_index, d] for k, (Q, d) in
         enumerate(zip(ex.run.levels, analysis.delta_trace(ex.run)))])}
    for key, r in reports.items():
        kind = key.split(":")[0]
        stem = key.replace(":", "-")
        if kind == "proximity2":
            files[f"{stem}.csv"] = csv_text(["j", "e_j", "ratio"], [
                [j, e, r["ratios"][j] if j < len(r["ratios"]) else None]
                for j, e in enumerate(r["errors"])])
        elif kind == "cauchy":
            files[f"{stem}.csv"] = csv_text(["k", "d_k", "ratio"], [
                [k, d, r["ratios"][k] if k < len(r["ratios"]) else None]
                for k, d in enumerate(r["distances"])])
        elif kind == "contractivity":
            files[f"{stem}.csv"] = csv_text(["level", "delta"], [
                [k, d] for k, d in enumerate(r["deltas"])])
        elif kind == "proximity1":
            files[f"{stem}.csv"] = csv_text(["scale", "delta", "sup"], [
                list(row) for row in zip(r["scales"], r["deltas"], r["sups"])])
        elif kind == "approx-order":
            files[f"{stem}.csv"] = csv_text(["h", "error", "bound", "violations"], [
                list(row) for row in zip(r["hs"], r["errors"], r["bounds"], r["violations"])])
    return files


def output_dir(arg: str | None, cfg: dict | None) -> Path:
    d = arg or os.environ.get(OUTPUT_ENV) or (cfg or {}).get("output", {}).get("dir") or "results"
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_outputs(out: Path, bundle: dict, traces: dict[str, str] | None, runtime: dict):
    (out / "bundle.json").write_text(dumps(bundle))
    for name, text in (traces or {}).items():
        (out / name).write_text(text)
    (out / "runtime.json").write_text(dumps(runtime))


def runtime_metadata(started: float) -> dict:
    return {"elapsed_s": time.perf_counter() - started, "python": platform.python_version(),
            "numpy": np.__version__, "platform": platform.platform(),
            "version": __version__}


def run_experiment(config_path: str | Path, output: str | None = None, seed: int | None = None,
                   levels: int | None = None, samples: int | None = None,
                   only: str | None = None, analyses: bool = True) -> tuple[dict, Path]:
    """Load a config, subdivide, run analyses, and write the result bundle."""
    started = time.perf_counter()
    text, cfg = load_config(config_path)
    ex = build_experiment(text, cfg, seed, levels, samples, Path(config_path).parent)
    entries = cfg.get("analyses", []) if analyses else []
    if only is not None:
        entries = [e for e in entries if e["kind"] == only] or [{"kind": only}]
    reports = run_analyses(ex, entries)
    opts = cfg.get("output", {})
    bundle = make_bundle(ex, reports, opts.get("dump_levels", not analyses))
    out = output_dir(output, cfg)
    traces = trace_files(ex, reports) if opts.get("traces", True) else None
    write_outputs(out, bundle, traces, runtime_metadata(started))
    return bundle, out


# --- entry point ---------------------------------------------------------------------------

def _parse_param(s: str) -> tuple[str, Any]:
    key, sep, val = s.partition("=")
    if not sep:
        raise DomainError(f"parameter {s!r} is not key=value")
    try:
        return key, json.loads(val)
    except json.JSONDecodeError:
        return key, val


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed {text!r} is not an integer") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {value} is outside [0, 2^64)")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmsubdiv", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True)
        p.add_argument("--output")
        p.add_argument("--seed", type=_seed)
        p.add_argument("--levels", type=int)
        p.add_argument("--samples", type=int)

    common(sub.add_parser("run", help="subdivide and run every configured analysis"))
    common(sub.add_parser("subdivide", help="subdivide and dump every level"))
    an = sub.add_parser("analyze", help="run a single analysis")
    an.add_argument("kind", choices=ANALYSIS_KINDS)
    common(an)
    gen = sub.add_parser("generate", help="write a synthetic data document")
    gen.add_argument("generator")
    gen.add_argument("--param", action="append", default=[], metavar="KEY=JSON")
    common(gen, config=False)
    mk = sub.add_parser("masks", help="linear masks recovered from impulse responses")
    mk.add_argument("scheme")
    mk.add_argument("--rounds", type=int)
    mk.add_argument("--omega", type=float)
    mk.add_argument("--length", type=int, default=16)
    mk.add_argument("--output")
    sc = sub.add_parser("schema", help="print the published JSON schemas")
    sc.add_argument("name", nargs="?", choices=["data", "reports", "config", "bundle"])
    return ap


def _dispatch(args) -> int:
    if args.command in ("run", "subdivide", "analyze"):
        bundle, out = run_experiment(args.config, args.output, args.seed, args.levels,
                                     args.samples, only=getattr(args, "kind", None),
                                     analyses=args.command != "subdivide")
        print(out / "bundle.json")
        return 0
    if args.command == "generate":
        params = dict(_parse_param(s) for s in args.param)
        seed = 0 if args.seed is None else args.seed
        doc, meta = generate(args.generator, seed, **params)
        out = output_dir(args.output, None)
        path = out / f"{args.generator}-{seed}.json"
        path.write_text(dumps(doc))
        (out / f"{args.generator}-{seed}.meta.json").write_text(dumps(meta))
        print(path)
        return 0
    if args.command == "masks":
        params = {k: v for k, v in (("rounds", args.rounds), ("omega", args.omega))
                  if v is not None}
        scheme = make_scheme(args.scheme, **params)
        table = dict(linear_mask(scheme, args.length), scheme=scheme.describe())
        table["even"] = {str(k): v for k, v in table["even"].items()}
        table["odd"] = {str(k): v for k, v in table["odd"].items()}
        text = dumps(table)
        if args.output:
            (output_dir(args.output, None) / "masks.json").write_text(text)
        sys.stdout.write(text)
        return 0
    schemas = all_schemas()
    sys.stdout.write(dumps(schemas[args.name] if args.name else schemas))
    return 0


def _report_error(exc: SubdivisionError):
    sys.stderr.write(json.dumps(exc.to_dict(), sort_keys=True, default=str) + "\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except NumericalError as exc:
        _report_error(exc)
        return 3
    except SubdivisionError as exc:
        _report_error(exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())

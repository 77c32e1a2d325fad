"""Command-line front end.

Usage::

    perturbed-fourier <experiment> [--config FILE] [--out DIR] [--threads K]
                      [--seed S] [key=value ...]
    perturbed-fourier make-grid N=16 alpha=0.2 kind=random seed=3 [--out DIR]

Configuration files are flat ``key = value`` text (``#`` starts a comment);
``key=value`` arguments override the file. Lists are written ``{a,b,c}`` or
``a,b,c``. Unknown keys are errors. Each run writes ``<experiment>.csv`` and
``<experiment>.manifest.json`` to the output directory, which defaults to
``$PERTURBED_FOURIER_OUT`` or ``./out``. The exit status is 0 exactly when no
row reports a failed check.
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .experiments import EXPERIMENTS, make_grid, run_experiment
from .io import format_float, save_grid, save_rule, write_csv
from .quadrature import compute_weights

OUT_ENV = "PERTURBED_FOURIER_OUT"

MAKE_GRID_DEFAULTS = {"N": 16, "alpha": 0.2, "kind": "random", "seed": 0, "weights": False}


class ConfigError(ValueError):
    pass


def _scalar(text: str, like):
    text = text.strip()
    if isinstance(like, bool):
        low = text.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ConfigError(f"expected a boolean, got {text!r}")
    if isinstance(like, int):
        try:
            return int(text)
        except ValueError:
            v = float(text)
            if not v.is_integer():
                raise ConfigError(f"expected an integer, got {text!r}") from None
            return int(v)
    if isinstance(like, float):
        return float(text)
    return text


def parse_value(text: str, default):
    """Coerce ``text`` to the type of ``default`` (lists element-wise)."""
    try:
        if isinstance(default, list):
            body = text.strip()
            if body.startswith("{") and body.endswith("}"):
                body = body[1:-1]
            like = default[0] if default else 0.0
            items = [s for s in body.split(",") if s.strip()]
            return [_scalar(s, like) for s in items]
        if "," in text or text.strip().startswith("{"):
            raise ConfigError(f"expected a single value, got {text!r}")
        return _scalar(text, default)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def parse_pairs(lines, defaults: dict, source: str) -> dict:
    out = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in defaults:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}; "
                              f"valid keys: {', '.join(sorted(defaults))}")
        out[key] = parse_value(val, defaults[key])
    return out


def load_config(path, defaults: dict) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    return parse_pairs(text.splitlines(), defaults, str(path))


def _build_parser():
    p = argparse.ArgumentParser(
        prog="perturbed-fourier",
        description="Verification experiments for NUDFT, interpolation and quadrature "
                    "on perturbed equispaced grids.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    for name, exp in EXPERIMENTS.items():
        keys = ", ".join(f"{k}={_show(v)} ({exp.docs.get(k, '')})" for k, v in exp.defaults.items())
        sp = sub.add_parser(name, help=exp.description,
                            description=f"{exp.description}. Keys: {keys}")
        _common(sp)
    sp = sub.add_parser("make-grid", help="write a grid file (and optionally its weights)",
                        description="Keys: " + ", ".join(
                            f"{k}={_show(v)}" for k, v in MAKE_GRID_DEFAULTS.items()))
    _common(sp)
    return p


def _common(sp):
    sp.add_argument("overrides", nargs="*", metavar="key=value")
    sp.add_argument("--config", type=Path, help="flat key=value configuration file")
    sp.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./out)")
    sp.add_argument("--threads", type=int, default=1, help="worker processes")
    sp.add_argument("--seed", type=int, help="base seed (overrides the seed key)")


def _show(v):
    if isinstance(v, list):
        return "{" + ",".join(format_float(x) for x in v) + "}"
    return format_float(v)


def resolve_params(defaults: dict, config=None, overrides=(), seed=None) -> dict:
    params = dict(defaults)
    if config is not None:
        params.update(load_config(config, defaults))
    params.update(parse_pairs(overrides, defaults, "command line"))
    if seed is not None:
        if "seed" in defaults:
            params["seed"] = seed
        elif "seeds" in defaults:
            params["seeds"] = [seed]
        else:
            raise ConfigError("--seed given but this command takes no seed")
    return params


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    return v


def _manifest(command, params, extra):
    return {
        "command": command,
        "config": {k: _jsonable(v) if not isinstance(v, list) else [_jsonable(x) for x in v]
                   for k, v in params.items()},
        "version": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        **extra,
    }


def _write_manifest(path, manifest):
    path.write_text(json.dumps(manifest, indent=1, default=_jsonable) + "\n",
                    encoding="utf-8", newline="\n")


def _run_make_grid(params, out: Path) -> int:
    grid = make_grid(params["kind"], params["N"], params["alpha"], params["seed"])
    gpath = out / "grid.json"
    save_grid(grid, gpath)
    files = [gpath.name]
    if params["weights"]:
        save_rule(compute_weights(grid), out / "rule.json", grid_path=gpath.name)
        files.append("rule.json")
    _write_manifest(out / "make-grid.manifest.json",
                    _manifest("make-grid", params, {"files": files,
                                                    "nodes_sha256": grid.checksum()}))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    out = args.out or Path(os.environ.get(OUT_ENV, "out"))
    defaults = MAKE_GRID_DEFAULTS if args.command == "make-grid" else \
        EXPERIMENTS[args.command].defaults
    try:
        params = resolve_params(defaults, args.config, args.overrides, args.seed)
    except (ConfigError, OSError) as exc:
        print(f"perturbed-fourier: {exc}", file=sys.stderr)
        return 2
    out.mkdir(parents=True, exist_ok=True)
    if args.command == "make-grid":
        return _run_make_grid(params, out)

    exp = EXPERIMENTS[args.command]
    rows, summary = run_experiment(args.command, params, threads=max(1, args.threads))
    csv_path = out / f"{args.command}.csv"
    write_csv(csv_path, exp.columns, rows)
    failed = sum(1 for r in rows if r.get("passed") is False)
    checked = sum(1 for r in rows if r.get("passed") is not None)
    status = 0 if failed == 0 else 1
    seeds = sorted({r["seed"] for r in rows if r.get("seed") is not None})
    _write_manifest(out / f"{args.command}.manifest.json", _manifest(args.command, params, {
        "csv": csv_path.name, "rows": len(rows), "checked": checked, "failed": failed,
        "seeds": seeds, "summary": summary, "exit_status": status,
    }))
    print(f"{args.command}: {len(rows)} rows, {checked} checked, {failed} failed -> {csv_path}")
    for k, v in summary.items():
        print(f"  {k} = {v}")
    return status


if __name__ == "__main__":
    sys.exit(main())

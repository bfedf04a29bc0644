"""Command-line driver: stable densities, zone checks and local-limit tables.

Usage examples::

    modlab density --alpha 1.5 --beta 0.3 --xmin -5 --xmax 5 --points 41
    modlab zone --model gaf --nu 3 --omega 3
    modlab llt --model gaf --r2 0.98 --x 0 --window -1,1 --delta 0.4 --method exact
    modlab report experiments.ini

Exit codes: 0 on success, 1 on a numerical failure (the error is also written
to the output), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, modphi, models, tilt
from .stable import StableLaw

CSV_COLUMNS = ("model", "n", "t_n", "delta", "x", "window_a", "window_b", "lhs", "target",
               "abs_err", "rel_err", "method", "seed")
INDEX_ALIASES = ("r2", "q", "n", "t", "h", "N")


class UsageError(ValueError):
    pass


# --- parsing helpers ----------------------------------------------------------------

def _floats(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v.strip()]


def _index_values(text: str) -> list:
    out = []
    for v in str(text).split(","):
        v = v.strip()
        if not v:
            continue
        f = float(v)
        out.append(int(f) if f.is_integer() and "." not in v and "e" not in v.lower() else f)
    return out


def _window(text: str) -> list[tuple[float, float]]:
    # "a,b" or "a,b;c,d" for unions
    ivs = []
    for part in str(text).split(";"):
        vals = _floats(part)
        if len(vals) != 2:
            raise UsageError(f"window {part!r} must be 'a,b'")
        ivs.append((vals[0], vals[1]))
    return ivs


def _param_value(text: str):
    text = text.strip()
    if ";" in text:
        return [_floats(row) for row in text.split(";")]
    if "," in text:
        return _floats(text)
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def parse_params(pairs) -> dict:
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"model parameter {item!r} must be key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = _param_value(value)
    return out


def build_model(name: str, params: dict):
    if name not in models.MODEL_REGISTRY:
        raise UsageError(f"unknown model {name!r}; available: {', '.join(sorted(models.MODEL_REGISTRY))}")
    try:
        return models.MODEL_REGISTRY[name](**params)
    except TypeError as exc:
        raise UsageError(f"bad parameters for model {name!r}: {exc}") from None


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dump_json(doc) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_jsonable(row.get(c, "")) for c in CSV_COLUMNS])
    return buf.getvalue()


# --- experiments ----------------------------------------------------------------------

def run_density(cfg: dict) -> dict:
    law = StableLaw(float(cfg.get("c", 1.0)), float(cfg.get("alpha", 2.0)), float(cfg.get("beta", 0.0)))
    x = np.linspace(float(cfg.get("xmin", -5)), float(cfg.get("xmax", 5)), int(cfg.get("points", 101)))
    return {"law": {"c": law.c, "alpha": law.alpha, "beta": law.beta},
            "x": x.tolist(), "density": np.atleast_1d(law.density(x)).tolist()}


def run_zone(cfg: dict) -> dict:
    model = build_model(cfg["model"], cfg.get("params", {}))
    indices = cfg.get("indices") or list(model.default_indices)
    if isinstance(model, tilt.LaplaceModel):
        raise UsageError("zone checks apply to characteristic-function models")
    if model.name == "zeta2d":
        rows = [models.zeta_zone_check(model, int(n)) for n in indices]
        return {"model": model.name, "passed": all(r["passed"] for r in rows), "rows": rows}
    overrides = {k: float(cfg[k]) for k in ("K", "gamma", "nu", "omega", "K1", "K2") if cfg.get(k) is not None}
    if overrides:
        base = model.zone_of(indices[0])
        if base is None and not {"K", "gamma", "nu", "omega", "K1"} <= set(overrides):
            raise UsageError(f"model {model.name!r} declares no zone; give K, gamma, nu, omega and K1")
        fields = {} if base is None else dict(K=base.K, gamma=base.gamma, nu=base.nu, omega=base.omega,
                                              K1=base.K1, K2=base.K2)
        fields.update(overrides)
        # per-index constants are kept unless overridden explicitly
        rows = []
        for n in indices:
            z = model.zone_of(n)
            local = {} if z is None else dict(K=z.K, gamma=z.gamma, nu=z.nu, omega=z.omega, K1=z.K1, K2=z.K2)
            local.update(overrides)
            rows.extend(modphi.verify_zone(model, [n], modphi.ZoneOfControl(**local),
                                           grid_points=int(cfg.get("grid_points", 512))).rows)
        report = modphi.ZoneReport(model.name, modphi.ZoneOfControl(**fields), rows)
    else:
        report = modphi.verify_zone(model, indices, grid_points=int(cfg.get("grid_points", 512)))
    return report.to_dict()


def _llt_row(rep, t_n) -> dict:
    d = rep.to_dict()
    win = d["window"]
    a, b = (win[0][0], win[0][1]) if len(win) == 1 else ("", "")
    return {"model": d["model"], "n": d["n"], "t_n": t_n, "delta": d["delta"],
            "x": d["x"] if not isinstance(d["x"], list) else " ".join(map(str, d["x"])),
            "window_a": a, "window_b": b, "lhs": d["lhs"], "target": d["target"],
            "abs_err": d["abs_err"], "rel_err": d["rel_err"], "method": d["method"],
            "seed": d["seed"] if d["seed"] is not None else ""}


def run_llt(cfg: dict) -> dict:
    model = build_model(cfg["model"], cfg.get("params", {}))
    indices = cfg.get("indices") or list(model.default_indices)
    window = cfg.get("window") or [(-1.0, 1.0)]
    method = cfg.get("method", "exact")
    seed = int(cfg.get("seed", 0))
    budget = int(cfg.get("mc_budget", 100_000))
    results = []
    rows = []
    for n in indices:
        if isinstance(model, tilt.LaplaceModel):
            for eps in cfg.get("delta") or [0.5]:
                rep = tilt.tilted_local_limit(model, n, float(cfg.get("x", 0.0)), window, float(eps))
                results.append(rep.to_dict())
                rows.append(_llt_row(rep, model.t(n)))
            continue
        x = cfg.get("x", 0.0)
        if model.dimension == 2:
            x = tuple(x) if isinstance(x, (list, tuple)) else (float(x), 0.0)
            B = window if len(window) == 2 else [window[0], window[0]]
        else:
            x = float(x[0]) if isinstance(x, (list, tuple)) else float(x)
            B = window
        if cfg.get("scale"):
            for s in cfg["scale"]:
                rep = modphi.strong_local_limit(model, n, x, B, float(s), method=method,
                                                mc_budget=budget, seed=seed)
                results.append(rep.to_dict())
                rows.append(_llt_row(rep, model.t(n)))
            continue
        for delta in cfg.get("delta") or [0.4]:
            rep = modphi.local_limit_estimate(model, n, x, B, float(delta), method=method,
                                              mc_budget=budget, seed=seed)
            results.append(rep.to_dict())
            rows.append(_llt_row(rep, model.t(n)))
    return {"model": model.name, "results": results, "rows": rows}


RUNNERS = {"density": run_density, "zone": run_zone, "llt": run_llt}


def execute(command: str, cfg: dict) -> tuple[dict, int]:
    """Run one experiment; numerical failures are reported in-band with status 1."""
    doc = {"command": command, "config": cfg, "version": __version__}
    try:
        doc["result"] = RUNNERS[command](cfg)
        doc["status"] = "ok"
        return doc, 0
    except UsageError:
        raise
    except (ArithmeticError, modphi.CapabilityError, modphi.PreconditionError) as exc:
        doc["status"] = "error"
        doc["error"] = f"{type(exc).__name__}: {exc}"
        return doc, 1


# --- config-file batch mode -------------------------------------------------------------

def _experiment_config(section) -> tuple[str, dict]:
    raw = dict(section)
    command = raw.pop("command", "llt")
    if command not in RUNNERS:
        raise UsageError(f"unknown command {command!r}")
    cfg: dict = {}
    params = {}
    for key, value in raw.items():
        if key.startswith("param."):
            params[key[len("param."):]] = _param_value(value)
        elif key in ("index", "indices") or key in INDEX_ALIASES:
            cfg["indices"] = _index_values(value)
        elif key == "window":
            cfg["window"] = _window(value)
        elif key in ("delta", "scale"):
            cfg[key] = _floats(value)
        elif key == "x":
            vals = _floats(value)
            cfg["x"] = vals[0] if len(vals) == 1 else vals
        else:
            cfg[key] = _param_value(value)
    if params:
        cfg["params"] = params
    return command, cfg


def run_report(path: str, out_dir: str | None = None) -> int:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    if not parser.read(path, encoding="utf-8"):
        raise UsageError(f"cannot read config {path!r}")
    settings = parser["report"] if parser.has_section("report") else {}
    master = int(settings.get("seed", 0))
    target = Path(out_dir or settings.get("output", "report"))
    names = [s for s in parser.sections() if s != "report"]
    if not names:
        raise UsageError("config lists no experiments")
    plans = []
    children = np.random.SeedSequence(master).spawn(len(names))
    for name, child in zip(names, children):
        command, cfg = _experiment_config(parser[name])
        cfg.setdefault("seed", int(child.generate_state(1)[0]))
        plans.append((name, command, cfg))
    with ThreadPoolExecutor(max_workers=modphi.mc_workers()) as pool:
        outcomes = list(pool.map(lambda p: execute(p[1], p[2]), plans))
    target.mkdir(parents=True, exist_ok=True)
    rows = []
    status = 0
    for (name, command, _), (doc, code) in zip(plans, outcomes):
        doc["experiment"] = name
        (target / f"{name}.json").write_text(dump_json(doc), encoding="utf-8", newline="\n")
        if command == "llt":
            rows.extend(doc.get("result", {}).get("rows", []))
        status = max(status, code)
    (target / "summary.csv").write_text(rows_to_csv(rows), encoding="utf-8", newline="\n")
    return status


# --- argparse ----------------------------------------------------------------------------

def _add_model_args(p):
    p.add_argument("--model", required=True, choices=sorted(models.MODEL_REGISTRY),
                   metavar="MODEL", help="one of: " + ", ".join(sorted(models.MODEL_REGISTRY)))
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="model hyperparameter, e.g. p=0.5 or P='0.7,0.3;0.2,0.8'")
    for alias in ("index",) + INDEX_ALIASES:
        p.add_argument(f"--{alias}", dest="indices", type=_index_values, default=None,
                       help=argparse.SUPPRESS if alias != "index" else "comma-separated indices")
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modlab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", help="tabulate a stable density")
    d.add_argument("--c", type=float, default=1.0)
    d.add_argument("--alpha", type=float, default=2.0)
    d.add_argument("--beta", type=float, default=0.0)
    d.add_argument("--xmin", type=float, default=-5.0)
    d.add_argument("--xmax", type=float, default=5.0)
    d.add_argument("--points", type=int, default=101)
    d.add_argument("--out")

    z = sub.add_parser("zone", help="verify a zone of control")
    _add_model_args(z)
    for key in ("K", "gamma", "nu", "omega", "K1", "K2"):
        z.add_argument(f"--{key}", type=float, default=None)
    z.add_argument("--grid-points", type=int, default=512)

    ll = sub.add_parser("llt", help="local-limit convergence table")
    _add_model_args(ll)
    ll.add_argument("--x", type=_floats, default=[0.0])
    ll.add_argument("--window", type=_window, default=[(-1.0, 1.0)])
    ll.add_argument("--delta", type=_floats, default=None, help="exponents (epsilon for tilted models)")
    ll.add_argument("--scale", type=_floats, default=None, help="explicit scales s_n")
    ll.add_argument("--method", default="exact", choices=("exact", "parseval", "fourier", "montecarlo"))
    ll.add_argument("--seed", type=int, default=0)
    ll.add_argument("--mc-budget", type=int, default=100_000)
    ll.add_argument("--format", choices=("json", "csv"), default="json")

    r = sub.add_parser("report", help="batch experiments from a config file")
    r.add_argument("config")
    r.add_argument("--out-dir")
    return parser


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _attach_negative_values(argv):
    # keep "--window -1,1" from being read as an option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--window", "--x", "--xmin", "--xmax", "--delta", "--beta"):
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and nxt[1:2].replace(".", "").isdigit():
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "report":
            return run_report(args.config, args.out_dir)
        if args.command == "density":
            cfg = {k: getattr(args, k) for k in ("c", "alpha", "beta", "xmin", "xmax", "points")}
        else:
            cfg = {"model": args.model, "params": parse_params(args.param), "indices": args.indices}
            if args.command == "zone":
                cfg.update({k: getattr(args, k) for k in ("K", "gamma", "nu", "omega", "K1", "K2")})
                cfg["grid_points"] = args.grid_points
            else:
                cfg.update(x=args.x[0] if len(args.x) == 1 else args.x, window=args.window,
                           delta=args.delta, scale=args.scale, method=args.method, seed=args.seed,
                           mc_budget=args.mc_budget)
        doc, code = execute(args.command, cfg)
    except (UsageError, ValueError) as exc:
        print(f"modlab: error: {exc}", file=sys.stderr)
        return 2
    if args.command == "llt" and args.format == "csv":
        _emit(rows_to_csv(doc.get("result", {}).get("rows", [])), args.out)
    else:
        _emit(dump_json(doc), args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())

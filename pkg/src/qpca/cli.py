"""Command-line front end: ``qpca analyze | compare | validate | bench``.

Parameter precedence: command-line flags, then ``--config`` (``key = value``
lines), then ``QPCA_SEED`` for the seed, then built-in defaults.

Exit codes: 0 success, 1 failed validation, 2 bad input or configuration,
3 gap too small (partial report still written).
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__, acceptance, baseline, covariance, dme, linalg, power, synthetic
from .errors import GapTooSmall, QPCAError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GAP = 0, 1, 2, 3

DEFAULTS = {
    "seed": 1234,
    "eps": 1e-2,
    "R": 1,
    "route": "B",
    "mode": "oracle",
    "log_mode": "polynomial",
    "gap_floor": power.GAP_FLOOR,
    "c_dme": 1.0,
    "weights": "uniform",
    "centered": True,
    "shots": "exact",
}


class ConfigError(Exception):
    pass


def _floats(text):
    if text is None or text == "":
        return []
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text):
    return [int(x) for x in _floats(text)]


def read_config(path) -> dict:
    out = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, value = (s.strip() for s in line.split("=", 1))
                out[key.replace("-", "_")] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return out


_CASTS = {
    "seed": int,
    "eps": float,
    "R": int,
    "gap_floor": float,
    "c_dme": float,
    "centered": lambda v: v if isinstance(v, bool) else str(v).lower() in ("1", "true", "yes"),
}


def resolve(args, keys, defaults=None) -> dict:
    """Merge flags, config file, environment and defaults for ``keys``."""
    defaults = {**DEFAULTS, **(defaults or {})}
    file_cfg = read_config(args.config) if getattr(args, "config", None) else {}
    cfg = {}
    for key in keys:
        value = getattr(args, key, None)
        if value is None:
            value = file_cfg.get(key)
        if value is None and key == "seed" and os.environ.get("QPCA_SEED"):
            value = os.environ["QPCA_SEED"]
        if value is None:
            value = defaults.get(key)
        if value is not None and key in _CASTS:
            try:
                value = _CASTS[key](value)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {value!r}") from None
        cfg[key] = value
    return cfg


def _vector_json(v):
    return [[float(z.real), float(z.imag)] for z in v]


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(command, cfg, body) -> str:
    doc = {
        "command": command,
        "version": __version__,
        "seed": cfg.get("seed"),
        "config": cfg,
        **body,
        "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _components_json(found, truth: linalg.Spectrum):
    rows = []
    for i, c in enumerate(found):
        rows.append({
            "value": c.value,
            "vector": _vector_json(c.vector),
            "residual": c.residual,
            "k": c.k,
            "oracle_value": float(truth.eigenvalues[i]),
            "overlap_with_oracle": float(abs(np.vdot(truth.vector(i), c.vector))),
        })
    return rows


def cmd_analyze(args) -> int:
    keys = ["seed", "eps", "R", "route", "mode", "log_mode", "gap_floor", "c_dme", "weights", "centered", "shots"]
    cfg = resolve(args, keys)
    cfg["data"] = args.data
    cfg["spectrum"] = args.spectrum
    if bool(args.data) == bool(args.spectrum):
        raise ConfigError("give exactly one of --data or --spectrum")
    if not 0 < cfg["eps"] < 0.5:
        raise ConfigError("eps must lie in (0, 1/2)")
    if cfg["R"] < 1:
        raise ConfigError("R must be positive")
    warnings = []
    source_info = {}
    if args.spectrum:
        values = np.array(_floats(args.spectrum))
        if values.size == 0 or np.any(values < 0) or abs(values.sum() - 1) > 1e-9:
            raise ConfigError("spectrum must be nonnegative and sum to 1")
        if not linalg.is_power_of_two(values.size):
            raise ConfigError("spectrum length must be a power of two")
        rng = np.random.default_rng(cfg["seed"])
        rho = synthetic.density_from_spectrum(values, rng)
        source = power.DensitySource(rho, mode=cfg["mode"], log_mode=cfg["log_mode"], c_dme=cfg["c_dme"])
        truth_matrix = rho
        source_info = {"kind": "spectrum", "values": values.tolist()}
    else:
        if not os.path.exists(args.data):
            raise ConfigError(f"data file not found: {args.data}")
        ds = covariance.load_dataset(args.data, cfg["weights"])
        if np.any(np.abs(ds.raw_norms - 1) > 1e-9):
            warnings.append("data vectors were normalized to unit length; results differ from PCA on raw vectors")
        if cfg["centered"]:
            bundle = covariance.covariance_encoding(ds, cfg["route"], cfg["eps"] if cfg["route"] == "A" else None, c_dme=cfg["c_dme"])
            source = power.FixedEncoding(bundle.encoding, mode=cfg["mode"], c_dme=cfg["c_dme"])
            truth_matrix = bundle.centered_target
            ledger0 = bundle.ledger.to_dict()
        else:
            rho = covariance.second_moment(ds)
            source = power.DensitySource(rho, mode=cfg["mode"], log_mode=cfg["log_mode"], c_dme=cfg["c_dme"])
            truth_matrix = rho
            ledger0 = None
        source_info = {"kind": "dataset", "points": ds.N, "dim": ds.n, "raw_dim": ds.raw_dim,
                       "centered": cfg["centered"], "route": cfg["route"], "preparation_ledger": ledger0}
    truth = linalg.eigh(truth_matrix)
    status, code = "ok", EXIT_OK
    try:
        found = power.qpca_components(source, cfg["R"], cfg["eps"], seed=cfg["seed"],
                                      gap_floor=cfg["gap_floor"], shots=cfg["shots"])
    except GapTooSmall as exc:
        found = exc.partial or power.ComponentList([])
        status, code = f"gap too small: {exc}", EXIT_GAP
    body = {
        "status": status,
        "source": source_info,
        "warnings": warnings,
        "components": _components_json(found.components, truth),
        "oracle": {"eigenvalues": truth.eigenvalues.tolist()},
        "ledger": found.total_ledger.to_dict(),
    }
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    _emit(_report("analyze", cfg, body), args.out)
    return code


def cmd_compare(args) -> int:
    cfg = resolve(args, ["seed"])
    eps_list = _floats(args.eps_list)
    Rs = _ints(args.R_list)
    if args.uniform:
        grid = [{"R": R, "eps": e, "gamma": e, "r_min": 1.0 / R} for R in Rs for e in eps_list]
    else:
        gammas, r_mins = _floats(args.gammas), _floats(args.r_mins)
        grid = [{"R": R, "eps": e, "gamma": g, "r_min": r}
                for R, e, g, r in itertools.product(Rs, eps_list, gammas, r_mins)]
    if not grid:
        raise ConfigError("empty comparison grid")
    cfg.update({"grid_points": len(grid), "uniform": args.uniform, "empirical": args.empirical})
    buf = io.StringIO()
    fields = ["regime", "convention", "R", "eps", "gamma", "r_min", "n",
              "original_copies", "new_copies", "original_depth", "new_depth", "winner", "empirical_original_copies"]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    rng = np.random.default_rng(cfg["seed"])
    for point in grid:
        point = {**point, "n": args.n}
        empirical = ""
        if args.empirical and point["R"] <= 8 and point["eps"] >= 0.02:
            values = np.full(point["R"], 1.0 / point["R"]) if args.uniform else None
            if values is not None:
                padded = np.zeros(1 << max(1, (point["R"] - 1).bit_length()))
                padded[: point["R"]] = values
                _, rep = baseline.sample_components(np.diag(padded).astype(complex), point["eps"], point["R"],
                                                    seed=int(rng.integers(2**62)))
                empirical = rep.copies
        for conv in baseline.CONVENTIONS:
            try:
                orig = baseline.cost_model("original", point, conv)
                new = baseline.cost_model("new", point, conv)
            except QPCAError as exc:
                raise ConfigError(str(exc)) from None
            writer.writerow({
                "regime": "uniform" if args.uniform else "gapped",
                "convention": conv, **point,
                "original_copies": f"{orig.copies:.6g}", "new_copies": f"{new.copies:.6g}",
                "original_depth": f"{orig.depth:.6g}", "new_depth": f"{new.depth:.6g}",
                "winner": "original" if orig.copies < new.copies else "new",
                "empirical_original_copies": empirical,
            })
    header = f"# qpca {__version__} compare; natural logs, unit constants; seed {cfg['seed']}\n"
    _emit(header + buf.getvalue(), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    seed = resolve(args, ["seed"], {"seed": acceptance.DEFAULT_SEED})["seed"]
    only = [s for part in (args.only or []) for s in part.split(",") if s]
    results = acceptance.run(only, seed=seed, echo=print)
    if not results:
        raise ConfigError(f"no criteria match {only}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_bench(args) -> int:
    cfg = resolve(args, ["seed"])
    steps = _ints(args.steps) or [8, 16, 32, 64, 128, 256, 512]
    if args.dim < 2 or not linalg.is_power_of_two(args.dim) or any(s < 1 for s in steps):
        raise ConfigError("dim must be a power of two >= 2 and steps positive")
    rng = np.random.default_rng(cfg["seed"])
    rho = synthetic.random_density(args.dim, rng)
    rows = [{"steps": n, "error": dme.exponentiate_density(rho, args.t, n_steps=n).empirical_error} for n in steps]
    slope = float(np.polyfit(np.log(steps), np.log([r["error"] for r in rows]), 1)[0]) if len(steps) > 1 else math.nan
    cfg.update({"dim": args.dim, "t": args.t, "steps": steps})
    _emit(_report("bench", cfg, {"rows": rows, "loglog_slope": slope}), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpca", description="Quantum PCA simulator")
    p.add_argument("--version", action="version", version=f"qpca {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value parameter file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output file (default stdout)")

    a = sub.add_parser("analyze", help="principal components of a dataset or synthetic spectrum")
    common(a)
    a.add_argument("--data", help="CSV dataset")
    a.add_argument("--spectrum", help="comma-separated eigenvalues of a synthetic density matrix")
    a.add_argument("--R", type=int)
    a.add_argument("--eps", type=float)
    a.add_argument("--route", choices=["A", "B"])
    a.add_argument("--mode", choices=["oracle", "sample"])
    a.add_argument("--log-mode", dest="log_mode", choices=["polynomial", "oracle"])
    a.add_argument("--gap-floor", dest="gap_floor", type=float)
    a.add_argument("--c-dme", dest="c_dme", type=float)
    a.add_argument("--weights", choices=["uniform", "column"])
    a.add_argument("--shots", choices=["exact", "sampled"])
    a.add_argument("--uncentered", dest="centered", action="store_const", const=False)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("compare", help="cost comparison of the original and new methods")
    common(c)
    c.add_argument("--gammas", default="0.5,0.6,0.7,0.8,0.9")
    c.add_argument("--r-mins", dest="r_mins", default="1e-4,1e-5,1e-6,1e-7,1e-8")
    c.add_argument("--eps-list", dest="eps_list", default="0.1")
    c.add_argument("--R-list", dest="R_list", default="2")
    c.add_argument("--n", type=int, default=64)
    c.add_argument("--uniform", action="store_true", help="uniform rank-R spectra (gamma = eps, r_min = 1/R)")
    c.add_argument("--empirical", action="store_true", help="add realized sampler copy counts where cheap")
    c.set_defaults(func=cmd_compare)

    v = sub.add_parser("validate", help="run the acceptance suite")
    v.add_argument("--config")
    v.add_argument("--seed", type=int)
    v.add_argument("--only", action="append", help="criterion numbers or module tags, comma separated")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("bench", help="density-matrix exponentiation error versus step count")
    common(b)
    b.add_argument("--dim", type=int, default=4)
    b.add_argument("--t", type=float, default=0.5)
    b.add_argument("--steps", default="")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, QPCAError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

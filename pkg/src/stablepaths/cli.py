"""Batch front end: strict JSON configs in, CSV/JSON reports and SVGs out.

Subcommands:

    run         execute the configured verification suites
    paths-demo  emit one orbit's rescaled paths plus a stable path as CSV/SVG
    metric      certified J1/M1 bracket between two step-path CSV files

Exit status: 0 success, 1 at least one suite metric failed, 2 malformed
config or input.  Reports are byte-identical across reruns with the same
config and seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, diagnostics, inducing, maps, stable
from .cadlag import StepPath, j1_distance, m1_distance
from .errors import ValidationError
from .rng import derive
from . import _svg


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"config error at {path}: {message}")


# ---------------------------------------------------------------------------
# Schema validation (strict: unknown keys are rejected with their path)
# ---------------------------------------------------------------------------

def _expect_dict(obj, path, fields):
    if not isinstance(obj, dict):
        raise ConfigError(path, f"expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in fields:
            raise ConfigError(path, f"unknown key {key!r}")
    for key, (required, checker) in fields.items():
        if key in obj:
            checker(obj[key], f"{path}.{key}")
        elif required:
            raise ConfigError(path, f"missing required key {key!r}")


def _number(lo=None, hi=None):
    def check(v, path):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(path, f"expected a number, got {type(v).__name__}")
        if lo is not None and v < lo:
            raise ConfigError(path, f"must be >= {lo}, got {v}")
        if hi is not None and v > hi:
            raise ConfigError(path, f"must be <= {hi}, got {v}")
    return check


def _integer(lo=None, hi=None):
    def check(v, path):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(path, f"expected an integer, got {type(v).__name__}")
        if lo is not None and v < lo:
            raise ConfigError(path, f"must be >= {lo}, got {v}")
        if hi is not None and v > hi:
            raise ConfigError(path, f"must be <= {hi}, got {v}")
    return check


def _string(choices=None):
    def check(v, path):
        if not isinstance(v, str):
            raise ConfigError(path, f"expected a string, got {type(v).__name__}")
        if choices is not None and v not in choices:
            raise ConfigError(path, f"must be one of {sorted(choices)}, got {v!r}")
    return check


def _boolean(v, path):
    if not isinstance(v, bool):
        raise ConfigError(path, f"expected a boolean, got {type(v).__name__}")


def _list_of(checker, min_len=1):
    def check(v, path):
        if not isinstance(v, list):
            raise ConfigError(path, f"expected a list, got {type(v).__name__}")
        if len(v) < min_len:
            raise ConfigError(path, f"needs at least {min_len} entries")
        for i, item in enumerate(v):
            checker(item, f"{path}[{i}]")
    return check


def _indicator(v, path):
    if not isinstance(v, list) or len(v) != 3:
        raise ConfigError(path, "expected [coef, lo, hi]")
    for i, item in enumerate(v):
        _number()(item, f"{path}[{i}]")


def _density_entry(v, path):
    _expect_dict(v, path, {
        "family": (True, _string({"uniform", "polynomial", "histogram"})),
        "params": (False, _list_of(_number(), 1)),
    })


_CENTERING = {
    "mode": (True, _string({"auto", "fixed"})),
    "orbit_length": (False, _integer(1000)),
    "burn_in": (False, _integer(0)),
    "x0": (False, _number(0.0, 1.0)),
    "offset": (False, _number()),
}

_DENSITY_ESTIMATE = {
    "orbit_length": (False, _integer(10_000)),
    "bins": (False, _integer(8)),
    "burn_in": (False, _integer(0)),
}

_SUITE_FIELDS = {
    "lap_sllns": {
        "T": (False, _number(1e-9)),
        "k_grid": (False, _list_of(_integer(10), 2)),
        "trials": (False, _integer(2)),
        "kac_members": (False, _integer(1)),
        "kac_per_member": (False, _integer(1)),
        "kac_discard": (False, _integer(0)),
        "kac_threshold": (False, _number(0.0)),
    },
    "monotonicity": {
        "n_grid": (False, _list_of(_integer(1), 2)),
        "orbits": (False, _integer(2)),
        "bound_members": (False, _integer(1)),
        "bound_per_member": (False, _integer(1)),
    },
    "excursion_bound": {
        "n": (False, _integer(10)),
        "T": (False, _number(1e-9)),
        "trials": (False, _integer(1)),
        "tol": (False, _number(0.0)),
        "trend_grid": (False, _list_of(_integer(10), 2)),
        "trend_members": (False, _integer(1)),
    },
    "wip_marginal": {
        "n_grid": (False, _list_of(_integer(1), 2)),
        "ensembles": (False, _integer(10)),
        "induced_final_threshold": (False, _number(0.0)),
        "strong_threshold": (False, _number(0.0)),
        "densities": (False, _list_of(_density_entry, 2)),
        "kac_members": (False, _integer(1)),
        "kac_per_member": (False, _integer(1)),
        "kac_discard": (False, _integer(0)),
    },
    "topology_probe": {
        "n_grid": (False, _list_of(_integer(1), 2)),
        "ensembles": (False, _integer(10)),
        "levy_step": (False, _number(1e-9, 1.0)),
        "levy_paths": (False, _integer(10)),
        "spread_threshold": (False, _number(0.0)),
    },
    "tail": {
        "members": (False, _integer(1)),
        "per_member": (False, _integer(1)),
        "discard": (False, _integer(0)),
        "n_min": (False, _number(1.0)),
        "rel_threshold": (False, _number(0.0)),
        "pareto_rel_threshold": (False, _number(0.0)),
    },
}


def _suite_entry(v, path):
    if not isinstance(v, dict):
        raise ConfigError(path, f"expected an object, got {type(v).__name__}")
    name = v.get("name")
    if name is None:
        raise ConfigError(path, "missing required key 'name'")
    _string(set(_SUITE_FIELDS))(name, f"{path}.name")
    fields = dict(_SUITE_FIELDS[name])
    fields["name"] = (True, _string(set(_SUITE_FIELDS)))
    _expect_dict(v, path, fields)


_ROOT = {
    "map": (True, lambda v, p: _expect_dict(v, p, {
        "gamma": (True, _number(0.0, 1.0)),
        "kind": (False, _string({"LSV"})),
    })),
    "observable": (True, lambda v, p: _expect_dict(v, p, {
        "family": (True, _string({"const", "affine", "power"})),
        "params": (True, _list_of(_number(), 1)),
        "indicators": (False, _list_of(_indicator, 1)),
    })),
    "calibration": (False, lambda v, p: _expect_dict(v, p, {
        "centering": (False, lambda v2, p2: _expect_dict(v2, p2, _CENTERING)),
        "density_estimate": (False, lambda v2, p2: _expect_dict(v2, p2, _DENSITY_ESTIMATE)),
    })),
    "seed": (True, _integer(0, 2**64 - 1)),
    "output_dir": (False, _string()),
    "plot": (False, _boolean),
    "suites": (False, _list_of(_suite_entry, 1)),
    "demo": (False, lambda v, p: _expect_dict(v, p, {
        "n": (False, _integer(10)),
        "T": (False, _number(1e-9)),
        "levy_grid_step": (False, _number(1e-9, 1.0)),
    })),
}


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("$", f"cannot read config: {exc}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}")
    _expect_dict(cfg, "$", _ROOT)
    return cfg


# ---------------------------------------------------------------------------
# Resolution: config -> domain objects
# ---------------------------------------------------------------------------

def _build_observable(cfg: dict, spec: maps.MapSpec) -> maps.ObservableSpec:
    oc = cfg["observable"]
    indicators = tuple(tuple(t) for t in oc.get("indicators", []))
    raw = maps.ObservableSpec(oc["family"], tuple(oc["params"]), indicators)
    cent = cfg.get("calibration", {}).get("centering", {"mode": "auto"})
    if cent["mode"] == "fixed":
        if "offset" not in cent:
            raise ConfigError("$.calibration.centering", "fixed mode needs 'offset'")
        return raw.with_offset(cent["offset"], {"mode": "fixed"})
    return maps.calibrate_centering(
        spec,
        raw,
        orbit_length=cent.get("orbit_length", 2_000_000),
        burn_in=cent.get("burn_in", 10_000),
        x0=cent.get("x0", 0.37),
    )


def _density_estimate(cfg: dict, spec: maps.MapSpec, seed: int) -> maps.DensityEstimate:
    de = cfg.get("calibration", {}).get("density_estimate", {})
    return maps.estimate_invariant_density(
        spec,
        n=de.get("orbit_length", 5_000_000),
        bins=de.get("bins", 256),
        burn_in=de.get("burn_in", 10_000),
        rng=derive(seed, 1000),
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


_NEEDS_DENSITY = {"wip_marginal", "topology_probe"}


def run_suites(cfg: dict, out_dir: Path, plot: bool) -> int:
    seed = cfg["seed"]
    spec = maps.MapSpec(gamma=cfg["map"]["gamma"], kind=cfg["map"].get("kind", "LSV"))
    obs = _build_observable(cfg, spec)
    suites_cfg = cfg.get("suites", [])

    dens = None
    if any(s["name"] in _NEEDS_DENSITY for s in suites_cfg):
        dens = _density_estimate(cfg, spec, seed)

    reports = []
    for sc in suites_cfg:
        name = sc["name"]
        if name == "lap_sllns":
            rep = diagnostics.lap_sllns(
                spec,
                sc.get("T", 1.0),
                sc.get("k_grid", [1000, 10_000, 100_000]),
                sc.get("trials", 31),
                seed=seed,
                kac_members=sc.get("kac_members", 1000),
                kac_per_member=sc.get("kac_per_member", 1000),
                kac_discard=sc.get("kac_discard", 100),
                kac_threshold=sc.get("kac_threshold", 0.02),
            )
        elif name == "monotonicity":
            rep = diagnostics.monotonicity_suite(
                spec,
                obs,
                sc.get("n_grid", [100, 10_000]),
                sc.get("orbits", 1000),
                seed=seed,
                bound_members=sc.get("bound_members", 256),
                bound_per_member=sc.get("bound_per_member", 400),
            )
        elif name == "excursion_bound":
            rep = diagnostics.excursion_bound_check(
                spec,
                obs,
                sc.get("n", 1000),
                sc.get("T", 1.0),
                sc.get("trials", 100),
                seed=seed,
                tol=sc.get("tol", 1e-6),
                trend_grid=sc.get("trend_grid", [100, 10_000]),
                trend_members=sc.get("trend_members", 100),
            )
        elif name == "wip_marginal":
            densities = None
            if "densities" in sc:
                densities = tuple(
                    maps.DensitySpec(d["family"], tuple(d.get("params", ())))
                    for d in sc["densities"][:2]
                )
            rep = diagnostics.wip_marginal_suite(
                spec,
                obs,
                sc.get("n_grid", [100, 1000, 10_000]),
                sc.get("ensembles", 4000),
                dens.h_half,
                seed=seed,
                densities=densities,
                induced_final_threshold=sc.get("induced_final_threshold", 0.08),
                strong_threshold=sc.get("strong_threshold", 0.05),
                kac_members=sc.get("kac_members", 1000),
                kac_per_member=sc.get("kac_per_member", 1000),
                kac_discard=sc.get("kac_discard", 100),
            )
        elif name == "topology_probe":
            law = stable.from_lsv_params(spec.gamma, obs.phi_at_zero, dens.h_half)
            rep = diagnostics.topology_probe(
                spec,
                obs,
                sc.get("n_grid", [100, 1000, 10_000]),
                sc.get("ensembles", 2000),
                law,
                seed=seed,
                levy_step=sc.get("levy_step", 1.0 / 2048.0),
                levy_paths=sc.get("levy_paths", 2000),
                spread_threshold=sc.get("spread_threshold", 0.20),
            )
        elif name == "tail":
            rep = diagnostics.tail_suite(
                spec,
                seed=seed,
                members=sc.get("members", 1000),
                per_member=sc.get("per_member", 1000),
                discard=sc.get("discard", 100),
                n_min=sc.get("n_min", 5.0),
                rel_threshold=sc.get("rel_threshold", 0.10),
                pareto_rel_threshold=sc.get("pareto_rel_threshold", 0.05),
            )
        else:  # unreachable after validation
            raise ConfigError("$.suites", f"unknown suite {name!r}")
        reports.append(rep)

    out_dir.mkdir(parents=True, exist_ok=True)
    for i, rep in enumerate(reports):
        stem = f"{i:02d}_{rep.suite_name}"
        (out_dir / f"{stem}.csv").write_text(rep.metrics_csv(), encoding="utf-8")
        curve = _suite_curve_csv(rep)
        if curve is not None:
            (out_dir / f"{stem}_curve.csv").write_text(curve, encoding="utf-8")
        if plot:
            svg = _suite_svg(rep)
            if svg is not None:
                (out_dir / f"{stem}.svg").write_text(svg, encoding="utf-8")

    mu_y_hat = None
    if suites_cfg:
        mu_y_hat = diagnostics._estimate_mu_y(spec, derive(seed, 1001))

    report = {
        "tool": {"name": "stablepaths", "version": __version__},
        "config": cfg,
        "resolved": {
            "seed": seed,
            "centering_offset": obs.centering_offset,
            "centering_calibration": obs.calibration,
            "phi_at_zero": obs.phi_at_zero,
            "mu_y_hat": mu_y_hat,
            "h_half": dens.h_half if dens is not None else None,
            "density_quality_warning": dens.quality_warning if dens is not None else None,
        },
        "suites": [rep.to_json_dict() for rep in reports],
        "passed": all(rep.all_pass for rep in reports),
    }
    (out_dir / "report.json").write_text(
        json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for rep in reports:
        status = "PASS" if rep.all_pass else "FAIL"
        print(f"[{status}] {rep.suite_name}")
    return 0 if report["passed"] else 1


def _suite_curve_csv(rep) -> str | None:
    md = rep.metadata
    if rep.suite_name == "lap_sllns":
        rows = ["k,sup_error_median"]
        rows += [f"{k},{v:.17g}" for k, v in zip(md["k_grid"], md["sup_error_medians"])]
        return "\n".join(rows) + "\n"
    if rep.suite_name == "wip_marginal":
        rows = ["n,induced_ks,full_ks,holder_part_median"]
        rows += [
            f"{n},{a:.17g},{b:.17g},{c:.17g}"
            for n, a, b, c in zip(
                md["n_grid"], md["induced_ks"], md["full_ks"], md["holder_part_medians"]
            )
        ]
        return "\n".join(rows) + "\n"
    if rep.suite_name == "monotonicity":
        rows = ["n,normalized_median"]
        rows += [f"{n},{v:.17g}" for n, v in zip(md["n_grid"], md["medians_normalized"])]
        return "\n".join(rows) + "\n"
    if rep.suite_name == "topology_probe":
        rows = ["n,sup_ks,levy_max_jump_median"]
        rows += [
            f"{n},{a:.17g},{b:.17g}"
            for n, a, b in zip(md["n_grid"], md["sup_ks"], md["levy_max_jump_medians"])
        ]
        return "\n".join(rows) + "\n"
    if rep.suite_name == "excursion_bound":
        rows = ["n,median_rhs"]
        rows += [f"{n},{v:.17g}" for n, v in zip(md["trend_grid"], md["trend_medians"])]
        return "\n".join(rows) + "\n"
    return None


def _suite_svg(rep) -> str | None:
    md = rep.metadata
    if rep.suite_name == "wip_marginal":
        return _svg.line_chart(
            [
                ("induced KS", md["n_grid"], md["induced_ks"]),
                ("full KS", md["n_grid"], md["full_ks"]),
            ],
            "n (log)", "KS distance", "marginal KS vs n", log_x=True,
        )
    if rep.suite_name == "lap_sllns":
        return _svg.line_chart(
            [("median sup error", md["k_grid"], md["sup_error_medians"])],
            "k (log)", "sup error", "occupation-time sup error", log_x=True,
        )
    if rep.suite_name == "monotonicity":
        return _svg.line_chart(
            [("median normalized max", md["n_grid"], md["medians_normalized"])],
            "n (log)", "B(n)^-1 max PhiStar", "weak-monotonicity decay", log_x=True,
        )
    if rep.suite_name == "topology_probe":
        return _svg.line_chart(
            [("sup-functional KS", md["n_grid"], md["sup_ks"])],
            "n (log)", "KS", "sup-functional two-sample KS", log_x=True,
        )
    if rep.suite_name == "excursion_bound":
        return _svg.line_chart(
            [("median RHS", md["trend_grid"], md["trend_medians"])],
            "n (log)", "bound", "excursion bound trend", log_x=True,
        )
    return None


# ---------------------------------------------------------------------------
# paths-demo
# ---------------------------------------------------------------------------

def run_paths_demo(cfg: dict, out_dir: Path, plot: bool) -> int:
    seed = cfg["seed"]
    spec = maps.MapSpec(gamma=cfg["map"]["gamma"], kind=cfg["map"].get("kind", "LSV"))
    obs = _build_observable(cfg, spec)
    demo = cfg.get("demo", {})
    n = demo.get("n", 1000)
    T = demo.get("T", 1.0)

    ys = inducing.sample_y_mu_like(spec, maps.DensitySpec("uniform"), derive(seed, 2000), 1)
    y = float(ys[0])
    bundle = inducing.scaled_paths(spec, obs, y, n, T)

    dens = _density_estimate(cfg, spec, seed)
    law = stable.from_lsv_params(spec.gamma, obs.phi_at_zero, dens.h_half)
    step = demo.get("levy_grid_step", 1.0 / 1024.0)
    n_steps = round(T / step)
    config = stable.LevyPathConfig(T=n_steps * step, grid_step=step)
    levy = stable.sample_levy_path(law, config, derive(seed, 2001))

    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "w_n.csv").write_text(bundle.W.to_csv(), encoding="utf-8")
    (out_dir / "u_n.csv").write_text(bundle.U.to_csv(), encoding="utf-8")
    (out_dir / "p_n.csv").write_text(bundle.P.to_csv(), encoding="utf-8")
    (out_dir / "levy_path.csv").write_text(levy.to_csv(), encoding="utf-8")

    if plot:
        trace = inducing.lap_numbers(spec, y, int(bundle.W.domain_end * n))
        t_breaks = [float(r) / n for r in trace.return_sums if r / n <= T]
        intervals = list(zip([0.0] + t_breaks, t_breaks + [T]))
        from .cadlag import completed_graph

        svg = _svg.path_overlay(
            [
                ("W_n", [tuple(v) for v in completed_graph(bundle.W).vertices]),
                ("U_n", [tuple(v) for v in completed_graph(bundle.U).vertices]),
            ],
            intervals,
            T,
            f"rescaled paths, n={n}",
        )
        (out_dir / "paths.svg").write_text(svg, encoding="utf-8")
    print(f"paths-demo artifacts written to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# metric tool
# ---------------------------------------------------------------------------

def run_metric(path1: str, path2: str, metric_tag: str, tol: float) -> int:
    try:
        g1 = StepPath.from_csv(Path(path1).read_text(encoding="utf-8"))
        g2 = StepPath.from_csv(Path(path2).read_text(encoding="utf-8"))
    except (OSError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        fn = j1_distance if metric_tag == "J1" else m1_distance
        res = fn(g1, g2, tol)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(res.to_json_dict(), sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", required=True, help="path to the JSON config")
    p.add_argument("--out", default=None, help="output directory (overrides config)")
    p.add_argument("--seed", type=int, default=None, help="seed override (u64)")
    p.add_argument("--no-plot", action="store_true", help="skip SVG generation")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="stablepaths", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run verification suites")
    _add_common(p_run)

    p_demo = sub.add_parser("paths-demo", help="emit example path artifacts")
    _add_common(p_demo)

    p_metric = sub.add_parser("metric", help="certified metric between two path CSVs")
    p_metric.add_argument("path1")
    p_metric.add_argument("path2")
    p_metric.add_argument("--metric", choices=["J1", "M1"], default="M1")
    p_metric.add_argument("--tol", type=float, default=1e-6)

    args = parser.parse_args(argv)

    if args.command == "metric":
        return run_metric(args.path1, args.path2, args.metric, args.tol)

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("$.seed", "seed override must be a u64")
            cfg["seed"] = args.seed
        out_dir = Path(args.out or cfg.get("output_dir", "out"))
        plot = cfg.get("plot", True) and not args.no_plot
        if args.command == "run":
            return run_suites(cfg, out_dir, plot)
        return run_paths_demo(cfg, out_dir, plot)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

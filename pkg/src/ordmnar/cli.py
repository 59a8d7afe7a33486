"""Command-line interface.

Three subcommands:

* ``fit``: estimate the joint outcome/missingness model (or a
  complete-case outcome model) from a CSV file
* ``simulate``: run a scenario config and write metrics CSV, relative-bias
  CSV, a missingness-parameter CSV when the EM estimator ran, and a run
  manifest
* ``replicate``: run built-in benchmark scenarios and print fresh results
  beside the published reference values

Exit codes: 0 success, 1 estimation failure, 2 usage or input errors.
"""
import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .data import read_ordinal_csv
from .exceptions import NonConvergenceError, OrdmnarError, ValidationError
from .report import build_fit_report, to_json_dict, to_text
from .simlab import (
    REFERENCE_SIZES,
    REFERENCE_X1,
    ScenarioConfig,
    default_workers,
    preset,
    run_scenario,
    summarize,
    to_csv,
)
from .simlab.metrics import to_missparams_csv, to_relbias_csv
from .simlab.presets import DEFAULT_REPLICATIONS

MANIFEST_SCHEMA_VERSION = 1

# rendering tolerances for the replicate table; cells further than this
# from the published value get a trailing '*'
TOL_MEAN = 0.04
TOL_ABS_BIAS = 0.05
TOL_MSE_REL = 0.25
TOL_MSE_ABS = 0.02
TOL_CP = 0.025

REPLICATE_TABLES = tuple(REFERENCE_X1)


def _split_csv_arg(text: str):
    items = [t.strip() for t in text.split(",")]
    return [t for t in items if t]


def _progress(label: str):
    def cb(done: int, total: int):
        if done % 200 == 0 or done == total:
            print(f"{label}: {done}/{total} replicates", file=sys.stderr)
    return cb


def _config_hash(config: ScenarioConfig) -> str:
    canon = json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _write_manifest(path: Path, config: ScenarioConfig, workers: int, table,
                    outputs) -> None:
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "package_version": __version__,
        "config": config.to_dict(),
        "config_sha256": _config_hash(config),
        "workers": workers,
        "missing_fraction": table.missing_fraction,
        "failures": table.failure_counts,
        "outputs": outputs,
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_fit(args) -> int:
    try:
        ds = read_ordinal_csv(
            args.input,
            response=args.response,
            covariates=_split_csv_arg(args.covariates),
            levels=_split_csv_arg(args.levels) if args.levels else None,
        )
    except (OSError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = build_fit_report(
            ds, method=args.method, ci_level=args.ci_level,
            or_direction=args.or_direction,
        )
    except NonConvergenceError as exc:
        stage = exc.stage or "estimation"
        print(f"error: {stage} did not converge: {exc}", file=sys.stderr)
        return 1
    except OrdmnarError as exc:
        print(f"error: estimation failed: {exc}", file=sys.stderr)
        return 1
    text = to_text(report)
    print(text, end="")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "fit.txt").write_text(text)
        payload = {"invocation": {
            "input": str(args.input), "response": args.response,
            "covariates": _split_csv_arg(args.covariates),
            "levels": _split_csv_arg(args.levels) if args.levels else None,
            "method": args.method, "ci_level": args.ci_level,
            "or_direction": args.or_direction,
        }}
        payload.update(to_json_dict(report))
        (outdir / "fit.json").write_text(json.dumps(payload, indent=2) + "\n")
    return 0 if report.converged else 1


def _run_and_write(config: ScenarioConfig, outdir: Optional[Path], workers: int,
                   label: str):
    result = run_scenario(config, workers=workers, progress=_progress(label))
    table = summarize(result)
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        outputs = {"metrics": "metrics.csv", "relbias": "relbias.csv"}
        (outdir / "metrics.csv").write_text(to_csv(table))
        (outdir / "relbias.csv").write_text(to_relbias_csv(table))
        if table.missparam_rows:
            outputs["missparams"] = "missparams.csv"
            (outdir / "missparams.csv").write_text(to_missparams_csv(table))
        _write_manifest(outdir / "manifest.json", config, workers, table, outputs)
    return table


def cmd_simulate(args) -> int:
    try:
        config = ScenarioConfig.from_json(Path(args.config).read_text())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        config = config.with_overrides(base_seed=args.seed)
    workers = args.workers if args.workers else default_workers()
    table = _run_and_write(config, Path(args.out), workers, config.name)
    print(f"scenario {table.scenario}: n={table.n}, {table.replications} replicates, "
          f"realized missing fraction {table.missing_fraction:.4f}")
    for est, tags in sorted(table.failure_counts.items()):
        failed = sum(tags.values())
        if failed:
            print(f"  {est}: {failed} failed replicates "
                  f"({', '.join(f'{k}={v}' for k, v in sorted(tags.items()))})")
    names = ["metrics.csv", "relbias.csv"]
    if table.missparam_rows:
        names.append("missparams.csv")
    names.append("manifest.json")
    print(f"wrote {', '.join(names)} to {args.out}")
    return 0


def _flag(ours: float, pub: float, tol: float) -> str:
    return "" if abs(ours - pub) <= tol else "*"


def _replicate_block(table, ref) -> str:
    header = (f"{'estimator':<10} {'metric':<9} {'ours':>10} {'published':>10} {'delta':>9}")
    lines = [header, "-" * len(header)]
    for est in ("whole", "cc", "em"):
        row = table.row(est, "x1")
        pub = ref.get(est) if ref else None
        cells = (
            ("mean", row.mean, None if pub is None else pub.mean, TOL_MEAN),
            ("abs_bias", row.abs_bias, None if pub is None else pub.abs_bias, TOL_ABS_BIAS),
            ("mse", row.mse, None if pub is None else pub.mse, None),
            ("cp", row.cp, None if pub is None else pub.cp, TOL_CP),
        )
        for metric, ours, pubv, tol in cells:
            if pubv is None or pubv != pubv:  # missing or NaN reference cell
                lines.append(f"{est:<10} {metric:<9} {ours:>10.4f} {'':>10} {'':>9}")
                continue
            if metric == "mse":
                tol = max(TOL_MSE_REL * pubv, TOL_MSE_ABS)
            mark = _flag(ours, pubv, tol)
            lines.append(
                f"{est:<10} {metric:<9} {ours:>10.4f} {pubv:>10.4f} "
                f"{ours - pubv:>+9.4f}{mark}"
            )
    return "\n".join(lines)


def cmd_replicate(args) -> int:
    table_name = args.table
    available = REFERENCE_SIZES[table_name]
    if args.sizes:
        try:
            sizes = tuple(int(s) for s in _split_csv_arg(args.sizes))
        except ValueError:
            print(f"error: --sizes must be integers, got {args.sizes!r}", file=sys.stderr)
            return 2
        bad = [s for s in sizes if s not in available]
        if bad:
            print(f"error: no published rows at sizes {bad} for {table_name}; "
                  f"available: {', '.join(map(str, available))}", file=sys.stderr)
            return 2
    else:
        sizes = available
    workers = args.workers if args.workers else default_workers()
    for n in sizes:
        config = preset(table_name, n=n, replications=args.reps)
        outdir = Path(args.out) / f"{table_name}_n{n}" if args.out else None
        tab = _run_and_write(config, outdir, workers, f"{table_name} n={n}")
        print(f"\n{table_name}  n={n}  replicates={tab.replications}  "
              f"seed={config.base_seed}  missing={tab.missing_fraction:.3f}")
        print(_replicate_block(tab, REFERENCE_X1[table_name].get(n)))
        print("cells marked * fall outside the rendering tolerance")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ordmnar",
        description="Ordinal regression with nonignorable missing responses",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fit", help="fit a model to a CSV dataset")
    f.add_argument("--input", required=True, help="CSV file with a header row")
    f.add_argument("--response", required=True, help="response column name")
    f.add_argument("--covariates", required=True,
                   help="comma-separated covariate column names")
    f.add_argument("--levels", default=None,
                   help="comma-separated response labels, lowest category first "
                        "(default: lexicographic)")
    f.add_argument("--method", choices=("em", "cc"), default="em")
    f.add_argument("--ci-level", type=float, default=0.95)
    f.add_argument("--or-direction", choices=("lower", "upper"), default="lower",
                   help="odds-ratio direction for outcome slopes: odds of lower "
                        "(default) or of higher response categories")
    f.add_argument("--out", default=None,
                   help="directory for fit.txt and fit.json copies")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("simulate", help="run one scenario config")
    s.add_argument("--config", required=True, help="scenario JSON path")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--workers", type=int, default=None,
                   help="process count (default: ORDMNAR_WORKERS or 1)")
    s.add_argument("--seed", type=int, default=None,
                   help="override the config's base seed")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("replicate", help="rerun built-in benchmark studies")
    r.add_argument("--table", required=True, choices=REPLICATE_TABLES)
    r.add_argument("--sizes", default=None,
                   help="comma-separated sample sizes (default: all published)")
    r.add_argument("--reps", type=int, default=DEFAULT_REPLICATIONS)
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--out", default=None,
                   help="directory for per-size metrics/manifest files")
    r.set_defaults(func=cmd_replicate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

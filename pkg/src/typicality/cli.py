"""Command-line front end.

Every command writes plain CSV/JSON artifacts into ``--output-dir`` (default
``$TYPICALITY_OUTPUT_DIR`` or ``./typicality-output``); each artifact embeds
the command, parameters, seed and package version.

Exit codes: 0 ok, 2 usage, 3 input/format, 4 numerical, 5 internal.
"""

from __future__ import annotations

import argparse
import inspect
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DataFormatError, DomainError, IllPosedError, SingularCovarianceError
from .gaussian import fit_gaussian
from .geometry import geometry_table
from .outliers import DEFAULT_C, DEFAULT_EPSILON, compare_methods, typicality_band
from .pipeline import (DEFAULT_MISSING_TOKENS, SYNTH_CORRELATION, SYNTH_D, SYNTH_LEVELS,
                       SYNTH_MISSING_RATE, SYNTH_N, clean_likert, correlation_matrix,
                       load_endpoint_map, load_table, mean_impute, standardize,
                       subset_norm_experiment, synth_likert, write_table)
from .report import ExperimentReport, dumps, write_csv
from .robust import DEFAULT_N_STARTS
from .simulation import EXPERIMENTS

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERICAL, EXIT_INTERNAL = 0, 2, 3, 4, 5
OUTPUT_ENV = "TYPICALITY_OUTPUT_DIR"
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output-dir", "-o", type=Path, default=None,
                        help=f"artifact directory (default ${OUTPUT_ENV} or ./typicality-output)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    thresholds = _Parser(add_help=False)
    thresholds.add_argument("--c", type=float, default=DEFAULT_C, help="Mahalanobis threshold in SD")
    thresholds.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                            help="typical-set half-width in bits")

    table = _Parser(add_help=False)
    table.add_argument("--input", "-i", type=Path, required=True)
    table.add_argument("--delimiter", default=",")
    table.add_argument("--missing-tokens", default=",".join(sorted(DEFAULT_MISSING_TOKENS)),
                       help="comma-separated cell values treated as missing")

    fitting = _Parser(add_help=False)
    fitting.add_argument("--estimator", choices=["sample", "mcd"], default="mcd")
    fitting.add_argument("--h-fraction", type=float, default=None,
                         help="MCD subset size as a fraction of n (default maximal breakdown)")
    fitting.add_argument("--n-starts", type=int, default=DEFAULT_N_STARTS)

    parser = _Parser(prog="typicality", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", parents=[common], help="run a seeded experiment")
    sim.add_argument("experiment", choices=sorted(EXPERIMENTS))
    sim.add_argument("--D", type=int, default=None, help="dimension")
    sim.add_argument("--n", type=int, default=None, help="sample size")
    sim.add_argument("--D-max", type=int, default=None)
    sim.add_argument("--n-per-d", type=int, default=None)
    sim.add_argument("--epsilons", type=_float_list, default=None)
    sim.add_argument("--band", type=float, default=None)
    sim.add_argument("--c", type=float, default=None)
    sim.add_argument("--epsilon", type=float, default=None)
    sim.add_argument("--n-starts", type=int, default=None)

    geo = sub.add_parser("geometry", parents=[common], help="sphere/cube volumes and expected norms")
    geo.add_argument("--max-d", type=int, default=20)

    sub.add_parser("detect", parents=[common, table, fitting, thresholds],
                   help="score each row of a table with both outlier rules")
    sub.add_parser("compare", parents=[common, table, fitting, thresholds],
                   help="category counts of Mahalanobis vs typicality")

    ana = sub.add_parser("analyze", parents=[common, table, fitting, thresholds],
                         help="clean, impute, standardize and analyze a survey table")
    ana.add_argument("--endpoint-map", type=Path, default=None,
                     help="JSON file of Likert text labels (default: bundled example)")
    ana.add_argument("--D-list", type=_int_list, default=None)
    ana.add_argument("--n-reps", type=int, default=1000)

    syn = sub.add_parser("synth", parents=[common], help="write a synthetic Likert table")
    syn.add_argument("--n", type=int, default=SYNTH_N)
    syn.add_argument("--D", type=int, default=SYNTH_D)
    syn.add_argument("--levels", type=int, default=SYNTH_LEVELS)
    syn.add_argument("--correlation", type=float, default=SYNTH_CORRELATION)
    syn.add_argument("--missing-rate", type=float, default=SYNTH_MISSING_RATE)
    syn.add_argument("--endpoint-labels", default=None,
                     help="'low,high' text written in place of the extreme categories")
    return parser


def _output_dir(args) -> Path:
    out = args.output_dir or Path(os.environ.get(OUTPUT_ENV, "typicality-output"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _meta(args, params) -> dict:
    return {"tool": "typicality", "version": __version__, "command": args.command,
            "seed": args.seed, "params": params}


def _write_json(path: Path, obj) -> Path:
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def _load_numeric(args):
    tokens = [t for t in args.missing_tokens.split(",")]
    data = load_table(args.input, tokens, args.delimiter)
    if data.text_cells:
        (i, j), tok = next(iter(sorted(data.text_cells.items())))
        raise DataFormatError(f"non-numeric cell {tok!r} in column {data.labels[j]!r} "
                              f"(row {i + 1}); use 'analyze' for Likert text")
    if data.missing_mask.any():
        raise DataFormatError("table has missing cells; use 'analyze' to impute them")
    return data


def _fit(args, X):
    options = {}
    if args.estimator == "mcd":
        options["n_starts"] = args.n_starts
        if args.h_fraction is not None:
            if not 0 < args.h_fraction <= 1:
                raise UsageError("--h-fraction must lie in (0, 1]")
            n, dim = X.shape
            options["h"] = min(n, max(dim + 1, math.ceil(args.h_fraction * n)))
    return fit_gaussian(X, args.estimator, seed=args.seed, **options)


def _fit_params(args):
    return {"input": str(args.input), "estimator": args.estimator, "c": args.c,
            "epsilon": args.epsilon, "h_fraction": args.h_fraction, "n_starts": args.n_starts}


def _model_dict(model):
    return {"estimator": model.estimator.value, "mean": model.mean, "covariance": model.covariance,
            "log2_det": model.log2_det, "entropy_bits": model.entropy_bits,
            "provenance": dict(model.provenance)}


def cmd_simulate(args, out):
    fn = EXPERIMENTS[args.experiment]
    kwargs = {"seed": args.seed}
    names = {"D": "D", "n": "n", "D_max": "D_max", "n_per_d": "n_per_D", "epsilons": "epsilons",
             "band": "band", "c": "c", "epsilon": "epsilon", "n_starts": "n_starts"}
    accepted = inspect.signature(fn).parameters
    for attr, kw in names.items():
        value = getattr(args, attr)
        if value is None:
            continue
        if kw not in accepted:
            raise UsageError(f"experiment {args.experiment!r} does not take --{attr.replace('_', '-')}")
        kwargs[kw] = value
    report = fn(**kwargs)
    report.write_json(out / f"{report.name}.json")
    report.write_csv(out)
    return report.summary


def cmd_geometry(args, out):
    report = ExperimentReport("geometry", {"max_d": args.max_d, "seed": args.seed},
                              {"by_dim": geometry_table(args.max_d)})
    report.write_json(out / "geometry.json")
    report.write_csv(out)
    return {"max_d": args.max_d, "cube_sphere_ratio_at_max_d": float(report.series["by_dim"]["cube_sphere_ratio"][-1])}


def _verdict_columns(verdicts):
    return {
        "index": [v.index for v in verdicts],
        "mahalanobis_sd": [v.mahalanobis_sd for v in verdicts],
        "log2_density": [v.log2_density for v in verdicts],
        "is_mahalanobis_outlier": [v.is_mahalanobis_outlier for v in verdicts],
        "is_typicality_outlier": [v.is_typicality_outlier for v in verdicts],
        "category": [v.category.value for v in verdicts],
    }


def _detect_common(args):
    data = _load_numeric(args)
    X = data.to_array()
    model = _fit(args, X)
    verdicts, counts = compare_methods(X, model, args.c, args.epsilon)
    band = typicality_band(model, args.epsilon)
    return model, verdicts, counts, band


def cmd_detect(args, out):
    model, verdicts, counts, band = _detect_common(args)
    meta = _meta(args, _fit_params(args))
    _write_json(out / "verdicts.json", {
        **meta, "model": _model_dict(model),
        "band": {"entropy_bits": band.entropy_bits, "epsilon": band.epsilon,
                 "lower_log2_density": band.lower_log2_density,
                 "upper_log2_density": band.upper_log2_density},
        "counts": counts, "verdicts": [v.to_dict() for v in verdicts],
    })
    write_csv(out / "verdicts.csv", _verdict_columns(verdicts), meta)
    return counts


def cmd_compare(args, out):
    model, verdicts, counts, _ = _detect_common(args)
    meta = _meta(args, _fit_params(args))
    _write_json(out / "compare.json", {**meta, "model": _model_dict(model), "counts": counts,
                                       "categories": {c: [v.index for v in verdicts
                                                          if v.category.value == c] for c in counts}})
    write_csv(out / "compare.csv", {"category": list(counts), "count": list(counts.values())}, meta)
    return counts


def cmd_analyze(args, out):
    tokens = args.missing_tokens.split(",")
    raw = load_table(args.input, tokens, args.delimiter)
    endpoint_map = load_endpoint_map(args.endpoint_map)
    cleaned, report = clean_likert(raw, endpoint_map)
    imputed, _ = mean_impute(cleaned)
    Z = standardize(imputed)
    params = {**_fit_params(args), "endpoint_map": str(args.endpoint_map) if args.endpoint_map else None,
              "D_list": args.D_list, "n_reps": args.n_reps}
    meta = _meta(args, params)
    write_table(out / "cleaned.csv", imputed, meta)
    _write_json(out / "cleaning_report.json", {**meta, "report": report.to_dict()})
    R = correlation_matrix(Z)
    write_csv(out / "correlation.csv", {"variable": Z.labels, **{lab: R[:, j] for j, lab in enumerate(Z.labels)}}, meta)
    norms = subset_norm_experiment(Z, args.D_list, args.n_reps, args.seed)
    norms.params["source"] = meta
    norms.write_json(out / "subset_norm.json")
    norms.write_csv(out)
    model = _fit(args, Z.values)
    verdicts, counts = compare_methods(Z.values, model, args.c, args.epsilon)
    _write_json(out / "model.json", {**meta, "model": _model_dict(model), "counts": counts})
    write_csv(out / "verdicts.csv", _verdict_columns(verdicts), meta)
    return {"n_rows": report.n_rows, "n_cols_kept": report.n_cols_kept,
            "overall_imputation_rate": report.overall_imputation_rate,
            "entropy_bits": model.entropy_bits, "counts": counts, **norms.summary}


def cmd_synth(args, out):
    labels = None
    if args.endpoint_labels:
        parts = args.endpoint_labels.split(",")
        if len(parts) != 2:
            raise UsageError("--endpoint-labels expects 'low,high'")
        labels = (parts[0].strip(), parts[1].strip())
    params = {"n": args.n, "D": args.D, "levels": args.levels, "correlation": args.correlation,
              "missing_rate": args.missing_rate, "endpoint_labels": labels}
    data = synth_likert(seed=args.seed, endpoint_labels=labels, **{k: v for k, v in params.items()
                                                                  if k != "endpoint_labels"})
    meta = _meta(args, params)
    write_table(out / "synth.csv", data, meta)
    _write_json(out / "synth.json", {**meta, "missing_fraction": float(data.missing_mask.mean())})
    return {"rows": data.n, "columns": data.dim}


COMMANDS = {
    "simulate": cmd_simulate,
    "geometry": cmd_geometry,
    "detect": cmd_detect,
    "compare": cmd_compare,
    "analyze": cmd_analyze,
    "synth": cmd_synth,
}


def _fail(code, exc):
    print(f"error: {exc}", file=sys.stderr)
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out = _output_dir(args)
        result = COMMANDS[args.command](args, out)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except (IllPosedError, SingularCovarianceError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERICAL, exc)
    except (DataFormatError, DomainError, OSError) as exc:
        return _fail(EXIT_INPUT, exc)
    except Exception as exc:  # noqa: BLE001
        return _fail(EXIT_INTERNAL, exc)
    print(dumps({"command": args.command, "output_dir": str(out), "summary": result}), end="")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""
Command line interface: process, fit, compare, synth, report, catalog.

Result lines (k/b, RMSE) go to stdout; logging goes to stderr.
"""

import argparse
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from rich.console import Console
from rich.logging import RichHandler

from .data_structures.measurements import BandPlan, MaterialCategory, PenetrationLossSeries
from .evaluation.metrics import (
    MetricsCalculator,
    format_catalog,
    format_catalog_comparison,
)
from .evaluation.model_fitting import fit_linear, fit_report
from .generators.synthesis import load_synth_config, synthesize_manifest
from .models.penetration_models import (
    LinearLossModel,
    catalog,
    compare,
    compare_catalog,
    lookup,
    reference_for,
)
from .processing.cir_pipeline import run_manifest
from .utils.config import Config, apply_args_to_config, load_config, parse_grid
from .utils.errors import PenlossError, StageError
from .utils.pipeline_logger import PipelineLogger
from .utils.sweep_io import (
    read_loss_series,
    read_manifest,
    read_model,
    write_comparison,
    write_loss_series,
    write_model,
    write_residuals,
)

logger = logging.getLogger(__name__)


def setup_logging(level: str = "INFO"):
    """Route all logging through a rich handler on stderr."""
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def _fmt2(value: float) -> str:
    # avoid printing "-0.00"
    return f"{round(value, 2) + 0.0:.2f}"


def _add_gate_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--window", choices=["none", "hann"], default=None, help="Spectral window before the IFFT")
    parser.add_argument("--gate-threshold-db", type=float, default=None, help="Detection threshold above the noise floor (dB)")
    parser.add_argument("--workers", type=int, default=None, help="Centers processed concurrently")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="penloss",
        description="Material penetration loss from stepped-frequency LOS/NLOS sweeps",
    )
    parser.add_argument("--config", type=str, default=None, help="Path to configuration file (default: configs/default.yaml)")
    parser.add_argument("--log-level", type=str, default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("process", help="Manifest -> penetration-loss series CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="Output series CSV")
    _add_gate_flags(p)

    p = sub.add_parser("fit", help="Series CSV -> linear model JSON")
    p.add_argument("--series", required=True)
    p.add_argument("--out", required=True, help="Output model JSON")
    p.add_argument("--residuals", default=None, help="Optional residuals CSV")
    p.add_argument("--name", default=None, help="Model name (default: series file stem)")
    p.add_argument("--category", choices=[c.value for c in MaterialCategory], default=MaterialCategory.OTHER.value,
                   help="Material category recorded in the model")

    p = sub.add_parser("compare", help="Difference and RMSE between two models or series")
    p.add_argument("a", help="Catalog name, model JSON or series CSV")
    p.add_argument("b", help="Catalog name, model JSON or series CSV")
    p.add_argument("--grid", default=None, help="Frequency grid lo:step:hi in GHz")
    p.add_argument("--out", default=None, help="Directory for diff.csv and summary.json")

    p = sub.add_parser("synth", help="Synthetic manifest from a slab stack or target model")
    p.add_argument("--synth-config", required=True, help="Synth config (JSON or YAML)")
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("report", help="process -> fit -> compare with summary tables")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="Output directory")
    p.add_argument("--reference", default=None, help="Catalog name of the reference model")
    _add_gate_flags(p)

    p = sub.add_parser("catalog", help="Print the model catalog and its comparison table")
    p.add_argument("--grid", default=None, help="Frequency grid lo:step:hi in GHz")
    p.add_argument("--out", default=None, help="Write the tables as markdown")

    return parser


def _grid(text: Optional[str]) -> Optional[np.ndarray]:
    if text is None:
        return None
    lo, step, hi = parse_grid(text)
    return BandPlan.from_range(lo, step, hi).centers


def resolve_comparable(text: str):
    """Catalog name, model JSON path or series CSV path."""
    path = Path(text)
    if path.is_file():
        if path.suffix.lower() == ".json":
            return read_model(path)
        return read_loss_series(path)
    return lookup(text)


# ----- commands -----

def cmd_process(args, config: Config) -> int:
    manifest = read_manifest(args.manifest)
    result = run_manifest(manifest, config.gate_config(), config.window_kind(), config.cir.max_workers)
    write_loss_series(result.series, args.out)
    logger.info(f"Wrote {len(result.series)} centers to {args.out}")
    return 0


def cmd_fit(args, config: Config) -> int:
    series = read_loss_series(args.series)
    fit = fit_linear(series, name=args.name, category=MaterialCategory(args.category))
    write_model(fit.model, args.out)
    if args.residuals:
        write_residuals(fit.frequencies, fit.residuals, args.residuals)
    print(f"k={_fmt2(fit.model.slope_k)} b={_fmt2(fit.model.intercept_b)}")
    return 0


def cmd_compare(args, config: Config) -> int:
    a = resolve_comparable(args.a)
    b = resolve_comparable(args.b)
    grid = _grid(args.grid or config.comparison.grid)
    comparison = compare(a, b, grid)
    if args.out:
        out = Path(args.out)
        write_comparison(comparison, out / "diff.csv", out / "summary.json")
    print(f"RMSE {_fmt2(comparison.rmse)} dB")
    return 0


def cmd_synth(args, config: Config) -> int:
    defaults = {
        "snr_db": config.synth.snr_db,
        "repeats": config.synth.repeats,
        "los_delay_ns": config.synth.los_delay_ns,
        "seed": config.seed,
        "plan": config.band_plan().to_dict(),
    }
    synth_config = load_synth_config(args.synth_config, defaults)
    if args.seed is not None:
        synth_config = synth_config.model_copy(update={"seed": args.seed})
    manifest = synthesize_manifest(synth_config, args.out)
    print(f"{len(manifest.segments)} sweeps -> {Path(args.out) / 'manifest.json'}")
    return 0


def _stage(name: str, fn, *fn_args):
    try:
        return fn(*fn_args)
    except (PenlossError, OSError) as e:
        raise StageError(name, e) from e


def _reference(args, config: Config, fitted: LinearLossModel) -> Optional[LinearLossModel]:
    name = args.reference or config.comparison.reference
    if name:
        return lookup(name)
    return reference_for(fitted)


def write_curves(
    path: Path,
    series: PenetrationLossSeries,
    fitted: LinearLossModel,
    reference: Optional[LinearLossModel],
):
    """Plot-ready measured/fitted/reference loss per center."""
    data = {
        "freq_ghz": series.frequencies,
        "measured_db": series.losses,
        "fitted_db": fitted.predict(series.frequencies),
    }
    if reference is not None:
        data["reference_db"] = reference.predict(series.frequencies)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(data).to_csv(path, index=False, float_format="%.6f", lineterminator="\n")


def cmd_report(args, config: Config) -> int:
    out = Path(args.out)
    pipeline_log = PipelineLogger(out, datetime.now().strftime("%Y%m%d_%H%M%S")) \
        if config.output.save_pipeline_logs else None

    manifest = _stage("read", read_manifest, args.manifest)
    result = _stage(
        "process", run_manifest, manifest, config.gate_config(), config.window_kind(), config.cir.max_workers
    )
    loss_path = out / "loss.csv"
    _stage("process", write_loss_series, result.series, loss_path)
    # fit what was written so report matches process -> fit on the same file
    series = _stage("fit", read_loss_series, loss_path, manifest.material_name)
    fit = _stage("fit", fit_linear, series, manifest.material_name, manifest.material_category)
    _stage("fit", write_model, fit.model, out / "model.json")
    _stage("fit", write_residuals, fit.frequencies, fit.residuals, out / "residuals.csv")

    reference = _stage("compare", _reference, args, config, fit.model)
    comparison = None
    if reference is None:
        logger.warning(f"{manifest.material_name}: no TR 38.901 reference for this category, comparison skipped")
    else:
        comparison = _stage("compare", fit_report, fit, reference)
        _stage("compare", write_comparison, comparison, out / "diff.csv", out / "summary.json")

    calculator = MetricsCalculator()
    metrics = calculator.calculate(fit, comparison)
    write_curves(out / "curves.csv", series, fit.model, reference)
    (out / "summary.md").write_text(calculator.format_summary_markdown(metrics), encoding="utf-8")

    if pipeline_log is not None:
        pipeline_log.log_stage("process", {"manifest": str(args.manifest)}, {"centers": len(result.series)},
                               gate=config.gate_config().to_dict(), window=config.cir.window)
        pipeline_log.log_first_arrivals(result.centers)
        pipeline_log.log_stage("fit", output_data=fit.to_dict())
        if comparison is not None:
            pipeline_log.log_stage("compare", {"reference": reference.name}, comparison.to_summary())
        pipeline_log.log_step("report", "result", output_data=metrics.to_dict())
        pipeline_log.save_summary()
        pipeline_log.save_full_log()

    print(calculator.format_metrics_table(metrics))
    print(f"k={_fmt2(fit.model.slope_k)} b={_fmt2(fit.model.intercept_b)}")
    if comparison is not None:
        print(f"RMSE {_fmt2(comparison.rmse)} dB")
    return 0


def cmd_catalog(args, config: Config) -> int:
    grid = _grid(args.grid or config.comparison.grid)
    models_table = format_catalog(catalog())
    comparison_table = format_catalog_comparison(compare_catalog(grid))
    text = f"## Model catalog\n\n{models_table}\n\n## Fitted vs TR 38.901\n\n{comparison_table}\n"
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    print(text, end="")
    return 0


COMMANDS = {
    "process": cmd_process,
    "fit": cmd_fit,
    "compare": cmd_compare,
    "synth": cmd_synth,
    "report": cmd_report,
    "catalog": cmd_catalog,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the exit status."""
    args = build_parser().parse_args(argv)
    try:
        config = apply_args_to_config(load_config(args.config), args)
        setup_logging(config.logging.level)
        return COMMANDS[args.command](args, config)
    except (PenlossError, OSError) as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return 1

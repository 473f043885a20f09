#!/usr/bin/env python3
"""
Synthetic round trip: synth -> process -> fit for a few catalog lines and
slab presets, printing recovered parameters next to the injected ones.

Usage:
    python scripts/smoke_pipeline.py [--snr-db 30] [--trials 20] [--out outputs/smoke]
"""

import argparse
import sys
import tempfile
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from tabulate import tabulate

from src.cli import setup_logging
from src.evaluation.model_fitting import fit_linear, parameter_spread
from src.generators.synthesis import parse_synth_config, synthesize_manifest, synthesize_segments, synthesize_trial
from src.models.penetration_models import lookup
from src.processing.cir_pipeline import process_manifest, process_segments
from src.utils.sweep_io import read_manifest

TARGETS = ["Concrete Slab", "Wooden Board 1", "Double-Layer Glass", "Frost Glass"]


def parse_args():
    parser = argparse.ArgumentParser(description="Synthetic pipeline round trip")
    parser.add_argument("--snr-db", type=float, default=None, help="Per-sweep SNR (default: noise-free)")
    parser.add_argument("--trials", type=int, default=1, help="Seeded trials per target")
    parser.add_argument("--out", type=str, default=None, help="Keep the first trial's files here")
    return parser.parse_args()


def main():
    args = parse_args()
    setup_logging("WARNING")

    rows = []
    for name in TARGETS:
        target = lookup(name)
        config = parse_synth_config({"model": name, "snr_db": args.snr_db, "repeats": 10, "seed": 0})

        # first trial goes through files, the rest stay in memory
        with tempfile.TemporaryDirectory() as tmp:
            out_dir = Path(args.out) / name.replace(" ", "_") if args.out else Path(tmp)
            manifest = synthesize_manifest(config, out_dir)
            fits = [fit_linear(process_manifest(read_manifest(out_dir / "manifest.json")))]

        plan = config.band_plan()
        for seed in range(1, args.trials):
            los, nlos = synthesize_segments(synthesize_trial(config, seed))
            fits.append(fit_linear(process_segments(name, plan, los, nlos).series))

        spread = parameter_spread(fits)
        rows.append([
            manifest.material_name,
            f"{target.slope_k:.2f}", f"{spread['k_mean']:.4f}", f"{spread['k_std']:.4f}",
            f"{target.intercept_b:.2f}", f"{spread['b_mean']:.4f}", f"{spread['b_std']:.4f}",
        ])

    print(tabulate(
        rows,
        headers=["Target", "k", "k fit", "k std", "b", "b fit", "b std"],
        tablefmt="github",
        disable_numparse=True,
    ))
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Shared helper for the figure scripts: run one experiment config and write CSV."""
from __future__ import annotations

import argparse
from pathlib import Path

from kregbattery.config import load_config
from kregbattery.experiments import ExperimentConfig, run

ROOT = Path(__file__).resolve().parent.parent


def run_config(experiment: str, config_name: str, default_out: str):
    parser = argparse.ArgumentParser(description=f"Run the {experiment} experiment and write a CSV table.")
    parser.add_argument("--config", default=str(ROOT / "configs" / config_name))
    parser.add_argument("--out", default=default_out)
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()
    cfg = ExperimentConfig.build(experiment, load_config(args.config), args.out, "csv", args.workers)
    table = run(cfg)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    table.write(args.out)
    print(f"wrote {len(table.rows)} rows to {args.out} ({table.metadata['wall_time_s']} s)")
    return table

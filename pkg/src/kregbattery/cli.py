"""Command-line entry point: ``kregbattery <subcommand> [--config PATH] ...``.

Exit codes: 0 success, 1 validation error, 2 resource error, 3 a
verification check failed.
"""
from __future__ import annotations

import argparse
import sys

from .config import Config, load_config
from .errors import KRegError, ResourceError, ValidationError
from .experiments import ExperimentConfig, run

SUBCOMMANDS = {
    "work-sweep": "work_sweep",
    "k-sweep": "k_sweep",
    "avg-power": "avg_power",
    "fraction": "fraction",
    "collective": "collective_scaling",
    "verify": "verify",
}

EXIT_OK, EXIT_VALIDATION, EXIT_RESOURCE, EXIT_VERIFY = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kregbattery",
                                     description="Quantum batteries charged by K-regular stabilizer Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, experiment in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=f"run the {experiment} experiment")
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--workers", type=int, default=None, help="thread pool size (default: CPU count)")
        p.add_argument("--dump-operator", action="store_true",
                       help="print the battery and charger Hamiltonians as Pauli-sum text and exit")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
    return parser


def _load(args) -> Config:
    from .config import parse_config

    cfg = load_config(args.config) if args.config else Config(source="<cli>")
    if args.set:
        overrides = parse_config("\n".join(args.set), source="--set")
        for key, value in overrides.items():
            cfg[key] = value
            cfg.lines.pop(key, None)
    return cfg


def _dump_operators(cfg: Config) -> str:
    from .models import ModelSpec

    keys = {"n_sites", "battery_axis", "battery_k", "charger_k", "charger_alpha", "unnormalized_weights",
            "t_min", "t_max", "t_points"}
    model = Config({k: v for k, v in cfg.items() if k in keys}, source=cfg.source, lines=cfg.lines)
    for key in list(model):
        if isinstance(model[key], list):
            if len(model[key]) != 1:
                raise model.error(key, "--dump-operator needs a single value")
            model[key] = model[key][0]
    spec = ModelSpec.from_config(model)
    return ("# battery\n" + spec.battery_hamiltonian().to_text()
            + "# charger\n" + spec.charger_hamiltonian().to_text())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        if args.dump_operator:
            sys.stdout.write(_dump_operators(cfg))
            return EXIT_OK
        exp = ExperimentConfig.build(SUBCOMMANDS[args.command], cfg, args.out, args.format, args.workers)
        table = run(exp)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except KRegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out:
        table.write(args.out, args.format)
    else:
        sys.stdout.write(table.to_json() if args.format == "json" else table.to_csv())
    if exp.experiment == "verify":
        from .verify import failed

        if failed(table):
            print("verification failed", file=sys.stderr)
            return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

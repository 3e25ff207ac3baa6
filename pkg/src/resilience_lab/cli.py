"""Command-line entry points for running scenarios and certifications."""

from __future__ import annotations

import argparse
import sys

from .bounds import certify_lemma
from .scenarios import ScenarioConfig, list_scenarios, run_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resilience-lab",
        description="Perturbed many-body dynamics and certified error bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario from a config file")
    run.add_argument("config", help="flat key=value config file")
    run.add_argument("--output-root", default=None,
                     help="override the output directory root")

    sub.add_parser("list-scenarios", help="list scenario identifiers")

    cert = sub.add_parser("certify-lemma",
                          help="random-trial certification of the expectation lemma")
    cert.add_argument("--trials", type=int, default=1000)
    cert.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-scenarios":
        for name in list_scenarios():
            print(name)
        return 0
    if args.command == "certify-lemma":
        try:
            trials = certify_lemma(args.trials, args.seed)
        except AssertionError as exc:
            print(f"FAIL: {exc}", file=sys.stderr)
            return 1
        worst = min(t.margin for t in trials)
        print(f"{len(trials)} trials, 0 violations, worst margin {worst:.3e}")
        return 0
    if args.command == "run":
        try:
            cfg = ScenarioConfig.from_file(args.config)
            manifest = run_scenario(cfg, output_root=args.output_root)
        except (ValueError, RuntimeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"{cfg.scenario}: wrote {', '.join(manifest.outputs)} "
              f"({manifest.wall_clock_s:.1f}s)")
        return 0
    return 2


if __name__ == "__main__":
    raise SystemExit(main())

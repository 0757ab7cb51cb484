#!/usr/bin/env python3
"""
Run the reproducible demonstrations on the example network families.

Experiments:
    calibrate   self-weight and link directions for the two-triangle example
    barbell     cross-bell vs within-bell commute time growth
    expander    deviation trend for one locally forceful agent
    location    same conductance bound, different deviation

Usage:
    # Everything, results saved under tmp/
    python scripts/run_experiments.py

    # Only the barbell scaling with larger graphs
    python scripts/run_experiments.py --only barbell --sizes 24 48 96
"""

import argparse
import json
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import SETTINGS
from src.experiments import barbell_scaling, calibrate_example2, expander_trend, location_demo

EXPERIMENTS = ("calibrate", "barbell", "expander", "location")


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="""Run the demonstrations on the example network families.

Each experiment prints a short summary; --save writes all results to one
JSON file in the output directory (MISINFO_OUTPUT_DIR, default tmp/).""",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # All experiments with default sizes
  python scripts/run_experiments.py

  # Calibration only, with a finer self-weight grid
  python scripts/run_experiments.py --only calibrate --epsilons 0.05 0.1 0.15 0.2

  # Expander trend on a different random graph family, saved to disk
  python scripts/run_experiments.py --only expander --seed 7 --degree 4 --save

For more information, see project_docs/
        """
    )

    selection = parser.add_argument_group('Experiment Selection')
    selection.add_argument(
        "--only",
        choices=EXPERIMENTS,
        action="append",
        metavar="NAME",
        help="Run only this experiment (repeatable). Choices: %(choices)s (default: all)"
    )

    params = parser.add_argument_group('Experiment Parameters')
    params.add_argument(
        "--epsilons",
        type=float,
        nargs="+",
        default=[0.1, 0.2, 0.3, 0.4, 0.5],
        metavar="EPS",
        help="Self-weights tried by the calibration (default: %(default)s)"
    )
    params.add_argument(
        "--sizes",
        type=int,
        nargs="+",
        metavar="N",
        help="Graph sizes for barbell (12 24 48) or expander (20 40 80)"
    )
    params.add_argument(
        "--degree",
        type=int,
        default=6,
        metavar="D",
        help="Degree of the random regular graphs (default: %(default)s)"
    )
    params.add_argument(
        "--seed",
        type=int,
        default=0,
        help="Seed for the random regular graphs (default: %(default)s)"
    )

    output = parser.add_argument_group('Output Options')
    output.add_argument(
        "--save",
        action="store_true",
        default=False,
        help="Write results to <output_dir>/experiments.json"
    )
    output.add_argument(
        "--verbose",
        action="store_true",
        default=False,
        help="Print per-step progress to stderr"
    )

    args = parser.parse_args(argv)
    selected = args.only or list(EXPERIMENTS)

    print("=" * 60)
    print("EXPERIMENTS")
    print("=" * 60)
    print(f"Selected: {', '.join(selected)}")
    print("=" * 60)
    print()

    results = {}
    try:
        for k, name in enumerate(selected, 1):
            print(f"[{k}/{len(selected)}] {name}")
            if name == "calibrate":
                result = calibrate_example2(args.epsilons, verbose=args.verbose)
                print(f"  epsilon={result.epsilon} reverse={result.reverse} max error={result.max_error:.4f}")
                print(f"  {'✓' if result.matched else '❌'} target distributions "
                      f"{'reproduced' if result.matched else 'not reproduced'} within {result.tolerance}")
            elif name == "barbell":
                result = barbell_scaling(args.sizes or (12, 24, 48))
                for n, cross, within in zip(result.sizes, result.cross, result.within):
                    print(f"  n={n:4d}: cross={cross:10.2f} within={within:8.2f}")
                print(f"  slopes: cross={result.cross_slope:.2f} within={result.within_slope:.2f}")
            elif name == "expander":
                result = expander_trend(args.sizes or (20, 40, 80), args.degree, args.seed, verbose=args.verbose)
                for n, l2 in zip(result.sizes, result.l2):
                    print(f"  n={n:4d}: ||excess||_2={l2:.3e}")
                print(f"  {'✓' if result.decreasing else '❌'} decreasing with n")
            else:
                result = location_demo()
                print(f"  bound:  inside={result.bound_inside:.4f} bridge={result.bound_bridge:.4f}")
                print(f"  actual: inside={result.actual_inside:.4f} bridge={result.actual_bridge:.4f}")
            results[name] = result.to_dict()
            print()
    except ValueError as e:
        print(f"\n✗ ERROR: {e}")
        sys.exit(1)

    if args.save:
        output_file = Path(SETTINGS.output_dir) / "experiments.json"
        output_file.parent.mkdir(parents=True, exist_ok=True)
        with open(output_file, 'w') as f:
            json.dump(results, f, indent=2, sort_keys=True)
        print(f"✓ Results saved to: {output_file}")

    print("✓ Experiments complete")


if __name__ == "__main__":
    main()

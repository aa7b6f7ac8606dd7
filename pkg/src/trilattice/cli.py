"""trilattice command line.

Exit codes: 0 success, 2 invalid configuration or layout, 3 numerical
non-convergence, 4 any other failure.
"""

import argparse
import logging
import sys
from pathlib import Path

from .commands import COMMANDS
from .commands.base import EXIT_CONFIG, EXIT_FAILURE, EXIT_NOT_CONVERGED
from .config import parse_config
from .errors import ConfigError, NumericalError, SeparationViolation, TrilatticeError

logger = logging.getLogger(__name__)


def _int_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'b1,b2' integers, got {text!r}") from None
    return a, b


def _float_pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'r1,r2' numbers, got {text!r}") from None
    return a, b


def _absolute(path: str | None) -> str | None:
    return str(Path(path).resolve()) if path else None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run configuration")
    common.add_argument("--out", help="primary output file (overrides output.path)")
    common.add_argument("--svg", help="optional SVG plot (scaling, psi-study)")
    common.add_argument("--threads", type=int, default=1, help="worker processes for scaling rows (default: 1)")
    common.add_argument("--seed", type=int, help="seed for randomized utilities, recorded in manifests; never affects physics")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level (default: WARNING)",
    )
    common.add_argument("--epsilon", type=float, help="lattice spacing")
    common.add_argument("--domain", help="polygon file, one 'x y' vertex per line")
    common.add_argument("--burgers", type=_int_pair, help="Burgers vector b1,b2 in lattice coordinates")
    common.add_argument("--alpha1", type=float, help="curvature of the bond potential")
    common.add_argument("--alpha2", type=float, help="curvature of the area potential")
    common.add_argument("--annulus", type=_float_pair, help="radii r1,r2 for the finite-annulus self-energy")
    common.add_argument("--bound", type=float, help="candidate norm bound for phi")

    parser = argparse.ArgumentParser(
        prog="trilattice",
        description="Edge dislocations on the triangular lattice",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Self-energy of b = e1 with the default potentials
  trilattice selfenergy --burgers 1,0

  # Recovery strain and minimization for a configured layout
  trilattice minimize --config run.yaml --out results/history.csv

  # Scaling study on four worker processes with a plot
  trilattice scaling --config run.yaml --threads 4 --svg scaling.svg
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "selfenergy": "self-energy psi(b) by profile, closed form and classical field",
        "phi": "relaxed self-energy phi(b) with its certificate",
        "recover": "recovery strain for a dislocation layout",
        "minimize": "fixed-slip energy minimization from the recovery strain",
        "scaling": "normalized energies along an epsilon ladder",
        "demo-thin-annulus": "rotating-ramp field on thin annuli",
        "psi-study": "convergence of finite-annulus self-energies",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict:
    return {
        "seed": args.seed,
        "lattice.epsilon": args.epsilon,
        "lattice.domain": _absolute(args.domain),
        "selfenergy.burgers": list(args.burgers) if args.burgers else None,
        "psi_study.burgers": list(args.burgers) if args.burgers else None,
        "potentials.alpha1": args.alpha1,
        "potentials.alpha2": args.alpha2,
        "selfenergy.annulus": list(args.annulus) if args.annulus else None,
        "selfenergy.search_bound": args.bound,
        "output.path": _absolute(args.out),
        "output.svg": _absolute(args.svg),
    }


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        config = parse_config(args.config, overrides_from_args(args), check_ladder=args.command == "scaling")
        result = COMMANDS[args.command](config, max(1, args.threads))
    except (ConfigError, SeparationViolation) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (TrilatticeError, OSError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return EXIT_FAILURE

    print(result.text)
    for path in result.outputs:
        print(f"  wrote {path}")
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())

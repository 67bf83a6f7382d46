"""Command-line entry point: ``pnormlab {violate,spectrum,purity,vn}``.

Settings come from the built-in defaults, then an optional ``--config`` JSON
file, then explicit flags (flags win).

Exit codes: 0 success, 1 invalid arguments, 2 assertion failure (violated
invariant or failed purity check), 3 resource limit.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import experiments as ex
from .errors import InvalidArgumentError, InvariantViolationError, PnormLabError, ResourceLimitError
from .linalg import RegisterDims

EXIT_OK, EXIT_INVALID, EXIT_ASSERTION, EXIT_RESOURCE = 0, 1, 2, 3


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _dims(text: str) -> RegisterDims:
    try:
        return RegisterDims.parse(text)
    except (InvalidArgumentError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is reserved for assertion failures here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # Defaults are None so that only flags actually given override the config file.
    common.add_argument("--config", help="JSON file with ExperimentConfig fields")
    common.add_argument("--dims", type=_dims, help="register dimensions E,F,G")
    common.add_argument("--p", dest="p_values", type=_float_list, help="Renyi orders, comma separated")
    common.add_argument("--seeds", type=_int_list, help="seeds, comma separated")
    common.add_argument("--restarts", type=int)
    common.add_argument("--mc-samples", dest="mc_samples", type=int)
    common.add_argument("--out", dest="output_path", help="output directory for reports")
    common.add_argument("--memory-cap", dest="memory_cap", type=int, help="max amplitudes of the product output")
    common.add_argument("--workers", type=int, help="processes for running seeds concurrently")

    parser = _Parser(prog="pnormlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("violate", parents=[common], help="single-copy minima vs entangled product output")
    sub.add_parser("spectrum", parents=[common], help="export the product-output spectrum")
    sub.add_parser("purity", parents=[common], help="exact average purity vs Monte Carlo")
    sub.add_parser("vn", parents=[common], help="von Neumann grouping analysis")
    return parser


def resolve_config(args: argparse.Namespace) -> ex.ExperimentConfig:
    data = ex.load_config(args.config) if args.config else {}
    for key in ("dims", "p_values", "seeds", "restarts", "mc_samples", "output_path", "memory_cap", "workers"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return ex.ExperimentConfig.from_dict(data)


def _summary(command: str, result) -> tuple[str, int]:
    if command == "violate":
        lines = [f"p={g['p']}: positive gap in {g['positive_gap_count']}/{g['seeds']} seeds, "
                 f"mean measured {g['mean_measured_gap']:.4f} nats, predicted {g['predicted_gap']}"
                 for g in result["gap_curve"]]
        return "\n".join(lines), EXIT_OK
    if command == "spectrum":
        lines = [f"seed {e['seed']}: lambda_max={e['eigenvalues'][0]:.6f} "
                 f"(reference {e['sidecar']['reference_lines']['top_eigenvalue_line']:.6f})" for e in result]
        return "\n".join(lines), EXIT_OK
    if command == "purity":
        lines = [f"exact {result['exact']:.12g}, leading term {result['leading_term']:.12g}"]
        lines += [f"seed {r['seed']}: MC {r['mc_mean']:.12g} +- {r['mc_standard_error']:.3g}, "
                  f"z={r['z_score']:.3f} {'PASS' if r['passed'] else 'FAIL'}" for r in result["rows"]]
        return "\n".join(lines), EXIT_OK if result["passed"] else EXIT_ASSERTION
    lines = [f"seed {r['seed']}: H1={r['von_neumann_entropy']:.6f} lambda1={r['lambda1']:.6f} "
             f"deficit={r['deficit']:.6f}" for r in result["rows"]]
    return "\n".join(lines), EXIT_OK


RUNNERS = {
    "violate": ex.run_violation_experiment,
    "spectrum": ex.run_spectrum_export,
    "purity": ex.run_purity_validation,
    "vn": ex.run_von_neumann_analysis,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        result = RUNNERS[args.command](config)
    except InvariantViolationError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERTION
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except MemoryError as exc:
        print(f"resource limit: out of memory ({exc})", file=sys.stderr)
        return EXIT_RESOURCE
    except (PnormLabError, ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text, code = _summary(args.command, result)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

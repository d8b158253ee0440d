"""Command-line front end.

Exit codes: 0 success, 2 invalid config, 3 resource limit, 4 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from hyperwalk import __version__, settings
from hyperwalk.config import FIGURES_BY_MODE, FORMATS, MODE_OF_FIGURE, REFERENCE_CHOICES, validate_config
from hyperwalk.errors import EXIT_CONFIG_ERROR, EXIT_INTERNAL_ERROR, EXIT_OK, ConfigError, HyperwalkError
from hyperwalk.figures import run_figure
from hyperwalk.walk import INITIAL_STATES

logger = logging.getLogger("hyperwalk")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperwalk",
        description="Quantum walks on the n-dimensional hypercube: limiting distributions, "
        "mixing times and broken-link decoherence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", metavar="PATH", help="flat KEY=value experiment file")
    parser.add_argument("--mode", choices=sorted(FIGURES_BY_MODE))
    parser.add_argument("--figure", choices=sorted(MODE_OF_FIGURE))
    parser.add_argument("--n", type=int, help="hypercube dimension")
    parser.add_argument("--p", type=float, help="link break probability per step")
    parser.add_argument("--t-max", dest="t_max", type=int, help="steps to simulate (default 200·n)")
    parser.add_argument(
        "--epsilon", dest="epsilons", type=float, action="append", help="mixing threshold; repeat for several"
    )
    parser.add_argument("--trials", type=int, help=f"ensemble size (default {settings.DEFAULT_TRIALS})")
    parser.add_argument("--seed", type=int, help=f"ensemble seed (default {settings.DEFAULT_SEED})")
    parser.add_argument("--n-values", dest="n_values", help="comma-separated dimensions for n sweeps")
    parser.add_argument("--p-values", dest="p_values", help="comma-separated break probabilities for p sweeps")
    parser.add_argument("--initial", choices=sorted(INITIAL_STATES))
    parser.add_argument(
        "--reference", choices=REFERENCE_CHOICES, help="reference(s) for instant_mixing_vs_n (default both)"
    )
    parser.add_argument(
        "--out", metavar="PATH", help="result file (default <figure>.<format>; format both writes .csv and .json)"
    )
    parser.add_argument("--format", choices=FORMATS)
    parser.add_argument("--jobs", type=int, help="worker processes (default HYPERWALK_JOBS or CPU count)")
    parser.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--quiet", action="store_true", help="no status lines or progress bars")
    return parser


OVERRIDE_KEYS = (
    "mode", "figure", "n", "p", "t_max", "epsilons", "trials", "seed",
    "n_values", "p_values", "initial", "reference", "out", "format", "jobs",
)


def _status(args, message):
    if not args.quiet:
        print(message, file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = (args.log_level or settings.log_level()).upper()
    if not isinstance(logging.getLevelName(level), int):
        _status(args, f"❌ Unknown log level '{level}'.")
        return EXIT_CONFIG_ERROR
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    raw_text = ""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as f:
                raw_text = f.read()
        except OSError as e:
            _status(args, f"❌ Cannot read config file {args.config}: {e}")
            return EXIT_CONFIG_ERROR

    try:
        config = validate_config(raw_text, {key: getattr(args, key) for key in OVERRIDE_KEYS})
        _status(args, f"🔄 Running {config.figure} (mode={config.mode}, n={config.n})...")
        paths, table = run_figure(config.figure, config, progress=not args.quiet)
    except ConfigError as e:
        _status(args, "❌ Invalid configuration:")
        for error in e.errors:
            _status(args, f"   - {error}")
        return e.exit_code
    except HyperwalkError as e:
        _status(args, f"❌ {type(e).__name__}: {e}")
        return e.exit_code
    except Exception:
        logger.exception("unexpected failure")
        _status(args, "❌ Internal error, see the log above.")
        return EXIT_INTERNAL_ERROR

    _status(args, f"✅ Wrote {len(table.rows)} rows to {', '.join(str(path) for path in paths)}")
    return EXIT_OK

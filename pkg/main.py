# main.py
import argparse
import json
import logging
import sys
from typing import List, Optional

from acc import __version__
from acc.config import load_settings
from acc.errors import AccError
from acc.handlers import register_all_handlers

logger = logging.getLogger("acc")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_DIVERGENCE = 4
EXIT_IO = 5
EXIT_OTHER = 6

EXIT_CODES = {
    "config": EXIT_CONFIG,
    "convergence": EXIT_SOLVER,
    "saturation": EXIT_SOLVER,
    "grazing": EXIT_SOLVER,
    "divergence": EXIT_DIVERGENCE,
    "io": EXIT_IO,
}


def build_parser(settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="acc-stability",
        description="Sampled-data stability analysis of average-current-controlled buck converters.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help=f"overrides ACC_LOG_LEVEL (currently {settings.effective_log_level})")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_all_handlers(subparsers, settings)
    return parser


def _report_error(category: str, message: str) -> None:
    print(json.dumps({"error": category, "message": message}), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    settings = load_settings()
    parser = build_parser(settings)
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, args.log_level or settings.effective_log_level, logging.INFO),
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )

    try:
        results = args.func(args)
    except AccError as e:
        logger.error("%s failed: %s", args.command, e)
        _report_error(e.category, str(e))
        return EXIT_CODES.get(e.category, EXIT_OTHER)
    except OSError as e:
        logger.error("%s: I/O failure: %s", args.command, e)
        _report_error("io", str(e))
        return EXIT_IO
    except Exception as e:
        logger.exception("%s: unexpected error", args.command)
        _report_error("internal", str(e))
        return EXIT_INTERNAL

    logger.info("%s done (%s result fields)", args.command, len(results))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

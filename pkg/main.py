"""
Main entry point for the FR logic checker
Parses the command line and dispatches to simulate, derive, check and report
"""
import argparse
import logging
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, TextIO

from app_config import AppConfig, initialize_application
from config import APP_NAME, APP_VERSION
from managers.derivation_manager import DerivationManager
from managers.identity_checker import IdentityChecker
from managers.protocol_manager import ProtocolManager
from managers.report_manager import ReportManager
from models.errors import FRLogicError
from models.formulas import Agent

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# '--out' without a value writes to the configured reports directory
CONFIGURED_DIR = object()


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer: {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must not be negative, got {value}")
    return value


def add_out_argument(parser: argparse.ArgumentParser, what: str):
    parser.add_argument("--out", type=Path, nargs="?", const=CONFIGURED_DIR,
                        help=f"{what}; the configured reports directory when given without a value")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per verb"""
    parser = argparse.ArgumentParser(
        prog="main.py",
        description=f"{APP_NAME}: exact extended Wigner's friend simulation and "
                    "multi-agent epistemic derivations",
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} v{APP_VERSION}")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    simulate = commands.add_parser("simulate", help="sample protocol rounds until both announce nonnull")
    simulate.add_argument("--seed", type=non_negative_int, help="generator seed")
    simulate.add_argument("--max-trials", type=positive_int, help="cap on rounds per run")
    simulate.add_argument("--jobs", type=positive_int, default=1,
                          help="independent runs with seeds S..S+J-1")
    simulate.add_argument("--format", choices=("text", "json"), help="output format")
    add_out_argument(simulate, "directory for the simulation log")

    derive = commands.add_parser("derive", help="derive the contradiction or certify the block")
    derive.add_argument("--mode", choices=("naive", "contextual"), default="naive")
    derive.add_argument("--agent", choices=[a.value for a in Agent], default=Agent.W2.value,
                        help="agent holding the naive contradiction")
    derive.add_argument("--depth", type=positive_int, help="forward-chaining round bound")
    derive.add_argument("--format", choices=("text", "json"), help="output format")
    add_out_argument(derive, "directory for trace files")

    check = commands.add_parser("check", help="check the exact quantum identities")
    check.add_argument("--format", choices=("text", "json"), help="output format")
    add_out_argument(check, "directory for the identity listing")

    report = commands.add_parser("report", help="one-page verdict report")
    report.add_argument("--depth", type=positive_int, help="forward-chaining round bound")
    add_out_argument(report, "directory for the report file")
    return parser


class CommandRunner:
    """Executes one parsed command against the managers"""

    def __init__(self, app_config: AppConfig, out: TextIO):
        self.logger = logging.getLogger(__name__)
        self.app_config = app_config
        self.out = out

    def _format(self, args) -> str:
        return args.format or self.app_config.get_setting("output", "format", "text")

    def _depth(self, args) -> int:
        return args.depth or self.app_config.get_setting("derivation", "depth")

    def _reports(self, args) -> ReportManager:
        out_dir = args.out
        if out_dir is CONFIGURED_DIR:
            out_dir = self.app_config.reports_dir()
        return ReportManager(out_dir)

    def _derivation_manager(self) -> DerivationManager:
        return DerivationManager(
            max_modal_depth=self.app_config.get_setting("derivation", "max_modal_depth"),
            max_formulas=self.app_config.get_setting("derivation", "max_formulas"),
        )

    def _emit(self, report: ReportManager, name: str, lines: Sequence[str],
              records: Sequence[dict], fmt: str):
        content = report.render(lines, records, fmt)
        self.out.write(content)
        report.write(f"{name}.{'jsonl' if fmt == 'json' else 'txt'}", content)

    def simulate(self, args) -> int:
        seed = args.seed if args.seed is not None else self.app_config.get_setting("simulation", "seed")
        max_trials = args.max_trials or self.app_config.get_setting("simulation", "max_trials")
        protocol = ProtocolManager()
        protocol.build_global_state()
        seeds = [seed + j for j in range(args.jobs)]

        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(lambda s: protocol.sample_until_halt(s, max_trials), seeds))
        else:
            results = [protocol.sample_until_halt(seed, max_trials)]

        runs = list(zip(seeds, results))
        report = self._reports(args)
        self._emit(report, "simulation", report.simulation_lines(runs),
                   report.simulation_records(runs), self._format(args))
        return EXIT_OK

    def derive(self, args) -> int:
        manager = self._derivation_manager()
        report = self._reports(args)
        depth = self._depth(args)
        fmt = self._format(args)
        if args.mode == "naive":
            certificate = manager.variant_for(Agent(args.agent), depth)
            self._emit(report, f"trace_naive_{args.agent}", report.contradiction_lines(certificate),
                       report.contradiction_records(certificate), fmt)
        else:
            certificate = manager.certify_block(depth)
            self._emit(report, "block_contextual", report.block_lines(certificate),
                       report.block_records(certificate), fmt)
        return EXIT_OK

    def check(self, args) -> int:
        results = IdentityChecker().run_all()
        report = self._reports(args)
        self._emit(report, "identities", report.identity_lines(results),
                   report.identity_records(results), self._format(args))
        return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE

    def report(self, args) -> int:
        manager = self._derivation_manager()
        depth = self._depth(args)
        report = self._reports(args)
        lines = report.verdict_report(
            manager.reproduce_contradiction(depth),
            manager.reproduce_agent_variants(depth),
            manager.certify_block(depth),
            manager.compare_fixpoints(depth),
            IdentityChecker(manager.protocol).run_all(),
            manager.verify_premise_physics(),
        )
        self._emit(report, "verdict_report", lines, (), "text")
        return EXIT_OK


def run(argv: Optional[List[str]] = None, out: TextIO = None,
        app_config: AppConfig = None) -> int:
    """
    Run one command

    Args:
        argv: Arguments without the program name; sys.argv[1:] by default
        out: Stream for command output; stdout by default
        app_config: Preloaded configuration; initialized from disk when omitted

    Returns:
        0 on success, 1 on a failed check or derivation, 2 on a usage error
    """
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    owned = app_config is None
    if owned:
        app_config, init_errors = initialize_application()
        if not app_config:
            print(f"{APP_NAME}: configuration error: {'; '.join(init_errors)}", file=sys.stderr)
            return EXIT_USAGE

    logger = logging.getLogger(__name__)
    runner = CommandRunner(app_config, out)
    try:
        logger.info(f"Running command: {args.command}")
        return getattr(runner, args.command)(args)

    except FRLogicError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"{APP_NAME}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE

    except KeyboardInterrupt:
        logger.info("Interrupted by user (Ctrl+C)")
        return EXIT_FAILURE

    except OSError as e:
        logger.critical(f"File system error: {e}")
        print(f"{APP_NAME}: {e}", file=sys.stderr)
        return EXIT_FAILURE

    except Exception as e:
        logger.critical(f"Unexpected error: {e}")
        logger.critical(f"Traceback:\n{traceback.format_exc()}")
        print(f"{APP_NAME}: unexpected error: {e}", file=sys.stderr)
        return EXIT_FAILURE

    finally:
        if owned:
            app_config.close_logging()


if __name__ == "__main__":
    sys.exit(run())

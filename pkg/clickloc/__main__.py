"""Entry point for clickloc: python3 -m clickloc"""

from dataclasses import replace
import argparse
import logging
import sys

from . import __version__
from .errors import ClickLocError, DataFormatError


def _values(text: str) -> list[float]:
    """Comma-separated numbers; 'inf' allowed."""
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid value list {text!r}") from e
    return [int(v) if v.is_integer() else v for v in values]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clickloc",
        description="Estimate range and azimuth of sperm whale clicks from sparse-coded, pooled features.",
    )
    parser.add_argument("--version", action="version", version=f"clickloc {__version__}")
    parser.add_argument("--config", metavar="PATH", help="TOML config file (defaults when omitted)")
    parser.add_argument("--seed", type=int, metavar="U64", help="Root seed, overrides the config")
    parser.add_argument("--threads", type=int, metavar="N", help="Worker count, 0 = all cores")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Log per-batch details")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Log warnings and errors only")
    parser.add_argument("--debug", action="store_true", help="Show tracebacks instead of one-line errors")

    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    gen = commands.add_parser("gen", help="Generate synthetic clicks")
    gen.add_argument("--count", type=int, help="Number of clicks (default: data.count)")
    gen.add_argument("--out", metavar="PATH", help="Output file (default: paths.clicks)")
    gen.add_argument("--format", choices=["csv", "binary"], help="Output format (default: from the extension)")

    train_dict = commands.add_parser("train-dict", help="Fit PCA and learn the dictionary")
    train_dict.add_argument("--clicks", metavar="PATH", help="Click file or WAV directory (default: paths.clicks)")
    train_dict.add_argument("--out", metavar="PATH", help="Dictionary file (default: paths.dictionary)")

    encode = commands.add_parser("encode", help="Encode and pool clicks into a feature cache")
    encode.add_argument("--clicks", metavar="PATH", help="Click file or WAV directory (default: paths.clicks)")
    encode.add_argument("--dict", metavar="PATH", help="Dictionary file (default: paths.dictionary)")
    encode.add_argument("--out", metavar="PATH", help="Feature cache (default: paths.features)")

    train_eval = commands.add_parser("train-eval", help="Cross-validate regressors and save final models")
    train_eval.add_argument("--features", metavar="PATH", help="Feature cache (default: paths.features)")
    train_eval.add_argument("--out-dir", metavar="DIR", help="Report and model directory (default: paths.output_dir)")

    sweep = commands.add_parser("sweep", help="Run the strict protocol over mu or k")
    sweep.add_argument("--axis", choices=["mu", "k"], required=True, help="Swept parameter")
    sweep.add_argument("--values", type=_values, required=True, help="Comma-separated values, e.g. 1,2,3,4")
    sweep.add_argument("--clicks", metavar="PATH", help="Click file (default: paths.clicks, synthetic if missing)")
    sweep.add_argument("--out-dir", metavar="DIR", help="Output directory (default: paths.output_dir)")

    commands.add_parser("pipeline", help="gen, train-dict, encode and train-eval in sequence")
    return parser


def run(args: argparse.Namespace) -> None:
    from .app import cmd_encode, cmd_gen, cmd_pipeline, cmd_sweep, cmd_train_dict, cmd_train_eval
    from .config import PipelineConfig
    from .ui.console import make_console

    cfg = PipelineConfig.load(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    cfg.validate()
    console = None if args.quiet else make_console()

    if args.command == "gen":
        cmd_gen(cfg, args.count, args.out, args.format)
    elif args.command == "train-dict":
        cmd_train_dict(cfg, args.clicks, args.out)
    elif args.command == "encode":
        cmd_encode(cfg, args.clicks, args.dict, args.out)
    elif args.command == "train-eval":
        cmd_train_eval(cfg, args.features, args.out_dir, console)
    elif args.command == "sweep":
        cmd_sweep(cfg, args.axis, args.values, args.clicks, args.out_dir, console)
    elif args.command == "pipeline":
        cmd_pipeline(cfg, console)


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)

    from .ui.console import setup_logging

    setup_logging(logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO)
    log = logging.getLogger("clickloc")

    try:
        run(args)
        return 0
    except KeyboardInterrupt:
        log.warning("Interrupted")
        return 130
    except (OSError, DataFormatError) as e:
        if args.debug:
            raise
        log.error("%s", e)
        return 2
    except ClickLocError as e:
        if args.debug:
            raise
        log.error("%s", e)
        return 1
    except Exception as e:
        if args.debug:
            raise
        log.error("ERROR: %s", e)
        return 1


if __name__ == "__main__":
    sys.exit(main())

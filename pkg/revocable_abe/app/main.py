"""
Main entry point for the revocable-abe command-line toolkit.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .. import __version__
from ..bench.suites import SUITES
from ..core.errors import (
    AbeError,
    AttributeRevoked,
    ConfigError,
    InvalidAttribute,
    InvalidAttributeSet,
    InvalidComponent,
    InvalidDegree,
    InvalidIdentity,
    MalformedInput,
    NotASubset,
    ParseError,
    PolicyNotSatisfied,
    ProxyRequestError,
    RequesterRevoked,
    ThresholdError,
    UnknownUser,
)
from ..core.models import RevocationMode
from . import commands

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CRYPTO = 2
EXIT_IO = 3

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"

USAGE_ERRORS = (
    commands.UsageError,
    ConfigError,
    InvalidAttribute,
    InvalidAttributeSet,
    InvalidDegree,
    InvalidIdentity,
    NotASubset,
    ParseError,
    ThresholdError,
    UnknownUser,
)
IO_ERRORS = (OSError, MalformedInput, InvalidComponent, ProxyRequestError)


class ToolkitParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_conversion_flags(parser: argparse.ArgumentParser, suffix: str = "", who: str = "") -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(f"--proxy{suffix}", metavar="URL", help=f"Proxy service URL{who}")
    group.add_argument(f"--pxk{suffix}", type=Path, metavar="FILE", help=f"Proxy key file for offline conversion{who}")


def build_parser() -> argparse.ArgumentParser:
    parser = ToolkitParser(
        prog="revocable-abe",
        description="Attribute-based encryption with proxy-based revocation and delegation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ToolkitParser)

    p = sub.add_parser("setup", help="Create public key, master key and initial proxy key")
    p.add_argument("--max-revoked", "-t", type=int, required=True, help="Revocation capacity t")
    p.add_argument("--mode", choices=[m.value for m in RevocationMode], default=RevocationMode.KEY.value)
    p.add_argument("--attrs", help="Initial attributes (per-attribute mode)")
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=commands.cmd_setup)

    p = sub.add_parser("keygen", help="Issue a user key (updates the master key file)")
    p.add_argument("--mk", type=Path, required=True)
    p.add_argument("--user", required=True)
    p.add_argument("--attrs", required=True, help="Comma separated attributes")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=commands.cmd_keygen)

    p = sub.add_parser("enc", help="Encrypt a file under a policy")
    p.add_argument("--pk", type=Path, required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=commands.cmd_enc)

    p = sub.add_parser("dec", help="Decrypt a container")
    p.add_argument("--sk", type=Path, required=True, help="User, baseline or delegated key")
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    _add_conversion_flags(p)
    _add_conversion_flags(p, "-b", " of the delegating authority (friend-of-friend keys)")
    p.set_defaults(func=commands.cmd_dec)

    p = sub.add_parser("revoke", help="Publish a proxy key for the complete revocation list")
    p.add_argument("--mk", type=Path, required=True)
    p.add_argument("--users", default="", help="Comma separated user names; empty un-revokes everyone")
    p.add_argument("--attribute", help="Attribute the list applies to (per-attribute mode)")
    p.add_argument("--push", metavar="URL", help="Proxy service to push the key to")
    p.add_argument("--out", type=Path, help="Write the proxy key to this file")
    p.add_argument("--token", help="Admin token (default: $REVABE_PROXY_TOKEN)")
    p.set_defaults(func=commands.cmd_revoke)

    p = sub.add_parser("delegate", help="Derive a delegated key")
    p.add_argument("--sk", type=Path, required=True)
    p.add_argument("--attrs", required=True, help="Subset of the key's attributes")
    p.add_argument("--pk", type=Path, help="Public key of the issuing authority")
    p.add_argument("--mk-b", type=Path, help="Delegator's own master key (friend-of-friend)")
    p.add_argument("--to", help="Delegatee registered with --mk-b")
    p.add_argument("--out", type=Path, required=True)
    _add_conversion_flags(p)
    p.set_defaults(func=commands.cmd_delegate)

    p = sub.add_parser("proxy", help="Run the conversion proxy service")
    p.add_argument("--config", type=Path, help="JSON config file")
    p.set_defaults(func=commands.cmd_proxy)

    p = sub.add_parser("bench", help="Run a benchmark suite and write CSV")
    p.add_argument("--suite", required=True, choices=[*SUITES, "all"])
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--quick", action="store_true", help="Small sweep")
    p.add_argument("--iterations", type=int, help="Measured iterations per point")
    p.set_defaults(func=commands.cmd_bench)

    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        force=True,
    )


def _fail(code: int, label: str, exc: BaseException) -> int:
    print(f"{label}: {exc}", file=sys.stderr)
    logger.debug("command failed", exc_info=exc)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.func(args)
    except RequesterRevoked as exc:
        return _fail(EXIT_CRYPTO, "revoked", exc)
    except AttributeRevoked as exc:
        return _fail(EXIT_CRYPTO, "revoked", exc)
    except PolicyNotSatisfied as exc:
        return _fail(EXIT_CRYPTO, "not satisfied", exc)
    except USAGE_ERRORS as exc:
        return _fail(EXIT_USAGE, "error", exc)
    except IO_ERRORS as exc:
        return _fail(EXIT_IO, "i/o error", exc)
    except AbeError as exc:
        return _fail(EXIT_CRYPTO, "failed", exc)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 internal-consistency failure,
3 verification failure, 130 interrupted.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import threading
from dataclasses import dataclass
from math import factorial
from typing import Callable, Sequence

from . import __version__
from .drgeom import (
    extract_from_flow,
    quadratic_dr_integral,
    quadratic_table,
    table_to_csv,
    theta_normalized_recursive,
)
from .errors import Cancelled, ConsistencyError
from .exactalg import DiffPoly, TruncationContext, jet_decode
from .hierarchy import flow_rhs
from .verify import SUITES, run_suite

EXIT_OK, EXIT_USAGE, EXIT_CONSISTENCY, EXIT_VERIFY, EXIT_INTERRUPTED = 0, 1, 2, 3, 130
ENV_PREFIX = "MOYALLAX_"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    mu_cap: int = 4
    eps_window: tuple[int, int] | None = None
    psdo_depth: int | None = None
    output_format: str = "text"
    seed: int = 0

    def window(self, d: int) -> tuple[int, int]:
        """Default (-2d-2, max(2d+2, 2d-2+mu_cap)); flow d reaches eps^max(2d, 2d-2+mu_cap)."""
        if self.eps_window is not None:
            return self.eps_window
        return (-2 * d - 2, max(2 * d + 2, 2 * d - 2 + self.mu_cap))

    def depth(self, d: int) -> int:
        """Default -2d: (L^(d+1/2))_+ reads the square root only down to dx^(-2d)."""
        if self.psdo_depth is not None:
            return self.psdo_depth
        return -2 * d

    def trunc(self, d: int) -> TruncationContext:
        lo, hi = self.window(d)
        return TruncationContext(max_mu=self.mu_cap, min_eps=lo, max_eps=hi)


def _env(name: str):
    return os.environ.get(ENV_PREFIX + name)


def _int_env(name: str):
    v = _env(name)
    if v is None:
        return None
    try:
        return int(v)
    except ValueError:
        raise UsageError(f"{ENV_PREFIX}{name} must be an integer, got {v!r}") from None


def _window_env():
    v = _env("EPS_WINDOW")
    if v is None:
        return None
    try:
        lo, hi = (int(x) for x in v.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"{ENV_PREFIX}EPS_WINDOW must be two integers, got {v!r}") from None
    return (lo, hi)


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Flags win over MOYALLAX_* environment variables, which win over defaults."""

    def pick(flag, env):
        return flag if flag is not None else env

    mu_cap = pick(args.mu_cap, _int_env("MU_CAP"))
    window = pick(tuple(args.eps_window) if args.eps_window else None, _window_env())
    depth = pick(args.depth, _int_env("DEPTH"))
    fmt = pick(args.format, _env("FORMAT")) or "text"
    seed = pick(args.seed, _int_env("SEED"))
    cfg = RunConfig(
        mu_cap=4 if mu_cap is None else mu_cap,
        eps_window=window,
        psdo_depth=depth,
        output_format=fmt,
        seed=0 if seed is None else seed,
    )
    if cfg.mu_cap < 0:
        raise UsageError("--mu-cap must be nonnegative")
    if cfg.psdo_depth is not None and cfg.psdo_depth > -2:
        raise UsageError("--depth must be <= -2")
    if cfg.output_format not in ("json", "csv", "text"):
        raise UsageError(f"unknown output format {cfg.output_format!r}")
    if window is not None and window[0] > window[1]:
        raise UsageError("--eps-window needs LO <= HI")
    return cfg


# rendering


def _jets_str(jets) -> str:
    return "*".join("u_{%d,%d}" % jet_decode(c) for c in jets) or "1"


def _poly_rows(p: DiffPoly) -> list[list[str]]:
    return [[str(c.re), str(c.im), str(e), str(m), _jets_str(j)] for (j, e, m), c in p.sorted_items()]


def render_poly(p: DiffPoly, fmt: str, meta: dict) -> str:
    if fmt == "json":
        obj = dict(meta)
        obj["trunc"] = p.trunc.to_json()
        obj["dropped"] = p.dropped
        obj["terms"] = p.to_json()
        return json.dumps(obj, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["re", "im", "eps", "mu", "jets"])
        w.writerows(_poly_rows(p))
        return buf.getvalue()
    head = " ".join(f"{k}={v}" for k, v in meta.items())
    t = p.trunc
    return f"# {head} max_mu={t.max_mu} eps=[{t.min_eps},{t.max_eps}]\n{p}\n"


def _frac(x) -> str:
    return f"{x.numerator}/{x.denominator}"


# commands


def cmd_flow(args, cfg: RunConfig, cancel: threading.Event) -> tuple[int, str]:
    d = args.d
    if d < 1:
        raise UsageError("--d must be >= 1")
    if cfg.mu_cap % 2:
        raise UsageError("--mu-cap must be even for flow computations")
    depth = cfg.depth(d)
    if depth > -2 * d:
        raise UsageError(f"--depth must be <= {-2 * d} for flow {d}")
    P = flow_rhs(d, cfg.trunc(d), depth, cancel)
    return EXIT_OK, render_poly(P, cfg.output_format, {"flow": d, "depth": depth})


def cmd_dr_quadratic(args, cfg: RunConfig, cancel) -> tuple[int, str]:
    if args.table is not None:
        gmax, amax, bmax = args.table
        if min(gmax, amax, bmax) < 0:
            raise UsageError("--table entries must be nonnegative")
        rows = quadratic_table(gmax, amax, bmax)
        status = EXIT_OK
        if args.verify:
            bad = [r for r in rows if theta_normalized_recursive(*r[:5]) != factorial(r[0]) * r[5]]
            if bad:
                status = EXIT_VERIFY
        if cfg.output_format == "json":
            obj = [
                {"g": g, "a1": a1, "a2": a2, "b1": b1, "b2": b2, "value": _frac(v)}
                for g, a1, a2, b1, b2, v in rows
            ]
            return status, json.dumps(obj, indent=2) + "\n"
        return status, table_to_csv(rows)
    if args.g is None or args.a is None or args.b is None:
        raise UsageError("dr-quadratic needs --g, --a A1 A2 and --b B1 B2 (or --table)")
    if args.g < 0:
        raise UsageError("--g must be nonnegative")
    (a1, a2), (b1, b2) = args.a, args.b
    value = quadratic_dr_integral(args.g, a1, a2, b1, b2)
    status = EXIT_OK
    result = {"g": args.g, "a": [a1, a2], "b": [b1, b2], "value": _frac(value)}
    if args.verify:
        rec = theta_normalized_recursive(args.g, a1, a2, b1, b2)
        agree = rec == factorial(args.g) * value
        result["recursion"] = _frac(rec)
        result["agree"] = agree
        if not agree:
            status = EXIT_VERIFY
    if cfg.output_format == "json":
        return status, json.dumps(result, indent=2) + "\n"
    if cfg.output_format == "csv":
        return status, table_to_csv([(args.g, a1, a2, b1, b2, value)])
    text = _frac(value) if value.denominator != 1 else str(value.numerator)
    if args.verify:
        text += f"\nrecursion {result['recursion']} " + ("agrees" if result["agree"] else "DISAGREES")
    return status, text + "\n"


def cmd_verify(args, cfg: RunConfig, cancel) -> tuple[int, str]:
    opts: dict = {}
    explicit_mu = args.mu_cap is not None or _env("MU_CAP") is not None
    if explicit_mu:
        opts["mu_cap"] = cfg.mu_cap
    if args.suite == "assoc":
        opts["seed"] = cfg.seed
        if args.count is not None:
            opts["count"] = args.count
    if args.suite in ("commute", "dispersionless") and args.d is not None:
        opts["d"] = args.d
    if cfg.psdo_depth is not None and args.suite in ("sqrt", "flow1", "commute", "dispersionless"):
        opts["depth"] = cfg.psdo_depth
    if args.suite == "extract-d1" and args.gmax is not None:
        opts["gmax"] = args.gmax
    report = run_suite(args.suite, cancel=cancel, **opts)
    if cfg.output_format == "json":
        out = json.dumps(report.to_json(), indent=2) + "\n"
    elif cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "status", "discrepancy"])
        for c in report.checks:
            w.writerow([c.name, "PASS" if c.ok else "FAIL", "" if c.ok else str(c.discrepancy)])
        out = buf.getvalue()
    else:
        out = report.to_text() + "\n"
    return (EXIT_OK if report.ok else EXIT_VERIFY), out


def cmd_extract(args, cfg: RunConfig, cancel) -> tuple[int, str]:
    b = list(args.b)
    a = list(args.a) if args.a is not None else None
    if sum(b) != 0:
        raise UsageError("--b entries must sum to zero")
    if a is not None and (len(a) != len(b) or sum(a) != 0):
        raise UsageError("--a must have as many entries as --b and sum to zero")
    if args.d < 1 or args.g < 0 or args.k < 0:
        raise UsageError("need --d >= 1, --g >= 0, --k >= 0")
    depth = cfg.depth(args.d)
    if depth > -2 * args.d:
        raise UsageError(f"--depth must be <= {-2 * args.d} for flow {args.d}")
    ex = extract_from_flow(args.d, args.g, args.k, b, a, depth=depth, cancel=cancel)
    if cfg.output_format == "json":
        return EXIT_OK, json.dumps(ex.to_json(), indent=2) + "\n"
    if cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["d", "g", "k", "a", "b", "value", "provenance"])
        w.writerow([ex.d, ex.g, ex.k, " ".join(map(str, ex.a)), " ".join(map(str, ex.b)), _frac(ex.value), ex.provenance])
        return EXIT_OK, buf.getvalue()
    v = ex.value
    text = str(v.numerator) if v.denominator == 1 else _frac(v)
    return EXIT_OK, f"{text}\nprovenance: {ex.provenance}\n"


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--mu-cap", type=int, default=None, help="largest mu exponent kept (default 4)")
    g.add_argument("--eps-window", type=int, nargs=2, metavar=("LO", "HI"), default=None,
                   help="eps exponents kept (default -2d-2 .. max(2d+2, 2d-2+mu_cap))")
    g.add_argument("--depth", type=int, default=None,
                   help="lowest dx power kept in the square root (default -2d; sqrt suite -10)")
    g.add_argument("--format", choices=("json", "csv", "text"), default=None)
    g.add_argument("--seed", type=int, default=None, help="seed for randomized suites")
    g.add_argument("--output", default=None, help="write to this file instead of stdout")

    parser = _Parser(prog="moyallax", description="Noncommutative KdV flows and DR intersection numbers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("flow", parents=[common], help="print du/dt_d")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("dr-quadratic", parents=[common], help="quadratic DR integrals")
    p.add_argument("--g", type=int)
    p.add_argument("--a", type=int, nargs=2, metavar=("A1", "A2"))
    p.add_argument("--b", type=int, nargs=2, metavar=("B1", "B2"))
    p.add_argument("--table", type=int, nargs=3, metavar=("GMAX", "AMAX", "BMAX"))
    p.add_argument("--verify", action="store_true", help="check against the genus recursion")
    p.set_defaults(func=cmd_dr_quadratic)

    p = sub.add_parser("verify", parents=[common], help="run an invariant suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--d", type=int, default=None, help="single flow for commute/dispersionless")
    p.add_argument("--count", type=int, default=None, help="number of random triples (assoc)")
    p.add_argument("--gmax", type=int, default=None, help="largest genus (extract-d1)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extract", parents=[common], help="read an intersection number off g_d")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--b", type=int, nargs="+", required=True)
    p.add_argument("--a", type=int, nargs="+", default=None, help="Theta labels (default zeros)")
    p.set_defaults(func=cmd_extract)
    return parser


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".moyallax-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _run_cancellable(fn: Callable[[threading.Event], tuple[int, str]]) -> tuple[int, str]:
    """Run ``fn`` in a worker; Ctrl-C sets the cancel event and waits for it to stop."""
    cancel = threading.Event()
    box: dict = {}

    def target():
        try:
            box["result"] = fn(cancel)
        except BaseException as exc:  # re-raised in the main thread
            box["error"] = exc

    worker = threading.Thread(target=target, daemon=True)
    worker.start()
    try:
        while worker.is_alive():
            worker.join(0.1)
    except KeyboardInterrupt:
        cancel.set()
        worker.join()
        raise Cancelled("interrupted") from None
    if "error" in box:
        raise box["error"]
    return box["result"]


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        status, text = _run_cancellable(lambda cancel: args.func(args, cfg, cancel))
    except UsageError as exc:
        print(f"moyallax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"moyallax: internal consistency failure: {exc}", file=sys.stderr)
        if exc.discrepancy is not None:
            print(f"discrepancy: {exc.discrepancy}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except Cancelled:
        print("moyallax: interrupted; no output written", file=sys.stderr)
        return EXIT_INTERRUPTED
    except ValueError as exc:
        print(f"moyallax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    output = args.output if args.output is not None else _env("OUTPUT")
    if output:
        _write_atomic(output, text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())

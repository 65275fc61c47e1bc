"""Command line entry point: ``wpscat run CONFIG`` and ``wpscat suite DIR``.

Exit codes: 0 success, 1 invalid config, 2 runtime/numerical error,
3 a suite config whose results miss its ``expect`` block.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import scipy.fft as sfft

from .config import EXPERIMENTS, load_config, parse_config
from .errors import ConfigInvalid, WpscatError
from .runner import Report, emit_report, run_experiment

log = logging.getLogger("wpscat")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_EXPECT = 0, 1, 2, 3


def check_expectations(report: Report, expect: dict) -> list[str]:
    """Human-readable list of unmet expectations (empty when all hold)."""
    problems = []
    got_err = report.error["type"] if report.error else None
    if "error" in expect:
        if got_err != expect["error"]:
            problems.append(f"error: expected {expect['error']}, got {got_err}")
        return problems
    if got_err:
        return [f"unexpected error {got_err}: {report.error['message']}"]
    sc = report.scalars
    if "verdict" in expect:
        got = report.verdict if report.verdict is not None else (report.series[0].verdict if report.series else None)
        if got != expect["verdict"]:
            problems.append(f"verdict: expected {expect['verdict']}, got {got}")
    if "fit_exponent" in expect:
        lo, hi = expect["fit_exponent"]
        val = report.series[0].fit_exponent if report.series else sc.get("fitted_exponent", math.nan)
        if not lo <= val <= hi:
            problems.append(f"fit_exponent {val:.4g} outside [{lo}, {hi}]")
    if "fit_exponents" in expect:
        for s, (lo, hi) in zip(report.series, expect["fit_exponents"]):
            if not lo <= s.fit_exponent <= hi:
                problems.append(f"fit_exponent {s.fit_exponent:.4g} outside [{lo}, {hi}]")
    for key in ("converged", "dominated"):
        if key in expect and sc.get(key) != expect[key]:
            problems.append(f"{key}: expected {expect[key]}, got {sc.get(key)}")
    if "energy" in expect:
        want, tol = expect["energy"]
        if abs(sc.get("energy", math.inf) - want) > tol:
            problems.append(f"energy {sc.get('energy')} not within {tol} of {want}")
    if "ratio_max" in expect and not sc.get("ratio", math.inf) <= expect["ratio_max"]:
        problems.append(f"ratio {sc.get('ratio')} above {expect['ratio_max']}")
    values = [v for s in report.series for v in s.values] + [sc[k] for k in ("residual",) if k in sc]
    if "max_value" in expect and values and max(values) > expect["max_value"]:
        problems.append(f"max value {max(values):.4g} above {expect['max_value']}")
    if "min_value" in expect and values and min(values) < expect["min_value"]:
        problems.append(f"min value {min(values):.4g} below {expect['min_value']}")
    return problems


def _run_one(path: Path, out_dir: Path | None, fmt: str) -> tuple[int, Report | None, str]:
    try:
        cfg = load_config(path)
        report = run_experiment(cfg)
    except ConfigInvalid as exc:
        return EXIT_CONFIG, None, f"{path}: invalid config: {exc}"
    out = out_dir if out_dir is not None else Path(cfg.output_dir)
    try:
        emit_report(report, out, fmt)
    except WpscatError as exc:
        return EXIT_RUNTIME, report, f"{path}: {exc}"
    if report.error:
        return EXIT_RUNTIME, report, f"{path}: {report.error['type']}: {report.error['message']}"
    return EXIT_OK, report, f"{path}: ok -> {out}"


def cmd_run(args) -> int:
    code, _, msg = _run_one(Path(args.config), Path(args.output_dir) if args.output_dir else None, args.format)
    print(msg, file=sys.stderr if code else sys.stdout)
    return code


def cmd_suite(args) -> int:
    paths = sorted(Path(args.directory).glob("*.json"))
    if not paths:
        print(f"no configs in {args.directory}", file=sys.stderr)
        return EXIT_CONFIG
    out_root = Path(args.output_dir) if args.output_dir else Path("out") / "suite"

    def job(p):
        code, report, msg = _run_one(p, out_root / p.stem, args.format)
        if code == EXIT_CONFIG:
            return p, code, [msg]
        expect = json.loads(p.read_text()).get("expect") or {}
        problems = check_expectations(report, expect)
        if problems:
            return p, EXIT_EXPECT, problems
        # an expected error counts as a pass
        return p, EXIT_OK if (code == EXIT_OK or "error" in expect) else code, [msg]

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        results = list(pool.map(job, paths))
    worst = EXIT_OK
    for p, code, lines in results:
        status = "PASS" if code == EXIT_OK else "FAIL"
        print(f"{status} {p.name}")
        for line in lines if code else []:
            print(f"    {line}")
        if code == EXIT_CONFIG:
            worst = EXIT_CONFIG if worst == EXIT_OK else worst
        elif code:
            worst = max(worst, code)
    return worst


def cmd_kind(args) -> int:
    """Run a single experiment kind from a config whose ``experiment`` field is overridden."""
    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raw["experiment"] = args.kind
    try:
        cfg = parse_config(raw)
        report = run_experiment(cfg)
        emit_report(report, Path(args.output_dir or cfg.output_dir), args.format)
    except ConfigInvalid as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except WpscatError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_RUNTIME
    if report.error:
        print(f"{report.error['type']}: {report.error['message']}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors count as config errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


_DEFAULTS = {"output_dir": None, "threads": 1, "format": "csv", "verbose": False}


def build_parser() -> argparse.ArgumentParser:
    # options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=argparse.SUPPRESS, help="report directory (overrides the config)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="FFT workers / parallel suite jobs")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    p = _Parser(prog="wpscat", description="Wave packet scattering experiments", parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run one config file", parents=[common])
    r.add_argument("config")
    r.set_defaults(func=cmd_run)
    s = sub.add_parser("suite", help="run every *.json in a directory and check expectations", parents=[common])
    s.add_argument("directory")
    s.set_defaults(func=cmd_suite)
    for kind in EXPERIMENTS:
        k = sub.add_parser(kind, help=f"run a {kind} experiment from a config", parents=[common])
        k.add_argument("config")
        k.set_defaults(func=cmd_kind, kind=kind)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for key, value in _DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.threads < 1:
        print("--threads must be at least 1", file=sys.stderr)
        return EXIT_CONFIG
    with sfft.set_workers(args.threads):
        return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

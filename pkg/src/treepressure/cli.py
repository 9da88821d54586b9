"""Command line front end.

System files are plain text: an ``alphabet:`` header, an ``E:`` line
followed by the matrix rows, and an optional ``w:`` line for ambient
weights; ``#`` starts a comment and blank lines are ignored::

    alphabet: 0 1
    E:
    1 1
    1 0
    w: 1 1

Exit codes: 0 success, 2 usage or parse error, 3 certificate failure
(depth cap reached), 4 oracle guard exceeded.  Sweeps additionally exit
nonzero when monotonicity is falsified by disjoint enclosures.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .algebra import Alphabet, InteractionSystem, check_assumption_A
from .analysis import (
    BracketViolationError,
    SweepSpec,
    bracket_report,
    emit_dataset,
    sweep,
    verify_limits,
)
from .oracle import OracleGuardError, class_partition, omega_counts, pressure_sequence
from .pressure import CertificateCapError, pressure_certificate

__all__ = [
    "SystemParseError",
    "parse_system",
    "render_system",
    "cmd_pressure",
    "cmd_sweep",
    "cmd_oracle",
    "cmd_limits",
    "main",
    "run",
]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CERTIFICATE = 3
EXIT_GUARD = 4


class SystemParseError(ValueError):
    """A system file is malformed; the message names the offending line."""


class _UsageError(ValueError):
    pass


def parse_system(text: str) -> InteractionSystem:
    """Parse a system file into an interaction system.

    The alphabet order and the row-major matrix are taken exactly as
    written; ``w`` defaults to all ones when absent.  Violations of the
    positive row/column sum requirement are rejected here so every command
    downstream can rely on it.
    """
    entries: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if content:
            entries.append((lineno, content))
    if not entries:
        raise SystemParseError("empty system file")

    lineno, head = entries[0]
    if not head.startswith("alphabet:"):
        raise SystemParseError(f"line {lineno}: expected 'alphabet:' header, got {head!r}")
    symbols = head[len("alphabet:") :].split()
    if not symbols:
        raise SystemParseError(f"line {lineno}: alphabet needs at least one symbol")
    if len(set(symbols)) != len(symbols):
        raise SystemParseError(f"line {lineno}: duplicate alphabet symbols")
    k = len(symbols)

    if len(entries) < 2:
        raise SystemParseError(f"line {lineno}: expected an 'E:' line after the alphabet")
    e_lineno, e_head = entries[1]
    if e_head != "E:":
        raise SystemParseError(f"line {e_lineno}: expected 'E:', got {e_head!r}")

    def parse_numbers(lineno: int, tokens: list[str], what: str) -> list[float]:
        values = []
        for pos, token in enumerate(tokens):
            try:
                value = float(token)
            except ValueError:
                raise SystemParseError(
                    f"line {lineno}: non-numeric {what} entry {token!r}"
                ) from None
            if not math.isfinite(value):
                raise SystemParseError(f"line {lineno}: non-finite {what} entry {token!r}")
            if value < 0.0:
                raise SystemParseError(
                    f"line {lineno}: negative {what} entry {token!r} (position {pos})"
                )
            values.append(value)
        return values

    rows: list[list[float]] = []
    idx = 2
    for r in range(k):
        if idx >= len(entries):
            raise SystemParseError(
                f"line {entries[-1][0]}: expected {k} matrix rows, found only {r}"
            )
        lineno, content = entries[idx]
        idx += 1
        tokens = content.split()
        if len(tokens) != k:
            raise SystemParseError(
                f"line {lineno}: matrix row {r} has {len(tokens)} entries, expected {k}"
            )
        rows.append(parse_numbers(lineno, tokens, "matrix"))

    w = None
    if idx < len(entries):
        lineno, content = entries[idx]
        idx += 1
        if not content.startswith("w:"):
            raise SystemParseError(
                f"line {lineno}: expected 'w:' line or end of file, got {content!r}"
            )
        tokens = content[len("w:") :].split()
        if len(tokens) != k:
            raise SystemParseError(
                f"line {lineno}: w has {len(tokens)} entries, expected {k}"
            )
        w = parse_numbers(lineno, tokens, "weight")
    if idx < len(entries):
        lineno, content = entries[idx]
        raise SystemParseError(f"line {lineno}: unexpected content {content!r}")

    system = InteractionSystem(Alphabet(tuple(symbols)), np.array(rows), w)
    report = check_assumption_A(system)
    if not report.ok:
        raise SystemParseError(
            f"line {e_lineno}: assumption (A) violated: zero row sums at "
            f"{list(report.zero_rows)}, zero column sums at {list(report.zero_cols)}"
        )
    return system


def _fmt_num(x: float) -> str:
    return format(float(x), ".17g")


def render_system(system: InteractionSystem) -> str:
    """Canonical text form; parse_system(render_system(s)) reproduces s."""
    lines = ["alphabet: " + " ".join(system.alphabet.symbols), "E:"]
    for row in system.E:
        lines.append(" ".join(_fmt_num(x) for x in row))
    lines.append("w: " + " ".join(_fmt_num(x) for x in system.w))
    return "\n".join(lines) + "\n"


def _load_system(path: str) -> InteractionSystem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise SystemParseError(f"cannot read {path}: {err}") from None
    return parse_system(text)


def _parse_base(token: str) -> float:
    if token == "e":
        return math.e
    try:
        base = float(token)
    except ValueError:
        raise _UsageError(f"invalid log base {token!r}") from None
    if base <= 1.0:
        raise _UsageError("log base must exceed 1")
    return base


def _fmt6(x: float) -> str:
    return format(float(x), ".6g")


def cmd_pressure(ns: argparse.Namespace) -> int:
    """Certify the pressure of one system at one branching parameter."""
    try:
        base = _parse_base(ns.base)
        if ns.d <= 1.0:
            raise _UsageError("d must exceed 1")
        if ns.width <= 0.0:
            raise _UsageError("width must be positive")
        system = _load_system(ns.system)
    except (_UsageError, SystemParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cert = pressure_certificate(system, ns.d, ns.width)
    except CertificateCapError as err:
        print(f"certificate failure: {err}", file=sys.stderr)
        return EXIT_CERTIFICATE
    lnb = math.log(base)
    print(f"d = {_fmt6(cert.d)}")
    print(f"k = {cert.k}")
    print(f"log_base = {ns.base}")
    print(f"pressure_lo = {_fmt6(cert.lo / lnb)}")
    print(f"pressure = {_fmt6(cert.p_k / lnb)}")
    print(f"pressure_hi = {_fmt6(cert.hi / lnb)}")
    print(f"width = {_fmt6(cert.width / lnb)}")
    return EXIT_OK


def cmd_sweep(ns: argparse.Namespace) -> int:
    """Sweep a d grid, emit the dataset, and certify monotonicity."""
    try:
        base = _parse_base(ns.base)
        if ns.d_min <= 1.0:
            raise _UsageError("d-min must exceed 1")
        if ns.points < 1:
            raise _UsageError("points must be at least 1")
        if ns.points > 1 and ns.d_max <= ns.d_min:
            raise _UsageError("d-max must exceed d-min")
        if ns.width <= 0.0:
            raise _UsageError("width must be positive")
        system = _load_system(ns.system)
    except (_UsageError, SystemParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    if ns.points == 1:
        grid = np.array([ns.d_min])
    elif ns.log_grid:
        grid = np.geomspace(ns.d_min, ns.d_max, ns.points)
    else:
        grid = np.linspace(ns.d_min, ns.d_max, ns.points)
    spec = SweepSpec(system, tuple(float(d) for d in grid), ns.width, base)
    result = sweep(spec)
    if not result.rows:
        print("error: every grid point failed to certify", file=sys.stderr)
        return EXIT_CERTIFICATE
    data = emit_dataset(result, ns.format)

    summary_stream = sys.stdout
    if ns.out:
        Path(ns.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        summary_stream = sys.stderr
    print(f"points = {len(result.rows)}", file=summary_stream)
    print(f"failures = {len(result.failures)}", file=summary_stream)
    print(
        f"monotone_certified = {str(result.monotone_certified).lower()}",
        file=summary_stream,
    )
    # point-estimate check at twice the width, an arbitrary but stated slack
    slack = 2.0 * ns.width / math.log(base)
    print(
        "point_estimates_monotone_within_2w = "
        f"{str(result.point_estimates_monotone(slack)).lower()}",
        file=summary_stream,
    )
    for d1, d2 in result.violations:
        print(
            f"violation: enclosure decrease from d = {_fmt6(d1)} to d = {_fmt6(d2)}",
            file=summary_stream,
        )
    for d, message in result.failures:
        print(f"failed point d = {_fmt6(d)}: {message}", file=summary_stream)
    if not result.monotone_certified:
        return 1
    if result.failures:
        return EXIT_CERTIFICATE
    return EXIT_OK


def cmd_oracle(ns: argparse.Namespace) -> int:
    """Exact enumeration reports: pressure sequence, bracket, classes, counts."""
    try:
        if ns.d < 2:
            raise _UsageError("d must be an integer >= 2")
        if ns.depth < 0:
            raise _UsageError("depth must be nonnegative")
        if ns.bracket and ns.kmax < 1:
            raise _UsageError("kmax must be at least 1")
        system = _load_system(ns.system)
    except (_UsageError, SystemParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        values = pressure_sequence(system, ns.d, ns.depth)
        for n, a_n in enumerate(values):
            print(f"a_{n} = {_fmt6(a_n)}")
        if ns.classes:
            classes = class_partition(system, ns.d, 0, ns.depth)
            total = sum(classes.values())
            heaviest = max(classes.values()) if classes else 0.0
            print(f"classes = {len(classes)}")
            print(f"classes_total = {_fmt6(total)}")
            print(f"classes_max = {_fmt6(heaviest)}")
        if ns.omega:
            counts = omega_counts(system, ns.d, 0, ns.depth)
            print(f"omega_v_count = {counts.v_count}")
            print(f"omega_v_bound = {counts.v_bound}")
            print(f"omega_m_count = {counts.m_count}")
            print(f"omega_m_bound = {counts.m_bound}")
        if ns.bracket:
            report = bracket_report(system, ns.d, ns.kmax, ns.depth)
            for k, value in report.lowers:
                print(f"lower k={k} {_fmt6(value)}")
            for n, value in report.uppers:
                print(f"upper n={n} {_fmt6(value)}")
            print(f"bracket_max_lower = {_fmt6(report.max_lower)}")
            print(f"bracket_min_upper = {_fmt6(report.min_upper)}")
            print(f"bracket_width = {_fmt6(report.width)}")
            print(f"bracket_midpoint = {_fmt6(report.midpoint)}")
    except OracleGuardError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_GUARD
    except BracketViolationError as err:
        print(f"bracket violation: {err}", file=sys.stderr)
        return 1
    return EXIT_OK


def cmd_limits(ns: argparse.Namespace) -> int:
    """Compare certified pressures near both ends of the d axis to the limits."""
    try:
        base = _parse_base(ns.base)
        if not 1.0 < ns.d_low < ns.d_high:
            raise _UsageError("need 1 < d-low < d-high")
        if ns.width <= 0.0:
            raise _UsageError("width must be positive")
        system = _load_system(ns.system)
    except (_UsageError, SystemParseError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = verify_limits(system, ns.d_low, ns.d_high, ns.tol_low, ns.tol_high, ns.width)
    except CertificateCapError as err:
        print(f"certificate failure: {err}", file=sys.stderr)
        return EXIT_CERTIFICATE
    lnb = math.log(base)
    print(f"log_base = {ns.base}")
    print(f"log_rho = {_fmt6(report.log_rho / lnb)}")
    print(f"log_r = {_fmt6(report.log_r / lnb)}")
    for name, check in (("low", report.low), ("high", report.high)):
        cert = check.certificate
        print(
            f"pressure_{name} (d = {_fmt6(check.d)}): "
            f"{_fmt6(cert.p_k / lnb)} in [{_fmt6(cert.lo / lnb)}, {_fmt6(cert.hi / lnb)}]"
        )
        print(f"gap_{name} = {_fmt6(check.gap / lnb)}")
        print(f"within_tol_{name} = {str(check.ok).lower()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treepressure",
        description="Topological pressure of weighted Markov tree-shifts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pressure", help="certify the pressure at one d")
    p.add_argument("--system", required=True, help="path to a system file")
    p.add_argument("--d", type=float, required=True, help="branching parameter, > 1")
    p.add_argument("--width", type=float, default=1e-6, help="target enclosure width")
    p.add_argument("--base", default="10", help="log base for display ('e' or a number)")
    p.set_defaults(func=cmd_pressure)

    p = sub.add_parser("sweep", help="sweep a d grid and emit a dataset")
    p.add_argument("--system", required=True)
    p.add_argument("--d-min", type=float, required=True)
    p.add_argument("--d-max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--log-grid", action="store_true", help="log-spaced grid")
    p.add_argument("--width", type=float, default=1e-6)
    p.add_argument("--base", default="10")
    p.add_argument("--format", choices=("csv", "svg"), default="csv")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="exact enumeration reports")
    p.add_argument("--system", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--bracket", action="store_true", help="recursion vs oracle bracket")
    p.add_argument("--kmax", type=int, default=20)
    p.add_argument("--classes", action="store_true", help="pattern class summary")
    p.add_argument("--omega", action="store_true", help="distinct pattern counts")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("limits", help="verify the two pressure limits")
    p.add_argument("--system", required=True)
    p.add_argument("--d-low", type=float, default=1.001)
    p.add_argument("--d-high", type=float, default=256.0)
    p.add_argument("--base", default="10")
    p.add_argument("--width", type=float, default=1e-6)
    p.add_argument("--tol-low", type=float, default=0.02)
    p.add_argument("--tol-high", type=float, default=0.01)
    p.set_defaults(func=cmd_limits)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return ns.func(ns)


def run() -> None:
    raise SystemExit(main())

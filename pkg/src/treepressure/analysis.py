"""Parameter sweeps over the branching parameter d, monotonicity
certification via interval enclosures, limit verification against the
spectral radius and the largest column sum, the two-sided bracket between
the recursion and the exact enumeration oracle, and dataset emission
(CSV and a dependency-free SVG chart).

All pressure values are stored in nats; the requested log base applies
only to emitted rows and reports.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .algebra import InteractionSystem
from .oracle import pressure_sequence
from .pressure import (
    CertificateCapError,
    PressureCertificate,
    alpha_beta_gamma,
    lambda_sequence,
    pressure_certificate,
    r_E,
    spectral_radius,
    tail_coefficient,
)

__all__ = [
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "LimitCheck",
    "LimitReport",
    "BracketReport",
    "BracketViolationError",
    "sweep",
    "verify_limits",
    "bracket_report",
    "emit_dataset",
    "parse_dataset",
]

CSV_HEADER = ("d", "k", "pressure_lo", "pressure", "pressure_hi", "log_base")


class BracketViolationError(RuntimeError):
    """A lower approximant exceeded an upper approximant; this is a bug."""


@dataclass(frozen=True)
class SweepSpec:
    """A system, a strictly increasing grid of d > 1, and presentation options."""

    system: InteractionSystem
    d_grid: tuple[float, ...]
    target_width: float = 1e-6
    log_base: float = 10.0

    def __post_init__(self):
        grid = tuple(float(d) for d in self.d_grid)
        if not grid:
            raise ValueError("d grid must be nonempty")
        if any(d <= 1.0 for d in grid):
            raise ValueError("every grid point must exceed 1")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("d grid must be strictly increasing")
        if self.target_width <= 0.0:
            raise ValueError("target_width must be positive")
        if self.log_base <= 1.0:
            raise ValueError("log_base must exceed 1")
        object.__setattr__(self, "d_grid", grid)
        object.__setattr__(self, "target_width", float(self.target_width))
        object.__setattr__(self, "log_base", float(self.log_base))


@dataclass(frozen=True)
class SweepRow:
    """One certified grid point, in the requested log base."""

    d: float
    k: int
    lo: float
    pressure: float
    hi: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    log_base: float
    monotone_certified: bool
    violations: tuple[tuple[float, float], ...]
    failures: tuple[tuple[float, str], ...] = field(default=())

    def point_estimates_monotone(self, tolerance: float) -> bool:
        """Whether the point estimates are nondecreasing within a slack."""
        return all(
            b.pressure >= a.pressure - tolerance for a, b in zip(self.rows, self.rows[1:])
        )


def sweep(spec: SweepSpec) -> SweepResult:
    """One pressure certificate per grid point, with monotonicity certification.

    A decrease is only flagged when consecutive enclosures witness it:
    the pair (d1, d2) is a violation when lo(d2) < lo(d1) - (hi(d1) - lo(d1)).
    Grid points whose certificate fails are flagged and skipped.
    """
    rows: list[SweepRow] = []
    failures: list[tuple[float, str]] = []
    lnb = math.log(spec.log_base)
    for d in spec.d_grid:
        try:
            cert = pressure_certificate(spec.system, d, spec.target_width)
        except CertificateCapError as err:
            failures.append((d, str(err)))
            continue
        rows.append(
            SweepRow(d=d, k=cert.k, lo=cert.lo / lnb, pressure=cert.p_k / lnb, hi=cert.hi / lnb)
        )
    violations = tuple(
        (a.d, b.d) for a, b in zip(rows, rows[1:]) if b.lo < a.lo - (a.hi - a.lo)
    )
    return SweepResult(
        rows=tuple(rows),
        log_base=spec.log_base,
        monotone_certified=not violations,
        violations=violations,
        failures=tuple(failures),
    )


@dataclass(frozen=True)
class LimitCheck:
    """A certified pressure against an anchor value, all in nats."""

    d: float
    anchor: float
    certificate: PressureCertificate
    tol: float

    @property
    def gap(self) -> float:
        """Signed point gap, certified value minus anchor."""
        return self.certificate.p_k - self.anchor

    @property
    def distance(self) -> float:
        """Distance from the enclosure to the anchor (0 when it contains it)."""
        return max(self.certificate.lo - self.anchor, self.anchor - self.certificate.hi, 0.0)

    @property
    def ok(self) -> bool:
        return self.distance <= self.tol


@dataclass(frozen=True)
class LimitReport:
    log_rho: float
    log_r: float
    low: LimitCheck
    high: LimitCheck

    @property
    def ok(self) -> bool:
        return self.low.ok and self.high.ok


def verify_limits(
    system: InteractionSystem,
    d_low: float = 1.001,
    d_high: float = 256.0,
    tol_low: float = 0.02,
    tol_high: float = 0.01,
    target_width: float = 1e-6,
) -> LimitReport:
    """Certified pressure near both ends of the d axis against its two limits.

    The d -> 1+ anchor is log of the Perron root of E, the d -> inf anchor is
    log of the largest column sum.  Gaps are reported signed; a check passes
    when its enclosure comes within the tolerance of the anchor.
    """
    if not 1.0 < d_low < d_high:
        raise ValueError("need 1 < d_low < d_high")
    log_rho = math.log(spectral_radius(system))
    log_r = math.log(r_E(system))
    low = LimitCheck(
        d=float(d_low),
        anchor=log_rho,
        certificate=pressure_certificate(system, d_low, target_width),
        tol=float(tol_low),
    )
    high = LimitCheck(
        d=float(d_high),
        anchor=log_r,
        certificate=pressure_certificate(system, d_high, target_width),
        tol=float(tol_high),
    )
    return LimitReport(log_rho=log_rho, log_r=log_r, low=low, high=high)


@dataclass(frozen=True)
class BracketReport:
    """Lower approximants from the recursion vs upper approximants from the
    exact oracle, all in nats.  Every lower value is at most every upper one."""

    d: int
    lowers: tuple[tuple[int, float], ...]  # (k, P_k + c_k * gamma)
    uppers: tuple[tuple[int, float], ...]  # (n, a_n)

    @property
    def max_lower(self) -> float:
        return max(v for _, v in self.lowers)

    @property
    def min_upper(self) -> float:
        return min(v for _, v in self.uppers)

    @property
    def width(self) -> float:
        return self.min_upper - self.max_lower

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.min_upper + self.max_lower)


def bracket_report(
    system: InteractionSystem, d: int, k_max: int, n_max: int
) -> BracketReport:
    """Two independent approximations bracketing the same pressure.

    Lower approximants P_k + c_k * gamma come from the value recursion
    (k = 1..k_max); upper approximants a_n come from the log-space level DP
    (n = 0..n_max).  The bracket is meaningful where the a_n upper-bound the
    pressure, i.e. for hard-constraint systems (0/1 matrix, unit weights) or
    interaction weights at most 1; see :func:`treepressure.pressure_sequence`.
    In that regime a crossing beyond 1e-9 signals an implementation bug and
    raises :class:`BracketViolationError`; systems with weights above 1 can
    trip it legitimately because their a_n approach the pressure from below.
    """
    if int(d) != d or d < 2:
        raise ValueError("d must be an integer >= 2")
    d = int(d)
    if k_max < 1 or n_max < 0:
        raise ValueError("need k_max >= 1 and n_max >= 0")
    _, _, gamma = alpha_beta_gamma(system)
    seq = lambda_sequence(system, float(d), k_max)
    lowers = tuple(
        (k, float(seq.levels[k].max()) + tail_coefficient(float(d), k) * gamma)
        for k in range(1, k_max + 1)
    )
    uppers = tuple(enumerate(pressure_sequence(system, d, n_max)))
    report = BracketReport(d=d, lowers=lowers, uppers=uppers)
    if report.max_lower > report.min_upper + 1e-9:
        raise BracketViolationError(
            f"lower approximant {report.max_lower!r} exceeds "
            f"upper approximant {report.min_upper!r}"
        )
    return report


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def emit_dataset(result: SweepResult, format: str = "csv") -> bytes:
    """Serialize a sweep as CSV rows or a self-contained SVG chart."""
    if not result.rows:
        raise ValueError("empty sweep result")
    if format == "csv":
        return _emit_csv(result)
    if format == "svg":
        return _emit_svg(result)
    raise ValueError(f"unknown format {format!r}")


def _emit_csv(result: SweepResult) -> bytes:
    lines = [",".join(CSV_HEADER)]
    for r in result.rows:
        lines.append(
            ",".join(
                (
                    _fmt17(r.d),
                    str(r.k),
                    _fmt17(r.lo),
                    _fmt17(r.pressure),
                    _fmt17(r.hi),
                    _fmt17(result.log_base),
                )
            )
        )
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_dataset(data: bytes) -> SweepResult:
    """Read back a CSV dataset emitted by :func:`emit_dataset`."""
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected header {header!r}")
    rows = []
    log_base = None
    for record in reader:
        if not record:
            continue
        d, k, lo, pressure, hi, base = record
        rows.append(
            SweepRow(d=float(d), k=int(k), lo=float(lo), pressure=float(pressure), hi=float(hi))
        )
        log_base = float(base)
    if log_base is None:
        raise ValueError("dataset has no rows")
    return SweepResult(
        rows=tuple(rows),
        log_base=log_base,
        monotone_certified=True,
        violations=(),
        failures=(),
    )


def _emit_svg(result: SweepResult) -> bytes:
    W, H = 720, 480
    ml, mr, mt, mb = 75, 25, 25, 55
    rows = result.rows
    xs = [r.d for r in rows]
    x_min, x_max = min(xs), max(xs)
    y_min = min(r.lo for r in rows)
    y_max = max(r.hi for r in rows)
    if x_max == x_min:
        x_min, x_max = x_min - 0.5, x_max + 0.5
    if y_max == y_min:
        y_min, y_max = y_min - 0.5, y_max + 0.5

    def X(x: float) -> str:
        return format(ml + (x - x_min) / (x_max - x_min) * (W - ml - mr), ".2f")

    def Y(y: float) -> str:
        return format(H - mb - (y - y_min) / (y_max - y_min) * (H - mt - mb), ".2f")

    band = " ".join(f"{X(r.d)},{Y(r.hi)}" for r in rows)
    band += " " + " ".join(f"{X(r.d)},{Y(r.lo)}" for r in reversed(rows))
    line = " ".join(f"{X(r.d)},{Y(r.pressure)}" for r in rows)
    label = "pressure" + (" (log base e)" if result.log_base == math.e else f" (log base {format(result.log_base, '.6g')})")
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{ml}" y1="{H - mb}" x2="{W - mr}" y2="{H - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{H - mb}" stroke="black"/>',
        f'<polygon points="{band}" fill="lightsteelblue" stroke="none" opacity="0.6"/>',
        f'<polyline points="{line}" fill="none" stroke="navy" stroke-width="1.5"/>',
        f'<text x="{ml}" y="{H - mb + 18}" font-size="12">{format(x_min, ".6g")}</text>',
        f'<text x="{W - mr - 30}" y="{H - mb + 18}" font-size="12">{format(x_max, ".6g")}</text>',
        f'<text x="{ml - 8}" y="{H - mb}" font-size="12" text-anchor="end">{format(y_min, ".6g")}</text>',
        f'<text x="{ml - 8}" y="{mt + 10}" font-size="12" text-anchor="end">{format(y_max, ".6g")}</text>',
        f'<text x="{(ml + W - mr) // 2}" y="{H - 12}" font-size="13" text-anchor="middle">d</text>',
        f'<text x="16" y="{(mt + H - mb) // 2}" font-size="13" '
        f'transform="rotate(-90 16 {(mt + H - mb) // 2})" text-anchor="middle">{label}</text>',
        "</svg>",
    ]
    return ("\n".join(parts) + "\n").encode("utf-8")

"""Probability vectors, column-stochastic matrices, and variational metrics
over a finite symbol alphabet.

Conventions used throughout the package:

* vectors are indexed by symbol; a matrix entry ``M[a, b]`` is the weight of
  target symbol ``a`` given source symbol ``b``, so stochastic matrices are
  column stochastic and act on distributions from the left (``M @ p``);
* symbols are plain integer indices internally; the string labels of an
  :class:`Alphabet` matter only at the I/O boundary.

All types are immutable after construction and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SUM_TOL",
    "RENORM_TOL",
    "DimensionMismatchError",
    "SimplexError",
    "AssumptionAViolation",
    "Alphabet",
    "ProbVector",
    "StochMatrix",
    "InteractionSystem",
    "AssumptionReport",
    "check_assumption_A",
    "require_assumption_A",
    "d_v",
    "d_V",
    "d_vV",
    "kl_columns",
]

# queries assert simplex / stochasticity at this absolute tolerance
SUM_TOL = 1e-12
# constructors renormalize sums deviating by at most this, reject larger
RENORM_TOL = 1e-9


class DimensionMismatchError(ValueError):
    """Operands live over different alphabets or have incompatible shapes."""


class SimplexError(ValueError):
    """Entries are negative or too far from the required normalization."""


class AssumptionAViolation(ValueError):
    """The interaction matrix has a zero row sum or a zero column sum."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Alphabet:
    """An ordered set of distinct symbol labels."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        if not symbols:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"alphabet symbols must be unique, got {symbols}")
        object.__setattr__(self, "symbols", symbols)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise KeyError(symbol) from None

    @staticmethod
    def of_size(k: int) -> "Alphabet":
        """Alphabet with labels '0', '1', ..., str(k - 1)."""
        return Alphabet(tuple(str(i) for i in range(int(k))))


def _same_alphabet(x, y) -> None:
    if x.alphabet != y.alphabet:
        raise DimensionMismatchError(
            f"alphabet mismatch: {x.alphabet.symbols} vs {y.alphabet.symbols}"
        )


@dataclass(frozen=True, eq=False)
class ProbVector:
    """A point of the probability simplex indexed by an alphabet.

    Construction renormalizes sums within ``RENORM_TOL`` of one and rejects
    anything farther off; tiny negative entries (float noise above
    ``-SUM_TOL``) are clamped to zero.
    """

    alphabet: Alphabet
    entries: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.entries, dtype=float).copy()
        if v.shape != (self.alphabet.size,):
            raise DimensionMismatchError(
                f"expected {self.alphabet.size} entries, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise SimplexError("entries must be finite")
        if v.min() < -SUM_TOL:
            raise SimplexError(f"negative entry {v.min()!r}")
        v[v < 0.0] = 0.0
        s = float(v.sum())
        if abs(s - 1.0) > RENORM_TOL:
            raise SimplexError(f"entries sum to {s!r}, too far from 1")
        object.__setattr__(self, "entries", _readonly(v / s))

    @staticmethod
    def unit(alphabet: Alphabet, index: int) -> "ProbVector":
        v = np.zeros(alphabet.size)
        v[index] = 1.0
        return ProbVector(alphabet, v)

    @staticmethod
    def uniform(alphabet: Alphabet) -> "ProbVector":
        return ProbVector(alphabet, np.full(alphabet.size, 1.0 / alphabet.size))

    def validate(self) -> None:
        assert self.entries.min() >= 0.0
        assert abs(self.entries.sum() - 1.0) <= SUM_TOL


@dataclass(frozen=True, eq=False)
class StochMatrix:
    """A column-stochastic matrix: entry ``[a, b]`` is P(target a | source b)."""

    alphabet: Alphabet
    entries: np.ndarray

    def __post_init__(self):
        k = self.alphabet.size
        M = np.asarray(self.entries, dtype=float).copy()
        if M.shape != (k, k):
            raise DimensionMismatchError(f"expected shape ({k}, {k}), got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise SimplexError("entries must be finite")
        if M.min() < -SUM_TOL:
            raise SimplexError(f"negative entry {M.min()!r}")
        M[M < 0.0] = 0.0
        cols = M.sum(axis=0)
        worst = int(np.abs(cols - 1.0).argmax())
        if abs(cols[worst] - 1.0) > RENORM_TOL:
            raise SimplexError(f"column {worst} sums to {cols[worst]!r}")
        object.__setattr__(self, "entries", _readonly(M / cols))

    def apply(self, p: ProbVector) -> ProbVector:
        """Push a distribution through the matrix (simplex closure)."""
        _same_alphabet(self, p)
        return ProbVector(self.alphabet, self.entries @ p.entries)

    def compose(self, other: "StochMatrix") -> "StochMatrix":
        _same_alphabet(self, other)
        return StochMatrix(self.alphabet, self.entries @ other.entries)

    def column(self, b: int) -> ProbVector:
        return ProbVector(self.alphabet, self.entries[:, b])

    def validate(self) -> None:
        assert self.entries.min() >= 0.0
        assert np.abs(self.entries.sum(axis=0) - 1.0).max() <= SUM_TOL


@dataclass(frozen=True, eq=False)
class InteractionSystem:
    """A finite alphabet with an interaction matrix and ambient weights.

    ``E[a, b] >= 0`` is the weight of a target (child) symbol ``a`` under a
    source (parent) symbol ``b``; a zero entry forbids the pair.  ``w`` holds
    per-symbol ambient weights and defaults to all ones.
    """

    alphabet: Alphabet
    E: np.ndarray
    w: np.ndarray | None = None

    def __post_init__(self):
        k = self.alphabet.size
        E = np.asarray(self.E, dtype=float).copy()
        if E.shape != (k, k):
            raise DimensionMismatchError(f"E must have shape ({k}, {k}), got {E.shape}")
        if not np.all(np.isfinite(E)):
            raise ValueError("E must be finite")
        if E.min() < 0.0:
            a, b = np.unravel_index(int(E.argmin()), E.shape)
            raise ValueError(f"E has a negative entry {E[a, b]!r} at ({a}, {b})")
        w = np.ones(k) if self.w is None else np.asarray(self.w, dtype=float).copy()
        if w.shape != (k,):
            raise DimensionMismatchError(f"w must have shape ({k},), got {w.shape}")
        if not np.all(np.isfinite(w)) or w.min() < 0.0:
            raise ValueError("w must be finite and nonnegative")
        object.__setattr__(self, "E", _readonly(E))
        object.__setattr__(self, "w", _readonly(w))

    @property
    def size(self) -> int:
        return self.alphabet.size

    @property
    def support(self) -> np.ndarray:
        return self.E > 0.0

    @staticmethod
    def from_rows(rows, w=None, symbols=None) -> "InteractionSystem":
        E = np.asarray(rows, dtype=float)
        alphabet = (
            Alphabet(tuple(symbols)) if symbols is not None else Alphabet.of_size(E.shape[0])
        )
        return InteractionSystem(alphabet, E, w)


@dataclass(frozen=True)
class AssumptionReport:
    """Indices of zero row sums and zero column sums of ``E``."""

    zero_rows: tuple[int, ...]
    zero_cols: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.zero_rows and not self.zero_cols


def check_assumption_A(system: InteractionSystem) -> AssumptionReport:
    """Report every row index and column index of ``E`` with zero sum.

    The system is usable by the pressure machinery only when the report is
    ok, i.e. every row sum and every column sum is strictly positive.
    """
    rows = system.E.sum(axis=1)
    cols = system.E.sum(axis=0)
    return AssumptionReport(
        zero_rows=tuple(int(i) for i in np.where(rows == 0.0)[0]),
        zero_cols=tuple(int(j) for j in np.where(cols == 0.0)[0]),
    )


def require_assumption_A(system: InteractionSystem) -> None:
    report = check_assumption_A(system)
    if not report.ok:
        raise AssumptionAViolation(
            f"zero row sums at {list(report.zero_rows)}, "
            f"zero column sums at {list(report.zero_cols)}"
        )


def d_v(p: ProbVector, q: ProbVector) -> float:
    """Variational (total variation) distance between two distributions."""
    _same_alphabet(p, q)
    return 0.5 * float(np.abs(p.entries - q.entries).sum())


def d_V(M: StochMatrix, N: StochMatrix) -> float:
    """Maximum over columns of the variational distance of matching columns."""
    _same_alphabet(M, N)
    return 0.5 * float(np.abs(M.entries - N.entries).sum(axis=0).max())


def d_vV(pair1: tuple[ProbVector, StochMatrix], pair2: tuple[ProbVector, StochMatrix]) -> float:
    """Distance between (vector, matrix) pairs: max of the two metrics."""
    p, M = pair1
    q, N = pair2
    return max(d_v(p, q), d_V(M, N))


def kl_columns(P: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Column-wise relative entropy sum_a P[a,b] * log(P[a,b] / M[a,b]).

    Zero P entries contribute zero (0 * log(0/0) := 0).  M need not be
    stochastic, so the result can be negative.  Entries with P > 0 where
    M == 0 yield +inf; callers enforce support containment beforehand.
    """
    P = np.asarray(P, dtype=float)
    M = np.asarray(M, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(P > 0.0, P * np.log(P / M), 0.0)
    return terms.sum(axis=0)

"""Exact ground truth at desk scale for labeled d-ary tree slabs.

A support holds the levels n..m of the rooted d-ary tree; for n > 0 it is a
forest of d**n independent subtrees (no constraint ties the subtree roots
together).  Blocks are labelings of a support that respect the interaction
matrix along every parent-child edge; their weight multiplies the ambient
weights over the top level with the interaction weights over all edges.

Two computation paths are kept deliberately independent and cross-checked in
the tests: raw enumeration of admissible blocks, and a per-level dynamic
program over (level, symbol) subtree sums that reaches depths far beyond the
enumeration guard (in log space for the normalized pressure sequence).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .algebra import (
    AssumptionAViolation,
    InteractionSystem,
    ProbVector,
    StochMatrix,
    kl_columns,
)

__all__ = [
    "ENUMERATION_GUARD",
    "DP_GUARD",
    "OracleGuardError",
    "InadmissibleBlockError",
    "TreeSupport",
    "TreeBlock",
    "PatternPair",
    "PatternClassKey",
    "OmegaCounts",
    "admissible_blocks",
    "block_weight",
    "partition_function",
    "partition_function_enumerated",
    "log_partition_function",
    "pressure_sequence",
    "pattern_stats",
    "class_partition",
    "omega_counts",
    "stirling_residual",
]

# raw enumeration refuses when alphabet**nodes exceeds this
ENUMERATION_GUARD = 10**8
# the level DP refuses supports with more nodes than this
DP_GUARD = 10**8


class OracleGuardError(RuntimeError):
    """The requested support exceeds an oracle guard."""


class InadmissibleBlockError(ValueError):
    """A block violates the interaction constraint on some edge."""


@dataclass(frozen=True)
class TreeSupport:
    """Levels n..m of the d-ary tree; level i holds d**i nodes.

    Nodes are addressed level by level: the children of node p on one level
    are nodes p*d .. p*d+d-1 on the next, which covers both the rooted case
    n = 0 and the forest case n > 0 uniformly.
    """

    d: int
    n: int
    m: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("d must be an integer >= 1")
        if int(self.n) != self.n or int(self.m) != self.m or not 0 <= self.n <= self.m:
            raise ValueError("levels must satisfy 0 <= n <= m")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    @property
    def levels(self) -> range:
        return range(self.n, self.m + 1)

    def level_size(self, i: int) -> int:
        return self.d**i

    @property
    def node_count(self) -> int:
        return sum(self.d**i for i in self.levels)


@dataclass(frozen=True, eq=False)
class TreeBlock:
    """A symbol per node of a support, stored level by level."""

    support: TreeSupport
    labels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        expected = [self.support.level_size(i) for i in self.support.levels]
        if [len(level) for level in self.labels] != expected:
            raise ValueError(f"level sizes {[len(l) for l in self.labels]} != {expected}")

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield (child_symbol, parent_symbol) over all edges, in level order."""
        d = self.support.d
        for j in range(len(self.labels) - 1):
            parents = self.labels[j]
            for c, a in enumerate(self.labels[j + 1]):
                yield a, parents[c // d]

    def is_admissible(self, system: InteractionSystem) -> bool:
        return all(system.E[a, b] > 0.0 for a, b in self.edges())


@dataclass(frozen=True, eq=False)
class PatternPair:
    """Per-level symbol frequencies and per-step empirical transitions.

    Compatible by construction: v[j+1] = M[j] v[j] (top-down along levels).
    """

    v: tuple[ProbVector, ...]
    M: tuple[StochMatrix, ...]


def _check_enumeration_guard(system: InteractionSystem, support: TreeSupport) -> None:
    nodes = support.node_count
    if nodes > DP_GUARD or nodes * math.log(max(system.size, 1)) > math.log(
        ENUMERATION_GUARD
    ) + 1e-9:
        raise OracleGuardError(
            f"enumeration guard exceeded: {system.size}**{nodes} labelings "
            f"(guard: alphabet**nodes <= {ENUMERATION_GUARD})"
        )


def _check_dp_guard(support: TreeSupport) -> None:
    if support.node_count > DP_GUARD:
        raise OracleGuardError(
            f"DP guard exceeded: {support.node_count} nodes "
            f"(guard: nodes <= {DP_GUARD})"
        )


def block_weight(block: TreeBlock, system: InteractionSystem) -> float:
    """Ambient weights over the top level times interaction weights over edges."""
    weight = 1.0
    for a in block.labels[0]:
        weight *= float(system.w[a])
    for a, b in block.edges():
        e = float(system.E[a, b])
        if e <= 0.0:
            raise InadmissibleBlockError(f"edge parent {b} -> child {a} has zero weight")
        weight *= e
    return weight


def admissible_blocks(system: InteractionSystem, support: TreeSupport) -> Iterator[TreeBlock]:
    """All admissible blocks of the support, in lexicographic label order."""
    _check_enumeration_guard(system, support)
    k = system.size
    d = support.d
    allowed = [
        tuple(int(a) for a in np.where(system.E[:, b] > 0.0)[0]) for b in range(k)
    ]
    depth = support.m - support.n

    def extend(levels_acc: list[tuple[int, ...]]) -> Iterator[TreeBlock]:
        if len(levels_acc) == depth + 1:
            yield TreeBlock(support, tuple(levels_acc))
            return
        parents = levels_acc[-1]
        choices = [allowed[b] for b in parents for _ in range(d)]
        for children in itertools.product(*choices):
            levels_acc.append(children)
            yield from extend(levels_acc)
            levels_acc.pop()

    for top in itertools.product(range(k), repeat=support.level_size(support.n)):
        yield from extend([top])


def partition_function(system: InteractionSystem, d: int, n: int, m: int) -> float:
    """Total weight of admissible blocks on levels n..m, by the level DP.

    Guarded to enumerable sizes so the value stays well inside double range;
    use :func:`log_partition_function` for deep supports.
    """
    support = TreeSupport(d, n, m)
    _check_enumeration_guard(system, support)
    S = np.ones(system.size)
    for _ in range(m - n):
        S = (system.E.T @ S) ** d
    return float(system.w @ S) ** (d**n)


def partition_function_enumerated(system: InteractionSystem, d: int, n: int, m: int) -> float:
    """Same value by raw enumeration (independent validation path)."""
    support = TreeSupport(d, n, m)
    total = 0.0
    for block in admissible_blocks(system, support):
        total += block_weight(block, system)
    return total


def _logsumexp_rows(X: np.ndarray) -> np.ndarray:
    """Log-sum-exp along axis 1; rows of all -inf stay -inf."""
    shift = X.max(axis=1)
    out = shift.copy()
    finite = np.isfinite(shift)
    if np.any(finite):
        sub = X[finite] - shift[finite][:, None]
        out[finite] = shift[finite] + np.log(np.exp(sub).sum(axis=1))
    return out


def _logsumexp_vec(x: np.ndarray) -> float:
    shift = float(x.max())
    if not math.isfinite(shift):
        return shift
    return shift + math.log(float(np.exp(x - shift).sum()))


def log_partition_function(system: InteractionSystem, d: int, n: int, m: int) -> float:
    """log of the partition function, by the level DP in log space."""
    support = TreeSupport(d, n, m)
    _check_dp_guard(support)
    with np.errstate(divide="ignore"):
        logET = np.log(system.E.T)  # [a, b] = log E[b, a]
        logw = np.log(system.w)
    logS = np.zeros(system.size)
    for _ in range(m - n):
        logS = d * _logsumexp_rows(logET + logS[None, :])
    top = _logsumexp_vec(logw + logS)
    return (d**n) * top


def pressure_sequence(system: InteractionSystem, d: int, n_max: int) -> list[float]:
    """a_n = log(partition function of levels 0..n) / node count, n = 0..n_max.

    Converges to the pressure.  For hard-constraint systems (0/1 matrix,
    unit weights) every a_n upper-bounds the limit and the sequence is
    nonincreasing: a depth-(q(n+1)-1) tree partitions into layered copies of
    the depth-n tree, so its log count is at most the proportional multiple
    of a_n.  Interaction weights above 1 add energy on the edges joining the
    layers, which shallow supports undercount; such systems can approach the
    pressure from below instead.
    """
    values = []
    for n in range(n_max + 1):
        support = TreeSupport(d, 0, n)
        values.append(log_partition_function(system, d, 0, n) / support.node_count)
    return values


def _level_counts(level: tuple[int, ...], k: int) -> tuple[int, ...]:
    counts = [0] * k
    for a in level:
        counts[a] += 1
    return tuple(counts)


def _child_count_matrix(
    parents: tuple[int, ...], children: tuple[int, ...], k: int, d: int
) -> tuple[tuple[int, ...], ...]:
    """cnt[b][a] = number of children with symbol a under parents with symbol b."""
    cnt = [[0] * k for _ in range(k)]
    for c, a in enumerate(children):
        cnt[parents[c // d]][a] += 1
    return tuple(tuple(col) for col in cnt)


def _fallback_column(system: InteractionSystem, b: int) -> np.ndarray:
    col = system.E[:, b]
    total = float(col.sum())
    if total <= 0.0:
        raise AssumptionAViolation(f"column {b} of E sums to zero, no fallback column")
    return col / total


def pattern_stats(block: TreeBlock, system: InteractionSystem) -> PatternPair:
    """Empirical symbol frequencies per level and child-given-parent transitions.

    A parent symbol absent from a level gets the normalized E column as its
    transition column, keeping the matrices stochastic.
    """
    if not block.is_admissible(system):
        raise InadmissibleBlockError("block violates the interaction constraint")
    k = system.size
    d = block.support.d
    v = []
    for level in block.labels:
        counts = np.asarray(_level_counts(level, k), dtype=float)
        v.append(ProbVector(system.alphabet, counts / len(level)))
    M = []
    for j in range(len(block.labels) - 1):
        cnt = _child_count_matrix(block.labels[j], block.labels[j + 1], k, d)
        cols = np.empty((k, k))
        for b in range(k):
            total = sum(cnt[b])
            if total > 0:
                cols[:, b] = np.asarray(cnt[b], dtype=float) / total
            else:
                cols[:, b] = _fallback_column(system, b)
        M.append(StochMatrix(system.alphabet, cols))
    return PatternPair(tuple(v), tuple(M))


@dataclass(frozen=True)
class PatternClassKey:
    """Exact combinatorial identity of a (frequencies, transitions) class.

    Frequencies are integer counts per level; transitions are integer child
    counts per (parent, child) pair, with absent parents canonicalized to an
    all-zero column (their transition column is the E fallback, which the
    level counts already determine).
    """

    level_counts: tuple[tuple[int, ...], ...]
    child_counts: tuple[tuple[tuple[int, ...], ...], ...]

    def pattern(self, system: InteractionSystem) -> PatternPair:
        """Reconstruct the float pattern pair, fallback columns included."""
        k = system.size
        v = []
        for counts in self.level_counts:
            total = sum(counts)
            v.append(ProbVector(system.alphabet, np.asarray(counts, dtype=float) / total))
        M = []
        for cnt in self.child_counts:
            cols = np.empty((k, k))
            for b in range(k):
                total = sum(cnt[b])
                if total > 0:
                    cols[:, b] = np.asarray(cnt[b], dtype=float) / total
                else:
                    cols[:, b] = _fallback_column(system, b)
            M.append(StochMatrix(system.alphabet, cols))
        return PatternPair(tuple(v), tuple(M))


def _class_key(block: TreeBlock, k: int) -> PatternClassKey:
    d = block.support.d
    level_counts = tuple(_level_counts(level, k) for level in block.labels)
    child_counts = tuple(
        _child_count_matrix(block.labels[j], block.labels[j + 1], k, d)
        for j in range(len(block.labels) - 1)
    )
    return PatternClassKey(level_counts, child_counts)


def class_partition(
    system: InteractionSystem, d: int, n: int, m: int
) -> dict[PatternClassKey, float]:
    """Group admissible blocks by exact pattern class and sum weights per class.

    The totals over all classes reconcile with :func:`partition_function`.
    Requires raw enumeration, so the enumeration guard applies.
    """
    support = TreeSupport(d, n, m)
    out: dict[PatternClassKey, float] = {}
    for block in admissible_blocks(system, support):
        key = _class_key(block, system.size)
        out[key] = out.get(key, 0.0) + block_weight(block, system)
    return out


@dataclass(frozen=True)
class OmegaCounts:
    """Distinct pattern sequences over a support, with their counting bounds.

    The bounds are products over levels i of (level size + 1) raised to the
    alphabet size (frequency sequences) or to alphabet * (alphabet + 1)
    (transition sequences); the exact counts never exceed them.
    """

    v_count: int
    v_bound: int
    m_count: int
    m_bound: int


def omega_counts(system: InteractionSystem, d: int, n: int, m: int) -> OmegaCounts:
    """Exact counts of distinct frequency / transition sequences over blocks."""
    support = TreeSupport(d, n, m)
    k = system.size
    fallback_cols = {}

    def fallback(b: int) -> tuple[Fraction, ...]:
        if b not in fallback_cols:
            col = system.E[:, b]
            total = float(col.sum())
            if total <= 0.0:
                raise AssumptionAViolation(f"column {b} of E sums to zero, no fallback column")
            fallback_cols[b] = tuple(Fraction(float(x)) / Fraction(total) for x in col)
        return fallback_cols[b]

    v_seqs: set = set()
    m_seqs: set = set()
    for block in admissible_blocks(system, support):
        v_seqs.add(tuple(_level_counts(level, k) for level in block.labels))
        mats = []
        for j in range(len(block.labels) - 1):
            cnt = _child_count_matrix(block.labels[j], block.labels[j + 1], k, d)
            cols = []
            for b in range(k):
                total = sum(cnt[b])
                if total > 0:
                    cols.append(tuple(Fraction(c, total) for c in cnt[b]))
                else:
                    cols.append(fallback(b))
            mats.append(tuple(cols))
        m_seqs.add(tuple(mats))
    v_bound = 1
    m_bound = 1
    for i in support.levels:
        v_bound *= (support.level_size(i) + 1) ** k
        m_bound *= (support.level_size(i) + 1) ** (k * (k + 1))
    return OmegaCounts(len(v_seqs), v_bound, len(m_seqs), m_bound)


def _log_multinomial(counts: tuple[int, ...]) -> float:
    total = sum(counts)
    return math.lgamma(total + 1) - sum(math.lgamma(c + 1) for c in counts)


def stirling_residual(system: InteractionSystem, d: int, n: int, k: int) -> float:
    """Entropy-form error of the heaviest pattern class on levels n..n+k.

    Compares log(class weight) / nodes against the closed form

        log(top-level arrangements * ambient weights) / nodes
        - sum_j (level size at n+j+1) / nodes * KL(M[j] || E) . v[j],

    which drops the Stirling correction of the multinomials; the gap shrinks
    as n grows at fixed k.
    """
    support = TreeSupport(d, n, n + k)
    classes = class_partition(system, d, n, n + k)
    positive = {key: wt for key, wt in classes.items() if wt > 0.0}
    if not positive:
        raise InadmissibleBlockError("no admissible block has positive weight")
    best = max(positive, key=lambda kk: (positive[kk], kk.level_counts, kk.child_counts))
    nodes = support.node_count
    lhs = math.log(positive[best]) / nodes

    counts0 = best.level_counts[0]
    log_top = _log_multinomial(counts0)
    for a, c in enumerate(counts0):
        if c:
            log_top += c * math.log(float(system.w[a]))
    pair = best.pattern(system)
    kl_total = 0.0
    for j in range(k):
        size_next = support.level_size(n + j + 1)
        klvec = kl_columns(pair.M[j].entries, system.E)
        kl_total += size_next / nodes * float(klvec @ pair.v[j].entries)
    formula = log_top / nodes - kl_total
    return abs(lhs - formula)

"""Finite-horizon pressure of weighted Markov tree-shifts on the d-ary tree.

The central object is the value recursion

    lam[0]    = 0,
    lam[i][a] = (d-1)/d**i * log( sum_{b: E[b,a]>0} exp(d**i/(d-1) * lam[i-1][b]) * E[b,a] ),

computed entirely in log space with max-shifted log-sum-exp, together with
the column-stochastic transition matrices attained by the softmax weights of
each step.  The depth-k pressure approximation is P_k(d) = max_a lam[k][a];
the infinite-depth value is enclosed by

    [ P_k + c_k * gamma,  P_k + c_k * beta ],   c_k = d**-k / (1 - 1/d),

where beta / gamma are the log of the largest column sum / the smallest
positive entry of E.  This bracket is rigorous in the usual regime
gamma <= 0 <= beta (smallest positive weight at most 1, largest column sum
at least 1); outside it the bracket is heuristic.

Everything here accepts any real branching parameter d > 1; integer d >= 2
is the regime where the exact tree enumeration oracle applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (
    DimensionMismatchError,
    InteractionSystem,
    ProbVector,
    StochMatrix,
    kl_columns,
    require_assumption_A,
)

__all__ = [
    "LambdaSequence",
    "PressureCertificate",
    "ReachabilityData",
    "SupportViolationError",
    "PowerIterationError",
    "CertificateCapError",
    "ReachabilityError",
    "alpha_beta_gamma",
    "r_E",
    "spectral_radius",
    "reachability",
    "lambda_step",
    "lambda_sequence",
    "finite_pressure",
    "objective_Fk",
    "pressure_certificate",
    "parry_transition",
    "tail_coefficient",
]


class SupportViolationError(ValueError):
    """A transition matrix places mass where the interaction matrix is zero."""


class PowerIterationError(RuntimeError):
    """Power iteration did not converge; carries the last eigenvalue bracket."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket


class CertificateCapError(RuntimeError):
    """Depth cap reached before the target width; carries the best certificate."""

    def __init__(self, message: str, best: "PressureCertificate"):
        super().__init__(message)
        self.best = best


class ReachabilityError(RuntimeError):
    """No symbol lies on a cycle, or no common return time within the cap."""


@dataclass(frozen=True, eq=False)
class LambdaSequence:
    """Value vectors lam[0..k] (nats) and the optimal transitions of each step."""

    d: float
    levels: tuple[np.ndarray, ...]
    transitions: tuple[StochMatrix, ...]

    @property
    def k(self) -> int:
        return len(self.levels) - 1

    @property
    def final(self) -> np.ndarray:
        return self.levels[-1]


@dataclass(frozen=True)
class PressureCertificate:
    """Depth-k pressure value with an interval for the infinite-depth limit.

    All values are in nats.  ``lo = p_k + c_k * gamma`` and
    ``hi = p_k + c_k * beta`` with ``c_k = d**-k / (1 - 1/d)``.
    """

    d: float
    k: int
    p_k: float
    lo: float
    hi: float
    alpha: float
    beta: float
    gamma: float

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class ReachabilityData:
    """Symbols lying on cycles of the support graph, and their common return time.

    ``a_inf`` holds every symbol a with (E**n)[a, a] > 0 for some n up to the
    alphabet size (support-only powers); ``L`` is the least n making all those
    diagonal entries positive simultaneously.
    """

    a_inf: frozenset[int]
    L: int


def tail_coefficient(d: float, k: int) -> float:
    """c_k = d**-k / (1 - 1/d), the weight of all recursion steps beyond k."""
    return d ** (-k) / (1.0 - 1.0 / d)


def alpha_beta_gamma(system: InteractionSystem) -> tuple[float, float, float]:
    """Log of the min / max column sum of E and of its smallest positive entry."""
    require_assumption_A(system)
    col = system.E.sum(axis=0)
    alpha = math.log(col.min())
    beta = math.log(col.max())
    gamma = math.log(system.E[system.E > 0.0].min())
    return alpha, beta, gamma


def r_E(system: InteractionSystem) -> float:
    """Largest column sum of E (linear value; its log is the d -> inf limit)."""
    require_assumption_A(system)
    return float(system.E.sum(axis=0).max())


def _power_iteration(
    M: np.ndarray, tol: float, max_iter: int, need_vector: bool = False
) -> tuple[float, np.ndarray]:
    """Power iteration with sup-norm normalization and an all-ones start.

    Stops when successive Rayleigh quotients differ by less than ``tol``
    (and, if ``need_vector``, the normalized iterate is equally settled).
    The iterate stays strictly positive for matrices whose rows all have a
    positive sum, so the Collatz-Wielandt quotients (M x)_a / x_a bracket the
    Perron root; the last bracket is attached to the failure.
    """
    x = np.ones(M.shape[0])
    rq_prev = math.inf
    bracket = (0.0, math.inf)
    for _ in range(int(max_iter)):
        y = M @ x
        bracket = (float((y / x).min()), float((y / x).max()))
        rq = float(x @ y) / float(x @ x)
        top = float(y.max())
        if top <= 0.0:
            raise PowerIterationError("iterate collapsed to zero", bracket=bracket)
        xn = y / top
        settled = abs(rq - rq_prev) < tol
        if need_vector:
            settled = settled and float(np.abs(xn - x).max()) < tol
        if settled:
            return rq, xn
        rq_prev = rq
        x = xn
    raise PowerIterationError(
        f"no convergence within {max_iter} iterations; "
        f"Perron root lies in [{bracket[0]!r}, {bracket[1]!r}]",
        bracket=bracket,
    )


def spectral_radius(system: InteractionSystem, tol: float = 1e-13, max_iter: int = 10**6) -> float:
    """Perron root of E by power iteration (deterministic all-ones start)."""
    require_assumption_A(system)
    rho, _ = _power_iteration(system.E, tol, max_iter)
    return rho


def reachability(system: InteractionSystem) -> ReachabilityData:
    """Cycle symbols of the support graph and their least common return time.

    The return-time search is capped at (alphabet size)**2, which covers the
    matrices this package targets; highly composite multi-cycle structures
    beyond the cap raise :class:`ReachabilityError`.
    """
    B = system.support
    k = system.size
    a_inf: set[int] = set()
    Pn = B.copy()
    for _ in range(k):
        a_inf.update(int(a) for a in np.where(np.diag(Pn))[0])
        Pn = (Pn.astype(np.int64) @ B.astype(np.int64)) > 0
    if not a_inf:
        raise ReachabilityError("no symbol lies on a cycle of the support graph")
    targets = sorted(a_inf)
    Pn = B.copy()
    cap = k * k
    for n in range(1, cap + 1):
        if all(Pn[a, a] for a in targets):
            return ReachabilityData(frozenset(a_inf), n)
        Pn = (Pn.astype(np.int64) @ B.astype(np.int64)) > 0
    raise ReachabilityError(f"no common return time up to the cap {cap}")


def _log_E(system: InteractionSystem) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(system.E)


def _step(prev: np.ndarray, i: int, d: float, logE: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One recursion step; returns (lam[i], transition of step i as an array).

    The transition pairs with lam[i-1]: its column a is the softmax of
    d**i/(d-1) * lam[i-1][b] + log E[b, a] over rows b in the support.
    """
    try:
        s = d**i / (d - 1.0)
    except OverflowError:
        s = math.inf
    if math.isfinite(s):
        X = s * prev[:, None] + logE  # [b, a]: source row b, target column a
        shift = X.max(axis=0)
        W = np.exp(X - shift)
        Z = W.sum(axis=0)
        lam = (shift + np.log(Z)) / s
        trans = W / Z
    else:
        # s overflowed: the softmax concentrates on rows with maximal lam[i-1],
        # split proportionally to E among exact ties
        support = np.isfinite(logE)
        masked = np.where(support, prev[:, None], -np.inf)
        lam = masked.max(axis=0)
        W = np.where(support & (masked == lam[None, :]), np.exp(logE), 0.0)
        trans = W / W.sum(axis=0)
    return lam, trans


def lambda_step(
    prev: np.ndarray, i: int, d: float, system: InteractionSystem
) -> tuple[np.ndarray, StochMatrix]:
    """Advance the value recursion from lam[i-1] to lam[i].

    Returns the new value vector and the optimal transition attached to the
    step, whose columns sum to one by construction.  All arithmetic is done
    in log space; the max shift inside the log-sum-exp makes overflow
    impossible for finite inputs.
    """
    if d <= 1.0:
        raise ValueError("d must exceed 1")
    if i < 1:
        raise ValueError("step index i must be a positive integer")
    require_assumption_A(system)
    prev = np.asarray(prev, dtype=float)
    if prev.shape != (system.size,):
        raise DimensionMismatchError(f"expected {system.size} entries, got {prev.shape}")
    lam, trans = _step(prev, i, float(d), _log_E(system))
    return lam, StochMatrix(system.alphabet, trans)


def lambda_sequence(system: InteractionSystem, d: float, k: int) -> LambdaSequence:
    """Run the value recursion from lam[0] = 0 for k steps."""
    if d <= 1.0:
        raise ValueError("d must exceed 1")
    if k < 0:
        raise ValueError("k must be nonnegative")
    require_assumption_A(system)
    logE = _log_E(system)
    d = float(d)
    levels = [np.zeros(system.size)]
    transitions = []
    for i in range(1, k + 1):
        lam, trans = _step(levels[-1], i, d, logE)
        levels.append(lam)
        transitions.append(StochMatrix(system.alphabet, trans))
    for lam in levels:
        lam.setflags(write=False)
    return LambdaSequence(d, tuple(levels), tuple(transitions))


def _final_level(system: InteractionSystem, d: float, k: int) -> np.ndarray:
    """Final value vector only (no per-step transition objects)."""
    logE = _log_E(system)
    lam = np.zeros(system.size)
    for i in range(1, k + 1):
        lam, _ = _step(lam, i, d, logE)
    return lam


def finite_pressure(system: InteractionSystem, d: float, k: int) -> float:
    """Depth-k pressure P_k(d) = max_a lam[k][a] over the full alphabet."""
    if d <= 1.0:
        raise ValueError("d must exceed 1")
    if k < 0:
        raise ValueError("k must be nonnegative")
    require_assumption_A(system)
    return float(_final_level(system, float(d), k).max())


def objective_Fk(
    p: ProbVector,
    transitions: list[StochMatrix] | tuple[StochMatrix, ...],
    d: float,
    system: InteractionSystem,
) -> float:
    """Discounted relative-entropy objective of a transition sequence.

    With q_j = trans[j+1] ... trans[k-1] applied to p, returns

        - sum_{j=0}^{k-1} (d-1)/d**(j+1) * KL(trans[j] || E) . q_j,

    which the optimal transitions of :func:`lambda_sequence` maximize; at the
    optimum the value equals lam[k] . p.  Zero transition entries contribute
    zero, so the value is always finite on the support of E.  An empty
    transition list yields 0.
    """
    if d <= 1.0:
        raise ValueError("d must exceed 1")
    E = system.E
    for j, trans in enumerate(transitions):
        if trans.alphabet != system.alphabet:
            raise DimensionMismatchError(f"transition {j} has a different alphabet")
        if np.any((trans.entries > 0.0) & (E == 0.0)):
            raise SupportViolationError(
                f"transition {j} places mass outside the support of E"
            )
    if p.alphabet != system.alphabet:
        raise DimensionMismatchError("p has a different alphabet")
    d = float(d)
    total = 0.0
    q = p.entries.copy()
    for j in range(len(transitions) - 1, -1, -1):
        T = transitions[j].entries
        total -= (d - 1.0) / d ** (j + 1) * float(kl_columns(T, E) @ q)
        q = T @ q
    return total


def _certificate_at(
    system: InteractionSystem, d: float, k: int, abg: tuple[float, float, float]
) -> PressureCertificate:
    alpha, beta, gamma = abg
    p_k = finite_pressure(system, d, k)
    c_k = tail_coefficient(d, k)
    return PressureCertificate(
        d=float(d),
        k=int(k),
        p_k=p_k,
        lo=p_k + c_k * gamma,
        hi=p_k + c_k * beta,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
    )


def pressure_certificate(
    system: InteractionSystem,
    d: float,
    target_width: float = 1e-6,
    *,
    k: int | None = None,
    k_cap: int = 100_000,
) -> PressureCertificate:
    """Enclose the infinite-depth pressure within ``target_width``.

    Chooses the smallest depth k >= 1 with c_k * (beta - gamma) <= width and
    returns the certificate there; pass ``k`` to force a specific depth
    instead.  If the required depth exceeds ``k_cap`` the error carries the
    best certificate, computed at the cap.
    """
    if d <= 1.0:
        raise ValueError("d must exceed 1")
    abg = alpha_beta_gamma(system)
    _, beta, gamma = abg
    if k is None:
        if target_width <= 0.0:
            raise ValueError("target_width must be positive")
        spread = beta - gamma
        k = 1
        if spread > 0.0:
            est = math.log(spread / (target_width * (1.0 - 1.0 / d))) / math.log(d)
            k = max(1, math.ceil(est))
            while k > 1 and tail_coefficient(d, k - 1) * spread <= target_width:
                k -= 1
            while k <= k_cap and tail_coefficient(d, k) * spread > target_width:
                k += 1
        if k > k_cap:
            best = _certificate_at(system, d, k_cap, abg)
            raise CertificateCapError(
                f"target width {target_width!r} needs depth k > cap {k_cap} "
                f"(achieved width {best.width!r} at the cap)",
                best=best,
            )
    else:
        if k < 1:
            raise ValueError("k must be a positive integer")
    return _certificate_at(system, d, int(k), abg)


def parry_transition(
    system: InteractionSystem, tol: float = 1e-13
) -> tuple[StochMatrix, ProbVector]:
    """Markov chain built from the Perron eigenvectors of E.

    With w the right and v the left Perron eigenvector (normalized so that
    v . w = 1), returns the column-stochastic matrix

        Pi[a, b] = E[b, a] * w[a] / (rho(E) * w[b])

    and its stationary vector p[a] = v[a] * w[a].  The support of Pi is the
    transpose of the support of E.  Requires eigenvectors with strictly
    positive entries (E irreducible on its recurrent part); otherwise raises.
    """
    require_assumption_A(system)
    rho, w_right = _power_iteration(system.E, tol, 10**6, need_vector=True)
    _, v_left = _power_iteration(system.E.T, tol, 10**6, need_vector=True)
    if w_right.min() < 1e-9 * w_right.max() or v_left.min() < 1e-9 * v_left.max():
        raise ValueError(
            "Perron eigenvector has (near-)zero entries; "
            "restrict E to a single recurrent class first"
        )
    v_left = v_left / float(v_left @ w_right)
    stationary = ProbVector(system.alphabet, v_left * w_right)
    trans = system.E.T * w_right[:, None] / (rho * w_right[None, :])
    return StochMatrix(system.alphabet, trans), stationary

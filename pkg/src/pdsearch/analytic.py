"""Closed-form amplitude model of partial-diffusion search, plus baselines.

After ``q`` iterations the search state has only three distinct amplitudes:
``a`` on non-matching ``|i>|0>``, ``b`` on matching ``|i>|0>`` and ``c`` on
matching ``|i>|1>``. With ``y = 1 - M/N = cos(theta)`` and ``s = 1/sqrt(N)``::

    a_q = s (U_q(y) - U_{q-1}(y)),   b_q = s U_q(y),   c_q = -s U_{q-1}(y)

where ``U_q`` is the Chebyshev polynomial of the second kind. Two independent
evaluation routes are provided: the amplitude recurrences and the
trigonometric closed form.

Grover's algorithm uses a different angle, ``sin^2(theta_g) = M/N``; the code
keeps the two angles apart as ``theta_pd`` and ``theta_g``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SizeError

PD_ITERATION_CONSTANT = math.pi / (2.0 * math.sqrt(2.0))
GROVER_ITERATION_CONSTANT = math.pi / 4.0
EXHAUSTIVE_AVERAGE_MAX_N = 30

# below this distance from +-1 the trig form loses accuracy; use the polynomial recurrence
_CHEB_EDGE = 1e-9


def _check_q(q, name: str = "q", minimum: int = 0) -> int:
    if isinstance(q, bool) or int(q) != q or q < minimum:
        raise DomainError(f"{name} must be an integer >= {minimum}, got {q!r}")
    return int(q)


def _check_counts(N: int, M: int) -> None:
    if N < 1 or not 1 <= M <= N:
        raise DomainError(f"need 1 <= M <= N, got N={N}, M={M}")


@dataclass(frozen=True)
class SearchParams:
    """Derived quantities for a search over ``N = 2**n`` items with ``M`` matches."""

    n: int
    M: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise SizeError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "M", int(self.M))
        _check_counts(self.N, self.M)

    @property
    def N(self) -> int:
        return 2**self.n

    @property
    def ratio(self) -> float:
        return self.M / self.N

    @property
    def s(self) -> float:
        return 1.0 / math.sqrt(self.N)

    @property
    def y(self) -> float:
        return 1.0 - self.M / self.N

    @property
    def theta(self) -> float:
        """Partial-diffusion angle, ``arccos(1 - M/N)`` in (0, pi/2]."""
        return theta_pd(self.ratio)

    @property
    def theta_g(self) -> float:
        """Grover angle, ``arcsin(sqrt(M/N))``."""
        return theta_grover(self.ratio)


class AmplitudeTriple(NamedTuple):
    q: int
    a: float
    b: float
    c: float

    def norm_squared(self, params: SearchParams) -> float:
        N, M = params.N, params.M
        return (N - M) * self.a**2 + M * self.b**2 + M * self.c**2


class Source(str, enum.Enum):
    SIMULATED = "simulated"
    RECURRENCE = "recurrence"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class RunReport:
    params: SearchParams
    iterations: int
    p_success: float
    p_failure: float
    source: Source
    algorithm: str = "partial_diffusion"

    def as_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "source": Source(self.source).value,
            "n": self.params.n,
            "N": self.params.N,
            "M": self.params.M,
            "iterations": self.iterations,
            "p_success": self.p_success,
            "p_failure": self.p_failure,
        }


# -- angles -------------------------------------------------------------------


def theta_pd(ratio):
    """``arccos(1 - r)`` computed as ``2 arcsin(sqrt(r/2))``, accurate for small ``r``."""
    theta = 2.0 * np.arcsin(np.sqrt(np.asarray(ratio, dtype=float) / 2.0))
    # r = 1 would otherwise land one ulp above pi/2
    return np.minimum(theta, np.pi / 2)[()]


def theta_grover(ratio):
    return np.arcsin(np.sqrt(np.asarray(ratio, dtype=float)))[()]


def _check_ratio(ratio) -> np.ndarray:
    r = np.asarray(ratio, dtype=float)
    if np.any(~(r > 0)) or np.any(r > 1):
        raise DomainError("ratio M/N must lie in (0, 1]")
    return r


# -- Chebyshev polynomials of the second kind ----------------------------------


def _u_from_angle(q, theta):
    """``sin((q+1) theta) / sin(theta)``, vectorized over ``q`` and ``theta`` in (0, pi)."""
    q = np.asarray(q, dtype=float)
    theta = np.asarray(theta, dtype=float)
    return (np.sin((q + 1.0) * theta) / np.sin(theta))[()]


def _u_by_recurrence(q: int, y: float) -> float:
    if q == -1:
        return 0.0
    prev, cur = 0.0, 1.0
    for _ in range(q):
        prev, cur = cur, 2.0 * y * cur - prev
    return cur


def chebyshev_u(q: int, y: float) -> float:
    """Chebyshev polynomial of the second kind ``U_q(y)`` for ``q >= -1``, ``y`` in [-1, 1].

    Evaluated as ``sin((q+1)theta)/sin(theta)`` with ``y = cos(theta)``; the
    endpoints use ``U_q(1) = q+1`` and ``U_q(-1) = (-1)^q (q+1)``, and a thin
    band next to them falls back to the three-term recurrence.
    """
    q = _check_q(q, minimum=-1)
    y = float(y)
    if not -1.0 <= y <= 1.0:
        raise DomainError(f"y must lie in [-1, 1], got {y}")
    if y == 1.0:
        return float(q + 1)
    if y == -1.0:
        return float((-1) ** (q % 2) * (q + 1))
    if abs(y) > 1.0 - _CHEB_EDGE:
        return _u_by_recurrence(q, y)
    return float(_u_from_angle(q, math.acos(y)))


# -- amplitude evolution -------------------------------------------------------


def initial_triple(params: SearchParams) -> AmplitudeTriple:
    s = params.s
    return AmplitudeTriple(0, s, s, 0.0)


def recurrence_step(params: SearchParams, prev: AmplitudeTriple) -> AmplitudeTriple:
    """One (oracle, partial diffusion) step on the amplitude triple.

    The oracle swaps ``b`` and ``c``; the diffusion then reflects the
    workspace-0 amplitudes about their mean ``y a + (1 - y) c`` and negates
    the workspace-1 ones.
    """
    y = params.y
    mean = y * prev.a + (1.0 - y) * prev.c
    return AmplitudeTriple(prev.q + 1, 2.0 * mean - prev.a, 2.0 * mean - prev.c, -prev.b)


def recurrence_trajectory(params: SearchParams, q_max: int) -> np.ndarray:
    """Array of shape ``(q_max + 1, 3)`` with ``(a_q, b_q, c_q)`` from the second-order recurrences.

    ``a_q = 2y a_{q-1} - a_{q-2}`` and likewise for ``b``, with ``c_q = -b_{q-1}``.
    """
    q_max = _check_q(q_max, "q_max")
    s, y = params.s, params.y
    out = np.empty((q_max + 1, 3))
    out[0] = (s, s, 0.0)
    if q_max >= 1:
        out[1] = (s * (2.0 * y - 1.0), 2.0 * s * y, -s)
    for q in range(2, q_max + 1):
        out[q, 0] = 2.0 * y * out[q - 1, 0] - out[q - 2, 0]
        out[q, 1] = 2.0 * y * out[q - 1, 1] - out[q - 2, 1]
        out[q, 2] = -out[q - 1, 1]
    return out


def amplitudes_by_recurrence(params: SearchParams, q: int) -> AmplitudeTriple:
    q = _check_q(q)
    a, b, c = recurrence_trajectory(params, q)[q]
    return AmplitudeTriple(q, float(a), float(b), float(c))


def closed_form_trajectory(params: SearchParams, q_max: int) -> np.ndarray:
    """Closed-form counterpart of :func:`recurrence_trajectory`."""
    q_max = _check_q(q_max, "q_max")
    qs = np.arange(q_max + 1)
    s = params.s
    u = _u_from_angle(qs, params.theta)
    u_prev = _u_from_angle(qs - 1, params.theta)
    return np.column_stack([s * (u - u_prev), s * u, -s * u_prev])


def amplitudes_closed_form(params: SearchParams, q: int) -> AmplitudeTriple:
    q = _check_q(q)
    theta = params.theta
    u = float(_u_from_angle(q, theta))
    u_prev = float(_u_from_angle(q - 1, theta))
    s = params.s
    return AmplitudeTriple(q, s * (u - u_prev), s * u, -s * u_prev)


# -- probabilities -------------------------------------------------------------


def success_probability_ratio(ratio, q):
    """``(1 - cos theta)(U_q^2 + U_{q-1}^2)`` for real ``ratio = M/N``; vectorized."""
    r = _check_ratio(ratio)
    q = np.asarray(q)
    if np.any(q < 0):
        raise DomainError("iteration counts must be non-negative")
    theta = theta_pd(r)
    return (r * (_u_from_angle(q, theta) ** 2 + _u_from_angle(q - 1, theta) ** 2))[()]


def failure_probability_ratio(ratio, q):
    """``cos(theta)(U_q - U_{q-1})^2`` for real ``ratio = M/N``; vectorized."""
    r = _check_ratio(ratio)
    q = np.asarray(q)
    if np.any(q < 0):
        raise DomainError("iteration counts must be non-negative")
    theta = theta_pd(r)
    return ((1.0 - r) * (_u_from_angle(q, theta) - _u_from_angle(q - 1, theta)) ** 2)[()]


def success_probability(params: SearchParams, q: int) -> float:
    """Probability of measuring a match after ``q`` iterations."""
    return float(success_probability_ratio(params.ratio, _check_q(q)))


def failure_probability(params: SearchParams, q: int) -> float:
    """Probability of measuring a non-match after ``q`` iterations.

    Equals ``(N - M) a_q^2``; see the README note on the ``M a_q^2`` variant.
    """
    return float(failure_probability_ratio(params.ratio, _check_q(q)))


def report(params: SearchParams, q: int, source: Source = Source.CLOSED_FORM) -> RunReport:
    """Analytic RunReport by closed form or by the recurrences."""
    q = _check_q(q)
    source = Source(source)
    if source is Source.CLOSED_FORM:
        ps, pns = success_probability(params, q), failure_probability(params, q)
    elif source is Source.RECURRENCE:
        t = amplitudes_by_recurrence(params, q)
        ps = params.M * (t.b**2 + t.c**2)
        pns = (params.N - params.M) * t.a**2
    else:
        raise DomainError("analytic reports are closed_form or recurrence")
    return RunReport(params, q, ps, pns, source)


# -- iteration counts ----------------------------------------------------------


def required_iterations_ratio(ratio):
    """``floor(pi / (2 sqrt 2) * sqrt(1 / r))``; vectorized."""
    r = _check_ratio(ratio)
    return np.floor(PD_ITERATION_CONSTANT * np.sqrt(1.0 / r)).astype(np.int64)[()]


def grover_iterations_ratio(ratio):
    """``floor(pi / 4 * sqrt(1 / r))``; vectorized, may be 0."""
    r = _check_ratio(ratio)
    return np.floor(GROVER_ITERATION_CONSTANT * np.sqrt(1.0 / r)).astype(np.int64)[()]


def required_iterations(params: SearchParams) -> int:
    """Iteration count for partial-diffusion search, at least 1."""
    return int(math.floor(PD_ITERATION_CONSTANT * math.sqrt(params.N / params.M)))


def certainty_iteration_exact(params: SearchParams) -> float:
    """Real iteration count ``(pi - theta) / (2 theta)`` at which success is certain.

    For ``M = N`` every ``q >= 1`` succeeds with certainty and 1.0 is returned.
    """
    if params.M == params.N:
        return 1.0
    theta = params.theta
    return (math.pi - theta) / (2.0 * theta)


# -- baselines -----------------------------------------------------------------


def grover_success_probability(N: int, M: int, q_g: int) -> float:
    """``sin^2((2 q_g + 1) theta_g)`` with ``sin^2(theta_g) = M/N``."""
    _check_counts(N, M)
    return float(grover_success_probability_ratio(M / N, _check_q(q_g, "q_g")))


def grover_success_probability_ratio(ratio, q_g):
    r = _check_ratio(ratio)
    return (np.sin((2 * np.asarray(q_g) + 1) * theta_grover(r)) ** 2)[()]


def grover_iterations(N: int, M: int) -> int:
    _check_counts(N, M)
    return int(math.floor(GROVER_ITERATION_CONSTANT * math.sqrt(N / M)))


def classical_success_probability(N: int, M: int) -> float:
    """One random guess."""
    _check_counts(N, M)
    return M / N


# -- averages over all oracles -------------------------------------------------


class AverageResult(NamedTuple):
    """Average success probability over all ``2**N`` oracles on ``N`` items.

    ``summed`` is the explicit binomially weighted sum, or None above the
    exhaustive-summation cap.
    """

    closed: float
    summed: float | None


def _binomial_average(N: int, probs) -> float:
    # M = 0 contributes zero success probability
    weights = np.array([math.comb(N, m) for m in range(1, N + 1)], dtype=float) / 2.0**N
    terms = weights * np.asarray(probs, dtype=float)
    return math.fsum(terms.tolist())


def _check_average_N(N: int) -> int:
    if isinstance(N, bool) or int(N) != N or N < 2 or (int(N) & (int(N) - 1)):
        raise DomainError(f"N must be a power of two >= 2, got {N!r}")
    return int(N)


def average_success_first_iteration(N: int) -> AverageResult:
    """Average of the first-iteration success probability; closed value ``1 - 1/(2N)``."""
    N = _check_average_N(N)
    closed = 1.0 - 1.0 / (2.0 * N)
    if N > EXHAUSTIVE_AVERAGE_MAX_N:
        return AverageResult(closed, None)
    ratios = np.arange(1, N + 1) / N
    return AverageResult(closed, _binomial_average(N, success_probability_ratio(ratios, 1)))


def average_success_classical(N: int) -> AverageResult:
    N = _check_average_N(N)
    if N > EXHAUSTIVE_AVERAGE_MAX_N:
        return AverageResult(0.5, None)
    return AverageResult(0.5, _binomial_average(N, np.arange(1, N + 1) / N))


def average_success_grover(N: int, q_g: int) -> AverageResult:
    N = _check_average_N(N)
    q_g = _check_q(q_g, "q_g")
    if N > EXHAUSTIVE_AVERAGE_MAX_N:
        return AverageResult(0.5, None)
    ratios = np.arange(1, N + 1) / N
    return AverageResult(0.5, _binomial_average(N, grover_success_probability_ratio(ratios, q_g)))

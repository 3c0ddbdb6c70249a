"""Oracle, partial diffusion, and Grover operators acting on a StateVector."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import DomainError, ShapeError, SizeError
from .statevector import StateVector, check_index_qubits, new_prepared_register

MAX_DENSE_QUBITS = 8

Operator = Callable[[StateVector], StateVector]


@dataclass(frozen=True)
class MarkedSet:
    """Indices ``i`` with ``f(i) = 1`` for an ``n``-qubit search space."""

    n_index_qubits: int
    members: tuple[int, ...]

    def __init__(self, n_index_qubits: int, members: Iterable[int]):
        n = check_index_qubits(n_index_qubits)
        N = 2**n
        raw = [int(m) for m in members]
        uniq = sorted(set(raw))
        if len(uniq) != len(raw):
            raise DomainError(f"marked indices contain duplicates: {raw}")
        if not uniq:
            raise DomainError("at least one marked index is required")
        if uniq[0] < 0 or uniq[-1] >= N:
            raise DomainError(f"marked indices must lie in [0, {N}) for n={n}")
        object.__setattr__(self, "n_index_qubits", n)
        object.__setattr__(self, "members", tuple(uniq))

    @classmethod
    def random(cls, n: int, count: int, seed: int) -> "MarkedSet":
        """``count`` distinct indices drawn without replacement."""
        n = check_index_qubits(n)
        if not 1 <= count <= 2**n:
            raise DomainError(f"number of marked indices must be in [1, {2**n}], got {count}")
        rng = np.random.default_rng(seed)
        return cls(n, rng.choice(2**n, size=count, replace=False).tolist())

    @property
    def N(self) -> int:
        return 2**self.n_index_qubits

    @property
    def M(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def mask(self) -> np.ndarray:
        """Boolean array of length N, True at marked indices."""
        m = np.zeros(self.N, dtype=bool)
        m[list(self.members)] = True
        return m


def _check_same_register(state: StateVector, marked: MarkedSet) -> None:
    if marked.n_index_qubits != state.n_index_qubits:
        raise ShapeError(
            f"marked set is for n={marked.n_index_qubits} but state has n={state.n_index_qubits}"
        )


def apply_oracle(state: StateVector, marked: MarkedSet) -> StateVector:
    """``|i>|w> -> |i>|w xor f(i)>``: swap the two workspace amplitudes of each match."""
    _check_same_register(state, marked)
    idx = np.asarray(marked.members, dtype=np.int64)
    amps = state.amplitudes.copy()
    amps[2 * idx], amps[2 * idx + 1] = state.amplitudes[2 * idx + 1], state.amplitudes[2 * idx]
    return StateVector(state.n_index_qubits, amps)


def apply_phase_oracle(state: StateVector, marked: MarkedSet) -> StateVector:
    """Negate the amplitudes of every marked index, for both workspace values."""
    _check_same_register(state, marked)
    idx = np.asarray(marked.members, dtype=np.int64)
    amps = state.amplitudes.copy()
    amps[2 * idx] *= -1
    amps[2 * idx + 1] *= -1
    return StateVector(state.n_index_qubits, amps)


def apply_partial_diffusion(state: StateVector) -> StateVector:
    """Inversion about the mean on the workspace-0 subspace only.

    Every ``alpha_j`` becomes ``2 <alpha> - alpha_j`` and every ``beta_j``
    becomes ``-beta_j``. O(N).
    """
    src = state.amplitudes
    amps = np.empty_like(src)
    alpha = src[0::2]
    mean = alpha.mean()
    amps[0::2] = 2 * mean - alpha
    amps[1::2] = -src[1::2]
    return StateVector(state.n_index_qubits, amps)


def apply_grover_diffusion(state: StateVector) -> StateVector:
    """Grover's inversion about the mean over the index qubits.

    The workspace qubit is a spectator: the reflection is applied separately
    within the ``w = 0`` and ``w = 1`` subspaces.
    """
    src = state.amplitudes
    amps = np.empty_like(src)
    for w in (0, 1):
        sub = src[w::2]
        amps[w::2] = 2 * sub.mean() - sub
    return StateVector(state.n_index_qubits, amps)


def hadamard_transform_matrix(n: int) -> np.ndarray:
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    out = np.ones((1, 1))
    for _ in range(n):
        out = np.kron(out, h)
    return out


def build_partial_diffusion_dense(n: int) -> np.ndarray:
    """Dense ``Y = (H^n (x) I)(2|0><0| - I)(H^n (x) I)`` in the ``k = 2i + w`` ordering.

    Reference only; O(4^n) memory.
    """
    n = check_index_qubits(n)
    if n > MAX_DENSE_QUBITS:
        raise SizeError(f"dense construction limited to n <= {MAX_DENSE_QUBITS}, got {n}")
    dim = 2 ** (n + 1)
    # workspace qubit is the least-significant tensor factor
    h_index = np.kron(hadamard_transform_matrix(n), np.eye(2))
    reflect = -np.eye(dim)
    reflect[0, 0] = 1.0
    return (h_index @ reflect @ h_index).astype(np.complex128)


def build_grover_diffusion_dense(n: int) -> np.ndarray:
    """Dense ``(H^n (2|0><0| - I) H^n) (x) I``, the reference for :func:`apply_grover_diffusion`."""
    n = check_index_qubits(n)
    if n > MAX_DENSE_QUBITS:
        raise SizeError(f"dense construction limited to n <= {MAX_DENSE_QUBITS}, got {n}")
    h = hadamard_transform_matrix(n)
    reflect = -np.eye(2**n)
    reflect[0, 0] = 1.0
    return np.kron(h @ reflect @ h, np.eye(2)).astype(np.complex128)


def _check_iterations(iterations: int) -> int:
    if isinstance(iterations, bool) or int(iterations) != iterations or iterations < 0:
        raise DomainError(f"iterations must be a non-negative integer, got {iterations!r}")
    return int(iterations)


def search_trajectory(
    n: int,
    marked: MarkedSet,
    iterations: int,
    diffusion: Operator | None = None,
) -> Iterator[StateVector]:
    """Yield the partial-diffusion search state after 0, 1, ..., ``iterations`` steps."""
    iterations = _check_iterations(iterations)
    diffusion = diffusion or apply_partial_diffusion
    state = new_prepared_register(n)
    _check_same_register(state, marked)
    yield state
    for _ in range(iterations):
        state = diffusion(apply_oracle(state, marked))
        yield state


def run_search(n: int, marked: MarkedSet, iterations: int) -> StateVector:
    """Prepare the register, then apply (oracle, partial diffusion) ``iterations`` times."""
    for state in search_trajectory(n, marked, iterations):
        pass
    return state


def run_grover(n: int, marked: MarkedSet, iterations: int) -> StateVector:
    """Grover baseline: (phase oracle, Grover diffusion) ``iterations`` times.

    The workspace qubit stays ``|0>`` throughout.
    """
    iterations = _check_iterations(iterations)
    state = new_prepared_register(n)
    _check_same_register(state, marked)
    for _ in range(iterations):
        state = apply_grover_diffusion(apply_phase_oracle(state, marked))
    return state


@dataclass(frozen=True)
class AmplitudeStructure:
    """The three distinct amplitude values of a search state, with their spreads.

    ``spread`` is the largest deviation of any amplitude from the value of its
    group, including the non-marked workspace-1 amplitudes (expected 0).
    """

    a: float | None
    b: float
    c: float
    spread: float
    max_imag: float


def amplitude_structure(state: StateVector, marked: MarkedSet) -> AmplitudeStructure:
    """Collapse a search state to ``(a, b, c)``: non-match ``w=0``, match ``w=0``, match ``w=1``.

    ``a`` is None when every index is marked.
    """
    _check_same_register(state, marked)
    mask = marked.mask()
    alpha, beta = state.alpha, state.beta
    groups = [alpha[mask], beta[mask]]
    if not mask.all():
        groups.insert(0, alpha[~mask])
    reps = [g[0] for g in groups]
    spread = max(float(np.max(np.abs(g - r))) for g, r in zip(groups, reps))
    if not mask.all():
        spread = max(spread, float(np.max(np.abs(beta[~mask]))))
    max_imag = float(np.max(np.abs(state.amplitudes.imag)))
    if mask.all():
        return AmplitudeStructure(None, reps[0].real, reps[1].real, spread, max_imag)
    return AmplitudeStructure(reps[0].real, reps[1].real, reps[2].real, spread, max_imag)

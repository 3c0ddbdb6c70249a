"""Complex state vector for an (n + 1)-qubit search register.

The register holds ``n`` index qubits plus one workspace qubit. Basis state
``k`` encodes the pair ``(i, w)`` as ``k = 2 * i + w``: the workspace qubit is
the least-significant bit, so the ``w = 0`` amplitudes are ``amplitudes[0::2]``
and the ``w = 1`` amplitudes are ``amplitudes[1::2]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError, ShapeError, SizeError

MAX_INDEX_QUBITS = 22
NORM_TOL = 1e-12


def encode_index(i: int, w: int) -> int:
    """Register index of basis state ``|i> (x) |w>``."""
    return 2 * i + w


def decode_index(k: int) -> tuple[int, int]:
    """Inverse of :func:`encode_index`."""
    return k >> 1, k & 1


def check_index_qubits(n: int, max_qubits: int = MAX_INDEX_QUBITS) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise SizeError(f"number of index qubits must be an integer, got {n!r}")
    if n < 1 or n > max_qubits:
        raise SizeError(f"number of index qubits must be in [1, {max_qubits}], got {n}")
    return int(n)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes of an (n + 1)-qubit register.

    Operations in this package never mutate a ``StateVector``; they return a
    new one, so instances can be shared between threads freely.
    """

    n_index_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        n = check_index_qubits(self.n_index_qubits)
        amps = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if amps.ndim != 1 or amps.shape[0] != 2 ** (n + 1):
            raise ShapeError(
                f"expected {2 ** (n + 1)} amplitudes for n={n}, got shape {amps.shape}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "n_index_qubits", n)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def N(self) -> int:
        """Size of the search space, ``2**n``."""
        return 2 ** self.n_index_qubits

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def alpha(self) -> np.ndarray:
        """Workspace-0 amplitudes, indexed by ``i``."""
        return self.amplitudes[0::2]

    @property
    def beta(self) -> np.ndarray:
        """Workspace-1 amplitudes, indexed by ``i``."""
        return self.amplitudes[1::2]

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, atol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) < atol

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def allclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        return (
            self.n_index_qubits == other.n_index_qubits
            and bool(np.max(np.abs(self.amplitudes - other.amplitudes)) < atol)
        )

    @classmethod
    def from_subspaces(cls, alpha, beta) -> "StateVector":
        """Build a state from its workspace-0 and workspace-1 components."""
        alpha = np.asarray(alpha, dtype=np.complex128)
        beta = np.asarray(beta, dtype=np.complex128)
        if alpha.shape != beta.shape or alpha.ndim != 1:
            raise ShapeError("alpha and beta must be 1-d arrays of equal length")
        size = alpha.shape[0]
        n = size.bit_length() - 1
        if size != 2**n:
            raise ShapeError(f"subspace length must be a power of two, got {size}")
        amps = np.empty(2 * size, dtype=np.complex128)
        amps[0::2] = alpha
        amps[1::2] = beta
        return cls(n, amps)

    @classmethod
    def basis(cls, n: int, k: int) -> "StateVector":
        n = check_index_qubits(n)
        if not 0 <= k < 2 ** (n + 1):
            raise DomainError(f"basis index {k} out of range for n={n}")
        amps = np.zeros(2 ** (n + 1), dtype=np.complex128)
        amps[k] = 1.0
        return cls(n, amps)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "StateVector":
        """Haar-like random normalized state (complex Gaussian, normalized)."""
        n = check_index_qubits(n)
        dim = 2 ** (n + 1)
        amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        return cls(n, amps / np.linalg.norm(amps))


def new_prepared_register(n: int) -> StateVector:
    """Return ``(H^n (x) I)|0...0>|0>``: uniform over ``i`` with workspace ``|0>``."""
    n = check_index_qubits(n)
    N = 2**n
    amps = np.zeros(2 * N, dtype=np.complex128)
    amps[0::2] = 1.0 / np.sqrt(N)
    return StateVector(n, amps)


def _as_index_array(indices: Iterable[int], N: int) -> np.ndarray:
    members = getattr(indices, "members", indices)
    idx = np.asarray(list(members), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= N):
        raise DomainError(f"indices must lie in [0, {N}), got {sorted(set(idx.tolist()))}")
    return np.unique(idx)


def probability_of_index_set(state: StateVector, indices: Iterable[int]) -> float:
    """Probability that measuring the index qubits gives one of ``indices``.

    Each index contributes both of its workspace components.
    """
    idx = _as_index_array(indices, state.N)
    probs = state.probabilities()
    return float(np.sum(probs[2 * idx]) + np.sum(probs[2 * idx + 1]))


def sample_measurement(state: StateVector, rng_seed: int, shots: int | None = None):
    """Sample full-register basis indices ``k`` with probability ``|delta_k|^2``.

    Uses inverse-CDF sampling over the cumulative probability array with a
    PCG64 generator seeded by ``rng_seed``. Returns a single ``int`` when
    ``shots`` is None, otherwise an int64 array of length ``shots``.
    """
    cdf = np.cumsum(state.probabilities())
    total = cdf[-1]
    if abs(total - 1.0) > 1e-9:
        raise DomainError(f"state is not normalized (norm^2 = {total})")
    rng = np.random.default_rng(rng_seed)
    u = rng.random(1 if shots is None else shots) * total
    ks = np.searchsorted(cdf, u, side="right")
    np.minimum(ks, cdf.shape[0] - 1, out=ks)
    if shots is None:
        return int(ks[0])
    return ks.astype(np.int64)


def apply_dense_unitary(state: StateVector, matrix: np.ndarray) -> StateVector:
    """Return ``matrix @ state``. Unitarity is not checked here; see :func:`is_unitary`."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape != (state.dim, state.dim):
        raise ShapeError(
            f"matrix of shape {matrix.shape} cannot act on a state of length {state.dim}"
        )
    return StateVector(state.n_index_qubits, matrix @ state.amplitudes)


def is_unitary(matrix: np.ndarray, atol: float = 1e-10) -> bool:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    eye = np.eye(matrix.shape[0])
    return bool(np.max(np.abs(matrix.conj().T @ matrix - eye)) < atol)

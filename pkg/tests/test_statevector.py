import numpy as np
import pytest
from hypothesis import given, strategies as st

from pdsearch.errors import DomainError, ShapeError, SizeError
from pdsearch.statevector import (
    MAX_INDEX_QUBITS,
    StateVector,
    apply_dense_unitary,
    decode_index,
    encode_index,
    is_unitary,
    new_prepared_register,
    probability_of_index_set,
    sample_measurement,
)
from pdsearch.operators import MarkedSet, hadamard_transform_matrix, run_search


def test_prepared_register_n1():
    s = new_prepared_register(1)
    expected = np.array([1, 0, 1, 0]) / np.sqrt(2)
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-15)


def test_prepared_register_n2():
    s = new_prepared_register(2)
    np.testing.assert_allclose(s.alpha, 0.5)
    np.testing.assert_array_equal(s.beta, 0)


def test_prepared_register_n10_norm():
    s = new_prepared_register(10)
    assert s.dim == 2048
    np.testing.assert_allclose(s.alpha, 1 / 32)
    assert abs(s.norm_squared() - 1) < 1e-12


@pytest.mark.parametrize("n", [0, -1, MAX_INDEX_QUBITS + 1])
def test_prepared_register_rejects_size(n):
    with pytest.raises(SizeError):
        new_prepared_register(n)


def test_prepared_register_supports_20_qubits():
    assert MAX_INDEX_QUBITS >= 20


def test_state_rejects_wrong_length():
    with pytest.raises(ShapeError):
        StateVector(2, np.zeros(6))


def test_state_is_immutable():
    s = new_prepared_register(2)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1.0


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1), st.integers(0, 1))))
def test_index_round_trip(args):
    _, i, w = args
    assert decode_index(encode_index(i, w)) == (i, w)


def test_probability_single_index():
    assert probability_of_index_set(new_prepared_register(2), [0]) == pytest.approx(0.25, abs=1e-15)


def test_probability_complete_set():
    assert probability_of_index_set(new_prepared_register(2), [0, 1, 2, 3]) == pytest.approx(1.0, abs=1e-15)


def test_probability_counts_both_workspace_values():
    state = run_search(2, MarkedSet(2, [0]), 1)
    assert probability_of_index_set(state, MarkedSet(2, [0])) == pytest.approx(0.8125, abs=1e-12)


def test_probability_rejects_out_of_range():
    with pytest.raises(DomainError):
        probability_of_index_set(new_prepared_register(2), [4])


def test_sample_deterministic_state():
    s = StateVector.basis(2, 5)
    for seed in (0, 1, 2**63 - 1):
        assert sample_measurement(s, seed) == 5


def test_sample_is_reproducible():
    s = StateVector.random(3, np.random.default_rng(7))
    a = sample_measurement(s, 1234, shots=100)
    b = sample_measurement(s, 1234, shots=100)
    np.testing.assert_array_equal(a, b)
    assert sample_measurement(s, 99) == sample_measurement(s, 99)


def test_sample_uniform_frequencies():
    shots = 10**6
    ks = sample_measurement(new_prepared_register(2), 2024, shots=shots)
    counts = np.bincount(ks, minlength=8)
    assert counts[1::2].sum() == 0
    freqs = counts[0::2] / shots
    np.testing.assert_allclose(freqs, 0.25, atol=0.005)
    # chi-squared, 3 dof; 16.27 is the 0.999 quantile
    expected = shots / 4
    chi2 = float(np.sum((counts[0::2] - expected) ** 2 / expected))
    assert chi2 < 16.27


def test_sample_after_half_marked_iteration_hits_matches():
    marked = MarkedSet(2, [0, 1])
    ks = sample_measurement(run_search(2, marked, 1), 5, shots=10**5)
    hit = np.isin(ks, [0, 1, 2, 3]).mean()
    assert abs(hit - 1.0) < 1e-9


def test_dense_identity():
    s = StateVector.random(2, np.random.default_rng(0))
    out = apply_dense_unitary(s, np.eye(8))
    np.testing.assert_array_equal(out.amplitudes, s.amplitudes)


def test_dense_not_on_index_qubit():
    x = np.array([[0, 1], [1, 0]])
    s = StateVector(1, [1, 0, 0, 0])
    out = apply_dense_unitary(s, np.kron(x, np.eye(2)))
    np.testing.assert_array_equal(out.amplitudes, [0, 0, 1, 0])


def test_dense_shape_error():
    with pytest.raises(ShapeError):
        apply_dense_unitary(new_prepared_register(2), np.eye(4))


@pytest.mark.parametrize("n", [1, 3, 5])
def test_dense_unitary_round_trip(n):
    rng = np.random.default_rng(n)
    dim = 2 ** (n + 1)
    u, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    assert is_unitary(u)
    s = StateVector.random(n, rng)
    back = apply_dense_unitary(apply_dense_unitary(s, u), u.conj().T)
    assert np.max(np.abs(back.amplitudes - s.amplitudes)) < 1e-10
    assert abs(apply_dense_unitary(s, u).norm_squared() - 1) < 1e-10


def test_hadamard_prepares_register():
    n = 4
    h = np.kron(hadamard_transform_matrix(n), np.eye(2))
    out = apply_dense_unitary(StateVector.basis(n, 0), h)
    assert out.allclose(new_prepared_register(n), atol=1e-15)

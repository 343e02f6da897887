import itertools

import numpy as np
import pytest

from qep import gates, truthspace
from qep.gates import (
    Gate,
    apply,
    apply_to_qumix,
    compose,
    hadamard_gate,
    not_gate,
    sqrt_not_gate,
    swap_gate,
    tensor_gates,
    toffoli_gate,
    twin_gate,
    xor_gate,
)
from qep.qcore import Quregister, Qumix, is_unitary, projector, random_qumix, random_unitary, tensor
from qep.truthspace import probability
from _support import random_perspective

SQ2 = 1 / np.sqrt(2)


def bits_of(index, n):
    return tuple(int(c) for c in format(index, f"0{n}b"))


def index_of(bits):
    return int("".join(map(str, bits)), 2)


def truth_table_matrix(n, rule):
    """Independent oracle: permutation matrix from a rule on bit tuples."""
    m = np.zeros((2**n, 2**n))
    for bits in itertools.product((0, 1), repeat=n):
        m[index_of(rule(bits)), index_of(bits)] = 1
    return m


def test_not_examples():
    assert apply(not_gate(1), Quregister.basis(0)).equals_up_to_phase(Quregister.basis(1))
    np.testing.assert_array_equal(apply(not_gate(2), Quregister.basis(1, 1)).amplitudes, Quregister.basis(1, 0).amplitudes)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_not_is_involution(n):
    g = not_gate(n)
    np.testing.assert_allclose(g.matrix @ g.matrix, np.eye(2**n))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_not_truth_table(n):
    np.testing.assert_array_equal(not_gate(n).matrix, truth_table_matrix(n, lambda b: b[:-1] + (1 - b[-1],)))


def test_toffoli_examples():
    t = toffoli_gate(1, 1, 1)
    np.testing.assert_array_equal(apply(t, Quregister.basis(1, 1, 0)).amplitudes, Quregister.basis(1, 1, 1).amplitudes)
    np.testing.assert_array_equal(apply(t, Quregister.basis(0, 1, 1)).amplitudes, Quregister.basis(0, 1, 1).amplitudes)


def test_toffoli_is_standard_ccnot():
    ccnot = np.eye(8)
    ccnot[[6, 7]] = ccnot[[7, 6]]
    np.testing.assert_array_equal(toffoli_gate(1, 1, 1).matrix, ccnot)


@pytest.mark.parametrize("n,m,p", [(1, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, 2), (2, 1, 2), (3, 3, 3)])
def test_toffoli_truth_table(n, m, p):
    def rule(b):
        return b[:-1] + (((b[n - 1] * b[n + m - 1]) + b[-1]) % 2,)

    np.testing.assert_array_equal(toffoli_gate(n, m, p).matrix, truth_table_matrix(n + m + p, rule))


def test_xor_examples_and_cnot():
    x = xor_gate(1, 1)
    np.testing.assert_array_equal(apply(x, Quregister.basis(1, 0)).amplitudes, Quregister.basis(1, 1).amplitudes)
    for y in (0, 1):
        np.testing.assert_array_equal(apply(x, Quregister.basis(0, y)).amplitudes, Quregister.basis(0, y).amplitudes)
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    np.testing.assert_array_equal(x.matrix, cnot)
    # Toffoli with the first control held at 1 acts as CNOT on the rest
    np.testing.assert_array_equal(toffoli_gate(1, 1, 1).matrix[4:, 4:], cnot)


@pytest.mark.parametrize("n,m", [(1, 1), (2, 1), (1, 2), (3, 3)])
def test_xor_truth_table(n, m):
    np.testing.assert_array_equal(
        xor_gate(n, m).matrix, truth_table_matrix(n + m, lambda b: b[:-1] + ((b[n - 1] + b[-1]) % 2,))
    )


def test_swap_examples():
    np.testing.assert_array_equal(apply(swap_gate(2, 1, 2), Quregister.basis(0, 1)).amplitudes, Quregister.basis(1, 0).amplitudes)
    np.testing.assert_array_equal(swap_gate(3, 2, 2).matrix, np.eye(8))


@pytest.mark.parametrize("n,i,j", [(2, 1, 2), (3, 1, 3), (3, 2, 3), (4, 1, 4)])
def test_swap_truth_table(n, i, j):
    def rule(b):
        b = list(b)
        b[i - 1], b[j - 1] = b[j - 1], b[i - 1]
        return tuple(b)

    np.testing.assert_array_equal(swap_gate(n, i, j).matrix, truth_table_matrix(n, rule))


def test_swap_moves_qubit_into_external_memory():
    a0, a1 = np.sqrt(0.3), np.sqrt(0.7)
    bell = Quregister(np.array([1, 0, 0, 1]) * SQ2)
    q = Quregister([a0, a1])
    out = apply(swap_gate(3, 1, 3), tensor(bell, q))
    np.testing.assert_allclose(out.amplitudes, tensor(q, bell).amplitudes, atol=1e-15)


def test_swap_errors():
    with pytest.raises(ValueError):
        swap_gate(2, 0, 1)
    with pytest.raises(ValueError):
        swap_gate(2, 1, 3)


def test_hadamard_examples():
    h = hadamard_gate(1)
    np.testing.assert_allclose(apply(h, Quregister.basis(0)).amplitudes, [SQ2, SQ2])
    np.testing.assert_allclose(apply(h, Quregister.basis(1)).amplitudes, [SQ2, -SQ2])
    np.testing.assert_allclose(h.matrix @ h.matrix, np.eye(2), atol=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hadamard_formula_on_basis(n):
    g = hadamard_gate(n)
    for bits in itertools.product((0, 1), repeat=n):
        expected = np.zeros(2**n)
        x = bits[-1]
        expected[index_of(bits)] += (-1) ** x * SQ2
        expected[index_of(bits[:-1] + (1 - x,))] += SQ2
        np.testing.assert_allclose(g.matrix[:, index_of(bits)], expected, atol=1e-15)


def test_sqrt_not_matrix_and_square():
    g = sqrt_not_gate(1)
    np.testing.assert_allclose(g.matrix, [[(1 - 1j) / 2, (1 + 1j) / 2], [(1 + 1j) / 2, (1 - 1j) / 2]])
    np.testing.assert_allclose(g.matrix @ g.matrix, not_gate(1).matrix, atol=1e-15)
    np.testing.assert_allclose(g.matrix.conj().T @ g.matrix, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(sqrt_not_gate(2).matrix @ sqrt_not_gate(2).matrix, not_gate(2).matrix, atol=1e-15)


@pytest.mark.parametrize("factory", [not_gate, hadamard_gate, sqrt_not_gate, gates.identity_gate])
def test_arity_errors(factory):
    with pytest.raises(ValueError):
        factory(0)


def test_parameter_errors():
    with pytest.raises(ValueError):
        toffoli_gate(1, 0, 1)
    with pytest.raises(ValueError):
        xor_gate(0, 1)


def test_every_constructor_is_unitary():
    built = [not_gate(3), toffoli_gate(2, 1, 1), xor_gate(1, 2), swap_gate(3, 1, 3), hadamard_gate(2),
             sqrt_not_gate(3), gates.pauli_x(), gates.pauli_y(), gates.pauli_z()]
    assert all(is_unitary(g.matrix) for g in built)


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        Gate(np.diag([1, 2]))


def test_twin_gate_identity_perspective():
    g = toffoli_gate(1, 1, 1)
    assert twin_gate(g, truthspace.identity()).close_to(g)


def test_twin_not_swaps_perspective_bits(rng):
    for _ in range(20):
        t = random_perspective(rng)
        out = apply(twin_gate(not_gate(1), t), t.falsity)
        np.testing.assert_allclose(out.amplitudes, t.truth.amplitudes, atol=1e-12)


def test_twin_gates_compose(rng):
    for _ in range(20):
        t = random_perspective(rng)
        g, h = Gate(random_unitary(4, rng)), Gate(random_unitary(4, rng))
        lhs = twin_gate(compose(g, h), t)
        rhs = compose(twin_gate(g, t), twin_gate(h, t))
        assert lhs.close_to(rhs, 1e-12)


def test_apply_to_qumix_examples():
    assert apply_to_qumix(not_gate(1), projector(Quregister.basis(0))).close_to(projector(Quregister.basis(1)))
    half = Qumix.maximally_mixed(1)
    for g in (not_gate(1), hadamard_gate(1), sqrt_not_gate(1), gates.pauli_y()):
        assert apply_to_qumix(g, half).close_to(half)
    out = apply_to_qumix(hadamard_gate(1), projector(Quregister.basis(0)))
    np.testing.assert_allclose(out.matrix, np.full((2, 2), 0.5), atol=1e-15)


def test_apply_to_qumix_arity_mismatch():
    with pytest.raises(ValueError):
        apply_to_qumix(not_gate(2), Qumix.maximally_mixed(1))


def test_apply_to_qumix_preserves_invariants(rng):
    for _ in range(100):
        n = int(rng.integers(1, 4))
        rho = random_qumix(n, rng)
        out = apply_to_qumix(Gate(random_unitary(2**n, rng)), rho)
        assert abs(np.trace(out.matrix) - 1) < 1e-9
        assert np.trace(out.matrix @ out.matrix).real == pytest.approx(np.trace(rho.matrix @ rho.matrix).real, abs=1e-9)


def test_twin_gate_probability_covariance(rng):
    for _ in range(30):
        n = int(rng.integers(1, 4))
        t = random_perspective(rng)
        g = Gate(random_unitary(2**n, rng))
        rho = random_qumix(n, rng)
        ext = truthspace.extend(t, n).matrix
        lhs = probability(t, apply_to_qumix(twin_gate(g, t), rho))
        pulled_back = Qumix(ext.conj().T @ rho.matrix @ ext)
        rhs = probability(truthspace.identity(), apply_to_qumix(g, pulled_back))
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_tensor_gates_embeds_explicitly():
    g = tensor_gates(xor_gate(1, 1), gates.identity_gate(1))
    assert g.n == 3
    np.testing.assert_array_equal(g.matrix, np.kron(xor_gate(1, 1).matrix, np.eye(2)))

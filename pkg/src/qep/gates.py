"""
Canonical quantum logical gates as explicit unitary matrices.

Classical reversible gates are built from their truth tables on the
canonical basis; gates acting on a single qubit act on the *last* qubit of
the register, leaving ``x1..x_{n-1}`` untouched.  Embedding a gate into a
larger register is explicit: ``tensor_gates(xor_gate(1, 1), identity_gate(1))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable

import numpy as np

from .config import check_qubits, tol
from .qcore import (
    Quregister,
    Qumix,
    _frozen,
    _qubits_for_dim,
    basis_index,
    index_bits,
    is_unitary,
    kron_power,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD_1 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
SQRT_NOT_1 = np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=complex) / 2


@dataclass(frozen=True, eq=False)
class Gate:
    """A unitary operator on ``n`` qubits."""

    matrix: np.ndarray
    label: str = "G"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"gate matrix must be square, got shape {m.shape}")
        check_qubits(_qubits_for_dim(m.shape[0]))
        if not is_unitary(m):
            raise ValueError(f"gate {self.label!r} is not unitary")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n(self) -> int:
        return _qubits_for_dim(self.matrix.shape[0])

    @property
    def dagger(self) -> "Gate":
        return Gate(self.matrix.conj().T, f"{self.label}^dagger")

    def close_to(self, other: "Gate", atol: float | None = None) -> bool:
        return self.n == other.n and np.allclose(self.matrix, other.matrix, rtol=0, atol=tol(atol))

    def __matmul__(self, other: "Gate") -> "Gate":
        return compose(self, other)

    def __repr__(self):
        return f"Gate({self.label!r}, n={self.n})"


def _classical_gate(n: int, rule: Callable[[tuple[int, ...]], tuple[int, ...]], label: str) -> Gate:
    check_qubits(n)
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        m[basis_index(rule(index_bits(col, n))), col] = 1.0
    return Gate(m, label)


def _last_qubit_gate(n: int, u: np.ndarray, label: str) -> Gate:
    if n < 1:
        raise ValueError(f"{label} needs n >= 1, got {n}")
    check_qubits(n)
    return Gate(np.kron(np.eye(2 ** (n - 1)), u), label)


def _check_positive(**params):
    for name, value in params.items():
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")


def identity_gate(n: int = 1) -> Gate:
    _check_positive(n=n)
    check_qubits(n)
    return Gate(np.eye(2**n), f"I({n})")


def not_gate(n: int = 1) -> Gate:
    """``NOT(n)``: flips the last bit."""
    _check_positive(n=n)
    return _classical_gate(n, lambda x: x[:-1] + (1 - x[-1],), f"NOT({n})")


def toffoli_gate(n: int = 1, m: int = 1, p: int = 1) -> Gate:
    """``T(n,m,p)`` on ``n+m+p`` qubits: the last bit becomes ``x_n y_m + z_p (mod 2)``."""
    _check_positive(n=n, m=m, p=p)

    def rule(bits):
        x_n, y_m = bits[n - 1], bits[n + m - 1]
        return bits[:-1] + ((x_n * y_m) ^ bits[-1],)

    return _classical_gate(n + m + p, rule, f"T({n},{m},{p})")


def xor_gate(n: int = 1, m: int = 1) -> Gate:
    """``XOR(n,m)`` on ``n+m`` qubits: the last bit becomes ``x_n + y_m (mod 2)``."""
    _check_positive(n=n, m=m)
    return _classical_gate(n + m, lambda bits: bits[:-1] + (bits[n - 1] ^ bits[-1],), f"XOR({n},{m})")


def swap_gate(n: int, i: int, j: int) -> Gate:
    """``SWAP(n)_(i,j)``: exchanges bit positions ``i`` and ``j`` (1-based)."""
    _check_positive(n=n)
    for k in (i, j):
        if not 1 <= k <= n:
            raise ValueError(f"swap index {k} out of range 1..{n}")

    def rule(bits):
        b = list(bits)
        b[i - 1], b[j - 1] = b[j - 1], b[i - 1]
        return tuple(b)

    return _classical_gate(n, rule, f"SWAP({n})_({i},{j})")


def hadamard_gate(n: int = 1) -> Gate:
    """``sqrt(I)(n)``: ``|x_n> -> ((-1)^{x_n}|x_n> + |1-x_n>)/sqrt(2)`` on the last qubit."""
    return _last_qubit_gate(n, HADAMARD_1, f"H({n})")


def sqrt_not_gate(n: int = 1) -> Gate:
    """``sqrt(NOT)(n)``: ``|x_n> -> (1-i)/2 |x_n> + (1+i)/2 |1-x_n>`` on the last qubit."""
    return _last_qubit_gate(n, SQRT_NOT_1, f"sqrtNOT({n})")


def pauli_x() -> Gate:
    return Gate(PAULI_X, "X")


def pauli_y() -> Gate:
    return Gate(PAULI_Y, "Y")


def pauli_z() -> Gate:
    return Gate(PAULI_Z, "Z")


NAMED_GATES: dict[str, Callable[[], Gate]] = {
    "identity": identity_gate,
    "not": not_gate,
    "hadamard": hadamard_gate,
    "sqrt-not": sqrt_not_gate,
    "x": pauli_x,
    "y": pauli_y,
    "z": pauli_z,
}


def compose(*gates: Gate) -> Gate:
    """Product ``G1 G2 ... Gk`` (the rightmost acts first)."""
    if not gates:
        raise ValueError("compose needs at least one gate")
    if len({g.n for g in gates}) != 1:
        raise ValueError("cannot compose gates of different arity")
    return Gate(reduce(np.matmul, (g.matrix for g in gates)), "".join(g.label for g in gates))


def tensor_gates(*gates: Gate) -> Gate:
    if not gates:
        raise ValueError("tensor_gates needs at least one gate")
    return Gate(reduce(np.kron, (g.matrix for g in gates)), "(x)".join(g.label for g in gates))


def twin_gate(g: Gate, perspective) -> Gate:
    """``G_T = T(n) G T(n)^dagger`` for a truth-perspective ``T``."""
    t = kron_power(perspective.matrix, g.n)
    return Gate(t @ g.matrix @ t.conj().T, f"{g.label}_T")


def apply(g: Gate, psi: Quregister) -> Quregister:
    if g.n != psi.n:
        raise ValueError(f"arity mismatch: gate on {g.n} qubits, register of {psi.n}")
    return Quregister(g.matrix @ psi.amplitudes)


def apply_to_qumix(g: Gate, rho: Qumix) -> Qumix:
    """The qumix gate ``rho -> G rho G^dagger``."""
    if g.n != rho.n:
        raise ValueError(f"arity mismatch: gate on {g.n} qubits, qumix of {rho.n}")
    return Qumix(g.matrix @ rho.matrix @ g.matrix.conj().T)

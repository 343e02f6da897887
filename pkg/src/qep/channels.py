"""
Quantum channels in Kraus form and as superoperator matrices.

A :class:`SuperOperator` on ``n`` qubits is stored as the ``4**n x 4**n``
matrix ``S`` with ``vec(E(A)) = S vec(A)``, where ``vec`` stacks rows, i.e. the
matrix units ``|j><k|`` are enumerated in row-major order.  In that
convention a Kraus operator ``E`` contributes ``E (x) conj(E)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import gates
from .config import check_qubits, tol
from .qcore import Qumix, _frozen, _qubits_for_dim, min_eigenvalue


def kraus_completeness(ops: Sequence[np.ndarray]) -> np.ndarray:
    """``sum_i E_i^dagger E_i``."""
    return sum(np.asarray(e).conj().T @ np.asarray(e) for e in ops)


def completeness_error(ops: Sequence[np.ndarray]) -> float:
    """Max-abs deviation of ``sum E^dagger E`` from the identity."""
    s = kraus_completeness(ops)
    return float(np.max(np.abs(s - np.eye(s.shape[0]))))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A channel ``A -> sum_i E_i A E_i^dagger``.

    With ``checked=False`` the completeness condition is not enforced, which
    lets the CLI load and report on malformed operator lists.
    """

    kraus_ops: tuple
    label: str = "channel"
    checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        ops = tuple(_frozen(e) for e in self.kraus_ops)
        if not ops:
            raise ValueError("a Kraus channel needs at least one operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"Kraus operators must be square, got shape {shape}")
        if any(e.shape != shape for e in ops):
            raise ValueError("Kraus operators have mismatched dimensions")
        check_qubits(_qubits_for_dim(shape[0]))
        object.__setattr__(self, "kraus_ops", ops)
        if self.checked and completeness_error(ops) > tol(None):
            raise ValueError(f"Kraus operators of {self.label!r} do not satisfy sum E^dagger E = I")

    @property
    def n(self) -> int:
        return _qubits_for_dim(self.kraus_ops[0].shape[0])

    @property
    def is_complete(self) -> bool:
        return completeness_error(self.kraus_ops) <= tol(None)

    def apply_matrix(self, a: np.ndarray) -> np.ndarray:
        """Apply to an arbitrary operator, without validating the output."""
        a = np.asarray(a, dtype=complex)
        return sum(e @ a @ e.conj().T for e in self.kraus_ops)

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return self.apply_matrix(a)


@dataclass(frozen=True, eq=False)
class SuperOperator:
    matrix: np.ndarray
    label: str = "superoperator"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"superoperator matrix must be square, got shape {m.shape}")
        d = int(round(np.sqrt(m.shape[0])))
        if d * d != m.shape[0]:
            raise ValueError(f"superoperator size {m.shape[0]} is not a square dimension")
        check_qubits(_qubits_for_dim(d))
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def dim(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))

    @property
    def n(self) -> int:
        return _qubits_for_dim(self.dim)

    def apply_matrix(self, a: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        return (self.matrix @ a.reshape(-1)).reshape(self.dim, self.dim)

    def __call__(self, a: np.ndarray) -> np.ndarray:
        return self.apply_matrix(a)


def matrix_unit(dim: int, j: int, k: int) -> np.ndarray:
    """``|j><k|``."""
    e = np.zeros((dim, dim), dtype=complex)
    e[j, k] = 1.0
    return e


def superoperator_from_map(fn: Callable[[np.ndarray], np.ndarray], n: int, label: str = "map") -> SuperOperator:
    """Tabulate a linear map on ``n``-qubit operators by its action on the matrix units."""
    check_qubits(n)
    d = 2**n
    cols = [np.asarray(fn(matrix_unit(d, j, k)), dtype=complex).reshape(-1) for j in range(d) for k in range(d)]
    return SuperOperator(np.column_stack(cols), label)


def kraus_to_superoperator(ch: KrausChannel) -> SuperOperator:
    s = sum(np.kron(e, e.conj()) for e in ch.kraus_ops)
    return SuperOperator(s, ch.label)


def identity_map(n: int = 1) -> SuperOperator:
    check_qubits(n)
    return SuperOperator(np.eye(4**n), "identity")


def transpose_map(n: int = 1) -> SuperOperator:
    """``A -> A^T``: positive and trace preserving, but not completely positive."""
    return superoperator_from_map(lambda a: a.T, n, "transpose")


def apply_channel(ch: KrausChannel, rho: Qumix) -> Qumix:
    if ch.n != rho.n:
        raise ValueError(f"arity mismatch: channel on {ch.n} qubits, qumix of {rho.n}")
    return Qumix(ch.apply_matrix(rho.matrix))


def is_trace_preserving(s: SuperOperator, atol: float | None = None) -> bool:
    """``Tr E(|j><k|) = delta_jk`` for every matrix unit."""
    d = s.dim
    eps = tol(atol)
    for j in range(d):
        for k in range(d):
            out = s.apply_matrix(matrix_unit(d, j, k))
            if abs(np.trace(out) - (1.0 if j == k else 0.0)) > eps:
                return False
    return True


def choi_matrix(s: SuperOperator) -> np.ndarray:
    """``sum_jk |j><k| (x) E(|j><k|)``, ancilla first."""
    d = s.dim
    return sum(np.kron(matrix_unit(d, j, k), s.apply_matrix(matrix_unit(d, j, k))) for j in range(d) for k in range(d))


def choi_spectrum(s: SuperOperator) -> np.ndarray:
    c = choi_matrix(s)
    return np.linalg.eigvalsh((c + c.conj().T) / 2)


def is_completely_positive(s: SuperOperator, atol: float | None = None) -> bool:
    c = choi_matrix(s)
    eps = tol(atol)
    if not np.allclose(c, c.conj().T, rtol=0, atol=eps):
        return False
    return min_eigenvalue(c) >= -eps


def depolarizing_kraus(p: float, perspective=None) -> list[np.ndarray]:
    """The four operators ``T E_i T^dagger`` of the depolarizing channel.

    ``E0 = sqrt(4-3p)/2 I``, ``E1..E3 = sqrt(p)/2`` times ``X, Y, Z``.
    """
    if not 0 <= p <= 1:
        raise ValueError(f"depolarizing strength must lie in [0, 1], got {p}")
    ops = [
        np.sqrt(4 - 3 * p) / 2 * np.eye(2, dtype=complex),
        np.sqrt(p) / 2 * gates.PAULI_X,
        np.sqrt(p) / 2 * gates.PAULI_Y,
        np.sqrt(p) / 2 * gates.PAULI_Z,
    ]
    if perspective is not None:
        t = perspective.matrix
        ops = [t @ e @ t.conj().T for e in ops]
    return ops


def depolarizing_channel(p: float, perspective=None) -> KrausChannel:
    """``pD(1)_T``; ``perspective=None`` means the canonical one."""
    label = f"depolarizing({p:g})"
    return KrausChannel(tuple(depolarizing_kraus(p, perspective)), label)


def unitary_channel(g: gates.Gate) -> KrausChannel:
    return KrausChannel((g.matrix,), g.label)

"""
Truth-perspectives and the probabilistic semantics built on them.

A truth-perspective is a 2x2 unitary ``T``; ``T|1>`` plays the role of Truth
and ``T|0>`` of Falsity.  A register is T-true when its last factor is
``T|1>``, which makes the T-truth projector ``I(n-1) (x) T P_{|1>} T^dagger``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gates
from .config import check_qubits, tol
from .qcore import (
    Quregister,
    Qumix,
    _frozen,
    as_qumix,
    fubini_study_distance,
    is_unitary,
    kron_power,
)

_P1 = np.array([[0, 0], [0, 1]], dtype=complex)
_P0 = np.array([[1, 0], [0, 0]], dtype=complex)


@dataclass(frozen=True, eq=False)
class TruthPerspective:
    matrix: np.ndarray
    label: str = "T"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"truth-perspective must be 2x2, got shape {m.shape}")
        if not is_unitary(m):
            raise ValueError(f"truth-perspective {self.label!r} is not unitary")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def truth(self) -> Quregister:
        """``|1_T> = T|1>``."""
        return Quregister(self.matrix[:, 1])

    @property
    def falsity(self) -> Quregister:
        """``|0_T> = T|0>``."""
        return Quregister(self.matrix[:, 0])

    def __eq__(self, other):
        # Operator equality, not equality up to a global phase.
        if not isinstance(other, TruthPerspective):
            return NotImplemented
        return bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=tol(None)))

    __hash__ = None

    def __repr__(self):
        return f"TruthPerspective({self.label!r})"


def identity() -> TruthPerspective:
    """The canonical truth-perspective."""
    return TruthPerspective(np.eye(2), "identity")


def hadamard() -> TruthPerspective:
    """The Bell perspective, whose Truth is ``(1/sqrt2, -1/sqrt2)``."""
    return TruthPerspective(gates.HADAMARD_1, "hadamard")


def sqrt_not() -> TruthPerspective:
    return TruthPerspective(gates.SQRT_NOT_1, "sqrt-not")


def negation() -> TruthPerspective:
    return TruthPerspective(gates.PAULI_X, "not")


PRESETS = {
    "identity": identity,
    "hadamard": hadamard,
    "sqrt-not": sqrt_not,
    "not": negation,
}


def extend(perspective: TruthPerspective, n: int) -> gates.Gate:
    """``T(n)|x1..xn> = T|x1> (x) ... (x) T|xn>``."""
    if n < 1:
        raise ValueError(f"extend needs n >= 1, got {n}")
    check_qubits(n)
    return gates.Gate(kron_power(perspective.matrix, n), f"{perspective.label}({n})")


def truth_projection(perspective: TruthPerspective, n: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """The T-truth and T-falsity projectors of ``H(n)`` as ``(P1, P0)``."""
    if n < 1:
        raise ValueError(f"truth_projection needs n >= 1, got {n}")
    check_qubits(n)
    t = perspective.matrix
    rest = np.eye(2 ** (n - 1))
    p1 = np.kron(rest, t @ _P1 @ t.conj().T)
    p0 = np.kron(rest, t @ _P0 @ t.conj().T)
    return p1, p0


def truth_qumix(perspective: TruthPerspective) -> Qumix:
    """``T P1(1)``, the T-Truth seen as a one-qubit qumix."""
    return Qumix(truth_projection(perspective, 1)[0])


def falsity_qumix(perspective: TruthPerspective, n: int = 1) -> Qumix:
    """The T-Falsity of ``H(n)`` normalized to unit trace.

    For ``n = 1`` this is the projector ``T P0(1)`` itself; for larger ``n``
    the projector has trace ``2**(n-1)`` and is divided by it.
    """
    p0 = truth_projection(perspective, n)[1]
    return Qumix(p0 / 2 ** (n - 1))


def probability(perspective: TruthPerspective, state) -> float:
    """``p_T(rho) = Tr(T P1(n) rho)``."""
    rho = as_qumix(state)
    p1, _ = truth_projection(perspective, rho.n)
    return float(np.real(np.einsum("ij,ji->", p1, rho.matrix)))


def preorder_leq(perspective: TruthPerspective, rho, sigma, atol: float | None = None) -> bool:
    """``rho <=_T sigma`` iff ``p_T(rho) <= p_T(sigma)`` (within eps)."""
    rho, sigma = as_qumix(rho), as_qumix(sigma)
    if rho.n != sigma.n:
        raise ValueError(f"dimension mismatch: {rho.n} vs {sigma.n} qubits")
    return probability(perspective, rho) <= probability(perspective, sigma) + tol(atol)


def epistemic_distance(t1: TruthPerspective, t2: TruthPerspective) -> float:
    """Fubini-Study distance between the two perspectives' Truth qubits."""
    return fubini_study_distance(t1.truth, t2.truth)

"""
Dense linear algebra on qubit tensor spaces.

Basis registers ``|x1,...,xn>`` are indexed by ``x1*2**(n-1) + ... + xn``, so
the last listed qubit (the one carrying the truth value) is the least
significant bit.  All values are immutable: the arrays held by
:class:`Quregister` and :class:`Qumix` are flagged read-only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

from .config import check_qubits, tol


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


def _qubits_for_dim(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two >= 2")
    return n


# --------------------------------------------------------------------------
# Matrix predicates
# --------------------------------------------------------------------------


def is_hermitian(m: np.ndarray, atol: float | None = None) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, rtol=0, atol=tol(atol))


def is_unitary(m: np.ndarray, atol: float | None = None) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0, atol=tol(atol))


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of ``m``."""
    m = np.asarray(m)
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])


def is_psd(m: np.ndarray, atol: float | None = None) -> bool:
    return is_hermitian(m, atol) and min_eigenvalue(m) >= -tol(atol)


def is_density_matrix(m: np.ndarray, atol: float | None = None) -> bool:
    """Hermitian, eigenvalues >= -eps and unit trace, all within eps."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return is_psd(m, atol) and bool(abs(np.trace(m) - 1) <= tol(atol))


def matrices_close(a, b, atol: float | None = None) -> bool:
    """Frobenius-norm distance below eps."""
    a, b = _as_matrix(a), _as_matrix(b)
    return a.shape == b.shape and float(np.linalg.norm(a - b)) < tol(atol)


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, Qumix):
        return x.matrix
    if isinstance(x, Quregister):
        return projector(x).matrix
    return np.asarray(x)


# --------------------------------------------------------------------------
# States
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Quregister:
    """A pure state: unit vector of ``(C^2)^{\\otimes n}``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        check_qubits(_qubits_for_dim(amps.size))
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > tol(None):
            raise ValueError(f"quregister must have unit norm, got {norm:.15g}")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @property
    def n(self) -> int:
        return _qubits_for_dim(self.amplitudes.size)

    @classmethod
    def basis(cls, *bits: int) -> "Quregister":
        """The canonical register ``|x1,...,xn>``; ``basis(0, 1)`` is ``|0,1>``."""
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError(f"basis register needs a nonempty bit sequence, got {bits!r}")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[basis_index(bits)] = 1.0
        return cls(amps)

    @classmethod
    def normalized(cls, amplitudes) -> "Quregister":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm)

    def inner(self, other: "Quregister") -> complex:
        """``<self|other>``."""
        if self.n != other.n:
            raise ValueError(f"qubit count mismatch: {self.n} vs {other.n}")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def equals_up_to_phase(self, other: "Quregister", atol: float | None = None) -> bool:
        return self.n == other.n and bool(abs(abs(self.inner(other)) - 1) <= tol(atol))

    def __repr__(self):
        return f"Quregister(n={self.n}, amplitudes={np.array2string(self.amplitudes, precision=4)})"


@dataclass(frozen=True, eq=False)
class Qumix:
    """A density operator on ``(C^2)^{\\otimes n}``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"qumix matrix must be square, got shape {m.shape}")
        check_qubits(_qubits_for_dim(m.shape[0]))
        if not is_hermitian(m):
            raise ValueError("qumix matrix is not Hermitian")
        if abs(np.trace(m) - 1) > tol(None):
            raise ValueError(f"qumix trace must be 1, got {np.trace(m).real:.15g}")
        lo = min_eigenvalue(m)
        if lo < -tol(None):
            raise ValueError(f"qumix matrix has negative eigenvalue {lo:.3g}")
        object.__setattr__(self, "matrix", _frozen(m))

    @property
    def n(self) -> int:
        return _qubits_for_dim(self.matrix.shape[0])

    @classmethod
    def maximally_mixed(cls, n: int = 1) -> "Qumix":
        """``(1/2**n) I``, the maximally uncertain information."""
        check_qubits(n)
        return cls(np.eye(2**n) / 2**n)

    def close_to(self, other, atol: float | None = None) -> bool:
        return matrices_close(self, other, atol)

    def __repr__(self):
        return f"Qumix(n={self.n}, matrix={np.array2string(self.matrix, precision=4)})"


def basis_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = 2 * idx + int(b)
    return idx


def index_bits(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> (n - 1 - k)) & 1 for k in range(n))


def as_qumix(state) -> Qumix:
    if isinstance(state, Qumix):
        return state
    if isinstance(state, Quregister):
        return projector(state)
    return Qumix(state)


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------


def tensor(*factors):
    """Kronecker product of quregisters or of qumixes, in the listed qubit order.

    Mixing a :class:`Quregister` with a :class:`Qumix` promotes the register
    to its projector.
    """
    if not factors:
        raise ValueError("tensor needs at least one factor")
    if all(isinstance(f, Quregister) for f in factors):
        return Quregister(reduce(np.kron, (f.amplitudes for f in factors)))
    mats = [as_qumix(f).matrix for f in factors]
    return Qumix(reduce(np.kron, mats))


def kron_power(m: np.ndarray, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"Kronecker power needs n >= 1, got {n}")
    return reduce(np.kron, [np.asarray(m, dtype=complex)] * n)


def partial_trace(matrix: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Trace out every qubit not in ``keep`` (0-based), returning the kept
    qubits in the listed order.  Works for any square ``2**n`` matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    n = _qubits_for_dim(matrix.shape[0])
    keep = list(keep)
    traced = [q for q in range(n) if q not in keep]
    m = len(keep)
    t = matrix.reshape((2,) * (2 * n))
    perm = keep + traced
    t = t.transpose(perm + [n + q for q in perm])
    t = t.reshape(2**m, 2 ** (n - m), 2**m, 2 ** (n - m))
    return np.einsum("aibi->ab", t)


def reduced_state(state, keep: Sequence[int]) -> Qumix:
    """``Red^{i1,...,im}``: the reduced state of the subsystem made of the
    qubits ``keep`` (1-based), in the listed order."""
    rho = as_qumix(state)
    keep = list(keep)
    if not keep:
        raise ValueError("keep must list at least one qubit")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate qubit index in {keep}")
    for i in keep:
        if not 1 <= i <= rho.n:
            raise ValueError(f"qubit index {i} out of range 1..{rho.n}")
    return Qumix(partial_trace(rho.matrix, [i - 1 for i in keep]))


def projector(psi: Quregister) -> Qumix:
    """``P_{|psi>} = |psi><psi|``."""
    v = psi.amplitudes
    return Qumix(np.outer(v, v.conj()))


def purity(state) -> float:
    """``Tr(rho^2)``."""
    m = as_qumix(state).matrix
    return float(np.real(np.einsum("ij,ji->", m, m)))


def is_proper_mixture(state, atol: float | None = None) -> bool:
    return purity(state) < 1 - tol(atol)


def fubini_study_distance(psi: Quregister, phi: Quregister) -> float:
    """``(2/pi) arccos |<psi|phi>|`` for two qubits, in ``[0, 1]``.

    Evaluated as ``(4/pi) atan2(|psi - w phi|, |psi + w phi|)`` with the phase
    ``w`` making the overlap real, which equals the arccos form but stays
    accurate for nearly equal states.
    """
    if psi.n != 1 or phi.n != 1:
        raise ValueError("Fubini-Study distance is defined here between single qubits")
    overlap = psi.inner(phi)
    mag = abs(overlap)
    w = overlap.conjugate() / mag if mag > 0 else 1.0
    u, v = psi.amplitudes, w * phi.amplitudes
    angle = 2 * np.arctan2(np.linalg.norm(u - v), np.linalg.norm(u + v))
    return float(np.clip(2 * angle / np.pi, 0.0, 1.0))


class Entanglement(str, enum.Enum):
    MAXIMALLY_ENTANGLED = "maximally_entangled"
    N_PARTITE_ENTANGLED = "n_partite_entangled"
    ENTANGLED_WRT_PARTS = "entangled_wrt_parts"
    NOT_ENTANGLED_WRT_PARTS = "not_entangled_wrt_parts"


def entanglement_class(psi: Quregister, parts: Iterable[int], atol: float | None = None) -> Entanglement:
    """Classify ``psi`` by the single-qubit reduced states of ``parts`` (1-based).

    The strongest applicable label is returned: maximal entanglement and
    n-partite entanglement need ``parts`` to cover every qubit.
    """
    parts = sorted(set(parts))
    if not parts:
        raise ValueError("parts must name at least one qubit")
    reds = [reduced_state(psi, [i]) for i in parts]
    if not all(is_proper_mixture(r, atol) for r in reds):
        return Entanglement.NOT_ENTANGLED_WRT_PARTS
    if parts != list(range(1, psi.n + 1)):
        return Entanglement.ENTANGLED_WRT_PARTS
    half = Qumix.maximally_mixed(1)
    if all(r.close_to(half, atol) for r in reds):
        return Entanglement.MAXIMALLY_ENTANGLED
    return Entanglement.N_PARTITE_ENTANGLED


# --------------------------------------------------------------------------
# Random sampling
# --------------------------------------------------------------------------


def random_quregister(n: int, rng: np.random.Generator) -> Quregister:
    """Haar-random pure state of ``n`` qubits."""
    check_qubits(n)
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return Quregister(v / np.linalg.norm(v))


def random_qumix(n: int, rng: np.random.Generator, components: int | None = None) -> Qumix:
    """Dirichlet-weighted mixture of Haar-random pure states.

    ``components`` defaults to a uniform draw from ``1..2**n + 1``, so that
    pure states, rank-deficient and full-rank mixtures all appear.
    """
    check_qubits(n)
    k = components if components is not None else int(rng.integers(1, 2**n + 2))
    weights = rng.dirichlet(np.ones(k))
    m = sum(w * projector(random_quregister(n, rng)).matrix for w in weights)
    m = (m + m.conj().T) / 2
    return Qumix(m / np.trace(m).real)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``dim x dim`` unitary."""
    return np.asarray(unitary_group.rvs(dim, random_state=rng), dtype=complex)

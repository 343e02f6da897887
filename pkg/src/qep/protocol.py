"""
Memorizing and retrieving one qubit through teleportation.

Qubits ``S1, S2`` form the external memory and ``S3`` the internal one.
Starting from ``Bell (x) q``, a SWAP of ``S1`` and ``S3`` parks ``q`` in the
external memory (the internal memory becomes ``I/2``), then the usual
teleportation steps bring it back: ``XOR(1,1) (x) I``, Hadamard on ``S1``, a
measurement of ``S1 S2`` (all four outcomes enumerated) and the correction
ordered for that outcome.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import gates
from .config import tol
from .qcore import Quregister, Qumix, projector, reduced_state, tensor

STEPS = ("t1", "t2", "t3", "t4", "t5", "t6")
OUTCOMES = ("00", "01", "10", "11")

CORRECTIONS: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "NOT": gates.PAULI_X,
    "Z": gates.PAULI_Z,
    # NOT Z: Z acts first
    "NOT*Z": gates.PAULI_X @ gates.PAULI_Z,
}

ORDERS: dict[str, str] = {"00": "I", "01": "NOT", "10": "Z", "11": "NOT*Z"}

BELL = Quregister(np.array([1, 0, 0, 1]) / np.sqrt(2))


@dataclass(frozen=True, eq=False)
class Branch:
    outcome: str
    probability: float
    state_t5: Quregister
    order: str
    state_t6: Quregister

    @property
    def internal_before(self) -> Qumix:
        return reduced_state(self.state_t5, [3])

    @property
    def internal_after(self) -> Qumix:
        return reduced_state(self.state_t6, [3])


@dataclass(frozen=True, eq=False)
class ProtocolTrace:
    a0: complex
    a1: complex
    states: Mapping[str, Quregister]
    branches: tuple

    @property
    def input_qubit(self) -> Quregister:
        return Quregister([self.a0, self.a1])

    def branch(self, outcome: str) -> Branch:
        for b in self.branches:
            if b.outcome == outcome:
                return b
        raise KeyError(f"no branch for outcome {outcome!r}")

    def global_state(self, step: str, outcome: str | None = None) -> Quregister:
        if step in ("t5", "t6"):
            if outcome is None:
                raise ValueError(f"step {step} needs a measurement outcome")
            b = self.branch(outcome)
            return b.state_t5 if step == "t5" else b.state_t6
        if step not in self.states:
            raise KeyError(f"unknown step {step!r}")
        return self.states[step]


def _measure(outcome: str, psi: Quregister) -> tuple[float, Quregister]:
    x, y = int(outcome[0]), int(outcome[1])
    p2 = projector(Quregister.basis(x, y)).matrix
    collapsed = np.kron(p2, np.eye(2)) @ psi.amplitudes
    prob = float(np.vdot(collapsed, collapsed).real)
    if prob <= tol(None):
        raise ValueError(f"outcome {outcome} has zero probability")
    return prob, Quregister(collapsed / np.sqrt(prob))


def run_protocol(a0: complex, a1: complex, orders: Mapping[str, str] | None = None) -> ProtocolTrace:
    """Run all six steps for the qubit ``a0|0> + a1|1>``.

    ``orders`` maps outcomes to correction labels (keys of
    :data:`CORRECTIONS`); it defaults to :data:`ORDERS` and exists so that
    wrong corrections can be exercised.
    """
    a0, a1 = complex(a0), complex(a1)
    norm2 = abs(a0) ** 2 + abs(a1) ** 2
    if abs(norm2 - 1) > tol(None):
        raise ValueError(f"input qubit is not normalized: |a0|^2 + |a1|^2 = {norm2:.15g}")
    orders = dict(ORDERS if orders is None else orders)
    q = Quregister([a0, a1])

    states = {"t1": tensor(BELL, q)}
    states["t2"] = gates.apply(gates.swap_gate(3, 1, 3), states["t1"])
    states["t3"] = gates.apply(gates.tensor_gates(gates.xor_gate(1, 1), gates.identity_gate(1)), states["t2"])
    h1 = gates.tensor_gates(gates.hadamard_gate(1), gates.identity_gate(1), gates.identity_gate(1))
    states["t4"] = gates.apply(h1, states["t3"])

    branches = []
    for outcome in OUTCOMES:
        prob, post = _measure(outcome, states["t4"])
        order = orders[outcome]
        fix = np.kron(np.eye(4), CORRECTIONS[order])
        branches.append(Branch(outcome, prob, post, order, Quregister(fix @ post.amplitudes)))
    return ProtocolTrace(a0, a1, states, tuple(branches))


def sample_branch(trace: ProtocolTrace, rng: np.random.Generator) -> Branch:
    """Pick one measurement outcome with its Born probability."""
    probs = np.array([b.probability for b in trace.branches])
    return trace.branches[int(rng.choice(len(probs), p=probs / probs.sum()))]


@dataclass(frozen=True, eq=False)
class MemoryView:
    internal: Qumix
    external: tuple

    @property
    def internal_memory(self) -> tuple:
        return (self.internal,)


def memory_views(trace: ProtocolTrace, step: str, outcome: str | None = None) -> MemoryView:
    """Internal memory ``Red^3`` and external memory ``(Red^1, Red^2, Red^{1,2})`` at ``step``."""
    psi = trace.global_state(step, outcome)
    return MemoryView(
        internal=reduced_state(psi, [3]),
        external=(reduced_state(psi, [1]), reduced_state(psi, [2]), reduced_state(psi, [1, 2])),
    )


def end_to_end_identity_check(trace: ProtocolTrace, atol: float | None = None) -> bool:
    """Every branch ends with the internal memory it started from (as density operators)."""
    if {b.outcome for b in trace.branches} != set(OUTCOMES) or "t1" not in trace.states:
        raise ValueError("incomplete protocol trace")
    start = reduced_state(trace.states["t1"], [3])
    return all(b.internal_after.close_to(start, atol) for b in trace.branches)

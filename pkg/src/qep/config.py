"""Process-wide numerical settings: comparison tolerance and the qubit cap."""

import contextlib
import contextvars
import os

DEFAULT_EPSILON = 1e-9
DEFAULT_MAX_QUBITS = 10

_epsilon = contextvars.ContextVar("qep_epsilon", default=DEFAULT_EPSILON)


def get_epsilon() -> float:
    return _epsilon.get()


def tol(atol: float | None) -> float:
    """Resolve an optional explicit tolerance against the active one."""
    return get_epsilon() if atol is None else float(atol)


@contextlib.contextmanager
def epsilon(value: float):
    """Temporarily change the tolerance used by all equality / PSD / unitarity checks."""
    if not value > 0:
        raise ValueError(f"epsilon must be positive, got {value}")
    token = _epsilon.set(float(value))
    try:
        yield value
    finally:
        _epsilon.reset(token)


def max_qubits() -> int:
    """Qubit cap for dense storage; overridable through ``QEP_MAX_QUBITS``."""
    raw = os.environ.get("QEP_MAX_QUBITS")
    if raw is None:
        return DEFAULT_MAX_QUBITS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"QEP_MAX_QUBITS must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"QEP_MAX_QUBITS must be >= 1, got {value}")
    return value


def check_qubits(n: int) -> int:
    if n < 1:
        raise ValueError(f"qubit count must be >= 1, got {n}")
    cap = max_qubits()
    if n > cap:
        raise ValueError(f"{n} qubits exceeds the configured cap of {cap} (QEP_MAX_QUBITS)")
    return n

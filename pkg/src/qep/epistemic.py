"""
Epistemic situations and epistemic quantum computational structures.

An agent at a time carries a truth-perspective, a finite epistemic domain of
qumixes, an understanding operation ``U`` and a knowledge operation ``K``.
Outside the domain both operations collapse to a fixed fallback qumix.  The
operations here are configured, never assumed lawful: :func:`verify_situation`
checks the axioms on the domain and on random samples and reports every
violation with its witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import truthspace
from .channels import KrausChannel, depolarizing_channel, unitary_channel
from .config import tol
from .gates import Gate
from .qcore import Qumix, as_qumix, is_density_matrix, matrices_close, random_qumix
from .truthspace import TruthPerspective, probability

HALF_IDENTITY = "half-identity"
T_FALSITY = "t-falsity"


# --------------------------------------------------------------------------
# Operations and domains
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EpistemicOperation:
    """A map on operators of ``H(n)``; ``arity=None`` means it acts on every ``n``."""

    fn: Callable[[np.ndarray], np.ndarray]
    label: str
    arity: int | None = None

    def __call__(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=complex)
        if self.arity is not None and matrix.shape[0] != 2**self.arity:
            raise ValueError(
                f"operation {self.label!r} acts on {self.arity} qubit(s), got a {matrix.shape[0]}-dimensional operator"
            )
        return np.asarray(self.fn(matrix), dtype=complex)


def identity_operation() -> EpistemicOperation:
    return EpistemicOperation(lambda m: m.copy(), "identity")


def channel_operation(ch: KrausChannel) -> EpistemicOperation:
    return EpistemicOperation(ch.apply_matrix, ch.label, ch.n)


def gate_operation(g: Gate) -> EpistemicOperation:
    return channel_operation(unitary_channel(g))


@dataclass(frozen=True, eq=False)
class EpistemicDomain:
    """A finite set of qumixes, optionally flagged as the set of *all* qumixes.

    Membership is Frobenius distance below eps to a listed element.  The
    ``everything`` flag makes every qumix a member; listed members are then
    the ones enumerated by :func:`act_mem` and friends.
    """

    members: tuple = ()
    everything: bool = False

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(as_qumix(m) for m in self.members))

    def of_arity(self, n: int) -> tuple:
        return tuple(m for m in self.members if m.n == n)

    @property
    def arities(self) -> set[int]:
        return {m.n for m in self.members}

    def contains(self, rho, atol: float | None = None) -> bool:
        rho = as_qumix(rho)
        if self.everything:
            return True
        return any(matrices_close(rho, m, atol) for m in self.of_arity(rho.n))

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True, eq=False)
class EpistemicSituation:
    """``(T, EpD, U, K)`` plus the fallback ``rho0`` used outside the domain.

    ``fallback`` is ``"half-identity"`` (``I/2**n``), ``"t-falsity"`` (the
    normalized T-Falsity of ``H(n)``) or an explicit ``{n: Qumix}`` mapping.
    ``domain_constraint``, when set, is an admissibility predicate every
    domain member must satisfy (see :func:`depolarizing_knowledge_op`).
    """

    truth_perspective: TruthPerspective
    domain: EpistemicDomain
    understanding: EpistemicOperation = field(default_factory=identity_operation)
    knowledge: EpistemicOperation = field(default_factory=identity_operation)
    fallback: str | Mapping[int, Qumix] = HALF_IDENTITY
    domain_constraint: Callable[[Qumix], bool] | None = None

    def __post_init__(self):
        if isinstance(self.fallback, str) and self.fallback not in (HALF_IDENTITY, T_FALSITY):
            raise ValueError(f"unknown fallback {self.fallback!r}")

    def fallback_for(self, n: int) -> Qumix:
        if self.fallback == HALF_IDENTITY:
            return Qumix.maximally_mixed(n)
        if self.fallback == T_FALSITY:
            return truthspace.falsity_qumix(self.truth_perspective, n)
        try:
            return self.fallback[n]
        except KeyError:
            raise LookupError(f"no fallback qumix configured for {n} qubit(s)") from None

    @property
    def arities(self) -> set[int]:
        ns = set(self.domain.arities)
        for op in (self.understanding, self.knowledge):
            if op.arity is not None:
                ns.add(op.arity)
        return ns or {1}

    def _apply(self, op: EpistemicOperation, rho: Qumix) -> np.ndarray:
        if self.domain.contains(rho):
            return op(rho.matrix)
        return self.fallback_for(rho.n).matrix


def understand(sit: EpistemicSituation, rho) -> Qumix:
    """``U rho``: the understanding operation inside the domain, ``rho0`` outside."""
    return Qumix(sit._apply(sit.understanding, as_qumix(rho)))


def know(sit: EpistemicSituation, rho) -> Qumix:
    """``K rho``: the knowledge operation inside the domain, ``rho0`` outside."""
    return Qumix(sit._apply(sit.knowledge, as_qumix(rho)))


# --------------------------------------------------------------------------
# Axiom verification
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Violation:
    condition: str
    witness: Qumix
    detail: str


@dataclass(frozen=True, eq=False)
class SituationReport:
    violations: tuple
    checks: Mapping[str, int]

    @property
    def passed(self) -> bool:
        return not self.violations

    def of_condition(self, condition: str) -> tuple:
        return tuple(v for v in self.violations if v.condition == condition)


def _p(sit: EpistemicSituation, m: np.ndarray) -> float:
    return probability(sit.truth_perspective, Qumix(m))


def verify_situation(
    sit: EpistemicSituation,
    sample_count: int = 200,
    seed: int | np.random.Generator = 0,
    atol: float | None = None,
) -> SituationReport:
    """Check conditions 3.1-4.4 (and the domain constraint, when present).

    * 3.1 / 4.1: ``U`` and ``K`` yield qumixes, on every domain member and on
      ``sample_count`` random qumixes per arity.
    * 3.2 / 4.2: on random qumixes outside the domain, ``U`` and ``K`` return
      the fallback.
    * 4.3: ``K rho <=_T rho``; 4.4: ``K rho <=_T U rho``, on every domain member
      (on the random samples too when the domain is everything).

    Violations are collected, never raised; the result depends only on the
    situation and ``seed``.
    """
    if sample_count < 1:
        raise ValueError(f"sample_count must be >= 1, got {sample_count}")
    eps = tol(atol)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    violations: list[Violation] = []
    checks = {c: 0 for c in ("3.1", "3.2", "4.1", "4.2", "4.3", "4.4")}
    if sit.domain_constraint is not None:
        checks["domain"] = 0

    samples = [random_qumix(n, rng) for n in sorted(sit.arities) for _ in range(sample_count)]
    members = list(sit.domain.members)

    def outputs(rho: Qumix):
        res = {}
        for cond, op in (("3.1", sit.understanding), ("4.1", sit.knowledge)):
            checks[cond] += 1
            try:
                out = sit._apply(op, rho)
            except (ValueError, LookupError) as exc:
                violations.append(Violation(cond, rho, f"operation failed: {exc}"))
                continue
            if not is_density_matrix(out, eps):
                violations.append(Violation(cond, rho, "output is not a qumix"))
                continue
            res[cond] = out
        return res

    def order_checks(rho: Qumix, res):
        if "4.1" not in res:
            return
        pk = _p(sit, res["4.1"])
        checks["4.3"] += 1
        pr = probability(sit.truth_perspective, rho)
        if pk > pr + eps:
            violations.append(Violation("4.3", rho, f"p_T(K rho) = {pk:.12g} > p_T(rho) = {pr:.12g}"))
        if "3.1" in res:
            checks["4.4"] += 1
            pu = _p(sit, res["3.1"])
            if pk > pu + eps:
                violations.append(Violation("4.4", rho, f"p_T(K rho) = {pk:.12g} > p_T(U rho) = {pu:.12g}"))

    for rho in members:
        if sit.domain_constraint is not None:
            checks["domain"] += 1
            if not sit.domain_constraint(rho):
                violations.append(Violation("domain", rho, "domain member violates the operation's domain constraint"))
        order_checks(rho, outputs(rho))

    for rho in samples:
        res = outputs(rho)
        if sit.domain.contains(rho, eps):
            if sit.domain.everything:
                order_checks(rho, res)
            continue
        for cond, src in (("3.2", "3.1"), ("4.2", "4.1")):
            if src not in res:
                continue
            checks[cond] += 1
            try:
                rho0 = sit.fallback_for(rho.n)
            except LookupError as exc:
                violations.append(Violation(cond, rho, str(exc)))
                continue
            if not matrices_close(res[src], rho0, eps):
                violations.append(Violation(cond, rho, "output outside the domain differs from the fallback"))

    return SituationReport(tuple(violations), checks)


def act_mem(sit: EpistemicSituation, atol: float | None = None) -> tuple:
    """Listed domain members whose understood image is T-true with certainty."""
    eps = tol(atol)
    return tuple(r for r in sit.domain if abs(probability(sit.truth_perspective, understand(sit, r)) - 1) <= eps)


def act_knowl(sit: EpistemicSituation, atol: float | None = None) -> tuple:
    """Listed domain members whose known image is T-true with certainty."""
    eps = tol(atol)
    return tuple(r for r in sit.domain if abs(probability(sit.truth_perspective, know(sit, r)) - 1) <= eps)


def known_implies_true(sit: EpistemicSituation, atol: float | None = None) -> bool:
    """``p_T(K rho) = 1  =>  p_T(rho) = 1`` on every listed domain member."""
    eps = tol(atol)
    return all(abs(probability(sit.truth_perspective, r) - 1) <= eps for r in act_knowl(sit, atol))


def is_non_trivial(sit: EpistemicSituation, atol: float | None = None) -> bool:
    """Some listed member has ``p_T(K rho) < p_T(rho)``."""
    eps = tol(atol)
    t = sit.truth_perspective
    return any(probability(t, know(sit, r)) < probability(t, r) - eps for r in sit.domain)


# --------------------------------------------------------------------------
# Depolarizing knowledge operation
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KnowledgeOperation:
    operation: EpistemicOperation
    admissible: Callable[[Qumix], bool]


def depolarizing_knowledge_op(p: float, perspective: TruthPerspective, atol: float | None = None) -> KnowledgeOperation:
    """``pKD(1)``: the canonical depolarizing channel, admissible on qumixes
    with ``p_T(rho) >= 1/2``."""
    ch = depolarizing_channel(p)
    eps = tol(atol)
    op = EpistemicOperation(ch.apply_matrix, f"KD({p:g})", 1)

    def admissible(rho) -> bool:
        rho = as_qumix(rho)
        return rho.n == 1 and probability(perspective, rho) >= 0.5 - eps

    return KnowledgeOperation(op, admissible)


def depolarizing_situation(
    p: float,
    perspective: TruthPerspective,
    domain: Iterable,
    fallback: str | Mapping[int, Qumix] = HALF_IDENTITY,
) -> EpistemicSituation:
    """A situation with ``K = pKD(1)``, ``U`` the identity and the KD domain constraint."""
    kd = depolarizing_knowledge_op(p, perspective)
    return EpistemicSituation(
        truth_perspective=perspective,
        domain=EpistemicDomain(tuple(domain)),
        understanding=identity_operation(),
        knowledge=kd.operation,
        fallback=fallback,
        domain_constraint=kd.admissible,
    )


# --------------------------------------------------------------------------
# Structures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeSequence:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        if not labels:
            raise ValueError("a time sequence needs at least one time")
        if len(set(labels)) != len(labels):
            raise ValueError(f"time labels must be distinct, got {labels}")
        object.__setattr__(self, "labels", labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown time {label!r}") from None

    def at_or_after(self, label) -> tuple:
        return self.labels[self.index(label) :]

    def __iter__(self):
        return iter(self.labels)

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class EpistemicStructure:
    """``(T, Ag, EpSit)`` with ``situations[(agent, time)]`` defined for every pair."""

    times: TimeSequence
    agents: tuple
    situations: Mapping[tuple, EpistemicSituation]

    def __post_init__(self):
        if not isinstance(self.times, TimeSequence):
            object.__setattr__(self, "times", TimeSequence(tuple(self.times)))
        agents = tuple(self.agents)
        if not agents:
            raise ValueError("a structure needs at least one agent")
        if len(set(agents)) != len(agents):
            raise ValueError(f"agent identifiers must be distinct, got {agents}")
        object.__setattr__(self, "agents", agents)
        sits = dict(self.situations)
        missing = [(a, t) for a in agents for t in self.times if (a, t) not in sits]
        if missing:
            raise ValueError(f"no epistemic situation for {missing[0][0]!r} at {missing[0][1]!r}")
        extra = [k for k in sits if k[0] not in agents or k[1] not in self.times.labels]
        if extra:
            raise ValueError(f"situation for undeclared agent/time {extra[0]!r}")
        object.__setattr__(self, "situations", sits)

    def situation(self, agent: Hashable, time: Hashable) -> EpistemicSituation:
        return self.situations[(agent, time)]

    def keys(self):
        """``(agent, time)`` pairs in declaration order."""
        return [(a, t) for a in self.agents for t in self.times]


@dataclass(frozen=True)
class AgentCapacity:
    sound: bool
    perfect: bool
    maximal: bool


@dataclass(frozen=True)
class StructureClass:
    harmonic: bool
    sound: bool
    perfect: bool
    maximal: bool
    agents: Mapping[Hashable, AgentCapacity]
    maximal_note: str = (
        "maximal capacity quantifies over all qumixes; it is reported as perfect capacity on an "
        "epistemic domain declared 'all', with perfection on that domain checked by random sampling"
    )


def _fixes(sit: EpistemicSituation, rho: Qumix, eps: float) -> bool:
    try:
        return matrices_close(sit._apply(sit.knowledge, rho), rho.matrix, eps)
    except (ValueError, LookupError):
        return False


def _sound(sit: EpistemicSituation, eps: float) -> bool:
    t = sit.truth_perspective
    for q in (truthspace.truth_qumix(t), truthspace.falsity_qumix(t, 1)):
        if not sit.domain.contains(q, eps) or not _fixes(sit, q, eps):
            return False
    return True


def _perfect(sit: EpistemicSituation, rng: np.random.Generator, samples: int, eps: float) -> bool:
    if not all(_fixes(sit, r, eps) for r in sit.domain):
        return False
    if sit.domain.everything:
        probes = [random_qumix(n, rng) for n in sorted(sit.arities) for _ in range(samples)]
        return all(_fixes(sit, r, eps) for r in probes)
    return True


def classify_structure(
    s: EpistemicStructure,
    samples: int = 200,
    seed: int | np.random.Generator = 0,
    atol: float | None = None,
) -> StructureClass:
    """Harmonic / sound / perfect / maximal flags, structure-wide and per agent."""
    eps = tol(atol)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    keys = s.keys()
    first = s.situation(*keys[0]).truth_perspective
    harmonic = all(
        np.allclose(s.situation(*k).truth_perspective.matrix, first.matrix, rtol=0, atol=eps) for k in keys
    )
    per_agent = {}
    for a in s.agents:
        sits = [s.situation(a, t) for t in s.times]
        sound = all(_sound(x, eps) for x in sits)
        perfect = all(_perfect(x, rng, samples, eps) for x in sits)
        maximal = perfect and all(x.domain.everything for x in sits)
        per_agent[a] = AgentCapacity(sound, perfect, maximal)
    caps = per_agent.values()
    return StructureClass(
        harmonic=harmonic,
        sound=all(c.sound for c in caps),
        perfect=all(c.perfect for c in caps),
        maximal=all(c.maximal for c in caps),
        agents=per_agent,
    )


@dataclass(frozen=True)
class InteractionMap:
    """``Int``: for each time, the ordered pairs of agents interacting then."""

    pairs: Mapping[Hashable, tuple]

    def __post_init__(self):
        object.__setattr__(
            self, "pairs", {t: tuple(tuple(p) for p in ps) for t, ps in dict(self.pairs).items()}
        )

    def validate(self, s: EpistemicStructure) -> None:
        for t, ps in self.pairs.items():
            if t not in s.times.labels:
                raise ValueError(f"interaction at undeclared time {t!r}")
            for pair in ps:
                if len(pair) != 2:
                    raise ValueError(f"interaction {pair!r} at {t!r} is not a pair")
                for a in pair:
                    if a not in s.agents:
                        raise ValueError(f"interaction at {t!r} names undeclared agent {a!r}")


@dataclass(frozen=True, eq=False)
class InteractionResult:
    time: Hashable
    pair: tuple
    satisfied: bool
    witness: Qumix | None = None
    witness_time: Hashable | None = None
    direction: str | None = None


def _shared(first: Sequence[Qumix], second: Sequence[Qumix], eps: float) -> Qumix | None:
    for r in first:
        if any(matrices_close(r, q, eps) for q in second):
            return r
    return None


def verify_interactions(
    s: EpistemicStructure, ints: InteractionMap, atol: float | None = None
) -> tuple[InteractionResult, ...]:
    """For each ``(a, b)`` in ``Int(t)``, look for ``t' >= t`` and a qumix in
    ``ActMem(a_t)`` and ``ActMem(b_t')``, or in ``ActMem(b_t)`` and ``ActMem(a_t')``.

    Results follow time order, then the listed pair order.
    """
    ints.validate(s)
    eps = tol(atol)
    mem = {k: act_mem(s.situation(*k), eps) for k in s.keys()}
    results = []
    for t in s.times:
        for a, b in ints.pairs.get(t, ()):
            found = None
            for t2 in s.times.at_or_after(t):
                for src, dst, label in ((a, b, f"{a}->{b}"), (b, a, f"{b}->{a}")):
                    w = _shared(mem[(src, t)], mem[(dst, t2)], eps)
                    if w is not None:
                        found = InteractionResult(t, (a, b), True, w, t2, label)
                        break
                if found:
                    break
            results.append(found or InteractionResult(t, (a, b), False))
    return tuple(results)

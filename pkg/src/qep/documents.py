"""
Structure and channel documents.

Both are YAML files with a leading ``format_version: 1``.  Complex numbers are
written as ``[re, im]`` pairs (a bare real number is also accepted), vectors as
lists of complex numbers and matrices as lists of rows.  A structure document
looks like::

    format_version: 1
    times: [t1, t2]
    agents: [alice, bob]
    defaults:
      truth_perspective: identity
      fallback: half-identity
    situations:
      - agent: [alice, bob]
        time: t1
        domain: [truth, falsity, {state: [[0.6, 0], [0.8, 0]]}]
        understanding: identity
        knowledge: {depolarizing_kd: 0.5}
      - agent: [alice, bob]
        time: t2
        domain: all
    interactions:
      t1: [[alice, bob]]

A channel document holds one ``channel`` mapping with ``kraus: [M, ...]``,
``depolarizing: p`` (plus an optional ``perspective``) or
``superoperator: transpose | identity | {matrix: S}`` with ``qubits: n``.

Every problem is raised as :class:`DocumentError` carrying a line and column.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import channels, gates, truthspace
from .epistemic import (
    EpistemicDomain,
    EpistemicSituation,
    EpistemicStructure,
    InteractionMap,
    TimeSequence,
    channel_operation,
    depolarizing_knowledge_op,
    gate_operation,
    identity_operation,
)
from .qcore import Quregister, Qumix, projector

FORMAT_VERSION = 1


class DocumentError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str = "<document>"):
        self.message, self.line, self.column, self.source = message, line, column, source
        where = f"{source}:{line}:{column}" if line is not None else source
        super().__init__(f"{where}: {message}")


class _Mark:
    def __init__(self, mark):
        self.line = mark.line + 1
        self.column = mark.column + 1


class MarkedDict(dict):
    mark: _Mark
    key_marks: dict


class MarkedList(list):
    mark: _Mark
    item_marks: list


class _Loader(yaml.SafeLoader):
    pass


def _construct_mapping(loader, node):
    d = MarkedDict()
    d.mark = _Mark(node.start_mark)
    d.key_marks = {}
    for key_node, value_node in node.value:
        key = loader.construct_object(key_node, deep=True)
        if key in d:
            m = _Mark(key_node.start_mark)
            raise DocumentError(f"duplicate key {key!r}", m.line, m.column)
        d[key] = loader.construct_object(value_node, deep=True)
        d.key_marks[key] = _Mark(value_node.start_mark)
    return d


def _construct_sequence(loader, node):
    lst = MarkedList(loader.construct_object(child, deep=True) for child in node.value)
    lst.mark = _Mark(node.start_mark)
    lst.item_marks = [_Mark(child.start_mark) for child in node.value]
    return lst


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_mapping)
_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_SEQUENCE_TAG, _construct_sequence)


class _Reader:
    """Conversion helpers that attach positions to every error."""

    def __init__(self, source: str):
        self.source = source

    def fail(self, message, mark=None):
        if mark is None:
            raise DocumentError(message, source=self.source)
        raise DocumentError(message, mark.line, mark.column, self.source)

    @staticmethod
    def mark_of(parent, key):
        if isinstance(parent, MarkedDict):
            return parent.key_marks.get(key, parent.mark)
        if isinstance(parent, MarkedList):
            return parent.item_marks[key]
        return None

    def get(self, mapping, key, kind=None, default=...):
        if key not in mapping:
            if default is ...:
                self.fail(f"missing required key {key!r}", getattr(mapping, "mark", None))
            return default
        value = mapping[key]
        if kind is not None and not isinstance(value, kind):
            names = kind.__name__ if isinstance(kind, type) else " or ".join(k.__name__ for k in kind)
            self.fail(f"{key!r} must be a {names}", self.mark_of(mapping, key))
        return value

    def complex_number(self, value, mark) -> complex:
        if isinstance(value, bool):
            self.fail("expected a number or an [re, im] pair", mark)
        if isinstance(value, (int, float)):
            return complex(value)
        if isinstance(value, list) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            return complex(value[0], value[1])
        self.fail("expected a number or an [re, im] pair", mark)

    def vector(self, value, mark) -> np.ndarray:
        if not isinstance(value, list) or not value:
            self.fail("expected a nonempty list of complex numbers", mark)
        return np.array(
            [self.complex_number(v, self.mark_of(value, i)) for i, v in enumerate(value)], dtype=complex
        )

    def matrix(self, value, mark) -> np.ndarray:
        if not isinstance(value, list) or not value:
            self.fail("expected a matrix given as a list of rows", mark)
        rows = [self.vector(r, self.mark_of(value, i)) for i, r in enumerate(value)]
        if len({len(r) for r in rows}) != 1:
            self.fail("matrix rows have different lengths", mark)
        return np.array(rows)

    def build(self, factory, mark, *args):
        try:
            return factory(*args)
        except DocumentError:
            raise
        except (ValueError, LookupError) as exc:
            self.fail(str(exc), mark)


def _parse_yaml(text: str, source: str):
    try:
        doc = yaml.load(text, Loader=_Loader)
    except DocumentError as exc:
        raise DocumentError(exc.message, exc.line, exc.column, source) from None
    except yaml.MarkedYAMLError as exc:
        m = exc.problem_mark or exc.context_mark
        line, col = (m.line + 1, m.column + 1) if m is not None else (None, None)
        raise DocumentError(f"malformed document: {exc.problem or exc}", line, col, source) from None
    except yaml.YAMLError as exc:
        raise DocumentError(f"malformed document: {exc}", source=source) from None
    r = _Reader(source)
    if not isinstance(doc, MarkedDict):
        r.fail("document must be a mapping", getattr(doc, "mark", _Mark(yaml.Mark("", 0, 0, 0, None, None))))
    version = r.get(doc, "format_version", int)
    if version != FORMAT_VERSION:
        r.fail(f"unsupported format_version {version}; expected {FORMAT_VERSION}", r.mark_of(doc, "format_version"))
    return doc, r


def _read_source(document: str | Path) -> tuple[str, str]:
    if isinstance(document, Path) or (isinstance(document, str) and "\n" not in document and Path(document).is_file()):
        path = Path(document)
        return path.read_text(encoding="utf-8"), str(path)
    return str(document), "<document>"


# --------------------------------------------------------------------------
# Structure documents
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StructureDocument:
    structure: EpistemicStructure
    interactions: InteractionMap | None
    source: str


def _perspective(r: _Reader, value, mark) -> truthspace.TruthPerspective:
    if isinstance(value, str):
        if value not in truthspace.PRESETS:
            r.fail(f"unknown truth-perspective preset {value!r}; expected one of {sorted(truthspace.PRESETS)}", mark)
        return truthspace.PRESETS[value]()
    if isinstance(value, MarkedDict) and "matrix" in value:
        m = r.matrix(value["matrix"], r.mark_of(value, "matrix"))
        return r.build(truthspace.TruthPerspective, mark, m, str(value.get("label", "custom")))
    if isinstance(value, list):
        return r.build(truthspace.TruthPerspective, mark, r.matrix(value, mark), "custom")
    r.fail("truth_perspective must be a preset name or {matrix: [[..], [..]]}", mark)


def _operation(r: _Reader, value, mark, perspective, role: str):
    """Returns ``(operation, domain_constraint)``."""
    if value == "identity":
        return identity_operation(), None
    if not isinstance(value, MarkedDict) or len(value) != 1:
        r.fail(
            f"{role} must be 'identity' or a single-key mapping: depolarizing, depolarizing_kd, gate or kraus",
            mark,
        )
    (kind, arg), = value.items()
    amark = r.mark_of(value, kind)
    if kind == "depolarizing":
        p = _probability(r, arg, amark)
        return channel_operation(r.build(channels.depolarizing_channel, amark, p)), None
    if kind == "depolarizing_kd":
        p = _probability(r, arg, amark)
        kd = r.build(depolarizing_knowledge_op, amark, p, perspective)
        return kd.operation, kd.admissible
    if kind == "gate":
        if arg not in gates.NAMED_GATES:
            r.fail(f"unknown gate {arg!r}; expected one of {sorted(gates.NAMED_GATES)}", amark)
        return gate_operation(gates.NAMED_GATES[arg]()), None
    if kind == "kraus":
        if not isinstance(arg, list) or not arg:
            r.fail("kraus must be a nonempty list of matrices", amark)
        ops = [r.matrix(m, r.mark_of(arg, i)) for i, m in enumerate(arg)]
        return channel_operation(r.build(channels.KrausChannel, amark, tuple(ops), "kraus")), None
    r.fail(f"unknown {role} kind {kind!r}", amark)


def _probability(r: _Reader, value, mark) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        r.fail("expected a probability in [0, 1]", mark)
    if not 0 <= value <= 1:
        r.fail(f"probability {value} outside [0, 1]", mark)
    return float(value)


def _domain_entry(r: _Reader, entry, mark, perspective) -> Qumix:
    if isinstance(entry, str):
        named = {
            "truth": lambda: truthspace.truth_qumix(perspective),
            "falsity": lambda: truthspace.falsity_qumix(perspective, 1),
            "half-identity": lambda: Qumix.maximally_mixed(1),
        }
        if entry not in named:
            r.fail(f"unknown domain entry {entry!r}; expected truth, falsity or half-identity", mark)
        return named[entry]()
    if not isinstance(entry, MarkedDict) or len(entry) != 1:
        r.fail("domain entry must be a name or a single-key mapping: state, basis or qumix", mark)
    (kind, arg), = entry.items()
    amark = r.mark_of(entry, kind)
    if kind == "state":
        return projector(r.build(Quregister, amark, r.vector(arg, amark)))
    if kind == "basis":
        bits = str(arg)
        if not bits or set(bits) - {"0", "1"}:
            r.fail("basis must be a string of 0/1 digits", amark)
        return projector(Quregister.basis(*map(int, bits)))
    if kind == "qumix":
        return r.build(Qumix, amark, r.matrix(arg, amark))
    r.fail(f"unknown domain entry kind {kind!r}", amark)


def _situation(r: _Reader, spec: MarkedDict) -> EpistemicSituation:
    pmark = r.mark_of(spec, "truth_perspective")
    perspective = _perspective(r, r.get(spec, "truth_perspective", default="identity"), pmark)

    raw_domain = r.get(spec, "domain", default=MarkedList())
    dmark = r.mark_of(spec, "domain")
    everything, entries = False, raw_domain
    if raw_domain == "all":
        everything, entries = True, MarkedList()
        entries.item_marks = []
    elif isinstance(raw_domain, MarkedDict):
        everything = bool(r.get(raw_domain, "all", bool, default=False))
        entries = r.get(raw_domain, "members", list, default=MarkedList())
    elif not isinstance(raw_domain, list):
        r.fail("domain must be 'all', a list of entries or {all: bool, members: [...]}", dmark)
    members = tuple(_domain_entry(r, e, r.mark_of(entries, i), perspective) for i, e in enumerate(entries))

    u, u_con = _operation(r, r.get(spec, "understanding", default="identity"), r.mark_of(spec, "understanding"), perspective, "understanding")
    k, k_con = _operation(r, r.get(spec, "knowledge", default="identity"), r.mark_of(spec, "knowledge"), perspective, "knowledge")
    if u_con is not None:
        r.fail("depolarizing_kd is a knowledge operation", r.mark_of(spec, "understanding"))
    fallback = r.get(spec, "fallback", str, default="half-identity")
    if fallback not in ("half-identity", "t-falsity"):
        r.fail(f"fallback must be half-identity or t-falsity, got {fallback!r}", r.mark_of(spec, "fallback"))
    return EpistemicSituation(perspective, EpistemicDomain(members, everything), u, k, fallback, k_con)


def _names(r: _Reader, value, mark, what: str) -> list[str]:
    items = value if isinstance(value, list) else [value]
    out = []
    for i, v in enumerate(items):
        if not isinstance(v, (str, int)) or isinstance(v, bool):
            r.fail(f"{what} identifiers must be strings", r.mark_of(items, i) if isinstance(items, MarkedList) else mark)
        out.append(str(v))
    return out


def load_structure(document: str | Path) -> StructureDocument:
    """Parse a structure document given as a path or as YAML text."""
    text, source = _read_source(document)
    doc, r = _parse_yaml(text, source)
    times = _names(r, r.get(doc, "times", list), r.mark_of(doc, "times"), "time")
    agents = _names(r, r.get(doc, "agents", list), r.mark_of(doc, "agents"), "agent")
    if not times:
        r.fail("times must not be empty", r.mark_of(doc, "times"))
    if not agents:
        r.fail("agents must not be empty", r.mark_of(doc, "agents"))
    for label, seq in (("time", times), ("agent", agents)):
        if len(set(seq)) != len(seq):
            r.fail(f"{label} identifiers must be distinct", r.mark_of(doc, label + "s"))
    defaults = r.get(doc, "defaults", dict, default=MarkedDict())
    if not hasattr(defaults, "key_marks"):
        defaults.key_marks = {}
        defaults.mark = doc.mark

    situations = {}
    sit_specs = r.get(doc, "situations", list)
    for i, spec in enumerate(sit_specs):
        smark = r.mark_of(sit_specs, i)
        if not isinstance(spec, MarkedDict):
            r.fail("each situation must be a mapping", smark)
        merged = MarkedDict({**defaults, **spec})
        merged.mark = spec.mark
        merged.key_marks = {**defaults.key_marks, **spec.key_marks}
        who = _names(r, r.get(spec, "agent"), r.mark_of(spec, "agent"), "agent")
        when = _names(r, r.get(spec, "time"), r.mark_of(spec, "time"), "time")
        for a in who:
            if a not in agents:
                r.fail(f"situation names undeclared agent {a!r}", r.mark_of(spec, "agent"))
        for t in when:
            if t not in times:
                r.fail(f"situation names undeclared time {t!r}", r.mark_of(spec, "time"))
        sit = _situation(r, merged)
        for a in who:
            for t in when:
                if (a, t) in situations:
                    r.fail(f"situation for {a!r} at {t!r} declared twice", smark)
                situations[(a, t)] = sit

    missing = [(a, t) for a in agents for t in times if (a, t) not in situations]
    if missing:
        r.fail(f"no situation declared for agent {missing[0][0]!r} at time {missing[0][1]!r}", sit_specs.mark)
    structure = EpistemicStructure(TimeSequence(tuple(times)), tuple(agents), situations)

    interactions = None
    if "interactions" in doc:
        raw = r.get(doc, "interactions", dict)
        pairs = {}
        for t, plist in raw.items():
            tmark = r.mark_of(raw, t)
            if str(t) not in times:
                r.fail(f"interactions at undeclared time {t!r}", tmark)
            if not isinstance(plist, list):
                r.fail("interactions must map times to lists of [agent, agent] pairs", tmark)
            ps = []
            for j, pair in enumerate(plist):
                pm = r.mark_of(plist, j)
                names = _names(r, pair, pm, "agent")
                if not isinstance(pair, list) or len(names) != 2:
                    r.fail("an interaction must be a pair [agent, agent]", pm)
                for a in names:
                    if a not in agents:
                        r.fail(f"interaction names undeclared agent {a!r}", pm)
                ps.append(tuple(names))
            pairs[str(t)] = tuple(ps)
        interactions = InteractionMap(pairs)
    return StructureDocument(structure, interactions, source)


# --------------------------------------------------------------------------
# Channel documents
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ChannelDocument:
    label: str
    superoperator: channels.SuperOperator
    kraus: channels.KrausChannel | None
    source: str


def load_channel(document: str | Path) -> ChannelDocument:
    """Parse a channel document given as a path or as YAML text."""
    text, source = _read_source(document)
    doc, r = _parse_yaml(text, source)
    spec = r.get(doc, "channel", dict)
    cmark = r.mark_of(doc, "channel")
    kinds = [k for k in ("kraus", "depolarizing", "superoperator") if k in spec]
    if len(kinds) != 1:
        r.fail("channel must contain exactly one of kraus, depolarizing, superoperator", cmark)
    kind = kinds[0]
    amark = r.mark_of(spec, kind)
    label = str(spec.get("label", kind))

    if kind == "kraus":
        raw = spec["kraus"]
        if not isinstance(raw, list) or not raw:
            r.fail("kraus must be a nonempty list of matrices", amark)
        ops = [r.matrix(m, r.mark_of(raw, i)) for i, m in enumerate(raw)]
        if len({o.shape for o in ops}) != 1:
            r.fail("Kraus operators have mismatched dimensions", amark)
        ch = r.build(channels.KrausChannel, amark, tuple(ops), label, False)
        return ChannelDocument(label, channels.kraus_to_superoperator(ch), ch, source)

    if kind == "depolarizing":
        p = _probability(r, spec["depolarizing"], amark)
        persp = None
        if "perspective" in spec:
            persp = _perspective(r, spec["perspective"], r.mark_of(spec, "perspective"))
        ch = r.build(channels.depolarizing_channel, amark, p, persp)
        return ChannelDocument(label, channels.kraus_to_superoperator(ch), ch, source)

    raw = spec["superoperator"]
    n = r.get(spec, "qubits", int, default=1)
    if raw == "transpose":
        s = r.build(channels.transpose_map, amark, n)
    elif raw == "identity":
        s = r.build(channels.identity_map, amark, n)
    elif isinstance(raw, MarkedDict) and "matrix" in raw:
        s = r.build(channels.SuperOperator, amark, r.matrix(raw["matrix"], r.mark_of(raw, "matrix")), label)
    else:
        r.fail("superoperator must be transpose, identity or {matrix: S}", amark)
    return ChannelDocument(label, s, None, source)

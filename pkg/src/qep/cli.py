"""
Command-line entry point.

    qep verify STRUCTURE.yaml [--seed N] [--samples N]
    qep teleport A0 A1 [--sample-mode] [--seed N]
    qep channel-check CHANNEL.yaml
    qep distance PERSPECTIVE_A PERSPECTIVE_B

Reports are JSON documents carrying ``schema_version``; they depend only on
the inputs, ``--seed``, ``--samples`` and ``--epsilon``.  Exit status: 0 when
everything checked passes, 1 on a verification failure, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import tempfile
from pathlib import Path

import numpy as np
import yaml

from . import channels, config, documents, epistemic, protocol, truthspace
from .qcore import Quregister, Qumix, is_density_matrix, projector

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
RENORMALIZE_LIMIT = 1e-6

log = logging.getLogger("qep")


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------


def num(x: float) -> float:
    """Round to 12 significant digits; also folds -0.0 into 0.0."""
    return float(f"{float(x):.12g}") + 0.0


def cnum(z: complex) -> list:
    z = complex(z)
    return [num(z.real), num(z.imag)]


def vector(v) -> list:
    if isinstance(v, Quregister):
        v = v.amplitudes
    return [cnum(z) for z in np.asarray(v).reshape(-1)]


def matrix(m) -> list:
    if isinstance(m, Qumix):
        m = m.matrix
    return [vector(row) for row in np.asarray(m)]


def _header(command: str, args: argparse.Namespace, **extra) -> dict:
    head = {"schema_version": SCHEMA_VERSION, "command": command, "seed": args.seed, "epsilon": args.epsilon}
    head.update(extra)
    return head


_NUM = r"-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?"
_PAIR = re.compile(rf"\[\s*({_NUM}),\s*({_NUM})\s*\]")


def write_report(report: dict, output: str | None) -> None:
    text = _PAIR.sub(r"[\1, \2]", json.dumps(report, indent=2, ensure_ascii=True)) + "\n"
    if output is None:
        sys.stdout.write(text)
        return
    target = Path(output)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."), prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --------------------------------------------------------------------------
# verify
# --------------------------------------------------------------------------


def _situation_report(agent, time, sit, samples, rng) -> dict:
    rep = epistemic.verify_situation(sit, samples, rng)
    members = list(sit.domain)

    def indices(subset):
        return [i for i, m in enumerate(members) if any(m is s for s in subset)]

    return {
        "agent": agent,
        "time": time,
        "truth_perspective": matrix(sit.truth_perspective.matrix),
        "understanding": sit.understanding.label,
        "knowledge": sit.knowledge.label,
        "domain_size": len(members),
        "domain_all": sit.domain.everything,
        "passed": rep.passed,
        "checks": dict(rep.checks),
        "violations": [
            {"condition": v.condition, "detail": v.detail, "witness": matrix(v.witness)} for v in rep.violations
        ],
        "act_mem": indices(epistemic.act_mem(sit)),
        "act_knowl": indices(epistemic.act_knowl(sit)),
        "known_implies_true": epistemic.known_implies_true(sit),
    }


def cmd_verify(args: argparse.Namespace) -> tuple[dict, int]:
    doc = documents.load_structure(Path(args.structure))
    s = doc.structure
    rng = np.random.default_rng(args.seed)
    sits = [_situation_report(a, t, s.situation(a, t), args.samples, rng) for a, t in s.keys()]
    cls = epistemic.classify_structure(s, args.samples, rng)
    inter = []
    if doc.interactions is not None:
        for res in epistemic.verify_interactions(s, doc.interactions):
            inter.append(
                {
                    "time": res.time,
                    "pair": list(res.pair),
                    "satisfied": res.satisfied,
                    "witness_time": res.witness_time,
                    "direction": res.direction,
                    "witness": matrix(res.witness) if res.witness is not None else None,
                }
            )
    passed = all(x["passed"] for x in sits) and all(x["satisfied"] for x in inter)
    report = _header("verify", args, samples=args.samples, input=str(args.structure))
    report.update(
        {
            "passed": passed,
            "situations": sits,
            "classification": {
                "harmonic": cls.harmonic,
                "sound": cls.sound,
                "perfect": cls.perfect,
                "maximal": cls.maximal,
                "maximal_note": cls.maximal_note,
                "agents": {
                    a: {"sound": c.sound, "perfect": c.perfect, "maximal": c.maximal} for a, c in cls.agents.items()
                },
            },
            "interactions": inter,
        }
    )
    return report, EXIT_OK if passed else EXIT_FAIL


# --------------------------------------------------------------------------
# teleport
# --------------------------------------------------------------------------


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise InputError(f"not a complex number: {text!r}") from None


def _memory(trace, step, outcome=None) -> dict:
    mv = protocol.memory_views(trace, step, outcome)
    return {"internal": matrix(mv.internal), "external": [matrix(e) for e in mv.external]}


def _branch(trace, b: protocol.Branch) -> dict:
    return {
        "outcome": b.outcome,
        "probability": num(b.probability),
        "order": b.order,
        "state_t5": vector(b.state_t5),
        "state_t6": vector(b.state_t6),
        "memory_t5": _memory(trace, "t5", b.outcome),
        "memory_t6": _memory(trace, "t6", b.outcome),
    }


def cmd_teleport(args: argparse.Namespace) -> tuple[dict, int]:
    a0, a1 = _parse_complex(args.a0), _parse_complex(args.a1)
    norm = np.sqrt(abs(a0) ** 2 + abs(a1) ** 2)
    if norm == 0 or not np.isfinite(norm):
        raise InputError("input amplitudes cannot be normalized")
    renormalized = False
    if abs(norm**2 - 1) > config.get_epsilon():
        if abs(norm - 1) >= RENORMALIZE_LIMIT:
            raise InputError(f"input qubit has norm {norm:.12g}; |a0|^2 + |a1|^2 must be 1")
        log.warning("renormalizing input qubit (norm %.15g)", norm)
        a0, a1, renormalized = a0 / norm, a1 / norm, True
    trace = protocol.run_protocol(a0, a1)
    ok = protocol.end_to_end_identity_check(trace)
    report = _header("teleport", args, sample_mode=args.sample_mode)
    report.update(
        {
            "input": {"a0": cnum(a0), "a1": cnum(a1), "renormalized": renormalized},
            "states": {step: vector(trace.states[step]) for step in ("t1", "t2", "t3", "t4")},
            "memory": {step: _memory(trace, step) for step in ("t1", "t2", "t3", "t4")},
        }
    )
    if args.sample_mode:
        b = protocol.sample_branch(trace, np.random.default_rng(args.seed))
        report["sampled_branch"] = _branch(trace, b)
        ok = b.internal_after.close_to(protocol.memory_views(trace, "t1").internal)
    else:
        report["branches"] = [_branch(trace, b) for b in trace.branches]
    report["identity_check"] = ok
    return report, EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# channel-check
# --------------------------------------------------------------------------

PROBES = {
    "zero": Quregister.basis(0),
    "one": Quregister.basis(1),
    "plus": Quregister([1 / np.sqrt(2), 1 / np.sqrt(2)]),
    "plus_i": Quregister([1 / np.sqrt(2), 1j / np.sqrt(2)]),
}


def _probe_states(n: int):
    if n == 1:
        return PROBES
    return {name: Quregister.basis(*((0,) * (n - 1) + (bit,))) for name, bit in (("zero", 0), ("one", 1))}


def cmd_channel_check(args: argparse.Namespace) -> tuple[dict, int]:
    doc = documents.load_channel(Path(args.channel))
    s = doc.superoperator
    eps = config.get_epsilon()
    result = {}
    if doc.kraus is not None:
        dev = channels.completeness_error(doc.kraus.kraus_ops)
        result["kraus_completeness"] = {"passed": dev <= eps, "max_deviation": num(dev), "operators": len(doc.kraus.kraus_ops)}
    spectrum = channels.choi_spectrum(s)
    result["trace_preserving"] = channels.is_trace_preserving(s)
    result["completely_positive"] = channels.is_completely_positive(s)
    result["choi_spectrum"] = [num(x) for x in spectrum]
    probes = {}
    for name, psi in _probe_states(s.n).items():
        out = s.apply_matrix(projector(psi).matrix)
        probes[name] = {
            "output_is_qumix": is_density_matrix(out),
            "output_purity": num(np.real(np.trace(out @ out))),
            "preserves_purity": bool(abs(np.real(np.trace(out @ out)) - 1) <= eps),
        }
    result["probes"] = probes
    passed = result["trace_preserving"] and result["completely_positive"]
    if "kraus_completeness" in result:
        passed = passed and result["kraus_completeness"]["passed"]
    report = _header("channel-check", args, input=str(args.channel), channel=doc.label, qubits=s.n)
    report.update({"passed": passed, "checks": result})
    return report, EXIT_OK if passed else EXIT_FAIL


# --------------------------------------------------------------------------
# distance
# --------------------------------------------------------------------------


def parse_perspective(text: str) -> truthspace.TruthPerspective:
    """A preset name or a 2x2 matrix of ``[re, im]`` pairs written inline."""
    if text in truthspace.PRESETS:
        return truthspace.PRESETS[text]()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError:
        raw = None
    if not isinstance(raw, list):
        raise InputError(f"unknown truth-perspective {text!r}; use one of {sorted(truthspace.PRESETS)} or a 2x2 matrix")
    try:
        m = np.array([[complex(*z) if isinstance(z, list) else complex(z) for z in row] for row in raw])
        return truthspace.TruthPerspective(m, "custom")
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid truth-perspective {text!r}: {exc}") from None


def cmd_distance(args: argparse.Namespace) -> tuple[dict, int]:
    ta, tb = parse_perspective(args.perspective_a), parse_perspective(args.perspective_b)
    d = truthspace.epistemic_distance(ta, tb)
    print(f"{d:.12g}")
    report = _header("distance", args)
    report.update({"perspective_a": matrix(ta.matrix), "perspective_b": matrix(tb.matrix), "distance": num(d)})
    return report, EXIT_OK


# --------------------------------------------------------------------------
# Wiring
# --------------------------------------------------------------------------


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0, help="random seed (unsigned 64-bit, default 0)")
    common.add_argument("--epsilon", type=_positive_float, default=config.DEFAULT_EPSILON, help="comparison tolerance")
    common.add_argument("--output", help="write the report to this path instead of stdout")

    parser = argparse.ArgumentParser(prog="qep", description="Epistemic quantum computational structures toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="verify the axioms of an epistemic structure document")
    p.add_argument("structure")
    p.add_argument("--samples", type=_positive_int, default=200, help="random qumixes per arity (default 200)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("teleport", parents=[common], help="run the memorize/retrieve teleportation protocol")
    p.add_argument("a0", help="amplitude of |0>, e.g. 0.6 or 0.5+0.1j")
    p.add_argument("a1", help="amplitude of |1>")
    p.add_argument("--sample-mode", action="store_true", help="report one seeded measurement branch only")
    p.set_defaults(func=cmd_teleport)

    p = sub.add_parser("channel-check", parents=[common], help="check a channel for completeness, TP and CP")
    p.add_argument("channel")
    p.set_defaults(func=cmd_channel_check)

    p = sub.add_parser("distance", parents=[common], help="epistemic distance between two truth-perspectives")
    p.add_argument("perspective_a")
    p.add_argument("perspective_b")
    p.set_defaults(func=cmd_distance)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="qep: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        with config.epsilon(args.epsilon):
            report, status = args.func(args)
    except documents.DocumentError as exc:
        print(f"qep: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError, OSError) as exc:
        print(f"qep: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command != "distance" or args.output:
        write_report(report, args.output)
    return status


if __name__ == "__main__":
    sys.exit(main())

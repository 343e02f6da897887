"""
Acceptance suite: twelve end-to-end criteria at their stated tolerances.

Each criterion prints one ``PASS``/``FAIL`` line (written straight to the terminal,
even under output capture); ``python tests/test_acceptance.py`` prints all
twelve without pytest.
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np
import pytest
import sympy as sp

sys.path.insert(0, str(Path(__file__).parent))

from qep import cli, gates, protocol, truthspace  # noqa: E402
from qep.channels import (  # noqa: E402
    apply_channel,
    choi_spectrum,
    depolarizing_channel,
    is_completely_positive,
    is_trace_preserving,
    kraus_to_superoperator,
    transpose_map,
    unitary_channel,
)
from qep.epistemic import act_knowl, act_mem, depolarizing_situation, known_implies_true, verify_situation  # noqa: E402
from qep.qcore import (  # noqa: E402
    Entanglement,
    Quregister,
    entanglement_class,
    fubini_study_distance,
    projector,
    random_qumix,
    random_quregister,
)
from qep.truthspace import probability  # noqa: E402
from _support import random_kraus_channel, random_perspective, random_valid_structure, truthward_qumixes  # noqa: E402

FIX = Path(__file__).parent / "fixtures"
SEED = 20240611
RESULTS = {}


def record(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def c1_round_trip():
    rng = np.random.default_rng(SEED)
    worst_state, worst_prob = 0.0, 0.0
    for _ in range(100):
        a0, a1 = random_quregister(1, rng).amplitudes
        tr = protocol.run_protocol(a0, a1)
        start = protocol.memory_views(tr, "t1").internal.matrix
        for b in tr.branches:
            worst_state = max(worst_state, np.max(np.abs(b.internal_after.matrix - start)))
            worst_prob = max(worst_prob, abs(b.probability - 0.25))
    ok = worst_state <= 1e-9 and worst_prob <= 1e-9
    return ok, f"teleport round trip: max |rho6 - rho1| = {worst_state:.2e}, max |p - 1/4| = {worst_prob:.2e}"


def c2_branch_states():
    a0s, a1s = sp.symbols("a0 a1")
    k0, k1 = sp.Matrix([1, 0]), sp.Matrix([0, 1])

    def kron(*vs):
        out = vs[0]
        for v in vs[1:]:
            out = sp.kronecker_product(out, v)
        return out

    listed = {
        "00": kron(k0, k0, a0s * k0 + a1s * k1),
        "01": kron(k0, k1, a0s * k1 + a1s * k0),
        "10": kron(k1, k0, a0s * k0 - a1s * k1),
        "11": kron(k1, k1, a0s * k1 - a1s * k0),
    }
    subs = {a0s: sp.sqrt(sp.Rational(3, 10)), a1s: sp.sqrt(sp.Rational(7, 10))}
    tr = protocol.run_protocol(np.sqrt(0.3), np.sqrt(0.7))
    worst = 0.0
    for outcome, vec in listed.items():
        expected = np.array(vec.subs(subs).evalf(30), dtype=complex).reshape(-1)
        got = tr.branch(outcome).state_t5.amplitudes
        overlap = abs(np.vdot(expected, got))
        worst = max(worst, abs(overlap - 1))
    return worst <= 1e-9, f"t5 branch states vs listed forms at (sqrt .3, sqrt .7): max |1 - |<e|g>|| = {worst:.2e}"


def c3_cleared_memory():
    rng = np.random.default_rng(SEED + 3)
    full = depolarizing_channel(1)
    half = np.eye(2) / 2
    worst_half, worst_chan = 0.0, 0.0
    for _ in range(100):
        q = random_quregister(1, rng)
        internal = protocol.memory_views(protocol.run_protocol(*q.amplitudes), "t2").internal.matrix
        worst_half = max(worst_half, np.max(np.abs(internal - half)))
        worst_chan = max(worst_chan, np.max(np.abs(internal - apply_channel(full, projector(q)).matrix)))
    ok = worst_half <= 1e-9 and worst_chan <= 1e-9
    return ok, f"t2 internal memory: max |rho - I/2| = {worst_half:.2e}, max |rho - D1(q)| = {worst_chan:.2e}"


def c4_distances():
    one, zero = Quregister.basis(1), Quregister.basis(0)
    bell_one = truthspace.hadamard().truth
    d_orth = fubini_study_distance(one, zero)
    d_bell = fubini_study_distance(one, bell_one)
    exact = abs(d_orth - 1) <= 1e-12 and abs(d_bell - 0.5) <= 1e-12
    rng = np.random.default_rng(SEED + 4)
    axioms = True
    for _ in range(200):
        a, b, c = (random_quregister(1, rng) for _ in range(3))
        dab, dba = fubini_study_distance(a, b), fubini_study_distance(b, a)
        axioms &= dab >= 0 and abs(dab - dba) <= 1e-12
        axioms &= fubini_study_distance(a, a) <= 1e-9
        axioms &= dab <= fubini_study_distance(a, c) + fubini_study_distance(c, b) + 1e-12
        axioms &= dab <= 1 + 1e-12
    ok = exact and axioms
    return ok, f"d(|1>,|0>) = {d_orth:.15g}, d(|1>,|1_H>) = {d_bell:.15g}, metric axioms on 200 triples: {axioms}"


def c5_probability_law():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for _ in range(100):
        t = random_perspective(rng)
        a0, a1 = random_quregister(1, rng).amplitudes
        psi = Quregister(a0 * t.falsity.amplitudes + a1 * t.truth.amplitudes)
        worst = max(worst, abs(probability(t, psi) - abs(a1) ** 2))
    return worst <= 1e-9, f"p_T(a0|0_T> + a1|1_T>) vs |a1|^2: max error {worst:.2e}"


def c6_depolarizing():
    rng = np.random.default_rng(SEED + 6)
    worst_persp = 0.0
    for _ in range(20):
        p = float(rng.uniform(0, 1))
        s_t = kraus_to_superoperator(depolarizing_channel(p, random_perspective(rng))).matrix
        s_i = kraus_to_superoperator(depolarizing_channel(p)).matrix
        worst_persp = max(worst_persp, np.linalg.norm(s_t - s_i))
    full = depolarizing_channel(1)
    worst_full = max(np.max(np.abs(apply_channel(full, random_qumix(1, rng)).matrix - np.eye(2) / 2)) for _ in range(50))
    worst_complete = 0.0
    for p in np.linspace(0, 1, 20):
        ops = depolarizing_channel(float(p)).kraus_ops
        worst_complete = max(worst_complete, np.max(np.abs(sum(e.conj().T @ e for e in ops) - np.eye(2))))
    ok = worst_persp < 1e-9 and worst_full <= 1e-9 and worst_complete <= 1e-9
    return ok, (
        f"depolarizing: max ||S_T - S_I|| = {worst_persp:.2e}, max |D1(rho) - I/2| = {worst_full:.2e}, "
        f"max completeness error = {worst_complete:.2e}"
    )


def c7_epistemic_axioms():
    rng = np.random.default_rng(SEED + 7)
    clean = True
    for p in (0.25, 0.5, 1.0):
        t = random_perspective(rng)
        members = truthward_qumixes(20, t, rng)
        clean &= verify_situation(depolarizing_situation(p, t, members), 200, seed=SEED).passed
    t = random_perspective(rng)
    members = truthward_qumixes(20, t, rng)
    bad = projector(Quregister(np.sqrt(0.7) * t.falsity.amplitudes + np.sqrt(0.3) * t.truth.amplitudes))
    rep = verify_situation(depolarizing_situation(0.5, t, members + [bad]), 200, seed=SEED)
    hits = rep.of_condition("4.3")
    injected = len(hits) == 1 and hits[0].witness.close_to(bad) and abs(probability(t, bad) - 0.3) <= 1e-9
    others = sorted({v.condition for v in rep.violations} - {"4.3"})
    return clean and injected, (
        f"KD fixtures clean: {clean}; injected p_T = 0.3 member gives {len(hits)} condition-4.3 violation(s) "
        f"with matching witness: {injected} (also flagged: {', '.join(others) or 'none'})"
    )


def c8_subset_chain():
    rng = np.random.default_rng(SEED + 8)
    chain, kit = True, True
    for _ in range(20):
        s = random_valid_structure(rng)
        for a, t in s.keys():
            sit = s.situation(a, t)
            mem, kn = act_mem(sit), act_knowl(sit)
            chain &= all(any(k is m for m in mem) for k in kn) and all(sit.domain.contains(m) for m in mem)
            kit &= known_implies_true(sit)
    return chain and kit, f"20 random structures: ActKnowl <= ActMem <= EpD {chain}, known implies true {kit}"


def c9_entanglement():
    ghz = Quregister((Quregister.basis(0, 0, 0).amplitudes + Quregister.basis(1, 1, 1).amplitudes) / np.sqrt(2))
    ex = Quregister((Quregister.basis(0, 0, 0).amplitudes + Quregister.basis(1, 1, 0).amplitudes) / np.sqrt(2))
    labels = (
        entanglement_class(ghz, [1, 2, 3]),
        entanglement_class(ex, [1, 2]),
        entanglement_class(ex, [3]),
    )
    expected = (Entanglement.MAXIMALLY_ENTANGLED, Entanglement.ENTANGLED_WRT_PARTS, Entanglement.NOT_ENTANGLED_WRT_PARTS)
    rng = np.random.default_rng(SEED + 9)
    invariant = True
    for _ in range(20):
        twin = truthspace.extend(random_perspective(rng), 3)
        moved = (gates.apply(twin, ghz), gates.apply(twin, ex), gates.apply(twin, ex))
        again = (
            entanglement_class(moved[0], [1, 2, 3]),
            entanglement_class(moved[1], [1, 2]),
            entanglement_class(moved[2], [3]),
        )
        invariant &= again == labels
    ok = labels == expected and invariant
    return ok, f"GHZ / example state: {[l.name for l in labels]}, invariant under 20 perspectives: {invariant}"


def c10_channel_checks():
    rng = np.random.default_rng(SEED + 10)
    kraus = [depolarizing_channel(float(p), random_perspective(rng)) for p in np.linspace(0, 1, 6)]
    kraus += [unitary_channel(g()) for g in gates.NAMED_GATES.values()]
    kraus += [random_kraus_channel(n, k, rng) for n in (1, 2) for k in (1, 2, 4)]
    damping = 0.4
    kraus.append(
        type(kraus[0])(
            (np.array([[1, 0], [0, np.sqrt(1 - damping)]]), np.array([[0, np.sqrt(damping)], [0, 0]])), "damping"
        )
    )
    all_good = all(
        is_trace_preserving(kraus_to_superoperator(ch)) and is_completely_positive(kraus_to_superoperator(ch))
        for ch in kraus
    )
    t = transpose_map(1)
    lowest = float(min(choi_spectrum(t)))
    transpose_fails = not is_completely_positive(t) and lowest <= -1 + 1e-9
    return all_good and transpose_fails, (
        f"{len(kraus)} Kraus channels TP and CP: {all_good}; transpose CP fails with min Choi eigenvalue {lowest:.12g}"
    )


def c11_excluded_middle():
    rho = truthspace.truth_qumix(truthspace.hadamard())
    p = probability(truthspace.identity(), rho)
    p_not = probability(truthspace.identity(), gates.apply_to_qumix(gates.not_gate(1), rho))
    ok = abs(p - 0.5) <= 1e-9 and abs(p_not - 0.5) <= 1e-9 and p < 1 - 1e-9 and p_not < 1 - 1e-9
    return ok, f"Hadamard state: p_I(rho) = {p:.12g}, p_I(NOT rho) = {p_not:.12g}"


def c12_cli_determinism():
    commands = (
        ["verify", str(FIX / "kd_structure.yaml"), "--seed", "42", "--samples", "50"],
        ["verify", str(FIX / "kd_violation.yaml"), "--seed", "42"],
        ["teleport", "0.6", "0.8j", "--seed", "42"],
        ["teleport", "0.6", "0.8", "--seed", "42", "--sample-mode"],
        ["channel-check", str(FIX / "transpose.yaml"), "--seed", "42"],
        ["distance", "identity", "hadamard", "--seed", "42"],
    )
    same = True
    with tempfile.TemporaryDirectory() as tmp:
        for argv in commands:
            blobs = []
            for i in range(2):
                out = Path(tmp) / f"run{i}.json"
                cli.main(argv + ["--output", str(out)])
                blobs.append(out.read_bytes())
            same &= blobs[0] == blobs[1] and json.loads(blobs[0])["schema_version"] == 1
    return same, f"{len(commands)} CLI invocations run twice: byte-identical reports {same}"


CRITERIA = [
    c1_round_trip,
    c2_branch_states,
    c3_cleared_memory,
    c4_distances,
    c5_probability_law,
    c6_depolarizing,
    c7_epistemic_axioms,
    c8_subset_chain,
    c9_entanglement,
    c10_channel_checks,
    c11_excluded_middle,
    c12_cli_determinism,
]


@pytest.mark.parametrize("number, check", list(enumerate(CRITERIA, 1)), ids=[c.__name__ for c in CRITERIA])
def test_criterion(number, check, capsys):
    ok, detail = check()
    with capsys.disabled():
        print()
        record(number, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for number, check in enumerate(CRITERIA, 1):
        ok, detail = check()
        failures += not record(number, ok, detail)
    sys.exit(1 if failures else 0)

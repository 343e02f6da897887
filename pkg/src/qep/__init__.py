"""Simulation and verification of epistemic quantum computational structures."""

from .channels import (
    KrausChannel,
    SuperOperator,
    apply_channel,
    depolarizing_channel,
    is_completely_positive,
    is_trace_preserving,
    kraus_to_superoperator,
)
from .epistemic import (
    EpistemicDomain,
    EpistemicSituation,
    EpistemicStructure,
    InteractionMap,
    TimeSequence,
    act_knowl,
    act_mem,
    classify_structure,
    depolarizing_knowledge_op,
    know,
    understand,
    verify_interactions,
    verify_situation,
)
from .gates import Gate, apply_to_qumix, twin_gate
from .protocol import end_to_end_identity_check, memory_views, run_protocol
from .qcore import (
    Entanglement,
    Quregister,
    Qumix,
    entanglement_class,
    fubini_study_distance,
    projector,
    purity,
    reduced_state,
    tensor,
)
from .truthspace import TruthPerspective, epistemic_distance, extend, preorder_leq, probability, truth_projection

__version__ = "0.1.0"

__all__ = [
    "KrausChannel",
    "SuperOperator",
    "apply_channel",
    "depolarizing_channel",
    "is_completely_positive",
    "is_trace_preserving",
    "kraus_to_superoperator",
    "EpistemicDomain",
    "EpistemicSituation",
    "EpistemicStructure",
    "InteractionMap",
    "TimeSequence",
    "act_knowl",
    "act_mem",
    "classify_structure",
    "depolarizing_knowledge_op",
    "know",
    "understand",
    "verify_interactions",
    "verify_situation",
    "Gate",
    "apply_to_qumix",
    "twin_gate",
    "end_to_end_identity_check",
    "memory_views",
    "run_protocol",
    "Entanglement",
    "Quregister",
    "Qumix",
    "entanglement_class",
    "fubini_study_distance",
    "projector",
    "purity",
    "reduced_state",
    "tensor",
    "TruthPerspective",
    "epistemic_distance",
    "extend",
    "preorder_leq",
    "probability",
    "truth_projection",
    "__version__",
]

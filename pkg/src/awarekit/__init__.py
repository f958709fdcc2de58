"""awarekit: a toolkit for a modal logic of knowledge and agent awareness.

The library covers four jobs: parsing and printing formulas of the K/R/D
language, evaluating them over finite epistemic models, checking
Hilbert-style proof scripts, and deciding validity up to bounded model size
by exhaustive countermodel search.
"""

from .syntax import (
    And,
    Atom,
    DeDicto,
    DeRe,
    FALSE,
    Falsum,
    Formula,
    Implies,
    Know,
    MetaVar,
    Not,
    Or,
    ParseError,
    TRUE,
    UnboundMetavariableError,
    atoms,
    awareness_tower,
    instantiate,
    is_tautology,
    match_schema,
    metavariables,
    modal_depth,
    parse,
    render,
    subformula_closure,
)
from .model import (
    AgentNotPresentError,
    Bounds,
    EpistemicModel,
    ModelFormatError,
    Point,
    Violation,
    enumerate_models,
    load_model,
    model_from_json,
    model_to_dot,
    model_to_json,
    random_model,
)
from .checker import (
    ModelEvaluator,
    explain,
    extension,
    satisfies,
    satisfies_naive,
    valid_in_model,
)
from .proof import (
    AXIOM_SCHEMAS,
    Axiom,
    AxiomId,
    Cite,
    Hyp,
    MP,
    MonoD,
    MonoR,
    Nec,
    ProofError,
    ProofFileError,
    ProofLine,
    ProofScript,
    Registry,
    builtin,
    check,
    deduction,
    default_registry,
    format_proof,
    lift_knowledge,
    parse_proof,
)
from .search import (
    AtomNotInBoundsError,
    Countermodel,
    FuzzReport,
    FuzzViolation,
    ValidUpToBounds,
    Verdict,
    decide_bounded,
    find_countermodel,
    fuzz_soundness,
    random_formula,
)

__version__ = "0.1.0"

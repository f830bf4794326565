"""License allocation engine with depletion-aware selection and verification tools."""

from .allocate import (
    AllocationDecision,
    Chooser,
    Chosen,
    NoMatch,
    PromptRequired,
    Rank,
    allocate,
    allocate_and_execute,
    min_loss_chooser,
    oma_allocate,
    proposed_allocate,
    rank_constraint,
)
from .corpus import CorpusDocument, load_corpus, parse_corpus, serialize_corpus
from .engine import (
    AgentState,
    ConstraintState,
    Depletion,
    consume,
    constraint_holds,
    constraints_hold,
    cp_valid,
    initial_state,
    is_depleting,
    sublicense_valid,
)
from .errors import (
    AssumptionViolation,
    ChooserContractError,
    InvalidTargetError,
    LicallocError,
    NotFoundError,
)
from .labels import (
    Complexity,
    ConstraintName,
    Label,
    Times,
    compare_labels,
    cp_label,
    label_cp,
    label_sublicense,
    state_labels,
    sublicense_label,
)
from .model import (
    CP,
    Action,
    Constraint,
    ConstraintPermissionSet,
    Count,
    DateTime,
    Interval,
    License,
    LicenseSet,
    Permission,
    Request,
    SubLicense,
    TimedCount,
    Unconstrained,
    matches,
    sat_cp,
    sat_license,
    sat_set,
    sat_sublicense,
)
from .rights import (
    candidates,
    find_matching_cp,
    find_matching_sublicense,
    is_lossy,
    loss,
    remnants,
    rights,
    select_target,
)

__version__ = "0.1.0"

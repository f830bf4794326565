"""The two allocation algorithms.

``oma_allocate`` is the baseline: rank every candidate license by the
constraints governing its matching right and take the best.  It never looks
at what else a selection destroys, which is exactly how it ends up burning
rights the user still wanted.

``proposed_allocate`` wraps the same ranking in label filters: candidates
whose matching sublicense or cp would deplete while carrying more than the
requested permission are set aside, and among the survivors one that does
not deplete at all is preferred.  If every candidate is in the destructive
class the decision is handed to the user (a prompt), because only the user
knows which rights they value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

from .engine import AgentState, consume
from .errors import ChooserContractError
from .labels import Label, Times, compare_labels, cp_label, label_sort_key, sublicense_label
from .model import Constraint, DateTime, Request, constraint_rank
from .rights import RightsMultiset, candidate_losses, candidates, select_target

DATETIME_TIEBREAKS = ("earliest", "furthest")


@dataclass(frozen=True)
class Rank:
    """Selection priority of a single constraint.

    ``ordinal`` orders the constraint kinds (0 best).  For date-time
    constraints ``datetime_end`` carries the end bound so equal ordinals can
    be broken by expiry.
    """

    ordinal: int
    datetime_end: Optional[int] = None


def rank_constraint(constraint: Constraint) -> Rank:
    if isinstance(constraint, DateTime):
        return Rank(ordinal=constraint_rank(constraint), datetime_end=constraint.end)
    return Rank(ordinal=constraint_rank(constraint))


@dataclass(frozen=True)
class Chosen:
    license_id: str
    sublicense_id: str
    cp_id: str
    via_prompt: bool = False


@dataclass(frozen=True)
class PromptRequired:
    candidates: tuple[str, ...]
    losses: Mapping[str, RightsMultiset]


@dataclass(frozen=True)
class NoMatch:
    pass


AllocationDecision = Union[Chosen, PromptRequired, NoMatch]

# Given (request, candidate ids, per-candidate losses), returns the id of the
# candidate to use.  May block on user input.
Chooser = Callable[[Request, Sequence[str], Mapping[str, RightsMultiset]], str]


def min_loss_chooser(request: Request, ids: Sequence[str], losses: Mapping[str, RightsMultiset]) -> str:
    """Deterministic stand-in for the user: smallest loss, ties by id."""
    return min(ids, key=lambda lid: (sum(losses[lid].values()), lid))


def _dt_key(rank: Rank, tiebreak: str) -> float:
    # An end-of-validity bound means the right is lost by waiting, so by
    # default the soonest-expiring one is used first; an absent end never
    # expires.  The "furthest" mode inverts this.
    if rank.ordinal != 1:
        return 0.0
    end = math.inf if rank.datetime_end is None else float(rank.datetime_end)
    return end if tiebreak == "earliest" else -end


def _list_key(constraints: Sequence[Constraint], tiebreak: str) -> tuple[int, float]:
    """Best (ordinal, expiry) over a constraint list; empty lists act unconstrained."""
    if not constraints:
        return (0, 0.0)
    return min((r.ordinal, _dt_key(r, tiebreak)) for r in map(rank_constraint, constraints))


def _candidate_key(
    state: AgentState, license_id: str, request: Request, tiebreak: str
) -> tuple:
    sl_id, cp_id = select_target(state, license_id, request)
    sl = state.sublicense(license_id, sl_id)
    cp = sl.cp(cp_id)
    # The written rules rank a right by the best constraint in its full
    # governing conjunction.  Ties are broken structurally: the constraint
    # carried by the sublicense scopes the whole branch, so it outweighs one
    # local to the cp; after that, declaration order decides.
    return (
        _list_key(tuple(sl.constraints) + tuple(cp.constraints), tiebreak),
        _list_key(sl.constraints, tiebreak),
        _list_key(cp.constraints, tiebreak),
        state.licenses.index(license_id),
    )


def oma_allocate(
    state: AgentState,
    request: Request,
    *,
    datetime_tiebreak: str = "earliest",
    restrict_to: Optional[Sequence[str]] = None,
) -> AllocationDecision:
    """Baseline allocation: best-ranked valid candidate, no loss awareness."""
    if datetime_tiebreak not in DATETIME_TIEBREAKS:
        raise ValueError(f"unknown datetime tiebreak {datetime_tiebreak!r}")
    pool = candidates(state, request)
    if restrict_to is not None:
        allowed = set(restrict_to)
        pool = [lid for lid in pool if lid in allowed]
    if not pool:
        return NoMatch()
    best = min(pool, key=lambda lid: _candidate_key(state, lid, request, datetime_tiebreak))
    sl_id, cp_id = select_target(state, best, request)
    return Chosen(best, sl_id, cp_id)


def _target_labels(state: AgentState, license_id: str, request: Request) -> tuple[Label, Label]:
    sl_id, cp_id = select_target(state, license_id, request)
    return (
        sublicense_label(state, license_id, sl_id),
        cp_label(state, license_id, sl_id, cp_id),
    )


def proposed_allocate(
    state: AgentState,
    request: Request,
    *,
    chooser: Optional[Chooser] = None,
    datetime_tiebreak: str = "earliest",
) -> AllocationDecision:
    """Label-filtered allocation.

    1. Collect the valid candidates; none means NoMatch, a single one is
       returned as is (its loss, if any, is unavoidable).
    2. Drop candidates whose matching sublicense label is once+complex, then
       those whose matching cp label is once+complex: those selections would
       destroy rights beyond the request.
    3. If survivors remain, prefer the ones whose matching pair is many/many
       (provably deplete nothing) and run the baseline ranking on that pool.
    4. Otherwise every candidate costs the user something: prompt, or resolve
       through the supplied chooser.
    """
    pool = candidates(state, request)
    if not pool:
        return NoMatch()
    if len(pool) == 1:
        sl_id, cp_id = select_target(state, pool[0], request)
        return Chosen(pool[0], sl_id, cp_id)

    labels = {lid: _target_labels(state, lid, request) for lid in pool}
    survivors = [
        lid
        for lid in pool
        if not labels[lid][0].depleting_and_complex
        and not labels[lid][1].depleting_and_complex
    ]
    if survivors:
        non_depleting = [
            lid
            for lid in survivors
            if labels[lid][0].times is Times.MANY and labels[lid][1].times is Times.MANY
        ]
        return oma_allocate(
            state,
            request,
            datetime_tiebreak=datetime_tiebreak,
            restrict_to=non_depleting or survivors,
        )

    losses = candidate_losses(state, request, pool)
    if chooser is not None:
        picked = chooser(request, tuple(pool), losses)
        if picked not in pool:
            raise ChooserContractError(f"chooser returned {picked!r}, not a candidate")
        sl_id, cp_id = select_target(state, picked, request)
        return Chosen(picked, sl_id, cp_id, via_prompt=True)
    return PromptRequired(tuple(pool), losses)


def allocate(
    state: AgentState,
    request: Request,
    *,
    algorithm: str = "proposed",
    chooser: Optional[Chooser] = None,
    datetime_tiebreak: str = "earliest",
) -> AllocationDecision:
    """Dispatch on the algorithm name ("oma" or "proposed")."""
    if algorithm == "oma":
        return oma_allocate(state, request, datetime_tiebreak=datetime_tiebreak)
    if algorithm == "proposed":
        return proposed_allocate(
            state, request, chooser=chooser, datetime_tiebreak=datetime_tiebreak
        )
    raise ValueError(f"unknown algorithm {algorithm!r}")


def allocate_and_execute(
    state: AgentState,
    request: Request,
    *,
    algorithm: str = "proposed",
    chooser: Optional[Chooser] = None,
    datetime_tiebreak: str = "earliest",
) -> tuple[AllocationDecision, AgentState]:
    """Allocate and, on a definite choice, consume it.

    NoMatch and an unresolved prompt leave the state unchanged.
    """
    decision = allocate(
        state,
        request,
        algorithm=algorithm,
        chooser=chooser,
        datetime_tiebreak=datetime_tiebreak,
    )
    if isinstance(decision, Chosen):
        state = consume(state, decision.license_id, decision.sublicense_id, decision.cp_id, request)
    return decision, state


__all__ = [
    "AllocationDecision",
    "Chooser",
    "Chosen",
    "NoMatch",
    "PromptRequired",
    "Rank",
    "allocate",
    "allocate_and_execute",
    "compare_labels",
    "label_sort_key",
    "min_loss_chooser",
    "oma_allocate",
    "proposed_allocate",
    "rank_constraint",
]

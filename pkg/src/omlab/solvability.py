"""Broadcastability and consensus solvability verdicts with witnesses.

Broadcast over a mobile scheme is solvable exactly when one node is a
source of every member event, so the check is an intersection of source
sets; the negative witness is a no-source event or a minimal subset of
events whose source sets do not intersect.

For consensus the decision procedure is:

1. an event without sources makes consensus unsolvable outright;
2. for convex families, consensus is equivalent to broadcast;
3. a broadcastable family always admits consensus (flood the common
   source's value, everyone decides it);
4. otherwise the class partition decides: a class without a common
   source proves unsolvability, and if every class is broadcastable the
   necessary condition holds but sufficiency is open, reported as an
   explicit third verdict.

Round counts come from an adversarial flooding game over informed sets:
each round the adversary picks the member event that slows flooding the
most.  Flooding dominates every algorithm under the round semantics, so
the game value is the optimal broadcast time from a given originator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Union

from .budget import Budget, BudgetExceededError, effective_budget
from .equivalence import BetaPartition, beta_partition
from .events import EventFamily, generate_bounded_omissions, is_convex
from .graphs import Digraph, mask_nodes, vertex_connectivity

UNBOUNDED = math.inf

Rounds = Union[int, float]


class Answer(str, Enum):
    SOLVABLE = "solvable"
    UNSOLVABLE = "unsolvable"
    NECESSARY_CONDITION_HOLDS = "necessary-condition-holds"


EXIT_CODES = {
    Answer.SOLVABLE: 0,
    Answer.UNSOLVABLE: 2,
    Answer.NECESSARY_CONDITION_HOLDS: 3,
}


@dataclass(frozen=True)
class CommonSourceWitness:
    """Nodes that are sources of every event in the family."""

    nodes_mask: int

    @property
    def node(self) -> int:
        return mask_nodes(self.nodes_mask)[0]


@dataclass(frozen=True)
class NoSourceEventWitness:
    """Index of an event from which no node reaches everyone."""

    event: int


@dataclass(frozen=True)
class IncompatibilityWitness:
    """Events that each have sources but share none."""

    events: tuple[int, ...]
    source_masks: tuple[int, ...]

    def holds(self, family: EventFamily) -> bool:
        inter = family.base.full_mask
        for idx, mask in zip(self.events, self.source_masks):
            if family.source_masks[idx] != mask or mask == 0:
                return False
            inter &= mask
        return inter == 0


@dataclass(frozen=True)
class BetaClassWitness:
    """A class of the partition together with its incompatibility witness."""

    class_events: tuple[int, ...]
    incompatibility: IncompatibilityWitness


Witness = Union[
    CommonSourceWitness, NoSourceEventWitness, IncompatibilityWitness, BetaClassWitness
]


@dataclass(frozen=True)
class Verdict:
    problem: str  # "broadcast" | "consensus"
    answer: Answer
    rule: str
    witness: Witness | None
    rounds: Rounds | None = None

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.answer]


# ---- broadcastability --------------------------------------------------------

def check_broadcastable(family: EventFamily) -> Verdict:
    """Solvable iff some node is a source for every member event."""
    if not family.events:
        raise ValueError("solvability is defined for nonempty families")
    source_masks = family.source_masks
    for idx, mask in enumerate(source_masks):
        if mask == 0:
            return Verdict(
                "broadcast", Answer.UNSOLVABLE, "no-source-event",
                NoSourceEventWitness(idx),
            )
    common = family.common_sources_mask()
    if common:
        return Verdict(
            "broadcast", Answer.SOLVABLE, "common-source",
            CommonSourceWitness(common),
        )
    witness = _minimal_incompatible_subset(family)
    return Verdict(
        "broadcast", Answer.UNSOLVABLE, "source-incompatible", witness,
    )


def _minimal_incompatible_subset(
    family: EventFamily, max_combinations: int = 200_000
) -> IncompatibilityWitness:
    """Smallest subset of events with nonempty sources and empty intersection.

    The search runs over distinct inclusion-minimal source sets (if one
    source set contains another, the smaller one is at least as useful),
    by increasing subset size.  If the combination count explodes, a
    greedy irredundant subset is returned instead; it is still a valid
    witness, just not guaranteed minimum-cardinality.
    """
    representative: dict[int, int] = {}
    for idx in range(len(family)):
        representative.setdefault(family.source_masks[idx], idx)
    masks = sorted(representative)
    minimal = [
        m for m in masks
        if not any(other != m and other & m == other for other in masks)
    ]

    def witness_of(chosen: tuple[int, ...]) -> IncompatibilityWitness:
        events = tuple(sorted(representative[m] for m in chosen))
        return IncompatibilityWitness(
            events, tuple(family.source_masks[i] for i in events)
        )

    examined = 0
    for size in range(2, len(minimal) + 1):
        for chosen in combinations(minimal, size):
            examined += 1
            if examined > max_combinations:
                return witness_of(tuple(_greedy_irredundant(minimal)))
            inter = chosen[0]
            for m in chosen[1:]:
                inter &= m
            if inter == 0:
                return witness_of(chosen)
    raise AssertionError("no incompatible subset despite empty intersection")


def _greedy_irredundant(masks: list[int]) -> list[int]:
    kept = list(masks)
    for m in list(kept):
        rest = [x for x in kept if x != m]
        inter = -1
        for x in rest:
            inter &= x
        if rest and inter == 0:
            kept = rest
    return kept


# ---- consensus -----------------------------------------------------------------

def check_consensus(
    family: EventFamily, partition: BetaPartition | None = None
) -> Verdict:
    """Decide consensus solvability, or report the inconclusive middle ground.

    ``partition`` may be supplied to reuse a previously computed class
    partition; it is only consulted on the non-convex path.
    """
    if not family.events:
        raise ValueError("solvability is defined for nonempty families")
    for idx, mask in enumerate(family.source_masks):
        if mask == 0:
            return Verdict(
                "consensus", Answer.UNSOLVABLE, "no-source-event",
                NoSourceEventWitness(idx),
            )
    broadcast = check_broadcastable(family)
    if is_convex(family):
        return Verdict(
            "consensus", broadcast.answer, "convex-broadcast-equivalence",
            broadcast.witness,
        )
    if broadcast.answer is Answer.SOLVABLE:
        # Flooding the common source's value and deciding it solves
        # consensus whenever broadcast is solvable, convex or not.
        return Verdict(
            "consensus", Answer.SOLVABLE, "broadcast-reduction", broadcast.witness,
        )
    bp = partition if partition is not None else beta_partition(family)
    for members in bp.classes:
        inter = family.base.full_mask
        for i in members:
            inter &= family.source_masks[i]
        if inter == 0:
            sub = _minimal_incompatible_within(family, members)
            return Verdict(
                "consensus", Answer.UNSOLVABLE,
                "indistinguishable-class-unbroadcastable",
                BetaClassWitness(members, sub),
            )
    return Verdict(
        "consensus", Answer.NECESSARY_CONDITION_HOLDS, "necessary-condition-only",
        None,
    )


def _minimal_incompatible_within(
    family: EventFamily, members: tuple[int, ...]
) -> IncompatibilityWitness:
    sub = EventFamily(
        family.base,
        tuple(family.events[i] for i in members),
        tuple(family.name(i) for i in members),
    )
    inner = _minimal_incompatible_subset(sub)
    events = tuple(members[i] for i in inner.events)
    return IncompatibilityWitness(events, inner.source_masks)


# ---- adversarial flooding rounds ------------------------------------------------

class BroadcastGame:
    """Worst-case flooding time over informed sets, memoized.

    State is the bitmask of informed nodes.  Each round the adversary
    picks a member event; the state grows by the heads of that event's
    arcs leaving the informed set.  The game value is the number of
    rounds to reach the full node set against optimal adversary play, or
    ``UNBOUNDED`` when some event makes no progress (the adversary can
    repeat it forever).
    """

    def __init__(self, family: EventFamily, budget: Budget | None = None) -> None:
        budget = effective_budget(budget)
        n = family.base.node_count
        if n > budget.max_game_nodes:
            raise BudgetExceededError(
                f"game state space 2^{n} exceeds the {budget.max_game_nodes}-node cap"
            )
        self.family = family
        self._event_out = [ev.out_masks for ev in family.events]
        self._full = family.base.full_mask
        self._memo: dict[int, Rounds] = {self._full: 0}

    def _successors(self, state: int) -> set[int]:
        succs = set()
        informed = mask_nodes(state)
        for out in self._event_out:
            grown = state
            for u in informed:
                grown |= out[u]
            succs.add(grown)
        return succs

    def value(self, state: int) -> Rounds:
        memo = self._memo
        if state in memo:
            return memo[state]
        succs = self._successors(state)
        if state in succs:
            result: Rounds = UNBOUNDED
        else:
            result = 1 + max(self.value(s) for s in succs)
        memo[state] = result
        return result

    def rounds_from(self, u: int) -> Rounds:
        if not 0 <= u < self.family.base.node_count:
            raise ValueError(f"node {u} out of range")
        return self.value(1 << u)


def broadcast_rounds(
    family: EventFamily, u: int, budget: Budget | None = None
) -> Rounds:
    """Worst-case rounds for flooding from ``u``, or UNBOUNDED."""
    return BroadcastGame(family, budget).rounds_from(u)


def optimal_broadcast_rounds(
    family: EventFamily, budget: Budget | None = None
) -> tuple[int, int] | None:
    """Best originator and its worst-case round count; None if unsolvable.

    Only common sources are candidates (any other originator can be
    starved forever), so the minimum is taken over those.
    """
    common = family.common_sources_mask()
    if common == 0:
        return None
    game = BroadcastGame(family, budget)
    best: tuple[int, int] | None = None
    for u in mask_nodes(common):
        value = game.rounds_from(u)
        assert value != UNBOUNDED
        if best is None or value < best[1]:
            best = (u, int(value))
    return best


# ---- connectivity threshold sweep ------------------------------------------------

@dataclass(frozen=True)
class ThresholdRow:
    f: int
    answer: Answer
    expected_solvable: bool
    agrees: bool


def connectivity_threshold_check(
    g: Digraph, f_max: int, max_events: int | None = None
) -> tuple[ThresholdRow, ...]:
    """Consensus verdicts for omission bounds 0..f_max vs the connectivity cut.

    For each global bound f the family of events with at most f missing
    arcs is checked, and the verdict is compared against the prediction
    that consensus is solvable exactly when f is below the vertex
    connectivity of the graph.
    """
    connectivity = vertex_connectivity(g)
    rows = []
    for f in range(f_max + 1):
        family = generate_bounded_omissions(g, f, "global", max_events=max_events)
        verdict = check_consensus(family)
        expected = f < connectivity
        rows.append(
            ThresholdRow(
                f, verdict.answer, expected,
                (verdict.answer is Answer.SOLVABLE) == expected,
            )
        )
    return tuple(rows)


# ---- JSON -----------------------------------------------------------------------

def witness_to_json_dict(witness: Witness | None, family: EventFamily) -> dict | None:
    g = family.base
    if witness is None:
        return None
    if isinstance(witness, CommonSourceWitness):
        return {
            "kind": "common-source",
            "nodes": [g.label(u) for u in mask_nodes(witness.nodes_mask)],
        }
    if isinstance(witness, NoSourceEventWitness):
        return {"kind": "no-source-event", "event": family.name(witness.event)}
    if isinstance(witness, IncompatibilityWitness):
        return {
            "kind": "source-incompatible",
            "events": [family.name(i) for i in witness.events],
            "source_sets": [
                [g.label(u) for u in mask_nodes(m)] for m in witness.source_masks
            ],
        }
    if isinstance(witness, BetaClassWitness):
        return {
            "kind": "class-unbroadcastable",
            "class": [family.name(i) for i in witness.class_events],
            "incompatibility": witness_to_json_dict(witness.incompatibility, family),
        }
    raise TypeError(f"unknown witness type {type(witness)!r}")


def verdict_to_json_dict(verdict: Verdict, family: EventFamily) -> dict:
    return {
        "problem": verdict.problem,
        "answer": verdict.answer.value,
        "rule": verdict.rule,
        "witness": witness_to_json_dict(verdict.witness, family),
        "rounds": None if verdict.rounds is None else (
            "unbounded" if verdict.rounds == UNBOUNDED else int(verdict.rounds)
        ),
        "exit_code": verdict.exit_code,
    }

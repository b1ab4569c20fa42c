"""Communication events and finite event families (mobile omission schemes).

An event is a spanning sub-digraph of a fixed base graph: the arcs that
deliver messages during one round.  A finite family of events describes a
mobile scheme in which any member event may occur in any round.  Families
are the unit of analysis for everything downstream (equivalence classes,
solvability verdicts, simulation, the oracle).

Events carry a cached bitmask over the base graph's canonical arc order,
so set membership, convexity checks and the head-filtered arc sets used
by the indistinguishability relations are single integer operations.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from math import comb
from typing import Iterable, Iterator, Literal, Sequence

from .budget import FamilyCapExceededError, effective_budget
from .graphs import Arc, Digraph, sources_of_arcs

OmissionMetric = Literal["global", "send", "recv"]


@dataclass(frozen=True)
class Event:
    """One letter of the omission alphabet: the arcs delivered in a round."""

    base: Digraph
    arcs: frozenset[Arc]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", frozenset(tuple(a) for a in self.arcs))
        extra = self.arcs - self.base.arcs
        if extra:
            raise ValueError(f"event arcs not in base graph: {sorted(extra)}")

    @cached_property
    def arc_mask(self) -> int:
        bit = self.base.arc_bit
        mask = 0
        for arc in self.arcs:
            mask |= 1 << bit[arc]
        return mask

    @cached_property
    def sorted_arcs(self) -> tuple[Arc, ...]:
        return tuple(sorted(self.arcs))

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        masks = [0] * self.base.node_count
        for tail, head in self.arcs:
            masks[tail] |= 1 << head
        return tuple(masks)

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        masks = [0] * self.base.node_count
        for tail, head in self.arcs:
            masks[head] |= 1 << tail
        return tuple(masks)

    @cached_property
    def sources_mask(self) -> int:
        """Nodes from which every node is reachable inside this event."""
        return sources_of_arcs(self.base.node_count, self.out_masks)

    @cached_property
    def omitted_arcs(self) -> tuple[Arc, ...]:
        return tuple(sorted(self.base.arcs - self.arcs))

    def with_arc(self, arc: Arc) -> "Event":
        return Event(self.base, self.arcs | {arc})

    def in_senders(self, u: int) -> int:
        """Bitmask of nodes with a delivering arc into ``u``."""
        return self.in_masks[u]


def full_event(base: Digraph) -> Event:
    return Event(base, base.arcs)


def event_from_mask(base: Digraph, mask: int) -> Event:
    arcs = frozenset(
        arc for arc, bit in base.arc_bit.items() if mask >> bit & 1
    )
    return Event(base, arcs)


@dataclass(frozen=True)
class EventFamily:
    """Finite ordered set of distinct events over one base graph."""

    base: Digraph
    events: tuple[Event, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(self.events))
        for ev in self.events:
            if ev.base != self.base:
                raise ValueError("all events must share the family's base graph")
        if len({ev.arcs for ev in self.events}) != len(self.events):
            raise ValueError("duplicate events in family")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
            if len(self.names) != len(self.events):
                raise ValueError("names must cover every event")
            if len(set(self.names)) != len(self.names):
                raise ValueError("event names must be unique")

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[Event]:
        return iter(self.events)

    def name(self, index: int) -> str:
        if self.names is not None:
            return self.names[index]
        return f"E{index}"

    @cached_property
    def name_index(self) -> dict[str, int]:
        return {self.name(i): i for i in range(len(self.events))}

    @cached_property
    def mask_index(self) -> dict[int, int]:
        return {ev.arc_mask: i for i, ev in enumerate(self.events)}

    def index_of(self, event: Event) -> int:
        try:
            return self.mask_index[event.arc_mask]
        except KeyError:
            raise KeyError("event not in family") from None

    @cached_property
    def canonical_order(self) -> tuple[int, ...]:
        """Indices sorted by arc list; used for deterministic processing."""
        return tuple(sorted(range(len(self.events)), key=lambda i: self.events[i].sorted_arcs))

    @cached_property
    def union_arc_mask(self) -> int:
        mask = 0
        for ev in self.events:
            mask |= ev.arc_mask
        return mask

    @cached_property
    def source_masks(self) -> tuple[int, ...]:
        return tuple(ev.sources_mask for ev in self.events)

    def common_sources_mask(self) -> int:
        mask = self.base.full_mask
        for b in self.source_masks:
            mask &= b
        return mask


@dataclass(frozen=True)
class InitialConfig:
    """Binary initial value per node."""

    values: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("initial values must be 0 or 1")

    @classmethod
    def uniform(cls, node_count: int, value: int) -> "InitialConfig":
        return cls((value,) * node_count)

    @classmethod
    def from_mapping(cls, g: Digraph, mapping: dict[str, int]) -> "InitialConfig":
        values = [None] * g.node_count
        for label, value in mapping.items():
            values[g.node(label)] = value
        if any(v is None for v in values):
            missing = [g.label(u) for u, v in enumerate(values) if v is None]
            raise ValueError(f"initial value missing for nodes: {missing}")
        return cls(tuple(values))

    @property
    def all_same(self) -> int | None:
        """The common value when the configuration is uniform, else None."""
        if self.values and all(v == self.values[0] for v in self.values):
            return self.values[0]
        return None


def all_initial_configs(node_count: int) -> Iterator[InitialConfig]:
    for values in product((0, 1), repeat=node_count):
        yield InitialConfig(values)


# ---- convexity ---------------------------------------------------------------

@dataclass(frozen=True)
class ConvexityViolation:
    """Triple (left, right, arc): left + arc of right falls outside the family."""

    left: int
    right: int
    arc: Arc


def convexity_violation(family: EventFamily) -> ConvexityViolation | None:
    """First violation of closure under single-arc additions, or None.

    A family is convex when for every pair of member events H, H' and
    every arc a of H', the event H + a is also a member.  Only arcs in
    the union of the family matter, so the scan is |R| * |E| membership
    tests on arc bitmasks.
    """
    if not family.events:
        raise ValueError("convexity is defined for nonempty families")
    members = set(family.mask_index)
    union = family.union_arc_mask
    # For the witness, remember one member event containing each arc bit.
    provider: dict[int, int] = {}
    for idx in family.canonical_order:
        mask = family.events[idx].arc_mask
        bit = 0
        while mask >> bit:
            if mask >> bit & 1:
                provider.setdefault(bit, idx)
            bit += 1
    arc_of_bit = family.base.sorted_arcs
    for idx in family.canonical_order:
        mask = family.events[idx].arc_mask
        missing = union & ~mask
        bit = 0
        while missing >> bit:
            if missing >> bit & 1 and (mask | 1 << bit) not in members:
                return ConvexityViolation(idx, provider[bit], arc_of_bit[bit])
            bit += 1
    return None


def is_convex(family: EventFamily) -> bool:
    return convexity_violation(family) is None


# ---- generators ----------------------------------------------------------------

def _count_bounded(degrees: Sequence[int], f: int) -> int:
    total = 1
    for d in degrees:
        total *= sum(comb(d, k) for k in range(min(f, d) + 1))
    return total


def generate_bounded_omissions(
    base: Digraph,
    f: int,
    metric: OmissionMetric = "global",
    max_events: int | None = None,
) -> EventFamily:
    """All events of ``base`` with at most ``f`` omitted arcs.

    ``metric`` selects how omissions are counted: ``global`` bounds the
    total number of missing arcs, ``send`` bounds each node's missing
    out-arcs, ``recv`` each node's missing in-arcs.  The result is convex
    by construction.  Raises FamilyCapExceededError when the family would
    exceed ``max_events`` (default: the family cap from the budget).
    """
    if f < 0:
        raise ValueError("omission bound must be non-negative")
    cap = max_events if max_events is not None else effective_budget(None).max_family_events
    arcs = base.sorted_arcs
    if metric == "global":
        count = sum(comb(len(arcs), k) for k in range(min(f, len(arcs)) + 1))
        _check_cap(count, cap)
        arc_sets = []
        for k in range(min(f, len(arcs)) + 1):
            for omitted in combinations(arcs, k):
                arc_sets.append(base.arcs - set(omitted))
    elif metric in ("send", "recv"):
        group_of = (lambda a: a[0]) if metric == "send" else (lambda a: a[1])
        groups: list[list[Arc]] = [[] for _ in range(base.node_count)]
        for arc in arcs:
            groups[group_of(arc)].append(arc)
        count = _count_bounded([len(g) for g in groups], f)
        _check_cap(count, cap)
        per_node_choices = [
            [set(ch) for k in range(min(f, len(g)) + 1) for ch in combinations(g, k)]
            for g in groups
        ]
        arc_sets = []
        for omissions in product(*per_node_choices):
            omitted = set().union(*omissions) if omissions else set()
            arc_sets.append(base.arcs - omitted)
    else:
        raise ValueError(f"unknown omission metric {metric!r}")
    events = sorted((Event(base, frozenset(s)) for s in arc_sets),
                    key=lambda ev: ev.sorted_arcs)
    return EventFamily(base, tuple(events))


def _check_cap(count: int, cap: int) -> None:
    if count > cap:
        raise FamilyCapExceededError(
            f"family would contain {count} events, cap is {cap}"
        )


def convex_closure(
    base: Digraph,
    seeds: Iterable[Event],
    max_events: int | None = None,
) -> EventFamily:
    """Smallest convex family containing the seed events."""
    cap = max_events if max_events is not None else effective_budget(None).max_family_events
    seed_masks = [ev.arc_mask for ev in seeds]
    if not seed_masks:
        raise ValueError("convex closure needs at least one seed event")
    union = 0
    for m in seed_masks:
        union |= m
    closed: set[int] = set()
    frontier = list(dict.fromkeys(seed_masks))
    while frontier:
        mask = frontier.pop()
        if mask in closed:
            continue
        closed.add(mask)
        if len(closed) > cap:
            raise FamilyCapExceededError(
                f"convex closure exceeds cap of {cap} events"
            )
        missing = union & ~mask
        bit = 0
        while missing >> bit:
            if missing >> bit & 1:
                grown = mask | 1 << bit
                if grown not in closed:
                    frontier.append(grown)
            bit += 1
    events = sorted((event_from_mask(base, m) for m in closed),
                    key=lambda ev: ev.sorted_arcs)
    return EventFamily(base, tuple(events))


# ---- JSON ----------------------------------------------------------------------

def family_to_json_dict(family: EventFamily) -> dict:
    from .graphs import digraph_to_json_dict

    g = family.base
    return {
        "graph": digraph_to_json_dict(g),
        "events": [
            {
                "name": family.name(i),
                "arcs": [[g.label(t), g.label(h)] for t, h in ev.sorted_arcs],
            }
            for i, ev in enumerate(family.events)
        ],
    }


def family_from_json_dict(data: dict) -> EventFamily:
    from .graphs import digraph_from_json_dict

    try:
        base = digraph_from_json_dict(data["graph"])
        raw_events = list(data["events"])
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed family JSON: {exc}") from exc
    events = []
    names = []
    for i, entry in enumerate(raw_events):
        try:
            arcs = frozenset(
                (base.node(str(t)), base.node(str(h))) for t, h in entry["arcs"]
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed event entry {i}: {exc}") from exc
        events.append(Event(base, arcs))
        names.append(str(entry.get("name", f"E{i}")))
    return EventFamily(base, tuple(events), tuple(names))

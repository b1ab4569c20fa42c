"""Indistinguishability relations between events and their coarsest closure.

Two events are related through a third event K when the sources of K
receive exactly the same arcs under both: the sources, collectively,
cannot tell the two events apart in a single round.  The union of these
relations over all member events, transitively closed, yields a first
partition.  The final partition ("beta") additionally requires that the
relating chains stay inside each class: both the intermediate events and
the witnessing events K must belong to the class being formed.

That closure condition is not constructive, so the partition is computed
as a greatest fixed point: start from the transitive-closure classes and
repeatedly drop relation edges whose witness K left the class, splitting
classes into the connected components of the surviving edges, until
stable.  Each stabilized class keeps a spanning tree of surviving edges,
so every intra-class pair has a replayable chain whose intermediates and
witnesses all live in the class.  The result is self-verified before it
is returned; a failure raises instead of silently producing a partition
that does not satisfy the closure condition.

Events without sources would relate every pair (their source set is
empty, so nothing is observed); they are never used as witnesses here.
Solvability analysis handles them separately as immediately fatal.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .events import Event, EventFamily
from .graphs import Arc, mask_nodes


def in_x(event: Event, x_mask: int) -> frozenset[Arc]:
    """Arcs of the event whose head lies in the node set ``x_mask``."""
    return frozenset(a for a in event.arcs if x_mask >> a[1] & 1)


def _in_x_arc_mask(event: Event, x_mask: int) -> int:
    """Same filter as :func:`in_x`, as a bitmask over the base arc order."""
    in_bits = event.base.in_arc_bits
    head_filter = 0
    u = 0
    while x_mask >> u:
        if x_mask >> u & 1:
            head_filter |= in_bits[u]
        u += 1
    return event.arc_mask & head_filter


def alpha_related(left: Event, right: Event, k: Event) -> bool:
    """True when the sources of ``k`` receive identical arcs under both events."""
    if left.base != right.base or left.base != k.base:
        raise ValueError("events must share a base graph")
    b = k.sources_mask
    return _in_x_arc_mask(left, b) == _in_x_arc_mask(right, b)


@dataclass(frozen=True)
class AlphaWitness:
    """Indices into a family: ``left`` and ``right`` related through ``witness``."""

    left: int
    right: int
    witness: int

    def holds(self, family: EventFamily) -> bool:
        return alpha_related(
            family.events[self.left],
            family.events[self.right],
            family.events[self.witness],
        )


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _group_members(family: EventFamily, members: list[int], witnesses: list[int]):
    """Yield (witness_index, groups) where each group shares the observed arcs.

    Witnesses with an empty source set are skipped: they observe nothing
    and would relate every pair vacuously.
    """
    seen_source_masks: set[int] = set()
    for k in witnesses:
        b = family.source_masks[k]
        if b == 0 or b in seen_source_masks:
            continue
        seen_source_masks.add(b)
        groups: dict[int, list[int]] = {}
        for i in members:
            key = _in_x_arc_mask(family.events[i], b)
            groups.setdefault(key, []).append(i)
        yield k, [g for g in groups.values() if len(g) > 1]


def alpha_star(family: EventFamily) -> tuple[tuple[int, ...], ...]:
    """Partition of event indices by the transitive closure of the relations.

    Classes are the connected components of the graph that joins two
    events whenever some member event's sources cannot distinguish them.
    """
    order = list(family.canonical_order)
    uf = _UnionFind(len(family))
    for _k, groups in _group_members(family, order, order):
        for group in groups:
            for other in group[1:]:
                uf.union(group[0], other)
    return _partition_from_uf(uf, len(family))


def _partition_from_uf(uf: _UnionFind, n: int) -> tuple[tuple[int, ...], ...]:
    classes: dict[int, list[int]] = {}
    for i in range(n):
        classes.setdefault(uf.find(i), []).append(i)
    return tuple(tuple(sorted(c)) for c in sorted(classes.values()))


@dataclass(frozen=True)
class BetaPartition:
    """Stabilized partition plus spanning witness edges for each class."""

    family: EventFamily
    classes: tuple[tuple[int, ...], ...]
    class_edges: tuple[tuple[AlphaWitness, ...], ...]
    iterations: int

    @cached_property
    def class_of(self) -> tuple[int, ...]:
        owner = [0] * len(self.family)
        for ci, members in enumerate(self.classes):
            for i in members:
                owner[i] = ci
        return tuple(owner)

    def witness_chain(self, left: int, right: int) -> tuple[AlphaWitness, ...]:
        """Chain of witnesses joining two events of the same class.

        The chain walks the class's spanning tree, so every intermediate
        event and every witness belongs to the class of the endpoints.
        """
        ci = self.class_of[left]
        if self.class_of[right] != ci:
            raise ValueError("events are in different classes")
        if left == right:
            return ()
        adjacency: dict[int, list[tuple[int, AlphaWitness]]] = {}
        for edge in self.class_edges[ci]:
            adjacency.setdefault(edge.left, []).append((edge.right, edge))
            adjacency.setdefault(edge.right, []).append((edge.left, edge))
        prev: dict[int, tuple[int, AlphaWitness]] = {left: (left, None)}  # type: ignore[dict-item]
        queue = deque([left])
        while queue:
            x = queue.popleft()
            if x == right:
                break
            for y, edge in adjacency.get(x, ()):
                if y not in prev:
                    prev[y] = (x, edge)
                    queue.append(y)
        chain: list[AlphaWitness] = []
        node = right
        while node != left:
            node, edge = prev[node]
            chain.append(edge)
        chain.reverse()
        return tuple(chain)

    def verify(self) -> bool:
        """Replay every stored edge and recheck the closure condition."""
        for ci, members in enumerate(self.classes):
            member_set = set(members)
            uf = _UnionFind(len(self.family))
            for edge in self.class_edges[ci]:
                if edge.left not in member_set or edge.right not in member_set:
                    return False
                if edge.witness not in member_set:
                    return False
                if not edge.holds(self.family):
                    return False
                uf.union(edge.left, edge.right)
            roots = {uf.find(i) for i in members}
            if len(roots) != 1 and len(members) > 1:
                return False
        return True

    def to_json_dict(self) -> dict:
        fam = self.family
        return {
            "iterations": self.iterations,
            "classes": [
                {
                    "events": [fam.name(i) for i in members],
                    "witness_edges": [
                        {
                            "left": fam.name(e.left),
                            "right": fam.name(e.right),
                            "witness": fam.name(e.witness),
                        }
                        for e in self.class_edges[ci]
                    ],
                }
                for ci, members in enumerate(self.classes)
            ],
        }


def beta_partition(family: EventFamily) -> BetaPartition:
    """Greatest fixed point of the within-class witness refinement.

    Starting from the transitive-closure partition, each round rebuilds
    every class using only relation edges whose witness currently lies in
    that class, then splits the class into the connected components of
    the surviving edges.  Splitting can only remove witnesses from a
    class, so the refinement is monotone and stabilizes after at most
    one round per event.
    """
    classes = [list(c) for c in alpha_star(family)]
    iterations = 0
    while True:
        iterations += 1
        next_classes: list[list[int]] = []
        changed = False
        for members in classes:
            if len(members) == 1:
                next_classes.append(members)
                continue
            uf = _UnionFind(len(family))
            for _k, groups in _group_members(family, members, members):
                for group in groups:
                    for other in group[1:]:
                        uf.union(group[0], other)
            pieces: dict[int, list[int]] = {}
            for i in members:
                pieces.setdefault(uf.find(i), []).append(i)
            if len(pieces) > 1:
                changed = True
            next_classes.extend(sorted(p) for p in pieces.values())
        classes = sorted(next_classes)
        if not changed:
            break
    result = BetaPartition(
        family,
        tuple(tuple(c) for c in classes),
        tuple(_spanning_edges(family, c) for c in classes),
        iterations,
    )
    if not result.verify():
        raise AssertionError(
            "refinement produced a partition that fails its own closure check"
        )
    return result


def _spanning_edges(family: EventFamily, members: list[int]) -> tuple[AlphaWitness, ...]:
    """Spanning tree of the surviving relation edges within one class."""
    if len(members) == 1:
        return ()
    # Map each distinct source mask back to a concrete in-class witness.
    witness_for_mask: dict[int, int] = {}
    for k in members:
        b = family.source_masks[k]
        if b != 0:
            witness_for_mask.setdefault(b, k)
    uf = _UnionFind(len(family))
    edges: list[AlphaWitness] = []
    for k, groups in _group_members(family, members, members):
        b = family.source_masks[k]
        witness = witness_for_mask[b]
        for group in groups:
            for other in group[1:]:
                if uf.union(group[0], other):
                    edges.append(AlphaWitness(group[0], other, witness))
    return tuple(edges)


# ---- reporting helpers -------------------------------------------------------

def class_source_sets(bp: BetaPartition) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Per class, the source sets of its member events (node tuples)."""
    fam = bp.family
    return tuple(
        tuple(mask_nodes(fam.source_masks[i]) for i in members)
        for members in bp.classes
    )

from __future__ import annotations

import random
from dataclasses import replace

import pytest

from omlab import (
    AlphaWitness,
    Event,
    EventFamily,
    alpha_related,
    alpha_star,
    beta_partition,
    complete_digraph,
    cycle_digraph,
    generate_bounded_omissions,
    in_x,
    node_mask,
)

from conftest import A, B, C, D, BLACK, WHITE


# ---- in_x -------------------------------------------------------------------

def test_in_x_empty_set(omit_white):
    assert in_x(omit_white, 0) == frozenset()


def test_in_x_fig_events(fig12):
    h1, h2 = fig12.events
    assert in_x(h1, node_mask([A])) == frozenset({(C, A), (D, A)})
    assert in_x(h2, node_mask([A])) == frozenset({(C, A), (D, A), (B, A)})


def test_in_x_two_node(omit_white, ok_event):
    assert in_x(omit_white, node_mask([WHITE])) == frozenset({(BLACK, WHITE)})
    assert in_x(ok_event, node_mask([WHITE])) == frozenset({(BLACK, WHITE)})


# ---- alpha ---------------------------------------------------------------------

def test_alpha_omit_white_vs_ok(omit_white, omit_black, ok_event):
    """The sources of the omit-black event (just white) see the same arcs
    under omit-white and under full delivery."""
    assert alpha_related(omit_white, ok_event, omit_black)


def test_alpha_reflexive(fig12):
    h1, h2 = fig12.events
    assert alpha_related(h1, h1, h2)


def test_alpha_fig_events_differ(fig12):
    h1, h2 = fig12.events
    assert not alpha_related(h1, h2, h1)


def test_alpha_requires_shared_base(ok_event):
    other = complete_digraph(2)
    foreign = Event(other, other.arcs)
    with pytest.raises(ValueError):
        alpha_related(ok_event, foreign, ok_event)


# ---- alpha star -------------------------------------------------------------------

def test_alpha_star_o1_single_class(o1):
    assert alpha_star(o1) == ((0, 1, 2),)


def test_alpha_star_h_two_singletons(h_scheme):
    assert alpha_star(h_scheme) == ((0,), (1,))


def test_alpha_star_singleton(two_node, ok_event):
    family = EventFamily(two_node, (ok_event,))
    assert alpha_star(family) == ((0,),)


# ---- beta ----------------------------------------------------------------------------

def test_beta_o1_single_class(o1):
    bp = beta_partition(o1)
    assert bp.classes == ((0, 1, 2),)
    assert bp.verify()


def test_beta_h_two_classes(h_scheme):
    bp = beta_partition(h_scheme)
    assert len(bp.classes) == 2


def test_beta_fig12_two_singletons(fig12):
    bp = beta_partition(fig12)
    assert bp.classes == ((0,), (1,))


def test_beta_refines_alpha_star():
    rng = random.Random(37)
    for _ in range(40):
        g = complete_digraph(rng.randint(2, 3))
        events = {
            frozenset(a for a in g.arcs if rng.random() < 0.65)
            for _ in range(rng.randint(1, 5))
        }
        family = EventFamily(g, tuple(Event(g, arcs) for arcs in sorted(events, key=sorted)))
        coarse = {frozenset(c) for c in alpha_star(family)}
        bp = beta_partition(family)
        assert bp.verify()
        for members in bp.classes:
            assert any(set(members) <= c for c in coarse)
        assert bp.iterations <= len(family) + 1


def test_beta_witness_chain_replays(o1):
    bp = beta_partition(o1)
    chain = bp.witness_chain(0, 2)
    assert chain, "distinct events in one class need a nonempty chain"
    for edge in chain:
        assert edge.holds(o1)
        assert bp.class_of[edge.left] == bp.class_of[0]
        assert bp.class_of[edge.witness] == bp.class_of[0]
    # The chain must walk from one endpoint to the other.
    endpoints = {chain[0].left, chain[0].right}
    assert 0 in endpoints
    assert chain[-1].left == 2 or chain[-1].right == 2


def test_beta_witness_chain_same_event(o1):
    assert beta_partition(o1).witness_chain(1, 1) == ()


def test_beta_witness_chain_rejects_cross_class(h_scheme):
    bp = beta_partition(h_scheme)
    with pytest.raises(ValueError):
        bp.witness_chain(0, 1)


def test_beta_verify_catches_tampering(o1):
    bp = beta_partition(o1)
    # Forge a relation that does not hold: the sources of "ok" (both nodes)
    # can tell omit-white and omit-black apart.
    forged = (AlphaWitness(left=1, right=2, witness=0),)
    tampered = replace(bp, class_edges=(forged,))
    assert not tampered.verify()


def test_alpha_witness_holds(o1):
    # ok ~ omit-white through omit-black, per the source-set computation.
    assert AlphaWitness(left=0, right=1, witness=2).holds(o1)
    assert not AlphaWitness(left=1, right=2, witness=0).holds(o1)


def test_beta_tolerates_no_source_events(two_node, omit_white, omit_black):
    silent = Event(two_node, frozenset())
    family = EventFamily(two_node, (omit_white, omit_black, silent))
    bp = beta_partition(family)
    assert bp.verify()
    # The silent event never acts as a witness: it observes nothing.
    for edges in bp.class_edges:
        for edge in edges:
            assert edge.witness != 2


def test_single_class_for_incompatible_bounded_families():
    """Convex families with sources but no common source collapse to one class."""
    for g, f in [
        (complete_digraph(2), 1),
        (cycle_digraph(4), 2),
        (complete_digraph(4), 3),
    ]:
        family = generate_bounded_omissions(g, f, "global")
        masks = [m for m in family.source_masks]
        assert all(masks), "every event should still have a source"
        inter = g.full_mask
        for m in masks:
            inter &= m
        assert inter == 0, "chosen bound should kill the common source"
        assert len(beta_partition(family).classes) == 1


def test_beta_json_report(o1):
    data = beta_partition(o1).to_json_dict()
    assert len(data["classes"]) == 1
    names = data["classes"][0]["events"]
    assert set(names) == {"ok", "omit-white", "omit-black"}
    assert data["classes"][0]["witness_edges"]

from __future__ import annotations

import random
from math import comb

import pytest

from omlab import (
    Event,
    EventFamily,
    FamilyCapExceededError,
    InitialConfig,
    all_initial_configs,
    complete_digraph,
    convex_closure,
    convexity_violation,
    family_from_json_dict,
    family_to_json_dict,
    full_event,
    generate_bounded_omissions,
    hypercube_digraph,
    is_convex,
    node_mask,
    symmetric_digraph,
)

from conftest import BLACK, WHITE, random_connected_symmetric


# ---- events -----------------------------------------------------------------

def test_event_arcs_must_be_subset(two_node):
    with pytest.raises(ValueError):
        Event(two_node, frozenset({(0, 1), (1, 1)}))


def test_event_sources(omit_white, omit_black, ok_event):
    assert omit_white.sources_mask == node_mask([BLACK])
    assert omit_black.sources_mask == node_mask([WHITE])
    assert ok_event.sources_mask == node_mask([WHITE, BLACK])


def test_empty_event_has_no_source(two_node):
    assert Event(two_node, frozenset()).sources_mask == 0


def test_family_rejects_duplicates(two_node, ok_event):
    with pytest.raises(ValueError):
        EventFamily(two_node, (ok_event, Event(two_node, two_node.arcs)))


def test_family_rejects_foreign_base(two_node, ok_event):
    other = complete_digraph(2)
    with pytest.raises(ValueError):
        EventFamily(other, (ok_event,))


def test_family_names_and_lookup(o1):
    assert o1.names == ("ok", "omit-white", "omit-black")
    assert o1.name_index["omit-black"] == 2
    assert o1.index_of(o1.events[1]) == 1


# ---- convexity -----------------------------------------------------------------

def test_o1_is_convex(o1):
    assert is_convex(o1)


def test_h_scheme_not_convex(h_scheme):
    violation = convexity_violation(h_scheme)
    assert violation is not None
    left = h_scheme.events[violation.left]
    right = h_scheme.events[violation.right]
    # The violation must be replayable: the arc comes from the right event
    # and adding it to the left event leaves the family.
    assert violation.arc in right.arcs
    grown = left.arcs | {violation.arc}
    assert grown not in {ev.arcs for ev in h_scheme.events}


def test_singleton_family_is_convex(two_node, omit_white):
    assert is_convex(EventFamily(two_node, (omit_white,)))


def test_convexity_rejects_empty_family(two_node):
    with pytest.raises(ValueError):
        is_convex(EventFamily(two_node, ()))


# ---- bounded omission generator ---------------------------------------------------

def test_two_node_one_omission_is_o1(two_node, o1):
    family = generate_bounded_omissions(two_node, 1, "global")
    assert {ev.arcs for ev in family} == {ev.arcs for ev in o1}


def test_zero_omissions_is_base_only(two_node):
    family = generate_bounded_omissions(two_node, 0, "global")
    assert len(family) == 1
    assert family.events[0].arcs == two_node.arcs


def test_hypercube_one_omission_count():
    q3 = hypercube_digraph(3)
    family = generate_bounded_omissions(q3, 1, "global")
    assert len(family) == 1 + 24


def test_global_count_formula():
    rng = random.Random(23)
    for _ in range(20):
        g = random_connected_symmetric(rng, rng.randint(2, 4))
        f = rng.randint(0, 2)
        family = generate_bounded_omissions(g, f, "global")
        assert len(family) == sum(comb(len(g.arcs), k) for k in range(f + 1))


def test_send_metric_two_node(two_node):
    family = generate_bounded_omissions(two_node, 1, "send")
    # Each node may drop its single out-arc or not: 4 events incl. silence.
    assert len(family) == 4
    assert frozenset() in {ev.arcs for ev in family}


def test_recv_metric_matches_send_on_symmetric_two_node(two_node):
    send = generate_bounded_omissions(two_node, 1, "send")
    recv = generate_bounded_omissions(two_node, 1, "recv")
    assert {ev.arcs for ev in send} == {ev.arcs for ev in recv}


@pytest.mark.parametrize("metric", ["global", "send", "recv"])
def test_bounded_families_are_convex(metric):
    rng = random.Random(29)
    for _ in range(12):
        g = random_connected_symmetric(rng, rng.randint(2, 5))
        f = rng.randint(0, 2)
        family = generate_bounded_omissions(g, f, metric, max_events=1 << 16)
        assert is_convex(family)


def test_family_cap_is_a_distinct_error():
    q3 = hypercube_digraph(3)
    with pytest.raises(FamilyCapExceededError):
        generate_bounded_omissions(q3, 3, "global", max_events=100)


def test_negative_bound_rejected(two_node):
    with pytest.raises(ValueError):
        generate_bounded_omissions(two_node, -1)


def test_generator_output_is_canonically_ordered(two_node):
    family = generate_bounded_omissions(two_node, 2, "global")
    orders = [ev.sorted_arcs for ev in family]
    assert orders == sorted(orders)


# ---- convex closure  -----------------------------------------------------------------

def test_closure_of_h_scheme_is_o1(two_node, omit_white, omit_black, o1):
    closed = convex_closure(two_node, [omit_white, omit_black])
    assert {ev.arcs for ev in closed} == {ev.arcs for ev in o1}


def test_closure_is_convex_and_contains_seeds():
    rng = random.Random(31)
    for _ in range(20):
        g = random_connected_symmetric(rng, rng.randint(3, 5))
        seeds = [
            Event(g, frozenset(a for a in g.arcs if rng.random() < 0.7))
            for _ in range(rng.randint(1, 3))
        ]
        closed = convex_closure(g, seeds, max_events=4096)
        members = {ev.arcs for ev in closed}
        assert all(s.arcs in members for s in seeds)
        assert is_convex(closed)


def test_closure_cap(two_node):
    seeds = [Event(two_node, frozenset()), full_event(two_node)]
    with pytest.raises(FamilyCapExceededError):
        convex_closure(two_node, seeds, max_events=2)


# ---- initial configurations --------------------------------------------------------

def test_initial_config_validation():
    with pytest.raises(ValueError):
        InitialConfig((0, 2))


def test_initial_config_uniform_detection():
    assert InitialConfig((1, 1, 1)).all_same == 1
    assert InitialConfig((0, 1)).all_same is None


def test_initial_config_from_mapping(two_node):
    init = InitialConfig.from_mapping(two_node, {"white": 0, "black": 1})
    assert init.values == (0, 1)
    with pytest.raises(ValueError):
        InitialConfig.from_mapping(two_node, {"white": 0})


def test_all_initial_configs_enumeration():
    configs = list(all_initial_configs(2))
    assert [c.values for c in configs] == [(0, 0), (0, 1), (1, 0), (1, 1)]


# ---- JSON --------------------------------------------------------------------------

def test_family_json_round_trip(fig12):
    data = family_to_json_dict(fig12)
    again = family_from_json_dict(data)
    assert again == fig12
    assert family_to_json_dict(again) == data


def test_family_json_rejects_bad_arc(two_node):
    data = family_to_json_dict(EventFamily(two_node, (full_event(two_node),)))
    data["events"][0]["arcs"].append(["white", "nope"])
    with pytest.raises(ValueError):
        family_from_json_dict(data)

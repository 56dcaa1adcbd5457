import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import grown_genome, make_genome
from tdneat.config import Config
from tdneat.genome import (
    INITIAL_HIDDEN_ID, OUTPUT_ID, DanglingReferenceError, DuplicateInnovationError,
    GenomeInvariantError, InnovationRegistry, MalformedGenomeError, compatibility_distance,
    deserialize, initial_genome, serialize, topological_order, u_node, validate, y_node,
)

CFG = Config()


def aligned_distance(a, b, c_disjoint, c_weight):
    """Gene-by-gene alignment written out longhand."""
    innovs = sorted(set(a.connections) | set(b.connections))
    disjoint, diffs = 0, []
    for i in innovs:
        if i in a.connections and i in b.connections:
            diffs.append(abs(a.connections[i].weight - b.connections[i].weight))
        else:
            disjoint += 1
    n = max(len(a.connections), len(b.connections), 1)
    d = c_disjoint * disjoint / n
    if diffs:
        d += c_weight * sum(diffs) / len(diffs)
    return d


class DrawStub:
    """Random source whose two randint calls return fixed delays."""

    def __init__(self, du, dy):
        self._delays = [du, dy]
        self._rng = random.Random(0)

    def randint(self, a, b):
        return self._delays.pop(0)

    def gauss(self, mu, sigma):
        return self._rng.gauss(mu, sigma)


def test_initial_genome_counts():
    g = initial_genome(CFG, DrawStub(3, 2), InnovationRegistry())
    assert (g.du, g.dy) == (3, 2)
    assert len(g.input_ids) == 6
    assert g.hidden_ids == [INITIAL_HIDDEN_ID]
    assert len(g.nodes) == 8
    assert len(g.connections) == 7
    validate(g)


def test_initial_genome_degenerate_delays():
    g = initial_genome(CFG, DrawStub(0, 0), InnovationRegistry())
    assert g.input_ids == [u_node(0)]
    assert len(g.connections) == 2


def test_initial_genome_seeded_runs_identical():
    a = initial_genome(CFG, random.Random(42), InnovationRegistry())
    b = initial_genome(CFG, random.Random(42), InnovationRegistry())
    assert serialize(a) == serialize(b)


def test_initial_delays_cover_range():
    rng, reg = random.Random(0), InnovationRegistry()
    draws = [initial_genome(CFG, rng, reg) for _ in range(2000)]
    assert {g.du for g in draws} == set(range(21))
    assert {g.dy for g in draws} == set(range(21))


def test_registry_reuses_numbers():
    reg = InnovationRegistry()
    a = reg.connection(u_node(0), 1)
    b = reg.connection(y_node(1), 1)
    assert a != b
    assert reg.connection(u_node(0), 1) == a


@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), max_size=60))
def test_registry_is_injective(pairs):
    reg = InnovationRegistry()
    numbers = {p: reg.connection(*p) for p in pairs}
    assert len(set(numbers.values())) == len(numbers)
    assert all(reg.connection(*p) == n for p, n in numbers.items())


def test_distance_identity():
    g = grown_genome(1)
    assert compatibility_distance(g, g, CFG) == 0.0


def test_distance_weight_term():
    conns = [(u_node(0), 1, 0.1), (u_node(1), 1, 0.2), (y_node(1), 1, 0.3),
             (1, OUTPUT_ID, 0.4), (u_node(0), OUTPUT_ID, 0.5)]
    reg = InnovationRegistry()
    a = make_genome(1, 1, conns, {1: 0.0}, reg)
    conns[2] = (y_node(1), 1, 0.7)
    b = make_genome(1, 1, conns, {1: 0.0}, reg)
    assert compatibility_distance(a, b, CFG.replace(weight_coefficient=0.5)) == pytest.approx(0.04)


def test_distance_disjoint_only():
    a = make_genome(2, 0, [(u_node(i), 1, 0.5) for i in range(3)], {1: 0.0}, innovations=[1, 2, 3])
    b = make_genome(4, 0, [(u_node(i), 1, 0.5) for i in range(5)], {1: 0.0},
                    innovations=[4, 5, 6, 7, 8])
    expected = aligned_distance(a, b, 1.0, 0.5)
    assert expected == pytest.approx(1.6)
    assert compatibility_distance(a, b, CFG) == pytest.approx(expected)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_distance_matches_alignment_and_is_symmetric(s1, s2):
    reg = InnovationRegistry()
    a, b = grown_genome(s1, registry=reg), grown_genome(s2, registry=reg)
    d = compatibility_distance(a, b, CFG)
    assert d == pytest.approx(aligned_distance(a, b, 1.0, 0.5))
    assert d == compatibility_distance(b, a, CFG) >= 0


def test_topological_order_puts_inputs_first():
    g = make_genome(1, 1, [(u_node(0), 1, 1.0), (u_node(1), 1, 1.0), (y_node(1), 1, 1.0),
                           (1, OUTPUT_ID, 1.0)], {1: 0.0})
    order = topological_order(g.nodes, g.enabled_pairs())
    assert order[-2:] == [1, OUTPUT_ID]
    assert set(order[:3]) == {u_node(0), u_node(1), y_node(1)}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 25))
def test_grown_genomes_keep_invariants(seed, steps):
    g = grown_genome(seed, steps)
    validate(g)
    assert len(g.input_ids) == g.du + 1 + g.dy


# -- serialization -------------------------------------------------------------

def test_round_trip_minimal():
    g = make_genome(0, 0, [(u_node(0), OUTPUT_ID, 0.7)])
    assert deserialize(serialize(g)) == g


def test_round_trip_disabled_flag():
    g = make_genome(0, 1, [(u_node(0), 1, 0.3), (y_node(1), 1, -1.25, False), (1, OUTPUT_ID, 2.0)],
                    {1: 0.1})
    back = deserialize(serialize(g))
    assert back == g
    assert [c.enabled for c in back.connections.values()] == [True, False, True]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_grown(seed):
    g = grown_genome(seed)
    g.fitness = -1.2345678901234567
    back = deserialize(serialize(g))
    assert back == g and (back.du, back.dy) == (g.du, g.dy)
    assert back.fitness == g.fitness
    assert serialize(back) == serialize(g)


def _doc(g):
    return json.loads(serialize(g))


def test_deserialize_dangling_reference():
    doc = _doc(make_genome(0, 0, [(u_node(0), OUTPUT_ID, 0.7)]))
    doc["connections"][0]["out"] = 99
    with pytest.raises(DanglingReferenceError, match="missing node 99"):
        deserialize(json.dumps(doc))


def test_deserialize_duplicate_innovation():
    doc = _doc(make_genome(1, 0, [(u_node(0), OUTPUT_ID, 0.7), (u_node(1), OUTPUT_ID, 0.1)]))
    doc["connections"][1]["innovation"] = doc["connections"][0]["innovation"]
    with pytest.raises(DuplicateInnovationError, match="duplicate innovation"):
        deserialize(json.dumps(doc))


@pytest.mark.parametrize("text", ["", "{", "[]", '{"du": 0}', '{"du": 0, "dy": 0, "nodes": 3, "connections": []}'])
def test_deserialize_malformed(text):
    with pytest.raises(MalformedGenomeError):
        deserialize(text)


def test_deserialize_rejects_wrong_input_count():
    doc = _doc(make_genome(1, 0, [(u_node(0), OUTPUT_ID, 0.7)]))
    doc["du"] = 3
    with pytest.raises(GenomeInvariantError, match="input nodes"):
        deserialize(json.dumps(doc))


def test_validate_rejects_cycle():
    g = make_genome(0, 0, [(u_node(0), 1, 1.0), (1, 2, 1.0), (2, 1, 1.0), (2, OUTPUT_ID, 1.0)],
                    {1: 0.0, 2: 0.0})
    with pytest.raises(GenomeInvariantError, match="cycle"):
        validate(g)


def test_validate_rejects_edge_into_input():
    g = make_genome(1, 0, [(u_node(0), u_node(1), 1.0)])
    with pytest.raises(GenomeInvariantError, match="feeds an input"):
        validate(g)

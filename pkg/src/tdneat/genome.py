"""Genome encoding: node and connection genes plus the two delay genes.

Node ids are stable across the whole run. The output node is always ``0``,
input nodes are negative and derived from their (signal, lag) pair, and hidden
nodes get positive ids handed out by :class:`InnovationRegistry`.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

from tdneat.config import Config

OUTPUT_ID = 0
INITIAL_HIDDEN_ID = 1

INPUT_U = "input-u"
INPUT_Y = "input-y"
HIDDEN = "hidden"
OUTPUT = "output"
NODE_KINDS = (INPUT_U, INPUT_Y, HIDDEN, OUTPUT)


class GenomeError(ValueError):
    """Base class for genome validation and parsing failures."""


class MalformedGenomeError(GenomeError):
    pass


class DanglingReferenceError(GenomeError):
    pass


class DuplicateInnovationError(GenomeError):
    pass


class GenomeInvariantError(GenomeError):
    pass


def u_node(lag: int) -> int:
    return -(2 * lag + 1)


def y_node(lag: int) -> int:
    if lag < 1:
        raise ValueError("output lags start at 1")
    return -2 * lag


def input_ids(du: int, dy: int) -> list[int]:
    """Input node ids in evaluation order: u lags 0..du, then y lags 1..dy."""
    return [u_node(i) for i in range(du + 1)] + [y_node(j) for j in range(1, dy + 1)]


@dataclass(frozen=True)
class NodeGene:
    id: int
    kind: str
    lag: int | None = None
    bias: float = 0.0

    @property
    def is_input(self) -> bool:
        return self.kind in (INPUT_U, INPUT_Y)


@dataclass(frozen=True)
class ConnectionGene:
    innovation: int
    in_node: int
    out_node: int
    weight: float
    enabled: bool = True


def input_gene(node_id: int) -> NodeGene:
    if node_id >= 0:
        raise ValueError(f"{node_id} is not an input node id")
    if node_id % 2:
        return NodeGene(node_id, INPUT_U, (-node_id - 1) // 2)
    return NodeGene(node_id, INPUT_Y, -node_id // 2)


@dataclass
class Genome:
    du: int
    dy: int
    nodes: dict[int, NodeGene]
    connections: dict[int, ConnectionGene]
    fitness: float | None = field(default=None, compare=False)

    @property
    def input_ids(self) -> list[int]:
        return input_ids(self.du, self.dy)

    @property
    def hidden_ids(self) -> list[int]:
        return sorted(k for k, n in self.nodes.items() if n.kind == HIDDEN)

    def enabled_pairs(self) -> list[tuple[int, int]]:
        return [(c.in_node, c.out_node) for c in self.connections.values() if c.enabled]

    def pairs(self) -> set[tuple[int, int]]:
        return {(c.in_node, c.out_node) for c in self.connections.values()}

    def copy(self) -> "Genome":
        # genes are frozen, so shallow dict copies suffice
        return Genome(self.du, self.dy, dict(self.nodes), dict(self.connections), self.fitness)

    def size(self) -> tuple[int, int]:
        return len(self.nodes), sum(c.enabled for c in self.connections.values())


class InnovationRegistry:
    """Historical markings shared by every genome of one run."""

    def __init__(self):
        self._innovations: dict[tuple[int, int], int] = {}
        self._split_nodes: dict[int, int] = {}
        self._next_innovation = 1
        self._next_node = INITIAL_HIDDEN_ID + 1

    def connection(self, in_node: int, out_node: int) -> int:
        key = (in_node, out_node)
        innov = self._innovations.get(key)
        if innov is None:
            innov = self._innovations[key] = self._next_innovation
            self._next_innovation += 1
        return innov

    def new_node(self) -> int:
        node = self._next_node
        self._next_node += 1
        return node

    def split_node(self, innovation: int, existing: dict) -> int:
        """Node id for splitting connection ``innovation``.

        Genomes splitting the same connection share the node id, unless the
        id is already taken in ``existing`` (the connection was split before).
        """
        node = self._split_nodes.get(innovation)
        if node is None or node in existing:
            node = self.new_node()
            self._split_nodes.setdefault(innovation, node)
        return node


def reaches(pairs, start: int, target: int) -> bool:
    """True if ``target`` is reachable from ``start`` along directed ``pairs``."""
    succ: dict[int, list[int]] = {}
    for a, b in pairs:
        succ.setdefault(a, []).append(b)
    stack, seen = [start], {start}
    while stack:
        node = stack.pop()
        if node == target:
            return True
        for nxt in succ.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


def creates_cycle(pairs, in_node: int, out_node: int) -> bool:
    return in_node == out_node or reaches(pairs, out_node, in_node)


def topological_order(node_ids, pairs) -> list[int]:
    """Deterministic topological order; raises ``graphlib.CycleError``."""
    preds: dict[int, set[int]] = {n: set() for n in node_ids}
    for a, b in pairs:
        preds[b].add(a)
    sorter = TopologicalSorter(preds)
    sorter.prepare()
    order = []
    while sorter.is_active():
        ready = sorted(sorter.get_ready(), key=lambda n: (n >= 0, n == OUTPUT_ID, abs(n)))
        order.extend(ready)
        sorter.done(*ready)
    return order


def validate(genome: Genome) -> None:
    """Raise :class:`GenomeError` if any genome invariant is broken."""
    if genome.du < 0 or genome.dy < 0:
        raise GenomeInvariantError(f"negative delay du={genome.du} dy={genome.dy}")
    expected = set(input_ids(genome.du, genome.dy))
    actual = {k for k, n in genome.nodes.items() if n.is_input}
    if actual != expected:
        raise GenomeInvariantError(
            f"input nodes {sorted(actual)} do not match du={genome.du}, dy={genome.dy}")
    outputs = [k for k, n in genome.nodes.items() if n.kind == OUTPUT]
    if outputs != [OUTPUT_ID]:
        raise GenomeInvariantError(f"expected exactly one output node 0, got {outputs}")
    for key, node in genome.nodes.items():
        if key != node.id:
            raise GenomeInvariantError(f"node stored under {key} has id {node.id}")
        if node.is_input and node != input_gene(key):
            raise GenomeInvariantError(f"input node {key} has inconsistent kind/lag/bias")
        if node.kind == HIDDEN and (key <= 0 or not math.isfinite(node.bias)):
            raise GenomeInvariantError(f"bad hidden node {node}")
        if node.kind == OUTPUT and node.bias != 0.0:
            raise GenomeInvariantError("output node carries no bias")
    seen_pairs = set()
    for key, conn in genome.connections.items():
        if key != conn.innovation:
            raise GenomeInvariantError(f"connection stored under {key} has innovation {conn.innovation}")
        for end in (conn.in_node, conn.out_node):
            if end not in genome.nodes:
                raise DanglingReferenceError(
                    f"connection {conn.innovation} references missing node {end}")
        if genome.nodes[conn.out_node].is_input:
            raise GenomeInvariantError(f"connection {conn.innovation} feeds an input node")
        if conn.in_node == OUTPUT_ID:
            raise GenomeInvariantError(f"connection {conn.innovation} leaves the output node")
        pair = (conn.in_node, conn.out_node)
        if pair in seen_pairs:
            raise GenomeInvariantError(f"duplicate connection gene for pair {pair}")
        seen_pairs.add(pair)
        if not math.isfinite(conn.weight):
            raise GenomeInvariantError(f"connection {conn.innovation} has non-finite weight")
    try:
        topological_order(genome.nodes, genome.enabled_pairs())
    except CycleError as exc:
        raise GenomeInvariantError(f"enabled connections form a cycle: {exc.args[1]}") from None


def initial_genome(config: Config, rng: random.Random, registry: InnovationRegistry) -> Genome:
    """One hidden and one output neuron; every input feeds the hidden neuron."""
    du = rng.randint(0, config.du_init_max)
    dy = rng.randint(0, config.dy_init_max)
    nodes = {i: input_gene(i) for i in input_ids(du, dy)}
    nodes[INITIAL_HIDDEN_ID] = NodeGene(
        INITIAL_HIDDEN_ID, HIDDEN, bias=rng.gauss(config.bias_init_mean, config.bias_init_stdev))
    nodes[OUTPUT_ID] = NodeGene(OUTPUT_ID, OUTPUT)
    connections = {}
    for src, dst in [(i, INITIAL_HIDDEN_ID) for i in input_ids(du, dy)] + [(INITIAL_HIDDEN_ID, OUTPUT_ID)]:
        innov = registry.connection(src, dst)
        w = rng.gauss(config.weight_init_mean, config.weight_init_stdev)
        connections[innov] = ConnectionGene(innov, src, dst, w)
    return Genome(du, dy, nodes, connections)


def compatibility_distance(a: Genome, b: Genome, config: Config) -> float:
    matching = a.connections.keys() & b.connections.keys()
    mismatched = len(a.connections) + len(b.connections) - 2 * len(matching)
    larger = max(1, len(a.connections), len(b.connections))
    distance = config.disjoint_coefficient * mismatched / larger
    if matching:
        diff = sum(abs(a.connections[i].weight - b.connections[i].weight) for i in sorted(matching))
        distance += config.weight_coefficient * diff / len(matching)
    return distance


# -- serialization -----------------------------------------------------------

def to_dict(g: Genome) -> dict:
    return {
        "du": g.du,
        "dy": g.dy,
        "fitness": g.fitness,
        "nodes": [
            {"id": n.id, "kind": n.kind, "lag": n.lag, "bias": n.bias}
            for n in sorted(g.nodes.values(), key=lambda n: (n.id >= 0, abs(n.id)))
        ],
        "connections": [
            {"innovation": c.innovation, "in": c.in_node, "out": c.out_node,
             "weight": c.weight, "enabled": c.enabled}
            for c in sorted(g.connections.values(), key=lambda c: c.innovation)
        ],
    }


def serialize(g: Genome) -> str:
    return json.dumps(to_dict(g), indent=1) + "\n"


def _require(obj: dict, key: str, types, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise MalformedGenomeError(f"{where}: missing key {key!r}")
    value = obj[key]
    if not isinstance(value, types) or (isinstance(value, bool) and bool not in types):
        raise MalformedGenomeError(f"{where}: {key!r} has unexpected type {type(value).__name__}")
    return value


def deserialize(text: str) -> Genome:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedGenomeError(f"malformed genome text: {exc}") from None
    if not isinstance(data, dict):
        raise MalformedGenomeError("malformed genome text: top level must be an object")
    du = _require(data, "du", (int,), "genome")
    dy = _require(data, "dy", (int,), "genome")
    fitness = data.get("fitness")
    if fitness is not None and not isinstance(fitness, (int, float)):
        raise MalformedGenomeError("genome: 'fitness' must be a number or null")
    nodes: dict[int, NodeGene] = {}
    for i, raw in enumerate(_require(data, "nodes", (list,), "genome")):
        where = f"nodes[{i}]"
        nid = _require(raw, "id", (int,), where)
        kind = _require(raw, "kind", (str,), where)
        if kind not in NODE_KINDS:
            raise MalformedGenomeError(f"{where}: unknown node kind {kind!r}")
        lag = raw.get("lag")
        if lag is not None and (not isinstance(lag, int) or isinstance(lag, bool)):
            raise MalformedGenomeError(f"{where}: 'lag' must be an integer or null")
        bias = float(_require(raw, "bias", (int, float), where))
        if nid in nodes:
            raise MalformedGenomeError(f"{where}: duplicate node id {nid}")
        nodes[nid] = NodeGene(nid, kind, lag, bias)
    connections: dict[int, ConnectionGene] = {}
    for i, raw in enumerate(_require(data, "connections", (list,), "genome")):
        where = f"connections[{i}]"
        innov = _require(raw, "innovation", (int,), where)
        src = _require(raw, "in", (int,), where)
        dst = _require(raw, "out", (int,), where)
        weight = float(_require(raw, "weight", (int, float), where))
        enabled = _require(raw, "enabled", (bool,), where)
        if innov in connections:
            raise DuplicateInnovationError(f"{where}: duplicate innovation number {innov}")
        for end in (src, dst):
            if end not in nodes:
                raise DanglingReferenceError(f"{where}: connection {innov} references missing node {end}")
        connections[innov] = ConnectionGene(innov, src, dst, weight, enabled)
    g = Genome(du, dy, nodes, connections, None if fitness is None else float(fitness))
    validate(g)
    return g

"""Crossover and mutation operators.

All operators leave their inputs untouched and return new genomes. Random
draws happen in a fixed order (sorted innovations / node ids) so a seeded
``random.Random`` reproduces every offspring exactly.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from graphlib import CycleError

from tdneat.config import Config
from tdneat.genome import (
    HIDDEN, OUTPUT_ID, ConnectionGene, Genome, InnovationRegistry, NodeGene, creates_cycle,
    input_gene, input_ids, reaches, topological_order, u_node, y_node,
)


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def crossover_delay(d1: int, d2: int, r: float) -> int:
    """Child delay as the rounded convex combination ``r*d1 + (1-r)*d2``."""
    return round_half_away(r * d1 + (1.0 - r) * d2)


def _fitness(g: Genome) -> float:
    return -math.inf if g.fitness is None else g.fitness


def _disable_cycles(connections: dict[int, ConnectionGene]) -> dict[int, ConnectionGene]:
    """Disable, in innovation order, any enabled gene that would close a cycle."""
    kept: list[tuple[int, int]] = []
    out = {}
    for innov in sorted(connections):
        c = connections[innov]
        if c.enabled:
            if creates_cycle(kept, c.in_node, c.out_node):
                c = replace(c, enabled=False)
            else:
                kept.append((c.in_node, c.out_node))
        out[innov] = c
    return out


def crossover(parent1: Genome, parent2: Genome, config: Config, rng: random.Random) -> Genome:
    f1, f2 = _fitness(parent1), _fitness(parent2)
    tie = f1 == f2
    fitter = parent2 if f2 > f1 else parent1

    if config.delays_evolve:
        du = crossover_delay(parent1.du, parent2.du, rng.random())
        dy = crossover_delay(parent1.dy, parent2.dy, rng.random())
    else:
        du, dy = fitter.du, fitter.dy
    allowed_inputs = set(input_ids(du, dy))

    c1, c2 = parent1.connections, parent2.connections
    connections = {}
    for innov in sorted(c1.keys() | c2.keys()):
        a, b = c1.get(innov), c2.get(innov)
        if a is not None and b is not None:
            gene = a if rng.random() < 0.5 else b
            if a.enabled != b.enabled:
                gene = replace(gene, enabled=rng.random() >= config.disabled_inherit_prob)
        elif tie:
            if rng.random() >= 0.5:
                continue
            gene = a or b
        else:
            gene = fitter.connections.get(innov)
            if gene is None:
                continue
        if (gene.in_node < 0 and gene.in_node not in allowed_inputs):
            continue
        connections[innov] = gene

    nodes = {i: input_gene(i) for i in allowed_inputs}
    nodes[OUTPUT_ID] = NodeGene(OUTPUT_ID, "output")
    n1, n2 = parent1.nodes, parent2.nodes
    hidden = {k for k, n in fitter.nodes.items() if n.kind == HIDDEN}
    hidden.update(c.in_node for c in connections.values() if c.in_node > 0)
    hidden.update(c.out_node for c in connections.values() if c.out_node > 0)
    for k in sorted(hidden):
        a, b = n1.get(k), n2.get(k)
        if a is not None and b is not None:
            nodes[k] = a if rng.random() < 0.5 else b
        else:
            nodes[k] = a or b

    try:
        topological_order(nodes, [(c.in_node, c.out_node) for c in connections.values() if c.enabled])
    except CycleError:
        connections = _disable_cycles(connections)
    return Genome(du, dy, nodes, connections)


# -- delay mutation ----------------------------------------------------------

@dataclass
class DelayMutationOutcome:
    which: str
    old_delay: int
    delta: int
    new_delay: int
    added: list[ConnectionGene] = field(default_factory=list)
    removed: list[ConnectionGene] = field(default_factory=list)
    genome: Genome | None = None


def draw_delay_delta(power: float, rng: random.Random) -> int:
    delta = round_half_away(rng.uniform(-power, power))
    if delta == 0:
        delta = -1 if rng.random() < 0.5 else 1
    return delta


def _lag_node(which: str, lag: int) -> int:
    return u_node(lag) if which == "du" else y_node(lag)


def apply_delay_change(g: Genome, which: str, delta: int, config: Config,
                       rng: random.Random, registry: InnovationRegistry) -> DelayMutationOutcome:
    """Set ``which`` to ``|old + delta|`` and repair the input layer.

    Shrinking deletes the pruned input nodes with all their connections;
    growing adds input nodes wired to every hidden node with fresh weights.
    """
    if which not in ("du", "dy"):
        raise ValueError(f"which must be 'du' or 'dy', got {which!r}")
    old = getattr(g, which)
    new = abs(old + delta)
    out = DelayMutationOutcome(which, old, delta, new)
    child = g.copy()
    child.fitness = None
    first_lag = 0 if which == "du" else 1
    if new < old:
        pruned = {_lag_node(which, lag) for lag in range(max(new + 1, first_lag), old + 1)}
        for innov in sorted(child.connections):
            c = child.connections[innov]
            if c.in_node in pruned:
                out.removed.append(c)
                del child.connections[innov]
        for node in pruned:
            del child.nodes[node]
    elif new > old:
        hidden = child.hidden_ids
        for lag in range(max(old + 1, first_lag), new + 1):
            node = _lag_node(which, lag)
            child.nodes[node] = input_gene(node)
            for h in hidden:
                innov = registry.connection(node, h)
                w = rng.gauss(config.weight_init_mean, config.weight_init_stdev)
                conn = ConnectionGene(innov, node, h, w)
                child.connections[innov] = conn
                out.added.append(conn)
    setattr(child, which, new)
    out.genome = child
    return out


def mutate_delay(g: Genome, which: str, config: Config, rng: random.Random,
                 registry: InnovationRegistry) -> Genome:
    power = config.du_mutate_power if which == "du" else config.dy_mutate_power
    delta = draw_delay_delta(power, rng)
    return apply_delay_change(g, which, delta, config, rng, registry).genome


# -- structural mutation -----------------------------------------------------

def add_node(g: Genome, config: Config, rng: random.Random, registry: InnovationRegistry) -> Genome:
    enabled = [g.connections[i] for i in sorted(g.connections) if g.connections[i].enabled]
    if not enabled:
        return g
    old = rng.choice(enabled)
    child = g.copy()
    node = registry.split_node(old.innovation, child.nodes)
    child.nodes[node] = NodeGene(node, HIDDEN, bias=rng.gauss(config.bias_init_mean, config.bias_init_stdev))
    child.connections[old.innovation] = replace(old, enabled=False)
    for src, dst, w in ((old.in_node, node, 1.0), (node, old.out_node, old.weight)):
        innov = registry.connection(src, dst)
        child.connections[innov] = ConnectionGene(innov, src, dst, w)
    return child


def delete_node(g: Genome, rng: random.Random) -> Genome:
    hidden = g.hidden_ids
    if not hidden:
        return g
    victim = rng.choice(hidden)
    child = g.copy()
    del child.nodes[victim]
    child.connections = {k: c for k, c in child.connections.items()
                         if victim not in (c.in_node, c.out_node)}
    return child


def connection_candidates(g: Genome) -> list[tuple[int, int]]:
    """Unconnected (in, out) pairs that keep the enabled graph acyclic."""
    hidden = g.hidden_ids
    sources = g.input_ids + hidden
    targets = hidden + [OUTPUT_ID]
    existing = g.pairs()
    enabled = g.enabled_pairs()
    candidates = []
    for dst in targets:
        for src in sources:
            if src == dst or (src, dst) in existing:
                continue
            if src > 0 and reaches(enabled, dst, src):
                continue
            candidates.append((src, dst))
    return candidates


def add_connection(g: Genome, config: Config, rng: random.Random, registry: InnovationRegistry) -> Genome:
    candidates = connection_candidates(g)
    if not candidates:
        return g
    src, dst = rng.choice(candidates)
    child = g.copy()
    innov = registry.connection(src, dst)
    w = rng.gauss(config.weight_init_mean, config.weight_init_stdev)
    child.connections[innov] = ConnectionGene(innov, src, dst, w)
    return child


def delete_connection(g: Genome, rng: random.Random) -> Genome:
    if not g.connections:
        return g
    victim = rng.choice(sorted(g.connections))
    child = g.copy()
    del child.connections[victim]
    return child


def toggle_connection(g: Genome, rng: random.Random) -> Genome:
    """Flip one gene's enabled flag; re-enabling that would close a cycle is skipped."""
    if not g.connections:
        return g
    conn = g.connections[rng.choice(sorted(g.connections))]
    if not conn.enabled and creates_cycle(g.enabled_pairs(), conn.in_node, conn.out_node):
        return g
    child = g.copy()
    child.connections[conn.innovation] = replace(conn, enabled=not conn.enabled)
    return child


def mutate_structure(g: Genome, config: Config, rng: random.Random,
                     registry: InnovationRegistry) -> Genome:
    if rng.random() < config.node_add_prob:
        g = add_node(g, config, rng, registry)
    if rng.random() < config.node_delete_prob:
        g = delete_node(g, rng)
    if rng.random() < config.conn_add_prob:
        g = add_connection(g, config, rng, registry)
    if rng.random() < config.conn_delete_prob:
        g = delete_connection(g, rng)
    if rng.random() < config.enabled_mutate_rate:
        g = toggle_connection(g, rng)
    return g


def _mutate_value(value, rng, mutate_rate, replace_rate, power, init_mean, init_stdev):
    perturb = rng.random() < mutate_rate
    if rng.random() < replace_rate:
        return rng.gauss(init_mean, init_stdev)
    if perturb:
        return value + rng.gauss(0.0, power)
    return value


def mutate_weights_biases(g: Genome, config: Config, rng: random.Random) -> Genome:
    child = g.copy()
    for innov in sorted(child.connections):
        c = child.connections[innov]
        w = _mutate_value(c.weight, rng, config.weight_mutate_rate, config.weight_replace_rate,
                          config.weight_mutate_power, config.weight_init_mean, config.weight_init_stdev)
        if w != c.weight:
            child.connections[innov] = replace(c, weight=w)
    for node_id in child.hidden_ids:
        n = child.nodes[node_id]
        b = _mutate_value(n.bias, rng, config.bias_mutate_rate, config.bias_replace_rate,
                          config.bias_mutate_power, config.bias_init_mean, config.bias_init_stdev)
        if b != n.bias:
            child.nodes[node_id] = replace(n, bias=b)
    return child


def mutate(g: Genome, config: Config, rng: random.Random, registry: InnovationRegistry) -> Genome:
    """Full per-offspring mutation: delays (dNEAT only), structure, then parameters."""
    if config.delays_evolve:
        if rng.random() < config.du_mutate_rate:
            g = mutate_delay(g, "du", config, rng, registry)
        if rng.random() < config.dy_mutate_rate:
            g = mutate_delay(g, "dy", config, rng, registry)
    g = mutate_structure(g, config, rng, registry)
    g = mutate_weights_biases(g, config, rng)
    g.fitness = None
    return g

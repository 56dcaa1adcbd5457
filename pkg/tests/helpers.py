"""Shared builders for hand-constructed and randomly grown genomes."""
import random

from tdneat.config import Config
from tdneat.genome import (
    HIDDEN, OUTPUT, OUTPUT_ID, ConnectionGene, Genome, InnovationRegistry, NodeGene,
    initial_genome, input_gene, input_ids,
)
from tdneat.variation import mutate


def make_genome(du, dy, conns, hidden=None, registry=None, innovations=None):
    """Build a genome from ``(in, out, weight[, enabled])`` tuples.

    ``hidden`` maps hidden node id -> bias. Innovations come from ``registry``
    unless given explicitly.
    """
    registry = InnovationRegistry() if registry is None else registry
    nodes = {i: input_gene(i) for i in input_ids(du, dy)}
    nodes[OUTPUT_ID] = NodeGene(OUTPUT_ID, OUTPUT)
    for nid, bias in (hidden or {}).items():
        nodes[nid] = NodeGene(nid, HIDDEN, bias=bias)
    connections = {}
    for k, spec in enumerate(conns):
        src, dst, w, *rest = spec
        enabled = rest[0] if rest else True
        innov = innovations[k] if innovations else registry.connection(src, dst)
        connections[innov] = ConnectionGene(innov, src, dst, w, enabled)
    return Genome(du, dy, nodes, connections)


HEAVY = Config(
    node_add_prob=0.5, node_delete_prob=0.2, conn_add_prob=0.7, conn_delete_prob=0.2,
    enabled_mutate_rate=0.4, du_mutate_rate=0.5, dy_mutate_rate=0.5, du_init_max=6, dy_init_max=6,
)


def grown_genome(seed, steps=10, config=HEAVY, registry=None):
    """Initial genome pushed through ``steps`` rounds of heavy mutation."""
    rng = random.Random(seed)
    registry = InnovationRegistry() if registry is None else registry
    g = initial_genome(config, rng, registry)
    for _ in range(steps):
        g = mutate(g, config, rng, registry)
    return g

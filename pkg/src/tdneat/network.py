"""Executable form of a genome and its free-run (parallel model) simulation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from graphlib import CycleError

import numpy as np

from tdneat.genome import (
    HIDDEN, OUTPUT_ID, Genome, GenomeInvariantError, topological_order, u_node, y_node,
)

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        return (lambda f: f) if not args or not callable(args[0]) else args[0]


def sigmoid(x: float) -> float:
    """Bipolar sigmoid used on hidden neurons."""
    return math.tanh(x)


@dataclass(frozen=True, eq=False)
class CompiledNetwork:
    du: int
    dy: int
    order: tuple[int, ...]
    incoming: dict[int, tuple[tuple[int, float], ...]]
    biases: dict[int, float]
    # flat arrays for the simulation kernel; computed nodes follow the inputs
    bias_arr: np.ndarray
    hidden_arr: np.ndarray
    edge_ptr: np.ndarray
    edge_src: np.ndarray
    edge_weight: np.ndarray
    output_slot: int

    @property
    def input_count(self) -> int:
        return self.du + 1 + self.dy


def compile_genome(genome: Genome) -> CompiledNetwork:
    """Topologically order the enabled graph and flatten it for simulation.

    Disabled connections are dropped. Hidden nodes without inputs still
    evaluate, to ``tanh(bias)``. A cycle raises :class:`GenomeInvariantError`.
    """
    enabled = sorted((c for c in genome.connections.values() if c.enabled),
                     key=lambda c: c.innovation)
    try:
        order = topological_order(genome.nodes, [(c.in_node, c.out_node) for c in enabled])
    except CycleError as exc:
        raise GenomeInvariantError(f"cannot compile cyclic genome: {exc.args[1]}") from None
    incoming: dict[int, list[tuple[int, float]]] = {n: [] for n in genome.nodes}
    for c in enabled:
        incoming[c.out_node].append((c.in_node, c.weight))
    inputs = genome.input_ids
    computed = [n for n in order if not genome.nodes[n].is_input]
    slot = {n: i for i, n in enumerate(inputs + computed)}
    ptr, src, weights = [0], [], []
    for n in computed:
        for s, w in incoming[n]:
            src.append(slot[s])
            weights.append(w)
        ptr.append(len(src))
    biases = {n: genome.nodes[n].bias for n in computed}
    return CompiledNetwork(
        du=genome.du,
        dy=genome.dy,
        order=tuple(order),
        incoming={n: tuple(v) for n, v in incoming.items()},
        biases=biases,
        bias_arr=np.array([biases[n] if genome.nodes[n].kind == HIDDEN else 0.0 for n in computed]),
        hidden_arr=np.array([genome.nodes[n].kind == HIDDEN for n in computed], dtype=np.bool_),
        edge_ptr=np.array(ptr, dtype=np.int64),
        edge_src=np.array(src, dtype=np.int64),
        edge_weight=np.array(weights, dtype=np.float64),
        output_slot=slot[OUTPUT_ID],
    )


def step(net: CompiledNetwork, u_inputs, y_inputs) -> float:
    """Evaluate one time instant given u(k)..u(k-du) and y(k-1)..y(k-dy)."""
    if len(u_inputs) != net.du + 1 or len(y_inputs) != net.dy:
        raise ValueError(
            f"expected {net.du + 1} u inputs and {net.dy} y inputs, "
            f"got {len(u_inputs)} and {len(y_inputs)}")
    values = {}
    for i, v in enumerate(u_inputs):
        values[u_node(i)] = float(v)
    for j, v in enumerate(y_inputs, start=1):
        values[y_node(j)] = float(v)
    for node in net.order:
        if node < 0:
            continue
        s = net.biases[node] if node != OUTPUT_ID else 0.0
        for src, w in net.incoming[node]:
            s += w * values[src]
        values[node] = s if node == OUTPUT_ID else sigmoid(s)
    return values[OUTPUT_ID]


@njit(cache=True, nogil=True)
def _free_run(u, du, dy, bias, hidden, ptr, src, weight, out_slot):
    n = u.shape[0]
    n_in = du + 1 + dy
    values = np.zeros(n_in + bias.shape[0])
    y = np.empty(n)
    for k in range(n):
        for i in range(du + 1):
            values[i] = u[k - i] if k >= i else 0.0
        for j in range(1, dy + 1):
            values[du + j] = y[k - j] if k >= j else 0.0
        for c in range(bias.shape[0]):
            s = bias[c]
            for e in range(ptr[c], ptr[c + 1]):
                s += weight[e] * values[src[e]]
            values[n_in + c] = math.tanh(s) if hidden[c] else s
        y[k] = values[out_slot]
    return y


def simulate_free_run(net: CompiledNetwork, u) -> np.ndarray:
    """Drive the network with ``u``; past outputs are fed back, never targets.

    Lags reaching before the first sample read as zero.
    """
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.ndim != 1 or u.shape[0] < 1:
        raise ValueError("input trajectory must be a nonempty 1-D sequence")
    return _free_run(u, net.du, net.dy, net.bias_arr, net.hidden_arr,
                     net.edge_ptr, net.edge_src, net.edge_weight, net.output_slot)


def fitness(y, t, n: int | None = None) -> float:
    """``-(1000 / N) * sum((y - t)**2)``; ``-inf`` when ``y`` is not finite."""
    y = np.asarray(y, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if n is None:
        n = len(t)
    if y.shape != t.shape or y.ndim != 1 or len(y) != n or n < 1:
        raise ValueError(f"need two trajectories of length N={n}, got {y.shape} and {t.shape}")
    with np.errstate(over="ignore", invalid="ignore"):
        err = y - t
        value = -(1000.0 / n) * float(np.sum(err * err)) + 0.0  # no negative zero
    return value if not math.isnan(value) else -math.inf


def mse(y, t) -> float:
    return 0.0 - fitness(y, t) / 1000.0


def evaluate(genome: Genome, u, t) -> float:
    return fitness(simulate_free_run(compile_genome(genome), u), t)

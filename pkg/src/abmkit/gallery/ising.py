"""Ising model on a geometric nearest-neighbor graph.

No agents: spins live on the nodes of a k-nearest-neighbor graph over n
random points in the unit square. Each step runs a fixed number of
Metropolis proposals: pick a node uniformly, compute the energy change
de = 2*coupl*sum(s_i*s_j) over its neighbors, flip when de < 0 or with
probability exp(-de/temp). Black nodes carry spin +1, white spin -1.
"""

from __future__ import annotations

import math

from ..core import STATIC, create_model
from ..graph import dynamic_simple_graph, flush_graph, knn_geometric_graph, neighbor_nodes, random_node

PARAMS = {
    "n": 500,
    "nns": 5,
    "temp": 2.0,
    "coupl": 2.5,
    "flips_per_step": 100,
}

# graph shape is fixed while stepping; these only apply through a reset
STRUCTURAL = frozenset({"n", "nns"})

CONTROLS = (
    ("temp", 0.05, 0.05, 5.0),
    ("coupl", 0.01, 0.1, 5.0),
    ("nns", 2, 1, 10),
)

PROPS_TO_RECORD = {"nodes": ("color", "spin")}
DEFAULT_STEPS = 100
DEFAULT_FRAMES = 100


def build(seed=42, n=500, nns=5, temp=2.0, coupl=2.5, flips_per_step=100):
    if not temp > 0:
        raise ValueError(f"temp must be positive, got {temp!r}")
    if isinstance(nns, bool) or not isinstance(nns, int) or nns < 2:
        raise ValueError(f"nns must be an integer >= 2, got {nns!r}")
    if isinstance(n, bool) or not isinstance(n, int) or n < nns:
        raise ValueError(f"need n >= nns, got n={n!r} nns={nns!r}")
    if isinstance(flips_per_step, bool) or not isinstance(flips_per_step, int) or flips_per_step < 1:
        raise ValueError(f"flips_per_step must be a positive integer, got {flips_per_step!r}")
    graph = dynamic_simple_graph(0)
    return create_model(
        [],
        graph,
        agents_type=STATIC,
        seed=seed,
        temp=temp,
        coupl=coupl,
        nns=nns,
        n=n,
        flips_per_step=flips_per_step,
    )


def initialiser(model):
    params = model.parameters
    flush_graph(model)
    knn_geometric_graph(model, params.n, params.nns)
    nodesprops = model.graph.nodesprops
    rng = model.rng
    for i in range(1, params.n + 1):
        props = nodesprops[i]
        if rng.random() < 0.5:
            props.spin = 1
            props.color = "black"
        else:
            props.spin = -1
            props.color = "white"


def step_rule(model):
    params = model.parameters
    temp = params.temp
    coupl = params.coupl
    nodesprops = model.graph.nodesprops
    rng = model.rng
    for _ in range(params.flips_per_step):
        nd = random_node(model)
        props = nodesprops[nd]
        spin = props.spin
        de = 0.0
        for nbr in neighbor_nodes(nd, model):
            de += spin * nodesprops[nbr].spin
        de = 2 * coupl * de
        # short-circuit: the acceptance draw happens only when de >= 0
        if de < 0 or rng.random() < math.exp(-de / temp):
            props.spin = -spin
            props.color = "black" if spin == -1 else "white"


def plots(model):
    return (("magnetisation", "nodes-mean", lambda nd: nd.spin),)


def count_preds(model):
    return {}

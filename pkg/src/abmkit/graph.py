"""Graph spaces: undirected simple graphs with node/edge property tables.

A graph replaces the 2D/3D space for network models. Nodes are 1-based
integer ids with property tables reached through ``graph.nodesprops[i]``
(a node's ``pos``, when present, is a unit-square layout hint for drawing,
not a spatial-query input); edge tables live at ``graph.edgesprops[i, j]``.
Static graphs reject topology changes but keep properties writable;
dynamic graphs allow both.
"""

from __future__ import annotations

from .errors import EngineError, ImmutableGraphError
from .props import PropsView, coerce_prop
from .values import Vect


def edge_key(u: int, v: int):
    return (u, v) if u < v else (v, u)


def _check_id(i):
    if isinstance(i, bool) or not isinstance(i, int) or i < 1:
        raise ValueError(f"node ids must be positive integers, got {i!r}")


class _NodesProps:
    """Indexable node-table accessor: ``graph.nodesprops[3].spin = -1``."""

    __slots__ = ("_graph",)

    def __init__(self, graph):
        self._graph = graph

    def __getitem__(self, i: int) -> PropsView:
        self._graph._check_node(i)
        return PropsView(self._graph._nodes[i])

    def __len__(self):
        return len(self._graph._nodes)

    def __iter__(self):
        return iter(sorted(self._graph._nodes))


class _EdgesProps:
    """Indexable edge-table accessor: ``graph.edgesprops[1, 2].weight = 3``."""

    __slots__ = ("_graph",)

    def __init__(self, graph):
        self._graph = graph

    def __getitem__(self, pair) -> PropsView:
        u, v = pair
        if not self._graph.has_edge(u, v):
            raise EngineError(f"no edge {u}-{v} in the graph")
        return PropsView(self._graph._edges[edge_key(u, v)])

    def __len__(self):
        return len(self._graph._edges)

    def __iter__(self):
        return iter(sorted(self._graph._edges))


class DynGraph:
    """Undirected simple graph (no self-loops, no parallel edges)."""

    def __init__(self, n: int = 0, dynamic: bool = True):
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ValueError(f"node count must be a non-negative integer, got {n!r}")
        self.dynamic = dynamic
        self._nodes = {i: {} for i in range(1, n + 1)}
        self._adj = {i: set() for i in self._nodes}
        self._edges = {}
        self._next_id = n + 1
        self.nodesprops = _NodesProps(self)
        self.edgesprops = _EdgesProps(self)

    # -- queries -------------------------------------------------------------

    @property
    def nodes(self):
        """Node ids, ascending."""
        return sorted(self._nodes)

    @property
    def n_nodes(self) -> int:
        return len(self._nodes)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def _check_node(self, i: int):
        if i not in self._nodes:
            raise EngineError(f"no node {i} in the graph")

    def has_edge(self, u: int, v: int) -> bool:
        return u in self._adj and v in self._adj[u]

    def neighbors(self, i: int):
        self._check_node(i)
        return sorted(self._adj[i])

    def degree(self, i: int) -> int:
        self._check_node(i)
        return len(self._adj[i])

    def edges(self):
        """All edges as (u, v) with u < v, sorted."""
        return sorted(self._edges)

    # -- topology mutation (dynamic graphs only) -------------------------------

    def _check_dynamic(self, what: str):
        if not self.dynamic:
            raise ImmutableGraphError(f"cannot {what}: the graph is static")

    def add_node(self, **props) -> int:
        self._check_dynamic("add a node")
        i = self._next_id
        self._next_id += 1
        self._nodes[i] = {k: coerce_prop(k, v) for k, v in props.items()}
        self._adj[i] = set()
        return i

    def kill_node(self, i: int):
        self._check_dynamic("kill a node")
        self._check_node(i)
        for j in list(self._adj[i]):
            self._adj[j].discard(i)
            self._edges.pop(edge_key(i, j), None)
        del self._adj[i]
        del self._nodes[i]

    def create_edge(self, u: int, v: int):
        """Add edge u-v; re-adding an existing edge is a silent no-op."""
        self._check_node(u)
        self._check_node(v)
        if u == v:
            raise EngineError(f"self-loop at node {u} is not allowed")
        if v in self._adj[u]:
            return
        self._check_dynamic(f"create edge {u}-{v}")
        self._adj[u].add(v)
        self._adj[v].add(u)
        self._edges[edge_key(u, v)] = {}

    def kill_edge(self, u: int, v: int):
        """Remove edge u-v; removing a missing edge is a silent no-op."""
        self._check_node(u)
        self._check_node(v)
        if v not in self._adj[u]:
            return
        self._check_dynamic(f"kill edge {u}-{v}")
        self._adj[u].discard(v)
        self._adj[v].discard(u)
        self._edges.pop(edge_key(u, v), None)

    def flush(self):
        self._check_dynamic("flush the graph")
        self._nodes.clear()
        self._adj.clear()
        self._edges.clear()
        self._next_id = 1


def dynamic_simple_graph(n: int = 0) -> DynGraph:
    """Mutable graph with nodes 1..n and no edges."""
    return DynGraph(n, dynamic=True)


def static_simple_graph(n: int = 0) -> DynGraph:
    """Frozen-topology graph with nodes 1..n and no edges."""
    return DynGraph(n, dynamic=False)


def convert_graph(graph: DynGraph, dynamic: bool) -> DynGraph:
    """Flip a graph between static and dynamic in place and return it."""
    graph.dynamic = dynamic
    return graph


def _require_graph(model) -> DynGraph:
    if getattr(model, "graph", None) is None:
        raise EngineError("this operation needs a graph model")
    return model.graph


def flush_graph(model):
    """Drop all nodes and edges and restart node ids at 1."""
    _require_graph(model).flush()


def add_nodes(n: int, model, **defaults) -> range:
    """Append n nodes, each with an independent copy of ``defaults``.

    Returns the new ids as a range (consecutive; ids are never reused).
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"node count must be a non-negative integer, got {n!r}")
    g = _require_graph(model)
    g._check_dynamic("add nodes")
    first = g._next_id
    for _ in range(n):
        g.add_node(**defaults)
    return range(first, first + n)


def create_edge(i: int, j: int, model):
    _require_graph(model).create_edge(i, j)


def kill_edge(i: int, j: int, model):
    _require_graph(model).kill_edge(i, j)


def neighbor_nodes(i: int, model):
    """Neighbor node ids of node ``i``, ascending."""
    return _require_graph(model).neighbors(i)


def random_node(model) -> int:
    """Uniformly random node id, drawn from the model RNG."""
    ids = _require_graph(model).nodes
    if not ids:
        raise EngineError("the graph has no nodes")
    return ids[model.rng.randrange(len(ids))]


def knn_geometric_graph(model, n: int, k: int, rng=None):
    """Populate the model's dynamic graph with a geometric k-nearest graph.

    Adds n nodes with ``pos`` uniform in the unit square (x then y per node,
    in node order), then joins each node to its k nearest by Euclidean
    distance. The query includes the node itself among the k hits, which is
    skipped, so each node contributes k-1 outgoing edges (k when a duplicate
    point displaces self from the hit list); the union is symmetric and
    degrees land in [k-1, 2(k-1)] barring ties.
    """
    from scipy.spatial import cKDTree

    if isinstance(n, bool) or not isinstance(n, int) or n < 2:
        raise ValueError(f"need at least 2 nodes, got n={n!r}")
    if isinstance(k, bool) or not isinstance(k, int) or not 2 <= k <= n:
        raise ValueError(f"need 2 <= k <= n, got k={k!r} n={n!r}")
    g = _require_graph(model)
    g._check_dynamic("build a knn graph")
    if rng is None:
        rng = model.rng
    ids = list(add_nodes(n, model))
    pts = []
    for i in ids:
        x, y = rng.random(), rng.random()
        g._nodes[i]["pos"] = Vect(x, y)
        pts.append((x, y))
    tree = cKDTree(pts)
    _, idx = tree.query(pts, k=k)
    for row, hits in enumerate(idx):
        i = ids[row]
        for h in hits:
            j = ids[int(h)]
            if j != i:
                g.create_edge(i, j)


def import_graph(text: str, node_count: int | None = None, dynamic: bool = False) -> DynGraph:
    """Parse an edge-list text ("i j" per line, 1-based ids, '#' comments).

    ``node_count`` fixes the node set to 1..node_count (defaults to the
    largest id seen). Malformed lines, self-loops, and ids outside the range
    are rejected with their line number. Duplicate lines collapse to one edge.
    """
    pairs = []
    max_id = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'i j', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer node id in {raw!r}") from None
        if u < 1 or v < 1:
            raise ValueError(f"line {lineno}: node ids must be >= 1, got {raw!r}")
        if u == v:
            raise ValueError(f"line {lineno}: self-loop {u}-{v} is not allowed")
        if node_count is not None and (u > node_count or v > node_count):
            raise ValueError(f"line {lineno}: node id out of range 1..{node_count} in {raw!r}")
        pairs.append((u, v))
        max_id = max(max_id, u, v)
    g = DynGraph(node_count if node_count is not None else max_id, dynamic=True)
    for u, v in pairs:
        g.create_edge(u, v)
    g.dynamic = dynamic
    return g


def export_graph(graph: DynGraph) -> str:
    """Edge-list text: '# nodes: N' header then sorted canonical 'i j' lines."""
    lines = [f"# nodes: {graph.n_nodes}"]
    lines.extend(f"{u} {v}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"

"""abmkit: a small, deterministic agent-based modeling engine.

Heterogeneous agents with per-key typed property tables evolve on 2D/3D
continuous or grid spaces (periodic or bounded) or on property-carrying
graphs, under a single step rule applied once per tick. Every recorded
property is snapshotted at tick 0 and after each step, and all randomness
flows through one seeded per-model generator, so runs replay and export
byte-identically. Includes tabular extraction (CSV/JSON/SVG plots), frame
and GIF rendering, a CLI, a steering web service, and three built-in
models: boids flocking, 3D Schelling segregation, and the Ising model on a
nearest-neighbor graph.
"""

from .core import (
    DEFAULT_SEED,
    MORTAL,
    NPERIODIC,
    PERIODIC,
    STATIC,
    Agent,
    Model,
    RecordStore,
    Series,
    create_agents,
    create_model,
    init_model,
    run_model,
    step_model,
)
from .data import (
    TableFrame,
    export_table,
    get_agent_data,
    get_agents_avg_props,
    get_nodes_avg_props,
    get_nums_agents,
    plot_lines,
    read_table,
)
from .errors import (
    DataQueryError,
    EngineError,
    ImmutableGraphError,
    SpaceMismatchError,
    StaticModelError,
    StepError,
)
from .graph import (
    DynGraph,
    add_nodes,
    convert_graph,
    create_edge,
    dynamic_simple_graph,
    export_graph,
    flush_graph,
    import_graph,
    kill_edge,
    knn_geometric_graph,
    neighbor_nodes,
    random_node,
    static_simple_graph,
)
from .render import animate_sim, draw_list, render_frame
from .spaces import (
    euclidean_neighbors,
    grid_neighbors,
    neighbors,
    patch_props,
    random_empty_patch,
    wrap_position,
)
from .values import Color, Vect, veclength

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "Color",
    "DataQueryError",
    "DEFAULT_SEED",
    "DynGraph",
    "EngineError",
    "ImmutableGraphError",
    "Model",
    "MORTAL",
    "NPERIODIC",
    "PERIODIC",
    "RecordStore",
    "Series",
    "SpaceMismatchError",
    "StaticModelError",
    "STATIC",
    "StepError",
    "TableFrame",
    "Vect",
    "add_nodes",
    "animate_sim",
    "convert_graph",
    "create_agents",
    "create_edge",
    "create_model",
    "draw_list",
    "dynamic_simple_graph",
    "euclidean_neighbors",
    "export_graph",
    "export_table",
    "flush_graph",
    "get_agent_data",
    "get_agents_avg_props",
    "get_nodes_avg_props",
    "get_nums_agents",
    "grid_neighbors",
    "import_graph",
    "init_model",
    "kill_edge",
    "knn_geometric_graph",
    "neighbor_nodes",
    "neighbors",
    "patch_props",
    "plot_lines",
    "random_empty_patch",
    "random_node",
    "read_table",
    "render_frame",
    "run_model",
    "static_simple_graph",
    "step_model",
    "veclength",
    "wrap_position",
]

"""Agents, models, the init/run lifecycle, and per-step recording.

A model owns an ordered agent list, one space (2D/3D or graph), a parameter
table, a seeded RNG and a record store. One user-supplied step rule is
applied once per tick; after initialisation and after every step the engine
snapshots all recorded properties, so a run of S steps leaves every
full-run series with exactly S+1 entries (tick 0..S).

All randomness in a model (initialisers, step rules, random patch/node
draws) must come from ``model.rng`` so runs replay bit-identically from the
seed. ``init_model`` reseeds, which makes reset-and-rerun reproducible.
"""

from __future__ import annotations

import random

from .errors import EngineError, SpaceMismatchError, StaticModelError, StepError
from .graph import DynGraph
from .props import PropsView, check_stable, coerce_prop
from .spaces import PatchTable, Space
from .values import Vect, variant_of

AGENT_KINDS = ("continuous2d", "grid2d", "continuous3d", "grid3d", "graph")

STATIC = "static"
MORTAL = "mortal"
PERIODIC = "periodic"
NPERIODIC = "nperiodic"

DEFAULT_SEED = 42

_KIND_DIM = {"continuous2d": 2, "grid2d": 2, "continuous3d": 3, "grid3d": 3}


class Series:
    """One recorded time series: values for ticks first_tick..first_tick+len-1.

    ``None`` marks a property missing at snapshot time. All non-missing
    entries share one value variant.
    """

    __slots__ = ("first_tick", "values", "variant")

    def __init__(self):
        self.first_tick = 0
        self.values = []
        self.variant = None

    def append(self, tick: int, value):
        if not self.values:
            self.first_tick = tick
        elif tick != self.first_tick + len(self.values):
            raise EngineError(
                f"non-contiguous recording: tick {tick} after "
                f"{self.first_tick + len(self.values) - 1}"
            )
        if value is not None:
            v = variant_of(value)
            if self.variant is None:
                self.variant = v
            elif v != self.variant:
                raise EngineError(f"series holds {self.variant} values, got {v}")
        self.values.append(value)

    def get(self, tick: int):
        """Value at a tick, or None outside the recorded range."""
        i = tick - self.first_tick
        if 0 <= i < len(self.values):
            return self.values[i]
        return None

    @property
    def last_tick(self) -> int:
        return self.first_tick + len(self.values) - 1

    def __len__(self):
        return len(self.values)


SECTIONS = ("agents", "patches", "nodes", "edges")


def _entity_str(section, entity):
    if section == "patches":
        return ",".join(str(c) for c in entity)
    if section == "edges":
        return f"{entity[0]}-{entity[1]}"
    return str(entity)


def _entity_from_str(section, s):
    if section == "patches":
        return tuple(int(c) for c in s.split(","))
    if section == "edges":
        u, v = s.split("-")
        return (int(u), int(v))
    return int(s)


class RecordStore:
    """All record tapes of one run, grouped by entity class."""

    def __init__(self):
        self.sections = {s: {} for s in SECTIONS}

    def record(self, section, entity, key, tick, value):
        table = self.sections[section].setdefault(entity, {})
        series = table.get(key)
        if series is None:
            series = table[key] = Series()
        series.append(tick, value)

    def series(self, section, entity, key):
        return self.sections[section].get(entity, {}).get(key)

    def entity_series(self, section, entity) -> dict:
        return self.sections[section].get(entity, {})

    def entities(self, section):
        return list(self.sections[section])

    def is_empty(self) -> bool:
        return not any(self.sections.values())

    def last_tick(self) -> int:
        """Highest tick covered by any series; -1 for an empty store."""
        last = -1
        for table in self.sections.values():
            for keys in table.values():
                for series in keys.values():
                    if series.values and series.last_tick > last:
                        last = series.last_tick
        return last

    def to_jsonable(self) -> dict:
        from .values import encode_value

        out = {"v": 1, "sections": {}}
        for section, table in self.sections.items():
            if not table:
                continue
            sec = out["sections"][section] = {}
            for entity, keys in table.items():
                ent = sec[_entity_str(section, entity)] = {}
                for key, series in keys.items():
                    ent[key] = {
                        "first": series.first_tick,
                        "values": [encode_value(v) for v in series.values],
                    }
        return out

    @classmethod
    def from_jsonable(cls, obj) -> "RecordStore":
        from .values import decode_value

        if obj.get("v") != 1:
            raise ValueError(f"unsupported record store version {obj.get('v')!r}")
        store = cls()
        for section, sec in obj.get("sections", {}).items():
            if section not in SECTIONS:
                raise ValueError(f"unknown record section {section!r}")
            for entity_s, keys in sec.items():
                entity = _entity_from_str(section, entity_s)
                for key, payload in keys.items():
                    series = Series()
                    tick = payload["first"]
                    for v in payload["values"]:
                        series.append(tick, decode_value(v))
                        tick += 1
                    store.sections[section].setdefault(entity, {})[key] = series
        return store


class Agent:
    """One simulation entity: an id, a kind, and a mutable property table.

    Properties read and write as attributes (``boid.vel``, ``agent.mood``).
    Writes are variant-stable; ``pos`` writes additionally wrap/validate
    against the model's space and keep the occupancy index current.
    """

    __slots__ = ("_id", "_kind", "_props", "_record_keys", "_alive", "_model")

    def __init__(self, agent_id: int, kind: str, props: dict, record_keys):
        object.__setattr__(self, "_id", agent_id)
        object.__setattr__(self, "_kind", kind)
        object.__setattr__(self, "_props", props)
        object.__setattr__(self, "_record_keys", tuple(record_keys))
        object.__setattr__(self, "_alive", True)
        object.__setattr__(self, "_model", None)

    @property
    def id(self) -> int:
        return self._id

    @property
    def kind(self) -> str:
        return self._kind

    @property
    def alive(self) -> bool:
        return self._alive

    @property
    def record_keys(self) -> tuple:
        return self._record_keys

    @property
    def _grid(self) -> bool:
        return self._kind in ("grid2d", "grid3d")

    def __getattr__(self, key):
        try:
            return self._props[key]
        except KeyError:
            raise AttributeError(f"agent {self._id} has no property {key!r}") from None

    def __setattr__(self, key, value):
        if key.startswith("_"):
            object.__setattr__(self, key, value)
            return
        if not self._alive:
            raise EngineError(f"agent {self._id} is dead and cannot be mutated")
        value = coerce_prop(key, value)
        if key == "pos":
            self._set_pos(value)
            return
        check_stable(self._props, key, value)
        self._props[key] = value

    def _set_pos(self, value):
        if isinstance(value, tuple) or isinstance(value, list):
            value = Vect(*value)
        if not isinstance(value, Vect):
            raise TypeError(f"pos must be a Vect, got {value!r}")
        dim = _KIND_DIM.get(self._kind)
        if dim is not None and value.dim != dim:
            raise ValueError(f"{self._kind} agents need {dim}D pos, got {value.dim}D")
        if self._grid and not value.is_integral():
            raise ValueError(f"grid agents need integer pos components, got {value!r}")
        model = self._model
        if model is not None and model.space is not None:
            space = model.space
            value = space.normalize_position(value, self._grid)
            old = self._props.get("pos")
            self._props["pos"] = value
            space._pos_of[self._id] = value._c
            new_cell = space.cell_of(value, self._grid)
            if old is None:
                space.place(self._id, new_cell)
            else:
                space.move(self._id, space.cell_of(old, self._grid), new_cell)
        else:
            self._props["pos"] = value

    def get(self, key, default=None):
        return self._props.get(key, default)

    def __repr__(self):
        return f"Agent({self._id}, {self._kind})"


def create_agents(n: int, kind: str, record_keys=(), **defaults):
    """Make n detached agents of one kind, each with its own copy of defaults.

    Spatial kinds must get a ``pos`` default of the right dimension (integer
    components for grid kinds). Every key in ``record_keys`` must be present
    in the defaults so tick-0 snapshots are complete. Ids run 1..n here and
    are reassigned when the agents join a model.
    """
    if kind not in AGENT_KINDS:
        raise ValueError(f"unknown agent kind {kind!r}; expected one of {AGENT_KINDS}")
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise ValueError(f"agent count must be a non-negative integer, got {n!r}")
    if n == 0 and kind != "graph":
        raise ValueError("only graph models may have zero agents")
    defaults = {k: coerce_prop(k, v) for k, v in defaults.items()}
    for k, v in defaults.items():
        variant_of(v)  # rejects non-PropValue defaults
    dim = _KIND_DIM.get(kind)
    if dim is not None:
        pos = defaults.get("pos")
        if not isinstance(pos, Vect):
            raise ValueError(f"{kind} agents need a pos default (a {dim}D Vect)")
        if pos.dim != dim:
            raise ValueError(f"{kind} agents need {dim}D pos, got {pos.dim}D")
        if kind.startswith("grid") and not pos.is_integral():
            raise ValueError(f"grid agents need integer pos components, got {pos!r}")
    record_keys = tuple(record_keys)
    for key in record_keys:
        if key not in defaults:
            raise ValueError(f"record key {key!r} is not among the agent defaults")
    return [Agent(i, kind, dict(defaults), record_keys) for i in range(1, n + 1)]


class Model:
    """A simulation: agents + space/graph + parameters + recording."""

    def __init__(self, agents, space, graph, agents_type, space_type, seed, params):
        self._agents = []
        self._agents_by_id = {}
        self.space = space
        self.graph = graph
        self.agents_type = agents_type
        self.space_type = space_type
        self.seed = seed
        self.rng = random.Random(seed)
        self._params = params
        self.tick = 0
        self.record_store = RecordStore()
        self._initialised = False
        self._next_agent_id = 1
        self._props_to_record = {}
        for agent in agents:
            self._attach(agent)
        self._creation_state = self._capture_state()

    # -- public views ---------------------------------------------------------

    @property
    def agents(self):
        """Live agents in id order (a fresh list; safe to mutate the model
        while iterating it)."""
        return [a for a in self._agents if a._alive]

    @property
    def parameters(self) -> PropsView:
        return PropsView(self._params)

    @property
    def size(self):
        return self.space.size if self.space is not None else None

    @property
    def patches(self) -> PatchTable:
        if self.space is None:
            raise SpaceMismatchError("a graph model has no patches")
        return PatchTable(self.space)

    def agent_by_id(self, agent_id: int) -> Agent:
        try:
            return self._agents_by_id[agent_id]
        except KeyError:
            raise EngineError(f"no agent with id {agent_id}") from None

    def adopt_record_store(self, store: RecordStore):
        """Swap in tapes from a stored run for offline queries and rendering.

        The model's live state (from a fresh deterministic init) remains
        only as the fallback for unrecorded constant graphics props; the
        tick moves to the end of the adopted tapes.
        """
        if store.is_empty():
            raise EngineError("cannot adopt an empty record store")
        self.record_store = store
        self.tick = store.last_tick()
        self._initialised = True

    # -- population -----------------------------------------------------------

    def _attach(self, agent: Agent):
        if agent._model is not None:
            raise EngineError("agent already belongs to a model")
        if agent._kind == "graph":
            if self.graph is None:
                raise SpaceMismatchError("graph agents need a graph model")
        else:
            if self.space is None:
                raise SpaceMismatchError(f"{agent._kind} agents need a spatial model")
            if _KIND_DIM[agent._kind] != self.space.dim:
                raise SpaceMismatchError(
                    f"{agent._kind} agents cannot live in a {self.space.dim}D space"
                )
        new_id = self._next_agent_id
        self._next_agent_id += 1
        object.__setattr__(agent, "_id", new_id)
        object.__setattr__(agent, "_model", self)
        # agents joining after init follow the model's recording plan
        extra = tuple(
            k
            for k in self._props_to_record.get("agents", ())
            if k not in agent._record_keys
        )
        if extra:
            object.__setattr__(agent, "_record_keys", agent._record_keys + extra)
        self._agents.append(agent)
        self._agents_by_id[new_id] = agent
        if agent._kind != "graph":
            # re-run the pos write so wrapping/bounds apply and occupancy registers
            pos = agent._props.pop("pos")
            agent.pos = pos

    def add_agent(self, agent: Agent):
        """Mortal models only: attach a detached agent under a fresh id.

        The agent participates (neighbor queries, snapshots) from the next
        step onward; its tapes start at the next recorded tick.
        """
        if self.agents_type != MORTAL:
            raise StaticModelError("cannot add agents to a static-population model")
        self._attach(agent)

    def kill_agent(self, agent: Agent):
        """Mortal models only: mark dead, drop from queries, freeze its tapes."""
        if self.agents_type != MORTAL:
            raise StaticModelError("cannot kill agents in a static-population model")
        if agent._model is not self:
            raise EngineError("agent belongs to a different model")
        if not agent._alive:
            return
        if agent._kind != "graph" and "pos" in agent._props:
            cell = self.space.cell_of(agent._props["pos"], agent._grid)
            self.space.displace(agent._id, cell)
        object.__setattr__(agent, "_alive", False)

    # -- lifecycle --------------------------------------------------------------

    def _capture_state(self) -> dict:
        state = {
            "tick": self.tick,
            "initialised": self._initialised,
            "rng": self.rng.getstate(),
            "params": dict(self._params),
            "props_to_record": {k: tuple(v) for k, v in self._props_to_record.items()},
            "store": self.record_store,
            "n_agents": len(self._agents),
            "next_agent_id": self._next_agent_id,
            "agents": [(a._alive, dict(a._props), a._record_keys) for a in self._agents],
        }
        if self.space is not None:
            state["patches"] = {
                cell: dict(p.props) for cell, p in self.space.patches.items() if p.props
            }
        if self.graph is not None:
            g = self.graph
            state["graph"] = {
                "dynamic": g.dynamic,
                "next_id": g._next_id,
                "nodes": {i: dict(p) for i, p in g._nodes.items()},
                "adj": {i: set(s) for i, s in g._adj.items()},
                "edges": {e: dict(p) for e, p in g._edges.items()},
            }
        return state

    def _restore_state(self, state: dict, keep_params: bool = False):
        self.tick = state["tick"]
        self._initialised = state["initialised"]
        self.rng.setstate(state["rng"])
        if not keep_params:
            self._params.clear()
            self._params.update(state["params"])
        self._props_to_record = {k: tuple(v) for k, v in state["props_to_record"].items()}
        self.record_store = state["store"]
        del self._agents[state["n_agents"] :]
        self._next_agent_id = state["next_agent_id"]
        self._agents_by_id = {a._id: a for a in self._agents}
        for agent, (alive, props, record_keys) in zip(self._agents, state["agents"]):
            object.__setattr__(agent, "_alive", alive)
            object.__setattr__(agent, "_record_keys", record_keys)
            agent._props.clear()
            agent._props.update(props)
        if self.space is not None:
            saved = state.get("patches", {})
            for cell, patch in self.space.patches.items():
                patch.props.clear()
                if cell in saved:
                    patch.props.update(saved[cell])
            self.space.rebuild_occupancy(self._agents)
        if self.graph is not None:
            g = self.graph
            gs = state["graph"]
            g.dynamic = gs["dynamic"]
            g._next_id = gs["next_id"]
            g._nodes = {i: dict(p) for i, p in gs["nodes"].items()}
            g._adj = {i: set(s) for i, s in gs["adj"].items()}
            g._edges = {e: dict(p) for e, p in gs["edges"].items()}

    def _snapshot(self):
        t = self.tick
        store = self.record_store
        for agent in self._agents:
            if not agent._alive:
                continue
            props = agent._props
            for key in agent._record_keys:
                store.record("agents", agent._id, key, t, props.get(key))
        ptr = self._props_to_record
        keys = ptr.get("patches")
        if keys and self.space is not None:
            patches = self.space.patches
            for cell in self.space.cells():
                props = patches[cell].props
                for key in keys:
                    store.record("patches", cell, key, t, props.get(key))
        if self.graph is not None:
            keys = ptr.get("nodes")
            if keys:
                nodes = self.graph._nodes
                for i in sorted(nodes):
                    props = nodes[i]
                    for key in keys:
                        store.record("nodes", i, key, t, props.get(key))
            keys = ptr.get("edges")
            if keys:
                edges = self.graph._edges
                for e in sorted(edges):
                    props = edges[e]
                    for key in keys:
                        store.record("edges", e, key, t, props.get(key))


def create_model(
    agents,
    space=None,
    *,
    agents_type: str = STATIC,
    space_type: str = PERIODIC,
    seed: int = DEFAULT_SEED,
    **params,
) -> Model:
    """Assemble a model from agents plus either a size tuple or a graph.

    ``space`` is (xdim, ydim) or (xdim, ydim, zdim) for spatial models, or a
    :class:`DynGraph` for graph models. Remaining keyword arguments become
    the model's parameter table. The RNG is seeded here (default 42).
    """
    if agents_type not in (STATIC, MORTAL):
        raise ValueError(f"agents_type must be {STATIC!r} or {MORTAL!r}, got {agents_type!r}")
    if space_type not in (PERIODIC, NPERIODIC):
        raise ValueError(
            f"space_type must be {PERIODIC!r} or {NPERIODIC!r}, got {space_type!r}"
        )
    agents = list(agents)
    if isinstance(space, DynGraph):
        return Model(agents, None, space, agents_type, space_type, seed, dict(params))
    if space is None:
        raise ValueError("a model needs a space: a size tuple or a graph")
    sp = Space(space, periodic=(space_type == PERIODIC))
    return Model(agents, sp, None, agents_type, space_type, seed, dict(params))


def init_model(model: Model, initialiser=None, props_to_record=None):
    """Reset to tick 0, reseed the RNG, run the initialiser, snapshot.

    The model is first restored to its as-created state (agent properties,
    patches, graph) so repeated init calls replay identically; the parameter
    table is kept as-is so staged parameter changes survive a reset. A
    failing initialiser leaves the model exactly as before the call.
    """
    ptr = {}
    if props_to_record:
        for section, keys in props_to_record.items():
            if section not in SECTIONS:
                raise ValueError(
                    f"unknown entity class {section!r}; expected one of {SECTIONS}"
                )
            ptr[section] = tuple(keys)
    rollback = model._capture_state()
    try:
        model._restore_state(model._creation_state, keep_params=True)
        model.rng.seed(model.seed)
        model.record_store = RecordStore()
        model.tick = 0
        model._props_to_record = ptr
        if ptr.get("agents"):
            for agent in model._agents:
                extra = tuple(k for k in ptr["agents"] if k not in agent._record_keys)
                object.__setattr__(agent, "_record_keys", agent._record_keys + extra)
        if initialiser is not None:
            initialiser(model)
        model._snapshot()
        model._initialised = True
    except Exception:
        model._restore_state(rollback)
        raise


def run_model(model: Model, steps: int, step_rule):
    """Apply the step rule ``steps`` times, recording after each step.

    A step rule that raises aborts the run: the tick and tapes keep only the
    completed steps and the error names the failing 1-based step.
    """
    if not model._initialised:
        raise EngineError("run_model before init_model: the model is not initialised")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    for k in range(1, steps + 1):
        try:
            step_rule(model)
        except Exception as exc:
            raise StepError(f"step rule failed at step {model.tick + 1}: {exc}", model.tick + 1) from exc
        model.tick += 1
        model._snapshot()


def step_model(model: Model, step_rule):
    """Advance exactly one step (the service's unit of work)."""
    run_model(model, 1, step_rule)

"""2D/3D spaces: patches, periodic wrapping, occupancy and neighbor queries.

Space units are patch edges: a space of size (xdim, ydim) is divided into
xdim*ydim unit patches. Grid agents sit on 1-based integer cells; continuous
agents live at real coordinates in [0, dim) (periodic) or [0, dim]
(non-periodic, clamped). An occupancy index (cell -> live agent ids) is
maintained incrementally on every position write and backs both neighbor
queries and empty-patch draws.
"""

from __future__ import annotations

import itertools
import math

from .errors import EngineError, SpaceMismatchError
from .props import PropsView
from .values import Vect


class Patch:
    """One unit cell of a space, carrying its own property table."""

    __slots__ = ("cell", "props")

    def __init__(self, cell):
        self.cell = cell
        self.props = {}

    def __repr__(self):
        return f"Patch{self.cell}"


class Space:
    """A bounded or periodic 2D/3D space of unit patches."""

    def __init__(self, size, periodic: bool):
        size = tuple(size)
        if len(size) not in (2, 3):
            raise ValueError(f"space size must have 2 or 3 dimensions, got {size}")
        for d in size:
            if isinstance(d, bool) or not isinstance(d, int) or d < 1:
                raise ValueError(f"space dimensions must be positive integers, got {size}")
        self.size = size
        self.periodic = periodic
        self.patches = {cell: Patch(cell) for cell in self.cells()}
        self._occ = {cell: set() for cell in self.patches}
        # live agent positions as raw component tuples, mirrored on every
        # pos write; lets neighbor queries skip attribute chains
        self._pos_of = {}
        self._nbhd_cache = {}

    @property
    def dim(self) -> int:
        return len(self.size)

    def cells(self):
        """All cells in a fixed row-major order (last axis fastest)."""
        return itertools.product(*(range(1, d + 1) for d in self.size))

    def in_bounds(self, cell) -> bool:
        return len(cell) == self.dim and all(1 <= c <= d for c, d in zip(cell, self.size))

    def cell_of(self, pos: Vect, grid: bool):
        """Cell containing a position; continuous coordinates floor to cells
        (position dim maps to the last cell, covering the clamped boundary)."""
        if grid:
            return tuple(pos)
        return tuple(min(int(math.floor(c)), d - 1) + 1 for c, d in zip(pos, self.size))

    def normalize_position(self, pos: Vect, grid: bool) -> Vect:
        """Wrap/clamp/validate a position write and return the stored value.

        Periodic: components wrap modularly. Non-periodic: grid moves outside
        bounds are rejected; continuous components clamp to [0, dim].
        """
        if not isinstance(pos, Vect):
            raise TypeError(f"pos must be a Vect, got {pos!r}")
        if pos.dim != self.dim:
            raise ValueError(f"pos is {pos.dim}D but the space is {self.dim}D")
        if grid:
            if not pos.is_integral():
                raise ValueError(f"grid agents need integer pos components, got {pos!r}")
            if self.periodic:
                return Vect(*(((c - 1) % d) + 1 for c, d in zip(pos, self.size)))
            if not self.in_bounds(tuple(pos)):
                raise EngineError(f"move to {tuple(pos)} is outside the {self.size} space")
            return pos
        if self.periodic:
            wrapped = []
            for c, d in zip(pos, self.size):
                w = float(c) % d
                if w == d:  # tiny negatives round up to the modulus itself
                    w = 0.0
                wrapped.append(w)
            return Vect._make(tuple(wrapped))
        return Vect._make(
            tuple(min(max(float(c), 0.0), float(d)) for c, d in zip(pos, self.size))
        )

    # -- occupancy index ---------------------------------------------------

    def occupants(self, cell):
        return self._occ[cell]

    def place(self, agent_id: int, cell):
        self._occ[cell].add(agent_id)

    def displace(self, agent_id: int, cell):
        self._occ[cell].discard(agent_id)
        self._pos_of.pop(agent_id, None)

    def move(self, agent_id: int, old_cell, new_cell):
        if old_cell != new_cell:
            self._occ[old_cell].discard(agent_id)
            self._occ[new_cell].add(agent_id)

    def rebuild_occupancy(self, agents):
        for ids in self._occ.values():
            ids.clear()
        self._pos_of.clear()
        for a in agents:
            if a._alive:
                pos = a._props["pos"]
                self.place(a._id, self.cell_of(pos, a._grid))
                self._pos_of[a._id] = pos._c


def wrap_position(space: Space, pos) -> Vect:
    """Map a position into the space per its periodicity.

    All-integer components get grid semantics (wrap into 1..dim, unchanged
    when non-periodic); otherwise continuous semantics (wrap into [0, dim)
    or clamp to [0, dim]). Idempotent.
    """
    if isinstance(pos, (tuple, list)):
        pos = Vect(*pos)
    grid = pos.is_integral()
    if grid and not space.periodic:
        return pos  # caller-validated; bounded grid moves are checked on write
    return space.normalize_position(pos, grid)


def _require_space(model) -> Space:
    if model.space is None:
        raise SpaceMismatchError("this operation needs a 2D/3D spatial model")
    return model.space


def _min_image_dist2(pa, pb, size):
    d2 = 0.0
    for a, b, dim in zip(pa, pb, size):
        d = abs(a - b)
        if d > dim * 0.5:
            d = dim - d
        d2 += d * d
    return d2


def _plain_dist2(pa, pb):
    d2 = 0.0
    for a, b in zip(pa, pb):
        d = a - b
        d2 += d * d
    return d2


def euclidean_neighbors(agent, model, radius: float):
    """Live agents within ``radius`` of ``agent`` (itself excluded), ascending id.

    Distance is toroidal (minimum image) in periodic spaces and plain
    Euclidean otherwise. Backed by the occupancy cell index, falling back to
    a scan of all live agents when the radius spans the space.
    """
    space = _require_space(model)
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    pos = agent._props["pos"]._c
    size = space.size
    periodic = space.periodic
    r2 = radius * radius
    span = math.ceil(radius)

    if periodic and 2 * span + 1 >= min(size):
        candidates = [a._id for a in model._agents if a._alive]
    else:
        center = space.cell_of(agent._props["pos"], agent._grid)
        key = (center, span)
        cells = space._nbhd_cache.get(key)
        if cells is None:
            axes = []
            for c, d in zip(center, size):
                if periodic:
                    axes.append([((c + o - 1) % d) + 1 for o in range(-span, span + 1)])
                else:
                    axes.append([c + o for o in range(-span, span + 1) if 1 <= c + o <= d])
            cells = tuple(itertools.product(*axes))
            space._nbhd_cache[key] = cells
        occ = space._occ
        candidates = [i for cell in cells for i in occ[cell]]

    pos_of = space._pos_of
    self_id = agent._id
    found = []
    if len(size) == 2:
        ax, ay = pos
        sx, sy = float(size[0]), float(size[1])
        hx, hy = sx * 0.5, sy * 0.5
        for i in candidates:
            if i == self_id:
                continue
            bx, by = pos_of[i]
            dx = ax - bx if ax >= bx else bx - ax
            dy = ay - by if ay >= by else by - ay
            if periodic:
                if dx > hx:
                    dx = sx - dx
                if dy > hy:
                    dy = sy - dy
            if dx * dx + dy * dy <= r2:
                found.append(i)
    else:
        for i in candidates:
            if i == self_id:
                continue
            other = pos_of[i]
            d2 = _min_image_dist2(pos, other, size) if periodic else _plain_dist2(pos, other)
            if d2 <= r2:
                found.append(i)
    found.sort()
    by_id = model._agents_by_id
    return [by_id[i] for i in found]


def grid_neighbors(agent, model, r: int = 1):
    """Live agents in cells at Chebyshev distance 1..r from the agent's cell.

    The agent's own cell is not scanned, so co-located agents do not count
    as neighbors. Out-of-bound cells contribute nothing in non-periodic
    spaces; in periodic spaces cells wrap (and are deduplicated when the
    neighborhood spans the whole axis).
    """
    space = _require_space(model)
    if not agent._grid:
        raise SpaceMismatchError("grid_neighbors needs a grid agent; use euclidean_neighbors")
    if isinstance(r, bool) or not isinstance(r, int) or r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    center = tuple(agent._props["pos"])
    size = space.size
    key = (center, r, "grid")
    cells = space._nbhd_cache.get(key)
    if cells is None:
        axes = []
        for c, d in zip(center, size):
            if space.periodic:
                vals = {((c + o - 1) % d) + 1 for o in range(-r, r + 1)}
            else:
                vals = {c + o for o in range(-r, r + 1) if 1 <= c + o <= d}
            axes.append(sorted(vals))
        cells = tuple(cell for cell in itertools.product(*axes) if cell != center)
        space._nbhd_cache[key] = cells
    occ = space._occ
    found = []
    for cell in cells:
        found.extend(occ[cell])
    found.sort()
    by_id = model._agents_by_id
    return [by_id[i] for i in found]


# The two names are used interchangeably for grid agents.
neighbors = grid_neighbors


def random_empty_patch(model):
    """Uniformly random unoccupied cell, drawn from the model RNG."""
    space = _require_space(model)
    occ = space._occ
    empties = [cell for cell in space.cells() if not occ[cell]]
    if not empties:
        raise EngineError("no empty patch: every cell is occupied")
    return empties[model.rng.randrange(len(empties))]


def patch_props(model, cell) -> PropsView:
    """Read/write accessor for one patch's property table."""
    space = _require_space(model)
    cell = tuple(cell)
    if not space.in_bounds(cell):
        raise EngineError(f"patch {cell} is outside the {space.size} space")
    return PropsView(space.patches[cell].props)


class PatchTable:
    """Indexable view of a space's patches: ``model.patches[x, y].food = 3``."""

    __slots__ = ("_space",)

    def __init__(self, space: Space):
        self._space = space

    def __getitem__(self, cell) -> PropsView:
        cell = tuple(cell)
        if not self._space.in_bounds(cell):
            raise EngineError(f"patch {cell} is outside the {self._space.size} space")
        return PropsView(self._space.patches[cell].props)

    def __len__(self):
        return len(self._space.patches)

    def __iter__(self):
        return iter(self._space.patches)


def occupancy_audit(model):
    """Debug audit: rebuild the occupancy index from agent positions and
    raise EngineError on any mismatch with the incremental index."""
    space = _require_space(model)
    fresh = {cell: set() for cell in space.patches}
    for a in model._agents:
        if a._alive:
            fresh[space.cell_of(a._props["pos"], a._grid)].add(a._id)
    for cell, ids in fresh.items():
        if space._occ[cell] != ids:
            raise EngineError(
                f"occupancy index inconsistent at {cell}: "
                f"index={sorted(space._occ[cell])} actual={sorted(ids)}"
            )

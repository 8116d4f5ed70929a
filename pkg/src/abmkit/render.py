"""Rendering: recorded state -> draw lists -> SVG frames / GIF animations.

Rendering is a pure function of (record tapes, tick, view options), so
re-rendering any tick is byte-identical, which is what makes exported
animations reproducible from a manifest. The intermediate form is a draw
list: a JSON-ready dict with the entities' world coordinates, glyphs and
colors (the same structure the steering service streams to clients).

2D models render directly; 3D models render as an orthographic projection
onto an axis pair with far-to-near depth sorting; graph models render node
layouts from the nodes' ``pos`` prop with edges drawn beneath.
"""

from __future__ import annotations

import math
import os

from .errors import EngineError
from .values import Color

# glyph radius in space units when an agent/node declares no size
CONTINUOUS_SIZE = 0.15
GRID_SIZE = 0.3
NODE_SIZE = 0.012

_DEFAULT_COLOR = "#2666cf"


def _css(value, default=_DEFAULT_COLOR) -> str:
    if value is None:
        return default
    if isinstance(value, Color):
        return value.css()
    return Color(value).css()


def _recorded_or_live(store, section, entity, key, tick, live: dict):
    series = store.series(section, entity, key)
    if series is not None:
        return series.get(tick)
    return live.get(key)


def draw_list(model, tick: int) -> dict:
    """Entity draw list at a recorded tick.

    Recorded keys read from the tapes; unrecorded graphics keys (a constant
    shape or color) fall back to the entity's current value. Agents outside
    their recorded range (unborn/dead at that tick) are omitted. For graph
    models the entities are the nodes and ``edges`` lists id pairs.
    """
    if not 0 <= tick <= model.tick:
        raise EngineError(f"tick {tick} outside the recorded range 0..{model.tick}")
    store = model.record_store
    out = {"v": 1, "tick": tick}
    if model.space is not None:
        out["bounds"] = list(model.space.size)
        entities = out["entities"] = []
        for agent in model._agents:
            if store.series("agents", agent._id, "pos") is None:
                raise EngineError(
                    f"agent {agent._id} has no recorded pos; cannot render a spatial model"
                )
            live = agent._props
            pos = _recorded_or_live(store, "agents", agent._id, "pos", tick, live)
            if pos is None:
                continue
            shape = _recorded_or_live(store, "agents", agent._id, "shape", tick, live)
            color = _recorded_or_live(store, "agents", agent._id, "color", tick, live)
            orient = _recorded_or_live(store, "agents", agent._id, "orientation", tick, live)
            size = _recorded_or_live(store, "agents", agent._id, "size", tick, live)
            if size is None:
                size = GRID_SIZE if agent._grid else CONTINUOUS_SIZE
            ent = {
                "id": agent._id,
                "x": float(pos[0]),
                "y": float(pos[1]),
                "shape": shape if shape is not None else "circle",
                "color": _css(color),
                "orientation": float(orient) if orient is not None else 0.0,
                "size": float(size),
            }
            if pos.dim == 3:
                ent["z"] = float(pos[2])
            entities.append(ent)
        return out
    if model.graph is not None:
        g = model.graph
        out["bounds"] = [1, 1]
        entities = out["entities"] = []
        for i in g.nodes:
            live = g._nodes[i]
            pos = _recorded_or_live(store, "nodes", i, "pos", tick, live)
            if pos is None:
                raise EngineError(f"node {i} has no pos to draw the graph layout from")
            color = _recorded_or_live(store, "nodes", i, "color", tick, live)
            size = _recorded_or_live(store, "nodes", i, "size", tick, live)
            entities.append(
                {
                    "id": i,
                    "x": float(pos[0]),
                    "y": float(pos[1]),
                    "shape": "circle",
                    "color": _css(color),
                    "orientation": 0.0,
                    "size": float(size) if size is not None else NODE_SIZE,
                }
            )
        out["edges"] = [[u, v] for u, v in g.edges()]
        return out
    raise EngineError("the model has neither a space nor a graph to render")


class _View:
    """World->canvas transform shared by the SVG and raster emitters."""

    def __init__(self, draw: dict, width: int, agent_scale: float, projection_axis: str):
        bounds = draw["bounds"]
        if len(bounds) == 3:
            axes = {"x": (1, 2), "y": (0, 2), "z": (0, 1)}
            if projection_axis not in axes:
                raise ValueError(f"projection_axis must be x, y or z, got {projection_axis!r}")
            self.ax, self.ay = axes[projection_axis]
            self.depth_axis = projection_axis
        else:
            self.ax, self.ay = 0, 1
            self.depth_axis = None
        self.world_w = float(bounds[self.ax])
        self.world_h = float(bounds[self.ay])
        margin = 0.04 * width
        self.scale = (width - 2 * margin) / self.world_w
        self.width = width
        self.height = int(round(2 * margin + self.world_h * self.scale))
        self.margin = margin
        self.agent_scale = agent_scale

    def to_canvas(self, ent):
        coords = (ent["x"], ent["y"], ent.get("z", 0.0))
        cx = self.margin + coords[self.ax] * self.scale
        cy = self.height - self.margin - coords[self.ay] * self.scale
        return cx, cy

    def radius(self, ent) -> float:
        return ent["size"] * self.scale * self.agent_scale

    def sorted_entities(self, draw):
        ents = draw["entities"]
        if self.depth_axis is None:
            return ents
        axis = {"x": "x", "y": "y", "z": "z"}[self.depth_axis]
        # far-to-near so nearer glyphs paint on top; id breaks ties
        return sorted(ents, key=lambda e: (e.get(axis, 0.0), e["id"]))


def _arrow_points(cx, cy, r, orientation):
    """Isoceles triangle centered at (cx, cy) heading along the orientation.

    Orientation 0 points up on the canvas (world +y); the canvas y flip is
    folded into the rotation.
    """
    local = ((0.0, 1.6 * r), (-0.9 * r, -1.2 * r), (0.0, -0.6 * r), (0.9 * r, -1.2 * r))
    sin_t, cos_t = math.sin(orientation), math.cos(orientation)
    pts = []
    for lx, ly in local:
        wx = lx * cos_t - ly * sin_t
        wy = lx * sin_t + ly * cos_t
        pts.append((cx + wx, cy - wy))
    return pts


def _f(x: float) -> str:
    return f"{x:.2f}"


def svg_frame(draw: dict, width: int = 600, agent_scale: float = 1.0,
              projection_axis: str = "z", show_grid: bool = False) -> str:
    """Render one draw list as a standalone SVG string."""
    view = _View(draw, width, agent_scale, projection_axis)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{view.width}" '
        f'height="{view.height}" viewBox="0 0 {view.width} {view.height}">',
        f'<rect width="{view.width}" height="{view.height}" fill="white"/>',
    ]
    m = view.margin
    parts.append(
        f'<rect x="{_f(m)}" y="{_f(m)}" width="{_f(view.world_w * view.scale)}" '
        f'height="{_f(view.world_h * view.scale)}" fill="none" stroke="#888888"/>'
    )
    if show_grid:
        for i in range(1, int(view.world_w)):
            x = m + i * view.scale
            parts.append(
                f'<line x1="{_f(x)}" y1="{_f(m)}" x2="{_f(x)}" '
                f'y2="{_f(view.height - m)}" stroke="#eeeeee"/>'
            )
        for j in range(1, int(view.world_h)):
            y = view.height - m - j * view.scale
            parts.append(
                f'<line x1="{_f(m)}" y1="{_f(y)}" x2="{_f(view.width - m)}" '
                f'y2="{_f(y)}" stroke="#eeeeee"/>'
            )
    ent_by_id = {e["id"]: e for e in draw["entities"]}
    for u, v in draw.get("edges", []):
        a, b = ent_by_id.get(u), ent_by_id.get(v)
        if a is None or b is None:
            continue
        ax, ay = view.to_canvas(a)
        bx, by = view.to_canvas(b)
        parts.append(
            f'<line x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}" '
            f'stroke="#999999" stroke-width="0.6"/>'
        )
    for ent in view.sorted_entities(draw):
        cx, cy = view.to_canvas(ent)
        r = view.radius(ent)
        if ent["shape"] == "arrow":
            pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in _arrow_points(cx, cy, r, ent["orientation"]))
            parts.append(f'<polygon points="{pts}" fill="{ent["color"]}"/>')
        else:
            parts.append(
                f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" fill="{ent["color"]}" '
                f'stroke="#333333" stroke-width="0.4"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def raster_frame(draw: dict, width: int = 600, agent_scale: float = 1.0,
                 projection_axis: str = "z", show_grid: bool = False):
    """Render one draw list as a PIL RGB image (same layout as svg_frame)."""
    from PIL import Image, ImageDraw

    view = _View(draw, width, agent_scale, projection_axis)
    img = Image.new("RGB", (view.width, view.height), "white")
    dr = ImageDraw.Draw(img)
    m = view.margin
    if show_grid:
        for i in range(1, int(view.world_w)):
            x = m + i * view.scale
            dr.line([(x, m), (x, view.height - m)], fill=(238, 238, 238))
        for j in range(1, int(view.world_h)):
            y = view.height - m - j * view.scale
            dr.line([(m, y), (view.width - m, y)], fill=(238, 238, 238))
    dr.rectangle(
        [m, m, m + view.world_w * view.scale, m + view.world_h * view.scale],
        outline=(136, 136, 136),
    )
    ent_by_id = {e["id"]: e for e in draw["entities"]}
    for u, v in draw.get("edges", []):
        a, b = ent_by_id.get(u), ent_by_id.get(v)
        if a is None or b is None:
            continue
        dr.line([view.to_canvas(a), view.to_canvas(b)], fill=(153, 153, 153))
    for ent in view.sorted_entities(draw):
        cx, cy = view.to_canvas(ent)
        r = view.radius(ent)
        rgb = _rgb(ent["color"])
        if ent["shape"] == "arrow":
            dr.polygon(_arrow_points(cx, cy, r, ent["orientation"]), fill=rgb)
        else:
            dr.ellipse([cx - r, cy - r, cx + r, cy + r], fill=rgb, outline=(51, 51, 51))
    return img


def _rgb(css: str) -> tuple:
    return Color(css).rgb()


def render_frame(model, tick: int, **view_opts) -> str:
    """SVG image of the model at one recorded tick."""
    return svg_frame(draw_list(model, tick), **view_opts)


def animate_sim(model, path, fps: int = 10, **view_opts):
    """Assemble one frame per recorded tick into an animation.

    A ``*.gif`` path produces an animated GIF; any other path is treated as
    a directory that receives numbered SVG frames (``00000.svg``, ...).
    Output bytes depend only on the tapes and options, so identical runs
    export identical files.
    """
    if model.record_store.is_empty():
        raise EngineError("nothing to animate: the model has no recorded ticks")
    if fps <= 0:
        raise ValueError(f"fps must be positive, got {fps!r}")
    ticks = range(model.tick + 1)
    if str(path).endswith(".gif"):
        frames = [
            raster_frame(draw_list(model, t), **view_opts).quantize(colors=64)
            for t in ticks
        ]
        frames[0].save(
            path,
            save_all=True,
            append_images=frames[1:],
            duration=int(round(1000 / fps)),
            loop=0,
        )
    else:
        os.makedirs(path, exist_ok=True)
        for t in ticks:
            name = os.path.join(path, f"{t:05d}.svg")
            with open(name, "w", encoding="utf-8") as f:
                f.write(svg_frame(draw_list(model, t), **view_opts))
    return path

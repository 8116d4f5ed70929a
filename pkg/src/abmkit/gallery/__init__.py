"""Registry of the built-in models: flocking, schelling3d, ising.

Each entry wraps one model module (builder, initialiser, step rule,
parameter schema with defaults, slider controls, live-plot reducers) so the
CLI and the steering service can drive any model by name.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import DEFAULT_SEED, init_model
from . import flocking, ising, schelling


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    mod: object = field(repr=False)

    @property
    def params(self) -> dict:
        """Parameter schema as {name: default}; defaults carry the type."""
        return dict(self.mod.PARAMS)

    @property
    def structural(self) -> frozenset:
        """Parameters that reshape the model and only apply through a reset."""
        return self.mod.STRUCTURAL

    @property
    def controls(self) -> tuple:
        """Slider specs as (key, lo, step, hi)."""
        return self.mod.CONTROLS

    @property
    def default_steps(self) -> int:
        return self.mod.DEFAULT_STEPS

    @property
    def default_frames(self) -> int:
        return self.mod.DEFAULT_FRAMES

    @property
    def props_to_record(self):
        return self.mod.PROPS_TO_RECORD

    def build_model(self, seed: int = DEFAULT_SEED, **overrides):
        unknown = sorted(set(overrides) - set(self.mod.PARAMS))
        if unknown:
            raise ValueError(
                f"unknown parameter(s) {unknown} for {self.name}; "
                f"valid: {sorted(self.mod.PARAMS)}"
            )
        return self.mod.build(seed=seed, **overrides)

    def init(self, model):
        init_model(model, self.mod.initialiser, self.mod.PROPS_TO_RECORD)

    @property
    def initialiser(self):
        return self.mod.initialiser

    @property
    def step_rule(self):
        return self.mod.step_rule

    def plots(self, model) -> tuple:
        """Live-plot reducers bound to this model: (label, kind, fn)."""
        return self.mod.plots(model)

    def count_preds(self, model) -> dict:
        """Named count predicates for data export."""
        return self.mod.count_preds(model)

    def parse_param(self, key: str, text: str):
        """Parse a CLI/service string override against the schema's types."""
        if key not in self.mod.PARAMS:
            raise ValueError(
                f"unknown parameter {key!r} for {self.name}; "
                f"valid: {sorted(self.mod.PARAMS)}"
            )
        default = self.mod.PARAMS[key]
        try:
            if isinstance(default, bool):
                if text not in ("true", "false"):
                    raise ValueError("expected true/false")
                return text == "true"
            if isinstance(default, int):
                return int(text)
            if isinstance(default, float):
                return float(text)
            if isinstance(default, tuple):
                return tuple(int(p) for p in text.split(","))
        except ValueError:
            raise ValueError(f"cannot parse {text!r} as a value for {key!r}") from None
        return text


def plot_series_frame(entry: GalleryEntry, model):
    """Plot-series table recomputed from the record tapes.

    Fractions divide two integer counts and node means divide an
    id-ordered sum, so values are bit-identical to what the steering
    service computes live, step by step.
    """
    from ..data import TableFrame, get_nodes_avg_props, get_nums_agents

    columns = {"tick": list(range(model.tick + 1))}
    for label, kind, fn in entry.plots(model):
        if kind == "agents-fraction":
            frame = get_nums_agents(model, fn, lambda a: True, labels=[label, "all"])
            hits, totals = frame.column(label), frame.column("all")
            columns[label] = [h / t for h, t in zip(hits, totals)]
        elif kind == "nodes-mean":
            frame = get_nodes_avg_props(model, fn, labels=[label])
            columns[label] = frame.column(label)
        else:
            raise ValueError(f"unknown plot reducer kind {kind!r}")
    return TableFrame(columns)


GALLERY = {
    "flocking": GalleryEntry("flocking", flocking),
    "schelling3d": GalleryEntry("schelling3d", schelling),
    "ising": GalleryEntry("ising", ising),
}


def get_entry(name: str) -> GalleryEntry:
    try:
        return GALLERY[name]
    except KeyError:
        raise ValueError(
            f"unknown model {name!r}; available: {', '.join(sorted(GALLERY))}"
        ) from None

"""Tabular extraction from record tapes, file export/import, line plots.

Every query returns a :class:`TableFrame`: named equal-length columns with
``tick`` (0..S) first. Frames hold only scalar cells; Vect-valued series
expand into per-component columns (``pos_x``, ``pos_y``, ...) and colors
become their CSS string at frame construction. ``None`` marks a property
missing at that tick (entity not yet born, already dead, or key unset).

CSV export is RFC-4180 (CRLF, quoted as needed); floats use Python's
shortest round-trip repr so re-importing is value-exact and ``3.0`` stays
distinguishable from the int ``3``. JSON export is column-oriented.
"""

from __future__ import annotations

import csv
import json

from .errors import DataQueryError
from .values import Color, Vect

_AXES = ("x", "y", "z")


def _cell(value):
    """Scalar cell for a tape value (Color becomes its CSS string)."""
    if isinstance(value, Color):
        return value.css()
    return value


def _same_value(a, b) -> bool:
    # 3 vs 3.0 vs True compare equal in Python; frames treat them as distinct
    return type(a) is type(b) and a == b


class TableFrame:
    """Ordered named columns of equal length, ``tick`` always first."""

    def __init__(self, columns: dict):
        if "tick" not in columns:
            raise ValueError("a frame needs a tick column")
        names = ["tick"] + [n for n in columns if n != "tick"]
        self._data = {n: list(columns[n]) for n in names}
        n_rows = len(self._data["tick"])
        for name, col in self._data.items():
            if len(col) != n_rows:
                raise ValueError(
                    f"column {name!r} has {len(col)} rows, tick has {n_rows}"
                )

    @property
    def columns(self) -> list:
        return list(self._data)

    def column(self, name: str) -> list:
        try:
            return self._data[name]
        except KeyError:
            raise DataQueryError(f"no column {name!r} in the frame") from None

    __getitem__ = column

    @property
    def n_rows(self) -> int:
        return len(self._data["tick"])

    def row(self, i: int) -> dict:
        return {name: col[i] for name, col in self._data.items()}

    def __len__(self):
        return self.n_rows

    def __eq__(self, other):
        if not isinstance(other, TableFrame):
            return NotImplemented
        if self.columns != other.columns or self.n_rows != other.n_rows:
            return False
        return all(
            _same_value(a, b)
            for name in self.columns
            for a, b in zip(self._data[name], other._data[name])
        )

    def __repr__(self):
        return f"TableFrame({self.n_rows} rows x {self.columns})"


def _expand_series(key, series, ticks):
    """Columns for one tape: scalars map through, vects split per component."""
    if series.variant == "vect":
        dim = 2
        for v in series.values:
            if v is not None:
                dim = v.dim
                break
        cols = {}
        for axis in range(dim):
            name = f"{key}_{_AXES[axis]}"
            cols[name] = [
                None if (v := series.get(t)) is None else v[axis] for t in ticks
            ]
        return cols
    return {key: [_cell(series.get(t)) for t in ticks]}


class _Snapshot:
    """Read-only attribute view of one entity's recorded values at one tick."""

    __slots__ = ("_values", "_id")

    def __init__(self, entity_id, values: dict):
        object.__setattr__(self, "_id", entity_id)
        object.__setattr__(self, "_values", values)

    @property
    def id(self):
        return self._id

    def __getattr__(self, key):
        try:
            return self._values[key]
        except KeyError:
            raise AttributeError(f"entity {self._id} has no recorded key {key!r}") from None

    def __setattr__(self, key, value):
        raise AttributeError("snapshots are read-only")


def _snapshots_at(store, section, tick):
    """Snapshots of every entity whose tapes cover ``tick``, in id order."""
    out = []
    for entity in sorted(store.sections[section]):
        table = store.sections[section][entity]
        covered = any(
            s.first_tick <= tick <= s.last_tick for s in table.values() if len(s)
        )
        if covered:
            out.append(_Snapshot(entity, {k: s.get(tick) for k, s in table.items()}))
    return out


def _apply(fn, snap, tick, section):
    try:
        return fn(snap)
    except Exception as exc:
        raise DataQueryError(
            f"reducer failed at tick {tick} on {section[:-1]} {snap._id}: {exc}"
        ) from exc


def _check_labels(fns, labels):
    if not fns:
        raise ValueError("at least one reducer is required")
    if labels is None or len(labels) != len(fns):
        raise ValueError(
            f"labels must name each reducer: got {labels!r} for {len(fns)} reducer(s)"
        )
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate labels in {labels!r}")


def _mean(values, label, tick):
    if not values:
        return None
    first = values[0]
    if isinstance(first, Vect):
        total = first
        for v in values[1:]:
            total = total + v
        return total / len(values)
    try:
        return sum(values) / len(values)
    except TypeError:
        raise DataQueryError(
            f"cannot average {label!r} at tick {tick}: non-numeric value {first!r}"
        ) from None


def get_agent_data(agent, model) -> TableFrame:
    """Per-tick table of everything one agent recorded.

    Columns follow the agent's record-key order; ticks outside the agent's
    recorded range (born late, died early) hold None.
    """
    agent_id = agent if isinstance(agent, int) else agent.id
    table = model.record_store.entity_series("agents", agent_id)
    if not table:
        raise DataQueryError(f"agent {agent_id} recorded nothing")
    ticks = list(range(model.tick + 1))
    columns = {"tick": ticks}
    for key, series in table.items():
        columns.update(_expand_series(key, series, ticks))
    return TableFrame(columns)


def _avg_frame(model, section, fns, labels):
    ticks = list(range(model.tick + 1))
    store = model.record_store
    columns = {"tick": ticks}
    per_label = {label: [] for label in labels}
    for t in ticks:
        snaps = _snapshots_at(store, section, t)
        for fn, label in zip(fns, labels):
            values = [_apply(fn, s, t, section) for s in snaps]
            per_label[label].append(_mean(values, label, t))
    for label in labels:
        values = per_label[label]
        if any(isinstance(v, Vect) for v in values):
            dim = next(v.dim for v in values if isinstance(v, Vect))
            for axis in range(dim):
                columns[f"{label}_{_AXES[axis]}"] = [
                    None if v is None else v[axis] for v in values
                ]
        else:
            columns[label] = values
    return TableFrame(columns)


def get_agents_avg_props(model, *fns, labels=None) -> TableFrame:
    """Per-tick arithmetic mean of each reducer over live agents.

    Reducers see recorded snapshots (attribute access to recorded keys).
    Vect-valued reducers average componentwise and expand into per-component
    columns. Dead agents are skipped; the divisor is the live count at that
    tick.
    """
    _check_labels(fns, labels)
    return _avg_frame(model, "agents", fns, labels)


def get_nodes_avg_props(model, *fns, labels=None) -> TableFrame:
    """Per-tick mean of each reducer over graph nodes (recorded snapshots)."""
    _check_labels(fns, labels)
    return _avg_frame(model, "nodes", fns, labels)


def get_nums_agents(model, *predicates, labels=None) -> TableFrame:
    """Per-tick count of live agents satisfying each predicate."""
    _check_labels(predicates, labels)
    ticks = list(range(model.tick + 1))
    store = model.record_store
    columns = {"tick": ticks}
    counts = {label: [] for label in labels}
    for t in ticks:
        snaps = _snapshots_at(store, "agents", t)
        for pred, label in zip(predicates, labels):
            counts[label].append(
                sum(1 for s in snaps if _apply(pred, s, t, "agents"))
            )
    columns.update(counts)
    return TableFrame(columns)


# -- files ---------------------------------------------------------------------


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(text: str):
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def export_table(frame: TableFrame, fmt: str, path):
    """Write a frame as ``csv`` or ``json`` (column-oriented)."""
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(frame.columns)
            for i in range(frame.n_rows):
                writer.writerow([_format_cell(frame.column(n)[i]) for n in frame.columns])
    elif fmt == "json":
        payload = {
            "v": 1,
            "columns": frame.columns,
            "data": {n: frame.column(n) for n in frame.columns},
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=1)
            f.write("\n")
    else:
        raise ValueError(f"unknown table format {fmt!r}; use 'csv' or 'json'")


def read_table(path, fmt=None) -> TableFrame:
    """Inverse of :func:`export_table`; format inferred from the extension.

    CSV cells are typed by inference (empty -> None, true/false -> bool,
    then int, then float, else string), which is exact for engine-exported
    data; JSON preserves types natively.
    """
    p = str(path)
    if fmt is None:
        fmt = "json" if p.endswith(".json") else "csv"
    if fmt == "csv":
        with open(path, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        if not rows:
            raise ValueError(f"{path}: empty CSV")
        header = rows[0]
        columns = {name: [] for name in header}
        for row in rows[1:]:
            for name, text in zip(header, row):
                columns[name].append(_parse_cell(text))
        return TableFrame(columns)
    if fmt == "json":
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
        if payload.get("v") != 1:
            raise ValueError(f"{path}: unsupported table version {payload.get('v')!r}")
        return TableFrame({n: payload["data"][n] for n in payload["columns"]})
    raise ValueError(f"unknown table format {fmt!r}; use 'csv' or 'json'")


# -- plots -----------------------------------------------------------------------

_PLOT_COLORS = ("#2666cf", "#dc322f", "#40a02b", "#b58900", "#6c71c4", "#2aa198")


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def plot_lines(frame: TableFrame, path, title: str = "") -> str:
    """Write a standalone SVG line plot: one polyline per numeric column.

    The x axis is the tick column; label (string) columns are skipped and
    None cells break the line. Returns the SVG text.
    """
    width, height = 640, 400
    ml, mr, mt, mb = 56, 16, 28, 40
    ticks = frame.column("tick")
    series = []
    for name in frame.columns[1:]:
        col = frame.column(name)
        numeric = [
            (t, float(v))
            for t, v in zip(ticks, col)
            if isinstance(v, (int, float)) and not isinstance(v, bool)
        ]
        if numeric or all(v is None for v in col):
            series.append((name, col))
    if not series:
        raise DataQueryError("nothing to plot: no numeric columns in the frame")
    ys = [
        float(v)
        for _, col in series
        for v in col
        if isinstance(v, (int, float)) and not isinstance(v, bool)
    ]
    x_lo, x_hi = float(min(ticks)), float(max(ticks))
    y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    px = lambda x: ml + (x - x_lo) / (x_hi - x_lo) * (width - ml - mr)
    py = lambda y: height - mb - (y - y_lo) / (y_hi - y_lo) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:g}" y="18" text-anchor="middle" font-size="14">{title}</text>'
        )
    # gridlines and axis labels
    for i in range(5):
        y = y_lo + (y_hi - y_lo) * i / 4
        parts.append(
            f'<line x1="{ml}" y1="{_fmt(py(y))}" x2="{width - mr}" y2="{_fmt(py(y))}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ml - 6}" y="{_fmt(py(y) + 4)}" text-anchor="end">{_fmt(y)}</text>'
        )
    for i in range(5):
        x = x_lo + (x_hi - x_lo) * i / 4
        parts.append(
            f'<text x="{_fmt(px(x))}" y="{height - mb + 16}" text-anchor="middle">{_fmt(x)}</text>'
        )
    parts.append(
        f'<rect x="{ml}" y="{mt}" width="{width - ml - mr}" height="{height - mt - mb}" '
        f'fill="none" stroke="#333333"/>'
    )
    parts.append(
        f'<text x="{(ml + width - mr) / 2:g}" y="{height - 8}" text-anchor="middle">tick</text>'
    )
    for idx, (name, col) in enumerate(series):
        color = _PLOT_COLORS[idx % len(_PLOT_COLORS)]
        segment = []
        chunks = []
        for t, v in zip(ticks, col):
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                segment.append(f"{_fmt(px(t))},{_fmt(py(float(v)))}")
            elif segment:
                chunks.append(segment)
                segment = []
        if segment:
            chunks.append(segment)
        for chunk in chunks:
            if len(chunk) == 1:
                x, y = chunk[0].split(",")
                parts.append(f'<circle cx="{x}" cy="{y}" r="2" fill="{color}"/>')
            else:
                parts.append(
                    f'<polyline points="{" ".join(chunk)}" fill="none" '
                    f'stroke="{color}" stroke-width="1.5"/>'
                )
        ly = mt + 14 + 16 * idx
        parts.append(
            f'<line x1="{width - mr - 120}" y1="{ly - 4}" x2="{width - mr - 100}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{width - mr - 94}" y="{ly}">{name}</text>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(svg)
    return svg

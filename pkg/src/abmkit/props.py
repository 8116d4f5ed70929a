"""Property tables shared by agents, patches, graph nodes/edges and model
parameters.

Tables are plain dicts wrapped in a :class:`PropsView` that exposes keys as
attributes (``patch.food``, ``params.min_dis``, ``nodesprops[3].spin``) and
enforces variant stability: once a key holds an int it cannot silently
become a real, a label, etc.
"""

from __future__ import annotations

from .values import Color, Vect, variant_of

# Keys with engine semantics: position, velocity, glyph, heading, fill,
# glyph scale. Everything else is user-defined.
RESERVED_KEYS = ("pos", "vel", "shape", "orientation", "color", "size")


def coerce_prop(key, value):
    """Convenience coercions for reserved graphics keys.

    ``pos``/``vel`` accept numeric tuples/lists and become Vect; ``color``
    accepts a color name or '#rrggbb' string and becomes Color.
    """
    if key in ("pos", "vel") and isinstance(value, (tuple, list)):
        return Vect(*value)
    if key == "color" and isinstance(value, str):
        return Color(value)
    return value


def check_stable(table: dict, key, value):
    """Raise TypeError if writing ``value`` would flip the variant of ``key``."""
    new = variant_of(value)  # also rejects non-values
    old = table.get(key)
    if old is not None:
        prev = variant_of(old)
        if prev != new:
            raise TypeError(
                f"property {key!r} holds {prev} values and cannot be "
                f"reassigned a {new} value"
            )
    return value


class PropsView:
    """Attribute-style accessor over a property dict.

    Reads of unknown keys raise AttributeError. Writes run the variant
    stability check and (when ``coerce`` is set) the reserved-key
    coercions.
    """

    __slots__ = ("_table", "_coerce")

    def __init__(self, table: dict, coerce: bool = True):
        object.__setattr__(self, "_table", table)
        object.__setattr__(self, "_coerce", coerce)

    def __getattr__(self, key):
        try:
            return self._table[key]
        except KeyError:
            raise AttributeError(f"no property {key!r}") from None

    def __setattr__(self, key, value):
        if self._coerce:
            value = coerce_prop(key, value)
        check_stable(self._table, key, value)
        self._table[key] = value

    def __contains__(self, key):
        return key in self._table

    def get(self, key, default=None):
        return self._table.get(key, default)

    def keys(self):
        return self._table.keys()

    def as_dict(self) -> dict:
        return dict(self._table)

    def __repr__(self):
        return f"PropsView({self._table!r})"

"""Dynamic property values.

Every property carried by an agent, patch, graph node, graph edge or model
parameter table is one of six variants: int, real, bool, label (a plain
string), :class:`Vect` or :class:`Color`. A given key on a given entity
keeps the same variant for the whole run; the engine enforces this on
every write so recorded series stay homogeneous.

All variants are immutable, which lets record tapes store values without
defensive copying.
"""

from __future__ import annotations

import math

# Named colors resolvable both by the renderer and by CSS on the client side.
NAMED_COLORS = {
    "black": (0, 0, 0),
    "white": (255, 255, 255),
    "red": (220, 50, 47),
    "green": (64, 160, 43),
    "blue": (38, 102, 207),
    "yellow": (230, 190, 20),
    "orange": (235, 135, 20),
    "purple": (120, 60, 180),
    "cyan": (42, 161, 152),
    "magenta": (211, 54, 130),
    "pink": (240, 120, 160),
    "brown": (140, 90, 40),
    "grey": (128, 128, 128),
    "gray": (128, 128, 128),
}


class Vect:
    """Immutable 2- or 3-component vector in space units.

    Arithmetic is componentwise and dimension-preserving; scalar
    multiplication and division are supported on either side where
    meaningful. Components may be ints (grid positions) or floats.
    """

    __slots__ = ("_c",)

    def __init__(self, *components):
        if len(components) not in (2, 3):
            raise ValueError(f"Vect takes 2 or 3 components, got {len(components)}")
        for c in components:
            if isinstance(c, bool) or not isinstance(c, (int, float)):
                raise TypeError(f"Vect components must be numbers, got {c!r}")
        object.__setattr__(self, "_c", tuple(components))

    @classmethod
    def _make(cls, components: tuple) -> "Vect":
        # fast path for arithmetic results: components are already validated
        v = object.__new__(cls)
        object.__setattr__(v, "_c", components)
        return v

    @property
    def dim(self) -> int:
        return len(self._c)

    @property
    def x(self):
        return self._c[0]

    @property
    def y(self):
        return self._c[1]

    @property
    def z(self):
        if len(self._c) < 3:
            raise AttributeError("2D Vect has no z component")
        return self._c[2]

    def __len__(self):
        return len(self._c)

    def __iter__(self):
        return iter(self._c)

    def __getitem__(self, i):
        return self._c[i]

    def __eq__(self, other):
        return isinstance(other, Vect) and self._c == other._c

    def __hash__(self):
        return hash(self._c)

    def __add__(self, other):
        if not isinstance(other, Vect):
            return NotImplemented
        a, b = self._c, other._c
        if len(a) != len(b):
            raise ValueError(f"dimension mismatch: {len(a)}D vs {len(b)}D")
        v = object.__new__(Vect)
        if len(a) == 2:
            object.__setattr__(v, "_c", (a[0] + b[0], a[1] + b[1]))
        else:
            object.__setattr__(v, "_c", (a[0] + b[0], a[1] + b[1], a[2] + b[2]))
        return v

    def __sub__(self, other):
        if not isinstance(other, Vect):
            return NotImplemented
        a, b = self._c, other._c
        if len(a) != len(b):
            raise ValueError(f"dimension mismatch: {len(a)}D vs {len(b)}D")
        v = object.__new__(Vect)
        if len(a) == 2:
            object.__setattr__(v, "_c", (a[0] - b[0], a[1] - b[1]))
        else:
            object.__setattr__(v, "_c", (a[0] - b[0], a[1] - b[1], a[2] - b[2]))
        return v

    def __neg__(self):
        return Vect._make(tuple(-a for a in self._c))

    def __mul__(self, scalar):
        if isinstance(scalar, bool) or not isinstance(scalar, (int, float)):
            return NotImplemented
        a = self._c
        if len(a) == 2:
            return Vect._make((a[0] * scalar, a[1] * scalar))
        return Vect._make((a[0] * scalar, a[1] * scalar, a[2] * scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, bool) or not isinstance(scalar, (int, float)):
            return NotImplemented
        a = self._c
        if len(a) == 2:
            return Vect._make((a[0] / scalar, a[1] / scalar))
        return Vect._make((a[0] / scalar, a[1] / scalar, a[2] / scalar))

    def __setattr__(self, name, value):
        raise AttributeError("Vect is immutable")

    def __repr__(self):
        return f"Vect{self._c}"

    def is_integral(self) -> bool:
        """True if every component is an int (bool excluded at construction)."""
        return all(isinstance(c, int) for c in self._c)


def veclength(v: Vect) -> float:
    """Euclidean norm of a Vect; >= 0 and 0 only for the zero vector."""
    c = v._c
    if len(c) == 2:
        return math.sqrt(c[0] * c[0] + c[1] * c[1])
    return math.sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2])


class Color:
    """A named color or an (r, g, b) triple with 0..255 channels."""

    __slots__ = ("_name", "_rgb")

    def __init__(self, *args):
        if len(args) == 1 and isinstance(args[0], str):
            name = args[0].lower()
            if name.startswith("#"):
                if len(name) != 7:
                    raise ValueError(f"hex color must be #rrggbb, got {args[0]!r}")
                rgb = tuple(int(name[i : i + 2], 16) for i in (1, 3, 5))
                object.__setattr__(self, "_name", None)
                object.__setattr__(self, "_rgb", rgb)
                return
            if name not in NAMED_COLORS:
                raise ValueError(f"unknown color name {args[0]!r}")
            object.__setattr__(self, "_name", name)
            object.__setattr__(self, "_rgb", NAMED_COLORS[name])
        elif len(args) == 3:
            for ch in args:
                if isinstance(ch, bool) or not isinstance(ch, int) or not 0 <= ch <= 255:
                    raise ValueError(f"rgb channels must be ints in 0..255, got {args!r}")
            object.__setattr__(self, "_name", None)
            object.__setattr__(self, "_rgb", tuple(args))
        else:
            raise TypeError("Color takes a name, '#rrggbb', or three rgb ints")

    @property
    def name(self):
        return self._name

    def rgb(self) -> tuple:
        return self._rgb

    def css(self) -> str:
        """CSS-compatible string: the name if named, else '#rrggbb'."""
        if self._name is not None:
            return self._name
        return "#%02x%02x%02x" % self._rgb

    def __eq__(self, other):
        return isinstance(other, Color) and self._rgb == other._rgb

    def __hash__(self):
        return hash(self._rgb)

    def __setattr__(self, name, value):
        raise AttributeError("Color is immutable")

    def __repr__(self):
        if self._name is not None:
            return f"Color({self._name!r})"
        return f"Color{self._rgb}"


VARIANTS = ("int", "real", "bool", "label", "vect", "color")


def variant_of(value) -> str:
    """Variant tag for a property value; raises TypeError for non-values.

    bool is checked before int since Python bools are ints.
    """
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "real"
    if isinstance(value, str):
        return "label"
    if isinstance(value, Vect):
        return "vect"
    if isinstance(value, Color):
        return "color"
    raise TypeError(f"{value!r} is not a valid property value")


def encode_value(value):
    """JSON-encodable form of a property value (None encodes a missing entry).

    Scalars map to native JSON; Vect and Color are tagged one-key objects so
    decoding is unambiguous.
    """
    if value is None:
        return None
    tag = variant_of(value)
    if tag in ("int", "real", "bool", "label"):
        return value
    if tag == "vect":
        return {"$vect": list(value)}
    return {"$color": value.name if value.name is not None else list(value.rgb())}


def decode_value(obj):
    """Inverse of :func:`encode_value`."""
    if obj is None:
        return None
    if isinstance(obj, dict):
        if set(obj) == {"$vect"}:
            return Vect(*obj["$vect"])
        if set(obj) == {"$color"}:
            spec = obj["$color"]
            return Color(spec) if isinstance(spec, str) else Color(*spec)
        raise ValueError(f"unrecognized tagged value {obj!r}")
    if isinstance(obj, (bool, int, float, str)):
        return obj
    raise ValueError(f"cannot decode {obj!r} as a property value")

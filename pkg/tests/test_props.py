import pytest

from abmkit.props import PropsView, check_stable, coerce_prop
from abmkit.values import Color, Vect


class TestCoerce:
    def test_pos_vel_tuples_become_vect(self):
        assert coerce_prop("pos", (1, 2)) == Vect(1, 2)
        assert coerce_prop("vel", [0.5, -1.0, 2.0]) == Vect(0.5, -1.0, 2.0)
        v = Vect(1, 2)
        assert coerce_prop("pos", v) is v

    def test_color_strings(self):
        assert coerce_prop("color", "red") == Color("red")
        assert coerce_prop("color", "#102030") == Color(0x10, 0x20, 0x30)
        c = Color("blue")
        assert coerce_prop("color", c) is c

    def test_other_keys_untouched(self):
        assert coerce_prop("mood", "red") == "red"  # stays a label
        assert coerce_prop("speed", (1, 2)) == (1, 2)


class TestStability:
    def test_first_write_fixes_variant(self):
        table = {}
        check_stable(table, "energy", 5)
        table["energy"] = 5
        with pytest.raises(TypeError):
            check_stable(table, "energy", 5.0)
        with pytest.raises(TypeError):
            check_stable(table, "energy", True)
        check_stable(table, "energy", -3)  # same variant fine

    def test_bool_vs_int_are_distinct(self):
        table = {"flag": True}
        with pytest.raises(TypeError):
            check_stable(table, "flag", 1)
        table = {"n": 1}
        with pytest.raises(TypeError):
            check_stable(table, "n", True)

    def test_rejects_non_values(self):
        with pytest.raises(TypeError):
            check_stable({}, "k", [1, 2, 3])


class TestPropsView:
    def test_attribute_access(self):
        table = {"mood": "happy"}
        view = PropsView(table)
        assert view.mood == "happy"
        view.mood = "sad"
        assert table["mood"] == "sad"
        with pytest.raises(AttributeError):
            view.missing

    def test_coercion_on_write(self):
        table = {}
        view = PropsView(table)
        view.pos = (1.0, 2.0)
        assert isinstance(table["pos"], Vect)
        view.color = "green"
        assert isinstance(table["color"], Color)

    def test_no_coerce_flag(self):
        table = {}
        view = PropsView(table, coerce=False)
        with pytest.raises(TypeError):
            view.pos = (1.0, 2.0)  # a raw tuple is not a property value

    def test_variant_guard_applies(self):
        view = PropsView({"n": 2})
        with pytest.raises(TypeError):
            view.n = "two"

    def test_dict_protocol(self):
        view = PropsView({"a": 1, "b": 2.0})
        assert "a" in view and "z" not in view
        assert view.get("z", 9) == 9
        assert sorted(view.keys()) == ["a", "b"]
        snapshot = view.as_dict()
        snapshot["a"] = 99
        assert view.a == 1  # as_dict is a copy

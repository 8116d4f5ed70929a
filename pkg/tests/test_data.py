"""Tabular queries over record tapes, file round trips, line plots."""

import pytest

from abmkit.core import create_model, init_model, run_model
from abmkit.data import (
    TableFrame,
    export_table,
    get_agent_data,
    get_agents_avg_props,
    get_nodes_avg_props,
    get_nums_agents,
    plot_lines,
    read_table,
)
from abmkit.errors import DataQueryError
from abmkit.graph import dynamic_simple_graph
from abmkit.values import Vect

from helpers import spatial_model


class TestTableFrame:
    def test_tick_always_first(self):
        frame = TableFrame({"b": [1, 2], "tick": [0, 1], "a": [3, 4]})
        assert frame.columns == ["tick", "b", "a"]

    def test_tick_required(self):
        with pytest.raises(ValueError, match="tick"):
            TableFrame({"a": [1, 2]})

    def test_ragged_columns_rejected(self):
        with pytest.raises(ValueError, match="rows"):
            TableFrame({"tick": [0, 1, 2], "a": [1, 2]})

    def test_column_access(self):
        frame = TableFrame({"tick": [0, 1], "a": [5, 6]})
        assert frame.column("a") == [5, 6]
        assert frame["a"] == [5, 6]
        with pytest.raises(DataQueryError, match="no column 'b'"):
            frame.column("b")

    def test_rows_and_len(self):
        frame = TableFrame({"tick": [0, 1], "a": [5, None]})
        assert len(frame) == frame.n_rows == 2
        assert frame.row(1) == {"tick": 1, "a": None}

    def test_equality_is_type_exact(self):
        a = TableFrame({"tick": [0], "x": [3]})
        b = TableFrame({"tick": [0], "x": [3.0]})
        c = TableFrame({"tick": [0], "x": [3]})
        assert a != b  # int 3 vs float 3.0
        assert a == c
        assert a != TableFrame({"tick": [0], "y": [3]})


def walker_model(n=4, steps=5, mortal=False):
    model = spatial_model(
        n, mortal=mortal, seed=7,
        defaults={"energy": 10.0, "breed": "walker"},
        record=("pos", "energy", "breed"),
    )

    def rule(m):
        for a in m.agents:
            a.pos = a.pos + Vect(m.rng.random(), m.rng.random())
            a.energy = a.energy - 1.0

    init_model(model)
    if steps:
        run_model(model, steps, rule)
    return model


class TestAgentData:
    def test_columns_and_vect_expansion(self):
        model = walker_model(steps=3)
        frame = get_agent_data(model.agents[0], model)
        assert frame.columns == ["tick", "pos_x", "pos_y", "energy", "breed"]
        assert frame["tick"] == [0, 1, 2, 3]
        assert frame["energy"] == [10.0, 9.0, 8.0, 7.0]
        assert frame["breed"] == ["walker"] * 4

    def test_matches_raw_series(self):
        model = walker_model(steps=4)
        agent = model.agents[2]
        frame = get_agent_data(agent, model)
        tape = model.record_store.sections["agents"][agent.id]["pos"]
        for t in range(5):
            assert frame["pos_x"][t] == tape.get(t).x
            assert frame["pos_y"][t] == tape.get(t).y

    def test_accepts_agent_or_id(self):
        model = walker_model(steps=2)
        assert get_agent_data(model.agents[1], model) == get_agent_data(2, model)

    def test_dead_agent_padded_with_none(self):
        model = walker_model(steps=0, mortal=True)

        def rule(m):
            if m.tick == 1:  # dies while computing tick 2
                m.kill_agent(m.agents[0])
            for a in m.agents:
                a.energy = a.energy - 1.0

        run_model(model, 4, rule)
        frame = get_agent_data(1, model)
        assert frame["energy"] == [10.0, 9.0, None, None, None]

    def test_unrecorded_agent_rejected(self):
        model = walker_model(steps=1)
        with pytest.raises(DataQueryError, match="99"):
            get_agent_data(99, model)


class TestAverages:
    def test_mean_matches_manual_recount(self):
        model = walker_model(n=5, steps=6)
        frame = get_agents_avg_props(model, lambda a: a.energy, labels=["energy"])
        store = model.record_store.sections["agents"]
        for t in range(7):
            expect = sum(store[i]["energy"].get(t) for i in store) / len(store)
            assert frame["energy"][t] == expect

    def test_vect_reducer_expands_componentwise(self):
        model = walker_model(n=3, steps=2)
        frame = get_agents_avg_props(model, lambda a: a.pos, labels=["c"])
        assert frame.columns == ["tick", "c_x", "c_y"]
        store = model.record_store.sections["agents"]
        xs = [store[i]["pos"].get(2).x for i in store]
        assert frame["c_x"][2] == pytest.approx(sum(xs) / 3, abs=0)

    def test_dead_agents_shrink_the_divisor(self):
        model = walker_model(n=3, steps=0, mortal=True)

        def rule(m):
            if m.tick == 0:
                m.kill_agent(m.agents[0])
            for a in m.agents:
                a.energy = a.energy + 1.0

        run_model(model, 2, rule)
        frame = get_agents_avg_props(model, lambda a: a.energy, labels=["e"])
        # tick 1 onward only two agents remain
        assert frame["e"] == [10.0, 11.0, 12.0]

    def test_labels_are_required_and_unique(self):
        model = walker_model(steps=1)
        with pytest.raises(ValueError, match="labels"):
            get_agents_avg_props(model, lambda a: a.energy)
        with pytest.raises(ValueError, match="labels"):
            get_agents_avg_props(model, lambda a: a.energy, labels=["a", "b"])
        with pytest.raises(ValueError, match="duplicate"):
            get_agents_avg_props(
                model, lambda a: a.energy, lambda a: a.energy, labels=["a", "a"]
            )
        with pytest.raises(ValueError, match="reducer"):
            get_agents_avg_props(model, labels=[])

    def test_failing_reducer_names_tick_and_agent(self):
        model = walker_model(steps=1)
        with pytest.raises(DataQueryError, match=r"tick 0 on agent 1"):
            get_agents_avg_props(model, lambda a: a.missing, labels=["m"])

    def test_non_numeric_average_rejected(self):
        model = walker_model(steps=1)
        with pytest.raises(DataQueryError, match="breed"):
            get_agents_avg_props(model, lambda a: a.breed, labels=["breed"])

    def test_nodes_average(self):
        model = create_model([], dynamic_simple_graph(4), seed=3)

        def setup(m):
            for i in m.graph.nodes:
                m.graph.nodesprops[i].load = float(i)

        def rule(m):
            for i in m.graph.nodes:
                m.graph.nodesprops[i].load = m.graph.nodesprops[i].load + 1.0

        init_model(model, setup, props_to_record={"nodes": ("load",)})
        run_model(model, 3, rule)
        frame = get_nodes_avg_props(model, lambda n: n.load, labels=["load"])
        assert frame["load"] == [2.5, 3.5, 4.5, 5.5]


class TestCounts:
    def test_counts_match_manual_recount(self):
        model = walker_model(n=6, steps=5)
        frame = get_nums_agents(
            model,
            lambda a: a.energy > 7.0,
            lambda a: True,
            labels=["rich", "all"],
        )
        store = model.record_store.sections["agents"]
        for t in range(6):
            rich = sum(1 for i in store if store[i]["energy"].get(t) > 7.0)
            assert frame["rich"][t] == rich
            assert frame["all"][t] == 6
        # energy starts at 10 and drops by 1; > 7 holds through tick 2
        assert frame["rich"] == [6, 6, 6, 0, 0, 0]

    def test_dead_agents_never_counted(self):
        model = walker_model(n=3, steps=0, mortal=True)

        def rule(m):
            if m.tick == 0:
                m.kill_agent(m.agents[2])

        run_model(model, 2, rule)
        frame = get_nums_agents(model, lambda a: True, labels=["alive"])
        assert frame["alive"] == [3, 2, 2]


ROUND_TRIP = TableFrame({
    "tick": [0, 1, 2, 3],
    "n": [3, -1, 0, 7],
    "x": [0.1, 1 / 3, -2.5e-17, 3.0],
    "flag": [True, False, True, False],
    "name": ["red", "blue", "", "with,comma"],
    "gap": [None, 1.5, None, 2],
})


class TestFiles:
    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip_is_value_exact(self, fmt, tmp_path):
        path = tmp_path / f"t.{fmt}"
        export_table(ROUND_TRIP, fmt, path)
        back = read_table(path)
        for name in ROUND_TRIP.columns:
            if name == "name":
                continue
            got, want = back[name], ROUND_TRIP[name]
            assert got == want
            assert [type(v) for v in got] == [type(v) for v in want]

    def test_csv_strings_survive_quoting(self, tmp_path):
        path = tmp_path / "t.csv"
        export_table(ROUND_TRIP, "csv", path)
        back = read_table(path)
        # empty string is indistinguishable from a missing cell in CSV
        assert back["name"] == ["red", "blue", None, "with,comma"]

    def test_json_strings_exact(self, tmp_path):
        path = tmp_path / "t.json"
        export_table(ROUND_TRIP, "json", path)
        assert read_table(path)["name"] == ROUND_TRIP["name"]

    def test_float_int_distinction_survives_csv(self, tmp_path):
        path = tmp_path / "t.csv"
        export_table(TableFrame({"tick": [0], "a": [3.0], "b": [3]}), "csv", path)
        back = read_table(path)
        assert isinstance(back["a"][0], float)
        assert isinstance(back["b"][0], int)

    def test_format_inferred_from_extension(self, tmp_path):
        path = tmp_path / "t.json"
        export_table(ROUND_TRIP, "json", path)
        assert read_table(path, fmt=None)["n"] == ROUND_TRIP["n"]

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="format"):
            export_table(ROUND_TRIP, "xlsx", tmp_path / "t.xlsx")
        with pytest.raises(ValueError, match="format"):
            read_table(tmp_path / "t.xlsx", fmt="xlsx")

    def test_empty_csv_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            read_table(path)

    def test_json_version_checked(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text('{"v": 2, "columns": ["tick"], "data": {"tick": [0]}}')
        with pytest.raises(ValueError, match="version"):
            read_table(path)


class TestPlotLines:
    def test_writes_svg_and_returns_text(self, tmp_path):
        frame = TableFrame({"tick": [0, 1, 2], "a": [0.0, 1.0, 4.0]})
        path = tmp_path / "p.svg"
        text = plot_lines(frame, path, title="demo")
        assert path.read_text(encoding="utf-8") == text
        assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
        assert "demo" in text and "polyline" in text

    def test_deterministic(self, tmp_path):
        frame = TableFrame({"tick": [0, 1, 2], "a": [1, 2, 3], "b": [0.5, None, 2.5]})
        one = plot_lines(frame, tmp_path / "one.svg")
        two = plot_lines(frame, tmp_path / "two.svg")
        assert one == two

    def test_label_columns_skipped(self, tmp_path):
        frame = TableFrame({"tick": [0, 1], "a": [1, 2], "kind": ["x", "y"]})
        text = plot_lines(frame, tmp_path / "p.svg")
        assert text.count("<polyline") == 1

    def test_nothing_numeric_rejected(self, tmp_path):
        frame = TableFrame({"tick": [0, 1], "kind": ["x", "y"]})
        with pytest.raises(DataQueryError, match="numeric"):
            plot_lines(frame, tmp_path / "p.svg")

    def test_single_point_renders_as_marker(self, tmp_path):
        frame = TableFrame({"tick": [0], "a": [5.0]})
        text = plot_lines(frame, tmp_path / "p.svg")
        assert "<circle" in text

"""End-to-end acceptance checks.

One test per shipped guarantee. Each prints a single verdict line
("[C04] PASS ...") on the real stdout so a full run leaves a grep-able
record next to the pytest summary; the boolean that is printed is the
boolean that is asserted, so the record and the outcome cannot disagree.
The expensive sweeps (20-seed flocking, 10-seed temperature scan) make
this module slow; everything else in tests/ runs in seconds.
"""

from __future__ import annotations

import math
import random
import statistics
import sys
import time

import pytest
from fastapi.testclient import TestClient

from abmkit import (
    Vect,
    create_edge,
    create_model,
    dynamic_simple_graph,
    euclidean_neighbors,
    export_table,
    get_agent_data,
    get_agents_avg_props,
    get_nodes_avg_props,
    get_nums_agents,
    grid_neighbors,
    init_model,
    knn_geometric_graph,
    read_table,
    run_model,
    veclength,
)
from abmkit.cli import main as cli_main
from abmkit.gallery import flocking, get_entry, ising, schelling
from abmkit.graph import edge_key, neighbor_nodes, random_node
from abmkit.service import create_app
from helpers import spatial_model
from test_gallery import (
    _mean_like_fraction,
    _oracle_boid_update,
    _place_two_boids,
    _spin_state,
)


_CAPMAN = None


@pytest.fixture(autouse=True)
def _writethrough_capture(request):
    # verdict lines must land in the terminal/tee output even while pytest
    # captures file descriptors, for passing tests too
    global _CAPMAN
    _CAPMAN = request.config.pluginmanager.getplugin("capturemanager")
    yield


def _emit(line: str):
    if _CAPMAN is not None:
        with _CAPMAN.global_and_fixture_disabled():
            print(line, file=sys.__stdout__, flush=True)
    else:
        print(line, file=sys.__stdout__, flush=True)


def _verdict(num: int, name: str, ok: bool, detail: str = "") -> bool:
    _emit(f"[C{num:02d}] {'PASS' if ok else 'FAIL'} {name}" + (f" -- {detail}" if detail else ""))
    return ok


# -- 1: recording contract and runtime budget -------------------------------------


@pytest.mark.slow
def test_c01_full_tapes_recorded_within_time_budget():
    cases = [
        ("flocking", {}, 500),      # 200 boids
        ("schelling3d", {}, 200),   # 200 agents on (7,7,7)
        ("ising", {}, 100),         # 500 nodes
    ]
    ok = True
    parts = []
    for name, overrides, steps in cases:
        entry = get_entry(name)
        t0 = time.perf_counter()
        model = entry.build_model(**overrides)
        entry.init(model)
        run_model(model, steps, entry.step_rule)
        dt = time.perf_counter() - t0
        store = model.record_store
        tapes = 0
        full = True
        for section in ("agents", "patches", "nodes", "edges"):
            for entity in store.entities(section):
                for series in store.entity_series(section, entity).values():
                    tapes += 1
                    full = full and series.first_tick == 0 and len(series) == steps + 1
        ok = ok and full and tapes > 0 and dt < 60.0
        parts.append(f"{name}: {tapes} tapes x {steps + 1} ticks in {dt:.1f}s")
    detail = "; ".join(parts)
    assert _verdict(1, "snapshot tape per recorded key, tick 0..N, <60s/model", ok, detail), detail


# -- 2: byte-level determinism ------------------------------------------------------


def test_c02_identical_setups_reproduce_files_byte_for_byte(tmp_path):
    ok = True
    parts = []
    cases = [
        ("ising", ["--param", "n=60", "--param", "nns=4", "--param", "flips_per_step=50"]),
        ("flocking", ["--param", "n_boids=25"]),
    ]
    for name, params in cases:
        dirs = []
        for leg in ("a", "b"):
            out = tmp_path / f"{name}-{leg}"
            rc = cli_main(["run", name, "--steps", "20", "--seed", "7", *params,
                           "--out", str(out)])
            assert rc == 0
            rc = cli_main(["animate", str(out), "--fps", "8", "--out", str(out / "anim.gif")])
            assert rc == 0
            dirs.append(out)
        a, b = dirs
        same = all(
            (a / rel).read_bytes() == (b / rel).read_bytes()
            for rel in ("manifest.json", "tapes/store.json", "exports/plots.csv", "anim.gif")
        )
        ok = ok and same
        parts.append(f"{name} store+csv+gif {'identical' if same else 'DIFFER'}")
    detail = "; ".join(parts)
    assert _verdict(2, "reruns are byte-identical (tapes, CSV, animation)", ok, detail), detail


# -- 3: neighbor queries vs quadratic scan -----------------------------------------


def _brute_euclidean(probe, model, radius, periodic, size):
    r2 = radius * radius
    pc = tuple(probe.pos)
    want = []
    for other in model.agents:
        if other.id == probe.id:
            continue
        d2 = 0.0
        for x, y, s in zip(pc, tuple(other.pos), size):
            d = abs(x - y)
            if periodic and d > s * 0.5:
                d = s - d
            d2 += d * d
        if d2 <= r2:
            want.append(other.id)
    return want


def _brute_grid(probe, model, r, periodic, size):
    center = tuple(probe.pos)
    want = []
    for other in model.agents:
        cell = tuple(other.pos)
        if other.id == probe.id or cell == center:
            continue  # co-located agents are not neighbors
        cheb = 0
        for x, y, s in zip(center, cell, size):
            d = abs(x - y)
            if periodic:
                d = min(d, s - d)
            cheb = max(cheb, d)
        if cheb <= r:
            want.append(other.id)
    return want


def test_c03_neighbor_queries_match_quadratic_scan():
    rng = random.Random(0xC3)
    combos = set()
    checks = mismatches = 0
    for cfg in range(100):
        dim = 3 if cfg & 1 else 2
        periodic = not cfg & 2
        grid = not cfg & 4
        combos.add((dim, periodic, grid))
        n = rng.randrange(20, 501)
        size = tuple(rng.randrange(4, 13) for _ in range(dim))
        kind = ("grid" if grid else "continuous") + f"{dim}d"
        model = spatial_model(n=n, kind=kind, size=size, periodic=periodic, seed=cfg + 1)
        for agent in model.agents:
            if grid:
                agent.pos = Vect(*(rng.randint(1, s) for s in size))
            else:
                agent.pos = Vect(*(rng.uniform(0.0, s) for s in size))
        radius = rng.uniform(0.3, 0.6 * min(size))
        r = rng.randint(1, 3)
        for _ in range(3):
            probe = model.agents[rng.randrange(n)]
            got = [b.id for b in euclidean_neighbors(probe, model, radius)]
            checks += 1
            if got != _brute_euclidean(probe, model, radius, periodic, size):
                mismatches += 1
            if grid:
                got = [b.id for b in grid_neighbors(probe, model, r)]
                checks += 1
                if got != _brute_grid(probe, model, r, periodic, size):
                    mismatches += 1
    ok = mismatches == 0 and len(combos) == 8
    detail = (f"{checks} probes over 100 configs (2D/3D x periodic/bounded x "
              f"continuous/grid), {mismatches} mismatches")
    assert _verdict(3, "range and cell queries equal the brute-force O(N^2) oracle", ok, detail), detail


# -- 4: flocking orders over 20 seeds ----------------------------------------------


@pytest.mark.slow
def test_c04_flock_polarization_rises_with_bounded_motion():
    entry = get_entry("flocking")
    phis0, phis_end = [], []
    speed_max = 0.0
    in_bounds = True
    for seed in range(1, 21):
        model = entry.build_model(seed=seed)
        entry.init(model)
        run_model(model, 500, entry.step_rule)
        sx, sy = model.space.size
        agents = model.record_store.sections["agents"]
        n = len(agents)
        sum0 = [0.0, 0.0]
        sum1 = [0.0, 0.0]
        for table in agents.values():
            vels = table["vel"].values
            sum0[0] += vels[0].x
            sum0[1] += vels[0].y
            sum1[0] += vels[-1].x
            sum1[1] += vels[-1].y
            for v in vels:
                speed = veclength(v)
                if speed > speed_max:
                    speed_max = speed
            for p in table["pos"].values:
                if not (0.0 <= p.x < sx and 0.0 <= p.y < sy):
                    in_bounds = False
        phis0.append(math.hypot(*sum0) / n)
        phis_end.append(math.hypot(*sum1) / n)
    med0 = statistics.median(phis0)
    med_end = statistics.median(phis_end)
    ok = med_end > 0.7 and med_end > med0 and speed_max <= 1.0 + 1e-12 and in_bounds
    detail = (f"20 seeds x 500 steps: median phi(500)={med_end:.4f} (need >0.7) vs "
              f"phi(0)={med0:.4f}; max speed {speed_max:.9f}; in bounds: {in_bounds}")
    assert _verdict(4, "flock polarization and motion bounds", ok, detail), detail


# -- 5: two-boid closed form ---------------------------------------------------------


def test_c05_two_boid_step_matches_closed_form():
    scenarios = [
        ((4.0, 5.0), (0.6, 0.8), (4.8, 5.6), (0.0, 1.0)),    # plain cohesion/alignment
        ((4.0, 5.0), (0.6, 0.8), (4.12, 5.16), (-0.6, 0.8)),  # separation engaged
        ((0.2, 5.0), (0.6, 0.8), (9.9, 5.0), (0.0, 1.0)),     # neighbor across the seam
    ]
    prm = dict(flocking.PARAMS)
    worst = 0.0
    for p1, v1, p2, v2 in scenarios:
        model = flocking.build(seed=1, n_boids=2)
        _place_two_boids(model, p1, v1, p2, v2)
        run_model(model, 1, flocking.step_rule)
        q1, w1, t1 = _oracle_boid_update(p1, v1, [(p2, v2)], prm)
        q2, w2, t2 = _oracle_boid_update(p2, v2, [(q1, w1)], prm)
        for boid, (q, w, t) in zip(model.agents, ((q1, w1, t1), (q2, w2, t2))):
            worst = max(worst, abs(boid.pos.x - q[0]), abs(boid.pos.y - q[1]),
                        abs(boid.vel.x - w[0]), abs(boid.vel.y - w[1]))
            if t is not None:
                worst = max(worst, abs(boid.orientation - t))
    ok = worst <= 1e-12
    detail = f"3 scenarios, worst |delta| = {worst:.3e} (tolerance 1e-12)"
    assert _verdict(5, "two-boid step equals the longhand update", ok, detail), detail


# -- 6: schelling conservation and segregation --------------------------------------


def test_c06_schelling_conserves_agents_and_segregates():
    entry = get_entry("schelling3d")
    conserved = True
    befores, afters = [], []
    for seed in range(1, 11):
        model = entry.build_model(seed=seed)  # min_alike=8
        entry.init(model)
        befores.append(_mean_like_fraction(model))
        run_model(model, 200, entry.step_rule)
        afters.append(_mean_like_fraction(model))
        agents = model.record_store.sections["agents"]
        for t in range(201):
            happy = sad = 0
            for table in agents.values():
                mood = table["mood"].get(t)
                if mood == schelling.MOOD_HAPPY:
                    happy += 1
                elif mood == schelling.MOOD_SAD:
                    sad += 1
            if happy + sad != 200:
                conserved = False
    med_b = statistics.median(befores)
    med_a = statistics.median(afters)

    content = entry.build_model(seed=1, min_alike=0)
    entry.init(content)
    run_model(content, 1, entry.step_rule)
    all_happy = all(a.mood == schelling.MOOD_HAPPY for a in content.agents)

    ok = conserved and med_a > med_b and all_happy
    detail = (f"happy+sad == 200 on every tick (10 seeds x 201 ticks): {conserved}; "
              f"median like-neighbor fraction {med_b:.3f} -> {med_a:.3f}; "
              f"min_alike=0 all happy after one step: {all_happy}")
    assert _verdict(6, "schelling conservation and rising segregation", ok, detail), detail


# -- 7: ising local delta vs global energy recount ----------------------------------


def test_c07_local_energy_delta_matches_global_recount_exactly():
    proposals = mismatches = 0
    branches = [0, 0, 0]  # downhill, metropolis accept, metropolis reject
    final_equal = True
    for seed in (7, 11, 13):
        kw = dict(seed=seed, n=20, nns=3, flips_per_step=1000, temp=1.5)
        engine = ising.build(**kw)
        mirror = ising.build(**kw)
        for m in (engine, mirror):
            init_model(m, ising.initialiser, ising.PROPS_TO_RECORD)
        run_model(engine, 1, ising.step_rule)

        coupl = mirror.parameters.coupl
        temp = mirror.parameters.temp
        props = mirror.graph.nodesprops
        edges = mirror.graph.edges()

        def total_energy():
            return -coupl * sum(props[u].spin * props[v].spin for u, v in edges)

        for _ in range(1000):
            nd = random_node(mirror)
            spin = props[nd].spin
            de = 0.0
            for nbr in neighbor_nodes(nd, mirror):
                de += spin * props[nbr].spin
            de = 2 * coupl * de

            before = total_energy()
            props[nd].spin = -spin
            after = total_energy()
            props[nd].spin = spin
            proposals += 1
            if after - before != de:  # exact: both are coupl * small int
                mismatches += 1

            if de < 0:
                flip = True
                branches[0] += 1
            elif mirror.rng.random() < math.exp(-de / temp):
                flip = True
                branches[1] += 1
            else:
                flip = False
                branches[2] += 1
            if flip:
                props[nd].spin = -spin
                props[nd].color = "black" if spin == -1 else "white"
        final_equal = final_equal and _spin_state(engine) == _spin_state(mirror)
    ok = mismatches == 0 and final_equal and all(branches)
    detail = (f"{proposals} proposals on 3 20-node graphs, {mismatches} mismatches; "
              f"replayed states equal: {final_equal}; "
              f"branch counts {tuple(branches)}")
    assert _verdict(7, "flip delta equals the total-energy difference, exactly", ok, detail), detail


# -- 8: temperature sweep -------------------------------------------------------------


@pytest.mark.slow
def test_c08_temperature_sweep_orders_and_disorders():
    entry = get_entry("ising")
    bound = 3 / math.sqrt(500)
    cold, hot, tick0 = [], [], []
    for seed in range(1, 11):
        for temp, bucket in ((0.1, cold), (50.0, hot)):
            model = entry.build_model(seed=seed, temp=temp)  # n=500
            entry.init(model)
            run_model(model, 200, entry.step_rule)
            nodes = model.record_store.sections["nodes"]
            for t, out in ((0, tick0), (200, bucket)):
                spins = [table["spin"].get(t) for table in nodes.values()]
                out.append(abs(sum(spins)) / len(spins))
    med_cold = statistics.median(cold)
    med_hot = statistics.median(hot)
    t0_max = max(tick0)
    ok = med_cold > 0.8 and med_hot < 0.2 and t0_max <= bound
    detail = (f"10 seeds x 200 steps, n=500: cold(T=0.1) median |m|={med_cold:.3f} "
              f"(need >0.8), hot(T=50) median |m|={med_hot:.3f} (need <0.2), "
              f"tick-0 max |m|={t0_max:.3f} (bound {bound:.3f})")
    assert _verdict(8, "temperature sweep magnetisation", ok, detail), detail


# -- 9: knn graph construction --------------------------------------------------------


def test_c09_knn_graph_matches_brute_force():
    ok = True
    parts = []
    for n, k, seed in ((1000, 6, 3), (50, 4, 9)):
        model = create_model([], dynamic_simple_graph(0), seed=seed)
        knn_geometric_graph(model, n, k)
        g = model.graph
        pts = {i: (g.nodesprops[i].pos.x, g.nodesprops[i].pos.y) for i in g.nodes}
        want = set()
        for i, (xi, yi) in pts.items():
            nearest = sorted(
                ((xj - xi) ** 2 + (yj - yi) ** 2, j)
                for j, (xj, yj) in pts.items()
                if j != i
            )[: k - 1]
            for _, j in nearest:
                want.add(edge_key(i, j))
        same = set(g.edges()) == want
        symmetric = all(g.has_edge(v, u) for u, v in g.edges())

        u, v = g.edges()[0]
        g.edgesprops[u, v].weight = 7
        n_edges = g.n_edges
        create_edge(u, v, model)  # duplicate: must be a silent no-op
        noop = g.n_edges == n_edges and g.edgesprops[u, v].weight == 7

        ok = ok and same and symmetric and noop
        parts.append(f"n={n} k={k}: {len(want)} edges, match={same}, "
                     f"symmetric={symmetric}, duplicate no-op={noop}")
    detail = "; ".join(parts)
    assert _verdict(9, "geometric knn graph equals brute force", ok, detail), detail


# -- 10: query outputs vs raw-tape recounts ------------------------------------------


def test_c10_queries_match_recounts_and_files_round_trip(tmp_path):
    rng = random.Random(10)
    entry = get_entry("schelling3d")
    model = entry.build_model(seed=42)
    entry.init(model)
    run_model(model, 60, entry.step_rule)

    counts = get_nums_agents(
        model,
        lambda a: a.mood == schelling.MOOD_HAPPY,
        lambda a: a.mood == schelling.MOOD_SAD,
        labels=["happy", "sad"],
    )
    avg_x = get_agents_avg_props(model, lambda a: a.pos.x, labels=["x"])
    agents = model.record_store.sections["agents"]
    recounts_ok = True
    for t in sorted(rng.sample(range(61), 5)):
        happy = sum(1 for tab in agents.values() if tab["mood"].get(t) == schelling.MOOD_HAPPY)
        sad = sum(1 for tab in agents.values() if tab["mood"].get(t) == schelling.MOOD_SAD)
        mean_x = sum(tab["pos"].get(t).x for tab in agents.values()) / len(agents)
        if counts["happy"][t] != happy or counts["sad"][t] != sad or avg_x["x"][t] != mean_x:
            recounts_ok = False

    ientry = get_entry("ising")
    imodel = ientry.build_model(seed=4, n=60, nns=4)
    ientry.init(imodel)
    run_model(imodel, 40, ientry.step_rule)
    mag = get_nodes_avg_props(imodel, lambda nd: nd.spin, labels=["m"])
    nodes = imodel.record_store.sections["nodes"]
    for t in sorted(rng.sample(range(41), 5)):
        spins = [tab["spin"].get(t) for tab in nodes.values()]
        if mag["m"][t] != sum(spins) / len(spins):
            recounts_ok = False

    trips_ok = True
    frames = {"agent": get_agent_data(3, model), "counts": counts, "avg": avg_x, "mag": mag}
    for name, frame in frames.items():
        for fmt in ("csv", "json"):
            path = tmp_path / f"{name}.{fmt}"
            export_table(frame, fmt, path)
            if read_table(path) != frame:  # value- and type-exact equality
                trips_ok = False

    ok = recounts_ok and trips_ok
    detail = (f"counts/means equal raw-tape recounts at 5 random ticks x 2 models: "
              f"{recounts_ok}; 4 frames round trip CSV+JSON exactly: {trips_ok}")
    assert _verdict(10, "derived tables equal independent recounts and round trip", ok, detail), detail


# -- 11: steering service contract ----------------------------------------------------


def test_c11_steering_service_contract():
    expected_controls = {
        "flocking": [("min_dis", 0.01, 0.1, 1.0), ("coh_fac", 0.01, 0.01, 1.0),
                     ("sep_fac", 0.01, 0.01, 1.0), ("aln_fac", 0.01, 0.01, 1.0),
                     ("vis_range", 0.5, 0.5, 4.0)],
        "schelling3d": [("min_alike", 1, 1, 12)],
        "ising": [("temp", 0.05, 0.05, 5.0), ("coupl", 0.01, 0.1, 5.0), ("nns", 2, 1, 10)],
    }
    ok = True
    notes = []
    with TestClient(create_app()) as client:
        listing = client.get("/api/models").json()
        models = {m["name"]: m for m in listing["models"]}
        ok = ok and listing["v"] == 1 and set(models) == set(expected_controls)
        for name, specs in expected_controls.items():
            got = [(c["key"], *c["range"]) for c in models[name]["controls"]]
            if got != specs:
                ok = False
                notes.append(f"{name} sliders differ: {got}")

        for name, specs in expected_controls.items():
            r = client.post("/api/sessions", json={"model": name, "step_delay_ms": 0})
            ok = ok and r.status_code == 201
            sid = r.json()["id"]
            r = client.post(f"/api/sessions/{sid}/run", json={"frames": 50})
            ok = ok and r.status_code == 200
            info = {}
            deadline = time.time() + 120
            while time.time() < deadline:
                info = client.get(f"/api/sessions/{sid}").json()
                if info["status"] == "finished":
                    break
                time.sleep(0.05)
            ok = ok and info.get("status") == "finished" and info.get("tick") == 50

            ticks = []
            plots_by_tick = {}
            entities_ok = True
            with client.websocket_connect(f"/api/sessions/{sid}/stream") as ws:
                while len(ticks) < 51:
                    msg = ws.receive_json()
                    if msg.get("type") == "reset":
                        continue
                    ticks.append(msg["tick"])
                    plots_by_tick[msg["tick"]] = msg["plots"]
                    for ent in msg["entities"]:
                        if not {"id", "x", "y", "shape", "color", "orientation", "size"} <= set(ent):
                            entities_ok = False
            monotone = ticks == list(range(51))

            pd = client.get(f"/api/sessions/{sid}/plotdata").json()
            plots_equal = pd["ticks"] == list(range(51))
            for label, series in pd["series"].items():
                for t in range(51):
                    if plots_by_tick[t][label] != series[t]:
                        plots_equal = False

            key, lo, step, hi = specs[0]
            r = client.post(f"/api/sessions/{sid}/params", json={"params": {key: hi + 1}})
            rejects = r.status_code == 422

            ok = ok and monotone and plots_equal and entities_ok and rejects
            notes.append(
                f"{name}: stream 0..50 monotone={monotone}, plots==plotdata={plots_equal}, "
                f"entities complete={entities_ok}, out-of-range rejected={rejects}"
            )
    detail = "; ".join(notes)
    assert _verdict(11, "steering service end-to-end contract", ok, detail), detail


# -- 12: browser client ----------------------------------------------------------------


def test_c12_browser_client_deferred_to_frontend_suite():
    _emit("[C12] SKIP browser client -- built and tested in frontend/ (own vitest suite)")
    pytest.skip("the browser client ships in frontend/ with its own automated tests")

"""Schelling segregation on a bounded 3D grid.

200 agents in a (7,7,7) grid, colored red or green. An agent is happy when
at least min_alike of the agents on its 26 surrounding cells share its
color; unhappy agents jump to a uniformly random empty cell. Moves apply
immediately, so agents later in the pass see earlier moves.
"""

from __future__ import annotations

from ..core import NPERIODIC, STATIC, create_agents, create_model
from ..spaces import grid_neighbors, neighbors, random_empty_patch
from ..values import Vect

PARAMS = {
    "n_agents": 200,
    "size": (7, 7, 7),
    "min_alike": 8,
}

STRUCTURAL = frozenset()

CONTROLS = (("min_alike", 1, 1, 12),)

PROPS_TO_RECORD = None
DEFAULT_STEPS = 200
DEFAULT_FRAMES = 200

MOOD_HAPPY = "happy"
MOOD_SAD = "sad"
COLORS = ("red", "green")


def build(seed=42, n_agents=200, size=(7, 7, 7), min_alike=8):
    size = tuple(size)
    if isinstance(min_alike, bool) or not isinstance(min_alike, int) or not 0 <= min_alike <= 26:
        raise ValueError(f"min_alike must be an integer in 0..26, got {min_alike!r}")
    cells = size[0] * size[1] * size[2]
    if n_agents >= cells:
        raise ValueError(
            f"{n_agents} agents cannot leave empty cells in a {cells}-cell space"
        )
    agents = create_agents(
        n_agents,
        "grid3d",
        record_keys=("pos", "mood"),
        pos=Vect(1, 1, 1),
        color="red",
        mood=MOOD_HAPPY,
    )
    return create_model(
        agents,
        size,
        agents_type=STATIC,
        space_type=NPERIODIC,
        seed=seed,
        min_alike=min_alike,
    )


def initialiser(model):
    rng = model.rng
    for agent in model.agents:
        agent.color = COLORS[rng.randrange(2)]
        x, y, z = random_empty_patch(model)
        agent.pos = Vect(x, y, z)
    min_alike = model.parameters.min_alike
    for agent in model.agents:
        num_same = 0
        for nbr in grid_neighbors(agent, model, 1):
            if nbr.color == agent.color:
                num_same += 1
        if num_same < min_alike:
            agent.mood = MOOD_SAD


def step_rule(model):
    min_alike = model.parameters.min_alike
    for agent in model.agents:
        num_alike = 0
        for nbr in neighbors(agent, model, 1):
            if agent.color == nbr.color:
                num_alike += 1
        if num_alike >= min_alike:
            agent.mood = MOOD_HAPPY
        else:
            agent.mood = MOOD_SAD
            x, y, z = random_empty_patch(model)
            agent.pos = Vect(x, y, z)


def plots(model):
    return (
        ("happy", "agents-fraction", lambda a: a.mood == MOOD_HAPPY),
        ("sad", "agents-fraction", lambda a: a.mood == MOOD_SAD),
    )


def count_preds(model):
    return {
        "happy": lambda a: a.mood == MOOD_HAPPY,
        "sad": lambda a: a.mood == MOOD_SAD,
    }

"""Boids flocking in a periodic 2D continuous space.

200 arrow-shaped agents steer by three forces computed over neighbors
within a visual range: separation (repel below min_dis), cohesion (steer
toward the local center) and alignment (match the local mean velocity).
Velocities renormalize to (almost exactly) unit speed each step, so the
polarization veclength(mean vel) is a 0..1 order parameter that rises as
the flock aligns.
"""

from __future__ import annotations

import math

from ..core import PERIODIC, STATIC, create_agents, create_model
from ..spaces import euclidean_neighbors
from ..values import Vect, veclength

# velocity regularizer: vel/(speed+EP) keeps speeds <= 1 and never divides by 0
EP = 0.00001

PARAMS = {
    "n_boids": 200,
    "size": (10, 10),
    "min_dis": 0.3,
    "coh_fac": 0.05,
    "sep_fac": 0.5,
    "aln_fac": 0.35,
    "vis_range": 2.0,
    "dt": 0.1,
}

# all five slider parameters retune the running dynamics directly
STRUCTURAL = frozenset()

CONTROLS = (
    ("min_dis", 0.01, 0.1, 1.0),
    ("coh_fac", 0.01, 0.01, 1.0),
    ("sep_fac", 0.01, 0.01, 1.0),
    ("aln_fac", 0.01, 0.01, 1.0),
    ("vis_range", 0.5, 0.5, 4.0),
)

PROPS_TO_RECORD = None
DEFAULT_STEPS = 500
DEFAULT_FRAMES = 400


def build(seed=42, n_boids=200, size=(10, 10), min_dis=0.3, coh_fac=0.05,
          sep_fac=0.5, aln_fac=0.35, vis_range=2.0, dt=0.1):
    for name, value in (("min_dis", min_dis), ("coh_fac", coh_fac), ("sep_fac", sep_fac),
                        ("aln_fac", aln_fac), ("vis_range", vis_range), ("dt", dt)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value!r}")
    if vis_range < min_dis:
        raise ValueError(f"vis_range {vis_range} must be >= min_dis {min_dis}")
    boids = create_agents(
        n_boids,
        "continuous2d",
        record_keys=("pos", "vel", "orientation"),
        shape="arrow",
        pos=Vect(0.0, 0.0),
        vel=Vect(0.0, 0.0),
        orientation=0.0,
    )
    return create_model(
        boids,
        tuple(size),
        agents_type=STATIC,
        space_type=PERIODIC,
        seed=seed,
        min_dis=min_dis,
        coh_fac=coh_fac,
        sep_fac=sep_fac,
        aln_fac=aln_fac,
        vis_range=vis_range,
        dt=dt,
    )


def initialiser(model):
    xdim, ydim = model.size
    rng = model.rng
    for boid in model.agents:
        boid.pos = Vect(rng.random() * xdim, rng.random() * ydim)
        boid.orientation = rng.random() * 2 * math.pi
        boid.vel = Vect(-math.sin(boid.orientation), math.cos(boid.orientation))


def calculate_direction(v) -> float:
    """Heading angle of a velocity: theta with (-sin theta, cos theta) along v.

    Inverse of the initialiser's velocity construction; the zero vector maps
    to 0 by convention.
    """
    if v[0] == 0.0 and v[1] == 0.0:
        return 0.0
    return math.atan2(-v[0], v[1])


def step_rule(model):
    params = model.parameters
    dt = params.dt
    min_dis = params.min_dis
    aln_fac = params.aln_fac
    coh_fac = params.coh_fac
    sep_fac = params.sep_fac
    vis_range = params.vis_range
    zero = Vect(0.0, 0.0)
    for boid in model.agents:
        nbrs = euclidean_neighbors(boid, model, vis_range)
        coh_force = zero
        sep_force = zero
        aln_force = zero
        num = 0
        bpos = boid.pos
        for nbr in nbrs:
            num += 1
            vec = nbr.pos - bpos
            if veclength(vec) < min_dis:
                sep_force -= vec
            coh_force += vec
            aln_force += nbr.vel
        if num > 0:
            aln_force = (aln_force / num - boid.vel) * aln_fac
            coh_force *= coh_fac / num
            sep_force *= sep_fac
            boid.vel += (coh_force + sep_force) + aln_force
            boid.vel /= veclength(boid.vel) + EP
            boid.orientation = calculate_direction(boid.vel)
        # position advances every step, neighbors or not
        boid.pos += boid.vel * dt


def plots(model):
    half = model.size[0] / 2
    return (("boids to the left", "agents-fraction", lambda b: b.pos[0] < half),)


def count_preds(model):
    half = model.size[0] / 2
    return {"left": lambda b: b.pos[0] < half}

"""Small builders shared by the test modules."""

from abmkit.core import MORTAL, NPERIODIC, PERIODIC, STATIC, create_agents, create_model


def spatial_model(n=6, kind="continuous2d", size=(8, 6), periodic=True,
                  mortal=False, seed=1, defaults=None, record=(), **params):
    defaults = dict(defaults or {})
    if "pos" not in defaults:
        dim = 3 if kind.endswith("3d") else 2
        defaults["pos"] = (1,) * dim if kind.startswith("grid") else (0.0,) * dim
    agents = create_agents(n, kind, record_keys=record, **defaults)
    return create_model(
        agents,
        size,
        agents_type=MORTAL if mortal else STATIC,
        space_type=PERIODIC if periodic else NPERIODIC,
        seed=seed,
        **params,
    )

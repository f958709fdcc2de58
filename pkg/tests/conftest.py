import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from awarekit import Bounds, load_model, random_model
from awarekit.search import random_formula

REPO = Path(__file__).resolve().parent.parent
MUSEUM = REPO / "models" / "museum.model.json"
GOLDEN = Path(__file__).resolve().parent / "golden"
PROOFS = REPO / "proofs"


@pytest.fixture(scope="session")
def museum():
    model, world_names, agent_names = load_model(MUSEUM)
    return model, {n: i for i, n in enumerate(world_names)}, {n: i for i, n in enumerate(agent_names)}


def formulas(props=("p", "q"), max_depth=4):
    """Hypothesis strategy for random formulas over the given atoms."""
    return st.builds(
        lambda seed: random_formula(random.Random(seed), props, max_depth),
        st.integers(min_value=0, max_value=2**32),
    )


def small_models(max_worlds=3, max_agents=3, props=("p", "q")):
    """Hypothesis strategy for random valid models."""
    return st.builds(
        lambda seed: random_model(seed, Bounds(max_worlds, max_agents, props)),
        st.integers(min_value=0, max_value=2**32),
    )

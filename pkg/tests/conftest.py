import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _oracles import weakly_connected_digraph  # noqa: E402

CORPUS_SIZE = 200
CORPUS_SEED = 9172


def corpus_rng(i: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([CORPUS_SEED, i])))


@pytest.fixture(scope="session")
def corpus200():
    """The 200 seeded weakly connected digraphs shared by the oracle checks."""
    return [weakly_connected_digraph(corpus_rng(i), max_nodes=50)
            for i in range(CORPUS_SIZE)]


@pytest.fixture()
def rng():
    return np.random.default_rng(4242)

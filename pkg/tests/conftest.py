import pytest

from dvcm.evaluation import load_fixture
from dvcm.generator import GenParams, generate_corpus


@pytest.fixture(scope="session")
def f1():
    return load_fixture("f1")


@pytest.fixture(scope="session")
def medium_corpus():
    """A 300-shot seeded corpus shared by the engine and index tests."""
    return generate_corpus(GenParams(n_shots=300, n_dancers=6, n_step_defs=10, seed=5))

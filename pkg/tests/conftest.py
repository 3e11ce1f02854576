import numpy as np
import pytest

from src import corpus
from src.engine.hm_classes import Fig3Example, gen_fig3, gen_gx
from src.engine.lazy import LazyKripke
from src.models.gst import SymbolicGst
from src.models.kripke import KripkeStructure
from src.random_models import rng_for


@pytest.fixture
def g_unit() -> SymbolicGst:
    return corpus.gst("unit")


@pytest.fixture
def g_dense() -> SymbolicGst:
    return corpus.gst("denseattach")


@pytest.fixture
def m_structure() -> KripkeStructure:
    return corpus.kripke("m")


@pytest.fixture
def deadlock() -> KripkeStructure:
    return corpus.kripke("deadlock")


@pytest.fixture
def fig3() -> Fig3Example:
    return gen_fig3()


@pytest.fixture
def gx() -> LazyKripke:
    return gen_gx()


@pytest.fixture
def rng() -> np.random.Generator:
    return rng_for(20240531)


@pytest.fixture
def model_files(tmp_path):
    """Write every corpus model to ``<name>.kf`` and return the paths by name."""
    paths = {}
    for name, text in corpus.MODELS.items():
        path = tmp_path / f"{name}.kf"
        path.write_text(text, encoding="utf-8")
        paths[name] = str(path)
    return paths

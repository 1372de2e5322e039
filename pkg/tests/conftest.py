import os

import pytest

from ltpdr.kripke import KripkeStructure

MODELS_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "models")


def model_path(name: str) -> str:
    return os.path.join(MODELS_DIR, name)


@pytest.fixture
def k1() -> KripkeStructure:
    """Three states, transitions 0->1, 1->1, 2->2, initial {0}, safe {0,1}."""
    return KripkeStructure(3, frozenset({(0, 1), (1, 1), (2, 2)}),
                           initial=0b001, safe=0b011)

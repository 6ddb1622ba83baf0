"""
matchex/tests/conftest.py
─────────────────────────
Puts the repo root on sys.path so tests import `src.<module>` the way
app.py does, plus a few shared fixtures.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(ROOT))

import numpy as np
import pytest

from src.complex_engine import complex_from_faces
from src.graph_loader import complete_graph, face_from_indices, graph_from_edge_list


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def square():
    """The hollow square: 4-cycle 1-2-3-4 as a 1-dimensional complex on K_4's edges."""
    G = complete_graph(4)
    sides = [G.index(1, 2), G.index(2, 3), G.index(3, 4), G.index(1, 4)]
    faces = [0] + [1 << i for i in sides] + [
        face_from_indices(p) for p in zip(sides, sides[1:] + sides[:1])
    ]
    return complex_from_faces(G, faces, name="square")


@pytest.fixture
def path_graph():
    return graph_from_edge_list(4, [(1, 2), (2, 3), (3, 4)], name="P_4")


@pytest.fixture
def paw():
    """Triangle 1-2-3 with a pendant edge at 1: e1={1,2}, e2={1,3}, e3={1,4}, e4={2,3}."""
    return graph_from_edge_list(4, [(2, 1), (1, 3), (1, 4), (3, 2)], name="paw")

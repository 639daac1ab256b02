import os
import sys

import pytest

# Add repository root to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.geometry.tree_model import ProblemInstance


@pytest.fixture
def inst_q2_d4():
    return ProblemInstance(2, 4)


@pytest.fixture
def inst_q3_d4():
    return ProblemInstance(3, 4)

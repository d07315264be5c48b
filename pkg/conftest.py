import math
import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, ROOT)

from beamtrain.channel import ScenarioConfig  # noqa: E402
from beamtrain.codebook import center_directions  # noqa: E402


@pytest.fixture
def scenarios_dir():
    return os.path.join(ROOT, "scenarios")


@pytest.fixture
def reference_scenario():
    return ScenarioConfig()


@pytest.fixture
def oracle_scenario():
    """ Pure LoS, half-wavelength spacing: user azimuth arccos(alpha(j)) lands on grid direction j. """
    return ScenarioConfig(n_x=32, d_i_over_lambda=0.5, k_users=32,
                          kappa_ai_db=math.inf, kappa_iu_db=math.inf)


@pytest.fixture
def on_grid_azimuths(oracle_scenario):
    return np.arccos(center_directions(oracle_scenario.n_x))

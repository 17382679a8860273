import numpy as np
import pytest
from hypothesis import settings

from paretolevy import EmpiricalTailIntegral, ParetoLevyModel

# property tests must be as reproducible as the estimators they check
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


@pytest.fixture(scope="session")
def clayton_model():
    return ParetoLevyModel.clayton_stable(theta=0.5)


# four increments, normalizer 2: the smallest dataset on which every counting
# and inversion convention can be enumerated by hand
FOUR_C1 = np.array([0.5, 2.1, 0.0, 3.0])
FOUR_C2 = np.array([1.0, 0.2, 2.5, 3.5])
FOUR_KN = 2.0


@pytest.fixture(scope="session")
def four_increment_tail():
    X = np.column_stack([FOUR_C1, FOUR_C2])
    return EmpiricalTailIntegral(k_n=FOUR_KN).fit(X)

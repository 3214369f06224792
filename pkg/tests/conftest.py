import warnings

import pytest

from fracblock import weights


@pytest.fixture(autouse=True)
def _quiet_step_size():
    from fracblock.solver import StepSizeWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StepSizeWarning)
        yield


@pytest.fixture
def fresh_weight_cache():
    weights.clear_cache()
    yield
    weights.clear_cache()

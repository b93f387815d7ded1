import pytest

from ldnsim.topology import (DragonflyParams, SlimFlyParams, build_dragonfly,
                             build_slimfly)


@pytest.fixture(scope="session")
def df_paper():
    return build_dragonfly(DragonflyParams(4, 8, 4))


@pytest.fixture(scope="session")
def sf_paper():
    return build_slimfly(SlimFlyParams(9, 7))


@pytest.fixture(scope="session")
def df_tiny():
    return build_dragonfly(DragonflyParams(1, 3, 1))


@pytest.fixture(scope="session")
def df_small():
    return build_dragonfly(DragonflyParams(2, 4, 2))


@pytest.fixture(scope="session")
def sf_tiny():
    return build_slimfly(SlimFlyParams(5, 1))

import pytest

from dkequiv.builders import (
    build_cube,
    build_delta_bt,
    build_fi_sharp,
    build_pt,
)
from dkequiv.equivalence import build_kernel_module


@pytest.fixture(scope="session")
def pt():
    return build_pt()


@pytest.fixture(scope="session")
def delta3():
    return build_delta_bt(3)


@pytest.fixture(scope="session")
def delta4():
    return build_delta_bt(4)


@pytest.fixture(scope="session")
def delta5():
    return build_delta_bt(5)


@pytest.fixture(scope="session")
def fi2():
    return build_fi_sharp(2)


@pytest.fixture(scope="session")
def fi3():
    return build_fi_sharp(3)


@pytest.fixture(scope="session")
def fi4():
    return build_fi_sharp(4)


@pytest.fixture(scope="session")
def cube2():
    return build_cube(2)


@pytest.fixture(scope="session")
def cube3():
    return build_cube(3)


@pytest.fixture(scope="session")
def km_delta4(delta4):
    return build_kernel_module(delta4)


@pytest.fixture(scope="session")
def km_delta5(delta5):
    return build_kernel_module(delta5)


@pytest.fixture(scope="session")
def km_fi3(fi3):
    return build_kernel_module(fi3)


@pytest.fixture(scope="session")
def km_fi4(fi4):
    return build_kernel_module(fi4)


@pytest.fixture(scope="session")
def km_cube3(cube3):
    return build_kernel_module(cube3)


@pytest.fixture(scope="session")
def km_pt(pt):
    return build_kernel_module(pt)

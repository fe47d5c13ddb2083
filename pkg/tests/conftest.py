import pytest

from qcotangent.heisenberg import algebra, assemble_system


@pytest.fixture(scope="session")
def system():
    return assemble_system(2)


@pytest.fixture(scope="session")
def system0():
    return assemble_system(2, with_det=False)


@pytest.fixture(scope="session")
def alg():
    return algebra()


@pytest.fixture(scope="session")
def A(system):
    return system.alphabet

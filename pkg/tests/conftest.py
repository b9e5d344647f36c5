import pytest

from semexp import core


@pytest.fixture(scope="session")
def five():
    return core.five_element_example()


@pytest.fixture(scope="session")
def i2():
    return core.symmetric_inverse_monoid(2)


@pytest.fixture(scope="session")
def i3():
    return core.symmetric_inverse_monoid(3)


@pytest.fixture(scope="session")
def e_i2(i2):
    return core.restrict_to_idempotents(i2)


@pytest.fixture(scope="session")
def e_i3(i3):
    return core.restrict_to_idempotents(i3)


@pytest.fixture(scope="session")
def trivial():
    return core.cyclic_group(1)


@pytest.fixture(scope="session")
def z2():
    return core.cyclic_group(2)


@pytest.fixture(scope="session")
def z3():
    return core.cyclic_group(3)


@pytest.fixture(scope="session")
def z4():
    return core.cyclic_group(4)


@pytest.fixture(scope="session")
def klein():
    return core.klein_four_group()

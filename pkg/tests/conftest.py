import pytest

from hybrix.algebra import FiniteBAO, hybrid


@pytest.fixture
def two_element():
    """One atom, diamond the identity, the atom designated."""
    return hybrid(FiniteBAO.identity(1), [0])

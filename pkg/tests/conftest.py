import pytest
from hypothesis import settings

from moyallax.exactalg import TruncationContext
from moyallax.hierarchy import flow_rhs

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

MU4 = TruncationContext(max_mu=4)


@pytest.fixture(scope="session")
def mu4():
    return MU4


@pytest.fixture(scope="session")
def flows_mu4():
    """Flows 1..3 at mu cap 4, shared across modules."""
    return {d: flow_rhs(d, MU4) for d in (1, 2, 3)}

import numpy as np
import pytest

from walkport import measure
from walkport.protocols import PROTOCOL_IDS, Payload, get_protocol, random_payload


@pytest.fixture(scope="session")
def warm_tables():
    """Synthesize every protocol's correction table once for the session."""
    return {pid: measure.synthesized_table(get_protocol(pid)) for pid in PROTOCOL_IDS}


@pytest.fixture
def payload_1q():
    return random_payload(np.random.default_rng(42), 1)


@pytest.fixture
def payload_2q():
    return random_payload(np.random.default_rng(42), 2)


@pytest.fixture
def basis_payload_1q():
    return Payload(np.array([1.0, 0.0]), np.array([1.0, 0.0]))

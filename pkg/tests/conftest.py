import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import bnquery


@pytest.fixture(scope="session")
def asia_bn():
    return bnquery.load_network(Path(bnquery.asia_path()))


@pytest.fixture()
def asia_engine(asia_bn):
    return bnquery.QueryEngine(
        asia_bn, elimination_order=bnquery.ASIA_GOLDEN_ORDER
    )


@pytest.fixture(scope="session")
def asia_joint(asia_bn):
    return bnquery.enumerate_joint(asia_bn)

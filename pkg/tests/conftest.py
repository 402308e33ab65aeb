import json
import os

import pytest

from tablelogic.tables import load_table

HERE = os.path.dirname(__file__)
REPO = os.path.dirname(HERE)
DATA_DIR = os.path.join(REPO, "data")
EXEC_CFG = os.path.join(DATA_DIR, "exec.cfg")
FIXTURE = os.path.join(REPO, "src", "tablelogic", "fixtures", "opec_2012.json")


@pytest.fixture
def f1():
    with open(FIXTURE, encoding="utf-8") as f:
        return load_table(json.load(f))


@pytest.fixture(scope="session")
def corpus():
    """The released dataset, loaded once for the whole run."""
    if not os.path.isdir(DATA_DIR):
        pytest.skip("data/ corpus not present")
    from tablelogic.dataset import load_dataset
    result = load_dataset(DATA_DIR)
    assert not result.errors, result.errors[:5]
    return result.examples

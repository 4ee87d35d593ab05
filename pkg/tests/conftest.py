"""Shared fixtures.

The workspace and the default dataset are expensive enough to build once
per session; individual tests must treat them as read-only.
"""

import pytest

from luxharvest.defaults import (
    default_chain,
    default_converter,
    default_training_dataset,
    init_workdir,
)


@pytest.fixture(scope="session")
def workdir(tmp_path_factory):
    out = tmp_path_factory.mktemp("work")
    init_workdir(out)
    return out


@pytest.fixture(scope="session")
def base_ds():
    return default_training_dataset()


@pytest.fixture(scope="session")
def converter():
    return default_converter()


@pytest.fixture(scope="session")
def chain():
    return default_chain()

import pytest

from hierlint.fixtures import load_fixture


@pytest.fixture(scope="session")
def running():
    return load_fixture("running_example")


@pytest.fixture(scope="session")
def renv(running):
    return running.env


@pytest.fixture(scope="session")
def pkg_root():
    import pathlib

    return pathlib.Path(__file__).resolve().parent.parent

import time

import pytest

from sl2morph.pipeline import build_context

BUILD_TIMES = {}


def _timed_context(p, seed):
    start = time.time()
    ctx = build_context(p, seed)
    BUILD_TIMES[(p, seed)] = time.time() - start
    return ctx


@pytest.fixture(scope="session")
def ctx13():
    return _timed_context(13, 1)


@pytest.fixture(scope="session")
def ctx97():
    return _timed_context(97, 1)


@pytest.fixture(scope="session")
def ctx997():
    return _timed_context(997, 1)

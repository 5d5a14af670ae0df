import pytest

from pulsefid import aio, std
from tests.utils import TEST_BLOCK_SIZE


@pytest.fixture(autouse=True)
def _clean_environment(monkeypatch):
    monkeypatch.delenv("PULSEFID_WORKERS", raising=False)
    monkeypatch.delenv("PULSEFID_BLOCK_SIZE", raising=False)


@pytest.fixture()
def simulator():
    with std.Simulator(workers=1, block_size=TEST_BLOCK_SIZE) as sim:
        yield sim


@pytest.fixture(params=[1, 4, 8])
def worker_simulator(request):
    with std.Simulator(workers=request.param, block_size=TEST_BLOCK_SIZE) as sim:
        yield sim


@pytest.fixture()
async def aio_simulator():
    async with aio.Simulator(workers=1, block_size=TEST_BLOCK_SIZE) as sim:
        yield sim

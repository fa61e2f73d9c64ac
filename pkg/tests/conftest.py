import pytest

from modehunt import backend


@pytest.fixture(params=backend.available())
def any_backend(request):
    """Run the test once per compute backend, restoring the default after."""
    previous = backend.active.BACKEND_NAME
    backend.select(request.param)
    yield request.param
    backend.select(previous)

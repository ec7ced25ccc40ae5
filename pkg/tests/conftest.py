import pytest

from helpers import corpus_names


@pytest.fixture(params=corpus_names())
def corpus_name(request):
    return request.param

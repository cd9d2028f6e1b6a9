from __future__ import annotations

import pytest

from helpers import build_corpus, chain_chat_provider, make_gateway, make_scholar

from ideachain.config import PipelineConfig


@pytest.fixture
def config() -> PipelineConfig:
    return PipelineConfig(parallel_branches=False)


@pytest.fixture
def chain_provider():
    return chain_chat_provider()


@pytest.fixture
def gateway(chain_provider, config):
    return make_gateway(chain_provider, config)


@pytest.fixture
def scholar():
    client, _transport = make_scholar()
    return client


@pytest.fixture
def scholar_with_transport():
    return make_scholar()


@pytest.fixture
def corpus():
    return build_corpus()

from __future__ import annotations

import pytest

from lioneval import manifest, refdata


@pytest.fixture(scope="session")
def fullsize_config(tmp_path_factory):
    """Manifest fixture matching the published corpus statistics (all splits)."""
    out = tmp_path_factory.mktemp("fullsize-corpus")
    return refdata.write_corpus_fixture(out)


@pytest.fixture(scope="session")
def fullsize_corpus(fullsize_config):
    return manifest.load_corpus_config(fullsize_config)

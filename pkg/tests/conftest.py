from __future__ import annotations

import pytest

from oatlas import cli, resources
from oatlas.corpus import load_stopwords
from oatlas.labeling import default_labelers


@pytest.fixture(scope="session")
def stopwords():
    return load_stopwords(resources.stopwords_path())


@pytest.fixture(scope="session")
def shipped_labelers():
    return default_labelers(
        resources.lexicon_path(), resources.hashtags_path(), resources.emoticons_path()
    )


def run_pipeline(workdir, seed=42, stages=("ingest", "label", "geocode", "topics", "timeseries", "snapshot")):
    """Drive the CLI in-process through the full stage chain."""
    sample = str(resources.sample_corpus_path())
    for stage in stages:
        argv = [stage, "--workdir", str(workdir), "--seed", str(seed)]
        if stage == "ingest":
            argv += ["--input", sample]
        code = cli.main(argv)
        assert code == 0, f"stage {stage} exited {code}"
    return workdir


@pytest.fixture(scope="session")
def sample_workdir(tmp_path_factory):
    """One full pipeline run on the bundled sample, shared across tests."""
    workdir = tmp_path_factory.mktemp("pipeline")
    return run_pipeline(workdir)

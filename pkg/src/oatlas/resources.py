"""Paths to the data files shipped inside the package."""

from __future__ import annotations

from importlib.resources import files
from pathlib import Path


def data_path(name: str) -> Path:
    return Path(str(files("oatlas").joinpath("data", name)))


def stopwords_path() -> Path:
    return data_path("stopwords.txt")


def lexicon_path() -> Path:
    return data_path("sentiment_lexicon.tsv")


def hashtags_path() -> Path:
    return data_path("hashtags.tsv")


def emoticons_path() -> Path:
    return data_path("emoticons.tsv")


def gazetteer_path() -> Path:
    return data_path("gazetteer.tsv")


def sample_corpus_path() -> Path:
    return data_path("sample_corpus.jsonl")

import pathlib

import pytest

from vietphon.lexicon import load_lexicon

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def golden_rows():
    rows = []
    for line in (DATA_DIR / "golden_words.tsv").read_text("utf-8").splitlines():
        if line.startswith("#") or not line.strip():
            continue
        fields = [None if f == "-" else f for f in line.split("\t")]
        rows.append(fields)
    return rows

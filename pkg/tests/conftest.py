import pathlib
import sys

import pytest

TESTS_DIR = pathlib.Path(__file__).parent
sys.path.insert(0, str(TESTS_DIR))

DATA = TESTS_DIR / "data"


@pytest.fixture
def data_dir():
    return DATA


def load_doc(name):
    from qtp.inputfmt import parse_document
    text = (DATA / name).read_text()
    return text, parse_document(text)

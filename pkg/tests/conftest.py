import sys

import pytest

from mthresh.corpus import build_standin_corpus, standin_image
from mthresh.imagecore import to_grayscale


@pytest.fixture(scope="session")
def lena():
    img = standin_image("astronaut", (220, 220))
    return to_grayscale(img)


@pytest.fixture(scope="session")
def cameraman():
    return standin_image("camera", (256, 256))


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("corpus")
    build_standin_corpus(d)
    return d


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.summary_line(n))

import pytest

from topkdoc import Collection, TopKIndex

C0 = ["abab", "aba", "bba"]


@pytest.fixture(scope="session")
def c0():
    return Collection.from_bytes(C0, ranks=[1.0, 2.0, 3.0])


@pytest.fixture(scope="session")
def c0_index(c0):
    return TopKIndex.build(c0, measures=("tf", "mindist", "docrank"), pars=("tf", "doclen"))


@pytest.fixture
def c0_manifest(tmp_path):
    for i, text in enumerate(C0):
        (tmp_path / f"d{i}.txt").write_text(text)
    path = tmp_path / "manifest.txt"
    path.write_text("".join(f"d{i}.txt\t{i + 1}\n" for i in range(len(C0))))
    return path


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])

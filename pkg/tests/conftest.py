import pytest

from vfield import Catalog

_CRITERIA: dict[str, str] = {}


@pytest.fixture
def catalog(tmp_path):
    return Catalog.init(tmp_path / "cat")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.failed):
        _CRITERIA[label] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line(f"{_CRITERIA[label]}  {label}")


@pytest.fixture(scope="session")
def shared_field(tmp_path_factory):
    """A 30-file field reused by tests that only need valid ids.

    Wrap it in a fresh ``Catalog(root, field=...)`` to get an empty
    section namespace over the same files.
    """
    cat = Catalog.init(tmp_path_factory.mktemp("shared"))
    for i in range(1, 31):
        cat.add_file(f"shared file {i}".encode(), f"file{i}.txt")
    return cat.field

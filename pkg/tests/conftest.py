import pytest

# criterion id -> (description, list of outcomes)
_CRITERIA: dict[str, tuple[str, list[bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, description): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        cid, desc = marker.args
        entry = _CRITERIA.setdefault(cid, (desc, []))
        entry[1].append(report.outcome == "passed")


def _sort_key(cid: str):
    return (0, int(cid)) if cid.isdigit() else (1, cid)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_CRITERIA, key=_sort_key):
        desc, results = _CRITERIA[cid]
        status = "PASS" if results and all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {cid}: {status} ({sum(results)}/{len(results)} checks) {desc}")

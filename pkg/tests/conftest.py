from collections import defaultdict

import pytest

# criterion number -> title, outcomes, notes
_CRITERIA: dict[int, dict] = defaultdict(lambda: {"title": "", "outcomes": [], "notes": []})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion covered by this test")


@pytest.fixture
def note(request):
    """Attach a monitoring line to the acceptance criterion of the running test."""
    m = request.node.get_closest_marker("criterion")

    def add(text: str) -> None:
        if m is not None:
            _CRITERIA[m.args[0]]["notes"].append(text)

    return add


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None or rep.when != "call" and not rep.failed:
        return
    entry = _CRITERIA[m.args[0]]
    entry["title"] = m.args[1]
    entry["outcomes"].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance")
    for num in sorted(_CRITERIA):
        e = _CRITERIA[num]
        status = "PASS" if e["outcomes"] and all(e["outcomes"]) else "FAIL"
        tr.write_line(f"ACCEPTANCE {num:>2} {status}  {e['title']} ({len(e['outcomes'])} checks)")
        for n in e["notes"]:
            tr.write_line(f"    {n}")

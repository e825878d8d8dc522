import pytest

ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record sheet for one acceptance criterion; starts as a failure until the test fills it in."""
    num = request.node.get_closest_marker("criterion").args[0]
    rec = {"title": request.node.get_closest_marker("criterion").kwargs.get("title", ""), "checks": {},
           "detail": "did not complete"}
    request.config.stash.setdefault(ACCEPTANCE, {})[num] = rec
    yield rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        rec = results[num]
        ok = bool(rec["checks"]) and all(rec["checks"].values())
        failed = [k for k, v in rec["checks"].items() if not v]
        tail = rec["detail"] if ok or not failed else "failed: " + ", ".join(failed) + "; " + rec["detail"]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {num:>2} {rec['title']}: {tail}")

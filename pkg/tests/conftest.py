from __future__ import annotations

import pytest

from magwedge.fiber import FiberConfig, FiberKind, FiberModel, threshold


@pytest.fixture(scope="session")
def theta_neumann() -> float:
    return threshold(FiberModel(FiberKind.ROBIN, 0.0), FiberConfig()).theta


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("MAGWEDGE_CACHE_DIR", str(tmp_path / "cache"))


_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        status = "PASS" if rep.passed else ("SKIP" if rep.skipped else "FAIL")
        detail = ""
        if hasattr(item, "acceptance_detail"):
            detail = item.acceptance_detail
        _ACCEPTANCE[number] = (title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[number]
        line = f"[{status}] criterion {number:2d}: {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def note(request):
    """Attach a short measured value to the acceptance line of the running test."""

    def _note(msg: str) -> None:
        request.node.acceptance_detail = msg

    return _note

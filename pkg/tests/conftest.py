import contextlib

import pytest

_RESULTS = "acceptance_results"


@pytest.fixture
def criterion(request):
    """with criterion(n, title): ...  -- records and prints one PASS/FAIL line."""
    results = request.config.__dict__.setdefault(_RESULTS, {})

    @contextlib.contextmanager
    def run(number, title):
        line = f"criterion {number:2d}: {title}"
        try:
            yield
        except BaseException:
            results[number] = f"FAIL {line}"
            print(results[number])
            raise
        results[number] = f"PASS {line}"
        print(results[number])

    return run


def pytest_terminal_summary(terminalreporter, config):
    results = config.__dict__.get(_RESULTS)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])

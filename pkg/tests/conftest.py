import numpy as np
import pytest

import searelay as sr

# acceptance tests register one (number, label, passed, detail) row each;
# the terminal-summary hook prints them so every run shows the scoreboard
ACCEPTANCE_RESULTS: list[tuple[int, str, bool, str]] = []


def record_criterion(num: int, label: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE_RESULTS.append((num, label, bool(ok), detail))
    assert ok, f"criterion {num} ({label}) failed: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for num, label, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        line = f"criterion {num:2d} {status} - {label}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def blue_rate():
    return sr.shannon_rate_function(sr.preset("blue"))


@pytest.fixture(scope="session")
def green_rate():
    return sr.shannon_rate_function(sr.preset("green"))


@pytest.fixture(scope="session")
def red_rate():
    return sr.shannon_rate_function(sr.preset("red"))


@pytest.fixture(scope="session")
def blue_10_500(blue_rate):
    """The workhorse configuration: blue water, 10 relays over 500 m."""
    return sr.solve(blue_rate, 10, 500.0)


def qsup_of_rows(rate, D: np.ndarray, length: float) -> np.ndarray:
    """Vectorized qsup_of_placement over rows of distances (test oracle)."""
    D = np.asarray(D, dtype=float)
    X = np.cumsum(D, axis=1)
    Xprev = np.hstack([np.zeros((D.shape[0], 1)), X[:, :-1]])
    carried = length - 0.5 * (Xprev + X)
    R = np.asarray(rate(np.ascontiguousarray(D)), dtype=float)
    safe = np.where(carried > 0, carried, 1.0)
    limits = np.where(carried > 0, R / safe, np.inf)
    return limits.min(axis=1)

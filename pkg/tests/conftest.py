"""Wall-clock budget for the whole suite.

The acceptance gate requires the complete test run to finish inside 60
seconds; the bound is checked here so it covers every module, not just the
acceptance file.
"""

import time

SUITE_BUDGET_SECONDS = 60.0


def pytest_configure(config):
    config._suite_started = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config._suite_started
    session.config._suite_elapsed = elapsed
    if elapsed > SUITE_BUDGET_SECONDS and exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = getattr(config, "_suite_elapsed", None)
    if elapsed is None:
        return
    verdict = "within" if elapsed <= SUITE_BUDGET_SECONDS else "OVER"
    terminalreporter.write_line(
        f"suite wall clock: {elapsed:.1f}s ({verdict} the {SUITE_BUDGET_SECONDS:.0f}s budget)")

import sys
import time

_START = time.perf_counter()
WALL_LIMIT = 300.0


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = list(getattr(mod, "LINES", []))
    if not lines:
        return
    elapsed = time.perf_counter() - _START
    verdict = "PASS" if elapsed < WALL_LIMIT else "FAIL"
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
    terminalreporter.write_line(f"criterion 12 [{verdict}] full suite wall time < {WALL_LIMIT:.0f} s -- {elapsed:.1f} s")

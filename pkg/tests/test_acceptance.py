"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
The lines are also written to ``acceptance_report.txt`` next to this file.
"""
from pathlib import Path
import sys

import pytest

from tenttile.acceptance import CHECKS

REPORT = Path(__file__).with_name("acceptance_report.txt")
_lines: dict[int, str] = {}


def _record(result) -> None:
    _lines[result.number] = result.line()
    REPORT.write_text("\n".join(_lines[k] for k in sorted(_lines)) + "\n")


@pytest.mark.parametrize("key", list(CHECKS))
def test_criterion(key, capsys):
    result = CHECKS[key]()
    _record(result)
    with capsys.disabled():
        print("\n" + result.line())
        for it in result.items:
            mark = {True: "ok", False: "FAIL", None: "skip"}[it.passed]
            print(f"    [{mark}] {it.name}: {it.detail}")
    failing = [f"{it.name}: {it.detail}" for it in result.items if it.passed is False]
    assert result.passed, "\n".join(failing)


if __name__ == "__main__":
    ok = True
    for key, check in CHECKS.items():
        result = check()
        print(result.line(), flush=True)
        ok = ok and result.passed
    sys.exit(0 if ok else 1)

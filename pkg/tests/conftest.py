import re

import pytest

from deduction.games import make_game

_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def th8():
    return make_game("treasure_hunt", cells=8)


@pytest.fixture
def mm33():
    return make_game("mastermind", pegs=3, colors=3)


@pytest.fixture
def coin4():
    return make_game("fake_coin", coins=4)


@pytest.fixture
def verdict(request):
    """Record a pass/fail line for an acceptance criterion, then enforce it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(criterion: str, ok: bool, detail: str) -> bool:
        lines.append(f"{criterion} {'PASS' if ok else 'FAIL'}  {detail}")
        print(lines[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(re.match(r"A(\d+)", s).group(1))):
            terminalreporter.write_line(line)

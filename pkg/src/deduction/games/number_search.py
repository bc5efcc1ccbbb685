"""One-dimensional search games: Treasure Hunt and Low-Middle-High."""

from __future__ import annotations

from ..core import DeductionGame, Termination
from ..errors import InvalidAction, InvalidScale

AT_OR_BEFORE = "at_or_before"
AFTER = "after"

LOW = "low"
CORRECT = "correct"
HIGH = "high"


def treasure_hunt_oracle(secret: int, probe: int, cells: int | None = None) -> str:
    if cells is not None and not 0 <= probe < cells:
        raise InvalidAction(f"probe {probe} outside 0..{cells - 1}")
    return AT_OR_BEFORE if secret <= probe else AFTER


def low_middle_high_oracle(secret: int, guess: int, size: int | None = None) -> str:
    """``LOW`` when the guess is below the secret, ``HIGH`` above."""
    if size is not None and not 1 <= guess <= size:
        raise InvalidAction(f"guess {guess} outside 1..{size}")
    if guess < secret:
        return LOW
    if guess > secret:
        return HIGH
    return CORRECT


class TreasureHunt(DeductionGame):
    """Treasure in one of ``cells`` cells; a probe at q tells whether it lies at or before q.

    Ends once a single cell remains possible.
    """

    name = "treasure_hunt"
    termination = Termination.KNOWLEDGE

    def __init__(self, cells: int = 8):
        if cells < 1:
            raise InvalidScale(f"{self.name}: need at least one cell, got {cells}")
        self.cells = cells
        super().__init__(range(cells), range(cells))

    @property
    def scale(self):
        return {"cells": self.cells}

    def query(self, secret, action):
        return AT_OR_BEFORE if secret <= action else AFTER

    def validate_action(self, action):
        if not isinstance(action, int) or not 0 <= action < self.cells:
            raise InvalidAction(f"{self.name}: probe {action!r} outside 0..{self.cells - 1}")


class LowMiddleHigh(DeductionGame):
    """Guess a number in 1..size; the answer is low, correct or high."""

    name = "low_middle_high"
    termination = Termination.DECLARATION

    def __init__(self, size: int = 15):
        if size < 1:
            raise InvalidScale(f"{self.name}: size must be >= 1, got {size}")
        self.size = size
        numbers = range(1, size + 1)
        super().__init__(numbers, numbers)

    @property
    def scale(self):
        return {"size": self.size}

    def query(self, secret, action):
        if action < secret:
            return LOW
        if action > secret:
            return HIGH
        return CORRECT

    def validate_action(self, action):
        if not isinstance(action, int) or not 1 <= action <= self.size:
            raise InvalidAction(f"{self.name}: guess {action!r} outside 1..{self.size}")

    def is_match(self, action, observation):
        return observation == CORRECT

    def declared_secret(self, action):
        return action

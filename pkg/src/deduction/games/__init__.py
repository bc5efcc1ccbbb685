"""The eight bundled deduction games and a name-based factory."""

from __future__ import annotations

from functools import lru_cache
from typing import Any

from ..core import DeductionGame
from ..errors import InvalidScale
from .black_box import BlackBox, black_box_oracle
from .bulls_cows import BullsCows, bulls_cows_oracle
from .fake_coin import FakeCoin, fake_coin_oracle
from .mastermind import Mastermind, SimpleMastermind, mastermind_oracle, simple_mastermind_oracle
from .number_search import LowMiddleHigh, TreasureHunt, low_middle_high_oracle, treasure_hunt_oracle
from .wordle import Wordle, wordle_oracle

GAMES: dict[str, type[DeductionGame]] = {
    "mastermind": Mastermind,
    "simple_mastermind": SimpleMastermind,
    "fake_coin": FakeCoin,
    "treasure_hunt": TreasureHunt,
    "low_middle_high": LowMiddleHigh,
    "black_box": BlackBox,
    "wordle": Wordle,
    "bulls_cows": BullsCows,
}

# benchmark scales per game, smallest first
DESK_SCALES: dict[str, list[dict[str, Any]]] = {
    "mastermind": [{"pegs": 3, "colors": 3}, {"pegs": 4, "colors": 6}],
    "simple_mastermind": [{"pegs": 3, "colors": 3}],
    "fake_coin": [{"coins": n} for n in range(4, 10)],
    "treasure_hunt": [{"cells": 8}, {"cells": 16}, {"cells": 32}],
    "low_middle_high": [{"size": 15}, {"size": 127}],
    "black_box": [{"size": 4, "atoms": 2}],
    "wordle": [{"length": 3}],
    "bulls_cows": [{"digits": 3, "alphabet": 6}],
}

_INT_PARAMS = {"pegs", "colors", "coins", "cells", "size", "atoms", "length", "digits", "alphabet"}
_BOOL_PARAMS = {"consistent_only"}


def make_game(name: str, **scale) -> DeductionGame:
    """Build a game by registry name; unknown names and parameters raise InvalidScale."""
    try:
        cls = GAMES[name]
    except KeyError:
        raise InvalidScale(f"unknown game {name!r}; choose from {', '.join(GAMES)}") from None
    try:
        return cls(**scale)
    except TypeError as exc:
        raise InvalidScale(f"{name}: bad scale parameters {scale}: {exc}") from None


@lru_cache(maxsize=64)
def _cached(name: str, frozen: tuple) -> DeductionGame:
    return make_game(name, **dict(frozen))


def cached_game(name: str, scale: dict[str, Any]) -> DeductionGame:
    """Process-wide shared instance; games are immutable so sharing is safe."""
    return _cached(name, tuple(sorted(scale.items())))


def parse_scale(text: str | None) -> dict[str, Any]:
    """Parse ``"pegs=3,colors=3"`` into keyword arguments."""
    scale: dict[str, Any] = {}
    if not text:
        return scale
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep:
            raise InvalidScale(f"scale entry {part!r} is not key=value")
        value = value.strip()
        if key in _INT_PARAMS:
            try:
                scale[key] = int(value)
            except ValueError:
                raise InvalidScale(f"scale parameter {key} needs an integer, got {value!r}") from None
        elif key in _BOOL_PARAMS:
            scale[key] = value.lower() in ("1", "true", "yes")
        else:
            scale[key] = value
    return scale


__all__ = [
    "GAMES", "DESK_SCALES", "make_game", "cached_game", "parse_scale",
    "Mastermind", "SimpleMastermind", "FakeCoin", "TreasureHunt", "LowMiddleHigh",
    "BlackBox", "Wordle", "BullsCows",
    "mastermind_oracle", "simple_mastermind_oracle", "fake_coin_oracle", "treasure_hunt_oracle",
    "low_middle_high_oracle", "black_box_oracle", "wordle_oracle", "bulls_cows_oracle",
]

"""Mastermind and its black-pegs-only variant."""

from __future__ import annotations

from itertools import product

from ..core import DeductionGame, Termination
from ..errors import InvalidAction, InvalidScale


def mastermind_oracle(secret, guess) -> tuple[int, int]:
    """Return ``(black, white)`` pegs for ``guess`` against ``secret``.

    Black counts positional matches; white counts the remaining overlap of
    the two color multisets.
    """
    if len(secret) != len(guess):
        raise InvalidAction(f"guess {guess!r} does not match the code length {len(secret)}")
    return _feedback(tuple(secret), tuple(guess))


def simple_mastermind_oracle(secret, guess) -> int:
    """Black pegs only."""
    if len(secret) != len(guess):
        raise InvalidAction(f"guess {guess!r} does not match the code length {len(secret)}")
    return _blacks(secret, guess)


def _blacks(secret, guess) -> int:
    return sum(1 for s, g in zip(secret, guess) if s == g)


def _feedback(secret: tuple, guess: tuple) -> tuple[int, int]:
    black = _blacks(secret, guess)
    common = sum(min(secret.count(c), guess.count(c)) for c in set(guess))
    return black, common - black


class Mastermind(DeductionGame):
    """Code of ``pegs`` positions over ``colors`` colors; declare to win.

    With ``consistent_only`` the legal guesses are restricted to codes still
    in the information set; by default every code may be guessed.
    """

    name = "mastermind"
    termination = Termination.DECLARATION

    def __init__(self, pegs: int = 3, colors: int = 3, consistent_only: bool = False):
        if pegs < 1 or colors < 1:
            raise InvalidScale(f"{self.name}: pegs and colors must be >= 1, got {pegs}, {colors}")
        self.pegs = pegs
        self.colors = colors
        self.consistent_only = consistent_only
        self.static_actions = not consistent_only
        codes = tuple(product(range(colors), repeat=pegs))
        super().__init__(codes, codes)

    @property
    def scale(self):
        scale = {"pegs": self.pegs, "colors": self.colors}
        if self.consistent_only:
            scale["consistent_only"] = True
        return scale

    def legal_actions(self, info=None, step=0):
        if self.consistent_only and info is not None:
            return tuple(info)
        return self.all_actions

    def query(self, secret, action):
        return _feedback(secret, action)

    def validate_action(self, action):
        if not isinstance(action, tuple) or len(action) != self.pegs:
            raise InvalidAction(f"{self.name}: guess {action!r} must be a {self.pegs}-peg tuple")
        if any(not isinstance(c, int) or not 0 <= c < self.colors for c in action):
            raise InvalidAction(f"{self.name}: guess {action!r} uses a color outside 0..{self.colors - 1}")

    def is_match(self, action, observation):
        return observation == (self.pegs, 0)

    def declared_secret(self, action):
        return action

    def format_action(self, action):
        return "".join(_color_letter(c) for c in action)


class SimpleMastermind(Mastermind):
    name = "simple_mastermind"

    def query(self, secret, action):
        return _blacks(secret, action)

    def is_match(self, action, observation):
        return observation == self.pegs


def _color_letter(c: int) -> str:
    return chr(ord("A") + c) if c < 26 else f"[{c}]"

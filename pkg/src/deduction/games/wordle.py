"""Wordle over a fixed dictionary of equal-length words."""

from __future__ import annotations

from collections import Counter
from importlib import resources
from pathlib import Path

from ..core import DeductionGame, Termination
from ..errors import InvalidAction, InvalidScale

GREEN = "G"
YELLOW = "Y"
GRAY = "-"

BUNDLED_DICTIONARY = "words3.txt"


def wordle_oracle(secret: str, guess: str) -> str:
    """Marks for ``guess``, one character per letter: ``G``, ``Y`` or ``-``.

    Greens are assigned first; yellows then consume the secret's remaining
    letters left to right, so a repeated guess letter is only yellow as
    often as the secret still has it unmatched.
    """
    if len(secret) != len(guess):
        raise InvalidAction(f"guess {guess!r} has the wrong length for a {len(secret)}-letter word")
    marks = [GRAY] * len(guess)
    unused: Counter = Counter()
    for i, (s, g) in enumerate(zip(secret, guess)):
        if s == g:
            marks[i] = GREEN
        else:
            unused[s] += 1
    for i, g in enumerate(guess):
        if marks[i] == GRAY and unused[g] > 0:
            marks[i] = YELLOW
            unused[g] -= 1
    return "".join(marks)


def load_dictionary(path: str | Path | None = None) -> tuple[str, ...]:
    """Read one word per line; blank lines and surrounding whitespace are ignored."""
    if path is None:
        text = resources.files(__package__).joinpath("data", BUNDLED_DICTIONARY).read_text()
    else:
        text = Path(path).read_text()
    words = [w.strip().lower() for w in text.splitlines() if w.strip()]
    if not words:
        raise InvalidScale(f"dictionary {path or BUNDLED_DICTIONARY} is empty")
    lengths = {len(w) for w in words}
    if len(lengths) != 1:
        raise InvalidScale(f"dictionary words have mixed lengths {sorted(lengths)}")
    # keep first occurrence order, drop duplicates
    return tuple(dict.fromkeys(words))


class Wordle(DeductionGame):
    name = "wordle"
    termination = Termination.DECLARATION

    def __init__(self, dictionary: str | Path | None = None, words=None, length: int | None = None,
                 consistent_only: bool = False):
        if words is not None:
            words = tuple(dict.fromkeys(w.lower() for w in words))
            if not words or len({len(w) for w in words}) != 1:
                raise InvalidScale(f"{self.name}: words must share one length")
        else:
            words = load_dictionary(dictionary)
        self.dictionary = str(dictionary) if dictionary is not None else None
        if length is not None and length != len(words[0]):
            raise InvalidScale(f"{self.name}: requested length {length}, dictionary has {len(words[0])}")
        self.length = len(words[0])
        self.consistent_only = consistent_only
        self.static_actions = not consistent_only
        super().__init__(words, words)
        self._all_green = GREEN * self.length

    @property
    def scale(self):
        scale = {"length": self.length, "words": len(self.initial_candidates)}
        if self.dictionary is not None:
            scale["dictionary"] = Path(self.dictionary).name
        if self.consistent_only:
            scale["consistent_only"] = True
        return scale

    def legal_actions(self, info=None, step=0):
        if self.consistent_only and info is not None:
            return tuple(info)
        return self.all_actions

    def query(self, secret, action):
        return wordle_oracle(secret, action)

    def validate_action(self, action):
        if action not in self._action_set:
            raise InvalidAction(f"{self.name}: {action!r} is not in the dictionary")

    def is_match(self, action, observation):
        return observation == self._all_green

    def declared_secret(self, action):
        return action

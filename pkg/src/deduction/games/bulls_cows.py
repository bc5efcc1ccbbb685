"""Bulls and Cows: a distinct-digit code, scored by exact and misplaced matches."""

from __future__ import annotations

from itertools import permutations

from ..core import DeductionGame, Termination
from ..errors import InvalidAction, InvalidScale


def bulls_cows_oracle(secret, guess) -> tuple[int, int]:
    for code in (secret, guess):
        if len(set(code)) != len(code):
            raise InvalidAction(f"code {code!r} repeats a digit")
    if len(secret) != len(guess):
        raise InvalidAction(f"guess {guess!r} does not match the code length {len(secret)}")
    return _score(secret, guess)


def _score(secret, guess) -> tuple[int, int]:
    bulls = sum(1 for s, g in zip(secret, guess) if s == g)
    shared = len(set(secret) & set(guess))
    return bulls, shared - bulls


class BullsCows(DeductionGame):
    name = "bulls_cows"
    termination = Termination.DECLARATION

    def __init__(self, digits: int = 3, alphabet: int = 6):
        if digits < 1 or digits > alphabet:
            raise InvalidScale(
                f"{self.name}: digit count {digits} must be between 1 and the alphabet size {alphabet}"
            )
        self.digits = digits
        self.alphabet = alphabet
        codes = tuple(permutations(range(alphabet), digits))
        super().__init__(codes, codes)
        self._sets = {c: frozenset(c) for c in codes}

    @property
    def scale(self):
        return {"digits": self.digits, "alphabet": self.alphabet}

    def query(self, secret, action):
        bulls = sum(1 for s, g in zip(secret, action) if s == g)
        return bulls, len(self._sets[secret] & self._sets[action]) - bulls

    def validate_action(self, action):
        if not isinstance(action, tuple) or len(action) != self.digits:
            raise InvalidAction(f"{self.name}: guess {action!r} must be a {self.digits}-digit tuple")
        if len(set(action)) != len(action):
            raise InvalidAction(f"{self.name}: guess {action!r} repeats a digit")
        if any(not isinstance(d, int) or not 0 <= d < self.alphabet for d in action):
            raise InvalidAction(f"{self.name}: guess {action!r} uses a digit outside 0..{self.alphabet - 1}")

    def is_match(self, action, observation):
        return observation == (self.digits, 0)

    def declared_secret(self, action):
        return action

    def format_action(self, action):
        return "".join(map(str, action))

"""Counterfeit coin on a balance scale."""

from __future__ import annotations

from itertools import combinations

from ..core import DeductionGame, Termination
from ..errors import InvalidAction, InvalidScale

LIGHTER = "lighter"
HEAVIER = "heavier"

LEFT_HEAVY = "left_heavy"
RIGHT_HEAVY = "right_heavy"
BALANCED = "balanced"


def fake_coin_oracle(secret, action) -> str:
    """Tilt of the scale for ``action = (left_pan, right_pan)``.

    ``secret`` is ``(coin, direction)``. Pans must be disjoint and the same
    non-zero size.
    """
    left, right = action
    _check_pans(left, right)
    return _weigh(secret, left, right)


def _check_pans(left, right) -> None:
    if len(left) == 0 or len(left) != len(right):
        raise InvalidAction(f"pans must be non-empty and equal in size: {left!r} vs {right!r}")
    if set(left) & set(right):
        raise InvalidAction(f"pans overlap: {left!r} vs {right!r}")
    if len(set(left)) != len(left) or len(set(right)) != len(right):
        raise InvalidAction(f"a coin appears twice on one pan: {left!r} vs {right!r}")


def _weigh(secret, left, right) -> str:
    coin, direction = secret
    if coin in left:
        return LEFT_HEAVY if direction == HEAVIER else RIGHT_HEAVY
    if coin in right:
        return RIGHT_HEAVY if direction == HEAVIER else LEFT_HEAVY
    return BALANCED


def weighings(coins: int) -> tuple:
    """All disjoint equal-size pan pairs, mirrored duplicates dropped.

    Ordered by pan size, then left pan, then right pan (lexicographic); of
    each mirrored pair only the one with the smaller left pan is kept.
    """
    out = []
    for size in range(1, coins // 2 + 1):
        for left in combinations(range(coins), size):
            rest = [c for c in range(coins) if c not in left]
            for right in combinations(rest, size):
                if left < right:
                    out.append((left, right))
    return tuple(out)


class FakeCoin(DeductionGame):
    """One of ``coins`` coins is lighter or heavier; find which and how."""

    name = "fake_coin"
    termination = Termination.KNOWLEDGE

    def __init__(self, coins: int = 4):
        if coins < 2:
            raise InvalidScale(f"{self.name}: need at least 2 coins, got {coins}")
        self.coins = coins
        self.table_axes = (("coin", tuple(range(coins))), ("direction", (LIGHTER, HEAVIER)))
        secrets = tuple((k, d) for k in range(coins) for d in (LIGHTER, HEAVIER))
        super().__init__(secrets, weighings(coins))
        # pans as frozensets for the hot path
        self._pans = {a: (frozenset(a[0]), frozenset(a[1])) for a in self.all_actions}

    @property
    def scale(self):
        return {"coins": self.coins}

    def query(self, secret, action):
        pans = self._pans.get(action)
        if pans is None:
            return _weigh(secret, action[0], action[1])
        return _weigh(secret, pans[0], pans[1])

    def validate_action(self, action):
        try:
            left, right = action
        except (TypeError, ValueError):
            raise InvalidAction(f"{self.name}: {action!r} is not a (left, right) pan pair") from None
        _check_pans(left, right)
        if any(not 0 <= c < self.coins for c in (*left, *right)):
            raise InvalidAction(f"{self.name}: {action!r} names a coin outside 0..{self.coins - 1}")

    def format_action(self, action):
        left, right = action
        return "{" + " ".join(map(str, left)) + "} v {" + " ".join(map(str, right)) + "}"

"""Black Box: locate hidden atoms by firing rays into a square grid.

Ray physics follow the classic board game:

* an atom directly ahead of the ray absorbs it (a *hit*);
* an atom on one forward diagonal turns the ray 90 degrees away from it;
* atoms on both forward diagonals send the ray back the way it came;
* an atom diagonally adjacent to the entry cell reflects the ray before it
  enters the grid, and a ray that leaves through its own entry port also
  counts as a reflection.

Ports are numbered clockwise from the top-left corner: top edge columns
``0..G-1``, right edge rows ``G..2G-1``, bottom edge columns ``2G..3G-1``
and left edge rows ``3G..4G-1``.
"""

from __future__ import annotations

from itertools import combinations

from ..core import DeductionGame, Termination
from ..errors import InvalidAction, InvalidScale

ABSORBED = "absorbed"
REFLECTED = "reflected"
EXIT = "exit"

_SIDES = "TRBL"


def port_entry(port: int, size: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Position just outside the grid and the inward direction for ``port``."""
    if not 0 <= port < 4 * size:
        raise InvalidAction(f"port {port} outside 0..{4 * size - 1}")
    side, k = divmod(port, size)
    if side == 0:
        return (-1, k), (1, 0)
    if side == 1:
        return (k, size), (0, -1)
    if side == 2:
        return (size, k), (-1, 0)
    return (k, -1), (0, 1)


def port_at(pos: tuple[int, int], size: int) -> int:
    r, c = pos
    if r == -1:
        return c
    if c == size:
        return size + r
    if r == size:
        return 2 * size + c
    if c == -1:
        return 3 * size + r
    raise ValueError(f"{pos} is not just outside a {size}x{size} grid")


def trace_ray(atoms, port: int, size: int):
    """Fire a ray from ``port``; return the observation and the cells visited."""
    atoms = frozenset(atoms)
    (r, c), (dr, dc) = port_entry(port, size)
    path: list[tuple[int, int]] = []
    outside = True
    # a ray visits each (cell, direction) at most once
    for _ in range(8 * size * size + 8):
        ar, ac = r + dr, c + dc
        if (ar, ac) in atoms:
            return ABSORBED, path
        # perpendicular offsets give the two forward diagonals
        left = (ar - dc, ac + dr) in atoms
        right = (ar + dc, ac - dr) in atoms
        if left or right:
            if outside:
                return REFLECTED, path
            if left and right:
                dr, dc = -dr, -dc
            elif left:
                dr, dc = dc, -dr
            else:
                dr, dc = -dc, dr
            continue
        r, c = ar, ac
        if not (0 <= r < size and 0 <= c < size):
            exit_port = port_at((r, c), size)
            if exit_port == port:
                return REFLECTED, path
            return (EXIT, exit_port), path
        outside = False
        path.append((r, c))
    raise RuntimeError(f"ray from port {port} did not terminate")  # pragma: no cover


def black_box_oracle(atoms, port: int, size: int):
    return trace_ray(atoms, port, size)[0]


class BlackBox(DeductionGame):
    """``atoms`` atoms hidden on a ``size`` x ``size`` grid; rays are the queries.

    Ends once the atom placement is pinned down. All ray outcomes are
    precomputed at construction, so queries are table lookups.
    """

    name = "black_box"
    termination = Termination.KNOWLEDGE

    def __init__(self, size: int = 4, atoms: int = 2):
        if size < 1:
            raise InvalidScale(f"{self.name}: grid size must be >= 1, got {size}")
        if not 1 <= atoms <= size * size:
            raise InvalidScale(f"{self.name}: atom count {atoms} outside 1..{size * size}")
        self.size = size
        self.atoms = atoms
        cells = [(r, c) for r in range(size) for c in range(size)]
        placements = tuple(combinations(cells, atoms))
        super().__init__(placements, range(4 * size))
        self._table = {
            (p, port): trace_ray(p, port, size)[0] for p in placements for port in self.all_actions
        }

    @property
    def scale(self):
        return {"size": self.size, "atoms": self.atoms}

    def query(self, secret, action):
        return self._table[(secret, action)]

    def validate_action(self, action):
        if not isinstance(action, int) or not 0 <= action < 4 * self.size:
            raise InvalidAction(f"{self.name}: port {action!r} outside 0..{4 * self.size - 1}")

    def format_action(self, action):
        side, k = divmod(action, self.size)
        return f"{_SIDES[side]}{k}"

    def format_observation(self, observation):
        if isinstance(observation, tuple):
            return "exit:" + self.format_action(observation[1])
        return observation

"""Deduction-game model, information sets, entropy and the episode loop.

A single-player deduction game hides a secret drawn from a finite universe.
The player repeatedly picks a query, a truthful deterministic oracle answers,
and every candidate secret contradicted by the answer is excluded. The
uncertainty left in the information set is measured in bits.

Two information-set representations are supported:

* :class:`EnumeratedInfoSet` - an explicit candidate list with uniform
  belief, entropy ``log2(n)``.
* :class:`TabularInfoSet` - a probability table over the product of named
  finite axes (e.g. coin index x weight direction), entropy by Shannon's
  formula.
"""

from __future__ import annotations

import math
import random
import time
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Hashable, Iterable, Protocol, Sequence

import numpy as np

from .errors import InconsistentInformationSet, InvalidAction, InvalidDistribution

ENTROPY_TOL = 1e-9
MASS_TOL = 1e-9

Secret = Hashable
Action = Hashable
Observation = Hashable


class Termination(Enum):
    KNOWLEDGE = "knowledge"
    DECLARATION = "declaration"


# --------------------------------------------------------------------------
# Information sets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EnumeratedInfoSet:
    """Explicit, canonically ordered collection of candidate secrets."""

    candidates: tuple

    def __post_init__(self):
        if not isinstance(self.candidates, tuple):
            object.__setattr__(self, "candidates", tuple(self.candidates))

    def __len__(self) -> int:
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __contains__(self, secret) -> bool:
        return secret in self.candidates


@dataclass(frozen=True, eq=False)
class TabularInfoSet:
    """Probability table over the cartesian product of named finite axes.

    A cell's secret token is the tuple of its axis values, so the canonical
    cell order (row-major over ``axes``) lines up with the game's candidate
    order when the game enumerates secrets the same way.
    """

    axes: tuple[tuple[str, tuple], ...]
    mass: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float)
        shape = tuple(len(domain) for _, domain in self.axes)
        if mass.shape != shape:
            raise InvalidDistribution(f"mass shape {mass.shape} does not match axes {shape}")
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @classmethod
    def uniform(cls, axes) -> "TabularInfoSet":
        axes = tuple((name, tuple(domain)) for name, domain in axes)
        shape = tuple(len(domain) for _, domain in axes)
        size = int(np.prod(shape))
        return cls(axes, np.full(shape, 1.0 / size))

    @classmethod
    def from_support(cls, axes, secrets: Iterable[tuple]) -> "TabularInfoSet":
        """Uniform table over the given cells, zero elsewhere."""
        axes = tuple((name, tuple(domain)) for name, domain in axes)
        lookups = [{v: i for i, v in enumerate(domain)} for _, domain in axes]
        mass = np.zeros(tuple(len(d) for _, d in axes))
        secrets = list(secrets)
        if not secrets:
            raise InconsistentInformationSet("cannot build a table with empty support")
        for secret in secrets:
            mass[tuple(lk[v] for lk, v in zip(lookups, secret))] = 1.0
        return cls(axes, mass / mass.sum())

    def secret_at(self, index: tuple[int, ...]) -> tuple:
        return tuple(domain[i] for (_, domain), i in zip(self.axes, index))

    def cells(self):
        """Yield ``(index, secret, mass)`` for every cell in canonical order."""
        for index in np.ndindex(self.mass.shape):
            yield index, self.secret_at(index), float(self.mass[index])

    def support(self) -> EnumeratedInfoSet:
        return EnumeratedInfoSet(tuple(s for _, s, p in self.cells() if p > 0.0))


InformationSet = EnumeratedInfoSet | TabularInfoSet


# --------------------------------------------------------------------------
# Game definition
# --------------------------------------------------------------------------


class DeductionGame(ABC):
    """A secret universe, an action space and a deterministic oracle.

    Subclasses implement :meth:`query` (the unchecked oracle used in hot
    loops) and :meth:`validate_action`; :meth:`oracle` is the checked entry
    point. Declaration games also override :meth:`is_match` and
    :meth:`declared_secret`.
    """

    name: str = "game"
    termination: Termination = Termination.KNOWLEDGE
    entropy_target: float = 0.0
    # set when the action space never depends on the information set
    static_actions: bool = True
    # (name, domain) pairs when the secret factors into a table
    table_axes: tuple[tuple[str, tuple], ...] | None = None

    def __init__(self, candidates: Sequence[Secret], actions: Sequence[Action]):
        candidates = tuple(candidates)
        if not candidates:
            raise InconsistentInformationSet(f"{self.name}: empty secret universe")
        if len(set(candidates)) != len(candidates):
            raise ValueError(f"{self.name}: duplicate secrets in the universe")
        self._candidates = candidates
        self._candidate_set = frozenset(candidates)
        self._actions = tuple(actions)
        self._action_set = frozenset(self._actions)

    # -- identity -----------------------------------------------------------

    @property
    @abstractmethod
    def scale(self) -> dict[str, Any]:
        """Scale parameters, in a stable key order."""

    @property
    def scale_label(self) -> str:
        return ",".join(f"{k}={v}" for k, v in self.scale.items() if v is not None)

    @property
    def game_id(self) -> str:
        return f"{self.name}[{self.scale_label}]"

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.game_id}>"

    # -- universe and actions -------------------------------------------------

    @property
    def initial_candidates(self) -> tuple:
        return self._candidates

    @property
    def all_actions(self) -> tuple:
        return self._actions

    def initial_info_set(self) -> EnumeratedInfoSet:
        return EnumeratedInfoSet(self._candidates)

    def initial_table(self) -> TabularInfoSet:
        if self.table_axes is None:
            raise TypeError(f"{self.name} has no tabular representation")
        return TabularInfoSet.from_support(self.table_axes, self._candidates)

    def legal_actions(self, info: InformationSet | None = None, step: int = 0) -> tuple:
        return self._actions

    def is_secret(self, secret) -> bool:
        return secret in self._candidate_set

    def validate_action(self, action) -> None:
        if action not in self._action_set:
            raise InvalidAction(f"{self.name}: {action!r} is not a legal action")

    # -- oracle -----------------------------------------------------------------

    @abstractmethod
    def query(self, secret, action) -> Observation:
        """Oracle answer without argument validation."""

    def oracle(self, secret, action) -> Observation:
        self.validate_action(action)
        return self.query(secret, action)

    def is_match(self, action, observation) -> bool:
        """True when ``action`` was a declaration that hit the secret."""
        return False

    def declared_secret(self, action):
        """The secret an action names when played as a declaration, else None."""
        return None

    # -- encodings ------------------------------------------------------------

    def format_action(self, action) -> str:
        return str(action)

    def format_observation(self, observation) -> str:
        return str(observation)

    def default_step_cap(self, multiplier: float = 10.0) -> int:
        n = len(self._candidates)
        return max(1, math.ceil(multiplier * math.log2(n))) if n > 1 else 1


# --------------------------------------------------------------------------
# Entropy and updates
# --------------------------------------------------------------------------


def entropy_enumerated(info: EnumeratedInfoSet) -> float:
    n = len(info.candidates)
    if n == 0:
        raise InconsistentInformationSet("inconsistent information set: no candidates left")
    return math.log2(n)


def _check_distribution(mass: np.ndarray) -> None:
    if np.any(mass < 0):
        raise InvalidDistribution("negative probability mass")
    total = float(mass.sum())
    if abs(total - 1.0) > MASS_TOL:
        raise InvalidDistribution(f"masses sum to {total!r}, not 1")


def entropy_tabular(table: TabularInfoSet) -> float:
    mass = table.mass
    _check_distribution(mass)
    p = mass[mass > 0]
    h = float(-(p * np.log2(p)).sum())
    return max(h, 0.0)


def entropy(info: InformationSet) -> float:
    if isinstance(info, TabularInfoSet):
        return entropy_tabular(info)
    return entropy_enumerated(info)


def update_enumerated(info: EnumeratedInfoSet, action, observation, game: DeductionGame) -> EnumeratedInfoSet:
    query = game.query
    kept = tuple(c for c in info.candidates if query(c, action) == observation)
    if not kept:
        raise InconsistentInformationSet(
            f"observation {observation!r} for {action!r} excludes every candidate"
        )
    return EnumeratedInfoSet(kept)


def update_tabular(table: TabularInfoSet, action, observation, game: DeductionGame) -> TabularInfoSet:
    _check_distribution(table.mass)
    mass = np.array(table.mass)
    for index, secret, p in table.cells():
        if p > 0.0 and game.query(secret, action) != observation:
            mass[index] = 0.0
    total = mass.sum()
    if total <= 0.0:
        raise InconsistentInformationSet(
            f"observation {observation!r} for {action!r} eliminates all probability mass"
        )
    return TabularInfoSet(table.axes, mass / total)


def update(info: InformationSet, action, observation, game: DeductionGame) -> InformationSet:
    if isinstance(info, TabularInfoSet):
        return update_tabular(info, action, observation, game)
    return update_enumerated(info, action, observation, game)


def observation_counts(candidates: Sequence, action, game: DeductionGame) -> Counter:
    query = game.query
    return Counter(query(c, action) for c in candidates)


def observation_classes(candidates: Sequence, action, game: DeductionGame) -> dict:
    """Partition ``candidates`` by the observation each would produce."""
    classes: dict = {}
    query = game.query
    for c in candidates:
        classes.setdefault(query(c, action), []).append(c)
    return classes


def expected_posterior_entropy(info: EnumeratedInfoSet, action, game: DeductionGame) -> float:
    """Average entropy after ``action`` when the secret is uniform over ``info``.

    Computed as ``sum_o (n_o / n) * log2(n_o)`` over observation classes.
    """
    n = len(info.candidates)
    if n == 0:
        raise InconsistentInformationSet("inconsistent information set: no candidates left")
    counts = observation_counts(info.candidates, action, game)
    return sum(k * math.log2(k) for k in counts.values()) / n


def is_terminal(info: InformationSet, game: DeductionGame, last_action=None, last_obs=None) -> bool:
    if game.termination is Termination.DECLARATION:
        return last_action is not None and game.is_match(last_action, last_obs)
    return entropy(info) <= game.entropy_target + ENTROPY_TOL


# --------------------------------------------------------------------------
# Episodes
# --------------------------------------------------------------------------


class AgentPolicy(Protocol):
    """Anything that picks an action from an information set."""

    name: str

    def select(self, info: EnumeratedInfoSet, actions: Sequence, game: DeductionGame,
               rng: random.Random):
        ...


@dataclass(frozen=True)
class TraceStep:
    step: int
    action: Any
    observation: Any
    entropy: float


@dataclass(frozen=True)
class EpisodeRecord:
    game: str
    scale: str
    agent: str
    seed: int
    secret: Any
    steps: int
    solved: bool
    reward: float
    initial_entropy: float
    trace: tuple[TraceStep, ...] = ()
    wall_times_ms: tuple[float, ...] = field(default=(), compare=False)
    decisions: tuple[dict, ...] = field(default=(), compare=False)

    @property
    def game_id(self) -> str:
        return f"{self.game}[{self.scale}]"

    @property
    def entropies(self) -> tuple[float, ...]:
        """Initial entropy followed by the post-update entropy of each step."""
        return (self.initial_entropy,) + tuple(t.entropy for t in self.trace)


def play_episode(
    game: DeductionGame,
    agent: AgentPolicy,
    secret,
    seed: int,
    step_cap: int | None = None,
    representation: str = "enumerated",
    log_decisions: bool = False,
) -> EpisodeRecord:
    """Drive ``agent`` through one game against ``secret``.

    The agent's randomness comes from a ``random.Random(seed)`` stream, so
    the record is reproducible from its inputs (apart from wall times and
    any agent that stops on a wall-clock deadline).
    """
    if not game.is_secret(secret):
        raise ValueError(f"{secret!r} is not in the {game.name} secret universe")
    if step_cap is None:
        step_cap = game.default_step_cap()
    if representation == "tabular":
        info: InformationSet = game.initial_table()
    elif representation == "enumerated":
        info = game.initial_info_set()
    else:
        raise ValueError(f"unknown representation {representation!r}")

    rng = random.Random(seed)
    initial_h = entropy(info)
    trace: list[TraceStep] = []
    wall: list[float] = []
    decisions: list[dict] = []
    action = obs = None
    solved = is_terminal(info, game)
    step = 0
    while not solved and step < step_cap:
        candidates = info.support() if isinstance(info, TabularInfoSet) else info
        actions = game.legal_actions(candidates, step)
        t0 = time.perf_counter()
        action = agent.select(candidates, actions, game, rng)
        elapsed = (time.perf_counter() - t0) * 1000.0
        game.validate_action(action)
        obs = game.query(secret, action)
        info = update(info, action, obs, game)
        step += 1
        h = entropy(info)
        trace.append(TraceStep(step, action, obs, h))
        wall.append(elapsed)
        if log_decisions:
            entry = {"agent": agent.name, "step": step, "wall_ms": elapsed}
            entry.update(getattr(agent, "last_decision", None) or {})
            decisions.append(entry)
        solved = is_terminal(info, game, action, obs)

    reward = 1.0 / max(step, 1) if solved else 0.0
    return EpisodeRecord(
        game=game.name,
        scale=game.scale_label,
        agent=agent.name,
        seed=seed,
        secret=secret,
        steps=step,
        solved=solved,
        reward=reward,
        initial_entropy=initial_h,
        trace=tuple(trace),
        wall_times_ms=tuple(wall),
        decisions=tuple(decisions),
    )

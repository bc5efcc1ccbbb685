"""Decision policies over information sets.

* :class:`RandomAgent` - uniform over legal actions.
* :class:`FullISESAgent` - exhaustive Information Set Entropy Search: pick
  the action with the lowest expected posterior entropy.
* :class:`SampledISESAgent` - the same search over a random subsample of
  states and actions, optionally stopped by a wall-clock deadline.
* :class:`ISMCTSAgent` - single-observer information-set MCTS with UCB1.

Ties between equally scored actions go to the canonically first action. In
declaration games an action that could itself be the secret is preferred
among tied actions, otherwise a solved-but-undeclared game could stall on
an uninformative query that happens to come first.
"""

from __future__ import annotations

import logging
import math
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Sequence

from .core import ENTROPY_TOL, DeductionGame, EnumeratedInfoSet, Termination, expected_posterior_entropy

log = logging.getLogger(__name__)

ALL = "all"


def _check_size(value, label: str) -> None:
    if value == ALL:
        return
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValueError(f"sample size {label} must be a positive integer or {ALL!r}, got {value!r}")


@dataclass(frozen=True)
class SamplerConfig:
    """Sample sizes and budget for sampled ISES.

    ``m`` states and ``n`` actions are drawn without replacement; ``"all"``
    keeps the whole collection in canonical order. ``deadline_ms`` stops the
    action loop once it expires, but only between actions and never before
    the first one has been scored (a deadline of exactly 0 skips evaluation
    and falls back to a random action).
    """

    m: int | str = ALL
    n: int | str = ALL
    deadline_ms: float | None = None
    seed: int = 0

    def __post_init__(self):
        _check_size(self.m, "m")
        _check_size(self.n, "n")
        if self.deadline_ms is not None and self.deadline_ms < 0:
            raise ValueError(f"deadline must be >= 0 ms, got {self.deadline_ms}")


@dataclass(frozen=True)
class MctsConfig:
    """ISMCTS parameters.

    ``rollout_cap`` defaults to ``ceil(4 * log2 |universe|)`` simulated
    steps. ``max_iterations`` gives a deterministic budget; when both it and
    ``deadline_ms`` are set, whichever runs out first stops the search.
    """

    c: float = math.sqrt(2)
    rollout_cap: int | None = None
    deadline_ms: float | None = 100.0
    max_iterations: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.c < 0:
            raise ValueError(f"exploration constant must be >= 0, got {self.c}")
        if self.rollout_cap is not None and self.rollout_cap < 1:
            raise ValueError(f"rollout cap must be positive, got {self.rollout_cap}")
        if self.deadline_ms is not None and self.deadline_ms < 0:
            raise ValueError(f"deadline must be >= 0 ms, got {self.deadline_ms}")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError(f"iteration budget must be >= 0, got {self.max_iterations}")
        if self.deadline_ms is None and self.max_iterations is None:
            raise ValueError("ISMCTS needs a deadline, an iteration budget, or both")


@dataclass
class ScoredActions:
    """Average posterior entropy per evaluated action, plus how it was obtained."""

    scores: dict = field(default_factory=dict)
    # canonical position of each scored action in the legal-action list
    order: dict = field(default_factory=dict)
    states_used: int = 0
    actions_sampled: int = 0
    timed_out: bool = False


# --------------------------------------------------------------------------
# Random
# --------------------------------------------------------------------------


def random_select(actions: Sequence, rng: random.Random):
    if len(actions) == 0:
        raise ValueError("random_select needs at least one action")
    return actions[rng.randrange(len(actions))]


# --------------------------------------------------------------------------
# ISES
# --------------------------------------------------------------------------


def choose_min(scored: ScoredActions, info: EnumeratedInfoSet, game: DeductionGame):
    """Lowest score within tolerance; declaring actions first, then canonical order."""
    best = min(scored.scores.values())
    tied = [a for a, s in scored.scores.items() if s <= best + ENTROPY_TOL]
    if game.termination is Termination.DECLARATION and len(tied) > 1:
        candidates = set(info.candidates)
        declaring = [a for a in tied if game.declared_secret(a) in candidates]
        if declaring:
            tied = declaring
    return min(tied, key=scored.order.__getitem__)


def score_actions_full(info: EnumeratedInfoSet, actions: Sequence, game: DeductionGame) -> ScoredActions:
    scored = ScoredActions(states_used=len(info), actions_sampled=len(actions))
    for i, a in enumerate(actions):
        scored.scores[a] = expected_posterior_entropy(info, a, game)
        scored.order[a] = i
    return scored


def ises_full_select(info: EnumeratedInfoSet, actions: Sequence, game: DeductionGame):
    if len(actions) == 0:
        raise ValueError("ises_full_select needs at least one action")
    return choose_min(score_actions_full(info, actions, game), info, game)


def score_actions_sampled(
    info: EnumeratedInfoSet,
    actions: Sequence,
    game: DeductionGame,
    cfg: SamplerConfig,
    rng: random.Random,
) -> ScoredActions:
    """Score a sample of actions against one shared sample of states.

    Each sampled state answers the action; the posterior is the full
    information set filtered by that answer, and an action's score is the
    mean posterior entropy over the sampled states. When the state sample is
    the entire set, states are grouped by answer instead of filtered one at
    a time, which gives the same mean.
    """
    start = time.perf_counter()
    candidates = info.candidates
    size = len(candidates)
    if size == 0:
        raise ValueError("cannot sample from an empty information set")
    if len(actions) == 0:
        raise ValueError("ises_sampled_select needs at least one action")

    if cfg.m == ALL or cfg.m >= size:
        states = candidates
        grouped = True
    else:
        states = rng.sample(candidates, cfg.m)
        grouped = False
    if cfg.n == ALL:
        picked = range(len(actions))
    else:
        picked = rng.sample(range(len(actions)), min(cfg.n, len(actions)))

    scored = ScoredActions(states_used=len(states), actions_sampled=len(picked))
    deadline = cfg.deadline_ms
    stop_at = start + deadline / 1000.0 if deadline is not None else None
    query = game.query
    for j, ai in enumerate(picked):
        if stop_at is not None and (deadline <= 0 or (j > 0 and time.perf_counter() >= stop_at)):
            scored.timed_out = True
            break
        action = actions[ai]
        if grouped:
            counts = Counter(query(c, action) for c in candidates)
            score = sum(k * math.log2(k) for k in counts.values()) / size
        else:
            total = 0.0
            for state in states:
                obs = query(state, action)
                remaining = sum(1 for c in candidates if query(c, action) == obs)
                total += math.log2(remaining)
            score = total / len(states)
        scored.scores[action] = score
        scored.order[action] = ai
    return scored


def ises_sampled_select(
    info: EnumeratedInfoSet,
    actions: Sequence,
    game: DeductionGame,
    cfg: SamplerConfig,
    rng: random.Random | None = None,
):
    if rng is None:
        rng = random.Random(cfg.seed)
    scored = score_actions_sampled(info, actions, game, cfg, rng)
    if not scored.scores:
        log.warning("sampled ISES scored no action before the deadline; choosing at random")
        return random_select(actions, rng)
    return choose_min(scored, info, game)


# --------------------------------------------------------------------------
# ISMCTS
# --------------------------------------------------------------------------


class _Node:
    __slots__ = ("action", "parent", "index", "children", "visits", "total")

    def __init__(self, action, parent, index: int):
        self.action = action
        self.parent = parent
        self.index = index
        self.children: dict = {}
        self.visits = 0
        self.total = 0.0

    @property
    def mean(self) -> float:
        return self.total / self.visits if self.visits else 0.0


def ucb_select(children: Sequence[_Node], parent_visits: int, c: float) -> _Node:
    """UCB1 over visited children; earlier canonical position wins ties."""
    log_n = math.log(parent_visits) if parent_visits > 0 else 0.0

    def key(child: _Node):
        return (child.total / child.visits + c * math.sqrt(log_n / child.visits), -child.index)

    return max(children, key=key)


@dataclass
class SearchStats:
    iterations: int = 0
    fallback: bool = False
    visits: dict[Any, int] = field(default_factory=dict)


def ismcts_search(
    info: EnumeratedInfoSet,
    actions: Sequence,
    game: DeductionGame,
    cfg: MctsConfig,
    rng: random.Random,
) -> tuple[Any, SearchStats]:
    start = time.perf_counter()
    stats = SearchStats()
    if len(actions) == 0:
        raise ValueError("ismcts_select needs at least one action")
    if len(actions) == 1:
        return actions[0], stats

    candidates = info.candidates
    universe = len(game.initial_candidates)
    if cfg.rollout_cap is not None:
        cap = cfg.rollout_cap
    else:
        cap = max(1, math.ceil(4 * math.log2(universe))) if universe > 1 else 1
    query = game.query
    knowledge = game.termination is Termination.KNOWLEDGE
    # the candidate pool is only needed to detect knowledge termination or
    # to recompute an information-set-dependent action space
    track_pool = knowledge or not game.static_actions
    target = game.entropy_target + ENTROPY_TOL
    static = game.static_actions
    stop_at = start + cfg.deadline_ms / 1000.0 if cfg.deadline_ms is not None else None
    root = _Node(None, None, -1)
    position = {a: i for i, a in enumerate(actions)}

    def advance(secret, pool, action):
        obs = query(secret, action)
        if track_pool:
            pool = [c for c in pool if query(c, action) == obs]
        if knowledge:
            return math.log2(len(pool)) <= target, pool
        return game.is_match(action, obs), pool

    def legal_at(pool, depth):
        if static:
            return actions
        return game.legal_actions(EnumeratedInfoSet(pool), depth)

    while True:
        if stop_at is not None and (cfg.deadline_ms <= 0 or time.perf_counter() >= stop_at):
            break
        if cfg.max_iterations is not None and stats.iterations >= cfg.max_iterations:
            break

        secret = candidates[rng.randrange(len(candidates))]
        pool = candidates
        node = root
        depth = 0
        done = False
        legal = actions

        # selection and expansion
        while True:
            untried = [a for a in legal if a not in node.children]
            if untried:
                action = untried[rng.randrange(len(untried))]
                index = position[action] if static else legal.index(action)
                child = _Node(action, node, index)
                node.children[action] = child
                node = child
                done, pool = advance(secret, pool, action)
                depth += 1
                break
            available = [node.children[a] for a in legal]
            node = ucb_select(available, node.visits, cfg.c)
            done, pool = advance(secret, pool, node.action)
            depth += 1
            if done or depth >= cap:
                break
            legal = legal_at(pool, depth)

        # random rollout
        while not done and depth < cap:
            legal = legal_at(pool, depth)
            done, pool = advance(secret, pool, legal[rng.randrange(len(legal))])
            depth += 1

        reward = 1.0 / depth if done else 0.0
        while node is not None:
            node.visits += 1
            node.total += reward
            node = node.parent
        stats.iterations += 1

    if not root.children:
        stats.fallback = True
        log.warning("ISMCTS finished no iteration within its budget; choosing at random")
        return random_select(actions, rng), stats

    stats.visits = {a: ch.visits for a, ch in root.children.items()}
    best = max(root.children.values(), key=lambda ch: (ch.visits, -ch.index))
    return best.action, stats


def ismcts_select(
    info: EnumeratedInfoSet,
    actions: Sequence,
    game: DeductionGame,
    cfg: MctsConfig,
    rng: random.Random | None = None,
):
    if rng is None:
        rng = random.Random(cfg.seed)
    return ismcts_search(info, actions, game, cfg, rng)[0]


# --------------------------------------------------------------------------
# Agent objects used by the episode loop
# --------------------------------------------------------------------------


def _scores_for_log(scored: ScoredActions, game: DeductionGame) -> dict[str, float]:
    return {game.format_action(a): s for a, s in scored.scores.items()}


class RandomAgent:
    name = "random"

    def __init__(self):
        self.params: dict[str, Any] = {}
        self.last_decision: dict | None = None

    def select(self, info, actions, game, rng):
        self.last_decision = {}
        return random_select(actions, rng)


class FullISESAgent:
    name = "ises_full"

    def __init__(self):
        self.params: dict[str, Any] = {}
        self.last_decision: dict | None = None

    def select(self, info, actions, game, rng):
        scored = score_actions_full(info, actions, game)
        self.last_decision = {
            "states": scored.states_used,
            "actions": scored.actions_sampled,
            "scores": _scores_for_log(scored, game),
        }
        return choose_min(scored, info, game)


class SampledISESAgent:
    name = "ises_sampled"

    def __init__(self, m: int | str = ALL, n: int | str = ALL, budget_ms: float | None = 100.0):
        self.config = SamplerConfig(m=m, n=n, deadline_ms=budget_ms)
        self.params = {"m": m, "n": n, "budget_ms": budget_ms}
        self.last_decision: dict | None = None

    def select(self, info, actions, game, rng):
        scored = score_actions_sampled(info, actions, game, self.config, rng)
        self.last_decision = {
            "states": scored.states_used,
            "actions": scored.actions_sampled,
            "actions_scored": len(scored.scores),
            "timed_out": scored.timed_out,
            "scores": _scores_for_log(scored, game),
        }
        if not scored.scores:
            log.warning("sampled ISES scored no action before the deadline; choosing at random")
            self.last_decision["fallback"] = True
            return random_select(actions, rng)
        return choose_min(scored, info, game)


class ISMCTSAgent:
    name = "ismcts"

    def __init__(self, c: float = math.sqrt(2), budget_ms: float | None = 100.0,
                 rollout_cap: int | None = None, iterations: int | None = None):
        self.config = MctsConfig(c=c, rollout_cap=rollout_cap, deadline_ms=budget_ms,
                                 max_iterations=iterations)
        self.params = {"c": c, "budget_ms": budget_ms, "rollout_cap": rollout_cap,
                       "iterations": iterations}
        self.last_decision: dict | None = None

    def select(self, info, actions, game, rng):
        action, stats = ismcts_search(info, actions, game, self.config, rng)
        self.last_decision = {
            "iterations": stats.iterations,
            "fallback": stats.fallback,
            "visits": {game.format_action(a): v for a, v in stats.visits.items()},
        }
        return action


AGENTS = {
    "random": RandomAgent,
    "ises_full": FullISESAgent,
    "ises_sampled": SampledISESAgent,
    "ismcts": ISMCTSAgent,
}


def make_agent(name: str, **params):
    try:
        cls = AGENTS[name]
    except KeyError:
        raise ValueError(f"unknown agent {name!r}; choose from {', '.join(AGENTS)}") from None
    return cls(**params)

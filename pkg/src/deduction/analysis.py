"""Entropy analyses: first-move profiles, trajectory bands, benchmark summaries."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import statistics
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

from .core import ENTROPY_TOL, DeductionGame, EpisodeRecord, entropy_enumerated, expected_posterior_entropy
from .errors import EnumerationCapExceeded, InvalidBatch

log = logging.getLogger(__name__)

PROFILE_CAP = 100_000


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# First-move profile
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileRow:
    action: object
    label: str
    index: int
    posterior_bits: float
    change_bits: float


@dataclass(frozen=True)
class FirstMoveProfile:
    game_id: str
    initial_bits: float
    rows: tuple[ProfileRow, ...]

    def change(self, action) -> float:
        for row in self.rows:
            if row.action == action:
                return row.change_bits
        raise KeyError(action)

    def ranked(self) -> list[ProfileRow]:
        """Largest entropy change first; near-equal values keep canonical order."""
        return sorted(self.rows, key=lambda r: (-round(r.change_bits, 9), r.index))

    def spread(self) -> float:
        changes = [r.change_bits for r in self.rows]
        return max(changes) - min(changes)

    def classes(self, tol: float = ENTROPY_TOL) -> list[list[ProfileRow]]:
        """Group actions whose entropy change agrees within ``tol``, best group first."""
        groups: list[list[ProfileRow]] = []
        for row in self.ranked():
            if groups and abs(groups[-1][0].change_bits - row.change_bits) <= tol:
                groups[-1].append(row)
            else:
                groups.append([row])
        return groups

    HEADER = ("action", "expected_posterior_bits", "entropy_change_bits")

    def to_csv(self) -> str:
        return _csv_text(self.HEADER, ((r.label, repr(r.posterior_bits), repr(r.change_bits))
                                       for r in self.ranked()))

    def to_json(self) -> str:
        return json.dumps({
            "game": self.game_id,
            "initial_bits": self.initial_bits,
            "rows": [dict(zip(self.HEADER, (r.label, r.posterior_bits, r.change_bits)))
                     for r in self.ranked()],
        }, indent=2)


def first_move_profile(game: DeductionGame, cap: int = PROFILE_CAP) -> FirstMoveProfile:
    """Exact entropy change of every first action, averaged over all secrets."""
    info = game.initial_info_set()
    actions = game.legal_actions(info, 0)
    work = len(actions) * len(info)
    if work > cap:
        raise EnumerationCapExceeded(work, cap)
    h0 = entropy_enumerated(info)
    rows = []
    for i, a in enumerate(actions):
        post = expected_posterior_entropy(info, a, game)
        rows.append(ProfileRow(a, game.format_action(a), i, post, h0 - post))
    return FirstMoveProfile(game.game_id, h0, tuple(rows))


# --------------------------------------------------------------------------
# Trajectory band
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BandRow:
    step: int
    min_bits: float
    mean_bits: float
    max_bits: float
    episodes: int


@dataclass(frozen=True)
class TrajectoryBand:
    game_id: str
    agent: str
    episodes: int
    rows: tuple[BandRow, ...]

    HEADER = ("step", "min_bits", "mean_bits", "max_bits")

    def to_csv(self) -> str:
        return _csv_text(self.HEADER, ((r.step, _num(r.min_bits), _num(r.mean_bits), _num(r.max_bits))
                                       for r in self.rows))

    def to_json(self) -> str:
        return json.dumps({
            "game": self.game_id,
            "agent": self.agent,
            "episodes": self.episodes,
            "rows": [dict(zip(self.HEADER, (r.step, r.min_bits, r.mean_bits, r.max_bits)))
                     for r in self.rows],
        }, indent=2)


def _num(x: float) -> str:
    # 1e-12 rounding hides summation noise such as 0.9999999999999998
    return repr(round(x, 12) + 0.0)


def trajectory_band(records: Sequence[EpisodeRecord]) -> TrajectoryBand:
    """Per-step min/mean/max entropy, step 0 being the initial information set.

    Episodes are aligned by step index; a short episode stops contributing
    once it ends rather than being padded.
    """
    if not records:
        raise InvalidBatch("trajectory band needs at least one episode")
    keys = {(r.game_id, r.agent) for r in records}
    if len(keys) != 1:
        raise InvalidBatch(f"batch mixes games/agents: {sorted(keys)}")
    game_id, agent = keys.pop()
    series = [r.entropies for r in records]
    rows = []
    for step in range(max(len(s) for s in series)):
        values = [s[step] for s in series if step < len(s)]
        rows.append(BandRow(step, min(values), math.fsum(values) / len(values), max(values), len(values)))
    return TrajectoryBand(game_id, agent, len(records), tuple(rows))


# --------------------------------------------------------------------------
# Benchmark summary
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkSummary:
    game: str
    scale: str
    agent: str
    episodes: int
    mean_steps: float
    std_steps: float
    mean_reward: float
    mean_decision_ms: float
    unsolved: int

    DETERMINISTIC = ("game", "scale", "agent", "episodes", "mean_steps", "std_steps", "mean_reward", "unsolved")

    def as_dict(self) -> dict:
        return asdict(self)


def summarize_benchmark(records: Iterable[EpisodeRecord], order: Sequence[tuple] | None = None) -> list[BenchmarkSummary]:
    """One summary per (game, scale, agent) group.

    Sums use ``math.fsum`` and the deviation is computed exactly by
    :func:`statistics.pstdev`, so results do not depend on record order.
    Groups come out in ``order`` when given, otherwise sorted by key.
    """
    groups: dict[tuple, list[EpisodeRecord]] = {}
    for r in records:
        groups.setdefault((r.game, r.scale, r.agent), []).append(r)
    keys = list(order) if order is not None else sorted(groups)
    out = []
    for key in keys:
        group = groups.get(key)
        if not group:
            log.warning("no episodes for %s; group omitted", key)
            continue
        steps = [r.steps for r in group]
        times = [t for r in group for t in r.wall_times_ms]
        out.append(BenchmarkSummary(
            game=key[0],
            scale=key[1],
            agent=key[2],
            episodes=len(group),
            mean_steps=math.fsum(steps) / len(steps),
            std_steps=statistics.pstdev(steps),
            mean_reward=math.fsum(r.reward for r in group) / len(group),
            mean_decision_ms=math.fsum(times) / len(times) if times else 0.0,
            unsolved=sum(1 for r in group if not r.solved),
        ))
    return out


def summaries_to_csv(summaries: Sequence[BenchmarkSummary], fields: Sequence[str] = BenchmarkSummary.DETERMINISTIC) -> str:
    rows = []
    for s in summaries:
        d = s.as_dict()
        rows.append([repr(d[f]) if isinstance(d[f], float) else d[f] for f in fields])
    return _csv_text(fields, rows)


def summaries_to_json(summaries: Sequence[BenchmarkSummary]) -> str:
    return json.dumps([s.as_dict() for s in summaries], indent=2)

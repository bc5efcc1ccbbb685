"""Benchmark configuration, seed derivation and the episode runner.

Config files are JSON::

    {
      "games":  [{"name": "treasure_hunt", "scales": [{"cells": 8}, {"cells": 16}]},
                 {"name": "mastermind", "scale": {"pegs": 3, "colors": 3}}],
      "agents": [{"name": "random"},
                 {"name": "ises_full"},
                 {"name": "ises_sampled", "params": {"m": 32, "n": 64, "budget_ms": 100}},
                 {"name": "ismcts", "params": {"budget_ms": 100}, "label": "ismcts"}],
      "trials": 500,
      "master_seed": 2024,
      "step_cap_multiplier": 10,
      "output_dir": "results",
      "workers": 1,
      "traces": false,
      "decision_log": false
    }

Every (game, agent, trial) cell gets its own seed from a splitmix64 chain
over ``(master_seed, game index, agent index, trial)``. The secret of trial
``t`` is drawn from a separate stream keyed by ``(master_seed, game index,
t)`` only, so all agents face the same secrets.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import random
import re
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__
from .agents import AGENTS, make_agent
from .analysis import BenchmarkSummary, summaries_to_csv, summarize_benchmark
from .core import EpisodeRecord, play_episode
from .errors import ConfigError, DeductionError
from .games import GAMES, cached_game

OUTPUT_ENV = "DEDUCTION_OUTPUT_DIR"

MASK64 = (1 << 64) - 1
_SECRET_STREAM = 0x5EC12E7


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, *indices: int) -> int:
    h = splitmix64(master & MASK64)
    for i in indices:
        h = splitmix64(h ^ (i & MASK64))
    return h


def episode_seed(master: int, game_index: int, agent_index: int, trial: int) -> int:
    return derive_seed(master, game_index, agent_index, trial)


def secret_index(master: int, game_index: int, trial: int, universe: int) -> int:
    rng = random.Random(derive_seed(master, _SECRET_STREAM, game_index, trial))
    return rng.randrange(universe)


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GameSpec:
    name: str
    scale: dict

    def build(self):
        return cached_game(self.name, self.scale)


@dataclass(frozen=True)
class AgentSpec:
    name: str
    params: dict
    label: str

    def build(self):
        return make_agent(self.name, **self.params)


@dataclass
class BenchmarkConfig:
    games: list[GameSpec]
    agents: list[AgentSpec]
    trials: int = 500
    master_seed: int = 0
    step_cap_multiplier: float = 10.0
    output_dir: str = "results"
    workers: int = 1
    traces: bool = False
    decision_log: bool = False
    raw: dict = field(default_factory=dict, repr=False)


_TOP_KEYS = {"games", "agents", "trials", "master_seed", "step_cap_multiplier", "output_dir",
             "workers", "traces", "decision_log"}
_GAME_KEYS = {"name", "scale", "scales"}
_AGENT_KEYS = {"name", "params", "label"}
_AGENT_PARAMS = {
    "random": set(),
    "ises_full": set(),
    "ises_sampled": {"m", "n", "budget_ms"},
    "ismcts": {"c", "budget_ms", "rollout_cap", "iterations"},
}


class _Locator:
    """Maps JSON keys back to line numbers of the raw config text."""

    def __init__(self, text: str):
        self.text = text

    def line_of(self, key: str, value=None) -> int | None:
        pattern = re.escape(json.dumps(key)) + r"\s*:"
        if value is not None:
            pattern += r"\s*" + re.escape(json.dumps(value))
        m = re.search(pattern, self.text)
        if m is None and value is not None:
            return self.line_of(key)
        return self.text.count("\n", 0, m.start()) + 1 if m else None


def _agent_label(name: str, params: dict) -> str:
    if not params:
        return name
    inner = ",".join(f"{k}={params[k]}" for k in sorted(params))
    return f"{name}({inner})"


def parse_config(text: str) -> BenchmarkConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    loc = _Locator(text)
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", 1)

    def fail(msg, key=None, value=None):
        raise ConfigError(msg, loc.line_of(key, value) if key else None)

    for key in data:
        if key not in _TOP_KEYS:
            fail(f"unknown key {key!r}; allowed: {', '.join(sorted(_TOP_KEYS))}", key)
    for required in ("games", "agents"):
        if required not in data:
            raise ConfigError(f"missing required key {required!r}")
        if not isinstance(data[required], list) or not data[required]:
            fail(f"{required!r} must be a non-empty list", required)

    games: list[GameSpec] = []
    for entry in data["games"]:
        if not isinstance(entry, dict) or "name" not in entry:
            fail("each game entry needs a 'name'", "games")
        for key in entry:
            if key not in _GAME_KEYS:
                fail(f"unknown game key {key!r}; allowed: {', '.join(sorted(_GAME_KEYS))}", key)
        name = entry["name"]
        if name not in GAMES:
            fail(f"unknown game {name!r}; choose from {', '.join(GAMES)}", "name", name)
        if "scale" in entry and "scales" in entry:
            fail("give either 'scale' or 'scales', not both", "scales")
        scales = entry.get("scales", [entry.get("scale", {})])
        if not isinstance(scales, list) or not all(isinstance(s, dict) for s in scales):
            fail("'scales' must be a list of objects", "scales")
        for scale in scales:
            spec = GameSpec(name, dict(scale))
            try:
                spec.build()
            except (DeductionError, ValueError, OSError) as exc:
                fail(f"game {name!r} scale {scale}: {exc}", "name", name)
            games.append(spec)

    agents: list[AgentSpec] = []
    for entry in data["agents"]:
        if not isinstance(entry, dict) or "name" not in entry:
            fail("each agent entry needs a 'name'", "agents")
        for key in entry:
            if key not in _AGENT_KEYS:
                fail(f"unknown agent key {key!r}; allowed: {', '.join(sorted(_AGENT_KEYS))}", key)
        name = entry["name"]
        if name not in AGENTS:
            fail(f"unknown agent {name!r}; choose from {', '.join(AGENTS)}", "name", name)
        params = entry.get("params", {})
        if not isinstance(params, dict):
            fail("'params' must be an object", "params")
        for key in params:
            if key not in _AGENT_PARAMS[name]:
                allowed = ", ".join(sorted(_AGENT_PARAMS[name])) or "none"
                fail(f"unknown parameter {key!r} for agent {name!r}; allowed: {allowed}", key)
        label = entry.get("label") or _agent_label(name, params)
        spec = AgentSpec(name, dict(params), label)
        try:
            spec.build()
        except (TypeError, ValueError) as exc:
            fail(f"agent {name!r}: {exc}", "name", name)
        if any(a.label == label for a in agents):
            fail(f"duplicate agent label {label!r}; set 'label' to tell them apart", "name", name)
        agents.append(spec)

    def positive_int(key, default):
        value = data.get(key, default)
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            fail(f"{key!r} must be a positive integer, got {value!r}", key)
        return value

    def flag(key):
        value = data.get(key, False)
        if not isinstance(value, bool):
            fail(f"{key!r} must be true or false", key)
        return value

    seed = data.get("master_seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MASK64:
        fail("'master_seed' must be an unsigned 64-bit integer", "master_seed")
    mult = data.get("step_cap_multiplier", 10.0)
    if isinstance(mult, bool) or not isinstance(mult, (int, float)) or mult <= 0:
        fail("'step_cap_multiplier' must be a positive number", "step_cap_multiplier")
    out = data.get("output_dir", "results")
    if not isinstance(out, str) or not out:
        fail("'output_dir' must be a non-empty string", "output_dir")

    return BenchmarkConfig(
        games=games,
        agents=agents,
        trials=positive_int("trials", 500),
        master_seed=seed,
        step_cap_multiplier=float(mult),
        output_dir=out,
        workers=positive_int("workers", 1),
        traces=flag("traces"),
        decision_log=flag("decision_log"),
        raw=data,
    )


def load_config(path: str | Path) -> BenchmarkConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


# --------------------------------------------------------------------------
# Running
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EpisodeTask:
    game_index: int
    agent_index: int
    trial: int
    game: GameSpec
    agent: AgentSpec
    seed: int
    master_seed: int
    step_cap_multiplier: float
    log_decisions: bool


@dataclass
class EpisodeResult:
    task: EpisodeTask
    record: EpisodeRecord | None
    error: str | None = None


def run_task(task: EpisodeTask) -> EpisodeResult:
    try:
        game = task.game.build()
        agent = task.agent.build()
        agent.name = task.agent.label
        universe = game.initial_candidates
        secret = universe[secret_index(task.master_seed, task.game_index, task.trial, len(universe))]
        cap = game.default_step_cap(task.step_cap_multiplier)
        record = play_episode(game, agent, secret, task.seed, step_cap=cap, log_decisions=task.log_decisions)
        return EpisodeResult(task, record)
    except Exception as exc:  # recorded per episode; the run carries on
        return EpisodeResult(task, None, f"{type(exc).__name__}: {exc}")


def build_tasks(cfg: BenchmarkConfig) -> list[EpisodeTask]:
    tasks = []
    for gi, game in enumerate(cfg.games):
        for ai, agent in enumerate(cfg.agents):
            for t in range(cfg.trials):
                tasks.append(EpisodeTask(gi, ai, t, game, agent, episode_seed(cfg.master_seed, gi, ai, t),
                                         cfg.master_seed, cfg.step_cap_multiplier, cfg.decision_log))
    seeds = [t.seed for t in tasks]
    if len(set(seeds)) != len(seeds):
        raise ConfigError("episode seed collision; choose another master_seed")
    return tasks


def run_tasks(tasks: list[EpisodeTask], workers: int = 1) -> list[EpisodeResult]:
    """Run episodes, returning results in task order whatever the worker count."""
    if workers <= 1:
        return [run_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_task, tasks, chunksize=chunk))


EPISODE_HEADER = ("game", "scale", "agent", "trial", "seed", "secret", "steps", "reward", "solved", "error")
TIMING_HEADER = ("game", "scale", "agent", "trial", "decisions", "mean_decision_ms", "max_decision_ms")


def _scale_label(spec: GameSpec) -> str:
    return spec.build().scale_label


def _secret_text(game, secret) -> str:
    if secret in game.all_actions:
        return game.format_action(secret)
    return str(secret)


def episode_rows(results: list[EpisodeResult]) -> list[list]:
    rows = []
    for res in results:
        t = res.task
        game = t.game.build()
        base = [t.game.name, game.scale_label, t.agent.label, t.trial, t.seed]
        if res.record is None:
            rows.append(base + ["", "", "", "", res.error])
        else:
            r = res.record
            rows.append(base + [_secret_text(game, r.secret), r.steps, repr(r.reward), int(r.solved), ""])
    return rows


def timing_rows(results: list[EpisodeResult]) -> list[list]:
    rows = []
    for res in results:
        if res.record is None:
            continue
        t, r = res.task, res.record
        times = r.wall_times_ms
        mean = math.fsum(times) / len(times) if times else 0.0
        rows.append([t.game.name, _scale_label(t.game), t.agent.label, t.trial, len(times),
                     f"{mean:.3f}", f"{max(times, default=0.0):.3f}"])
    return rows


def _write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue())


def _code_version() -> str:
    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], capture_output=True, text=True,
                             cwd=Path(__file__).parent, timeout=5)
        if rev.returncode == 0:
            return f"{__version__}+{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


@dataclass
class RunOutcome:
    output_dir: Path
    results: list[EpisodeResult]
    summaries: list[BenchmarkSummary]

    @property
    def failures(self) -> int:
        return sum(1 for r in self.results if r.record is None)


def run_benchmark(cfg: BenchmarkConfig, output_dir: str | Path | None = None) -> RunOutcome:
    """Run every configured cell and write the result files.

    Writes ``episodes.csv`` and ``summary.csv`` (deterministic for a given
    config when no agent uses a wall-clock deadline), ``timings.csv`` and
    ``timing_summary.csv`` (wall-clock measurements), ``manifest.json``, and
    optionally ``traces.jsonl`` / ``decisions.jsonl``.
    """
    out = Path(output_dir or os.environ.get(OUTPUT_ENV) or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = build_tasks(cfg)
    results = run_tasks(tasks, cfg.workers)

    records = [r.record for r in results if r.record is not None]
    order = []
    for g in cfg.games:
        for a in cfg.agents:
            order.append((g.name, _scale_label(g), a.label))
    summaries = summarize_benchmark(records, order=order)

    _write_csv(out / "episodes.csv", EPISODE_HEADER, episode_rows(results))
    (out / "summary.csv").write_text(summaries_to_csv(summaries))
    _write_csv(out / "timings.csv", TIMING_HEADER, timing_rows(results))
    (out / "timing_summary.csv").write_text(
        summaries_to_csv(summaries, ("game", "scale", "agent", "episodes", "mean_decision_ms")))

    if cfg.traces:
        with open(out / "traces.jsonl", "w") as fh:
            for res in results:
                if res.record is not None:
                    fh.write(json.dumps(_trace_json(res)) + "\n")
    if cfg.decision_log:
        with open(out / "decisions.jsonl", "w") as fh:
            for res in results:
                if res.record is None:
                    continue
                for d in res.record.decisions:
                    fh.write(json.dumps({"game": res.task.game.name, "scale": res.record.scale,
                                         "trial": res.task.trial, **d}) + "\n")

    seeds: dict[str, list[int]] = {}
    for t in tasks:
        seeds.setdefault(f"{t.game.name}[{_scale_label(t.game)}]|{t.agent.label}", []).append(t.seed)
    manifest = {
        "code_version": _code_version(),
        "config": cfg.raw,
        "resolved": {
            "output_dir": str(out),
            "games": [{"name": g.name, "scale": g.scale, "label": _scale_label(g)} for g in cfg.games],
            "agents": [{"name": a.name, "params": a.params, "label": a.label} for a in cfg.agents],
            "trials": cfg.trials,
            "master_seed": cfg.master_seed,
            "step_cap_multiplier": cfg.step_cap_multiplier,
            "workers": cfg.workers,
        },
        "episode_seeds": seeds,
        "episodes": len(results),
        "failures": sum(1 for r in results if r.record is None),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return RunOutcome(out, results, summaries)


def _trace_json(res: EpisodeResult) -> dict[str, Any]:
    r = res.record
    game = res.task.game.build()
    return {
        "game": r.game,
        "scale": r.scale,
        "agent": r.agent,
        "trial": res.task.trial,
        "seed": r.seed,
        "secret": _secret_text(game, r.secret),
        "steps": r.steps,
        "solved": r.solved,
        "initial_bits": r.initial_entropy,
        "trace": [
            {"step": s.step, "action": game.format_action(s.action),
             "observation": game.format_observation(s.observation), "bits": s.entropy}
            for s in r.trace
        ],
    }

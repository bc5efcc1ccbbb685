"""Command-line entry point: ``run``, ``profile`` and ``trajectory``."""

from __future__ import annotations

import argparse
import logging
import random
import sys
from pathlib import Path

from .agents import AGENTS, make_agent
from .analysis import PROFILE_CAP, first_move_profile, trajectory_band
from .bench import OUTPUT_ENV, derive_seed, load_config, run_benchmark
from .core import play_episode
from .errors import ConfigError, DeductionError, EnumerationCapExceeded
from .games import DESK_SCALES, GAMES, make_game, parse_scale

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


def _game_from_args(args):
    scale = parse_scale(args.scale) if args.scale else dict(DESK_SCALES[args.game][0])
    return make_game(args.game, **scale)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.workers is not None:
        cfg.workers = args.workers
    outcome = run_benchmark(cfg, args.output_dir)
    for s in outcome.summaries:
        print(f"{s.game:18s} {s.scale:28s} {s.agent:28s} "
              f"mean_steps={s.mean_steps:7.3f} sd={s.std_steps:6.3f} unsolved={s.unsolved}")
    print(f"wrote {outcome.output_dir}")
    if outcome.failures:
        print(f"{outcome.failures} episode(s) failed; see the error column of episodes.csv", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_profile(args) -> int:
    try:
        game = _game_from_args(args)
        profile = first_move_profile(game, cap=args.cap)
    except EnumerationCapExceeded as exc:
        print(f"refusing to profile: {exc}; raise --cap to force it", file=sys.stderr)
        return EXIT_CONFIG
    except DeductionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(profile.to_json() + "\n" if args.format == "json" else profile.to_csv(), args.output)
    return EXIT_OK


def _parse_params(pairs: list[str]) -> dict:
    params = {}
    for pair in pairs or []:
        key, _, value = pair.partition("=")
        for cast in (int, float):
            try:
                params[key] = cast(value)
                break
            except ValueError:
                continue
        else:
            params[key] = None if value.lower() == "none" else value
    return params


def cmd_trajectory(args) -> int:
    try:
        game = _game_from_args(args)
        agent = make_agent(args.agent, **_parse_params(args.param))
    except (DeductionError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    universe = game.initial_candidates
    records = []
    for k in range(args.episodes):
        secret = universe[random.Random(derive_seed(args.seed, 1, k)).randrange(len(universe))]
        records.append(play_episode(game, agent, secret, derive_seed(args.seed, 0, k)))
    band = trajectory_band(records)
    _emit(band.to_json() + "\n" if args.format == "json" else band.to_csv(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deduction", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log agent fallbacks and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a benchmark configuration")
    run.add_argument("--config", required=True, help="JSON benchmark configuration")
    run.add_argument("--output-dir", help=f"overrides the config and ${OUTPUT_ENV}")
    run.add_argument("--workers", type=int, help="override the configured worker count")
    run.set_defaults(func=cmd_run)

    def game_args(p):
        p.add_argument("--game", required=True, choices=sorted(GAMES))
        p.add_argument("--scale", help="e.g. pegs=3,colors=3 (default: smallest desk scale)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", help="write here instead of stdout")

    profile = sub.add_parser("profile", help="first-move entropy-change profile")
    game_args(profile)
    profile.add_argument("--cap", type=int, default=PROFILE_CAP,
                         help="max actions x candidates evaluated (default %(default)s)")
    profile.set_defaults(func=cmd_profile)

    traj = sub.add_parser("trajectory", help="per-step entropy band over repeated episodes")
    game_args(traj)
    traj.add_argument("--agent", default="ises_full", choices=sorted(AGENTS))
    traj.add_argument("--param", action="append", metavar="KEY=VALUE", help="agent parameter, repeatable")
    traj.add_argument("--episodes", type=int, default=20)
    traj.add_argument("--seed", type=int, default=0)
    traj.set_defaults(func=cmd_trajectory)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

Subcommands: train (learn a pose policy), eval (score one controller),
compare (paired multi-seed system comparison), rollout (log one episode).
Exit codes: 0 success, 2 validation error, 1 runtime error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, EpisodeConfig, TrainConfig, load_config
from .evaluate import (
    CONTROLLERS,
    compare_systems,
    episode_report,
    format_comparison,
    parse_switcher,
    run_episode,
)
from .io import (
    CheckpointError,
    load_checkpoint,
    save_checkpoint,
    write_comparison_csv,
    write_episode_log,
    write_train_log,
)
from .training import train_pose_controller


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="camtrack",
        description="Multi-camera pan-tilt-zoom tracking simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train the pose policy")
    train.add_argument("--config", help="JSON config file")
    train.add_argument("--seed", type=int, help="override the training seed")
    train.add_argument("--steps", type=int,
                       help="override total pose-controller steps")
    train.add_argument("--out", required=True, help="checkpoint output path")
    train.add_argument("--log", help="training-log CSV output path")

    ev = sub.add_parser("eval", help="evaluate one controller")
    ev.add_argument("--config", help="JSON config file")
    ev.add_argument("--controller", required=True, choices=CONTROLLERS)
    ev.add_argument("--switcher", default="oracle",
                    help="oracle, random:P or noisy:E (default oracle)")
    ev.add_argument("--checkpoint", help="policy checkpoint (learned controller)")
    ev.add_argument("--seed", type=int, default=0)
    ev.add_argument("--episodes", type=int, default=1)
    ev.add_argument("--episode-log", help="directory for per-episode JSONL logs")

    cmp_ = sub.add_parser("compare", help="compare systems on paired seeds")
    cmp_.add_argument("--config", help="JSON config file")
    cmp_.add_argument("--systems", required=True,
                      help="comma-separated controller names")
    cmp_.add_argument("--seeds", type=int, required=True)
    cmp_.add_argument("--switcher", default="oracle")
    cmp_.add_argument("--checkpoint", help="policy checkpoint (learned system)")
    cmp_.add_argument("--out", required=True, help="CSV output path")

    roll = sub.add_parser("rollout", help="log one episode as JSONL")
    roll.add_argument("--config", help="JSON config file")
    roll.add_argument("--controller", default="geometric", choices=CONTROLLERS)
    roll.add_argument("--switcher", default="oracle")
    roll.add_argument("--checkpoint")
    roll.add_argument("--seed", type=int, default=0)
    roll.add_argument("--out", required=True, help="JSONL output path")
    return parser


def _load_configs(path: str | None) -> tuple[EpisodeConfig, TrainConfig]:
    if path is None:
        return EpisodeConfig(), TrainConfig()
    return load_config(path)


def _load_params_if_needed(controller_names, checkpoint: str | None):
    needs = any(name == "learned" for name in controller_names)
    if needs and checkpoint is None:
        raise ConfigError("the learned controller requires --checkpoint")
    return load_checkpoint(checkpoint) if needs else None


def _cmd_train(args) -> int:
    episode_cfg, train_cfg = _load_configs(args.config)
    if args.seed is not None:
        train_cfg.seed = args.seed
    if args.steps is not None:
        train_cfg.total_steps = args.steps
    train_cfg.validate()
    params, log = train_pose_controller(train_cfg, episode_cfg)
    save_checkpoint(params, args.out)
    if args.log:
        write_train_log(log, args.log)
    final = log[-1].mean_reward_g0 if log else float("nan")
    print(f"trained {train_cfg.total_steps} pose-controller steps "
          f"({len(log)} updates, final mean reward {final:.3f})")
    print(f"checkpoint written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    episode_cfg, _ = _load_configs(args.config)
    parse_switcher(args.switcher)
    params = _load_params_if_needed([args.controller], args.checkpoint)
    if args.episodes < 1:
        raise ConfigError("--episodes must be >= 1")

    log_dir = Path(args.episode_log) if args.episode_log else None
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)

    reports = []
    for k in range(args.episodes):
        seed = args.seed + k
        records = run_episode(episode_cfg, args.controller, switcher=args.switcher,
                              params=params, seed=seed)
        if log_dir is not None:
            write_episode_log(records, log_dir / f"episode_{seed}.jsonl")
        reports.append(episode_report(records))

    n = len(reports)
    me = sum(r.mean_error for r in reports) / n
    sr = sum(r.success_rate for r in reports) / n
    print(f"controller={args.controller} switcher={args.switcher} "
          f"episodes={n} seed0={args.seed}")
    for i in range(episode_cfg.n_cameras):
        cam_me = sum(r.per_camera_mean_error[i] for r in reports) / n
        cam_sr = sum(r.per_camera_success_rate[i] for r in reports) / n
        print(f"  cam_{i + 1}: mean_error={cam_me:8.3f} deg   "
              f"success_rate={cam_sr:6.4f}")
    print(f"  overall: mean_error={me:8.3f} deg   success_rate={sr:6.4f}")
    return 0


def _cmd_compare(args) -> int:
    episode_cfg, _ = _load_configs(args.config)
    parse_switcher(args.switcher)
    systems = [s.strip() for s in args.systems.split(",") if s.strip()]
    if not systems:
        raise ConfigError("--systems must name at least one controller")
    for name in systems:
        if name not in CONTROLLERS:
            raise ConfigError(f"unknown system {name!r}")
    if args.seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    params = _load_params_if_needed(systems, args.checkpoint)
    summaries = compare_systems(episode_cfg, systems, args.seeds,
                                params=params, switcher=args.switcher)
    write_comparison_csv(summaries, args.out)
    print(format_comparison(summaries))
    print(f"comparison CSV written to {args.out}")
    return 0


def _cmd_rollout(args) -> int:
    episode_cfg, _ = _load_configs(args.config)
    parse_switcher(args.switcher)
    params = _load_params_if_needed([args.controller], args.checkpoint)
    records = run_episode(episode_cfg, args.controller, switcher=args.switcher,
                          params=params, seed=args.seed)
    write_episode_log(records, args.out)
    report = episode_report(records)
    print(f"rollout seed={args.seed} controller={args.controller}: "
          f"mean_error={report.mean_error:.3f} deg "
          f"success_rate={report.success_rate:.4f}")
    print(f"episode log written to {args.out}")
    return 0


_COMMANDS = {"train": _cmd_train, "eval": _cmd_eval,
             "compare": _cmd_compare, "rollout": _cmd_rollout}


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, CheckpointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()

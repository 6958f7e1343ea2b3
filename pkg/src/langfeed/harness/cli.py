"""Command-line entry points: serve, play, eval, validate-assets."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..core import EnvConfig, FeedbackSelector, InstructionType, registered_envs
from ..templates import default_bank
from .evaluate import evaluate
from .play import interactive_play
from .protocol import serve


def _config_from_args(args: argparse.Namespace) -> EnvConfig:
    return EnvConfig(
        env_id=args.env,
        instruction_type=InstructionType.parse(args.instruction),
        feedback=FeedbackSelector.parse(args.feedback),
        randomize_text=not args.no_randomize,
        randomize_latent=not args.no_randomize,
        seed=args.seed,
    )


def _cmd_serve(args: argparse.Namespace) -> int:
    serve(args.listen)
    return 0


def _cmd_play(args: argparse.Namespace) -> int:
    interactive_play(_config_from_args(args), debug=args.debug)
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    report, _ = evaluate(
        env_id=args.env,
        agent=args.agent,
        n_episodes=args.episodes,
        seed_base=args.seed_base,
        rounds=args.rounds,
        timeout=args.timeout,
    )
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"report written to {args.out}")
    else:
        print(text)
    return 0


def _cmd_validate_assets(args: argparse.Namespace) -> int:
    from ..envs.poem import default_lexicon
    from ..envs.recommend import default_catalog

    bank = default_bank()
    groups = bank.group_keys()
    print(f"template bank: {len(groups)} groups, all sized 4..20")
    lexicon = default_lexicon()
    print(f"pronunciation lexicon: {len(lexicon)} words")
    catalog = default_catalog()
    print(f"catalog: {len(catalog.items)} items, titles unique after normalization")
    print(f"environments registered: {len(registered_envs())}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="langfeed",
        description="Language-feedback simulation environments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the wire-protocol server")
    p_serve.add_argument("--listen", required=True, help="'stdio' or 'tcp:<host>:<port>'")
    p_serve.set_defaults(fn=_cmd_serve)

    p_play = sub.add_parser("play", help="interactive terminal episode")
    p_play.add_argument("--env", required=True, help="environment id")
    p_play.add_argument("--seed", type=int, default=0)
    p_play.add_argument("--feedback", default="a", help="a | m | n | comma list like r,hp")
    p_play.add_argument("--instruction", default="b", help="b | p | c")
    p_play.add_argument("--no-randomize", action="store_true", help="fixed phrasing and latent state")
    p_play.add_argument("--debug", action="store_true", help="echo hidden rewards")
    p_play.set_defaults(fn=_cmd_play)

    p_eval = sub.add_parser("eval", help="score an agent over seeded sessions")
    p_eval.add_argument("--env", required=True)
    p_eval.add_argument("--agent", required=True, help="scripted agent id or tcp:<host>:<port>")
    p_eval.add_argument("--episodes", type=int, required=True, help="number of seeded sessions")
    p_eval.add_argument("--rounds", type=int, default=1, help="episodes per session")
    p_eval.add_argument("--seed-base", type=int, default=0)
    p_eval.add_argument("--timeout", type=float, default=30.0, help="per-step agent deadline (s)")
    p_eval.add_argument("--out", default=None, help="write the JSON report here")
    p_eval.set_defaults(fn=_cmd_eval)

    p_validate = sub.add_parser("validate-assets", help="load and check bundled data assets")
    p_validate.set_defaults(fn=_cmd_validate_assets)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())

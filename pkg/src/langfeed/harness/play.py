"""Human-in-the-loop terminal session: print bundles, read actions."""

from __future__ import annotations

from typing import Callable, Optional

from ..core import EnvConfig, make


def interactive_play(
    config: EnvConfig,
    input_fn: Callable[[str], str] = input,
    print_fn: Callable[[str], None] = print,
    debug: bool = False,
    seed: Optional[int] = None,
) -> None:
    """One episode: show observation/instruction/feedback, loop until done.

    The reward is never printed unless ``debug`` is set.  EOF on input ends
    the session cleanly.
    """
    env = make(config)
    bundle = env.reset(seed)
    print_fn(f"=== {config.env_id} ===")
    print_fn(bundle.instruction)
    print_fn("")
    print_fn(bundle.observation)
    while True:
        try:
            action = input_fn("> ")
        except EOFError:
            print_fn("(session closed)")
            return
        outcome = env.step(action)
        print_fn(outcome.bundle.observation)
        if outcome.bundle.feedback:
            print_fn(outcome.bundle.feedback)
        if debug:
            print_fn(f"[debug] reward={outcome.reward} info={outcome.info}")
        if outcome.done:
            status = "terminated" if outcome.terminated else "out of steps"
            print_fn(f"(episode {status})")
            return

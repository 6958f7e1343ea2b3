"""Descending a hidden loss surface by reading slope feedback.

The teacher verbalizes the loss, explains whether the last move pointed
downhill, and suggests per-coordinate directions from the current gradient.
The sign-descent baseline turns those suggestions straight into moves.
"""

import langfeed as lf
from langfeed.harness.agents import SignDescentAgent
from langfeed.harness.evaluate import run_agent_episode

env = lf.make(lf.EnvConfig(env_id="optimization/sphere", seed=3))
bundle = env.reset()
print("INSTRUCTION:", bundle.instruction, "\n")
print("START:", bundle.observation, "\n")

outcome = env.step("4.0, -4.0")
print("AFTER PROPOSING (4, -4):")
print(outcome.bundle.feedback, "\n")

# The scripted agent: echo the start point once, then follow fp directions.
for name in ["sphere", "booth", "matyas", "rosenbrock"]:
    env = lf.make(lf.EnvConfig(env_id=f"optimization/{name}", seed=5))
    transcript = run_agent_episode(env, SignDescentAgent(), seed=5)
    f_values = [f"{s.info['f']:.4f}" for _, s in transcript.steps if "f" in s.info]
    print(f"{name:>12}: f trajectory {' -> '.join(f_values[:5])}")

"""Treasure hunting with all five feedback channels.

A random walker shows hp/hn/fp/fn in action; the fp-follower then solves
the same maze in exactly its shortest-path length.  Complete instructions
('c') even hand over the map and an optimal route.
"""

import numpy as np

import langfeed as lf
from langfeed.harness.agents import FpFollowerAgent
from langfeed.harness.evaluate import run_agent_episode

env = lf.make(lf.EnvConfig(env_id="gridworld", seed=8))
bundle = env.reset()
print("OBSERVATION:", bundle.observation, "\n")

rng = np.random.default_rng(0)
for step in range(4):
    outcome = env.step(env.sample_action(rng))
    print(f"random step {step + 1}: {outcome.bundle.feedback.replace(chr(10), ' | ')}")

# Complete instructions include the door map and one optimal route.
env_c = lf.make(
    lf.EnvConfig(env_id="gridworld", instruction_type=lf.InstructionType.COMPLETE, seed=8)
)
bundle = env_c.reset()
print("\nCOMPLETE INSTRUCTION (truncated):", bundle.instruction[:220], "...\n")

transcript = run_agent_episode(env_c, FpFollowerAgent(), seed=8)
print(f"fp-follower reached the treasure in {len(transcript.steps)} moves:")
print(" ->", ", ".join(action for action, _ in transcript.steps))

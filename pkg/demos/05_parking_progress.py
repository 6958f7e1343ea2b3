"""Parking with distance-progress feedback (r, hp, hn only).

This environment never gives future suggestions; the agent must infer the
dynamics from hindsight.  Here a hand-rolled proportional controller nudges
the car toward the goal to show progress feedback flipping between hp/hn.
"""

import math

import langfeed as lf

env = lf.make(lf.EnvConfig(env_id="parking", seed=2))
bundle = env.reset()
print("INSTRUCTION:", bundle.instruction[:180], "...\n")
print("START:", bundle.observation, "\n")

for step in range(12):
    # Cheap controller on the evaluation channel, just for the demo.
    gx, gy, _ = env.scene.goal
    dx, dy = gx - env.state.x, gy - env.state.y
    target_heading = math.atan2(dy, dx)
    steer = max(-0.6, min(0.6, target_heading - env.state.heading))
    outcome = env.step(f"throttle=0.4, steering={steer:.2f}")
    fb = outcome.bundle.feedback.replace("\n", " | ")
    print(f"step {step + 1:>2}: {fb}")
    if outcome.done:
        break

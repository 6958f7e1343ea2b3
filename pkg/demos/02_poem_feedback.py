"""Per-line syllable feedback on haiku attempts.

The checker grants a line if any combination of the dictionary's
pronunciation variants hits the target, and the feedback names each
violating line with its count range.
"""

import langfeed as lf

env = lf.make(lf.EnvConfig(env_id="poem/haiku", seed=0))
bundle = env.reset()
print("INSTRUCTION:", bundle.instruction, "\n")

attempts = [
    # Wrong line count.
    "the moon",
    # Right count, wrong syllables on lines 1 and 3.
    "moon\na frog jumps into the pond\nsplash",
    # A classic that satisfies 5-7-5.
    "an old silent pond\na frog jumps into the pond\nsplash silence again",
]

for poem in attempts:
    bundle = env.reset()
    outcome = env.step(poem)
    print("POEM:", poem.replace("\n", " / "))
    print("feedback:", outcome.bundle.feedback.replace("\n", "\n          "))
    print("success:", outcome.info["success"], "\n")

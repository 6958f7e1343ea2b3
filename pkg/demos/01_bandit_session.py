"""A session with the ten-armed Gaussian slot machines.

Shows the core loop: the instruction names the levers, every pull returns
verbalized feedback, and the hidden reward stays on the evaluation channel.
An epsilon-greedy reader of the payout feedback beats random play.
"""

import langfeed as lf
from langfeed.harness.evaluate import evaluate

# One manual round first, to see the text the agent sees.
env = lf.make(lf.EnvConfig(env_id="bandit/ten_armed_gaussian", seed=1))
bundle = env.reset()
print("INSTRUCTION:", bundle.instruction, "\n")

outcome = env.step("C")
print("FEEDBACK AFTER PULLING C:")
print(outcome.bundle.feedback, "\n")
# The reward exists, but only for evaluation; agents never see it.
print("hidden reward:", outcome.reward, "\n")

# Now score two agents over 10 sessions of 100 rounds each.
for agent in ["random", "epsilon_greedy"]:
    report, _ = evaluate(
        "bandit/ten_armed_gaussian", agent, n_episodes=10, seed_base=0, rounds=100
    )
    print(f"{agent:>15}: total regret over 10x100 rounds = {report.regret:.1f}")

"""Slot-machine environment: catalogue, payouts, feedback, regret."""

from __future__ import annotations

import numpy as np
import pytest

import langfeed as lf
from langfeed.envs.bandit import ARM_LABELS, CATALOGUE, best_arm_index, regret
from langfeed.harness.evaluate import evaluate, scripted_session


def _session(problem: str, seed: int, actions: list[str]):
    return scripted_session(f"bandit/{problem}", seed, actions)


def test_catalogue_has_exactly_eight_problems():
    assert len(CATALOGUE) == 8
    for spec in CATALOGUE.values():
        assert spec.n_arms in (2, 10)


def test_deterministic_problem_best_arm_pays_one():
    env = lf.make(lf.EnvConfig(env_id="bandit/two_armed_deterministic", seed=0))
    env.reset()
    best = env.arms[best_arm_index(env.arms)]
    out = env.step(best.label)
    assert out.reward == 1.0
    assert out.terminated and not out.truncated


def test_bernoulli_p_one_always_pays():
    env = lf.make(lf.EnvConfig(env_id="bandit/two_armed_deterministic", seed=0))
    env.reset(seed=5)
    for _ in range(20):
        out = env.step("A")  # arm A has p=1 in this problem
        assert out.reward == 1.0
        env.reset()


def test_malformed_action_lists_valid_arms():
    env = lf.make(lf.EnvConfig(env_id="bandit/ten_armed_gaussian", seed=1))
    env.reset()
    out = env.step("arm 99")
    assert out.info.get("malformed") is True
    hn = out.info["feedback_pieces"]["hn"]
    for label in ARM_LABELS[:10]:
        assert label in hn
    # The wasted round still consumed the single-step episode.
    assert out.done


def test_display_position_is_accepted_as_action():
    env = lf.make(lf.EnvConfig(env_id="bandit/ten_armed_uniform", seed=3))
    env.reset()
    display = env._display_order()
    out = env.step("4")
    assert out.info["chosen_arm"] == env.arms[display[3]].label


def test_permutation_changes_display_only():
    # True-mean multiset is seed-invariant for fixed-parameter problems.
    means = []
    for seed in range(6):
        env = lf.make(lf.EnvConfig(env_id="bandit/two_armed_high_low", seed=seed))
        env.reset(seed=seed)
        means.append(sorted(a.mean for a in env.arms))
    assert all(m == means[0] for m in means)


def test_random_random_redraws_between_rounds():
    env = lf.make(lf.EnvConfig(env_id="bandit/ten_armed_random_random", seed=2))
    env.reset(seed=2)
    first = [a.mean for a in env.arms]
    env.step("A")
    env.reset()
    second = [a.mean for a in env.arms]
    assert first != second


def test_random_fixed_keeps_params_within_session():
    env = lf.make(lf.EnvConfig(env_id="bandit/ten_armed_random_fixed", seed=2))
    env.reset(seed=2)
    first = [a.mean for a in env.arms]
    env.step("A")
    env.reset()
    assert [a.mean for a in env.arms] == first


def test_fp_names_true_best_arm():
    for problem in CATALOGUE:
        for seed in (0, 1, 2):
            env = lf.make(lf.EnvConfig(env_id=f"bandit/{problem}", seed=seed))
            env.reset(seed=seed)
            out = env.step("A")
            best = env.arms[best_arm_index(env.arms)].label
            assert out.info["best_arm"] == best
            fp = out.info["feedback_pieces"]["fp"]
            slots = lf.default_bank().extract_slots(fp, "bandit", "fp", "best")
            assert slots["arm"] == best


def test_hp_iff_best_arm_pulled():
    env = lf.make(lf.EnvConfig(env_id="bandit/two_armed_deterministic", seed=0))
    env.reset(seed=0)
    best = env.arms[best_arm_index(env.arms)].label
    other = next(a.label for a in env.arms if a.label != best)
    out = env.step(best)
    assert "hp" in out.info["feedback_pieces"]
    assert "hn" not in out.info["feedback_pieces"]
    env.reset()
    out = env.step(other)
    assert "hn" in out.info["feedback_pieces"]
    assert "hp" not in out.info["feedback_pieces"]


def test_empirical_means_within_three_standard_errors():
    env = lf.make(lf.EnvConfig(env_id="bandit/ten_armed_gaussian", seed=7))
    env.reset(seed=7)
    n = 10_000
    sums = {a.label: 0.0 for a in env.arms}
    for arm in env.arms:
        for _ in range(n):
            out = env.step(arm.label)
            sums[arm.label] += out.reward
            env.reset()
        se = arm.stddev / np.sqrt(n) if arm.stddev > 0 else 0.0
        err = abs(sums[arm.label] / n - arm.mean)
        if se == 0:
            assert err == 0.0
        else:
            assert err <= 3 * se, f"{arm.label}: err {err} > 3*{se}"


def test_reward_bounds_bernoulli():
    transcripts = _session("ten_armed_random_fixed", 4, ["A", "B", "C", "D"] * 10)
    for t in transcripts:
        for _, out in t.steps:
            assert out.reward in (0.0, 1.0)


def test_regret_zero_when_always_best():
    env = lf.make(lf.EnvConfig(env_id="bandit/two_armed_high_low", seed=0))
    env.reset(seed=0)
    best = env.arms[best_arm_index(env.arms)].label
    transcripts = []
    for i in range(10):
        if i:
            env.reset()
        t = lf.EpisodeTranscript(config=env.config, reset_bundle=env.reset() if False else lf.ObservationBundle("", "x", ""))
        out = env.step(best)
        t.steps.append((best, out))
        transcripts.append(t)
    assert regret(transcripts) == 0.0


def test_regret_accumulates_gap():
    # T pulls of a known-gap arm: regret == T * gap, by definition.
    env = lf.make(lf.EnvConfig(env_id="bandit/two_armed_high_low", seed=0))
    env.reset(seed=0)
    worst = min(env.arms, key=lambda a: a.mean).label
    gap = max(a.mean for a in env.arms) - min(a.mean for a in env.arms)
    transcripts = []
    for i in range(25):
        if i:
            env.reset()
        t = lf.EpisodeTranscript(config=env.config, reset_bundle=lf.ObservationBundle("", "x", ""))
        out = env.step(worst)
        t.steps.append((worst, out))
        transcripts.append(t)
    assert regret(transcripts) == pytest.approx(25 * gap)


def test_regret_nonnegative_for_random_play():
    report, sessions = evaluate(
        "bandit/ten_armed_gaussian", "random", n_episodes=3, seed_base=0, rounds=20
    )
    assert report.regret is not None and report.regret >= 0.0


def test_epsilon_greedy_average_regret_improves():
    # Learning signal: average per-round regret shrinks with more rounds.
    def avg_regret(rounds: int) -> float:
        report, sessions = evaluate(
            "bandit/ten_armed_gaussian",
            "epsilon_greedy",
            n_episodes=20,
            seed_base=100,
            rounds=rounds,
        )
        return report.regret / (20 * rounds)

    assert avg_regret(200) < avg_regret(50)

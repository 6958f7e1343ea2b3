"""Test functions, analytic gradients vs finite differences, feedback fidelity."""

from __future__ import annotations

import numpy as np
import pytest

import langfeed as lf
from langfeed.envs.optimization import (
    CONVEX_FUNCTIONS,
    FUNCTIONS,
    GRAD_EPS,
    NonFiniteInputError,
    direction_word,
    loss_and_grad,
    parse_point,
)
from langfeed.harness.agents import SignDescentAgent
from langfeed.harness.evaluate import run_agent_episode


def central_difference(fn, x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Independent gradient oracle."""
    grad = np.zeros_like(x, dtype=float)
    for i in range(len(x)):
        step = np.zeros_like(x, dtype=float)
        step[i] = h * (1.0 + abs(x[i]))
        grad[i] = (fn.value(x + step) - fn.value(x - step)) / (2 * step[i])
    return grad


def interior_points(fn, n: int, rng: np.random.Generator) -> np.ndarray:
    lo = np.array([b[0] for b in fn.box])
    hi = np.array([b[1] for b in fn.box])
    # Stay 1% inside the box so the difference stencil never leaves it.
    margin = 0.01 * (hi - lo)
    return lo + margin + (hi - lo - 2 * margin) * rng.random((n, 2))


def test_catalogue_has_eight_two_dimensional_functions():
    assert len(FUNCTIONS) == 8
    for fn in FUNCTIONS.values():
        assert fn.dimension == 2


def test_known_minima_evaluate_to_recorded_values():
    for fn in FUNCTIONS.values():
        value, grad = loss_and_grad(fn, np.array(fn.minimum_point))
        assert abs(value - fn.minimum_value) < 1e-9, fn.name
        assert np.all(np.abs(grad) < 1e-6), fn.name


def test_rosenbrock_reference_points():
    fn = FUNCTIONS["rosenbrock"]
    value, grad = loss_and_grad(fn, np.array([1.0, 1.0]))
    assert value == 0.0 and np.allclose(grad, [0.0, 0.0])
    value, grad = loss_and_grad(fn, np.array([0.0, 0.0]))
    assert value == 1.0
    assert np.allclose(grad, [-2.0, 0.0])


def test_sphere_origin():
    value, grad = loss_and_grad(FUNCTIONS["sphere"], np.zeros(2))
    assert value == 0.0 and np.all(grad == 0.0)


def test_non_finite_input_rejected():
    with pytest.raises(NonFiniteInputError):
        loss_and_grad(FUNCTIONS["sphere"], np.array([np.nan, 0.0]))


@pytest.mark.parametrize("name", sorted(FUNCTIONS))
def test_gradients_match_finite_differences(name):
    fn = FUNCTIONS[name]
    rng = np.random.default_rng(hash(name) % 2**32)
    for x in interior_points(fn, 100, rng):
        _, analytic = loss_and_grad(fn, x)
        numeric = central_difference(fn, x)
        err = np.linalg.norm(analytic - numeric) / max(1.0, np.linalg.norm(analytic))
        assert err < 1e-4, f"{name} at {x}: {err}"


def test_parse_point_formats():
    assert np.allclose(parse_point("0.5, -1.25", 2), [0.5, -1.25])
    assert np.allclose(parse_point("  3 4 ", 2), [3.0, 4.0])
    assert np.allclose(parse_point("(1e-2, 2.5e1)", 2), [0.01, 25.0])
    assert parse_point("1", 2) is None
    assert parse_point("1 2 3", 2) is None
    assert parse_point("one, two", 2) is None


def test_first_step_has_no_hindsight():
    env = lf.make(lf.EnvConfig(env_id="optimization/sphere", seed=0))
    env.reset()
    out = env.step("1.0, 1.0")
    pieces = out.info["feedback_pieces"]
    assert "hp" not in pieces and "hn" not in pieces
    assert "r" in pieces and "fp" in pieces and "fn" in pieces


def test_descent_step_yields_hp():
    env = lf.make(lf.EnvConfig(env_id="optimization/sphere", seed=0))
    env.reset()
    env.step("2.0, 2.0")
    out = env.step("1.0, 1.0")  # strictly downhill on the sphere
    assert "hp" in out.info["feedback_pieces"]
    assert "downhill" in out.info["feedback_pieces"]["hp"]


def test_uphill_step_yields_hn():
    env = lf.make(lf.EnvConfig(env_id="optimization/sphere", seed=0))
    env.reset()
    env.step("1.0, 1.0")
    out = env.step("3.0, 3.0")
    assert "hn" in out.info["feedback_pieces"]
    assert "hp" not in out.info["feedback_pieces"]


def test_minimum_point_triggers_stay_advice():
    env = lf.make(lf.EnvConfig(env_id="optimization/sphere", seed=0, randomize_text=False))
    env.reset()
    out = env.step("0, 0")
    fp = out.info["feedback_pieces"]["fp"]
    assert "stay near this point" in fp
    assert out.terminated and out.info["success"]


def test_clamp_noted_in_hn():
    env = lf.make(lf.EnvConfig(env_id="optimization/sphere", seed=0))
    env.reset()
    out = env.step("99, 99")  # box is [-5.12, 5.12]
    assert out.info["clamped"] is True
    assert "hn" in out.info["feedback_pieces"]
    assert np.allclose(out.info["x"], [5.12, 5.12])


def test_malformed_consumes_step_and_explains():
    env = lf.make(lf.EnvConfig(env_id="optimization/sphere", seed=0))
    env.reset()
    out = env.step("no numbers here")
    assert out.info["malformed"] is True
    assert "hn" in out.info["feedback_pieces"]
    assert env.step_count == 1


def test_truncation_at_horizon_ten():
    env = lf.make(lf.EnvConfig(env_id="optimization/rastrigin", seed=3))
    env.reset()
    out = None
    for _ in range(10):
        out = env.step("4.0, 4.0")
    assert out.truncated and env.step_count == 10


def test_best_f_non_increasing():
    env = lf.make(lf.EnvConfig(env_id="optimization/himmelblau", seed=5))
    env.reset()
    rng = np.random.default_rng(0)
    best_values = []
    for _ in range(10):
        out = env.step(env.sample_action(rng))
        best_values.append(out.info["best_f"])
        if out.done:
            break
    assert all(b2 <= b1 for b1, b2 in zip(best_values, best_values[1:]))


def test_fp_direction_slots_match_gradient_signs(bank):
    rng = np.random.default_rng(17)
    for name, fn in FUNCTIONS.items():
        env = lf.make(lf.EnvConfig(env_id=f"optimization/{name}", seed=11))
        env.reset(seed=11)
        for _ in range(12):
            if not env._episode_active:
                env.reset()
            out = env.step(env.sample_action(rng))
            pieces = out.info["feedback_pieces"]
            grad = np.array(out.info["gradient"])
            if np.all(np.abs(grad) <= GRAD_EPS):
                continue
            slots = bank.extract_slots(pieces["fp"], "optimization", "fp", "direction")
            for coord, key in ((0, "dir_x"), (1, "dir_y")):
                if abs(grad[coord]) > GRAD_EPS:
                    expected = "decrease" if grad[coord] > 0 else "increase"
                    assert slots[key] == expected, (name, grad)


def test_direction_word_thresholds():
    assert direction_word(1.0) == "decrease"
    assert direction_word(-1.0) == "increase"
    assert direction_word(0.0) == "hold"
    assert direction_word(5e-9) == "hold"


@pytest.mark.parametrize("name", CONVEX_FUNCTIONS)
def test_sign_descent_strictly_decreases_on_convex(name):
    # The first proposal echoes the start point (no feedback exists yet);
    # each of the next 3 guided proposals must strictly reduce the loss,
    # and best-so-far must never rise.
    for seed in range(20):
        env = lf.make(lf.EnvConfig(env_id=f"optimization/{name}", seed=seed))
        agent = SignDescentAgent()
        transcript = run_agent_episode(env, agent, seed)
        f_values = [step.info["f"] for _, step in transcript.steps if "f" in step.info]
        best_values = [step.info["best_f"] for _, step in transcript.steps if "best_f" in step.info]
        assert all(b2 <= b1 for b1, b2 in zip(best_values, best_values[1:]))
        if transcript.steps[-1][1].terminated and len(f_values) < 4:
            continue  # solved before three guided steps
        for earlier, later in zip(f_values[:3], f_values[1:4]):
            assert later < earlier, (name, seed, f_values[:4])

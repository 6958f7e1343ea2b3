"""Parking: bicycle integrator, SAT collision vs sampling oracle, feedback."""

from __future__ import annotations

import math

import numpy as np
import pytest

import langfeed as lf
from langfeed.core import AtomicFeedbackType, FeedbackSelector
from langfeed.envs.parking import (
    ACCEL,
    DT,
    FRICTION,
    STEER_MAX,
    V_MAX,
    WHEELBASE,
    NonFiniteActionError,
    ParkingEnv,
    Rect,
    VehicleState,
    generate_scene,
    integrate,
    parse_control,
    rects_overlap,
    wrap_angle,
)


def point_in_rect(point: np.ndarray, rect: Rect) -> bool:
    u, w = rect.axes()
    d = point - np.array([rect.cx, rect.cy])
    return abs(float(d @ u)) <= rect.half_length and abs(float(d @ w)) <= rect.half_width


def sampling_overlap(a: Rect, b: Rect, n_grid: int = 24, n_edge: int = 60) -> bool:
    """Oracle: corners, dense interior grid, and dense edge sampling."""

    def samples(rect: Rect) -> np.ndarray:
        u, w = rect.axes()
        center = np.array([rect.cx, rect.cy])
        pts = [center]
        lin_u = np.linspace(-rect.half_length, rect.half_length, n_grid)
        lin_w = np.linspace(-rect.half_width, rect.half_width, n_grid)
        for du in lin_u:
            for dw in lin_w:
                pts.append(center + du * u + dw * w)
        edge_u = np.linspace(-rect.half_length, rect.half_length, n_edge)
        edge_w = np.linspace(-rect.half_width, rect.half_width, n_edge)
        for du in edge_u:
            pts.append(center + du * u + rect.half_width * w)
            pts.append(center + du * u - rect.half_width * w)
        for dw in edge_w:
            pts.append(center + rect.half_length * u + dw * w)
            pts.append(center - rect.half_length * u + dw * w)
        return np.array(pts)

    return any(point_in_rect(p, b) for p in samples(a)) or any(
        point_in_rect(p, a) for p in samples(b)
    )


def random_rect(rng: np.random.Generator) -> Rect:
    return Rect(
        cx=float(rng.uniform(-5, 5)),
        cy=float(rng.uniform(-5, 5)),
        half_length=float(rng.uniform(0.5, 3.0)),
        half_width=float(rng.uniform(0.3, 2.0)),
        angle=float(rng.uniform(-math.pi, math.pi)),
    )


def test_wrap_angle_range():
    for theta in np.linspace(-10, 10, 200):
        w = wrap_angle(float(theta))
        assert -math.pi < w <= math.pi
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi


def test_rest_is_fixed_point():
    state = VehicleState(x=1.0, y=2.0, heading=0.5, speed=0.0)
    after = integrate(state, throttle=0.0, steering=0.0)
    assert after == state


def test_straight_line_motion():
    state = VehicleState(x=0.0, y=0.0, heading=0.0, speed=0.0)
    after = integrate(state, throttle=1.0, steering=0.0)
    assert after.heading == 0.0
    assert after.y == 0.0
    assert after.x == pytest.approx(after.speed * DT)
    assert after.speed == pytest.approx(ACCEL * DT)


def test_friction_decays_speed_without_throttle():
    state = VehicleState(x=0.0, y=0.0, heading=0.0, speed=3.0)
    speeds = []
    for _ in range(30):
        state = integrate(state, throttle=0.0, steering=0.0)
        speeds.append(abs(state.speed))
    assert all(s2 <= s1 for s1, s2 in zip(speeds, speeds[1:]))
    assert speeds[-1] < 0.2


def test_speed_clamped_to_limit():
    state = VehicleState(x=0.0, y=0.0, heading=0.0, speed=0.0)
    for _ in range(100):
        state = integrate(state, throttle=1.0, steering=0.0)
    assert abs(state.speed) <= V_MAX


def test_non_finite_action_rejected():
    state = VehicleState(x=0.0, y=0.0, heading=0.0, speed=0.0)
    with pytest.raises(NonFiniteActionError):
        integrate(state, throttle=float("nan"), steering=0.0)


def test_circular_arc_matches_closed_form():
    # Constant speed and steering trace a circle.  Friction is canceled by
    # throttle a = FRICTION * v / (ACCEL * dt), keeping v exactly constant.
    v = 1.0
    steering = 0.3
    throttle = FRICTION * v / (ACCEL * DT)
    omega = (v / WHEELBASE) * math.tan(steering)  # rad/s
    state = VehicleState(x=0.0, y=0.0, heading=0.0, speed=v)
    radius = v / omega
    max_err = 0.0
    for k in range(1, 101):
        state = integrate(state, throttle=throttle, steering=steering)
        assert state.speed == pytest.approx(v, abs=1e-12)
        t = k * DT
        # Continuous-time solution of the bicycle ODE at constant v, delta.
        cx = radius * math.sin(omega * t)
        cy = radius * (1.0 - math.cos(omega * t))
        err = math.hypot(state.x - cx, state.y - cy)
        max_err = max(max_err, err)
        assert state.heading == pytest.approx(wrap_angle(omega * t), abs=1e-9)
    assert max_err <= 0.01 * radius


def test_sat_matches_sampling_oracle_on_random_pairs():
    rng = np.random.default_rng(20240202)
    disagreements = 0
    for _ in range(1000):
        a, b = random_rect(rng), random_rect(rng)
        if rects_overlap(a, b) != sampling_overlap(a, b):
            disagreements += 1
    assert disagreements == 0


def test_sat_known_cases():
    a = Rect(0, 0, 1, 1, 0)
    assert rects_overlap(a, Rect(1.5, 0, 1, 1, 0))  # overlapping
    assert not rects_overlap(a, Rect(3.0, 0, 1, 1, 0))  # separated
    # Rotated square slotting diagonally between two separated squares.
    assert rects_overlap(a, Rect(1.9, 1.9, 1.5, 1.5, math.pi / 4))


def test_parse_control_formats():
    assert parse_control("throttle=0.5, steering=-0.2") == (0.5, -0.2)
    assert parse_control("steering: -0.2 throttle: 0.5") == (0.5, -0.2)
    assert parse_control("0.5 -0.2") == (0.5, -0.2)
    assert parse_control("0.5") is None
    assert parse_control("fast please") is None


def test_scene_generation_valid_over_seeds():
    for seed in range(30):
        scene = generate_scene(np.random.default_rng(seed))
        ego = scene.start
        assert abs(ego.y) <= 2.0 and ego.speed == 0.0
        gx, gy, gh = scene.goal
        assert abs(gh) == pytest.approx(math.pi / 2)
        names = {name for _, name in scene.obstacles}
        assert "the north wall" in names


def test_fp_unsupported_at_make_time():
    with pytest.raises(lf.UnsupportedFeedbackTypeError):
        lf.make(
            lf.EnvConfig(env_id="parking", feedback=FeedbackSelector.of(AtomicFeedbackType.FP))
        )


def test_success_when_parked_at_goal():
    env = lf.make(lf.EnvConfig(env_id="parking", seed=0))
    env.reset()
    # Teleport the car into the goal pose at rest; the next gentle step
    # must report success.
    gx, gy, gh = env.scene.goal
    env.state = VehicleState(x=gx, y=gy - 0.05, heading=gh, speed=0.0)
    out = env.step("throttle=0.0, steering=0.0")
    assert out.terminated and out.info["success"]


def test_collision_terminates_and_names_obstacle():
    env = lf.make(lf.EnvConfig(env_id="parking", seed=1))
    env.reset()
    # Drive straight at full throttle long enough to hit the east wall.
    out = None
    for _ in range(env.horizon):
        out = env.step("throttle=1.0, steering=0.0")
        if out.done:
            break
    assert out is not None and out.terminated
    assert out.info["collision"] is not None
    assert out.reward < -90  # collision cost dominates
    hn = out.info["feedback_pieces"]["hn"]
    assert "wall" in hn or "parked car" in hn


def test_malformed_control_consumes_step():
    env = lf.make(lf.EnvConfig(env_id="parking", seed=2))
    env.reset()
    out = env.step("steer hard!")
    assert out.info["malformed"] is True
    assert "hn" in out.info["feedback_pieces"]
    assert env.step_count == 1


def test_clamp_notes_out_of_range_inputs():
    env = lf.make(lf.EnvConfig(env_id="parking", seed=3))
    env.reset()
    out = env.step("throttle=5.0, steering=2.0")
    assert out.info["clamped"] is True


def test_hp_iff_distance_decreased_random_episodes():
    rng = np.random.default_rng(6)
    for episode in range(50):
        env = lf.make(lf.EnvConfig(env_id="parking", seed=1000 + episode))
        env.reset()
        prev = env.prev_distance
        for _ in range(20):
            out = env.step(env.sample_action(rng))
            pieces = out.info["feedback_pieces"]
            decreased = out.info["distance"] < prev
            assert ("hp" in pieces) == decreased, episode
            assert out.info["distance_decreased"] == decreased
            prev = out.info["distance"]
            if out.done:
                break


def test_truncation_at_horizon_100():
    env = lf.make(lf.EnvConfig(env_id="parking", seed=4))
    env.reset()
    out = None
    for _ in range(100):
        out = env.step("throttle=0.0, steering=0.0")
        if out.done:
            break
    assert out is not None and out.truncated and env.step_count == 100

"""Goal-conditioned parking: steer a kinematic-bicycle car into a target spot.

The lot has two rows of spots; a random subset of the non-goal spots holds
parked cars, and thin walls fence the lot.  Feedback is limited to current
performance and hindsight (no future suggestions): distance-to-goal progress
and collision reports.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..core import (
    AtomicFeedbackType,
    EnvConfig,
    Environment,
    FeedbackSet,
    InstructionType,
    register_env,
)
from ..templates import default_bank

WHEELBASE = 2.5  # m
DT = 0.1  # s per step
ACCEL = 4.0  # m/s^2 at full throttle
V_MAX = 5.0  # m/s
STEER_MAX = 0.6  # rad
FRICTION = 0.1  # fraction of speed lost per step

CAR_HALF_LENGTH = 2.0
CAR_HALF_WIDTH = 0.9

POS_TOL = 0.5  # m
HEADING_TOL = 0.2  # rad
SPEED_TOL = 0.2  # m/s

W_POSITION = 1.0
W_HEADING = 0.5
COLLISION_COST = 100.0

LOT_HALF_X = 20.0
LOT_HALF_Y = 10.0
SPOT_WIDTH = 3.0
SPOTS_PER_ROW = 10
ROW_Y = 7.5
OCCUPANCY = 0.5


class NonFiniteActionError(ValueError):
    """Control input contains NaN or infinity."""


def wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2 * math.pi)
    if wrapped <= 0:
        wrapped += 2 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    heading: float  # rad, wrapped to (-pi, pi]
    speed: float  # m/s, |speed| <= V_MAX

    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


def integrate(state: VehicleState, throttle: float, steering: float, dt: float = DT) -> VehicleState:
    """One kinematic-bicycle update with linear friction.

    speed <- clamp((1 - FRICTION) * speed + throttle * ACCEL * dt)
    heading <- heading + (speed / WHEELBASE) * tan(steering) * dt
    position <- position + speed * dt * (cos(heading), sin(heading))
    """
    if not (math.isfinite(throttle) and math.isfinite(steering)):
        raise NonFiniteActionError(f"non-finite control ({throttle}, {steering})")
    throttle = min(max(throttle, -1.0), 1.0)
    steering = min(max(steering, -STEER_MAX), STEER_MAX)
    speed = (1.0 - FRICTION) * state.speed + throttle * ACCEL * dt
    speed = min(max(speed, -V_MAX), V_MAX)
    heading = wrap_angle(state.heading + (speed / WHEELBASE) * math.tan(steering) * dt)
    x = state.x + speed * dt * math.cos(heading)
    y = state.y + speed * dt * math.sin(heading)
    return VehicleState(x=x, y=y, heading=heading, speed=speed)


@dataclass(frozen=True)
class Rect:
    """Oriented rectangle: half_length along its angle, half_width across."""

    cx: float
    cy: float
    half_length: float
    half_width: float
    angle: float

    def axes(self) -> np.ndarray:
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, s], [-s, c]])

    def corners(self) -> np.ndarray:
        u, w = self.axes()
        center = np.array([self.cx, self.cy])
        return np.array(
            [
                center + du * self.half_length * u + dw * self.half_width * w
                for du, dw in ((1, 1), (1, -1), (-1, -1), (-1, 1))
            ]
        )


def rects_overlap(a: Rect, b: Rect) -> bool:
    """Separating-axis test for two oriented rectangles."""
    corners_a = a.corners()
    corners_b = b.corners()
    for axis in np.vstack([a.axes(), b.axes()]):
        proj_a = corners_a @ axis
        proj_b = corners_b @ axis
        if proj_a.max() < proj_b.min() or proj_b.max() < proj_a.min():
            return False
    return True


def vehicle_rect(state: VehicleState) -> Rect:
    return Rect(state.x, state.y, CAR_HALF_LENGTH, CAR_HALF_WIDTH, state.heading)


@dataclass(frozen=True)
class ParkingScene:
    goal: tuple[float, float, float]  # x, y, heading
    obstacles: tuple[tuple[Rect, str], ...]
    start: VehicleState

    def goal_position(self) -> np.ndarray:
        return np.array([self.goal[0], self.goal[1]])


def _wall_rects() -> list[tuple[Rect, str]]:
    t = 0.5
    return [
        (Rect(-LOT_HALF_X - t, 0.0, t, LOT_HALF_Y + 2 * t, 0.0), "the west wall"),
        (Rect(LOT_HALF_X + t, 0.0, t, LOT_HALF_Y + 2 * t, 0.0), "the east wall"),
        (Rect(0.0, -LOT_HALF_Y - t, LOT_HALF_X + 2 * t, t, 0.0), "the south wall"),
        (Rect(0.0, LOT_HALF_Y + t, LOT_HALF_X + 2 * t, t, 0.0), "the north wall"),
    ]


def generate_scene(rng: np.random.Generator) -> ParkingScene:
    """Two rows of spots, one goal spot, parked cars in a random subset."""
    spot_xs = [(-SPOTS_PER_ROW / 2 + 0.5 + i) * SPOT_WIDTH for i in range(SPOTS_PER_ROW)]
    spots = [(x, ROW_Y, math.pi / 2) for x in spot_xs] + [
        (x, -ROW_Y, -math.pi / 2) for x in spot_xs
    ]
    goal_idx = int(rng.integers(len(spots)))
    goal = spots[goal_idx]

    obstacles = list(_wall_rects())
    for i, (sx, sy, sheading) in enumerate(spots):
        if i == goal_idx:
            continue
        if rng.random() < OCCUPANCY:
            obstacles.append(
                (Rect(sx, sy, CAR_HALF_LENGTH, CAR_HALF_WIDTH, sheading), "a parked car")
            )

    start = VehicleState(
        x=float(rng.uniform(-15.0, 15.0)),
        y=float(rng.uniform(-2.0, 2.0)),
        heading=float(rng.uniform(-0.3, 0.3)),
        speed=0.0,
    )
    ego = vehicle_rect(start)
    for rect, _ in obstacles:
        if rects_overlap(ego, rect):
            raise AssertionError("scene generator placed the car on an obstacle")
    return ParkingScene(goal=goal, obstacles=tuple(obstacles), start=start)


_THROTTLE_RE = re.compile(
    r"throttle\s*[=:]\s*([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)", re.IGNORECASE
)
_STEERING_RE = re.compile(
    r"steering\s*[=:]\s*([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)", re.IGNORECASE
)
_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def parse_control(action: str) -> Optional[tuple[float, float]]:
    """Read (throttle, steering) from labeled (either order) or bare text."""
    m_t, m_s = _THROTTLE_RE.search(action), _STEERING_RE.search(action)
    if m_t and m_s:
        values = [float(m_t.group(1)), float(m_s.group(1))]
    else:
        numbers = _NUMBER_RE.findall(action)
        if len(numbers) != 2:
            return None
        values = [float(n) for n in numbers]
    if not all(math.isfinite(v) for v in values):
        return None
    return values[0], values[1]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class ParkingEnv(Environment):
    """Horizon-100 continuous-control parking task."""

    supported_instruction_types = frozenset({InstructionType.BASIC})
    supported_feedback_types = frozenset(
        {AtomicFeedbackType.R, AtomicFeedbackType.HP, AtomicFeedbackType.HN}
    )
    default_horizon = 100

    def __init__(self, config: EnvConfig):
        super().__init__(config)
        self.env_id = config.env_id
        self.bank = default_bank()
        self.scene: Optional[ParkingScene] = None
        self.state: Optional[VehicleState] = None
        self.prev_distance = 0.0
        self._instruction = ""

    def _render(self, kind: str, event: str, **slots: str) -> str:
        return self.bank.render(
            "parking", kind, event, slots, rng=self.rng, randomize=self.config.randomize_text
        )

    def _begin_episode(self, latent_rng: np.random.Generator) -> tuple[str, str]:
        self.scene = generate_scene(latent_rng)
        self.state = self.scene.start
        self.prev_distance = self._distance()
        self._instruction = self._render("instruction", "basic")
        return self._observation_text(), self._instruction

    def _distance(self) -> float:
        assert self.scene is not None and self.state is not None
        return float(np.linalg.norm(self.state.position() - self.scene.goal_position()))

    def _heading_error(self) -> float:
        assert self.scene is not None and self.state is not None
        return abs(wrap_angle(self.state.heading - self.scene.goal[2]))

    def _observation_text(self) -> str:
        assert self.scene is not None and self.state is not None
        s = self.state
        gx, gy, gh = self.scene.goal
        n_cars = sum(1 for _, name in self.scene.obstacles if name == "a parked car")
        return (
            f"Your car is at ({_fmt(s.x)}, {_fmt(s.y)}) m, heading {_fmt(s.heading)} rad, "
            f"speed {_fmt(s.speed)} m/s. The goal spot is at ({_fmt(gx)}, {_fmt(gy)}) "
            f"with heading {_fmt(gh)} rad. The lot spans x in [-20.00, 20.00] and "
            f"y in [-10.00, 10.00], with {n_cars} parked cars and four walls."
        )

    def _current_instruction(self) -> str:
        return self._instruction

    def _step_impl(
        self, action: str, feedback: FeedbackSet
    ) -> tuple[str, float, bool, dict[str, Any]]:
        assert self.scene is not None and self.state is not None
        control = parse_control(action)
        if control is None:
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "malformed"))
            info = {"malformed": True, "distance": self.prev_distance}
            return self._observation_text(), -W_POSITION * self.prev_distance, False, info

        throttle, steering = control
        was_clamped = abs(throttle) > 1.0 or abs(steering) > STEER_MAX
        self.state = integrate(self.state, throttle, steering)

        distance = self._distance()
        heading_err = self._heading_error()

        ego = vehicle_rect(self.state)
        collided_with = None
        for rect, name in self.scene.obstacles:
            if rects_overlap(ego, rect):
                collided_with = name
                break

        feedback.put(AtomicFeedbackType.R, self._render("r", "distance", distance=_fmt(distance)))
        closer = distance < self.prev_distance
        if closer:
            feedback.put(AtomicFeedbackType.HP, self._render("hp", "closer", distance=_fmt(distance)))
        if collided_with is not None:
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "collision", obstacle=collided_with))
        elif was_clamped:
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "clamped"))
        elif not closer:
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "farther", distance=_fmt(distance)))

        success = (
            collided_with is None
            and distance <= POS_TOL
            and heading_err <= HEADING_TOL
            and abs(self.state.speed) < SPEED_TOL
        )
        reward = -W_POSITION * distance - W_HEADING * heading_err
        if collided_with is not None:
            reward -= COLLISION_COST
        terminated = success or collided_with is not None

        info: dict[str, Any] = {
            "success": success,
            "distance": distance,
            "heading_error": heading_err,
            "speed": self.state.speed,
            "collision": collided_with,
            "distance_decreased": closer,
            "clamped": was_clamped,
        }
        self.prev_distance = distance
        observation = self._observation_text()
        if success:
            observation += " The car is parked in the goal spot."
        elif collided_with is not None:
            observation += f" The car has crashed into {collided_with}."
        return observation, reward, terminated, info

    def sample_action(self, rng: np.random.Generator) -> str:
        throttle = float(rng.uniform(-1, 1))
        steering = float(rng.uniform(-STEER_MAX, STEER_MAX))
        return f"throttle={throttle:.3f}, steering={steering:.3f}"


register_env("parking", ParkingEnv)

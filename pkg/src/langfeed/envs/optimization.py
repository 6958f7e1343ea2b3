"""Loss-minimization over classic 2-D test functions with gradient-based feedback.

The teacher evaluates each proposed point, compares it with the previous
proposal, and verbalizes slope information: hindsight on whether the move
went downhill, and forward advice from the sign of the current gradient.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from ..core import (
    AtomicFeedbackType,
    EnvConfig,
    Environment,
    FeedbackSet,
    register_env,
)
from ..templates import default_bank

GRAD_EPS = 1e-8  # below this, a partial derivative counts as zero
SUCCESS_TOL = 1e-3  # success when f - f_min < tol * (1 + |f_min|)


class NonFiniteInputError(ValueError):
    """Point contains NaN or infinity."""


@dataclass(frozen=True)
class LossFunction:
    """An analytic 2-D test function with its gradient and known minimum."""

    name: str
    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    box: tuple[tuple[float, float], tuple[float, float]]
    minimum_point: tuple[float, float]
    minimum_value: float

    @property
    def dimension(self) -> int:
        return len(self.box)

    def clamp(self, x: np.ndarray) -> np.ndarray:
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        return np.clip(x, lo, hi)


def loss_and_grad(fn: LossFunction, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact value and analytic gradient at a point."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError(f"point contains non-finite values: {x}")
    return float(fn.value(x)), np.asarray(fn.gradient(x), dtype=float)


# -- the catalogue -----------------------------------------------------------


def _sphere_v(x: np.ndarray) -> float:
    return float(x[0] ** 2 + x[1] ** 2)


def _sphere_g(x: np.ndarray) -> np.ndarray:
    return np.array([2.0 * x[0], 2.0 * x[1]])


def _booth_v(x: np.ndarray) -> float:
    return float((x[0] + 2 * x[1] - 7) ** 2 + (2 * x[0] + x[1] - 5) ** 2)


def _booth_g(x: np.ndarray) -> np.ndarray:
    a = x[0] + 2 * x[1] - 7
    b = 2 * x[0] + x[1] - 5
    return np.array([2 * a + 4 * b, 4 * a + 2 * b])


def _matyas_v(x: np.ndarray) -> float:
    return float(0.26 * (x[0] ** 2 + x[1] ** 2) - 0.48 * x[0] * x[1])


def _matyas_g(x: np.ndarray) -> np.ndarray:
    return np.array([0.52 * x[0] - 0.48 * x[1], 0.52 * x[1] - 0.48 * x[0]])


def _rosenbrock_v(x: np.ndarray) -> float:
    return float((1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2)


def _rosenbrock_g(x: np.ndarray) -> np.ndarray:
    return np.array(
        [
            -2 * (1 - x[0]) - 400 * x[0] * (x[1] - x[0] ** 2),
            200 * (x[1] - x[0] ** 2),
        ]
    )


def _bohachevsky_v(x: np.ndarray) -> float:
    return float(
        x[0] ** 2
        + 2 * x[1] ** 2
        - 0.3 * math.cos(3 * math.pi * x[0])
        - 0.4 * math.cos(4 * math.pi * x[1])
        + 0.7
    )


def _bohachevsky_g(x: np.ndarray) -> np.ndarray:
    return np.array(
        [
            2 * x[0] + 0.9 * math.pi * math.sin(3 * math.pi * x[0]),
            4 * x[1] + 1.6 * math.pi * math.sin(4 * math.pi * x[1]),
        ]
    )


def _himmelblau_v(x: np.ndarray) -> float:
    return float((x[0] ** 2 + x[1] - 11) ** 2 + (x[0] + x[1] ** 2 - 7) ** 2)


def _himmelblau_g(x: np.ndarray) -> np.ndarray:
    a = x[0] ** 2 + x[1] - 11
    b = x[0] + x[1] ** 2 - 7
    return np.array([4 * x[0] * a + 2 * b, 2 * a + 4 * x[1] * b])


def _rastrigin_v(x: np.ndarray) -> float:
    return float(
        20
        + x[0] ** 2
        - 10 * math.cos(2 * math.pi * x[0])
        + x[1] ** 2
        - 10 * math.cos(2 * math.pi * x[1])
    )


def _rastrigin_g(x: np.ndarray) -> np.ndarray:
    return np.array(
        [
            2 * x[0] + 20 * math.pi * math.sin(2 * math.pi * x[0]),
            2 * x[1] + 20 * math.pi * math.sin(2 * math.pi * x[1]),
        ]
    )


def _ackley_v(x: np.ndarray) -> float:
    s = math.sqrt((x[0] ** 2 + x[1] ** 2) / 2.0)
    c = (math.cos(2 * math.pi * x[0]) + math.cos(2 * math.pi * x[1])) / 2.0
    return float(-20.0 * math.exp(-0.2 * s) - math.exp(c) + 20.0 + math.e)


def _ackley_g(x: np.ndarray) -> np.ndarray:
    s = math.sqrt((x[0] ** 2 + x[1] ** 2) / 2.0)
    c = (math.cos(2 * math.pi * x[0]) + math.cos(2 * math.pi * x[1])) / 2.0
    ec = math.exp(c)
    if s == 0.0:
        return np.zeros(2)
    common = 2.0 * math.exp(-0.2 * s) / s
    return np.array(
        [
            common * x[0] + math.pi * math.sin(2 * math.pi * x[0]) * ec,
            common * x[1] + math.pi * math.sin(2 * math.pi * x[1]) * ec,
        ]
    )


def _box(half_width: float) -> tuple[tuple[float, float], tuple[float, float]]:
    return ((-half_width, half_width), (-half_width, half_width))


FUNCTIONS: dict[str, LossFunction] = {
    fn.name: fn
    for fn in [
        LossFunction("sphere", _sphere_v, _sphere_g, _box(5.12), (0.0, 0.0), 0.0),
        LossFunction("booth", _booth_v, _booth_g, _box(10.0), (1.0, 3.0), 0.0),
        LossFunction("matyas", _matyas_v, _matyas_g, _box(10.0), (0.0, 0.0), 0.0),
        LossFunction("rosenbrock", _rosenbrock_v, _rosenbrock_g, _box(2.048), (1.0, 1.0), 0.0),
        LossFunction("bohachevsky", _bohachevsky_v, _bohachevsky_g, _box(100.0), (0.0, 0.0), 0.0),
        LossFunction("himmelblau", _himmelblau_v, _himmelblau_g, _box(5.0), (3.0, 2.0), 0.0),
        LossFunction("rastrigin", _rastrigin_v, _rastrigin_g, _box(5.12), (0.0, 0.0), 0.0),
        LossFunction("ackley", _ackley_v, _ackley_g, _box(32.768), (0.0, 0.0), 0.0),
    ]
}

CONVEX_FUNCTIONS = ("sphere", "booth", "matyas")

_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def parse_point(action: str, dimension: int) -> Optional[np.ndarray]:
    """Extract exactly ``dimension`` finite decimal numbers from text."""
    numbers = _NUMBER_RE.findall(action)
    if len(numbers) != dimension:
        return None
    try:
        values = np.array([float(n) for n in numbers])
    except ValueError:
        return None
    if not np.all(np.isfinite(values)):
        return None
    return values


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _point_text(x: np.ndarray) -> str:
    return f"({_fmt(x[0])}, {_fmt(x[1])})"


def slope_bucket(grad: np.ndarray) -> str:
    m = float(np.max(np.abs(grad)))
    if m < 1e-3:
        return "flat"
    if m < 1.0:
        return "gentle"
    return "steep"


def direction_word(partial: float) -> str:
    """The helpful move for one coordinate given its partial derivative."""
    if partial > GRAD_EPS:
        return "decrease"
    if partial < -GRAD_EPS:
        return "increase"
    return "hold"


class OptimizationEnv(Environment):
    """Sequential point proposals against one catalogue function."""

    default_horizon = 10

    def __init__(self, config: EnvConfig, fn: LossFunction):
        super().__init__(config)
        self.env_id = config.env_id
        self.fn = fn
        self.bank = default_bank()
        self._instruction = ""
        self.x_prev: Optional[np.ndarray] = None
        self.x_curr: Optional[np.ndarray] = None
        self.f_prev: float = math.inf
        self.f_curr: float = math.inf
        self.best_f: float = math.inf
        self.n_proposals = 0

    def _render(self, kind: str, event: str, **slots: str) -> str:
        return self.bank.render(
            "optimization", kind, event, slots, rng=self.rng, randomize=self.config.randomize_text
        )

    def _begin_episode(self, latent_rng: np.random.Generator) -> tuple[str, str]:
        lo = np.array([b[0] for b in self.fn.box])
        hi = np.array([b[1] for b in self.fn.box])
        self.x_curr = lo + (hi - lo) * latent_rng.random(self.fn.dimension)
        self.x_prev = None
        self.f_curr, _ = loss_and_grad(self.fn, self.x_curr)
        self.f_prev = math.inf
        self.best_f = self.f_curr
        self.n_proposals = 0
        self._instruction = self._render(
            "instruction", "basic", low=_fmt(float(lo[0])), high=_fmt(float(hi[0]))
        )
        return self._observation_text(), self._instruction

    def _observation_text(self) -> str:
        assert self.x_curr is not None
        return (
            f"Current point: x = {_point_text(self.x_curr)}. "
            f"Loss there: {_fmt(self.f_curr)}. Best loss so far: {_fmt(self.best_f)}."
        )

    def _current_instruction(self) -> str:
        return self._instruction

    def _hindsight_commentary(self, delta: np.ndarray, grad_prev: np.ndarray) -> str:
        clauses = []
        for i, name in enumerate(("x", "y")):
            if abs(grad_prev[i]) <= GRAD_EPS:
                clauses.append(f"the slope along {name} was negligible")
            elif delta[i] == 0:
                clauses.append(f"you held {name} fixed")
            elif delta[i] * grad_prev[i] < 0:
                clauses.append(f"your {name} move pointed downhill")
            else:
                clauses.append(f"your {name} move pointed uphill")
        return "; ".join(clauses).capitalize() + "."

    def _step_impl(
        self, action: str, feedback: FeedbackSet
    ) -> tuple[str, float, bool, dict[str, Any]]:
        assert self.x_curr is not None
        proposal = parse_point(action, self.fn.dimension)
        if proposal is None:
            feedback.put(
                AtomicFeedbackType.HN,
                self._render("hn", "malformed", count=str(self.fn.dimension)),
            )
            info = {"malformed": True, "f": self.f_curr, "best_f": self.best_f}
            return self._observation_text(), -self.f_curr, False, info

        clamped = self.fn.clamp(proposal)
        was_clamped = bool(np.any(clamped != proposal))

        first_proposal = self.n_proposals == 0
        self.n_proposals += 1
        grad_prev = None
        if not first_proposal:
            # Gradient at the previous proposal, for hindsight commentary.
            _, grad_prev = loss_and_grad(self.fn, self.x_curr)
        prev_point = self.x_curr
        prev_f = self.f_curr

        self.x_prev = None if first_proposal else prev_point
        self.f_prev = prev_f
        self.x_curr = clamped
        self.f_curr, grad_curr = loss_and_grad(self.fn, clamped)
        self.best_f = min(self.best_f, self.f_curr)

        feedback.put(AtomicFeedbackType.R, self._render("r", "value", value=_fmt(self.f_curr)))

        if was_clamped:
            feedback.put(
                AtomicFeedbackType.HN,
                self._render("hn", "clamped", point=_point_text(clamped)),
            )
        if not first_proposal and grad_prev is not None:
            commentary = self._hindsight_commentary(clamped - prev_point, grad_prev)
            if self.f_curr < prev_f:
                feedback.put(
                    AtomicFeedbackType.HP, self._render("hp", "improved", commentary=commentary)
                )
            elif AtomicFeedbackType.HN not in feedback:
                feedback.put(
                    AtomicFeedbackType.HN, self._render("hn", "worsened", commentary=commentary)
                )

        if np.all(np.abs(grad_curr) <= GRAD_EPS):
            feedback.put(
                AtomicFeedbackType.FP,
                self._render("fp", "at_minimum", value=_fmt(self.f_curr)),
            )
        else:
            feedback.put(
                AtomicFeedbackType.FP,
                self._render(
                    "fp",
                    "direction",
                    dir_x=direction_word(grad_curr[0]),
                    dir_y=direction_word(grad_curr[1]),
                    slope=slope_bucket(grad_curr),
                ),
            )
            bad_moves = []
            for i, name in enumerate(("x", "y")):
                if grad_curr[i] > GRAD_EPS:
                    bad_moves.append(f"increasing {name}")
                elif grad_curr[i] < -GRAD_EPS:
                    bad_moves.append(f"decreasing {name}")
            feedback.put(
                AtomicFeedbackType.FN, self._render("fn", "direction", moves=" or ".join(bad_moves))
            )

        success = self.f_curr - self.fn.minimum_value < SUCCESS_TOL * (
            1 + abs(self.fn.minimum_value)
        )
        info: dict[str, Any] = {
            "success": success,
            "x": [float(v) for v in clamped],
            "f": self.f_curr,
            "gradient": [float(g) for g in grad_curr],
            "best_f": self.best_f,
            "clamped": was_clamped,
            "function": self.fn.name,
        }
        return self._observation_text(), -self.f_curr, success, info

    def sample_action(self, rng: np.random.Generator) -> str:
        lo = np.array([b[0] for b in self.fn.box])
        hi = np.array([b[1] for b in self.fn.box])
        point = lo + (hi - lo) * rng.random(self.fn.dimension)
        return f"{_fmt(point[0])}, {_fmt(point[1])}"


def _register() -> None:
    def factory_for(name: str) -> Any:
        return lambda config: OptimizationEnv(config, FUNCTIONS[name])

    register_env("optimization", factory_for("rosenbrock"))
    for name in FUNCTIONS:
        register_env(f"optimization/{name}", factory_for(name))


_register()

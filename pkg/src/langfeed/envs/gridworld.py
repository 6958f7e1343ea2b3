"""Graph-based room navigation toward a treasure room.

Rooms sit on a grid skeleton; doors are lattice edges labeled north, south,
east, west consistently at both ends.  Transitions are deterministic; walking
into a missing door bounces.  All five feedback channels are supported, with
future suggestions derived from true shortest-path distances.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
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

DIRECTIONS = ("north", "south", "east", "west")
_OFFSETS = {"north": (0, 1), "south": (0, -1), "east": (1, 0), "west": (-1, 0)}
_OPPOSITE = {"north": "south", "south": "north", "east": "west", "west": "east"}

_ROOM_ADJECTIVES = (
    "oak", "marble", "ivy", "copper", "amber", "dusty",
    "sunlit", "shadowed", "velvet", "echoing", "narrow", "vaulted",
)
_ROOM_NOUNS = (
    "chamber", "hall", "parlor", "gallery", "cellar", "study",
    "alcove", "landing", "annex", "rotunda", "vestibule", "atrium",
)
_OBJECTS = (
    "a rusty lantern", "a cracked vase", "an oak stool", "a woolen rug",
    "a brass kettle", "a stack of books", "a wilted fern", "a stone figurine",
    "a tin whistle", "a patched quilt", "a clay jug", "a knotted rope",
)
TREASURE_OBJECT = "the treasure"


class InfeasibleConfigError(ValueError):
    """Requested graph shape cannot be generated."""


@dataclass
class RoomGraph:
    """Rooms on grid cells, doors as labeled lattice edges."""

    names: list[str]
    cells: list[tuple[int, int]]
    doors: list[dict[str, int]]  # room index -> direction -> room index
    objects: list[list[str]] = field(default_factory=list)
    start_room: int = 0
    treasure_room: int = 0

    @property
    def n_rooms(self) -> int:
        return len(self.cells)

    def distances_to(self, target: int) -> list[int]:
        """BFS distance from every room to ``target`` (unreachable = -1)."""
        dist = [-1] * self.n_rooms
        dist[target] = 0
        queue = deque([target])
        while queue:
            room = queue.popleft()
            for neighbor in self.doors[room].values():
                if dist[neighbor] == -1:
                    dist[neighbor] = dist[room] + 1
                    queue.append(neighbor)
        return dist

    def door_directions(self, room: int) -> list[str]:
        return [d for d in DIRECTIONS if d in self.doors[room]]


def _grow_polyomino(rng: np.random.Generator, n_cells: int) -> list[tuple[int, int]]:
    cells = {(0, 0)}
    frontier = {(0, 1), (0, -1), (1, 0), (-1, 0)}
    while len(cells) < n_cells:
        options = sorted(frontier)
        pick = options[int(rng.integers(len(options)))]
        cells.add(pick)
        frontier.discard(pick)
        x, y = pick
        for dx, dy in _OFFSETS.values():
            cand = (x + dx, y + dy)
            if cand not in cells:
                frontier.add(cand)
    return sorted(cells)


def generate_graph(
    rng: np.random.Generator,
    n_rooms: int = 12,
    n_objects: int = 6,
    min_treasure_distance: int = 4,
    extra_edge_prob: float = 0.3,
    max_attempts: int = 50,
) -> RoomGraph:
    """Random connected room graph with the treasure far enough from the start."""
    if n_rooms < 2:
        raise InfeasibleConfigError("need at least 2 rooms")
    if min_treasure_distance >= n_rooms:
        raise InfeasibleConfigError(
            f"min_treasure_distance {min_treasure_distance} unreachable with {n_rooms} rooms"
        )

    for _ in range(max_attempts):
        cells = _grow_polyomino(rng, n_rooms)
        index = {cell: i for i, cell in enumerate(cells)}

        lattice_edges = []
        for (x, y), i in index.items():
            for direction in ("north", "east"):  # each undirected edge once
                dx, dy = _OFFSETS[direction]
                j = index.get((x + dx, y + dy))
                if j is not None:
                    lattice_edges.append((i, j, direction))

        # Random spanning tree (shuffled Kruskal), then extra lattice edges.
        order = list(rng.permutation(len(lattice_edges)))
        parent = list(range(n_rooms))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        doors: list[dict[str, int]] = [{} for _ in range(n_rooms)]

        def add_edge(i: int, j: int, direction: str) -> None:
            doors[i][direction] = j
            doors[j][_OPPOSITE[direction]] = i

        skipped = []
        for k in order:
            i, j, direction = lattice_edges[k]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
                add_edge(i, j, direction)
            else:
                skipped.append((i, j, direction))
        for i, j, direction in skipped:
            if rng.random() < extra_edge_prob:
                add_edge(i, j, direction)

        graph = RoomGraph(names=[], cells=cells, doors=doors)

        # Start/treasure pair with enough separation, drawn uniformly.
        candidates = []
        for start in range(n_rooms):
            dist = graph.distances_to(start)
            candidates.extend(
                (start, t) for t, d in enumerate(dist) if d >= min_treasure_distance
            )
        if not candidates:
            continue
        start, treasure = candidates[int(rng.integers(len(candidates)))]

        name_ids = rng.choice(
            len(_ROOM_ADJECTIVES) * len(_ROOM_NOUNS), size=n_rooms, replace=False
        )
        names = [
            f"{_ROOM_ADJECTIVES[int(k) % len(_ROOM_ADJECTIVES)]} "
            f"{_ROOM_NOUNS[int(k) // len(_ROOM_ADJECTIVES)]}"
            for k in name_ids
        ]

        objects: list[list[str]] = [[] for _ in range(n_rooms)]
        for _ in range(n_objects):
            room = int(rng.integers(n_rooms))
            item = _OBJECTS[int(rng.integers(len(_OBJECTS)))]
            if item not in objects[room]:
                objects[room].append(item)
        objects[treasure].append(TREASURE_OBJECT)

        graph.names = names
        graph.objects = objects
        graph.start_room = start
        graph.treasure_room = treasure
        return graph

    raise InfeasibleConfigError(
        f"could not place treasure at distance {min_treasure_distance} "
        f"in {max_attempts} attempts"
    )


def shortest_path_directions(graph: RoomGraph, start: int) -> list[str]:
    """Greedy optimal route: first distance-decreasing door in N/S/E/W order."""
    dist = graph.distances_to(graph.treasure_room)
    path = []
    room = start
    while room != graph.treasure_room:
        for direction in DIRECTIONS:
            neighbor = graph.doors[room].get(direction)
            if neighbor is not None and dist[neighbor] == dist[room] - 1:
                path.append(direction)
                room = neighbor
                break
        else:
            raise AssertionError("treasure unreachable; generator invariant broken")
    return path


class GridworldEnv(Environment):
    """Deterministic room navigation, horizon 20."""

    supported_instruction_types = frozenset(
        {InstructionType.BASIC, InstructionType.PRACTICAL, InstructionType.COMPLETE}
    )
    default_horizon = 20

    def __init__(
        self,
        config: EnvConfig,
        n_rooms: int = 12,
        n_objects: int = 6,
        min_treasure_distance: int = 4,
    ):
        super().__init__(config)
        self.env_id = config.env_id
        self.n_rooms = n_rooms
        self.n_objects = n_objects
        self.min_treasure_distance = min_treasure_distance
        self.bank = default_bank()
        self.graph: Optional[RoomGraph] = None
        self.current_room = 0
        self.visited: set[int] = set()
        self._dist: list[int] = []
        self._base_instruction = ""
        self.feedback_log: list[str] = []

    def _render(self, kind: str, event: str, **slots: str) -> str:
        return self.bank.render(
            "gridworld", kind, event, slots, rng=self.rng, randomize=self.config.randomize_text
        )

    def _begin_episode(self, latent_rng: np.random.Generator) -> tuple[str, str]:
        self.graph = generate_graph(
            latent_rng,
            n_rooms=self.n_rooms,
            n_objects=self.n_objects,
            min_treasure_distance=self.min_treasure_distance,
        )
        self.current_room = self.graph.start_room
        self.visited = {self.current_room}
        self._dist = self.graph.distances_to(self.graph.treasure_room)
        self.feedback_log = []
        self._base_instruction = self._build_base_instruction()
        return self._observation_text(), self._current_instruction()

    def _map_text(self) -> str:
        assert self.graph is not None
        clauses = []
        for room in range(self.graph.n_rooms):
            doors = ", ".join(
                f"{d} to the {self.graph.names[self.graph.doors[room][d]]}"
                for d in self.graph.door_directions(room)
            )
            clauses.append(f"the {self.graph.names[room]} has doors {doors}")
        return "; ".join(clauses) + "."

    def _build_base_instruction(self) -> str:
        assert self.graph is not None
        if self.config.instruction_type is InstructionType.COMPLETE:
            path = ", ".join(shortest_path_directions(self.graph, self.graph.start_room))
            return self._render("instruction", "complete", map=self._map_text(), path=path)
        return self._render("instruction", "basic")

    def _current_instruction(self) -> str:
        if self.config.instruction_type is InstructionType.PRACTICAL:
            log = "\n".join(self.feedback_log) or "(none yet)"
            return self._base_instruction + "\n" + self._render(
                "instruction", "practical_log", log=log
            )
        return self._base_instruction

    def _observation_text(self) -> str:
        assert self.graph is not None
        room = self.current_room
        contents = self.graph.objects[room]
        objects_text = ", ".join(contents) if contents else "nothing of note"
        doors_text = " and ".join(self.graph.door_directions(room))
        return (
            f"You are in the {self.graph.names[room]}. It contains {objects_text}. "
            f"Doors lead {doors_text}."
        )

    def _step_impl(
        self, action: str, feedback: FeedbackSet
    ) -> tuple[str, float, bool, dict[str, Any]]:
        assert self.graph is not None
        direction = action.strip().lower()
        info: dict[str, Any] = {
            "room": self.graph.names[self.current_room],
            "distance_before": self._dist[self.current_room],
        }

        if direction not in DIRECTIONS:
            shown = action.strip()[:40] or "(empty)"
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "malformed", action=shown))
            feedback.put(AtomicFeedbackType.R, self._render("r", "searching", steps=str(self._step_count)))
            self._suggest_future(feedback)
            info.update({"malformed": True, "success": False, "distance_after": self._dist[self.current_room]})
            return self._observation_text(), 0.0, False, info

        prev_room = self.current_room
        prev_dist = self._dist[prev_room]
        bounced = direction not in self.graph.doors[prev_room]
        if not bounced:
            self.current_room = self.graph.doors[prev_room][direction]
            self.visited.add(self.current_room)
        new_dist = self._dist[self.current_room]

        found = self.current_room == self.graph.treasure_room
        reward = 1.0 if found else 0.0

        event = "found" if found else "searching"
        feedback.put(AtomicFeedbackType.R, self._render("r", event, steps=str(self._step_count)))
        if new_dist < prev_dist:
            feedback.put(AtomicFeedbackType.HP, self._render("hp", "closer", direction=direction))
        elif bounced:
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "bounce", direction=direction))
        elif new_dist > prev_dist:
            feedback.put(AtomicFeedbackType.HN, self._render("hn", "farther", direction=direction))
        if not found:
            self._suggest_future(feedback)

        info.update(
            {
                "success": found,
                "bounced": bounced,
                "moved_to": self.graph.names[self.current_room],
                "distance_after": new_dist,
                "action_direction": direction,
            }
        )
        return self._observation_text(), reward, found, info

    def _suggest_future(self, feedback: FeedbackSet) -> None:
        """fp: a door on a shortest path; fn: a door that bounces or regresses."""
        assert self.graph is not None
        room = self.current_room
        dist_here = self._dist[room]
        for direction in DIRECTIONS:
            neighbor = self.graph.doors[room].get(direction)
            if neighbor is not None and self._dist[neighbor] == dist_here - 1:
                feedback.put(AtomicFeedbackType.FP, self._render("fp", "suggest", direction=direction))
                break
        for direction in DIRECTIONS:
            neighbor = self.graph.doors[room].get(direction)
            if neighbor is None or self._dist[neighbor] > dist_here:
                feedback.put(AtomicFeedbackType.FN, self._render("fn", "avoid", direction=direction))
                break

    def _record_feedback(self, rendered: str) -> None:
        if rendered:
            self.feedback_log.append(rendered)

    def sample_action(self, rng: np.random.Generator) -> str:
        return DIRECTIONS[int(rng.integers(len(DIRECTIONS)))]


register_env("gridworld", GridworldEnv)

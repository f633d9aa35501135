"""Seeded, reflection-symmetric map generation and map (de)serialization.

Maps are generated by filling one half of the board with Poisson-disk-spaced
resource clusters plus one spawn, then mirroring across a reflection axis
chosen from the seed.  The mirror guarantees fairness: both teams see an
identical half.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .rules import (
    COAL,
    DEFAULT_MAP_SIZES,
    OVERSIZE_MAP_SIZES,
    RESOURCES,
    URANIUM,
    WOOD,
)

MAP_FORMAT_VERSION = 1

AXIS_VERTICAL = "vertical"  # mirror x -> width-1-x
AXIS_HORIZONTAL = "horizontal"  # mirror y -> height-1-y


class MapError(ValueError):
    """Raised for invalid map configuration or malformed map documents."""


@dataclass(frozen=True)
class MapGenConfig:
    seed: int = 0
    size: int = 12
    allow_oversize: bool = False
    # Cluster counts per half-map; None derives a size-scaled default.
    wood_clusters: int | None = None
    coal_clusters: int | None = None
    uranium_clusters: int | None = None
    cluster_radius: int = 2
    amount_ranges: dict = field(
        default_factory=lambda: {
            WOOD: (300, 500),
            COAL: (350, 450),
            URANIUM: (300, 350),
        }
    )

    def valid_sizes(self) -> tuple[int, ...]:
        if self.allow_oversize:
            return DEFAULT_MAP_SIZES + OVERSIZE_MAP_SIZES
        return DEFAULT_MAP_SIZES

    def cluster_counts(self) -> dict:
        scale = self.size // 12
        return {
            WOOD: self.wood_clusters if self.wood_clusters is not None else max(2, 2 * scale),
            COAL: self.coal_clusters if self.coal_clusters is not None else max(1, scale),
            URANIUM: self.uranium_clusters
            if self.uranium_clusters is not None
            else max(1, scale // 2),
        }


@dataclass
class GameMap:
    width: int
    height: int
    axis: str
    # (x, y) -> (kind, amount)
    resources: dict
    # [(team, x, y)] — one CityTile with a Worker on it per team
    spawns: list

    def mirror(self, x: int, y: int) -> tuple[int, int]:
        if self.axis == AXIS_VERTICAL:
            return (self.width - 1 - x, y)
        return (x, self.height - 1 - y)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GameMap):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.axis == other.axis
            and self.resources == other.resources
            and sorted(self.spawns) == sorted(other.spawns)
        )


def _place_cluster(rng, cells, half, kind, radius, amount_range, occupied):
    """Scatter one resource cluster around a random free center in `half`."""
    for _ in range(200):
        cx, cy = half[rng.randrange(len(half))]
        if (cx, cy) not in occupied:
            break
    else:
        return
    lo, hi = amount_range
    half_set = set(half)
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            x, y = cx + dx, cy + dy
            if (x, y) not in half_set or (x, y) in occupied:
                continue
            dist = abs(dx) + abs(dy)
            if dist > radius:
                continue
            # Denser near the center, thinning toward the rim.
            if rng.random() < 1.0 - 0.3 * dist / max(radius, 1):
                cells[(x, y)] = (kind, rng.randint(lo, hi))
                occupied.add((x, y))


def generate_map(config: MapGenConfig) -> GameMap:
    """Deterministically generate a symmetric map from the config."""
    size = config.size
    if size not in config.valid_sizes():
        raise MapError(
            f"unsupported map size {size}; allowed: {config.valid_sizes()}"
        )
    rng = random.Random(config.seed)
    axis = rng.choice((AXIS_VERTICAL, AXIS_HORIZONTAL))
    if axis == AXIS_VERTICAL:
        half = [(x, y) for y in range(size) for x in range(size // 2)]
    else:
        half = [(x, y) for y in range(size // 2) for x in range(size)]

    counts = config.cluster_counts()
    half_cells: dict = {}
    occupied: set = set()
    # Poisson-disk-ish spacing: cluster centers keep clear of existing cells
    # because _place_cluster skips occupied cells and retries centers.
    for kind in (WOOD, COAL, URANIUM):
        for _ in range(counts[kind]):
            _place_cluster(
                rng,
                half_cells,
                half,
                kind,
                config.cluster_radius,
                config.amount_ranges[kind],
                occupied,
            )
    if not any(kind == WOOD for kind, _ in half_cells.values()):
        raise MapError("density parameters produced a map with no wood")

    # Spawn next to wood so the starting Worker can collect immediately.
    wood_cells = [pos for pos, (kind, _) in half_cells.items() if kind == WOOD]
    candidates = []
    half_set = set(half)
    for (x, y) in wood_cells:
        for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):
            pos = (x + dx, y + dy)
            if pos in half_set and pos not in occupied:
                candidates.append(pos)
    if not candidates:
        # Degenerate density config: free any one wood-adjacent cell.
        sx, sy = wood_cells[0]
        del half_cells[(sx, sy)]
        spawn = (sx, sy)
    else:
        candidates.sort(key=lambda p: (p[1], p[0]))
        spawn = candidates[rng.randrange(len(candidates))]

    game_map = GameMap(size, size, axis, {}, [])
    for (x, y), (kind, amount) in half_cells.items():
        game_map.resources[(x, y)] = (kind, amount)
        mx, my = game_map.mirror(x, y)
        game_map.resources[(mx, my)] = (kind, amount)
    msx, msy = game_map.mirror(*spawn)
    game_map.spawns = [(0, spawn[0], spawn[1]), (1, msx, msy)]
    return game_map


def serialize_map(game_map: GameMap) -> str:
    """Canonical, byte-stable JSON document for a map."""
    resources = [
        {"kind": kind, "x": x, "y": y, "amount": amount}
        for (x, y), (kind, amount) in sorted(
            game_map.resources.items(), key=lambda item: (item[0][1], item[0][0])
        )
    ]
    doc = {
        "version": MAP_FORMAT_VERSION,
        "size": game_map.width,
        "axis": game_map.axis,
        "spawns": [
            {"team": "AB"[team], "x": x, "y": y}
            for team, x, y in sorted(game_map.spawns)
        ],
        "resources": resources,
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def parse_map(text: str, allow_oversize: bool = False) -> GameMap:
    """Parse and validate a serialized map document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MapError(f"malformed map document at line {exc.lineno}: {exc.msg}")
    for key in ("version", "size", "axis", "spawns", "resources"):
        if key not in doc:
            raise MapError(f"map document missing field: {key}")
    if doc["version"] != MAP_FORMAT_VERSION:
        raise MapError(f"unsupported map format version {doc['version']}")
    size = doc["size"]
    allowed = DEFAULT_MAP_SIZES + (OVERSIZE_MAP_SIZES if allow_oversize else ())
    if size not in allowed:
        raise MapError(f"invalid map size: {size}")
    axis = doc["axis"]
    if axis not in (AXIS_VERTICAL, AXIS_HORIZONTAL):
        raise MapError(f"invalid axis: {axis}")

    game_map = GameMap(size, size, axis, {}, [])
    for entry in doc["resources"]:
        kind, x, y, amount = entry["kind"], entry["x"], entry["y"], entry["amount"]
        if kind not in RESOURCES:
            raise MapError(f"unknown resource kind: {kind}")
        if not (0 <= x < size and 0 <= y < size):
            raise MapError(f"resource out of bounds: ({x},{y})")
        if not isinstance(amount, int) or amount < 1:
            raise MapError(f"out-of-range amount at ({x},{y}): {amount}")
        if (x, y) in game_map.resources:
            raise MapError(f"duplicate resource cell: ({x},{y})")
        game_map.resources[(x, y)] = (kind, amount)

    if len(doc["spawns"]) != 2:
        raise MapError("map must have exactly two spawns")
    for entry in doc["spawns"]:
        team, x, y = entry["team"], entry["x"], entry["y"]
        if team not in ("A", "B"):
            raise MapError(f"invalid spawn team: {team}")
        if not (0 <= x < size and 0 <= y < size):
            raise MapError(f"spawn out of bounds: ({x},{y})")
        if (x, y) in game_map.resources:
            raise MapError(f"spawn on a resource cell: ({x},{y})")
        game_map.spawns.append(("AB".index(team), x, y))
    if {t for t, _, _ in game_map.spawns} != {0, 1}:
        raise MapError("spawns must cover both teams")

    # Symmetry validation.
    for (x, y), (kind, amount) in game_map.resources.items():
        mpos = game_map.mirror(x, y)
        if game_map.resources.get(mpos) != (kind, amount):
            raise MapError(
                f"symmetry violation: resource at ({x},{y}) has no equal mirror"
            )
    (ta, ax, ay), (tb, bx, by) = sorted(game_map.spawns)
    if game_map.mirror(ax, ay) != (bx, by):
        raise MapError("symmetry violation: spawns are not mirrored")
    return game_map

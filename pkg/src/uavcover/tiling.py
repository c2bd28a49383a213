"""Wang-tile square and corridor problems with exact decision procedures.

Conventions: a tiling is a tuple of rows listed bottom to top, each row a tuple
of tile indices from left to right.  Colour ``0`` is white.  Square boundary
sequences are colours: ``top[j]``/``bottom[j]`` per column, ``left[i]``/``right[i]``
per row (bottom to top).  Corridor rows must have white outer edges on every row.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

__all__ = [
    "WHITE",
    "Tile",
    "SquareInstance",
    "CorridorInstance",
    "TilingSolution",
    "TilingFormatError",
    "check_square_tiling",
    "check_corridor_tiling",
    "solve_square_tiling",
    "solve_corridor_tiling",
    "enumerate_rows",
    "tiling_to_dict",
    "parse_tiling_instance",
    "serialize_tiling_instance",
]

WHITE = 0


class Tile(NamedTuple):
    left: int
    up: int
    right: int
    down: int


class TilingFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SquareInstance:
    tiles: tuple[Tile, ...]
    k: int
    top: tuple[int, ...]
    bottom: tuple[int, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for name in ("top", "bottom", "left", "right"):
            if len(getattr(self, name)) != self.k:
                raise ValueError(f"{name} must have length k={self.k}")


@dataclass(frozen=True)
class CorridorInstance:
    tiles: tuple[Tile, ...]
    k: int
    top_row: tuple[int, ...]
    bottom_row: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for name in ("top_row", "bottom_row"):
            row = getattr(self, name)
            if len(row) != self.k:
                raise ValueError(f"{name} must have length k={self.k}")
            for t in row:
                if not 0 <= t < len(self.tiles):
                    raise ValueError(f"{name} references unknown tile {t}")


@dataclass(frozen=True)
class TilingSolution:
    rows: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.rows)

    def at(self, row: int, col: int) -> int:
        """Tile index at 1-based ``(row, col)``, rows counted from the bottom."""
        return self.rows[row - 1][col - 1]


# -- independent constraint checkers ------------------------------------------


def _grid_violations(tiles: Sequence[Tile], rows) -> list[str]:
    out = []
    for r, row in enumerate(rows):
        for c, t in enumerate(row):
            if not 0 <= t < len(tiles):
                out.append(f"unknown tile {t} at ({r + 1},{c + 1})")
    if out:
        return out
    for r, row in enumerate(rows):
        for c in range(len(row) - 1):
            if tiles[row[c]].right != tiles[row[c + 1]].left:
                out.append(f"(h) fails between ({r + 1},{c + 1}) and ({r + 1},{c + 2})")
    for r in range(len(rows) - 1):
        for c in range(len(rows[r])):
            if tiles[rows[r][c]].up != tiles[rows[r + 1][c]].down:
                out.append(f"(v) fails between ({r + 1},{c + 1}) and ({r + 2},{c + 1})")
    return out


def check_square_tiling(inst: SquareInstance, sol: TilingSolution) -> list[str]:
    k, T = inst.k, inst.tiles
    if sol.m != k or any(len(r) != k for r in sol.rows):
        return [f"tiling is not {k}x{k}"]
    out = _grid_violations(T, sol.rows)
    if out:
        return out
    for j in range(k):
        if T[sol.rows[-1][j]].up != inst.top[j]:
            out.append(f"top boundary fails at column {j + 1}")
        if T[sol.rows[0][j]].down != inst.bottom[j]:
            out.append(f"bottom boundary fails at column {j + 1}")
    for i in range(k):
        if T[sol.rows[i][0]].left != inst.left[i]:
            out.append(f"left boundary fails at row {i + 1}")
        if T[sol.rows[i][-1]].right != inst.right[i]:
            out.append(f"right boundary fails at row {i + 1}")
    return out


def check_corridor_tiling(inst: CorridorInstance, sol: TilingSolution) -> list[str]:
    if sol.m < 1 or any(len(r) != inst.k for r in sol.rows):
        return [f"tiling rows must have width {inst.k}"]
    T = inst.tiles
    out = _grid_violations(T, sol.rows)
    if out:
        return out
    if tuple(sol.rows[0]) != tuple(inst.bottom_row):
        out.append("first row differs from the bottom row")
    if tuple(sol.rows[-1]) != tuple(inst.top_row):
        out.append("last row differs from the top row")
    for r, row in enumerate(sol.rows):
        if T[row[0]].left != WHITE or T[row[-1]].right != WHITE:
            out.append(f"row {r + 1} has a non-white outer edge")
    return out


# -- square: backtracking ------------------------------------------------------


def solve_square_tiling(inst: SquareInstance) -> TilingSolution | None:
    """Column-major backtracking; each placement is checked against placed neighbours and boundaries."""
    k, T = inst.k, inst.tiles
    grid = [[-1] * k for _ in range(k)]
    cells = [(r, c) for c in range(k) for r in range(k)]

    def fits(t: Tile, r: int, c: int) -> bool:
        if r == 0 and t.down != inst.bottom[c]:
            return False
        if r == k - 1 and t.up != inst.top[c]:
            return False
        if c == 0 and t.left != inst.left[r]:
            return False
        if c == k - 1 and t.right != inst.right[r]:
            return False
        if r > 0 and T[grid[r - 1][c]].up != t.down:
            return False
        if c > 0 and T[grid[r][c - 1]].right != t.left:
            return False
        return True

    def place(i: int) -> bool:
        if i == len(cells):
            return True
        r, c = cells[i]
        for idx, t in enumerate(T):
            if fits(t, r, c):
                grid[r][c] = idx
                if place(i + 1):
                    return True
        grid[r][c] = -1
        return False

    if place(0):
        return TilingSolution(tuple(tuple(row) for row in grid))
    return None


# -- corridor: BFS over rows ----------------------------------------------------


def _row_ok(T: Sequence[Tile], row: Sequence[int]) -> bool:
    if T[row[0]].left != WHITE or T[row[-1]].right != WHITE:
        return False
    return all(T[a].right == T[b].left for a, b in zip(row, row[1:]))


def _rows_with(inst: CorridorInstance, allowed) -> list[tuple[int, ...]]:
    """Rows satisfying (h) and white outer edges, column ``j`` drawn from ``allowed(j)``."""
    T, k = inst.tiles, inst.k
    out: list[tuple[int, ...]] = []
    row: list[int] = []

    def extend(j: int) -> None:
        if j == k:
            out.append(tuple(row))
            return
        for idx in allowed(j):
            t = T[idx]
            if j == 0 and t.left != WHITE:
                continue
            if j > 0 and T[row[-1]].right != t.left:
                continue
            if j == k - 1 and t.right != WHITE:
                continue
            row.append(idx)
            extend(j + 1)
            row.pop()

    extend(0)
    return out


def enumerate_rows(inst: CorridorInstance) -> list[tuple[int, ...]]:
    """All admissible rows in lexicographic order of tile indices."""
    everything = range(len(inst.tiles))
    return _rows_with(inst, lambda j: everything)


def solve_corridor_tiling(inst: CorridorInstance) -> TilingSolution | None:
    """Shortest corridor tiling by BFS from the bottom row to the top row."""
    T = inst.tiles
    start, goal = tuple(inst.bottom_row), tuple(inst.top_row)
    if not _row_ok(T, start) or not _row_ok(T, goal):
        return None
    by_down: dict[int, list[int]] = {}
    for idx, t in enumerate(T):
        by_down.setdefault(t.down, []).append(idx)
    parent: dict[tuple[int, ...], tuple[int, ...] | None] = {start: None}
    queue = deque([start])
    while queue:
        row = queue.popleft()
        if row == goal:
            rows = []
            cur: tuple[int, ...] | None = row
            while cur is not None:
                rows.append(cur)
                cur = parent[cur]
            return TilingSolution(tuple(reversed(rows)))
        for nxt in _rows_with(inst, lambda j: by_down.get(T[row[j]].up, ())):
            if nxt not in parent:
                parent[nxt] = row
                queue.append(nxt)
    return None


# -- serialization -------------------------------------------------------------


def tiling_to_dict(inst: SquareInstance | CorridorInstance) -> dict:
    d: dict = {"tiles": [list(t) for t in inst.tiles], "k": inst.k}
    if isinstance(inst, SquareInstance):
        d["kind"] = "square"
        d.update(top=list(inst.top), bottom=list(inst.bottom), left=list(inst.left), right=list(inst.right))
    else:
        d["kind"] = "corridor"
        d.update(top_row=list(inst.top_row), bottom_row=list(inst.bottom_row))
    return d


def serialize_tiling_instance(inst: SquareInstance | CorridorInstance) -> str:
    return json.dumps(tiling_to_dict(inst)) + "\n"


def parse_tiling_instance(text: str, kind: str | None = None) -> SquareInstance | CorridorInstance:
    """Parse ``{"tiles": [[l,u,r,d],...], "k": k, ...}``.

    Square instances carry colour arrays ``top``/``bottom``/``left``/``right``;
    corridor instances carry tile-index arrays ``top_row``/``bottom_row``.
    """
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TilingFormatError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(d, dict):
        raise TilingFormatError("tiling instance must be a JSON object")
    kind = kind or d.get("kind") or ("square" if "top" in d else "corridor")
    if kind not in ("square", "corridor"):
        raise TilingFormatError(f"unknown tiling kind {kind!r}")
    allowed = {"tiles", "k", "kind"} | (
        {"top", "bottom", "left", "right"} if kind == "square" else {"top_row", "bottom_row"})
    for key in d:
        if key not in allowed:
            raise TilingFormatError(f"unknown field {key!r} for a {kind} instance")
    for key in allowed - {"kind"}:
        if key not in d:
            raise TilingFormatError(f"missing required key {key!r}")
    try:
        tiles = tuple(Tile(*map(int, t)) for t in d["tiles"])
        if kind == "square":
            return SquareInstance(tiles, int(d["k"]), *(tuple(map(int, d[s])) for s in ("top", "bottom", "left", "right")))
        return CorridorInstance(tiles, int(d["k"]), tuple(map(int, d["top_row"])), tuple(map(int, d["bottom_row"])))
    except (TypeError, ValueError) as exc:
        raise TilingFormatError(str(exc)) from exc

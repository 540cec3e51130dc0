"""Spin alphabet, interaction graphs and model parameters.

Spins are fixed to {0, 1, 2}; spin 0 is the vacant state and carries
activity 1, spins 1 and 2 carry the common activity ``lam``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidParameter

SPINS = (0, 1, 2)


@dataclass(frozen=True)
class GraphSpec:
    """Symmetric 0/1 adjacency on the three spins.

    ``adjacency[i][j] == 1`` means spins i and j may sit on neighbouring
    vertices. Fertility is not checked; any symmetric matrix without an
    all-zero row is accepted.
    """

    name: str
    adjacency: tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in row) for row in self.adjacency)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise InvalidParameter("adjacency must be 3x3")
        for i in SPINS:
            for j in SPINS:
                if rows[i][j] not in (0, 1):
                    raise InvalidParameter(f"adjacency entries must be 0/1, got a[{i}][{j}]={rows[i][j]}")
                if rows[i][j] != rows[j][i]:
                    raise InvalidParameter(f"adjacency not symmetric at ({i},{j})")
        if any(sum(r) == 0 for r in rows):
            raise InvalidParameter("adjacency has an all-zero row")
        object.__setattr__(self, "adjacency", rows)

    def a(self, i: int, j: int) -> int:
        return self.adjacency[i][j]

    @property
    def flat(self) -> str:
        return ",".join(str(v) for row in self.adjacency for v in row)

    def is_preset(self) -> bool:
        return self.name in PRESETS and PRESETS[self.name].adjacency == self.adjacency


_LOOP = ((1, 1, 1), (1, 1, 0), (1, 0, 1))
_ROD = ((0, 1, 1), (1, 1, 0), (1, 0, 1))

PRESETS: dict[str, GraphSpec] = {
    "loop": GraphSpec("loop", _LOOP),
    "rod": GraphSpec("rod", _ROD),
}


def preset(name: str) -> GraphSpec:
    """Return the named preset graph (``loop`` or ``rod``)."""
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidParameter(
            f"unknown graph {name!r}; presets are {sorted(PRESETS)} "
            "(other fertile graphs need an explicit adjacency)"
        ) from None


def graph_from_flat(text: str, name: str = "custom") -> GraphSpec:
    """Parse a row-major ``a00,a01,...,a22`` adjacency string."""
    parts = [p.strip() for p in text.replace(" ", ",").split(",") if p.strip()]
    if len(parts) == 1 and len(parts[0]) == 9:
        parts = list(parts[0])
    if len(parts) != 9:
        raise InvalidParameter(f"adjacency needs 9 entries, got {len(parts)}")
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise InvalidParameter(f"adjacency entries must be integers: {text!r}") from None
    rows = (tuple(vals[0:3]), tuple(vals[3:6]), tuple(vals[6:9]))
    return GraphSpec(name, rows)


def is_admissible(graph: GraphSpec, pairs: Iterable[Sequence[int]]) -> bool:
    """True iff every (parent spin, child spin) pair is an edge of ``graph``."""
    return all(graph.adjacency[i][j] == 1 for i, j in pairs)


@dataclass(frozen=True)
class Activity:
    lam: float

    def __post_init__(self) -> None:
        if not (self.lam > 0) or self.lam != self.lam or self.lam == float("inf"):
            raise InvalidParameter(f"activity must be a positive finite number, got {self.lam!r}")

    @property
    def per_spin(self) -> tuple[float, float, float]:
        return (1.0, self.lam, self.lam)


@dataclass(frozen=True)
class ModelParams:
    graph: GraphSpec
    k: int
    activity: Activity

    def __post_init__(self) -> None:
        if int(self.k) != self.k or self.k < 1:
            raise InvalidParameter(f"branching order k must be an integer >= 1, got {self.k!r}")

    @classmethod
    def of(cls, graph: GraphSpec | str, k: int, lam: float) -> "ModelParams":
        if isinstance(graph, str):
            graph = preset(graph)
        return cls(graph, k, Activity(float(lam)))

    @property
    def lam(self) -> float:
        return self.activity.lam

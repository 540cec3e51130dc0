"""Tree recursion for translation-invariant boundary laws.

A translation-invariant boundary law is a pair ``(z1, z2)`` of positive
reals solving

    z_i = lam * (D_i / D_0) ** k,   D_i = a_i0 + a_i1*z1 + a_i2*z2,

for i = 1, 2. The pair ``(1, z1, z2)`` is written ``zc`` below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import roots
from .errors import DegenerateDenominator, InvalidParameter, NonConvergence
from .model import GraphSpec, ModelParams

RESIDUAL_TOL = 1e-10
SYMMETRIC_TOL = 1e-8
DEDUP_TOL = 1e-8


def _denominators(graph: GraphSpec, z1: float, z2: float) -> tuple[float, float, float]:
    A = graph.adjacency
    return tuple(A[i][0] + A[i][1] * z1 + A[i][2] * z2 for i in range(3))  # type: ignore[return-value]


def rhs(params: ModelParams, z1: float, z2: float) -> tuple[float, float]:
    """Right-hand side of the recursion evaluated at a translation-invariant point."""
    d0, d1, d2 = _denominators(params.graph, z1, z2)
    if d0 <= 0.0:
        raise DegenerateDenominator(f"D0 = {d0!r} at z = ({z1!r}, {z2!r})")
    lam, k = params.lam, params.k
    return lam * (d1 / d0) ** k, lam * (d2 / d0) ** k


def residual(params: ModelParams, z1: float, z2: float) -> float:
    r1, r2 = rhs(params, z1, z2)
    return max(abs(z1 - r1), abs(z2 - r2))


def _scaled_residual(params: ModelParams, z1: float, z2: float) -> float:
    r1, r2 = rhs(params, z1, z2)
    return max(abs(z1 - r1) / max(1.0, z1), abs(z2 - r2) / max(1.0, z2))


@dataclass(frozen=True)
class BoundaryFixedPoint:
    z1: float
    z2: float
    params: ModelParams
    residual: float

    @property
    def symmetric(self) -> bool:
        return abs(self.z1 - self.z2) <= SYMMETRIC_TOL * max(1.0, self.z1)

    @property
    def z(self) -> tuple[float, float]:
        return (self.z1, self.z2)

    @property
    def zc(self) -> tuple[float, float, float]:
        return (1.0, self.z1, self.z2)

    @property
    def x(self) -> tuple[float, float]:
        """Cube roots of the components (the natural variable at k = 3)."""
        return (self.z1 ** (1 / 3), self.z2 ** (1 / 3))

    def swapped(self) -> "BoundaryFixedPoint":
        return BoundaryFixedPoint(self.z2, self.z1, self.params, self.residual)

    def as_dict(self) -> dict:
        return {
            "graph": self.params.graph.name,
            "k": self.params.k,
            "lambda": self.params.lam,
            "z1": self.z1,
            "z2": self.z2,
            "residual": self.residual,
            "symmetric": self.symmetric,
        }


def make_fixed_point(params: ModelParams, z1: float, z2: float) -> BoundaryFixedPoint:
    return BoundaryFixedPoint(float(z1), float(z2), params, residual(params, z1, z2))


def _require_swap_symmetric(graph: GraphSpec) -> None:
    A = graph.adjacency
    if not (A[0][1] == A[0][2] and A[1][1] == A[2][2]):
        raise InvalidParameter(
            f"graph {graph.name!r} is not symmetric under exchanging spins 1 and 2; "
            "the symmetric reduction is undefined"
        )


def symmetric_map(graph: GraphSpec, k: int, lam: float, z: float) -> float:
    """``lam * (D1/D0)**k`` at ``z1 = z2 = z``."""
    d0, d1, _ = _denominators(graph, z, z)
    return lam * (d1 / d0) ** k


def lambda_of_z(graph: GraphSpec, k: int, z: float) -> float:
    """Activity at which ``z`` is the symmetric fixed point.

    loop: ``z*((1+2z)/(1+z))**k``; rod: ``z*(2z/(1+z))**k``.
    """
    if not z > 0:
        raise InvalidParameter(f"z must be positive, got {z!r}")
    _require_swap_symmetric(graph)
    d0, d1, _ = _denominators(graph, z, z)
    if d1 <= 0.0:
        raise DegenerateDenominator(f"D1 = {d1!r} at z = {z!r}")
    return z * (d0 / d1) ** k


def _symmetric_bracket(graph: GraphSpec, k: int, lam: float, F) -> tuple[float, float]:
    if graph.is_preset() and graph.name == "loop":
        # rhs lies in (lam/2^k, lam) for the loop
        lo, hi = lam * 2.0 ** (-k) * 0.9, lam * 1.1
        return lo, hi
    lo = 1e-12
    while F(lo) >= 0.0:
        lo *= 1e-3
        if lo < 1e-300:
            raise NonConvergence("could not find a lower bracket for the symmetric solve")
    hi = roots.expand_upper(F, lo, 1.0)
    return lo, hi


def solve_symmetric(params: ModelParams) -> BoundaryFixedPoint:
    """Unique symmetric fixed point ``z1 = z2 = z``.

    The reduction ``z -> lam*(D1/D0)**k`` is decreasing for the presets, so
    ``z - rhs(z)`` has a single sign change which bisection locates to
    machine precision.
    """
    graph, k, lam = params.graph, params.k, params.lam
    _require_swap_symmetric(graph)

    def F(z: float) -> float:
        return z - symmetric_map(graph, k, lam, z)

    lo, hi = _symmetric_bracket(graph, k, lam, F)
    if not (F(lo) < 0.0 <= F(hi)):
        raise NonConvergence(f"invalid symmetric bracket [{lo!r}, {hi!r}] for lambda={lam!r}")
    z = roots.bisect_geometric(F, lo, hi)
    fp = make_fixed_point(params, z, z)
    if fp.residual > 1e-12 * max(1.0, z):
        raise NonConvergence(f"symmetric solve residual {fp.residual:.3e} too large at lambda={lam!r}")
    return fp


def lambda_cr(graph: GraphSpec, k: int) -> Fraction:
    """Critical activity above which three translation-invariant laws exist.

    loop: ``(1/(k-1)) * ((k+1)/k)**k``; rod: ``(1/(k-1)) * (2/k)**k``.
    Returned as an exact rational.
    """
    if k < 2:
        raise InvalidParameter("lambda_cr needs k >= 2")
    if not graph.is_preset():
        raise InvalidParameter(f"no critical-activity formula for graph {graph.name!r}")
    if graph.name == "loop":
        return Fraction(1, k - 1) * Fraction(k + 1, k) ** k
    return Fraction(1, k - 1) * Fraction(2, k) ** k


def _jacobian(params: ModelParams, z1: float, z2: float) -> np.ndarray:
    A = params.graph.adjacency
    d = _denominators(params.graph, z1, z2)
    r = rhs(params, z1, z2)
    k = params.k
    J = np.empty((2, 2))
    for row, i in enumerate((1, 2)):
        for col, m in enumerate((1, 2)):
            J[row, col] = k * r[row] * ((A[i][m] / d[i] if d[i] else 0.0) - A[0][m] / d[0])
    return np.eye(2) - J


def newton_2d(params: ModelParams, z1: float, z2: float, *, maxiter: int = 60) -> tuple[float, float]:
    """Newton iteration on ``z - rhs(z) = 0``, keeping iterates positive."""
    z = np.array([z1, z2], dtype=float)
    for _ in range(maxiter):
        r = np.array(rhs(params, *z))
        F = z - r
        if np.all(np.abs(F) <= 1e-15 * np.maximum(1.0, z)):
            break
        try:
            step = np.linalg.solve(_jacobian(params, *z), F)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while np.any(z - t * step <= 0.0) and t > 1e-8:
            t *= 0.5
        znew = z - t * step
        if np.allclose(znew, z, rtol=0.0, atol=0.0):
            break
        z = znew
    return float(z[0]), float(z[1])


def damped_iteration(params: ModelParams, z1: float, z2: float, *, damping: float = 0.5,
                     max_steps: int = 10_000, tol: float = 1e-13) -> tuple[float, float, bool, int]:
    """Iterate ``z <- (1-damping)*z + damping*rhs(z)``; returns ``(z1, z2, settled, steps)``."""
    for step in range(1, max_steps + 1):
        r1, r2 = rhs(params, z1, z2)
        n1 = (1 - damping) * z1 + damping * r1
        n2 = (1 - damping) * z2 + damping * r2
        done = max(abs(n1 - z1), abs(n2 - z2)) <= tol * max(1.0, n1, n2)
        z1, z2 = n1, n2
        if done:
            return z1, z2, True, step
    return z1, z2, False, max_steps


@dataclass(frozen=True)
class SolutionSet:
    points: tuple[BoundaryFixedPoint, ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def count(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)


def _same(p: BoundaryFixedPoint, q: BoundaryFixedPoint) -> bool:
    return (abs(p.z1 - q.z1) <= DEDUP_TOL * max(1.0, p.z1)
            and abs(p.z2 - q.z2) <= DEDUP_TOL * max(1.0, p.z2))


def solve_all_ti(params: ModelParams, *, seeds: tuple[float, ...] = (10.0, 100.0),
                 damping: float = 0.5, max_steps: int = 10_000) -> SolutionSet:
    """All positive translation-invariant fixed points reachable from the seed set.

    Symmetric solve first, then damped iteration from ``(lam*M, lam/M)``
    for each ``M`` in ``seeds`` (and the swapped seed), each followed by a
    2D Newton polish. Completeness is only claimed for k in {2, 3}.
    """
    graph, lam = params.graph, params.lam
    swap_sym = graph.adjacency[0][1] == graph.adjacency[0][2] and graph.adjacency[1][1] == graph.adjacency[2][2]
    candidates: list[BoundaryFixedPoint] = []
    notes: list[str] = []
    if swap_sym:
        candidates.append(solve_symmetric(params))

    starts = []
    for M in seeds:
        starts.append((lam * M, lam / M))
        starts.append((lam / M, lam * M))
    for s1, s2 in starts:
        z1, z2, settled, steps = damped_iteration(params, s1, s2, damping=damping, max_steps=max_steps)
        if not settled:
            notes.append(f"seed ({s1:.6g}, {s2:.6g}) did not settle in {steps} steps; polished anyway")
        z1, z2 = newton_2d(params, z1, z2)
        if not (z1 > 0 and z2 > 0 and math.isfinite(z1) and math.isfinite(z2)):
            notes.append(f"seed ({s1:.6g}, {s2:.6g}) left the positive quadrant")
            continue
        if _scaled_residual(params, z1, z2) > RESIDUAL_TOL:
            notes.append(f"seed ({s1:.6g}, {s2:.6g}) ended with residual "
                         f"{_scaled_residual(params, z1, z2):.3e}; discarded")
            continue
        fp = make_fixed_point(params, z1, z2)
        if swap_sym and fp.symmetric:
            continue
        candidates.append(fp)
        if swap_sym:
            candidates.append(make_fixed_point(params, z2, z1))

    unique: list[BoundaryFixedPoint] = []
    for c in candidates:
        if not any(_same(c, u) for u in unique):
            unique.append(c)
    unique.sort(key=lambda p: (not p.symmetric, -p.z1))
    return SolutionSet(tuple(unique), tuple(notes))

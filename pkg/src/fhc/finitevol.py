"""Finite-volume measures on the rooted Cayley tree and a broadcast sampler.

Vertices of ``V_n`` are numbered breadth-first, so a configuration on
``V_{n-1}`` is a prefix of a configuration on ``V_n``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator

import numpy as np

from .boundary import BoundaryFixedPoint
from .errors import InvalidParameter, SizeGuardExceeded
from .extremality import TransitionKernel
from .model import GraphSpec, ModelParams

SIZE_GUARD = 10 ** 7
RNG_ALGORITHM = "PCG64 (numpy.random.Generator) seeded via SeedSequence(seed).spawn"
F_OBS = np.array([0.0, 1.0, -1.0])


@dataclass(frozen=True)
class TreeLayout:
    """Rooted Cayley tree of order ``k`` truncated at depth ``n``."""

    k: int
    n: int

    def __post_init__(self) -> None:
        if self.k < 1 or self.n < 0:
            raise InvalidParameter(f"need k >= 1 and n >= 0, got k={self.k}, n={self.n}")

    def level_size(self, m: int) -> int:
        return 1 if m == 0 else (self.k + 1) * self.k ** (m - 1)

    @cached_property
    def levels(self) -> tuple[range, ...]:
        out, start = [], 0
        for m in range(self.n + 1):
            size = self.level_size(m)
            out.append(range(start, start + size))
            start += size
        return tuple(out)

    @property
    def size(self) -> int:
        return self.levels[-1].stop

    @cached_property
    def parent(self) -> tuple[int, ...]:
        par = [-1]
        for m in range(1, self.n + 1):
            prev = self.levels[m - 1]
            fan = self.k + 1 if m == 1 else self.k
            for p in prev:
                par.extend([p] * fan)
        return tuple(par)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        ch: list[list[int]] = [[] for _ in range(self.size)]
        for v, p in enumerate(self.parent):
            if p >= 0:
                ch[p].append(v)
        return tuple(tuple(c) for c in ch)


def admissible_count(graph: GraphSpec, k: int, n: int) -> int:
    """Number of admissible configurations on ``V_n`` by transfer over levels."""
    A = graph.adjacency
    below = [1, 1, 1]
    for depth in range(n, 0, -1):
        fan = k + 1 if depth == 1 else k
        below = [sum(A[i][j] * below[j] for j in range(3)) ** fan for i in range(3)]
    return sum(below)


def _guard(graph: GraphSpec, k: int, n: int) -> int:
    layout = TreeLayout(k, n)
    if layout.size > 64:
        raise SizeGuardExceeded(f"tree has {layout.size} vertices; enumeration refused")
    count = admissible_count(graph, k, n)
    if count > SIZE_GUARD:
        raise SizeGuardExceeded(f"{count} admissible configurations exceed the guard {SIZE_GUARD}")
    return count


def iter_admissible(graph: GraphSpec, k: int, n: int) -> Iterator[tuple[int, ...]]:
    """Depth-first generation of admissible configurations, breadth-first vertex order."""
    _guard(graph, k, n)
    layout = TreeLayout(k, n)
    parent = layout.parent
    A = graph.adjacency
    allowed = [[j for j in range(3) if A[i][j]] for i in range(3)]
    size = layout.size
    spins = [0] * size

    def rec(v: int) -> Iterator[tuple[int, ...]]:
        if v == size:
            yield tuple(spins)
            return
        choices = (0, 1, 2) if v == 0 else allowed[spins[parent[v]]]
        for s in choices:
            spins[v] = s
            yield from rec(v + 1)

    yield from rec(0)


def enumerate_admissible(graph: GraphSpec, k: int, n: int) -> tuple[int, Iterator[tuple[int, ...]]]:
    return _guard(graph, k, n), iter_admissible(graph, k, n)


@dataclass(frozen=True)
class FiniteMeasure:
    layout: TreeLayout
    configs: tuple[tuple[int, ...], ...]
    probs: np.ndarray
    Z: float

    def root_marginal(self) -> np.ndarray:
        out = np.zeros(3)
        for c, p in zip(self.configs, self.probs):
            out[c[0]] += p
        return out

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return dict(zip(self.configs, self.probs.tolist()))


def boundary_weights(lam: float, z1: float, z2: float, primed: bool = True) -> tuple[float, float, float]:
    """Per-spin weight applied at the outer level.

    The recursion solves ``z' = lam*z/z0``, so the consistent weight is
    ``(1, z1/lam, z2/lam)``; ``primed=False`` uses ``(1, z1, z2)`` instead.
    """
    return (1.0, z1 / lam, z2 / lam) if primed else (1.0, z1, z2)


def finite_measure(params: ModelParams, fp: BoundaryFixedPoint | tuple[float, float], n: int,
                   *, primed: bool = True) -> FiniteMeasure:
    """``mu_n(sigma) ∝ lam^{#occupied} * prod_{x in W_n} w[sigma(x)]``.

    At ``n = 0`` the root is its own outer level but has ``k + 1``
    subtrees, so its weight is ``lam_i * D_i**(k+1)``: the root marginal.
    """
    z1, z2 = fp.z if isinstance(fp, BoundaryFixedPoint) else fp
    lam, k, graph = params.lam, params.k, params.graph
    layout = TreeLayout(k, n)
    if n == 0:
        pi = _root_weights(graph, k, lam, z1, z2) if primed else np.array([1.0, lam * z1, lam * z2])
        Z = float(pi.sum())
        return FiniteMeasure(layout, ((0,), (1,), (2,)), pi / Z, Z)
    w = boundary_weights(lam, z1, z2, primed)
    outer = layout.levels[n]
    configs = []
    weights = []
    log_lam = math.log(lam)
    log_w = [math.log(v) for v in w]
    for c in iter_admissible(graph, k, n):
        occ = sum(1 for s in c if s)
        lw = occ * log_lam + sum(log_w[c[x]] for x in outer)
        configs.append(c)
        weights.append(lw)
    lw = np.array(weights)
    shift = lw.max()
    ww = np.exp(lw - shift)
    Z = float(ww.sum())
    return FiniteMeasure(layout, tuple(configs), ww / Z, Z * math.exp(shift))


def consistency_residual(params: ModelParams, fp: BoundaryFixedPoint | tuple[float, float], n: int,
                         *, primed: bool = True) -> float:
    """``max_sigma |sum_omega mu_n(sigma v omega) - mu_{n-1}(sigma)|``."""
    if n < 1:
        raise InvalidParameter("consistency needs n >= 1")
    mu_n = finite_measure(params, fp, n, primed=primed)
    mu_prev = finite_measure(params, fp, n - 1, primed=primed)
    cut = mu_prev.layout.size
    marg: dict[tuple[int, ...], float] = defaultdict(float)
    for c, p in zip(mu_n.configs, mu_n.probs):
        marg[c[:cut]] += p
    prev = mu_prev.as_dict()
    keys = set(prev) | set(marg)
    return max(abs(marg.get(key, 0.0) - prev.get(key, 0.0)) for key in keys)


def _root_weights(graph: GraphSpec, k: int, lam: float, z1: float, z2: float) -> np.ndarray:
    A = np.array(graph.adjacency, dtype=float)
    zc = np.array([1.0, z1, z2])
    D = A @ zc
    return np.array([1.0, lam, lam]) * D ** (k + 1)


def root_marginal(graph: GraphSpec, k: int, lam: float, fp: BoundaryFixedPoint | tuple[float, float]) -> np.ndarray:
    """``pi_i ∝ lam_i * (sum_j a_ij zc_j)**(k+1)``; at a fixed point ``pi_i ∝ zc_i * D_i``."""
    z1, z2 = fp.z if isinstance(fp, BoundaryFixedPoint) else fp
    w = _root_weights(graph, k, lam, z1, z2)
    return w / w.sum()


# -- Monte Carlo ---------------------------------------------------------------

@dataclass(frozen=True)
class BroadcastStats:
    samples: int
    depth: int
    violations: int
    level_marginals: np.ndarray
    correlation: np.ndarray
    edge_counts: np.ndarray

    @property
    def ratios(self) -> np.ndarray:
        """``correlation[m+1] / correlation[m]``."""
        c = self.correlation
        return c[1:] / c[:-1]

    def as_dict(self) -> dict:
        return {
            "samples": self.samples,
            "depth": self.depth,
            "violations": self.violations,
            "level_marginals": self.level_marginals.tolist(),
            "correlation": self.correlation.tolist(),
            "ratios": self.ratios.tolist(),
        }


def _sample_chunk(P: np.ndarray, A: np.ndarray, pi: np.ndarray, k: int, depth: int,
                  count: int, seq: np.random.SeedSequence) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
    """Level-aggregated broadcast: children of all type-i parents are multinomial."""
    rng = np.random.Generator(np.random.PCG64(seq))
    root = rng.choice(3, size=count, p=pi)
    N = np.zeros((count, 3), dtype=np.int64)
    N[np.arange(count), root] = 1
    f_root = F_OBS[root]
    level_sums = np.zeros((depth + 1, 3))
    corr_sums = np.zeros(depth + 1)
    edges = np.zeros((3, 3), dtype=np.int64)
    level_sums[0] = N.sum(axis=0)
    corr_sums[0] = float((f_root * f_root).sum())
    for m in range(1, depth + 1):
        fan = k + 1 if m == 1 else k
        nxt = np.zeros_like(N)
        for i in range(3):
            E = rng.multinomial(fan * N[:, i], P[i])
            edges[i] += E.sum(axis=0)
            nxt += E
        N = nxt
        size = fan * (1 if m == 1 else (k + 1) * k ** (m - 2))
        level_sums[m] = N.sum(axis=0) / size
        corr_sums[m] = float((f_root * (N[:, 1] - N[:, 2]) / size).sum())
    violations = int(edges[A == 0].sum())
    return violations, level_sums, corr_sums, edges


def broadcast_sample(kernel: TransitionKernel, pi, k: int, depth: int, samples: int, seed: int,
                     *, chunk: int = 8192, workers: int = 1) -> BroadcastStats:
    """Broadcast spins from the root down a depth-``depth`` tree.

    The root spin is drawn from ``pi``; each child of a spin-i vertex
    draws from row ``P[i]``. Children are tallied per (parent spin, child
    spin) and level, which samples the level counts exactly without
    materialising every vertex. Samples are split into fixed-size chunks
    with seeds ``SeedSequence(seed).spawn``, so results do not depend on
    ``workers``.

    Reports admissibility violations, the mean spin frequencies per level,
    and ``correlation[m] = E[f(root) * mean_{x in W_m} f(x)]`` for
    ``f = 1{spin=1} - 1{spin=2}``.
    """
    if depth < 1 or samples < 1:
        raise InvalidParameter("depth and samples must be positive")
    if not 0 <= seed < 2 ** 64:
        raise InvalidParameter("seed must be a 64-bit unsigned integer")
    if depth * k ** depth > SIZE_GUARD * 10:
        raise SizeGuardExceeded(f"depth*k^depth = {depth * k ** depth} exceeds the sampler guard")
    pi = np.asarray(pi, dtype=float)
    P = np.asarray(kernel.P, dtype=float)
    A = np.array(kernel.graph.adjacency)
    n_chunks = -(-samples // chunk)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(chunk, samples - i * chunk) for i in range(n_chunks)]
    jobs = list(zip(sizes, seqs))

    def run(job):
        size, seq = job
        return _sample_chunk(P, A, pi, k, depth, size, seq)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    violations = sum(r[0] for r in results)
    level = sum(r[1] for r in results) / samples
    corr = sum(r[2] for r in results) / samples
    edges = sum(r[3] for r in results)
    return BroadcastStats(samples, depth, violations, level, corr, edges)


def sample_tree(P: np.ndarray, pi, layout: TreeLayout, rng: np.random.Generator) -> np.ndarray:
    """One explicit broadcast configuration on ``layout`` (vertex by vertex)."""
    spins = np.empty(layout.size, dtype=np.int64)
    spins[0] = rng.choice(3, p=pi)
    for v in range(1, layout.size):
        spins[v] = rng.choice(3, p=P[spins[layout.parent[v]]])
    return spins

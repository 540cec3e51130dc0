"""Transition kernel, spectrum and (non-)extremality verdicts.

The splitting measure of a fixed point ``(z1, z2)`` induces a Markov chain
along rays of the tree with ``P_ij = a_ij zc_j / sum_l a_il zc_l`` and
``zc = (1, z1, z2)``. Non-extremality follows from the Kesten-Stigum bound
``k * s0**2 > 1`` (``s0`` the second largest eigenvalue modulus);
extremality from ``k * kappa * gamma < 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import roots
from .boundary import BoundaryFixedPoint, lambda_of_z, solve_symmetric
from .errors import DegenerateDenominator, InvalidParameter, SpectralError
from .model import GraphSpec, ModelParams

SPECTRAL_TOL = 1e-10


class Verdict(str, enum.Enum):
    EXTREME = "ExtremeCertified"
    NON_EXTREME = "NonExtremeCertified"
    UNDETERMINED = "Undetermined"
    CONFLICT = "Conflict"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TransitionKernel:
    P: np.ndarray
    graph: GraphSpec
    z1: float
    z2: float

    @property
    def zc(self) -> tuple[float, float, float]:
        return (1.0, self.z1, self.z2)


def transition_kernel(graph: GraphSpec, z1: float, z2: float | None = None) -> TransitionKernel:
    if z2 is None:
        z2 = z1
    if not (z1 > 0 and z2 > 0):
        raise InvalidParameter(f"fixed point must be positive, got ({z1!r}, {z2!r})")
    zc = np.array([1.0, z1, z2])
    A = np.array(graph.adjacency, dtype=float)
    W = A * zc[None, :]
    rows = W.sum(axis=1)
    if np.any(rows <= 0):
        raise DegenerateDenominator("kernel row with zero normaliser")
    P = W / rows[:, None]
    P.setflags(write=False)
    return TransitionKernel(P, graph, float(z1), float(z2))


def kernel_of(fp: BoundaryFixedPoint) -> TransitionKernel:
    return transition_kernel(fp.params.graph, fp.z1, fp.z2)


@dataclass(frozen=True)
class SpectralSummary:
    s1: float
    s2: float
    s3: float
    s0: float
    tie: bool
    max_char_residual: float

    def as_dict(self) -> dict:
        return {"s1": self.s1, "s2": self.s2, "s3": self.s3, "s0": self.s0, "tie": self.tie}


def _char_coeffs(P: np.ndarray) -> tuple[float, float, float]:
    """``(trace, sum of principal 2x2 minors, det)``."""
    tr = P[0, 0] + P[1, 1] + P[2, 2]
    c2 = (P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]
          + P[0, 0] * P[2, 2] - P[0, 2] * P[2, 0]
          + P[1, 1] * P[2, 2] - P[1, 2] * P[2, 1])
    det = float(np.linalg.det(P))
    return float(tr), float(c2), det


def char_residual(P: np.ndarray, s: float) -> float:
    return abs(float(np.linalg.det(P - s * np.eye(3))))


def spectrum(kernel: TransitionKernel) -> SpectralSummary:
    """Eigenvalues of the 3x3 kernel from its characteristic polynomial.

    ``s^3 - tr s^2 + c2 s - det`` is deflated by the stochastic root 1 and
    the remaining quadratic solved; ``s1 <= s2``.
    """
    P = kernel.P
    tr, c2, det = _char_coeffs(P)
    b1 = 1.0 - tr
    b2 = c2 + b1
    disc = b1 * b1 - 4.0 * b2
    if disc < 0:
        if disc < -1e-12:
            raise SpectralError(f"complex eigenvalues for a reversible kernel (disc={disc!r})")
        disc = 0.0
    sq = math.sqrt(disc)
    r1 = (-b1 - sq) / 2.0 if b1 >= 0 else (-b1 + sq) / 2.0
    r2 = b2 / r1 if r1 != 0.0 else -b1
    s1, s2 = sorted((r1, r2))
    s3 = 1.0
    resid = max(char_residual(P, s) for s in (s1, s2, s3))
    if resid > SPECTRAL_TOL:
        raise SpectralError(f"characteristic residual {resid:.3e} exceeds {SPECTRAL_TOL}")
    if abs(s1 + s2 + s3 - tr) > SPECTRAL_TOL or abs(s1 * s2 * s3 - det) > SPECTRAL_TOL:
        raise SpectralError("trace/determinant identity violated")
    a1, a2 = abs(s1), abs(s2)
    tie = abs(a1 - a2) <= 1e-14 * max(1.0, a1)
    return SpectralSummary(s1, s2, s3, max(a1, a2), tie, resid)


def printed_eigenvalues(graph: GraphSpec | str, z: float) -> tuple[float, float, float]:
    """Published closed forms ``(s1, s2, s3)`` for the symmetric preset kernels."""
    name = graph if isinstance(graph, str) else graph.name
    if name == "loop":
        return (-1.0 / ((z + 1.0) * (2.0 * z + 1.0)), z / (z + 1.0), 1.0)
    if name == "rod":
        return (-1.0 / (z + 1.0), z / (z + 1.0), 1.0)
    raise InvalidParameter(f"no published eigenvalues for {name!r}")


def kappa_direct(P: np.ndarray) -> float:
    """Half the largest l1 distance between two rows of the kernel."""
    best = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            best = max(best, 0.5 * float(np.abs(P[i] - P[j]).sum()))
    return best


@dataclass(frozen=True)
class KappaGamma:
    kappa: float
    gamma: float
    kappa_direct: float

    @property
    def agrees(self) -> bool:
        return abs(self.kappa - self.kappa_direct) <= 1e-12


def kappa_gamma(graph: GraphSpec, z: float) -> KappaGamma:
    """Dependence coefficients at a symmetric fixed point.

    loop: ``kappa = z/(1+z)``; rod: ``kappa = max(1/(1+z), z/(1+z))``.
    ``gamma`` is taken equal to ``kappa``. Graphs without a closed form
    fall back to the row-distance definition.
    """
    if not z > 0:
        raise InvalidParameter(f"z must be positive, got {z!r}")
    direct = kappa_direct(transition_kernel(graph, z, z).P)
    if graph.is_preset() and graph.name == "loop":
        kappa = z / (1.0 + z)
    elif graph.is_preset() and graph.name == "rod":
        kappa = max(1.0 / (1.0 + z), z / (1.0 + z))
    else:
        kappa = direct
    return KappaGamma(kappa, kappa, direct)


def verdict_for(ks_value: float, msw_value: float) -> Verdict:
    if ks_value > 1 and msw_value >= 1:
        return Verdict.NON_EXTREME
    if msw_value < 1 and ks_value <= 1:
        return Verdict.EXTREME
    if ks_value > 1 and msw_value < 1:
        return Verdict.CONFLICT
    return Verdict.UNDETERMINED


@dataclass(frozen=True)
class ExtremalityReport:
    fixed_point: BoundaryFixedPoint
    spectrum: SpectralSummary
    kappa: float
    gamma: float
    kappa_direct: float
    ks_value: float
    msw_value: float
    verdict: Verdict

    @property
    def ks_margin(self) -> float:
        return self.ks_value - 1.0

    @property
    def msw_margin(self) -> float:
        return 1.0 - self.msw_value

    def as_dict(self) -> dict:
        fp = self.fixed_point
        return {
            "graph": fp.params.graph.name,
            "k": fp.params.k,
            "lambda": fp.params.lam,
            "z1": fp.z1,
            "z2": fp.z2,
            **self.spectrum.as_dict(),
            "kappa": self.kappa,
            "gamma": self.gamma,
            "kappa_direct": self.kappa_direct,
            "ks": self.ks_value,
            "msw": self.msw_value,
            "ks_margin": self.ks_margin,
            "msw_margin": self.msw_margin,
            "verdict": self.verdict.value,
        }


def report_for(fp: BoundaryFixedPoint) -> ExtremalityReport:
    """Report for any fixed point; asymmetric points use the row-distance kappa."""
    k = fp.params.k
    spec = spectrum(kernel_of(fp))
    if fp.symmetric:
        kg = kappa_gamma(fp.params.graph, fp.z1)
        kappa, gamma, direct = kg.kappa, kg.gamma, kg.kappa_direct
    else:
        direct = kappa_direct(kernel_of(fp).P)
        kappa = gamma = direct
    ks = k * spec.s0 ** 2
    msw = k * kappa * gamma
    return ExtremalityReport(fp, spec, kappa, gamma, direct, ks, msw, verdict_for(ks, msw))


def classify(params: ModelParams) -> ExtremalityReport:
    """Classify the symmetric translation-invariant measure."""
    return report_for(solve_symmetric(params))


# -- thresholds ----------------------------------------------------------------

@dataclass(frozen=True)
class Threshold:
    lam: float
    condition: str
    z: float
    closed_form_lam: float | None = None
    closed_form_z: float | None = None

    @property
    def routes_agree(self) -> bool | None:
        if self.closed_form_lam is None:
            return None
        return abs(self.lam - self.closed_form_lam) <= 1e-8

    def as_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "condition": self.condition,
            "z": self.z,
            "closed_form_lambda": self.closed_form_lam,
            "closed_form_z": self.closed_form_z,
            "routes_agree": self.routes_agree,
        }


def ks_excess(graph: GraphSpec, k: int, lam: float) -> float:
    """``k * s0(z(lam))**2 - 1`` along the symmetric branch."""
    fp = solve_symmetric(ModelParams.of(graph, k, lam))
    return k * spectrum(kernel_of(fp)).s0 ** 2 - 1.0


def critical_z_closed_form(graph: GraphSpec, k: int) -> list[tuple[float, str]]:
    """Symmetric ``z`` where ``k * s0(z)**2 = 1``, for the presets.

    ``s2 = z/(1+z)`` (eigenvector (0, 1, -1)); the other non-unit
    eigenvalue follows from the trace: rod ``-1/(1+z)``,
    loop ``-z/((1+z)(1+2z))``. A candidate counts only where its
    eigenvalue is the one of largest modulus.
    """
    if not graph.is_preset() or k < 2:
        return []
    rk = math.sqrt(k)
    cands: list[tuple[float, str]] = [(1.0 / (rk - 1.0), "s2")] if rk > 1 else []
    if graph.name == "rod":
        s1 = lambda z: 1.0 / (1.0 + z)
        cands.append((rk - 1.0, "s1"))
    else:
        s1 = lambda z: z / ((1.0 + z) * (1.0 + 2.0 * z))
        # sqrt(k) z = (1+z)(1+2z)  ->  2z^2 + (3 - sqrt k) z + 1 = 0
        b = 3.0 - rk
        disc = b * b - 8.0
        if disc >= 0:
            for sgn in (1, -1):
                z = (-b + sgn * math.sqrt(disc)) / 4.0
                if z > 0:
                    cands.append((z, "s1"))
    out = []
    for z, which in cands:
        e_s2 = z / (1.0 + z)
        e_s1 = s1(z)
        if (which == "s2" and e_s2 >= e_s1) or (which == "s1" and e_s1 >= e_s2):
            out.append((z, which))
    return sorted(out)


def thresholds(graph: GraphSpec, k: int, *, lam_min: float = 1e-4, lam_max: float = 1e4,
               presieve: int = 2000, xtol: float = 1e-9) -> list[Threshold]:
    """Activities where the Kesten-Stigum quantity crosses 1.

    Sign changes of ``k*s0**2 - 1`` are found on a log presieve and
    bisected in ``lam``. For the presets each root is paired with
    ``lambda_of_z`` at the closed-form critical ``z``.
    """
    grid = np.geomspace(lam_min, lam_max, presieve)
    vals = [ks_excess(graph, k, float(l)) for l in grid]
    closed = [(z, which, lambda_of_z(graph, k, z)) for z, which in critical_z_closed_form(graph, k)]
    out: list[Threshold] = []
    for i in range(len(grid) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if v0 == 0.0 or (v0 > 0) != (v1 > 0):
            lo, hi = float(grid[i]), float(grid[i + 1])
            lam = roots.bisect(lambda l: ks_excess(graph, k, l), lo, hi, xtol=xtol * 1e-3)
            z = solve_symmetric(ModelParams.of(graph, k, lam)).z1
            cond = f"{k}*s0^2 = 1 ({'rising' if v1 > v0 else 'falling'})"
            match = min(closed, key=lambda c: abs(c[2] - lam), default=None)
            if match is not None and abs(match[2] - lam) <= 1e-6 * max(1.0, lam):
                cond += f" via {match[1]}"
                out.append(Threshold(lam, cond, z, match[2], match[0]))
            else:
                out.append(Threshold(lam, cond, z))
    return out

"""Closed-form roots of the symmetric fixed-point quartics.

With ``x = z**(1/3)`` and ``a = lam**(1/3)`` the k = 3 symmetric equations
become

    loop:  2x^4 - a x^3 + x - a = 0
    rod:   2x^4 - a x^3     - a = 0

They are solved by Ferrari's method: shift ``x = y + a/8`` to a depressed
quartic ``y^4 + p y^2 + q y + r``, pick a positive root ``t`` of the
resolvent cubic ``8t^3 + 8p t^2 + (2p^2 - 8r) t - q^2``, and split into two
quadratics. The published radical expressions for ``t0(a)`` and for the
branches are evaluated alongside; every candidate is accepted or rejected
by its quartic residual only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import roots
from .errors import InvalidParameter, NoPositiveResolventRoot
from .model import GraphSpec

QUARTIC_TOL = 1e-9
SQRT3 = math.sqrt(3.0)


def _graph_name(graph: GraphSpec | str) -> str:
    name = graph if isinstance(graph, str) else graph.name
    if name not in ("loop", "rod"):
        raise InvalidParameter(f"closed forms exist only for loop and rod, got {name!r}")
    return name


def real_cbrt(v: float) -> float:
    return math.copysign(abs(v) ** (1.0 / 3.0), v) if v else 0.0


def poly_eval(coeffs, x):
    """Horner evaluation, coefficients highest degree first."""
    acc = 0.0
    for c in coeffs:
        acc = acc * x + c
    return acc


def scaled_residual(coeffs, x: float) -> float:
    """``|p(x)| / (1 + max|c|)``; the tolerance scale used for quartic roots."""
    return abs(poly_eval(coeffs, x)) / (1.0 + max(abs(c) for c in coeffs))


@dataclass(frozen=True)
class QuarticProblem:
    graph: str
    a: float

    def __post_init__(self) -> None:
        _graph_name(self.graph)
        if not self.a > 0:
            raise InvalidParameter(f"a must be positive, got {self.a!r}")

    @property
    def coefficients(self) -> tuple[float, float, float, float, float]:
        """Monic coefficients, highest degree first."""
        a = self.a
        if self.graph == "loop":
            return (1.0, -a / 2, 0.0, 0.5, -a / 2)
        return (1.0, -a / 2, 0.0, 0.0, -a / 2)

    def depressed(self) -> tuple[float, float, float]:
        return depressed_coefficients(self.coefficients)

    def resolvent(self) -> tuple[float, float, float, float]:
        return resolvent_coefficients(*self.depressed())


def depressed_coefficients(coeffs) -> tuple[float, float, float]:
    """``(p, q, r)`` of the depressed quartic after ``x = y - b/4``."""
    _, b, c, d, e = coeffs
    p = c - 3.0 * b * b / 8.0
    q = d - b * c / 2.0 + b ** 3 / 8.0
    r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b ** 4 / 256.0
    return p, q, r


def resolvent_coefficients(p: float, q: float, r: float) -> tuple[float, float, float, float]:
    """``8t^3 + 8p t^2 + (2p^2 - 8r) t - q^2`` as a coefficient tuple."""
    return (8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q)


def cubic_real_roots(coeffs) -> list[float]:
    """Real roots of a real cubic via the trigonometric / Cardano split, Newton-polished."""
    a3, b, c, d = (float(v) for v in coeffs)
    b, c, d = b / a3, c / a3, d / a3
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if p < 0 and disc <= 0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        theta = math.acos(arg) / 3.0
        ts = [m * math.cos(theta - 2.0 * math.pi * j / 3.0) for j in range(3)]
    else:
        sd = math.sqrt(max(disc, 0.0))
        u = real_cbrt(-q / 2.0 + sd)
        v = real_cbrt(-q / 2.0 - sd)
        ts = [u + v]
    mono = (1.0, b, c, d)
    dmono = (3.0, 2.0 * b, c)
    out = []
    for t in ts:
        x = t - shift
        x = roots.newton_polish(lambda s: poly_eval(mono, s), lambda s: poly_eval(dmono, s), x, steps=4)
        out.append(x)
    return sorted(out)


def _quadratic_real(b: float, c: float, tol: float) -> list[float]:
    """Real roots of ``y^2 + b y + c``; a slightly negative discriminant counts as a double root."""
    disc = b * b - 4.0 * c
    if disc < 0:
        if disc < -tol:
            return []
        disc = 0.0
    s = math.sqrt(disc)
    if b >= 0:
        r1 = (-b - s) / 2.0
    else:
        r1 = (-b + s) / 2.0
    r2 = c / r1 if r1 != 0 else (-b - r1)
    return [r1, r2]


def ferrari_real_roots(coeffs) -> list[float]:
    """All real roots of a monic quartic (highest degree first), sorted.

    Repeated roots appear once per multiplicity; near-double roots whose
    splitting quadratic has a discriminant within rounding of zero are
    reported as a double root.
    """
    coeffs = tuple(float(c) for c in coeffs)
    if len(coeffs) != 5 or coeffs[0] != 1.0:
        raise InvalidParameter("expected monic quartic coefficients (1, b, c, d, e)")
    scale = 1.0 + max(abs(c) for c in coeffs)
    b = coeffs[1]
    p, q, r = depressed_coefficients(coeffs)
    tol = 1e-12 * scale
    ys: list[float] = []
    if abs(q) <= 1e-14 * scale:
        for w in _quadratic_real(p, r, tol):
            if w > 0:
                s = math.sqrt(w)
                ys += [s, -s]
            elif w > -tol:
                ys += [0.0, 0.0]
    else:
        t = max(cubic_real_roots(resolvent_coefficients(p, q, r)))
        if t <= 0:
            t = abs(t) or 1e-300
        s = math.sqrt(2.0 * t)
        # y^2 -/+ s*y + (p/2 + t +/- q/(2s)) = 0
        ys += _quadratic_real(-s, p / 2.0 + t + q / (2.0 * s), tol)
        ys += _quadratic_real(s, p / 2.0 + t - q / (2.0 * s), tol)
    deriv = (4.0, 3.0 * coeffs[1], 2.0 * coeffs[2], coeffs[3])
    out = []
    for y in ys:
        x = y - b / 4.0
        x = roots.newton_polish(lambda s: poly_eval(coeffs, s), lambda s: poly_eval(deriv, s), x, steps=2)
        out.append(x)
    return sorted(out)


# -- published radicals -------------------------------------------------------

def printed_t0(graph: GraphSpec | str, a: float) -> float:
    """The published Cardano expression for the resolvent root ``t0(a)``."""
    name = _graph_name(graph)
    if name == "loop":
        inner = -108.0 * a ** 3 + 216.0 + 12.0 * math.sqrt(81.0 * a ** 6 + 3792.0 * a ** 3 + 324.0)
        c = real_cbrt(inner)
        return c / 24.0 - 3.5 * a / c + a * a / 32.0
    inner = -108.0 * a ** 3 + 12.0 * math.sqrt(81.0 * a ** 6 + 6144.0 * a ** 3)
    c = real_cbrt(inner)
    return c / 24.0 - 4.0 * a / c + a * a / 32.0


def printed_a0() -> float:
    """Published radical expression for the loop branch-switch point ``a0``."""
    s = -405.0 + 51.0 * math.sqrt(177.0)
    return real_cbrt(s ** 5) / 29988.0 + 331.0 / 4998.0 * real_cbrt(s * s)


def branch_constants() -> tuple[float, float]:
    """``(a0, a0**3)``: the loop branch-switch point in ``a`` and in ``lam``."""
    a0 = printed_a0()
    return a0, a0 ** 3


@dataclass(frozen=True)
class ResolventRoot:
    t0: float
    a: float
    residual: float
    printed: float
    printed_residual: float
    graph: str

    @property
    def relative_gap(self) -> float:
        return abs(self.t0 - self.printed) / max(abs(self.t0), 1e-300)


def resolvent_residual_tol(a: float) -> float:
    return 1e-8 * (1.0 + abs(a) ** 6)


def resolvent_t0(graph: GraphSpec | str, a: float) -> ResolventRoot:
    """Positive resolvent root, solved numerically and matched to the published formula.

    The cubic is solved through companion-matrix eigenvalues, each real
    root polished by Newton; the positive root nearest the published value
    is returned.
    """
    name = _graph_name(graph)
    prob = QuarticProblem(name, a)
    cub = prob.resolvent()
    dcub = (3 * cub[0], 2 * cub[1], cub[2])
    raw = np.roots(cub)
    real = []
    for z in raw:
        if abs(z.imag) <= 1e-7 * max(1.0, abs(z.real)):
            t = roots.newton_polish(lambda s: poly_eval(cub, s), lambda s: poly_eval(dcub, s), float(z.real), steps=6)
            real.append(t)
    positive = [t for t in real if t > 0]
    if not positive:
        raise NoPositiveResolventRoot(f"resolvent cubic has no positive root at a={a!r} ({name})")
    printed = printed_t0(name, a)
    t0 = min(positive, key=lambda t: abs(t - printed))
    return ResolventRoot(
        t0=t0,
        a=a,
        residual=abs(poly_eval(cub, t0)),
        printed=printed,
        printed_residual=abs(poly_eval(cub, printed)),
        graph=name,
    )


@dataclass(frozen=True)
class BranchValue:
    """One signed branch ``so*sqrt(2t)/2 + si*sqrt(-2t - 2p + sm*q*sqrt(2/t))/2 + a/8``."""

    label: str
    signs: tuple[int, int, int]
    value: float | None
    residual: float | None
    published: bool

    @property
    def real(self) -> bool:
        return self.value is not None

    @property
    def valid(self) -> bool:
        return self.residual is not None and self.residual <= QUARTIC_TOL


# Published sign patterns (outer, inner, sign in front of q*sqrt(2/t)):
# loop x1..x4 carry +q with the + outer root and -q with the - outer root;
# the rod branch carries +a^3/64 = -q with the + outer root.
_PUBLISHED = {
    "loop": {(1, 1, 1): "x1", (1, -1, 1): "x2", (-1, 1, -1): "x3", (-1, -1, -1): "x4"},
    "rod": {(1, 1, -1): "x"},
}


def branch_values(graph: GraphSpec | str, a: float, t0: float | None = None) -> list[BranchValue]:
    """Evaluate all eight sign patterns of the Ferrari branch expression.

    Ferrari-consistent patterns have the q-term sign opposite to the outer
    sign; the other four are kept to test the published labels.
    """
    name = _graph_name(graph)
    prob = QuarticProblem(name, a)
    coeffs = prob.coefficients
    p, q, _ = prob.depressed()
    if t0 is None:
        t0 = resolvent_t0(name, a).t0
    out = []
    for so in (1, -1):
        for sm in (-so, so):
            for si in (1, -1):
                signs = (so, si, sm)
                pub = _PUBLISHED[name].get(signs)
                if pub:
                    label = f"{pub} (published)"
                else:
                    label = f"{'+' if so > 0 else '-'}{'+' if si > 0 else '-'}{'+' if sm > 0 else '-'}"
                    label += " (ferrari)" if sm == -so else " (alt)"
                if t0 <= 0:
                    out.append(BranchValue(label, signs, None, None, pub is not None))
                    continue
                inner = -2.0 * t0 - 2.0 * p + sm * q * math.sqrt(2.0 / t0)
                if inner < 0:
                    out.append(BranchValue(label, signs, None, None, pub is not None))
                    continue
                x = so * 0.5 * math.sqrt(2.0 * t0) + si * 0.5 * math.sqrt(inner) + a / 8.0
                out.append(BranchValue(label, signs, x, scaled_residual(coeffs, x), pub is not None))
    return out


def _bisection_root(name: str, a: float) -> float:
    coeffs = QuarticProblem(name, a).coefficients
    # p(0) = -a/2 < 0 and p(x) > 0 for x >= max(a, 1)
    hi = max(a, 1.0)
    return roots.bisect(lambda x: poly_eval(coeffs, x), 0.0, hi)


@dataclass(frozen=True)
class PositiveRoot:
    x: float
    a: float
    graph: str
    branch: str
    residual: float
    validated: bool
    t0: float
    branches: tuple[BranchValue, ...]

    @property
    def z(self) -> float:
        return self.x ** 3


def positive_root(graph: GraphSpec | str, a: float) -> PositiveRoot:
    """Unique positive root of the graph's quartic via the Ferrari branches.

    Branch labels are not trusted: each real branch is scored by its
    quartic residual and the positive survivor with the smallest residual
    wins. If no branch survives, the bisection root is returned with
    ``validated=False``.
    """
    name = _graph_name(graph)
    prob = QuarticProblem(name, a)
    coeffs = prob.coefficients
    p, q, r = prob.depressed()
    res = resolvent_t0(name, a)
    t0 = res.t0
    cands: list[tuple[float, float, str]] = []
    branches: list[BranchValue] = []
    if t0 > 0 and q != 0.0:
        branches = branch_values(name, a, t0)
        cands = [(b.residual, b.value, b.label) for b in branches if b.valid and b.value > 0]
    else:
        for w in _quadratic_real(p, r, 1e-12):
            if w > 0:
                x = math.sqrt(w) + a / 8.0
                cands.append((scaled_residual(coeffs, x), x, "biquadratic"))
        cands = [c for c in cands if c[0] <= QUARTIC_TOL and c[1] > 0]
    if cands:
        resid, x, label = min(cands)
        return PositiveRoot(x, a, name, label, resid, True, t0, tuple(branches))
    x = _bisection_root(name, a)
    return PositiveRoot(x, a, name, "bisection", scaled_residual(coeffs, x), False, t0, tuple(branches))


def positive_root_bisection(graph: GraphSpec | str, a: float) -> float:
    """Oracle: bisection on the quartic over ``[0, max(a, 1)]``."""
    return _bisection_root(_graph_name(graph), a)

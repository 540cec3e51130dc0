"""Activity sweeps along the symmetric branch, with CSV round-tripping."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterable, TextIO

import numpy as np

from . import roots
from .boundary import solve_symmetric
from .errors import FHCError, InvalidParameter
from .extremality import classify
from .model import GraphSpec, ModelParams

SQRT3 = math.sqrt(3.0)
HEADER = ("lambda", "z1", "z2", "s1", "s2", "s0", "ks", "kappa", "msw", "verdict", "h", "g", "l", "q", "w")
ERROR_VERDICT = "error"


def diagnostics(z: float) -> dict[str, float]:
    """Sign functions of the symmetric ``z``."""
    return {
        "h": z - 0.5,
        "g": (SQRT3 - 1.0) * z - 1.0,
        "l": z - 1.0,
        "q": (SQRT3 - 1.0) * z - 1.0,
        "w": z - SQRT3 + 1.0,
    }


@dataclass(frozen=True)
class ScanRecord:
    lam: float
    z1: float
    z2: float
    s1: float
    s2: float
    s0: float
    ks: float
    kappa: float
    msw: float
    verdict: str
    h: float
    g: float
    l: float
    q: float
    w: float

    def row(self) -> list[str]:
        vals = [getattr(self, f.name) for f in fields(self)]
        return [v if isinstance(v, str) else format(v, ".17g") for v in vals]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "ScanRecord":
        kw = {}
        for f, key in zip(fields(cls), HEADER):
            kw[f.name] = row[key] if key == "verdict" else float(row[key])
        return cls(**kw)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d


def scan_point(graph: GraphSpec, k: int, lam: float) -> ScanRecord:
    try:
        rep = classify(ModelParams.of(graph, k, lam))
    except FHCError:
        nan = float("nan")
        return ScanRecord(lam, nan, nan, nan, nan, nan, nan, nan, nan, ERROR_VERDICT, nan, nan, nan, nan, nan)
    fp, sp = rep.fixed_point, rep.spectrum
    return ScanRecord(lam, fp.z1, fp.z2, sp.s1, sp.s2, sp.s0, rep.ks_value, rep.kappa, rep.msw_value,
                      rep.verdict.value, **diagnostics(fp.z1))


def grid(lam_min: float, lam_max: float, steps: int, spacing: str = "linear") -> np.ndarray:
    if not (0 < lam_min < lam_max):
        raise InvalidParameter(f"need 0 < lambda_min < lambda_max, got {lam_min!r}, {lam_max!r}")
    if steps < 2:
        raise InvalidParameter("steps must be >= 2")
    if spacing == "log":
        return np.geomspace(lam_min, lam_max, steps)
    if spacing == "linear":
        return np.linspace(lam_min, lam_max, steps)
    raise InvalidParameter(f"spacing must be 'linear' or 'log', got {spacing!r}")


def run_scan(graph: GraphSpec, k: int, lam_min: float, lam_max: float, steps: int,
             spacing: str = "linear", *, workers: int = 1) -> list[ScanRecord]:
    """One record per grid activity, in increasing ``lam`` order."""
    lams = [float(v) for v in grid(lam_min, lam_max, steps, spacing)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(lambda l: scan_point(graph, k, l), lams))
    return [scan_point(graph, k, l) for l in lams]


def write_csv(records: Iterable[ScanRecord], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(HEADER)
    for r in records:
        w.writerow(r.row())


def to_csv(records: Iterable[ScanRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(src: TextIO | str) -> list[ScanRecord]:
    if isinstance(src, str):
        src = io.StringIO(src)
    reader = csv.DictReader(src)
    if tuple(reader.fieldnames or ()) != HEADER:
        raise InvalidParameter(f"unexpected CSV header {reader.fieldnames!r}")
    return [ScanRecord.from_row(row) for row in reader]


def sign_flips(records: list[ScanRecord], column: str) -> list[tuple[float, float]]:
    """Consecutive grid intervals where ``column`` changes sign."""
    out = []
    for a, b in zip(records, records[1:]):
        va, vb = getattr(a, column), getattr(b, column)
        if math.isnan(va) or math.isnan(vb):
            continue
        if va == 0.0:
            out.append((a.lam, a.lam))
        elif (va > 0) != (vb > 0) and vb != 0.0:
            out.append((a.lam, b.lam))
    if records and getattr(records[-1], column) == 0.0:
        out.append((records[-1].lam, records[-1].lam))
    return out


def refine_flip(graph: GraphSpec, k: int, column: str, lo: float, hi: float) -> float:
    """Bisect on ``lam`` for the zero of a diagnostic column."""
    if column not in ("h", "g", "l", "q", "w"):
        raise InvalidParameter(f"{column!r} is not a diagnostic column")
    if lo == hi:
        return lo

    def f(lam: float) -> float:
        z = solve_symmetric(ModelParams.of(graph, k, lam)).z1
        return diagnostics(z)[column]

    return roots.bisect(f, lo, hi, xtol=1e-13)

"""Zero-density bound shapes and empirical zero counts off the critical line.

Implied constants are unknown, so the bounds are evaluated with constant 1
and compared with counts as ratios.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from .characters import enumerate_characters
from .lfun import DEFAULT_CONFIG, LEvalConfig, count_density
from .moments import KAPPA_DENSITY


def _bound_shape(sigma: float, T: float, q: int, kappa: float) -> float:
    qT = q * T
    L = math.log(qT)
    return qT ** (2 - 2 * sigma) * L**5 + qT ** (1 + kappa * (1 - 2 * sigma)) * L**2 * math.log(L)


def density_rhs_theorem1(sigma: float, T: float, q: int, kappa: float) -> float:
    """(qT)^{2-2s} log^5(qT) + (qT)^{1+k(1-2s)} log^2(qT) loglog(qT)."""
    if not 0.5 <= sigma <= 1.0:
        raise ValueError("sigma must lie in [1/2, 1]")
    if q < 2:
        raise ValueError("q must be >= 2")
    if T < 3:
        raise ValueError("T must be >= 3")
    if not kappa < KAPPA_DENSITY:
        raise ValueError(f"kappa must be below {KAPPA_DENSITY}")
    return _bound_shape(sigma, T, q, kappa)


def prop_window(T: float, q: int) -> tuple[float, float]:
    """Admissible sigma range [1/2 + 1/L, 1/2 + 28 loglog(qT)/L], L = log(qT)."""
    L = math.log(q * T)
    return 0.5 + 1 / L, 0.5 + 28 * math.log(L) / L


def density_rhs_prop(sigma: float, T: float, q: int, kappa: float) -> float:
    """(qT)^{2-2s} log^5(qT) + (2s-1)(qT)^{1+k(1-2s)} log^3(qT) inside the admissible window."""
    if q < 1 or T <= 1:
        raise ValueError("need q >= 1 and qT > e")
    lo, hi = prop_window(T, q)
    eps = 1e-12
    if not lo - eps <= sigma <= hi + eps:
        raise ValueError(f"sigma = {sigma} outside the window 1/log(qT) <= sigma - 1/2 <= 28 loglog(qT)/log(qT), i.e. [{lo:.6g}, {hi:.6g}]")
    qT = q * T
    L = math.log(qT)
    return qT ** (2 - 2 * sigma) * L**5 + (2 * sigma - 1) * qT ** (1 + kappa * (1 - 2 * sigma)) * L**3


def density_hypothesis_shape(sigma: float, T: float, q: int) -> float:
    qT = q * T
    return qT ** (2 * (1 - sigma)) * math.log(qT)


@dataclass
class DensityRow:
    q: int
    T: float
    sigma: float
    kappa: float
    characters: int
    count: int
    rhs_theorem1: float
    ratio_theorem1: float
    dh_shape: float
    ratio_dh: float

    def to_dict(self) -> dict:
        return asdict(self)


CSV_COLUMNS = tuple(DensityRow.__dataclass_fields__)


def empirical_density_sweep(
    q: int,
    T: float,
    sigmas,
    kappa: float = 0.53,
    cfg: LEvalConfig = DEFAULT_CONFIG,
    threads: int = 1,
) -> list[DensityRow]:
    """Sum over primitive characters mod q of the zero count with Re >= sigma, |Im| <= T."""
    if not 1 <= q <= 10:
        raise ValueError("q must lie in [1, 10]")
    if not 0 < T <= 100:
        raise ValueError("T must lie in (0, 100]")
    if not kappa < KAPPA_DENSITY:
        raise ValueError(f"kappa must be below {KAPPA_DENSITY}")
    sigmas = [float(s) for s in sigmas]
    for s in sigmas:
        if not 0.5 < s <= 1.0:
            raise ValueError(f"sigma must lie in (1/2, 1], got {s}")
    chars = enumerate_characters(q).primitive()
    jobs = [(s, chi) for s in sigmas for chi in chars]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        counts = list(pool.map(lambda job: count_density(job[0], T, job[1], cfg), jobs))
    rows = []
    Tb = max(T, 3.0)
    for i, s in enumerate(sigmas):
        total = sum(counts[i * len(chars) : (i + 1) * len(chars)])
        rhs = _bound_shape(s, Tb, q, kappa)
        dh = density_hypothesis_shape(s, Tb, q)
        rows.append(DensityRow(q, T, s, kappa, len(chars), total, rhs, total / rhs, dh, total / dh))
    return rows


def rows_to_csv(rows: list[DensityRow], extra: dict | None = None) -> str:
    buf = io.StringIO()
    cols = list(CSV_COLUMNS) + list(extra or {})
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        d = r.to_dict()
        d.update(extra or {})
        w.writerow([repr(d[c]) if isinstance(d[c], float) else d[c] for c in cols])
    return buf.getvalue()

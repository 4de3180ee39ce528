"""Rank-frequency tables, Zipf fitting and complexity histograms."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientDataError
from .index import CorpusIndex

_INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True, slots=True)
class RankEntry:
    rank: int
    key: str
    frequency: float
    complexity: int = 0


@dataclass(frozen=True)
class RankTable:
    entries: tuple[RankEntry, ...]
    complexity_filter: int | None = None

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @classmethod
    def from_frequencies(cls, freqs: Sequence[float]) -> RankTable:
        """Table with synthetic keys, ranked by position in ``freqs``."""
        return cls(tuple(RankEntry(i, f"r{i}", f) for i, f in enumerate(freqs, 1)))


@dataclass(frozen=True)
class ZipfFit:
    alpha: float
    beta: float
    constant: float
    fit_error: float
    shifted: bool = True
    n_points: int = 0

    def model(self, rank):
        return self.constant / (rank + self.beta) ** self.alpha

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "constant": self.constant,
                "fit_error": self.fit_error, "shifted": self.shifted, "n_points": self.n_points}


@dataclass(frozen=True, slots=True)
class HistogramRow:
    unique: int
    occurrences: int
    ratio: float


def rank_table(index: CorpusIndex, complexity_filter: int | None = None,
               min_df: int | None = None) -> RankTable:
    """Records ranked by total frequency; ties ordered by key."""
    rows = [
        r for r in index.records.values()
        if (complexity_filter is None or r.complexity == complexity_filter)
        and (min_df is None or r.df >= min_df)
    ]
    rows.sort(key=lambda r: (-r.total_tf, r.key))
    return RankTable(
        tuple(RankEntry(i, r.key, r.total_tf, r.complexity) for i, r in enumerate(rows, 1)),
        complexity_filter,
    )


def _ols(x, y):
    """Least-squares line y = a + s x; returns (a, s, sse)."""
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    slope = float(dx @ (y - ym)) / sxx if sxx > 0 else 0.0
    intercept = ym - slope * xm
    resid = y - intercept - slope * x
    return intercept, slope, float(resid @ resid)


def fit_power_law(ranks, freqs, shifted: bool = True) -> ZipfFit:
    """Fit ``f(r) = C / (r + beta)^alpha`` by least squares in log space.

    For each candidate ``beta`` the exponent and constant are solved in closed
    form; ``beta`` itself is found by golden-section search on ``[0, r_max/2]``.
    """
    r = np.asarray(ranks, dtype=float)
    f = np.asarray(freqs, dtype=float)
    keep = f > 0
    r, f = r[keep], f[keep]
    if len(r) < 3:
        raise InsufficientDataError(f"need at least 3 positive frequencies, got {len(r)}")
    y = np.log(f)

    def sse(beta):
        return _ols(np.log(r + beta), y)[2]

    beta = 0.0
    if shifted:
        lo, hi = 0.0, float(r.max()) / 2
        c = hi - _INV_PHI * (hi - lo)
        d = lo + _INV_PHI * (hi - lo)
        fc, fd = sse(c), sse(d)
        while hi - lo > 1e-9 * (1.0 + abs(lo)):
            if fc <= fd:
                hi, d, fd = d, c, fc
                c = hi - _INV_PHI * (hi - lo)
                fc = sse(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + _INV_PHI * (hi - lo)
                fd = sse(d)
        beta = (lo + hi) / 2
        # the bracket edge can beat the interior when the optimum sits at 0
        if sse(0.0) < sse(beta):
            beta = 0.0
    intercept, slope, err = _ols(np.log(r + beta), y)
    return ZipfFit(
        alpha=0.0 - slope,
        beta=beta,
        constant=math.exp(intercept),
        fit_error=math.sqrt(err / len(r)),
        shifted=shifted,
        n_points=int(len(r)),
    )


def fit_zipf(table: RankTable, shifted: bool = True) -> ZipfFit:
    return fit_power_law([e.rank for e in table], [e.frequency for e in table], shifted)


def complexity_histogram(index: CorpusIndex) -> dict[int, HistogramRow]:
    unique: dict[int, int] = {}
    occ: dict[int, int] = {}
    for r in index.records.values():
        unique[r.complexity] = unique.get(r.complexity, 0) + 1
        occ[r.complexity] = occ.get(r.complexity, 0) + r.total_tf
    total = len(index.records)
    return {c: HistogramRow(unique[c], occ[c], unique[c] / total) for c in sorted(unique)}


def _num(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".6g")


def plot_rows(data, fit: ZipfFit | None = None, with_complexity: bool = False):
    """Header and rows for :func:`export_plot_data`."""
    if isinstance(data, ZipfFit):
        return (["alpha", "beta", "constant", "fit_error"],
                [[_num(data.alpha), _num(data.beta), _num(data.constant), _num(data.fit_error)]])
    if isinstance(data, RankTable):
        header = ["rank", "key", "frequency"]
        if with_complexity:
            header.append("complexity")
        if fit is not None:
            header.append("zipf_model")
        rows = []
        for e in data:
            row = [str(e.rank), e.key, _num(e.frequency)]
            if with_complexity:
                row.append(str(e.complexity))
            if fit is not None:
                row.append(_num(fit.model(e.rank)))
            rows.append(row)
        return header, rows
    if isinstance(data, dict):
        return (["complexity", "unique", "occurrences", "ratio"],
                [[str(c), str(h.unique), str(h.occurrences), _num(h.ratio)] for c, h in sorted(data.items())])
    raise TypeError(f"cannot export {type(data).__name__}")


def export_plot_data(data, path, fit: ZipfFit | None = None, with_complexity: bool = False) -> None:
    """Write a rank table, histogram or fit as CSV."""
    header, rows = plot_rows(data, fit, with_complexity)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

# Copyright (c) 2026-present, the qlio authors
# All rights reserved.
#
# This software may be modified and distributed under the terms
# of the BSD license. See the LICENSE file for details.

"""Per-cell statistics, the Wilcoxon signed-rank test and table rendering."""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping

import numpy as np
import numpy.typing as npt
from scipy import stats as scipy_stats

from .benchmarks import function_names, list_functions
from .errors import AggregationError, DegenerateSampleError, ShapeError

if TYPE_CHECKING:
    from .harness import RunRecord

__all__ = [
    "CellStats",
    "EXACT_LIMIT",
    "WilcoxonResult",
    "Winner",
    "aggregate",
    "render_table",
    "wilcoxon_signed_rank",
    "wilcoxon_test",
]

#: Largest effective sample size for which the exact null distribution is
#: enumerated; larger samples use the normal approximation.
EXACT_LIMIT = 25

DEFAULT_ALPHA = 0.05

CellKey = tuple[str, int]


class Winner(str, enum.Enum):
    QPSO = "qpso"
    LIO = "lio"
    TIE = "tie"


@dataclass(frozen=True)
class WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test outcome.

    ``statistic`` is ``min(W+, W-)`` over the non-zero differences, ranked
    with average ranks for ties.
    """

    statistic: float
    p_value: float
    n_effective: int
    exact: bool


def _signed_rank_counts(doubled_ranks: np.ndarray) -> np.ndarray:
    # counts[s]: number of sign assignments whose doubled positive rank sum
    # is s. Doubling keeps average ranks integral.
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks.tolist():
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    return counts


def wilcoxon_test(a: npt.ArrayLike, b: npt.ArrayLike) -> WilcoxonResult:
    """Paired two-sided Wilcoxon signed-rank test of ``a`` against ``b``.

    Zero differences are dropped, tied absolute differences get average
    ranks, the exact permutation distribution is used up to
    :py:data:`EXACT_LIMIT` non-zero pairs and the normal approximation with
    continuity correction above.
    """
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape or x.size < 1:
        raise ShapeError(
            "paired samples need equal non-zero lengths; got %r and %r"
            % (x.shape, y.shape)
        )

    diffs = x - y
    diffs = diffs[diffs != 0.0]
    n = int(diffs.size)
    if n == 0:
        raise DegenerateSampleError("all paired differences are zero")

    ranks = scipy_stats.rankdata(np.abs(diffs), method="average")
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    w_plus = int(doubled[diffs > 0].sum())
    w_minus = int(doubled.sum()) - w_plus
    t = min(w_plus, w_minus)

    if n <= EXACT_LIMIT:
        count = int(_signed_rank_counts(doubled)[: t + 1].sum())
        p_value = min(1.0, 2 * count / 2**n)
        return WilcoxonResult(t / 2.0, p_value, n, True)

    mean = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_sizes**3 - tie_sizes)) / 48.0
    sd = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
    z = (t / 2.0 - mean + 0.5) / sd
    p_value = min(1.0, 2.0 * float(scipy_stats.norm.cdf(z)))
    return WilcoxonResult(t / 2.0, p_value, n, False)


def wilcoxon_signed_rank(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Two-sided p-value of :py:func:`wilcoxon_test`."""
    return wilcoxon_test(a, b).p_value


@dataclass(frozen=True)
class CellStats:
    """Summary of all runs of one (function, dimension) cell.

    Standard deviations are population deviations (``ddof=0``).
    """

    function: str
    n: int
    runs: int
    mu_mean: float
    mu_std: float
    mu_star_mean: float
    mu_star_std: float
    p_mean: float
    p_std: float
    qpso_time_mean: float
    qpso_time_std: float
    lio_time_mean: float
    lio_time_std: float
    time_ratio_median: float
    wilcoxon_p_value: float
    winner: Winner

    @property
    def key(self) -> CellKey:
        return (self.function, self.n)

    @property
    def qpso_marked(self) -> bool:
        return self.winner in (Winner.QPSO, Winner.TIE)

    @property
    def lio_marked(self) -> bool:
        return self.winner in (Winner.LIO, Winner.TIE)


def _mean_std(values: np.ndarray) -> tuple[float, float]:
    return float(np.mean(values)), float(np.std(values))


def _cell_stats(
    key: CellKey, records: list["RunRecord"], alpha: float
) -> CellStats:
    records = sorted(records, key=lambda r: r.seed)
    mu = np.array([r.mu for r in records], dtype=np.float64)
    mu_star = np.array([r.mu_star for r in records], dtype=np.float64)
    p_star = np.array([r.p_star for r in records], dtype=np.float64)
    qpso_time = np.array([r.qpso_time for r in records], dtype=np.float64)
    lio_time = np.array([r.lio_time for r in records], dtype=np.float64)

    mu_mean, mu_std = _mean_std(mu)
    mu_star_mean, mu_star_std = _mean_std(mu_star)

    try:
        p_value = wilcoxon_signed_rank(mu, mu_star)
    except DegenerateSampleError:
        p_value = 1.0

    if p_value < alpha and mu_star_mean < mu_mean:
        winner = Winner.LIO
    elif p_value < alpha and mu_mean < mu_star_mean:
        winner = Winner.QPSO
    else:
        winner = Winner.TIE

    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(qpso_time > 0, lio_time / qpso_time, np.inf)

    return CellStats(
        function=key[0],
        n=key[1],
        runs=len(records),
        mu_mean=mu_mean,
        mu_std=mu_std,
        mu_star_mean=mu_star_mean,
        mu_star_std=mu_star_std,
        p_mean=float(np.mean(p_star)),
        p_std=float(np.std(p_star)),
        qpso_time_mean=float(np.mean(qpso_time)),
        qpso_time_std=float(np.std(qpso_time)),
        lio_time_mean=float(np.mean(lio_time)),
        lio_time_std=float(np.std(lio_time)),
        time_ratio_median=float(np.median(ratios)),
        wilcoxon_p_value=p_value,
        winner=winner,
    )


def aggregate(
    records: Iterable["RunRecord"],
    runs_per_cell: int | None = None,
    alpha: float = DEFAULT_ALPHA,
) -> dict[CellKey, CellStats]:
    """Group records by (function, n) and summarize every cell.

    :param runs_per_cell:
       Number of runs every cell must hold. Defaults to the size of the
       largest cell, so a cell left short by failed runs is an error.
    :param alpha:
       Significance level deciding the winner of a cell.
    """
    cells: dict[CellKey, list[RunRecord]] = defaultdict(list)
    for record in records:
        cells[(record.function, record.n)].append(record)

    ordered = _ordered(cells)
    for key in ordered:
        seeds = [r.seed for r in cells[key]]
        if len(set(seeds)) != len(seeds):
            raise AggregationError(
                "cell %s n=%d contains duplicated seeds" % key
            )

    expected = runs_per_cell
    if expected is None:
        expected = max((len(group) for group in cells.values()), default=0)
    wrong = [
        "%s n=%d has %d" % (key[0], key[1], len(cells[key]))
        for key in ordered
        if len(cells[key]) != expected
    ]
    if wrong:
        raise AggregationError(
            "cells without the expected %d runs: %s"
            % (expected, "; ".join(wrong))
        )

    return {key: _cell_stats(key, cells[key], alpha) for key in ordered}


def _ordered(keys: Iterable[CellKey]) -> list[CellKey]:
    order = {name: i for i, name in enumerate(function_names())}
    return sorted(keys, key=lambda k: (order.get(k[0], len(order)), k[0], k[1]))


_HEADER = (
    "Function",
    "Dimensions",
    "Q-PSO",
    "Q-PSO+LIO",
    "p",
    "Q-PSO time (s)",
    "LIO time (s)",
)


def format_fitness(mean: float, std: float) -> str:
    return "%.4e ± %.4e" % (mean, std)


def _format_pair(mean: float, std: float) -> str:
    return "%.2f ± %.2f" % (mean, std)


def _mark(text: str, marked: bool) -> str:
    return ("*" if marked else " ") + text


def render_table(
    stats: Mapping[CellKey, CellStats], alpha: float = DEFAULT_ALPHA
) -> str:
    """Render cell statistics as a plain-text comparison table.

    Fitness columns show ``mean ± std`` in scientific notation; winners of
    the Wilcoxon comparison are prefixed with ``*``.
    """
    titles = {info.name: info.title for info in list_functions()}

    rows = [_HEADER]
    for key in _ordered(stats):
        cell = stats[key]
        rows.append(
            (
                titles.get(cell.function, cell.function),
                str(cell.n),
                _mark(
                    format_fitness(cell.mu_mean, cell.mu_std),
                    cell.qpso_marked,
                ),
                _mark(
                    format_fitness(cell.mu_star_mean, cell.mu_star_std),
                    cell.lio_marked,
                ),
                _format_pair(cell.p_mean, cell.p_std),
                _format_pair(cell.qpso_time_mean, cell.qpso_time_std),
                _format_pair(cell.lio_time_mean, cell.lio_time_std),
            )
        )

    widths = [max(len(row[i]) for row in rows) for i in range(len(_HEADER))]

    def line(row: tuple[str, ...]) -> str:
        return "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()

    lines = [line(rows[0]), "  ".join("-" * w for w in widths)]
    lines.extend(line(row) for row in rows[1:])

    if len(rows) > 1:
        lio_wins = sum(1 for c in stats.values() if c.winner == Winner.LIO)
        summary = "LIO significantly better in %d of %d cells" % (
            lio_wins,
            len(stats),
        )
        ratio = float(np.median([c.time_ratio_median for c in stats.values()]))
        # Zero Q-PSO times make the ratio infinite; it is left out then.
        if math.isfinite(ratio):
            summary += "; median LIO time is %.1f%% of Q-PSO time" % (
                100 * ratio
            )
        lines.extend(
            [
                "",
                "* best result by the two-sided Wilcoxon signed-rank test at "
                "alpha=%g; both columns are marked when the difference is "
                "not significant." % alpha,
                summary + ".",
            ]
        )

    return "\n".join(lines) + "\n"

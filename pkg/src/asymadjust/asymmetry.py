"""Median, wave and rescaled-range-ratio statistics for asymmetric adjustment.

Every statistic splits the error-correction term at exactly zero, with zero
itself counted on the positive side. Each has a scalar form that raises on
undefined input and a row-wise ``*_batch`` form for surrogate ensembles that
returns NaN instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .surrogate import DEFAULT_SURROGATES, MonteCarloPValue, mc_pvalues


@dataclass(frozen=True)
class RunsDecomposition:
    positive_runs: tuple[int, ...]
    negative_runs: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.positive_runs) + sum(self.negative_runs)


def _vector(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional series")
    if len(x) == 0:
        raise ValueError("series is empty")
    return x


def median_stat(ect) -> float:
    return float(np.median(_vector(ect)))


def runs_decompose(ect) -> RunsDecomposition:
    """Lengths of maximal same-sign blocks, in order of appearance."""
    pos = _vector(ect) >= 0
    edges = np.flatnonzero(pos[1:] != pos[:-1]) + 1
    bounds = np.concatenate([[0], edges, [len(pos)]])
    lengths = np.diff(bounds)
    signs = pos[bounds[:-1]]
    return RunsDecomposition(
        tuple(int(v) for v in lengths[signs]),
        tuple(int(v) for v in lengths[~signs]),
    )


def wave_stat(ect) -> float:
    """Mean positive-run length minus mean negative-run length."""
    runs = runs_decompose(ect)
    if not runs.positive_runs or not runs.negative_runs:
        raise ValueError("wave statistic needs at least one positive and one negative run")
    return float(np.mean(runs.positive_runs) - np.mean(runs.negative_runs))


def rrr_stat(ect) -> float:
    """(R+ / R-) x (negative semi-variance / positive semi-variance)."""
    x = _vector(ect)
    pos = x >= 0
    r_plus = float(x[pos].sum())
    r_minus = -float(x[~pos].sum())
    ss_plus = float(np.square(x[pos]).sum())
    ss_minus = float(np.square(x[~pos]).sum())
    if r_minus == 0 or ss_plus == 0:
        raise ValueError("rescaled range ratio undefined: one side of the series is empty or all zero")
    return (r_plus / r_minus) * (ss_minus / ss_plus)


def median_batch(rows: np.ndarray) -> np.ndarray:
    return np.median(np.atleast_2d(rows), axis=-1)


def wave_batch(rows: np.ndarray) -> np.ndarray:
    # mean run length on a side = (#observations on that side) / (#runs on that side)
    pos = np.atleast_2d(rows) >= 0
    n_pos = pos.sum(axis=-1)
    n_neg = pos.shape[-1] - n_pos
    starts = np.empty_like(pos)
    starts[:, 0] = True
    starts[:, 1:] = pos[:, 1:] != pos[:, :-1]
    runs_pos = (starts & pos).sum(axis=-1)
    runs_neg = (starts & ~pos).sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        w = n_pos / runs_pos - n_neg / runs_neg
    w[(runs_pos == 0) | (runs_neg == 0)] = np.nan
    return w


def rrr_batch(rows: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(rows)
    pos = x >= 0
    xp = np.where(pos, x, 0.0)
    xn = np.where(pos, 0.0, x)
    r_plus = xp.sum(axis=-1)
    r_minus = -xn.sum(axis=-1)
    ss_plus = np.square(xp).sum(axis=-1)
    ss_minus = np.square(xn).sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (r_plus / r_minus) * (ss_minus / ss_plus)
    out[(r_minus == 0) | (ss_plus == 0)] = np.nan
    return out


STATISTICS = {"median": median_batch, "wave": wave_batch, "rrr": rrr_batch}


@dataclass(frozen=True)
class AsymmetryReport:
    median: MonteCarloPValue
    wave: MonteCarloPValue
    rrr: MonteCarloPValue
    n_surrogates: int
    seed: int

    def row(self) -> dict:
        """Six columns: statistic and p-value per test."""
        return {
            "median": self.median.statistic,
            "median_p": self.median.p_value,
            "wave": self.wave.statistic,
            "wave_p": self.wave.p_value,
            "rrr": self.rrr.statistic,
            "rrr_p": self.rrr.p_value,
        }

    def to_dict(self) -> dict:
        return {
            "n_surrogates": self.n_surrogates,
            "seed": self.seed,
            "median": self.median.to_dict(),
            "wave": self.wave.to_dict(),
            "rrr": self.rrr.to_dict(),
        }


def asym_report(ect, n: int = DEFAULT_SURROGATES, seed: int = 0, keep_null: bool = False) -> AsymmetryReport:
    """Run all three tests against one shared surrogate ensemble of ``ect``.

    A :class:`~asymadjust.surrogate.ReplicaFailure` reports how many replicas
    left a statistic undefined (e.g. a single-signed surrogate for the wave
    test).
    """
    x = _vector(ect)
    res = mc_pvalues(x, STATISTICS, n, seed, vectorized=True, keep_null=keep_null)
    return AsymmetryReport(res["median"], res["wave"], res["rrr"], n, seed)

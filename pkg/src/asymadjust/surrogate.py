"""Fourier phase-randomized surrogates and Monte Carlo p-values.

Replica ``i`` of an ensemble with base seed ``s`` draws its phases from a
PCG64 generator keyed by ``SeedSequence([s, i])``. Replicas therefore do not
depend on evaluation order or chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

DEFAULT_SURROGATES = 10_000
MIN_SURROGATES = 100
RNG_NAME = "numpy PCG64 via SeedSequence([seed, index])"
CHUNK = 1000
TIE_TOL = 1e-10


class ReplicaFailure(RuntimeError):
    """A statistic could not be evaluated on one or more surrogate replicas."""

    def __init__(self, name: str, indices):
        self.name = name
        self.indices = np.asarray(indices, dtype=int)
        super().__init__(
            f"statistic {name!r} undefined on {len(self.indices)} surrogate replica(s), "
            f"first at replica index {int(self.indices[0])}"
        )


def replica_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(index)])))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit seed derived from a base seed and integer keys."""
    words = np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(2, np.uint32)
    return int(words[0]) << 32 | int(words[1])


class SurrogateEnsemble:
    """Lazily generated phase-randomized replicas of one series."""

    def __init__(self, x, count: int = DEFAULT_SURROGATES, seed: int = 0):
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or len(x) < 8:
            raise ValueError("surrogates need a one-dimensional series of length at least 8")
        if not np.all(np.isfinite(x)):
            raise ValueError("surrogate source contains non-finite values")
        self.source = x
        self.source_length = len(x)
        self.count = int(count)
        self.seed = int(seed)
        spectrum = np.fft.rfft(x)
        self._amplitude = np.abs(spectrum)
        self._fixed = spectrum.copy()
        # indices whose phase is randomized: 0 < j < T/2
        self._nrand = (len(x) - 1) // 2

    def phases(self, index: int) -> np.ndarray:
        return replica_rng(self.seed, index).uniform(0.0, 2.0 * math.pi, self._nrand)

    def _build(self, phase_rows: np.ndarray) -> np.ndarray:
        spec = np.tile(self._fixed, (phase_rows.shape[0], 1))
        j = slice(1, self._nrand + 1)
        spec[:, j] = self._amplitude[j] * np.exp(1j * phase_rows)
        return np.fft.irfft(spec, n=self.source_length, axis=-1)

    def member(self, index: int) -> np.ndarray:
        if not 0 <= index < self.count:
            raise IndexError(f"replica {index} outside ensemble of {self.count}")
        return self._build(self.phases(index)[None, :])[0]

    def block(self, start: int, stop: int) -> np.ndarray:
        """Replicas ``start..stop-1`` stacked as rows."""
        stop = min(stop, self.count)
        return self._build(np.array([self.phases(i) for i in range(start, stop)]).reshape(stop - start, self._nrand))

    def blocks(self, chunk: int = CHUNK):
        for start in range(0, self.count, chunk):
            yield start, self.block(start, start + chunk)

    def __len__(self) -> int:
        return self.count

    def __iter__(self):
        for _, rows in self.blocks():
            yield from rows


def fourier_surrogate(x, seed: int = 0) -> np.ndarray:
    """One phase-randomized replica of ``x``.

    All Fourier amplitudes are kept. Phases at 0 < j < T/2 are redrawn
    uniformly on [0, 2 pi); the mean and (for even T) Nyquist terms are kept
    unchanged, so the result is real and has the same periodogram.
    """
    return SurrogateEnsemble(x, count=1, seed=seed).member(0)


@dataclass(frozen=True)
class MonteCarloPValue:
    statistic: float
    p_value: float
    n_surrogates: int
    null_quantiles: dict[str, float]
    exceedances: int
    null_distribution: np.ndarray | None = None

    def rejects(self, alpha: float = 0.05) -> bool:
        return self.p_value <= alpha

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n_surrogates": self.n_surrogates,
            "exceedances": self.exceedances,
            "null_quantiles": dict(self.null_quantiles),
        }


def _as_vectorized(statistic: Callable, vectorized: bool) -> Callable:
    if vectorized:
        return statistic

    def rowwise(rows):
        out = np.empty(len(rows))
        for i, row in enumerate(rows):
            try:
                out[i] = statistic(row)
            except (ValueError, ZeroDivisionError, FloatingPointError):
                out[i] = np.nan
        return out

    return rowwise


def pvalue_from_null(observed: float, null: np.ndarray) -> tuple[float, int]:
    """Upper-tail Monte Carlo p-value ``(1 + #{null >= observed}) / (N + 1)``.

    Null values within ``TIE_TOL * max(1, |observed|)`` below the observed
    value count as ties, and ties count as exceedances.
    """
    tol = TIE_TOL * max(1.0, abs(observed))
    k = int(np.count_nonzero(null >= observed - tol))
    return (1.0 + k) / (len(null) + 1.0), k


def mc_pvalues(
    x,
    statistics: Mapping[str, Callable],
    n: int = DEFAULT_SURROGATES,
    seed: int = 0,
    *,
    vectorized: bool = True,
    keep_null: bool = False,
    chunk: int = CHUNK,
) -> dict[str, MonteCarloPValue]:
    """Evaluate several statistics on one shared surrogate ensemble.

    With ``vectorized=True`` each statistic maps an ``(k, T)`` array to ``k``
    values, returning NaN where it is undefined. Raises
    :class:`ReplicaFailure` naming the first failing replica.
    """
    if n < MIN_SURROGATES:
        raise ValueError(f"need at least {MIN_SURROGATES} surrogates, got {n}")
    x = np.asarray(x, dtype=float)
    funcs = {name: _as_vectorized(f, vectorized) for name, f in statistics.items()}
    observed = {}
    for name, f in funcs.items():
        value = float(f(x[None, :])[0])
        if not math.isfinite(value):
            raise ValueError(f"statistic {name!r} is undefined on the observed series")
        observed[name] = value

    ensemble = SurrogateEnsemble(x, n, seed)
    nulls = {name: np.empty(n) for name in funcs}
    for start, rows in ensemble.blocks(chunk):
        for name, f in funcs.items():
            nulls[name][start : start + len(rows)] = f(rows)

    out = {}
    for name, null in nulls.items():
        bad = np.flatnonzero(~np.isfinite(null))
        if bad.size:
            raise ReplicaFailure(name, bad)
        p, k = pvalue_from_null(observed[name], null)
        q = np.quantile(null, [0.05, 0.5, 0.95])
        out[name] = MonteCarloPValue(
            statistic=observed[name],
            p_value=p,
            n_surrogates=n,
            null_quantiles={"5%": float(q[0]), "50%": float(q[1]), "95%": float(q[2])},
            exceedances=k,
            null_distribution=null if keep_null else None,
        )
    return out


def mc_pvalue(x, statistic: Callable, n: int = DEFAULT_SURROGATES, seed: int = 0, *,
              vectorized: bool = False, keep_null: bool = False) -> MonteCarloPValue:
    """One-sided Monte Carlo p-value of ``statistic`` against phase-randomized surrogates."""
    name = getattr(statistic, "__name__", "statistic")
    return mc_pvalues(x, {name: statistic}, n, seed, vectorized=vectorized, keep_null=keep_null)[name]

"""Seeded generators of test processes and Monte Carlo size/power studies."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .asymmetry import STATISTICS
from .surrogate import RNG_NAME, derive_seed, mc_pvalues

KINDS = ("white", "random_walk", "arfima0d0", "threshold_ar")
BURN_IN = 1000
MIN_TRUNCATION = 1000


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    length: int
    seed: int = 0
    sigma: float = 1.0
    d: float = 0.0
    phi_up: float = 0.0
    phi_down: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.length < 8:
            raise ValueError("length must be at least 8")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError("sigma must be positive")
        if self.kind == "arfima0d0" and not -0.5 < self.d < 1.0:
            raise ValueError(f"d={self.d} outside (-0.5, 1)")
        if self.kind == "threshold_ar":
            for name in ("phi_up", "phi_down"):
                if not -1.0 < getattr(self, name) < 1.0:
                    raise ValueError(f"{name} must lie in (-1, 1)")

    def label(self) -> str:
        if self.kind == "arfima0d0":
            return f"arfima0d0(d={self.d:g})"
        if self.kind == "threshold_ar":
            return f"threshold_ar(up={self.phi_up:g},down={self.phi_down:g})"
        return self.kind


def arfima_weights(d: float, n: int) -> np.ndarray:
    """MA(inf) coefficients of (1-L)^(-d): psi_0 = 1, psi_k = psi_{k-1} (k-1+d)/k."""
    psi = np.empty(n)
    psi[0] = 1.0
    k = np.arange(1, n)
    psi[1:] = np.cumprod((k - 1 + d) / k)
    return psi


def generate(spec: GeneratorSpec) -> np.ndarray:
    """Draw one realization of ``spec`` from a PCG64 generator seeded with ``spec.seed``.

    The first ``T`` standard normals are always the innovations aligned with
    the output sample, so every kind shares them for a given seed; the ARFIMA
    pre-sample innovations are drawn afterwards.
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    T = spec.length
    z = rng.standard_normal(T) * spec.sigma
    if spec.kind == "white":
        return z
    if spec.kind == "random_walk":
        return np.cumsum(z)
    if spec.kind == "arfima0d0":
        pre = rng.standard_normal(BURN_IN) * spec.sigma
        e = np.concatenate([pre, z])
        K = max(T, MIN_TRUNCATION)
        psi = arfima_weights(spec.d, K)
        # direct convolution keeps d = 0 bit-identical to the innovations
        return np.convolve(e, psi)[BURN_IN : BURN_IN + T]
    x = np.empty(T)
    prev = 0.0
    up, down = spec.phi_up, spec.phi_down
    for t in range(T):
        prev = (up if prev >= 0 else down) * prev + z[t]
        x[t] = prev
    return x


def simulate_pvalues(
    spec: GeneratorSpec,
    replications: int,
    surrogates: int,
    seed: int = 0,
    tests=tuple(STATISTICS),
) -> dict[str, np.ndarray]:
    """Monte Carlo p-values of the asymmetry tests over independent replications.

    Each replication demeans the generated path (playing the role of a
    zero-mean error-correction term) and tests it against one surrogate
    ensemble shared by all requested tests. Replication ``r`` uses series
    seed ``derive_seed(seed, r, 0)`` and ensemble seed ``derive_seed(seed, r, 1)``.
    """
    stats = {name: STATISTICS[name] for name in tests}
    out = {name: np.empty(replications) for name in stats}
    for r in range(replications):
        x = generate(replace(spec, seed=derive_seed(seed, r, 0)))
        x = x - x.mean()
        res = mc_pvalues(x, stats, surrogates, derive_seed(seed, r, 1))
        for name in stats:
            out[name][r] = res[name].p_value
    return out


def size_power(
    test: str,
    spec: GeneratorSpec,
    replications: int = 500,
    alpha: float = 0.05,
    surrogates: int = 500,
    seed: int = 0,
) -> float:
    """Fraction of replications in which ``test`` rejects at level ``alpha``."""
    if replications < 100:
        raise ValueError("size/power studies need at least 100 replications")
    if test not in STATISTICS:
        raise ValueError(f"unknown test {test!r}; expected one of {tuple(STATISTICS)}")
    p = simulate_pvalues(spec, replications, surrogates, seed, tests=(test,))[test]
    return float(np.mean(p <= alpha))


def rng_description() -> str:
    return RNG_NAME

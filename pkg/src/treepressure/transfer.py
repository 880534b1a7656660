"""Partition functions Z_n and pressures P_n by a bottom-up recursion over subtree types.

Every non-root vertex of S(k, R) is typed by its last generator t; its
children are the generators u with R[t, u] = 1. The weight of all labellings
of the depth-q subtree below a type-t vertex labelled i is

    W_q(t, i) = prod_{u : R[t, u] = 1} sum_j E(i, j) W_{q-1}(u, j)

and the root, adjacent to all k generators, closes the sum:

    Z_n = sum_i w_i prod_{t = 1..k} sum_j E(i, j) W_{n-1}(t, j).

Two numeric backends are available. ``"exact"`` carries Fractions and is
only practical for n <= ~8, k <= 3; ``"log"`` carries natural logs with -inf
for zero and is the default. Summation always runs in ascending symbol and
child order, so results are reproducible bit for bit.

Two pattern conventions are supported. ``"extendable"`` (default) counts
restrictions to Delta_n of configurations in X_A: labels on the bottom
level must lie in the essential alphabet. ``"local"`` counts every pattern
whose edges inside Delta_n all carry positive weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BackendMismatchError, EmptySystemError, InvalidParameterError
from .interaction import InteractionSpec
from .restriction import RestrictionMatrix, level_counts

MODES = ("extendable", "local")
BACKENDS = ("log", "exact")


def _check(mode, backend, spec):
    if mode not in MODES:
        raise InvalidParameterError(f"mode must be one of {MODES}, got {mode!r}")
    if backend not in BACKENDS:
        raise InvalidParameterError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if backend == "exact" and not spec.is_exact:
        raise BackendMismatchError("exact backend needs a spec with rational entries")


def _log(x):
    with np.errstate(divide="ignore"):
        return np.log(x)


def logsumexp(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """log(sum(exp(x))) along ``axis``; all -inf slices give -inf."""
    m = np.max(x, axis=axis, keepdims=True)
    safe = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(x - safe), axis=axis, keepdims=True)) + safe
    return np.squeeze(out, axis=axis)


@dataclass(frozen=True, eq=False)
class TransferTable:
    q: int
    W: object  # (k, d) float ndarray of logs, or tuple of tuples of Fractions
    mode: str
    backend: str

    def value(self, t: int, i: int):
        if self.backend == "exact":
            return self.W[t][i]
        return float(self.W[t, i])


def _initial(R, spec, mode, backend):
    admissible = set(range(spec.d)) if mode == "local" else set(spec.essential)
    if backend == "exact":
        row = tuple(Fraction(1) if i in admissible else Fraction(0) for i in range(spec.d))
        return tuple(row for _ in range(R.k))
    row = np.array([0.0 if i in admissible else -np.inf for i in range(spec.d)])
    return np.tile(row, (R.k, 1))


def _child_sums(W, spec, backend):
    """C(u, i) = sum_j E(i, j) W(u, j) for every generator type u."""
    d = spec.d
    if backend == "exact":
        E = spec.E_exact
        return tuple(
            tuple(sum((E[i][j] * Wu[j] for j in range(d)), Fraction(0)) for i in range(d)) for Wu in W
        )
    logE = _log(spec.E)
    return logsumexp(logE[None, :, :] + W[:, None, :], axis=2)


def _step(R, spec, W, backend):
    C = _child_sums(W, spec, backend)
    if backend == "exact":
        out = []
        for t in range(R.k):
            row = []
            for i in range(spec.d):
                prod = Fraction(1)
                for u in R.children(t):
                    prod *= C[u][i]
                row.append(prod)
            out.append(tuple(row))
        return tuple(out)
    out = np.zeros((R.k, spec.d))
    for t in range(R.k):
        for u in R.children(t):
            out[t] += C[u]
    return out


def _close_root(R, spec, W, backend):
    """Z from the root given W_{n-1}; returns (exact Fraction or None, logZ)."""
    C = _child_sums(W, spec, backend)
    if backend == "exact":
        Z = Fraction(0)
        for i in range(spec.d):
            prod = spec.w_exact[i]
            for t in range(R.k):
                prod *= C[t][i]
            Z += prod
        return Z, log_fraction(Z)
    per_root = _log(spec.w) + C.sum(axis=0)
    return None, float(logsumexp(per_root, axis=0))


def _root_only(spec, mode, backend):
    admissible = range(spec.d) if mode == "local" else spec.essential
    if backend == "exact":
        Z = sum((spec.w_exact[i] for i in admissible), Fraction(0))
        return Z, log_fraction(Z)
    vals = np.array([math.log(spec.w[i]) for i in admissible] or [-np.inf])
    return None, float(logsumexp(vals, axis=0))


def log_fraction(q: Fraction) -> float:
    if q == 0:
        return -math.inf
    return math.log(q.numerator) - math.log(q.denominator)


def transfer_table(
    R: RestrictionMatrix, spec: InteractionSpec, q: int, mode: str = "extendable", backend: str = "log"
) -> TransferTable:
    _check(mode, backend, spec)
    if q < 0:
        raise InvalidParameterError(f"q must be >= 0, got {q}")
    W = _initial(R, spec, mode, backend)
    for _ in range(q):
        W = _step(R, spec, W, backend)
    return TransferTable(q, W, mode, backend)


@dataclass(frozen=True)
class PartitionResult:
    n: int
    logZ: float
    mode: str
    backend: str
    exactZ: Fraction | None = None
    dead_depth: int | None = None  # first depth with Z = 0, if any


@dataclass(frozen=True)
class SeriesRecord:
    n: int
    L: int
    Delta: int
    logZ: float
    P: float
    exactZ: Fraction | None = None

    @property
    def ratio(self) -> float:
        return float(Fraction(self.L, self.Delta))


@dataclass(frozen=True, eq=False)
class PressureSeries:
    R: RestrictionMatrix
    spec: InteractionSpec
    mode: str
    backend: str
    records: tuple[SeriesRecord, ...] = field(default_factory=tuple)

    @property
    def n_max(self) -> int:
        return self.records[-1].n

    @property
    def P(self) -> list[float]:
        return [r.P for r in self.records]


def _iter_Z(R, spec, n_max, mode, backend):
    """Yield (n, exactZ, logZ) for n = 0..n_max reusing one transfer table."""
    Z, logZ = _root_only(spec, mode, backend)
    yield 0, Z, logZ
    W = _initial(R, spec, mode, backend)
    for n in range(1, n_max + 1):
        Z, logZ = _close_root(R, spec, W, backend)
        yield n, Z, logZ
        if n < n_max:
            W = _step(R, spec, W, backend)


def partition_function(
    R: RestrictionMatrix, spec: InteractionSpec, n: int, mode: str = "extendable", backend: str = "log"
) -> PartitionResult:
    _check(mode, backend, spec)
    if n < 0:
        raise InvalidParameterError(f"n must be >= 0, got {n}")
    dead = None
    for m, Z, logZ in _iter_Z(R, spec, n, mode, backend):
        if dead is None and logZ == -math.inf:
            dead = m
    return PartitionResult(n=n, logZ=logZ, mode=mode, backend=backend, exactZ=Z, dead_depth=dead)


def pressure(
    R: RestrictionMatrix, spec: InteractionSpec, n: int, mode: str = "extendable", backend: str = "log"
) -> float:
    res = partition_function(R, spec, n, mode, backend)
    if res.logZ == -math.inf:
        raise EmptySystemError(f"Z_{n} = 0: admissibility died at depth {res.dead_depth}", res.dead_depth)
    return res.logZ / float(level_counts(R, n).Delta[n])


def pressure_series(
    R: RestrictionMatrix, spec: InteractionSpec, n_max: int, mode: str = "extendable", backend: str = "log"
) -> PressureSeries:
    _check(mode, backend, spec)
    if n_max < 1:
        raise InvalidParameterError(f"n_max must be >= 1, got {n_max}")
    counts = level_counts(R, n_max)
    records = []
    for n, Z, logZ in _iter_Z(R, spec, n_max, mode, backend):
        if logZ == -math.inf:
            raise EmptySystemError(f"Z_{n} = 0: admissibility died at depth {n}", n)
        records.append(SeriesRecord(n, counts.L[n], counts.Delta[n], logZ, logZ / float(counts.Delta[n]), Z))
    return PressureSeries(R, spec, mode, backend, tuple(records))

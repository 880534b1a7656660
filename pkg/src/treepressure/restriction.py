"""Restriction matrices and the restricted trees they carve out of the full k-tree.

A k x k 0/1 matrix R defines the subtree S(k, R): the root plus every word
g_{i1} ... g_{in} with R[i_j, i_{j+1}] = 1 for each adjacent pair. Generators
are indexed from 0 in code and from 1 in the printed reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import HypothesisViolationError, InvalidDimensionError, InvalidParameterError


@dataclass(frozen=True)
class RestrictionMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        k = len(rows)
        if k == 0:
            raise InvalidDimensionError("restriction matrix must have k >= 1")
        if any(len(row) != k for row in rows):
            raise InvalidDimensionError("restriction matrix must be square")
        if any(v not in (0, 1) for row in rows for v in row):
            raise InvalidParameterError("restriction matrix entries must be 0 or 1")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "RestrictionMatrix":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    def children(self, t: int) -> tuple[int, ...]:
        """Generator types that may follow a vertex whose last generator is ``t``."""
        return tuple(u for u, v in enumerate(self.entries[t]) if v)

    def __str__(self):
        return "[" + ",".join("[" + ",".join(map(str, row)) + "]" for row in self.entries) + "]"


def make_full_tree(k: int) -> RestrictionMatrix:
    if k < 1:
        raise InvalidDimensionError(f"k must be >= 1, got {k}")
    return RestrictionMatrix(tuple((1,) * k for _ in range(k)))


def make_generalized_fibonacci(k: int, r: int) -> RestrictionMatrix:
    """R(k, r): entry (i, j) is 0 iff both i and j lie among the last r generators."""
    if k < 1:
        raise InvalidDimensionError(f"k must be >= 1, got {k}")
    if not 0 <= r <= k - 1:
        raise InvalidParameterError(f"need 0 <= r <= k-1, got k={k}, r={r}")
    cut = k - r
    return RestrictionMatrix(
        tuple(tuple(0 if (i >= cut and j >= cut) else 1 for j in range(k)) for i in range(k))
    )


def make_cycle(k: int) -> RestrictionMatrix:
    """Cyclic permutation 1 -> 2 -> ... -> k -> 1 (irreducible, period k, lambda 1)."""
    if k < 1:
        raise InvalidDimensionError(f"k must be >= 1, got {k}")
    return RestrictionMatrix(tuple(tuple(int(j == (i + 1) % k) for j in range(k)) for i in range(k)))


def make_block_cyclic(p: int, m: int) -> RestrictionMatrix:
    """p classes of m generators; every generator of class c may be followed by every
    generator of class c+1 (mod p). Irreducible with period p and lambda = m."""
    if p < 1 or m < 1:
        raise InvalidDimensionError(f"need p, m >= 1, got p={p}, m={m}")
    k = p * m
    return RestrictionMatrix(
        tuple(tuple(int(j // m == (i // m + 1) % p) for j in range(k)) for i in range(k))
    )


def from_descriptor(obj) -> RestrictionMatrix:
    """Build a matrix from its JSON form: an array of 0/1 rows or a family dict."""
    if isinstance(obj, dict):
        kind = obj.get("kind")
        if kind == "full":
            return make_full_tree(int(obj["k"]))
        if kind == "fibonacci":
            return make_generalized_fibonacci(int(obj["k"]), int(obj["r"]))
        if kind == "cycle":
            return make_cycle(int(obj["k"]))
        if kind == "block_cyclic":
            return make_block_cyclic(int(obj["p"]), int(obj["m"]))
        if kind == "matrix":
            return RestrictionMatrix.from_rows(obj["rows"])
        raise InvalidParameterError(f"unknown tree kind {kind!r}")
    if isinstance(obj, (list, tuple)):
        return RestrictionMatrix.from_rows(obj)
    raise InvalidParameterError(f"cannot build a restriction matrix from {obj!r}")


# -- classification ---------------------------------------------------------


class MatrixClass(str, Enum):
    PRIMITIVE = "primitive"
    IRREDUCIBLE = "irreducible"
    REDUCIBLE = "reducible"


@dataclass(frozen=True)
class Classification:
    kind: MatrixClass
    period: int | None = None

    @property
    def is_irreducible(self) -> bool:
        return self.kind is not MatrixClass.REDUCIBLE


def _reachable(adj: Sequence[Sequence[int]], start: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v, a in enumerate(adj[u]):
            if a and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def is_strongly_connected(R: RestrictionMatrix) -> bool:
    k = R.k
    if not any(any(row) for row in R.entries):
        return False
    transpose = [[R.entries[j][i] for j in range(k)] for i in range(k)]
    return len(_reachable(R.entries, 0)) == k and len(_reachable(transpose, 0)) == k


def _bfs_distances(R: RestrictionMatrix) -> list[int]:
    dist = [-1] * R.k
    dist[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in R.children(u):
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def period(R: RestrictionMatrix) -> int:
    """gcd over edges (u, v) of dist(u) + 1 - dist(v), distances by BFS from generator 0."""
    if not is_strongly_connected(R):
        raise HypothesisViolationError("period is defined only for irreducible matrices; got a reducible one")
    dist = _bfs_distances(R)
    return reduce(
        math.gcd,
        (abs(dist[u] + 1 - dist[v]) for u in range(R.k) for v in R.children(u)),
        0,
    )


def is_primitive(R: RestrictionMatrix) -> bool:
    """Check whether some power R^m with m <= k^2 - 2k + 2 is entrywise positive."""
    k = R.k
    M = R.array.astype(bool)
    P = M.copy()
    for _ in range(k * k - 2 * k + 2):
        if P.all():
            return True
        P = (P.astype(np.int64) @ M.astype(np.int64)) > 0
    return bool(P.all())


def classify(R: RestrictionMatrix) -> Classification:
    if not is_strongly_connected(R):
        return Classification(MatrixClass.REDUCIBLE)
    if is_primitive(R):
        return Classification(MatrixClass.PRIMITIVE, 1)
    return Classification(MatrixClass.IRREDUCIBLE, period(R))


def residue_table(R: RestrictionMatrix) -> tuple[tuple[int, ...], ...]:
    """t(i, j) in [0, p-1] such that (R^m)_ij > 0 forces m = t(i, j) mod p."""
    p = period(R)
    dist = _bfs_distances(R)
    return tuple(tuple((dist[j] - dist[i]) % p for j in range(R.k)) for i in range(R.k))


# -- spectral data ----------------------------------------------------------


@dataclass(frozen=True)
class SpectralInfo:
    lam: float
    right_vec: tuple[float, ...]
    left_vec: tuple[float, ...]
    classification: Classification
    residue_table: tuple[tuple[int, ...], ...]
    iterations: int

    @property
    def period(self) -> int:
        return self.classification.period


def _power_iteration(M: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray, int]:
    x = np.full(M.shape[0], 1.0 / M.shape[0])
    rq_prev = math.nan
    for it in range(1, max_iter + 1):
        y = M @ x
        rq = float(x @ y) / float(x @ x)
        # the quotient settles long before the vector does, so also ask for a small residual
        residual = float(np.abs(y - rq * x).max())
        x = y / y.sum()
        if abs(rq - rq_prev) < tol * abs(rq) and residual <= 100 * tol * float(np.abs(y).max()):
            return rq, x, it
        rq_prev = rq
    raise RuntimeError(f"power iteration did not converge in {max_iter} iterations")


def spectral(R: RestrictionMatrix, tol: float = 1e-14, max_iter: int = 100_000) -> SpectralInfo:
    """Perron data of an irreducible R.

    Power iteration runs on R + I, which is primitive whenever R is
    irreducible, so periodic matrices converge too; its Perron value is
    lambda + 1. The right vector has unit sum and left . right = 1.
    """
    cls = classify(R)
    if not cls.is_irreducible:
        raise HypothesisViolationError(f"restriction matrix {R} is reducible")
    M = R.array.astype(float) + np.eye(R.k)
    mu, right, it_r = _power_iteration(M, tol, max_iter)
    _, left, it_l = _power_iteration(M.T, tol, max_iter)
    right = right / right.sum()
    left = left / float(left @ right)
    return SpectralInfo(
        lam=mu - 1.0,
        right_vec=tuple(float(v) for v in right),
        left_vec=tuple(float(v) for v in left),
        classification=cls,
        residue_table=residue_table(R),
        iterations=max(it_r, it_l),
    )


# -- level counts -----------------------------------------------------------


@dataclass(frozen=True)
class LevelCounts:
    L: tuple[int, ...]
    Delta: tuple[int, ...]

    @property
    def n_max(self) -> int:
        return len(self.L) - 1


def level_counts(R: RestrictionMatrix, n_max: int) -> LevelCounts:
    """Exact |L_n| = |R^{n-1}| and |Delta_n| for n = 0..n_max, in Python integers."""
    if n_max < 0:
        raise InvalidParameterError(f"n_max must be >= 0, got {n_max}")
    rows = [R.children(t) for t in range(R.k)]
    v = [1] * R.k  # R^{n-1} applied to the all-ones vector
    L = [1]
    Delta = [1]
    for _ in range(n_max):
        L.append(sum(v))
        Delta.append(Delta[-1] + L[-1])
        v = [sum(v[u] for u in row) for row in rows]
    return LevelCounts(tuple(L), tuple(Delta))


def collapsed_fibonacci(k: int, r: int) -> tuple[tuple[tuple[int, int], tuple[int, int]], float]:
    """Free/restricted vertex-count matrix [[k-r, k-r], [r, 0]] and its Perron value."""
    make_generalized_fibonacci(k, r)  # parameter validation
    matrix = ((k - r, k - r), (r, 0))
    lam = (k - r + math.sqrt((k - r) * (k + 3 * r))) / 2
    return matrix, lam


def collapsed_level_counts(k: int, r: int, n_max: int) -> tuple[int, ...]:
    """u_n + v_n for n = 0..n_max, starting from (u_0, v_0) = (1, 0)."""
    ((a, b), (c, _)), _ = collapsed_fibonacci(k, r)
    u, v = 1, 0
    out = [1]
    for _ in range(n_max):
        u, v = a * u + b * v, c * u
        out.append(u + v)
    return tuple(out)

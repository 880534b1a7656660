"""Finite-size checks of the asymptotic statements.

* last-row ratios |L_n| / |Delta_n| against (lambda - 1) / lambda,
* the sandwich log s (lambda - 1) / lambda <= lim_n P_n <= log s and its
  pre-limit upper estimate,
* limit estimates of P_n and sweeps over the number of generators k.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidParameterError, TreePressureError
from .interaction import InteractionSpec
from .restriction import (
    RestrictionMatrix,
    from_descriptor,
    level_counts,
    make_block_cyclic,
    make_cycle,
    make_full_tree,
    make_generalized_fibonacci,
    spectral,
)
from .transfer import PressureSeries, pressure_series


@dataclass(frozen=True)
class LemmaRecord:
    n: int
    ratio: float
    target: float
    gap: float


def lemma_ratio_check(R: RestrictionMatrix, n_max: int, lam: float | None = None) -> list[LemmaRecord]:
    """|L_n| / |Delta_n| for n = 1..n_max next to its limit (lambda - 1) / lambda.

    Counts are exact integers; the ratio is rounded to float only at the end.
    """
    if lam is None:
        lam = spectral(R).lam
    target = (lam - 1.0) / lam
    counts = level_counts(R, n_max)
    out = []
    for n in range(1, n_max + 1):
        ratio = float(Fraction(counts.L[n], counts.Delta[n]))
        out.append(LemmaRecord(n, ratio, target, abs(ratio - target)))
    return out


def periodic_ratio_limits(R: RestrictionMatrix) -> tuple[float, ...]:
    """Limit of |L_n| / |Delta_n| along each residue class n = c (mod p).

    For an irreducible R of period p, |R^m| ~ lambda^m C_{m mod p} with
    C_c = p * sum over t(i, j) = c of r_i l_j, so the last-row share tends to
    C_{c-1} (1 - lambda^-p) / sum_{j<p} lambda^-j C_{c-1-j}. All classes share
    the value (lambda - 1) / lambda only when the C_c coincide.
    """
    info = spectral(R)
    lam, p, table = info.lam, info.period, info.residue_table
    if lam <= 1.0:
        return (0.0,) * p
    r, l = info.right_vec, info.left_vec
    C = [0.0] * p
    for i in range(R.k):
        for j in range(R.k):
            C[table[i][j]] += p * r[i] * l[j]
    return tuple(
        C[(c - 1) % p] * (1 - lam**-p) / sum(lam**-j * C[(c - 1 - j) % p] for j in range(p)) for c in range(p)
    )


@dataclass(frozen=True)
class TheoremBounds:
    log_s: float
    lam: float

    @property
    def factor(self) -> float:
        """(lambda - 1) / lambda, the limiting share of the last row."""
        return (self.lam - 1.0) / self.lam

    @property
    def degenerate(self) -> bool:
        return self.lam <= 1.0

    @property
    def lower(self) -> float:
        return min(self.log_s * self.factor, self.log_s)

    @property
    def upper(self) -> float:
        return max(self.log_s * self.factor, self.log_s)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def theorem_bounds(spec: InteractionSpec, lam: float) -> TheoremBounds:
    if lam <= 0:
        raise InvalidParameterError(f"lambda must be positive, got {lam}")
    return TheoremBounds(spec.log_s, lam)


def finite_upper_bounds(series: PressureSeries) -> list[float]:
    """(log|w| + sum_{m=1..n} |L_m| log s) / |Delta_n| for every record of the series."""
    spec = series.spec
    log_w = math.log(spec.w_total)
    out = []
    acc = 0
    for rec in series.records:
        if rec.n > 0:
            acc += rec.L
        out.append((log_w + acc * spec.log_s) / rec.Delta)
    return out


@dataclass(frozen=True)
class LimitEstimate:
    estimate: float
    n_used: int
    last_increment: float
    converged: bool


def estimate_limit_pressure(series: PressureSeries, tau: float) -> LimitEstimate:
    """Last computed P_n, flagged converged when both increments among the last
    three records are at most ``tau``. No extrapolation."""
    if len(series.records) < 3:
        raise InvalidParameterError("need at least three records to judge convergence")
    P = series.P
    increments = [abs(P[-1] - P[-2]), abs(P[-2] - P[-3])]
    return LimitEstimate(
        estimate=P[-1],
        n_used=series.n_max,
        last_increment=increments[0],
        converged=all(inc <= tau for inc in increments),
    )


# -- sweeps over k ----------------------------------------------------------

_RULE = re.compile(r"^\s*k\s*(?:(-|//)\s*(\d+))?\s*$")


def r_rule(rule) -> callable:
    """r_k as a function of k: an integer constant, ``"k-c"`` or ``"k//c"``."""
    if isinstance(rule, int):
        return lambda k: rule
    if isinstance(rule, str):
        if rule.strip().lstrip("-").isdigit():
            c = int(rule)
            return lambda k: c
        m = _RULE.match(rule)
        if m:
            op, c = m.group(1), int(m.group(2) or 0)
            if op == "-":
                return lambda k: k - c
            if op == "//":
                return lambda k: k // c
            return lambda k: k
    raise InvalidParameterError(f"cannot read r rule {rule!r}")


def family_matrix(family: dict, k: int) -> RestrictionMatrix:
    kind = family.get("kind")
    if kind == "full":
        return make_full_tree(k)
    if kind == "fibonacci":
        return make_generalized_fibonacci(k, r_rule(family.get("r_rule", 0))(k))
    if kind == "cycle":
        return make_cycle(k)
    if kind == "block_cyclic":
        p = int(family["p"])
        if k % p:
            raise InvalidParameterError(f"block_cyclic with p={p} needs k divisible by p, got k={k}")
        return make_block_cyclic(p, k // p)
    raise InvalidParameterError(f"unknown family kind {kind!r}")


def family_members(family: dict, k_range: Iterable[int] | None) -> list[tuple[int, RestrictionMatrix | Exception]]:
    if family.get("kind") == "explicit":
        out = []
        for rows in family["matrices"]:
            try:
                R = from_descriptor(rows)
                out.append((R.k, R))
            except TreePressureError as exc:
                out.append((len(rows), exc))
        return out
    members = []
    for k in k_range:
        try:
            members.append((k, family_matrix(family, k)))
        except TreePressureError as exc:
            members.append((k, exc))
    return members


@dataclass(frozen=True)
class SweepEntry:
    k: int
    lam: float | None
    bounds: TheoremBounds | None
    limit: LimitEstimate | None
    n_max: int
    logZ: float | None
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class SweepResult:
    family: dict
    entries: tuple[SweepEntry, ...]

    @property
    def estimates(self) -> list[float]:
        return [e.limit.estimate for e in self.entries if e.ok]


def _sweep_one(k, R, spec, n_max, tau, mode, backend):
    if isinstance(R, Exception):
        return SweepEntry(k, None, None, None, n_max, None, f"error: {R}")
    try:
        lam = spectral(R).lam
        series = pressure_series(R, spec, n_max, mode, backend)
        limit = estimate_limit_pressure(series, tau)
    except TreePressureError as exc:
        return SweepEntry(k, None, None, None, n_max, None, f"error: {exc}")
    return SweepEntry(k, lam, theorem_bounds(spec, lam), limit, n_max, series.records[-1].logZ)


def sweep_k(
    family: dict,
    spec: InteractionSpec,
    k_range: Sequence[int] | None,
    n_max: int,
    tau: float = 1e-3,
    mode: str = "extendable",
    backend: str = "log",
    threads: int = 1,
) -> SweepResult:
    """Pressure limit estimates and sandwich bounds for each member of a tree family.

    Entries that fail (reducible matrix, empty system, bad parameters) carry
    the error in ``status`` and the sweep goes on. Output is ordered by k.
    """
    members = family_members(family, k_range)
    args = [(k, R, spec, n_max, tau, mode, backend) for k, R in members]
    if threads == 1:
        entries = [_sweep_one(*a) for a in args]
    else:
        with ThreadPoolExecutor(max_workers=threads or None) as pool:
            entries = list(pool.map(lambda a: _sweep_one(*a), args))
    entries.sort(key=lambda e: e.k)
    return SweepResult(family, tuple(entries))

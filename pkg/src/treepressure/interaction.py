"""Alphabet, pair interactions A, site energies w and the interaction matrix E.

E(i, j) = a_ij * w_j is the weight a parent labelled i contributes over a
child labelled j (the child's site energy is absorbed into the edge). Specs
built from ints, Fractions, Decimals or rational strings keep an exact
rational view next to the float view; float input only gets the float view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import DegenerateInteractionError, DomainError, InvalidDimensionError

NEG_INF_TOKENS = ("-inf", "-infinity", "-Infinity")


def _parse(x):
    """Return (float value, exact Fraction or None)."""
    if isinstance(x, bool):
        raise DomainError(f"boolean is not a numeric entry: {x!r}")
    if isinstance(x, str):
        s = x.strip()
        if s in NEG_INF_TOKENS:
            return -math.inf, None
        try:
            q = Fraction(s)
        except (ValueError, ZeroDivisionError):
            try:
                f = float(s)
            except ValueError:
                raise DomainError(f"cannot parse numeric entry {x!r}") from None
            return f, None
        return float(q), q
    if isinstance(x, (Rational, Decimal)):
        if isinstance(x, Decimal) and not x.is_finite():
            return float(x), None
        q = Fraction(x)
        return float(q), q
    f = float(x)
    return f, None


def _prune(support: np.ndarray) -> tuple[int, ...]:
    """Largest T such that every i in T has some j in T with support[i, j]."""
    alive = np.ones(support.shape[0], dtype=bool)
    while True:
        keep = alive & (support[:, alive].any(axis=1) if alive.any() else False)
        if (keep == alive).all():
            return tuple(int(i) for i in np.flatnonzero(alive))
        alive = keep


@dataclass(frozen=True, eq=False)
class InteractionSpec:
    A: np.ndarray
    w: np.ndarray
    E: np.ndarray
    s: float
    essential: tuple[int, ...]
    argmax_rows: tuple[int, ...]
    A_exact: tuple[tuple[Fraction, ...], ...] | None = None
    w_exact: tuple[Fraction, ...] | None = None
    E_exact: tuple[tuple[Fraction, ...], ...] | None = None
    s_exact: Fraction | None = None

    @property
    def d(self) -> int:
        return len(self.w)

    @property
    def is_exact(self) -> bool:
        return self.E_exact is not None

    @property
    def log_s(self) -> float:
        return math.log(self.s_exact if self.s_exact is not None else self.s)

    @property
    def w_total(self):
        """|w|, the sum of the site energies (exact when available)."""
        return sum(self.w_exact) if self.w_exact is not None else float(self.w.sum())

    @property
    def w_min(self):
        return min(self.w_exact) if self.w_exact is not None else float(self.w.min())

    def row_sums(self):
        if self.E_exact is not None:
            return tuple(sum(row) for row in self.E_exact)
        return tuple(float(v) for v in self.E.sum(axis=1))

    def predecessor_closed(self) -> tuple[int, ...]:
        """Symbols that end backward A-walks of every length (some a_ji > 0 chain)."""
        return _prune(self.A.T > 0)

    @property
    def lower_bound_construction_ok(self) -> bool:
        """Whether some maximizing row admits a predecessor chain of every length,
        as the lower-bound construction for the asymptotic pressure requires."""
        closed = set(self.predecessor_closed())
        return any(i in closed for i in self.argmax_rows)

    def to_json(self) -> dict:
        def enc(v, q):
            return str(q) if q is not None else repr(float(v))

        if self.is_exact:
            A = [[str(q) for q in row] for row in self.A_exact]
            w = [str(q) for q in self.w_exact]
        else:
            A = [[enc(v, None) for v in row] for row in self.A]
            w = [enc(v, None) for v in self.w]
        return {"A": A, "w": w}


def build_interaction(A: Sequence[Sequence], w: Sequence) -> InteractionSpec:
    d = len(w)
    if d == 0:
        raise InvalidDimensionError("alphabet must be nonempty")
    if len(A) != d or any(len(row) != d for row in A):
        raise InvalidDimensionError(f"A must be {d}x{d} to match w")
    A_parsed = [[_parse(x) for x in row] for row in A]
    w_parsed = [_parse(x) for x in w]
    A_f = np.array([[v for v, _ in row] for row in A_parsed], dtype=float)
    w_f = np.array([v for v, _ in w_parsed], dtype=float)
    if not np.isfinite(A_f).all() or (A_f < 0).any():
        raise DomainError("pair interactions must be finite and nonnegative")
    if not np.isfinite(w_f).all() or (w_f <= 0).any():
        raise DomainError("site energies must be finite and strictly positive")

    exact = all(q is not None for row in A_parsed for _, q in row) and all(q is not None for _, q in w_parsed)
    A_q = w_q = E_q = s_q = None
    if exact:
        A_q = tuple(tuple(q for _, q in row) for row in A_parsed)
        w_q = tuple(q for _, q in w_parsed)
        E_q = tuple(tuple(A_q[i][j] * w_q[j] for j in range(d)) for i in range(d))
        sums = [sum(row) for row in E_q]
        s_q = max(sums)
        E_f = np.array([[float(x) for x in row] for row in E_q])
        s = float(s_q)
        argmax = tuple(i for i, v in enumerate(sums) if v == s_q)
    else:
        E_f = A_f * w_f[None, :]
        sums = E_f.sum(axis=1)
        s = float(sums.max())
        argmax = tuple(int(i) for i in np.flatnonzero(sums == s))
    if s <= 0:
        raise DegenerateInteractionError("every row of the interaction matrix is zero (s = 0)")
    return InteractionSpec(
        A=A_f,
        w=w_f,
        E=E_f,
        s=s,
        essential=_prune(E_f > 0),
        argmax_rows=argmax,
        A_exact=A_q,
        w_exact=w_q,
        E_exact=E_q,
        s_exact=s_q,
    )


@dataclass(frozen=True)
class PotentialSpec:
    phi: tuple[tuple[float, ...], ...]
    chi: tuple[float, ...]


def from_potentials(p: PotentialSpec) -> InteractionSpec:
    """a_ij = exp(phi_ij) with exp(-inf) = 0, w_j = exp(chi_j).

    The exact view survives only when every exponent is 0 or -inf.
    """
    phi = [[_parse(x)[0] for x in row] for row in p.phi]
    chi = [_parse(x)[0] for x in p.chi]
    for v in (x for row in phi for x in row):
        if math.isnan(v) or v == math.inf:
            raise DomainError("pair potential entries must be real or -inf")
    for v in chi:
        if not math.isfinite(v):
            raise DomainError("site potential entries must be finite reals")
    trivial = all(v in (0.0, -math.inf) for row in phi for v in row) and all(v == 0.0 for v in chi)
    if trivial:
        A = [[0 if v == -math.inf else 1 for v in row] for row in phi]
        w = [1] * len(chi)
    else:
        A = [[math.exp(v) for v in row] for row in phi]
        w = [math.exp(v) for v in chi]
    return build_interaction(A, w)


def from_json(obj: dict) -> InteractionSpec:
    keys = set(obj)
    if keys == {"A", "w"}:
        return build_interaction(obj["A"], obj["w"])
    if keys == {"phi", "chi"}:
        return from_potentials(PotentialSpec(tuple(map(tuple, obj["phi"])), tuple(obj["chi"])))
    raise DomainError(f"interaction must have keys A/w or phi/chi, got {sorted(keys)}")


def max_row_sum(spec: InteractionSpec):
    return spec.s_exact if spec.s_exact is not None else spec.s


def essential_alphabet(spec: InteractionSpec) -> tuple[int, ...]:
    return spec.essential


def golden_mean(w=(1, 1)) -> InteractionSpec:
    return build_interaction([[1, 1], [1, 0]], list(w))


def full_shift(d: int) -> InteractionSpec:
    return build_interaction([[1] * d for _ in range(d)], [1] * d)

"""Ground truth for the transfer recursion.

``enumerate_tree`` materializes Delta_n as generator words straight from the
relation constraint, and ``brute_force_partition`` sums the weight of every
labelling Delta_n -> {1..d} literally. The sum is exact: weights are scaled
to integers and the total is accumulated modulo a handful of primes below
2**31 (vectorized in numpy) and rebuilt by the Chinese remainder theorem,
with enough primes that the rebuilt integer is the true one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import BackendMismatchError, DegenerateInteractionError, InvalidParameterError, ResourceCapError
from .interaction import InteractionSpec, build_interaction
from .restriction import RestrictionMatrix, level_counts
from .transfer import MODES

DEFAULT_VERTEX_CAP = 10**6
DEFAULT_PATTERN_CAP = 10**7
CHUNK = 1 << 18


@dataclass(frozen=True)
class ExplicitTree:
    vertices: tuple[tuple[int, ...], ...]  # generator words, root = ()
    edges: tuple[tuple[int, int], ...]  # (parent index, child index)
    depth: int

    def level(self, m: int) -> list[int]:
        return [i for i, v in enumerate(self.vertices) if len(v) == m]

    def dump(self) -> str:
        """One vertex per line, ``e`` for the root and ``g1g2...`` otherwise."""
        return "".join((word_str(v) + "\n") for v in self.vertices)


def word_str(word: Sequence[int]) -> str:
    return "".join(f"g{g + 1}" for g in word) if word else "e"


def enumerate_tree(R: RestrictionMatrix, n: int, cap: int = DEFAULT_VERTEX_CAP) -> ExplicitTree:
    if n < 0:
        raise InvalidParameterError(f"n must be >= 0, got {n}")
    size = level_counts(R, n).Delta[n]
    if size > cap:
        raise ResourceCapError(f"Delta_{n} has {size} vertices, above the cap {cap}")
    vertices = [()]
    edges = []
    frontier = [0]
    for _ in range(n):
        nxt = []
        for idx in frontier:
            word = vertices[idx]
            for g in range(R.k):
                if word and not R.entries[word[-1]][g]:
                    continue
                edges.append((idx, len(vertices)))
                nxt.append(len(vertices))
                vertices.append(word + (g,))
        frontier = nxt
    return ExplicitTree(tuple(vertices), tuple(edges), n)


def pattern_is_extendable(pattern: Sequence[int], tree: ExplicitTree, spec: InteractionSpec) -> bool:
    """True iff every edge inside the ball has positive weight and every
    bottom-level label can be continued forever (lies in the essential alphabet)."""
    if any(spec.E[pattern[a], pattern[b]] <= 0 for a, b in tree.edges):
        return False
    essential = set(spec.essential)
    return all(pattern[v] in essential for v in tree.level(tree.depth))


@lru_cache(maxsize=None)
def _prime(index: int) -> int:
    """The index-th prime below 2**31, counting down."""
    start = (1 << 31) - 1 if index == 0 else _prime(index - 1) - 2
    c = start
    while True:
        if c % 2 and all(c % f for f in range(3, math.isqrt(c) + 1, 2)):
            return c
        c -= 2


def _crt(residues: list[int], primes: list[int]) -> int:
    x, M = 0, 1
    for r, p in zip(residues, primes):
        t = ((r - x) * pow(M, -1, p)) % p
        x += M * t
        M *= p
    return x


def _scaled(values: Sequence[Fraction]) -> tuple[list[int], int]:
    D = math.lcm(*(q.denominator for q in values))
    return [int(q * D) for q in values], D


def brute_force_partition(
    R: RestrictionMatrix,
    spec: InteractionSpec,
    n: int,
    mode: str = "extendable",
    cap: int = DEFAULT_PATTERN_CAP,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> Fraction:
    """Exact Z_n as the literal sum over all d**|Delta_n| labellings."""
    if mode not in MODES:
        raise InvalidParameterError(f"mode must be one of {MODES}, got {mode!r}")
    return brute_force_both(R, spec, n, cap, vertex_cap)[mode]


def brute_force_both(
    R: RestrictionMatrix,
    spec: InteractionSpec,
    n: int,
    cap: int = DEFAULT_PATTERN_CAP,
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> dict[str, Fraction]:
    """Literal Z_n in both pattern conventions from a single pass over the labellings."""
    if not spec.is_exact:
        raise BackendMismatchError("brute force needs a spec with rational entries")
    d = spec.d
    size = level_counts(R, n).Delta[n]
    if size * math.log(d) > math.log(cap) + 1:
        raise ResourceCapError(f"{d}^{size} patterns on Delta_{n} exceed the cap {cap}")
    total = d**size
    if total > cap:
        raise ResourceCapError(f"{d}^{size} patterns on Delta_{n} exceed the cap {cap}")
    tree = enumerate_tree(R, n, vertex_cap)

    w_int, Dw = _scaled(spec.w_exact)
    flat_E, De = _scaled([q for row in spec.E_exact for q in row])
    n_edges = len(tree.edges)
    bound = total * max(w_int) * max(max(flat_E), 1) ** n_edges
    primes = []
    while math.prod(primes) <= bound:
        primes.append(_prime(len(primes)))

    bottom = tree.level(n)
    essential = np.zeros(d, dtype=bool)
    essential[list(spec.essential)] = True
    parents = np.array([a for a, _ in tree.edges], dtype=np.int64)
    children = np.array([b for _, b in tree.edges], dtype=np.int64)
    w_mod = [np.array(w_int, dtype=np.int64) % p for p in primes]
    E_mod = [np.array(flat_E, dtype=np.int64) % p for p in primes]
    local = [0] * len(primes)
    extendable = [0] * len(primes)
    place = d ** np.arange(size, dtype=np.int64)
    for lo in range(0, total, CHUNK):
        codes = np.arange(lo, min(lo + CHUNK, total), dtype=np.int64)
        x = (codes[:, None] // place[None, :]) % d  # x[:, v] = label of vertex v
        keep = essential[x[:, bottom]].all(axis=1)
        edge_cells = x[:, parents] * d + x[:, children]
        for idx, p in enumerate(primes):
            weight = w_mod[idx][x[:, 0]]
            factors = E_mod[idx][edge_cells]
            for e in range(n_edges):
                weight = (weight * factors[:, e]) % p
            local[idx] = (local[idx] + int(weight.sum())) % p
            extendable[idx] = (extendable[idx] + int(weight[keep].sum())) % p
    scale = Dw * De**n_edges
    return {
        "local": Fraction(_crt(local, primes), scale),
        "extendable": Fraction(_crt(extendable, primes), scale),
    }


def explicit_tree_partition(
    R: RestrictionMatrix, spec: InteractionSpec, n: int, mode: str = "extendable",
    vertex_cap: int = DEFAULT_VERTEX_CAP,
) -> Fraction:
    """Exact Z_n by eliminating the leaves of the materialized tree one vertex at a time.

    Cheaper than enumeration and still independent of the type-compressed
    recursion; used where d**|Delta_n| is out of reach.
    """
    if not spec.is_exact:
        raise BackendMismatchError("explicit elimination needs a spec with rational entries")
    tree = enumerate_tree(R, n, vertex_cap)
    d = spec.d
    E = spec.E_exact
    admissible = set(range(d)) if mode == "local" else set(spec.essential)
    msg = [None] * len(tree.vertices)
    kids = [[] for _ in tree.vertices]
    for a, b in tree.edges:
        kids[a].append(b)
    for v in reversed(range(len(tree.vertices))):
        if len(tree.vertices[v]) == n:
            msg[v] = [Fraction(1) if i in admissible else Fraction(0) for i in range(d)]
            continue
        out = [Fraction(1)] * d
        for c in kids[v]:
            for i in range(d):
                out[i] *= sum(E[i][j] * msg[c][j] for j in range(d))
        msg[v] = out
    return sum((spec.w_exact[i] * msg[0][i] for i in range(d)), Fraction(0))


def random_rational_spec(d: int, rng) -> InteractionSpec:
    """Random spec with small rational entries; about a third of A is zero.

    ``rng`` is a ``random.Random``; redraws until some row of E is nonzero.
    """
    while True:
        A = [
            [Fraction(0) if rng.random() < 0.3 else Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(d)]
            for _ in range(d)
        ]
        w = [Fraction(rng.randint(1, 5), rng.randint(1, 3)) for _ in range(d)]
        try:
            return build_interaction(A, w)
        except DegenerateInteractionError:
            continue

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treepressure.errors import BackendMismatchError, EmptySystemError, InvalidParameterError
from treepressure.interaction import build_interaction, full_shift, golden_mean
from treepressure.restriction import (
    RestrictionMatrix,
    level_counts,
    make_block_cyclic,
    make_cycle,
    make_full_tree,
    make_generalized_fibonacci,
)
from treepressure.transfer import (
    logsumexp,
    partition_function,
    pressure,
    pressure_series,
    transfer_table,
)
from treepressure.asymptotics import finite_upper_bounds

from test_interaction import specs

LOG2 = math.log(2)


def restriction_matrices(k_max=3):
    return st.integers(1, k_max).flatmap(
        lambda k: st.lists(st.lists(st.integers(0, 1), min_size=k, max_size=k), min_size=k, max_size=k)
    ).map(RestrictionMatrix.from_rows)


@pytest.mark.parametrize("backend", ["exact", "log"])
def test_table_golden_mean_local(backend):
    tab = transfer_table(make_full_tree(2), golden_mean(), 1, "local", backend)
    for t in range(2):
        assert tab.value(t, 0) == pytest.approx(4 if backend == "exact" else math.log(4))
        assert tab.value(t, 1) == pytest.approx(1 if backend == "exact" else 0.0, abs=1e-15)


def test_table_depth_zero():
    spec = build_interaction([[1, 1], [0, 0]], [1, 1])
    R = make_generalized_fibonacci(3, 1)
    assert transfer_table(R, spec, 0, "local", "exact").W == ((1, 1),) * 3
    assert transfer_table(R, spec, 0, "extendable", "exact").W == ((1, 0),) * 3


def test_table_extendable_drops_dead_symbol():
    spec = build_interaction([[1, 1], [0, 0]], [1, 1])
    tab = transfer_table(make_full_tree(2), spec, 1, "extendable", "exact")
    assert tab.W == ((1, 0), (1, 0))
    log_tab = transfer_table(make_full_tree(2), spec, 1, "extendable", "log")
    assert log_tab.value(0, 0) == 0.0 and log_tab.value(0, 1) == -math.inf


@pytest.mark.parametrize(
    "R, spec, n, Z",
    [
        (make_full_tree(2), full_shift(2), 2, 128),
        (make_full_tree(2), golden_mean(), 1, 5),
        (make_full_tree(2), golden_mean(), 2, 41),
        (make_full_tree(2), golden_mean(), 3, 2306),
        (make_full_tree(2), golden_mean((1, 2)), 1, 11),
    ],
)
@pytest.mark.parametrize("mode", ["extendable", "local"])
def test_partition_examples(R, spec, n, Z, mode):
    res = partition_function(R, spec, n, mode, "exact")
    assert res.exactZ == Z
    assert partition_function(R, spec, n, mode, "log").logZ == pytest.approx(math.log(Z), rel=1e-14)


def test_z0_is_sum_of_admissible_site_energies():
    spec = build_interaction([[1, 1], [0, 0]], ["1/2", 3])
    assert partition_function(make_full_tree(2), spec, 0, "local", "exact").exactZ == Fraction(7, 2)
    assert partition_function(make_full_tree(2), spec, 0, "extendable", "exact").exactZ == Fraction(1, 2)


@pytest.mark.parametrize(
    "R", [make_full_tree(2), make_full_tree(3), make_generalized_fibonacci(4, 2), make_cycle(3), make_block_cyclic(2, 2)]
)
def test_full_shift_pressure_is_log_d(R):
    for n in range(0, 10):
        assert pressure(R, full_shift(2), n) == pytest.approx(LOG2, rel=1e-12)


def test_pressure_examples():
    assert pressure(make_full_tree(2), golden_mean(), 1) == pytest.approx(math.log(5) / 3, rel=1e-14)
    assert pressure(make_full_tree(2), golden_mean(), 1) == pytest.approx(0.53648, abs=1e-5)
    single = build_interaction([[1]], [1])
    for n in range(6):
        assert pressure(make_full_tree(3), single, n) == 0.0


def test_pressure_series_matches_brute_force_values():
    series = pressure_series(make_full_tree(2), golden_mean(), 3, backend="exact")
    assert [r.exactZ for r in series.records] == [2, 5, 41, 2306]
    P = series.P
    assert P[1] == pytest.approx(math.log(5) / 3, rel=1e-15)
    assert P[2] == pytest.approx(math.log(41) / 7, rel=1e-15)
    assert P[3] == pytest.approx(math.log(2306) / 15, rel=1e-15)


def test_golden_mean_8_tree_below_log2():
    series = pressure_series(make_full_tree(8), golden_mean(), 12)
    assert all(p <= LOG2 + 1e-12 for p in series.P)
    assert series.records[-1].Delta == level_counts(make_full_tree(8), 12).Delta[12]


def test_empty_system_reports_dead_depth():
    spec = build_interaction([[0, 1], [0, 0]], [1, 1])
    assert spec.essential == ()
    res = partition_function(make_full_tree(2), spec, 3, "extendable")
    assert res.logZ == -math.inf and res.dead_depth == 0
    res = partition_function(make_full_tree(2), spec, 3, "local", "exact")
    assert res.exactZ == 0 and res.dead_depth == 2
    assert partition_function(make_full_tree(2), spec, 1, "local", "exact").exactZ == 1
    with pytest.raises(EmptySystemError) as info:
        pressure(make_full_tree(2), spec, 3, "local")
    assert info.value.dead_depth == 2
    with pytest.raises(EmptySystemError):
        pressure_series(make_full_tree(2), spec, 3, "local")


def test_bad_arguments():
    flt = build_interaction([[1.5, 1.0], [1.0, 0.0]], [1.0, 1.0])
    with pytest.raises(BackendMismatchError):
        partition_function(make_full_tree(2), flt, 2, backend="exact")
    with pytest.raises(InvalidParameterError):
        partition_function(make_full_tree(2), golden_mean(), 2, mode="strict")
    with pytest.raises(InvalidParameterError):
        pressure_series(make_full_tree(2), golden_mean(), 0)


def test_logsumexp_handles_minus_infinity():
    x = np.array([[-np.inf, -np.inf], [0.0, -np.inf], [1000.0, 1000.0]])
    out = logsumexp(x, axis=1)
    assert out[0] == -np.inf
    assert out[1] == 0.0
    assert out[2] == pytest.approx(1000.0 + math.log(2))


def test_log_backend_survives_double_exponential_growth():
    series = pressure_series(make_full_tree(6), golden_mean((1, 2)), 14)
    assert all(math.isfinite(p) for p in series.P)
    assert series.records[-1].logZ > 1e10


def test_reruns_are_bit_identical():
    a = pressure_series(make_generalized_fibonacci(5, 2), golden_mean((1, 3)), 10)
    b = pressure_series(make_generalized_fibonacci(5, 2), golden_mean((1, 3)), 10)
    assert [r.logZ for r in a.records] == [r.logZ for r in b.records]


@settings(max_examples=80, deadline=None)
@given(restriction_matrices(), specs(d_max=3), st.integers(0, 4), st.sampled_from(["extendable", "local"]))
def test_backends_agree(R, spec, n, mode):
    exact = partition_function(R, spec, n, mode, "exact")
    log = partition_function(R, spec, n, mode, "log")
    if exact.exactZ == 0:
        assert log.logZ == -math.inf
        assert log.dead_depth == exact.dead_depth
    else:
        assert log.logZ == pytest.approx(exact.logZ, rel=1e-9, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(restriction_matrices(), specs(d_max=3), st.integers(0, 4))
def test_modes_coincide_when_every_symbol_is_essential(R, spec, n):
    ext = partition_function(R, spec, n, "extendable", "exact").exactZ
    loc = partition_function(R, spec, n, "local", "exact").exactZ
    if len(spec.essential) == spec.d:
        assert ext == loc
    else:
        assert ext <= loc


@settings(max_examples=60, deadline=None)
@given(restriction_matrices(), specs(d_max=3), st.integers(0, 3), st.data())
def test_alphabet_permutation_invariance(R, spec, n, data):
    perm = data.draw(st.permutations(range(spec.d)))
    A = [[spec.A_exact[perm[i]][perm[j]] for j in range(spec.d)] for i in range(spec.d)]
    w = [spec.w_exact[perm[j]] for j in range(spec.d)]
    permuted = build_interaction(A, w)
    for mode in ("extendable", "local"):
        assert (
            partition_function(R, spec, n, mode, "exact").exactZ
            == partition_function(R, permuted, n, mode, "exact").exactZ
        )


@settings(max_examples=60, deadline=None)
@given(restriction_matrices(k_max=4), specs(d_max=3), st.sampled_from(["extendable", "local"]))
def test_pressure_below_pre_limit_upper_estimate(R, spec, mode):
    try:
        series = pressure_series(R, spec, 6, mode)
    except EmptySystemError:
        return
    for rec, bound in zip(series.records, finite_upper_bounds(series)):
        assert rec.P <= bound + 1e-10


def test_random_specs_on_larger_trees_stay_finite():
    rng = random.Random(4)
    for _ in range(10):
        d = rng.randint(2, 4)
        A = [[rng.choice([0, 0.5, 1, 2.5]) for _ in range(d)] for _ in range(d)]
        A[0][0] = 1.0
        w = [rng.uniform(0.2, 3) for _ in range(d)]
        series = pressure_series(make_full_tree(5), build_interaction(A, w), 10)
        assert all(math.isfinite(p) for p in series.P)

import json
import math

import numpy as np
import pytest

from exspec.core import SquareMatrix, column_sums, row_sums
from exspec.ensembles import (
    EnsembleSpec,
    permutation_matrix,
    random_derangement,
    sample,
    uniform_permutation,
)
from exspec.rng import stream


def test_perm_sum_regular_margins_exact():
    spec = EnsembleSpec(kind="perm_sum_regular", n=10, d=3, seed=1)
    A = sample(spec, 0)
    assert np.array_equal(column_sums(A), np.full(10, 3.0))
    assert np.array_equal(row_sums(A), np.full(10, 3.0))


def test_perm_sum_regular_zero_diagonal():
    spec = EnsembleSpec(kind="perm_sum_regular", n=12, d=4, zero_diagonal=True, seed=2)
    for i in range(5):
        A = sample(spec, i)
        assert np.all(np.diag(A.entries) == 0.0)
        assert np.array_equal(column_sums(A), np.full(12, 4.0))


def test_permuted_base_preserves_zero_diagonal():
    rng = stream(61)
    E = rng.normal(size=(8, 8))
    np.fill_diagonal(E, 0.0)
    base = SquareMatrix(E, zero_diagonal=True)
    spec = EnsembleSpec(kind="permuted_base", n=8, seed=3, base=base)
    A = sample(spec, 0)
    assert A.zero_diagonal
    assert sorted(A.entries.ravel()) == sorted(E.ravel())


def test_separately_exchangeable_entry_multiset():
    rng = stream(62)
    base = SquareMatrix(rng.normal(size=(6, 6)))
    spec = EnsembleSpec(kind="separately_exchangeable", n=6, seed=4, base=base)
    A = sample(spec, 0)
    assert sorted(A.entries.ravel()) == sorted(base.entries.ravel())


def test_regular_digraph_structure():
    spec = EnsembleSpec(kind="regular_digraph", n=50, d=5, seed=5)
    for i in range(50):
        A = sample(spec, i)
        vals = np.unique(A.entries)
        assert set(vals) <= {0.0, 1.0}
        assert np.trace(A.entries) == 0.0
        assert np.array_equal(column_sums(A), np.full(50, 5.0))
        assert np.array_equal(row_sums(A), np.full(50, 5.0))


def test_sampling_is_deterministic_in_seed_and_index():
    spec = EnsembleSpec(kind="perm_sum_regular", n=14, d=3, seed=9)
    a = sample(spec, 7).entries
    b = sample(spec, 7).entries
    c = sample(spec, 8).entries
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_uniform_permutation_n1_and_frequencies():
    assert np.array_equal(uniform_permutation(1, 0, 0).map, [0])
    counts = {}
    trials = 60000
    for i in range(trials):
        p = tuple(uniform_permutation(3, 10, i).map)
        counts[p] = counts.get(p, 0) + 1
    assert len(counts) == 6
    for v in counts.values():
        assert abs(v / trials - 1 / 6) < 0.01


def test_uniform_permutation_marginal_uniformity():
    n = 8
    trials = 20000
    first = np.zeros(n)
    for i in range(trials):
        first[uniform_permutation(n, 11, i).map[0]] += 1
    p = 1 / n
    band = 3 * math.sqrt(trials * p * (1 - p))
    assert np.all(np.abs(first - trials * p) < band)


def test_derangement_has_no_fixed_points():
    rng = stream(63)
    for _ in range(50):
        n = int(rng.integers(2, 30))
        p = random_derangement(n, rng)
        assert not np.any(p == np.arange(n))


def test_permutation_matrix_shape():
    P = permutation_matrix(np.array([2, 0, 1]))
    assert np.array_equal(P @ np.array([1.0, 2.0, 3.0]), [3.0, 1.0, 2.0])


def test_spec_validation():
    with pytest.raises(ValueError, match="1 <= d < n"):
        EnsembleSpec(kind="perm_sum_regular", n=5, d=7)
    with pytest.raises(ValueError, match="unknown ensemble kind"):
        EnsembleSpec(kind="bogus", n=5)
    with pytest.raises(ValueError, match="base"):
        EnsembleSpec(kind="permuted_base", n=5)


def test_rejection_cap_error():
    # d = n-1 derangements can never be pairwise disjoint twice over on a
    # tiny n without multi-edges only for the full rotation set; n=3, d=2
    # succeeds, but n=4 d=3 has very low acceptance -- use an impossible one.
    spec = EnsembleSpec(kind="regular_digraph", n=3, d=2, seed=6)
    A = sample(spec, 0)  # complete digraph minus diagonal is the only option
    assert np.array_equal(A.entries, np.ones((3, 3)) - np.eye(3))


def test_spec_json_roundtrip():
    rng = stream(64)
    base = SquareMatrix(rng.normal(size=(4, 4)))
    spec = EnsembleSpec(kind="separately_exchangeable", n=4, seed=12, base=base)
    back = EnsembleSpec.from_json(spec.to_json())
    assert back.kind == spec.kind and back.n == spec.n and back.seed == spec.seed
    assert np.array_equal(back.base.entries, base.entries)
    plain = EnsembleSpec.from_json(
        json.dumps({"kind": "perm_sum_regular", "n": 10, "d": 2})
    )
    assert plain.d == 2 and plain.base is None

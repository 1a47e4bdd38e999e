import numpy as np
import pytest

from featrank.mi import (DiscreteColumn, discretize_equal_frequency,
                         from_labels, mutual_information)


def column(codes, bins=None):
    codes = np.asarray(codes, dtype=np.int64)
    return DiscreteColumn(codes=codes,
                          bin_count=bins or int(codes.max()) + 1)


def mi_from_contingency(table):
    """Direct plug-in evaluation used as the independent oracle."""
    table = np.asarray(table, dtype=float)
    n = table.sum()
    p = table / n
    pa = p.sum(axis=1)
    pb = p.sum(axis=0)
    total = 0.0
    for i in range(table.shape[0]):
        for j in range(table.shape[1]):
            if p[i, j] > 0:
                total += p[i, j] * np.log(p[i, j] / (pa[i] * pb[j]))
    return total


def cells_to_columns(table):
    a, b = [], []
    for i, row in enumerate(table):
        for j, count in enumerate(row):
            a.extend([i] * count)
            b.extend([j] * count)
    return column(a), column(b)


class TestDiscretize:
    def test_median_split(self):
        col = discretize_equal_frequency(np.array([1.0, 2.0, 3.0, 4.0]), 2)
        assert col.codes.tolist() == [0, 0, 1, 1]

    def test_constant_column_collapses(self):
        col = discretize_equal_frequency(np.full(6, 3.3), 4)
        assert col.codes.tolist() == [0] * 6
        assert col.bin_count == 1

    def test_eight_values_four_even_bins(self):
        x = np.array([3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0])
        col = discretize_equal_frequency(x, 4)
        counts = np.bincount(col.codes, minlength=4)
        assert counts.tolist() == [2, 2, 2, 2]

    def test_ties_share_a_bin(self):
        x = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])
        col = discretize_equal_frequency(x, 3)
        assert len(set(col.codes[:3])) == 1
        assert len(set(col.codes[3:])) == 1

    def test_empty_column_errors(self):
        with pytest.raises(ValueError):
            discretize_equal_frequency(np.array([]), 2)


class TestMutualInformation:
    def test_identical_balanced_binary_is_ln2(self):
        col = column([0, 1] * 30)
        assert mutual_information(col, col) == pytest.approx(np.log(2),
                                                             abs=1e-12)

    def test_exact_independence_is_zero(self):
        a, b = cells_to_columns([[25, 25], [25, 25]])
        assert mutual_information(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_association_matches_plugin_formula(self):
        table = [[40, 10], [10, 40]]
        a, b = cells_to_columns(table)
        assert mutual_information(a, b) == pytest.approx(
            mi_from_contingency(table), abs=1e-9)
        assert mutual_information(a, b) == pytest.approx(0.1927, abs=1e-3)

    def test_non_negative_on_random_columns(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            a = column(rng.integers(0, 4, size=60), bins=4)
            b = column(rng.integers(0, 3, size=60), bins=3)
            assert mutual_information(a, b) >= 0.0

    def test_exact_symmetry(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a = column(rng.integers(0, 5, size=80), bins=5)
            b = column(rng.integers(0, 3, size=80), bins=3)
            assert mutual_information(a, b) == mutual_information(b, a)

    def test_self_information_equals_entropy(self):
        rng = np.random.default_rng(2)
        codes = rng.integers(0, 4, size=100)
        col = column(codes, bins=4)
        counts = np.bincount(codes, minlength=4)
        pvec = counts[counts > 0] / codes.size
        entropy = -np.sum(pvec * np.log(pvec))
        assert mutual_information(col, col) == pytest.approx(entropy,
                                                             abs=1e-12)

    def test_joint_permutation_invariance(self):
        rng = np.random.default_rng(3)
        a = rng.integers(0, 3, size=70)
        b = rng.integers(0, 4, size=70)
        perm = rng.permutation(70)
        before = mutual_information(column(a, 3), column(b, 4))
        after = mutual_information(column(a[perm], 3), column(b[perm], 4))
        assert before == after

    def test_length_mismatch_errors(self):
        with pytest.raises(ValueError):
            mutual_information(column([0, 1]), column([0, 1, 0]))

    def test_from_labels_passthrough(self):
        col = from_labels(np.array([0, 2, 1, 2]))
        assert col.bin_count == 3
        assert col.codes.tolist() == [0, 2, 1, 2]

import itertools

import numpy as np
import pytest

from ulam_cluster.clustering import (ApproxConstants, Dataset, MedianSet, approx_k_median,
                                     approx_k_median_outliers, approx_median, best_from_input,
                                     brute_force_k_median, candidate_family, objective,
                                     objective_with_outliers)
from ulam_cluster.exceptions import (BudgetExceeded, DataError, DimensionMismatch,
                                     EmptyDataset, EmptyMedianSet)
from ulam_cluster.permutation import Permutation, ulam_distance, validate

from conftest import oracle_distance, oracle_one_median, random_perm


def rand_set(rng, n, d):
    return [random_perm(rng, d) for _ in range(n)]


def joint_outlier_optimum(S, p):
    """min over all medians in S_d and all admissible exclusion sets, by enumeration."""
    n = len(S)
    keep = n - int(np.floor(p * n + 1e-9))
    best = None
    for y in itertools.permutations(range(1, S[0].d + 1)):
        dist = [ulam_distance(y, x) for x in S]
        for sub in itertools.combinations(range(n), keep):
            c = sum(dist[i] for i in sub)
            best = c if best is None else min(best, c)
    return best


class TestObjective:
    def test_single(self):
        x = validate((2, 1, 3))
        assert objective([x], [x]) == 0

    def test_one_move(self):
        assert objective([(1, 2, 3), (3, 1, 2)], [(1, 2, 3)]) == 1

    def test_random_against_oracle(self, rng):
        S, Y = rand_set(rng, 10, 8), rand_set(rng, 2, 8)
        expected = sum(min(oracle_distance(x, y) for y in Y) for x in S)
        assert objective(S, Y) == expected

    def test_errors(self):
        with pytest.raises(EmptyMedianSet):
            objective([(1, 2)], [])
        with pytest.raises(DimensionMismatch):
            objective([(1, 2)], [(1, 2, 3)])
        with pytest.raises(EmptyDataset):
            Dataset([])

    def test_monotone_in_medians(self, rng):
        S = rand_set(rng, 12, 7)
        Y = rand_set(rng, 2, 7)
        for _ in range(10):
            y = random_perm(rng, 7)
            assert objective(S, Y + [y]) <= objective(S, Y)


class TestObjectiveWithOutliers:
    def test_p_zero(self, rng):
        S, Y = rand_set(rng, 9, 6), rand_set(rng, 2, 6)
        assert objective_with_outliers(S, Y, 0.0) == (objective(S, Y), ())

    def test_far_point_dropped(self):
        x = validate((1, 2, 3, 4, 5, 6))
        z = validate((6, 5, 4, 3, 2, 1))
        S = [x, x, z, x]
        val, out = objective_with_outliers(S, [x], 0.25)
        assert out == (2,)
        assert val == objective(S, [x]) - ulam_distance(z, x)

    def test_ties_drop_higher_index(self):
        x = validate((1, 2, 3))
        y = validate((2, 1, 3))
        _, out = objective_with_outliers([y, x, y, y], [x], 0.5)
        assert out == (2, 3)

    def test_random_against_subsets(self, rng):
        for _ in range(5):
            S, Y = rand_set(rng, 8, 6), rand_set(rng, 2, 6)
            mins = [min(oracle_distance(x, y) for y in Y) for x in S]
            expected = min(sum(mins[i] for i in sub)
                           for size in range(6, 9)
                           for sub in itertools.combinations(range(8), size))
            assert objective_with_outliers(S, Y, 0.25)[0] == expected

    def test_non_increasing_in_p(self, rng):
        S, Y = rand_set(rng, 10, 6), rand_set(rng, 2, 6)
        vals = [objective_with_outliers(S, Y, p)[0] for p in np.linspace(0, 0.9, 10)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))

    def test_bad_p(self):
        with pytest.raises(DataError):
            objective_with_outliers([(1, 2)], [(1, 2)], 1.0)


class TestBestFromInput:
    def test_majority_point(self):
        x = validate((1, 2, 3, 4))
        y = validate((2, 1, 4, 3))
        assert ulam_distance(x, y) == 2
        assert best_from_input([x, x, y], 1) == MedianSet([x])

    def test_k_equals_n(self, rng):
        S = rand_set(rng, 5, 6)
        Y = best_from_input(S, 5)
        assert objective(S, Y) == 0 and len(Y) == 5

    def test_random_against_enumeration(self, rng):
        for _ in range(10):
            S = rand_set(rng, 6, 5)
            expected = min(objective(S, [S[i] for i in c])
                           for size in (1, 2) for c in itertools.combinations(range(6), size))
            assert objective(S, best_from_input(S, 2)) == expected

    def test_tie_breaks_to_first(self):
        S = [(1, 2, 3), (2, 1, 3)]
        assert best_from_input(S, 1)[0].symbols == (1, 2, 3)

    def test_empty(self):
        with pytest.raises(EmptyDataset):
            best_from_input([], 1)


class TestApproxMedian:
    def test_constant(self, rng):
        x = random_perm(rng, 7)
        assert approx_median([x] * 6) == x

    def test_majority_input(self, rng):
        x, y = random_perm(rng, 7), random_perm(rng, 7)
        assert approx_median([x] + [y] * 9) == y

    def test_small_n_falls_back(self, rng):
        S = rand_set(rng, 4, 6)
        assert approx_median(S) == best_from_input(S, 1)[0]

    def test_brute_force_oracle_agrees(self, rng):
        for _ in range(3):
            S = rand_set(rng, 5, 5)
            assert brute_force_k_median(S, 1).objective == oracle_one_median(S)[0]

    def test_ratio_random(self, rng):
        worst = 0.0
        for _ in range(30):
            S = rand_set(rng, 8, 6)
            opt = brute_force_k_median(S, 1).objective
            got = objective(S, [approx_median(S)])
            assert got <= 2 * opt
            assert got <= objective(S, best_from_input(S, 1))
            worst = max(worst, got / opt)
        print(f"max observed ratio {worst:.4f}")

    def test_deterministic(self, rng):
        S = rand_set(rng, 7, 6)
        assert approx_median(S) == approx_median(list(S))

    def test_constants(self):
        c = ApproxConstants()
        assert c.epsilon == 0.03319 and c.alpha == pytest.approx(0.03319 / 11)


class TestBruteForce:
    def test_single(self):
        x = validate((3, 1, 2))
        r = brute_force_k_median([x], 1)
        assert r.medians[0] == x and r.objective == 0

    def test_two_points(self):
        assert brute_force_k_median([(1, 2, 3), (2, 1, 3)], 1).objective == 1

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as exc:
            brute_force_k_median([(1, 2, 3, 4, 5, 6)], 2, budget=1000)
        assert exc.value.required == 720 + 720 * 719 // 2
        with pytest.raises(BudgetExceeded):
            brute_force_k_median([tuple(range(1, 9))], 1)


class TestApproxKMedian:
    def test_two_points_zero(self, rng):
        x, y = random_perm(rng, 6), random_perm(rng, 6)
        r = approx_k_median([x, y, x, y, y, x, x], 2)
        assert r.objective == 0
        assert set(r.medians) == {x, y}

    def test_k1_matches_approx_median(self, rng):
        for _ in range(5):
            S = rand_set(rng, 7, 6)
            assert approx_k_median(S, 1).objective == objective(S, [approx_median(S)])

    def test_ratio_random(self, rng):
        for _ in range(10):
            S = rand_set(rng, 6, 5)
            r = approx_k_median(S, 2)
            assert r.objective == objective(S, r.medians)
            assert r.objective <= 2 * brute_force_k_median(S, 2).objective

    def test_assignment(self, rng):
        S = rand_set(rng, 9, 6)
        r = approx_k_median(S, 2)
        for i, x in enumerate(S):
            d = [ulam_distance(x, m) for m in r.medians]
            assert r.assignment[i] == int(np.argmin(d))

    def test_candidate_family(self, rng):
        S = rand_set(rng, 6, 5)
        fam = candidate_family(S)
        assert fam[:6] == S or set(S) <= set(fam)
        assert len({m.key for m in fam}) == len(fam)

    def test_budget(self, rng):
        S = rand_set(rng, 8, 6)
        with pytest.raises(BudgetExceeded):
            approx_k_median(S, 3, budget=100)
        with pytest.raises(BudgetExceeded):
            approx_k_median(S, 1, recon_budget=10)

    def test_bad_k(self, rng):
        with pytest.raises(DataError):
            approx_k_median(rand_set(rng, 3, 4), 4)


class TestApproxKMedianOutliers:
    def test_p_zero_identical(self, rng):
        S = rand_set(rng, 7, 5)
        assert approx_k_median_outliers(S, 2, 0.0) == approx_k_median(S, 2)

    def test_planted_far_point(self, rng):
        x = random_perm(rng, 6)
        far = validate(tuple(reversed(x.symbols)))
        S = [x] * 5 + [far]
        r = approx_k_median_outliers(S, 1, 1 / 6)
        assert r.medians[0] == x and r.objective == 0 and r.outliers == (5,)

    def test_ratio_random(self, rng):
        for _ in range(4):
            S = rand_set(rng, 8, 5)
            r = approx_k_median_outliers(S, 1, 0.25)
            opt = joint_outlier_optimum(S, 0.25)
            assert opt == brute_force_k_median(S, 1, 0.25).objective
            assert r.objective <= 2 * opt
            assert len(r.outliers) == 2

"""Tests for the closed-form pre-log bounds."""

from fractions import Fraction
from math import ceil

import pytest

from mimo_prelog.analysis.bounds import (
    best_T,
    chi_low,
    chi_star,
    clamp,
    eta,
    prelog_report,
    chi_star_ceiling,
    min_R_for_T,
    t_opt,
    zheng_tse,
)
from mimo_prelog.channel import Dims
from mimo_prelog.exceptions import InvalidDimsError, OutOfScopeError, ValidationError

F = Fraction


def square_growth(L: int) -> Dims:
    return Dims(T=L - 1, R=(L - 1) ** 2, L=L, Q=1)


class TestChiLow:
    def test_many_receive_antennas(self):
        assert chi_low(square_growth(6), 5) == F(25, 6)

    def test_branches_cross(self):
        assert chi_low(Dims(T=2, R=3, L=4, Q=1), 2) == F(3, 2)

    def test_full_rank_correlation_is_trivial(self):
        dims = Dims(T=2, R=3, L=2, Q=2)
        assert chi_low(dims, 1) == 0
        assert chi_low(dims, 2) == -3
        assert clamp(chi_low(dims, 2)) == 0

    def test_too_many_transmit_antennas(self):
        with pytest.raises(OutOfScopeError) as info:
            chi_low(Dims(T=3, R=2, L=6, Q=1), 3)
        assert info.value.error_code == "OutOfScopeError"

    def test_nonpositive_tprime(self, worked_example):
        with pytest.raises(ValidationError):
            chi_low(worked_example, 0)

    def test_branch_monotonicity(self, grid):
        for dims in grid:
            values = [
                (
                    Tp * (1 - F(1, dims.L)),
                    dims.R * (1 - F(Tp * dims.Q, dims.L)),
                )
                for Tp in range(1, dims.R + 1)
            ]
            rising = [v[0] for v in values]
            falling = [v[1] for v in values]
            assert rising == sorted(rising)
            assert falling == sorted(falling, reverse=True)
            assert all(chi_low(dims, Tp) == min(values[Tp - 1]) for Tp in range(1, dims.R + 1))


class TestCrossingPoint:
    @pytest.mark.parametrize(
        "R, L, expected", [(3, 4, F(2)), (3, 6, F(9, 4)), (1, 2, F(1))]
    )
    def test_values(self, R, L, expected):
        assert t_opt(Dims(T=1, R=R, L=L, Q=1)) == expected

    def test_is_exact(self, worked_example):
        assert isinstance(t_opt(worked_example), Fraction)

    def test_bounded_on_grid(self, grid):
        for dims in grid:
            assert t_opt(dims) <= min(dims.R, F(dims.L, dims.Q)), str(dims)

    @pytest.mark.parametrize(
        "dims, expected",
        [
            (Dims(T=3, R=3, L=6, Q=1), F(5, 3)),
            (Dims(T=3, R=3, L=4, Q=1), F(3, 2)),
            (Dims(T=1, R=1, L=2, Q=1), F(1, 2)),
        ],
    )
    def test_eta(self, dims, expected):
        assert eta(dims) == expected


class TestChiStar:
    def test_below_crossing(self):
        assert chi_star(Dims(T=5, R=25, L=6, Q=1)) == F(25, 6)

    def test_above_crossing(self, worked_example):
        assert chi_star(worked_example) == F(5, 3)

    def test_ceiling_attained(self):
        L, Q = 5, 2
        dims = Dims(T=(L - 1) // Q, R=ceil(F((L - 1) ** 2, Q)), L=L, Q=Q)
        assert chi_star(dims) == F(8, 5) == chi_star_ceiling(L, Q)

    def test_never_exceeds_ceiling(self, grid):
        for dims in grid:
            assert chi_star(dims) <= chi_star_ceiling(dims.L, dims.Q), str(dims)

    def test_equals_scan(self, grid):
        for dims in grid:
            Tbest, value = best_T(dims)
            assert value == chi_star(dims), str(dims)
            assert Tbest <= ceil(t_opt(dims)), str(dims)

    def test_is_min_of_both_cases(self, grid):
        for dims in grid:
            assert chi_star(dims) == min(dims.T * (1 - F(1, dims.L)), eta(dims)), str(dims)

    @pytest.mark.parametrize("L", range(2, 9))
    def test_many_antenna_family(self, L):
        dims = square_growth(L)
        assert chi_star(dims) == L - 2 + F(1, L)
        assert t_opt(dims) == L - 1
        if L >= 3:
            assert chi_star(dims) > zheng_tse(dims)[1]


class TestComparisons:
    def test_zheng_tse(self, worked_example):
        assert zheng_tse(worked_example) == (3, F(3, 2))
        assert zheng_tse(Dims(T=5, R=25, L=6, Q=1)) == (3, F(3, 2))
        assert zheng_tse(Dims(T=1, R=1, L=1, Q=1)) == (0, 0)

    def test_best_T(self, worked_example):
        assert best_T(worked_example) == (2, F(5, 3))
        assert best_T(Dims(T=1, R=4, L=6, Q=1))[0] == 1
        assert best_T(Dims(T=5, R=25, L=6, Q=1)) == (5, F(25, 6))

    def test_best_T_ties_go_to_fewer_antennas(self):
        # chi_low(1) = chi_low(2) = 2/3 here
        dims = Dims(T=2, R=2, L=3, Q=1)
        assert chi_low(dims, 1) == chi_low(dims, 2)
        assert best_T(dims)[0] == 1

    def test_minimum_receive_antennas(self):
        assert min_R_for_T(5, 6, 1) == 25
        assert min_R_for_T(3, 6, 1) == 5
        assert t_opt(Dims(T=3, R=5, L=6, Q=1)) >= 3
        assert t_opt(Dims(T=3, R=4, L=6, Q=1)) < 3

    def test_minimum_receive_antennas_unreachable(self):
        with pytest.raises(InvalidDimsError):
            min_R_for_T(2, 4, 2)

    def test_ceiling_rejects_bad_rank(self):
        with pytest.raises(ValidationError):
            chi_star_ceiling(3, 4)


class TestReport:
    def test_worked_example(self, worked_example):
        report = prelog_report(worked_example)
        assert report.chi_low_per_T == {1: F(5, 6), 2: F(5, 3), 3: F(3, 2)}
        assert report.t_opt == F(9, 4)
        assert report.chi_star == report.chi_star_clamped == F(5, 3)
        assert (report.m_star, report.zheng_tse) == (3, F(3, 2))
        assert (report.best_T, report.best_chi) == (2, F(5, 3))
        assert report.chi_star_ceiling == F(25, 6)

    def test_more_transmit_than_receive(self):
        report = prelog_report(Dims(T=4, R=2, L=6, Q=1))
        assert sorted(report.chi_low_per_T) == [1, 2]

    def test_all_values_exact(self, grid):
        for dims in grid[::11]:
            report = prelog_report(dims)
            for name in ("t_opt", "eta", "chi_star", "zheng_tse", "best_chi"):
                assert isinstance(getattr(report, name), Fraction)

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from jacobi_osc.models import kneser_family, reference_model, table_model
from jacobi_osc.recurrence import (
    Minimality,
    ScaledReal,
    SolutionTrace,
    accumulate_Q,
    count_nodes,
    minimality_heuristic,
    second_solution,
    solve_recurrence,
    write_trace_csv,
)


class TestScaledReal:
    def test_normalised(self):
        x = ScaledReal(12.0, 3)
        assert 0.5 <= abs(x.mantissa) < 1 and x.to_float() == 96.0
        assert x.sign == 1 and ScaledReal(0.0, 7).sign == 0 and (-x).sign == -1

    def test_huge_exponents(self):
        big = ScaledReal(0.75, 2**60)
        tiny = ScaledReal(0.5, -(2**60))
        prod = big * tiny
        assert prod.to_float() == 0.375
        assert (big / big).to_float() == 1.0
        assert big > ScaledReal(1e308) > tiny > 0 > -big
        assert big.log2_magnitude == pytest.approx(2**60 + math.log2(0.75))

    @given(st.floats(-1e300, 1e300).filter(lambda v: v != 0), st.integers(-900, 900))
    def test_exact_float_round_trip(self, v, e):
        x = ScaledReal(v, 0) * ScaledReal(1.0, e) / ScaledReal(1.0, e)
        assert x.to_float() == v

    @given(st.floats(-1e10, 1e10), st.floats(-1e10, 1e10))
    def test_order_matches_floats(self, x, y):
        assert (ScaledReal(x) < ScaledReal(y)) == (x < y)
        assert (ScaledReal(x) == ScaledReal(y)) == (x == y)


class TestSolve:
    def test_constant_solution(self):
        tr = solve_recurrence(kneser_family(0.0), 0.0, (1.0, 1.0), 10**6)
        assert np.all(tr.values.to_float() == 1.0)
        assert tr.nodes == []
        assert count_nodes(tr, kneser_family(0.0), 1, 10**6 - 1) == 0

    def test_linear_solution(self):
        tr = solve_recurrence(kneser_family(0.0), 0.0, (0.0, 1.0), 100)
        np.testing.assert_array_equal(tr.values.to_float(), np.arange(0, 101))

    def test_kneser_225_first_nodes(self):
        tr = solve_recurrence(kneser_family(2.25), 0.0, (1.0, 1.0), 100)
        # b(1) = -1/4 flips the sign at once; the first node of the oscillation proper is at 12
        assert tr.nodes == [1, 12]
        assert 8 <= tr.nodes[1] <= 12

    def test_subcritical_node_count_stabilises(self):
        m = kneser_family(0.2)
        tr = solve_recurrence(m, 0.0, (1.0, 1.0), 10**6)
        assert tr.nodes == [5]
        assert count_nodes(tr, m, 10**5, 10**6 - 1) == 0

    def test_geometric_growth_matches_mpmath(self):
        m = kneser_family(0.0)
        N = 3000
        tr = solve_recurrence(m, -10.0, (0.3, 1.0), N)  # grows like ~11.9^n
        assert tr.values.log2_magnitude()[-1] > 10_000
        a = [-1.0] * (N + 2)
        b = [2.0] * (N + 1)
        with mp.workdps(40):
            u, nodes = oracles.brute_nodes(a, b, mp.mpf(-10), 0.3, 1.0, N - 1)
            ref = [float(mp.log(abs(v), 2)) for v in u[-5:]]
        np.testing.assert_allclose(tr.values.log2_magnitude()[-5:], ref, rtol=1e-12)
        assert len(tr.nodes) == nodes == 0

    @pytest.mark.parametrize("tiny", [1e-300, 5e-324])
    def test_tiny_data_rescales_up(self, tiny):
        tr = solve_recurrence(kneser_family(0.0), 0.0, (tiny, tiny), 1000)
        assert np.all(tr.values.to_float() == tiny)
        assert np.all(tr.values.log2_magnitude() == math.log2(tiny))

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 30), st.integers(0, 2**32 - 1), st.floats(-1.0, 4.0))
    def test_against_mpmath_tables(self, n, seed, lam):
        rng = np.random.default_rng(seed)
        a, b = oracles.random_jacobi(rng, n + 1)
        u_prev, u_cur = rng.uniform(-1, 1, size=2)
        model = table_model(a, b)
        tr = solve_recurrence(model, lam, (u_prev, u_cur), n + 1)
        with mp.workdps(40):
            u, nodes = oracles.brute_nodes(a, b[1:], mp.mpf(lam), u_prev, u_cur, n)
            ref = np.array([float(v) for v in u])
        np.testing.assert_allclose(tr.values.to_float(), ref, rtol=1e-8, atol=1e-12 * np.abs(ref).max())
        assert count_nodes(tr, model, 1, n) == nodes

    def test_listed_nodes_satisfy_predicate(self):
        m = kneser_family(5.0)
        tr = solve_recurrence(m, 0.0, (1.0, 1.0), 5000)
        u = tr.values.to_float()
        for n in tr.nodes[:-1] if tr.nodes and tr.nodes[-1] == tr.N else tr.nodes:
            assert u[n] == 0 or m.a(n) * u[n] * u[n + 1] > 0

    def test_domain_error_names_index(self):
        m = table_model([-1.0] * 5, [2.0] * 5)
        with pytest.raises(ValueError, match=r"\(5\)"):
            solve_recurrence(m, 0.0, (1.0, 1.0), 10)

    def test_rejects_zero_init(self):
        with pytest.raises(ValueError):
            solve_recurrence(kneser_family(0.0), 0.0, (0.0, 0.0), 10)


class TestScalingInvariance:
    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.0, 5.0), st.integers(-40, 40), st.booleans())
    def test_power_of_two_scaling_exact(self, c, k, flip):
        alpha = (-1.0 if flip else 1.0) * 2.0**k
        m = kneser_family(c)
        t1 = solve_recurrence(m, 0.0, (1.0, 0.5), 3000)
        t2 = solve_recurrence(m, 0.0, (alpha, 0.5 * alpha), 3000)
        assert t1.nodes == t2.nodes
        assert all(x * alpha == y for x, y in zip(t1.values, t2.values))

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.0, 5.0), st.floats(1e-200, 1e200), st.booleans())
    def test_any_scaling_keeps_nodes(self, c, alpha, flip):
        alpha = -alpha if flip else alpha
        m = kneser_family(c)
        t1 = solve_recurrence(m, 0.0, (1.0, 0.3), 3000)
        t2 = solve_recurrence(m, 0.0, (alpha, 0.3 * alpha), 3000)
        assert t1.nodes == t2.nodes
        u1, u2 = t1.values.to_float(), t2.values.to_float() / alpha
        envelope = np.maximum.accumulate(np.abs(u1))
        assert np.all(np.abs(u2 - u1) <= 1e-10 * envelope)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(1e-3, 1e3))
    def test_Q_scales_inverse_square(self, alpha):
        m = kneser_family(0.1)
        t1 = solve_recurrence(m, 0.0, (1.0, 1.0), 2000, with_Q=True)
        t2 = solve_recurrence(m, 0.0, (alpha, alpha), 2000, with_Q=True)
        np.testing.assert_allclose(t2.Q.values * alpha**2, t1.Q.values, rtol=1e-11)


class TestCountNodes:
    def test_alternating(self):
        tr = SolutionTrace.from_values([1, 1, -1, 1, -1, 1], 1, -1.0)
        assert count_nodes(tr, kneser_family(0.0), 1, 4) == 4

    def test_single_zero_counts_once(self):
        tr = SolutionTrace.from_values([1, 1, 0, -1], 1, -1.0)
        assert count_nodes(tr, kneser_family(0.0), 1, 2) == 1
        assert tr.nodes == [2]

    def test_consecutive_zeros_rejected(self):
        with pytest.raises(ArithmeticError):
            SolutionTrace.from_values([1, 0, 0, 1], 1, -1.0)

    def test_range_checked(self):
        tr = SolutionTrace.from_values([1, 1, 1], 1, -1.0)
        with pytest.raises(ValueError):
            count_nodes(tr, kneser_family(0.0), 1, 2)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(3, 50), st.integers(0, 2**32 - 1))
    def test_sturm_comparison(self, n, seed):
        # b1 <= b2 pointwise: the larger diagonal has at most one more node
        rng = np.random.default_rng(seed)
        a, b1 = oracles.random_jacobi(rng, n + 1)
        b2 = b1 + rng.uniform(0, 2, size=b1.shape)
        init = tuple(rng.uniform(-1, 1, size=2))
        m1, m2 = table_model(a, b1), table_model(a, b2)
        n1 = count_nodes(solve_recurrence(m1, 0.0, init, n + 1), m1, 1, n)
        n2 = count_nodes(solve_recurrence(m2, 0.0, init, n + 1), m2, 1, n)
        assert n2 <= n1 + 1


class TestQ:
    def test_unit(self):
        Q = accumulate_Q(kneser_family(0.0), 1.0, 50)
        np.testing.assert_array_equal(Q.values, np.arange(0, 51))
        assert Q.start == 0 and Q[50] == 50

    def test_a_minus_two(self):
        m = table_model([-2.0] * 30, [4.0] * 30)
        Q = accumulate_Q(m, 1.0, 20)
        np.testing.assert_array_equal(Q.values, np.arange(0, 21) / 2)

    def test_sqrt_example(self):
        u = lambda n: 1.0 if n == 0 else math.sqrt(n)  # noqa: E731
        Q = accumulate_Q(kneser_family(0.0), u, 5)
        with mp.workdps(50):
            ref = mp.fsum(1 / (mp.sqrt(max(j, 1)) * mp.sqrt(j + 1)) for j in range(5))
        assert Q[5] == pytest.approx(float(ref), rel=1e-15)
        assert Q[5] == pytest.approx(2.627637, abs=1e-6)

    def test_long_sum_is_compensated(self):
        m = kneser_family(0.0)
        N = 2 * 10**5
        u = np.sqrt(np.arange(1, N + 3, dtype=float))  # u(n) = sqrt(n+1) from n = 0
        Q = accumulate_Q(m, u, N)
        naive = np.cumsum(1.0 / (u[:-1] * u[1:]))[-1]
        with mp.workdps(30):
            ref = float(mp.fsum(1 / mp.sqrt(mp.mpf(j) * (j + 1)) for j in range(1, N + 1)))
        assert abs(Q[N] - ref) <= 2 * np.spacing(ref)
        assert abs(naive - ref) >= abs(Q[N] - ref)

    def test_zero_u(self):
        with pytest.raises(ValueError, match=r"u\(3\)"):
            accumulate_Q(kneser_family(0.0), lambda n: float(n - 3), 10)

    def test_non_decreasing(self):
        m = reference_model(-1.0, lambda n: math.sqrt(n + 1), minimal=True, sample=100)
        Q = accumulate_Q(m, m.u0, 10**4)
        assert np.all(np.diff(Q.values) > 0)


class TestSecondSolution:
    def test_free(self):
        Q = accumulate_Q(kneser_family(0.0), 1.0, 100)
        np.testing.assert_array_equal(second_solution(1.0, Q).values, np.arange(0, 101))

    def test_a_minus_two(self):
        m = table_model([-2.0] * 30, [4.0] * 30)
        Q = accumulate_Q(m, 1.0, 20)
        np.testing.assert_array_equal(second_solution(1.0, Q).values, np.arange(0, 21) / 2)

    def test_wronskian(self):
        # a(n) (u0(n) uh(n+1) - u0(n+1) uh(n)) = -1 for every n
        m = kneser_family(0.0)
        Q = accumulate_Q(m, 1.0, 1000)
        uh = second_solution(1.0, Q)
        n = np.arange(0, 1000)
        w = m.a(n) * (uh[n + 1] - uh[n])
        np.testing.assert_array_equal(w, -1.0)

    def test_wronskian_sqrt(self):
        m = reference_model(-1.0, lambda n: math.sqrt(n + 1), minimal=True, sample=100)
        Q = accumulate_Q(m, m.u0, 1000)
        uh = second_solution(m.u0, Q)
        n = np.arange(0, 1000)
        w = m.a(n) * (m.u0(n) * uh[n + 1] - m.u0(n + 1) * uh[n])
        np.testing.assert_allclose(w, -1.0, rtol=1e-10)


class TestMinimality:
    def test_linear(self):
        assert minimality_heuristic(np.arange(0, 10**4 + 1.0), threshold=1e3, window=1000) is Minimality.DivergenceLikely

    def test_convergent(self):
        q = 1 - 2.0 ** -np.arange(0, 200.0)
        assert minimality_heuristic(q) is Minimality.GrowthStalled

    def test_log(self):
        q = np.log(np.arange(1, 10**6 + 1.0))
        assert minimality_heuristic(q, threshold=10, window=10**5) is Minimality.DivergenceLikely

    def test_small_but_growing(self):
        assert minimality_heuristic(np.linspace(0, 5, 100)) is Minimality.Inconclusive


class TestTraceCsv:
    def test_format(self):
        tr = solve_recurrence(kneser_family(0.0), 0.0, (0.0, 1.0), 4, with_Q=False)
        lines = write_trace_csv(tr).splitlines()
        assert lines[0] == "n,u_sign,u_log2mag,is_node,Q"
        assert lines[1:] == ["1,1,0.0,0,", "2,1,1.0,0,", "3,1,1.584962500721156,0,", "4,1,2.0,0,"]

    def test_zero_rows_and_Q(self):
        tr = SolutionTrace.from_values([1, 1, 0, -1], 1, -1.0)
        lines = write_trace_csv(tr).splitlines()
        assert lines[2] == "2,0,,1,"

    def test_deterministic(self):
        m = kneser_family(2.25)
        a = write_trace_csv(solve_recurrence(m, 0.0, (1.0, 1.0), 500, with_Q=True))
        b = write_trace_csv(solve_recurrence(m, 0.0, (1.0, 1.0), 500, with_Q=True))
        assert a == b

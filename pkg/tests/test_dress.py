import math

import numpy as np
import pytest
from scipy.optimize import fsolve

from wl_ladder.cfi import complete_graph, cycle_graph, k33_graph, prism_graph
from wl_ladder.dress import (
    DressError,
    EdgeValueMap,
    dress_fixpoint,
    dress_step,
    init_values,
    vertex_norm,
)
from wl_ladder.graph import build_graph, permute, random_graph, random_permutation

LOOP_ULP = 4.5e-16  # one rounding unit either side of 2.0


def naive_dress_step(G, d, loops):
    """Dict-based reference update with plain left-to-right sums."""
    val = {}
    for i, e in enumerate(G.edges):
        val[e] = d[i]
    for u in range(G.n):
        val[(u, u)] = loops[u]

    def get(a, b):
        return val[(a, b) if a <= b else (b, a)]

    norm = [math.sqrt(sum(get(u, x) for x in G.neighbors(u) | {u})) for u in range(G.n)]
    out = []
    for u, v in G.edges:
        common = (G.neighbors(u) | {u}) & (G.neighbors(v) | {v})
        out.append(sum(get(u, x) + get(x, v) for x in common) / (norm[u] * norm[v]))
    return np.array(out)


def complete_root(n):
    # symmetric fixed point on K_n: (n-1) a^2 - 2 (n-2) a - 4 = 0
    return max(np.roots([n - 1, -2 * (n - 2), -4]).real)


class TestInit:
    def test_triangle(self):
        d = init_values(complete_graph(3))
        assert d.loop_values.tolist() == [2, 2, 2]
        assert d.edge_values.tolist() == [1, 1, 1]

    def test_weighted(self):
        d = init_values(build_graph(2, [(0, 1)], [2.5]))
        assert d.loop_values.tolist() == [2, 2]
        assert d.edge_values.tolist() == [2.5]

    def test_edgeless(self):
        d = init_values(build_graph(3, []))
        assert d.loop_values.tolist() == [2, 2, 2]
        assert d.edge_values.size == 0


class TestVertexNorm:
    def test_triangle_at_init(self):
        G = complete_graph(3)
        assert vertex_norm(G, init_values(G), 1) == 2.0

    def test_isolated(self):
        G = build_graph(2, [])
        assert vertex_norm(G, init_values(G), 0) == math.sqrt(2)

    def test_hexagon_fixed_point(self):
        G = cycle_graph(6)
        d, _ = dress_fixpoint(G)
        assert vertex_norm(G, d, 0) == pytest.approx(math.sqrt(2 + 2 * math.sqrt(2)), abs=1e-6)
        assert vertex_norm(G, d, 0) == pytest.approx(2.1974, abs=1e-4)


class TestStep:
    def test_triangle_one_step(self):
        G = complete_graph(3)
        d = dress_step(G, init_values(G))
        # numerator (2+1)+(1+2)+(1+1) = 8 over 2*2
        assert d.edge_values.tolist() == [2.0, 2.0, 2.0]

    def test_matches_naive_reference(self, rng):
        for _ in range(30):
            G = random_graph(rng.randint(2, 10), 0.5, rng)
            d = init_values(G)
            for _ in range(5):
                ref = naive_dress_step(G, d.edge_values, d.loop_values)
                d = dress_step(G, d)
                np.testing.assert_allclose(d.edge_values, ref, rtol=1e-13)

    def test_loops_stay_two(self, rng):
        for _ in range(50):
            G = random_graph(rng.randint(1, 10), rng.uniform(0.1, 0.9), rng)
            d = init_values(G)
            d.edge_values = np.array([rng.uniform(0.05, 5.0) for _ in range(G.m)])
            d.loop_values = np.array([rng.uniform(0.5, 3.0) for _ in range(G.n)])
            out = dress_step(G, d)
            assert np.all(np.abs(out.loop_values - 2.0) <= LOOP_ULP)

    def test_rejects_non_positive(self):
        G = complete_graph(3)
        d = init_values(G)
        d.edge_values[1] = 0.0
        with pytest.raises(DressError):
            dress_step(G, d)
        d.edge_values[1] = -1.0
        with pytest.raises(DressError):
            dress_step(G, d)

    def test_does_not_mutate_input(self):
        G = cycle_graph(5)
        d = init_values(G)
        before = d.copy()
        dress_step(G, d)
        assert np.array_equal(d.edge_values, before.edge_values)


class TestFixpoint:
    @pytest.mark.parametrize("n", range(3, 9))
    def test_complete(self, n):
        d, rep = dress_fixpoint(complete_graph(n))
        assert complete_root(n) == pytest.approx(2.0, abs=1e-12)
        assert np.all(np.abs(d.edge_values - complete_root(n)) < 1e-6)
        assert rep.converged and rep.iterations <= 100

    @pytest.mark.parametrize("n", range(4, 13))
    def test_cycle(self, n):
        d, rep = dress_fixpoint(cycle_graph(n))
        # triangle-free symmetric solve: a (2 + 2a) = 4 + 2a  =>  2 a^2 = 4
        assert np.all(np.abs(d.edge_values - math.sqrt(2)) < 1e-6)
        assert rep.converged

    def test_k33(self):
        d, rep = dress_fixpoint(k33_graph())
        # a (2 + 3a) = 4 + 2a  =>  3 a^2 = 4
        assert np.all(np.abs(d.edge_values - 2 / math.sqrt(3)) < 1e-6)
        assert rep.converged

    def test_single_edge(self):
        d, rep = dress_fixpoint(build_graph(2, [(0, 1)]))
        # a (2 + a) = 4 + 2a  =>  a = 2
        assert d.edge_values[0] == pytest.approx(2.0, abs=1e-6)

    def test_prism_two_classes(self):
        # triangle edges a, matching edges b; every vertex has norm^2 = 2 + 2a + b
        def eqs(x):
            a, b = x
            s = 2 + 2 * a + b
            return [a * s - (4 + 4 * a), b * s - (4 + 2 * b)]

        a, b = fsolve(eqs, [1.0, 1.0], xtol=1e-14)
        assert (a, b) == pytest.approx((1.709, 0.921), abs=1e-3)
        G = prism_graph()
        d, rep = dress_fixpoint(G)
        vals = {e: d.edge_values[i] for i, e in enumerate(G.edges)}
        for e, v in vals.items():
            expected = b if e in {(0, 3), (1, 4), (2, 5)} else a
            assert v == pytest.approx(expected, abs=1e-6)

    def test_no_edges(self):
        d, rep = dress_fixpoint(build_graph(4, []))
        assert (rep.iterations, rep.converged) == (0, True)
        assert d.edge_values.size == 0

    def test_budget_exhaustion_reported(self):
        d, rep = dress_fixpoint(cycle_graph(6), max_iter=1)
        assert rep.iterations == 1
        assert not rep.converged
        assert rep.final_delta >= 1e-6

    def test_report_consistency(self, rng):
        for _ in range(20):
            G = random_graph(rng.randint(2, 9), 0.5, rng)
            _, rep = dress_fixpoint(G, eps=1e-6)
            assert rep.converged == (rep.final_delta < 1e-6)

    def test_bad_parameters(self):
        with pytest.raises(DressError):
            dress_fixpoint(cycle_graph(4), eps=0)
        with pytest.raises(DressError):
            dress_fixpoint(cycle_graph(4), max_iter=0)

    def test_weights_only_seed_the_iteration(self):
        # the fixed point is unique for any positive start
        G = build_graph(3, [(0, 1), (1, 2), (0, 2)], [0.5, 3.0, 7.0])
        d, rep = dress_fixpoint(G, eps=1e-12, max_iter=500)
        assert rep.converged
        np.testing.assert_allclose(d.edge_values, 2.0, atol=1e-9)


class TestProperties:
    def test_bounded_on_unweighted(self, rng):
        for _ in range(200):
            G = random_graph(rng.randint(2, 12), rng.uniform(0.1, 0.9), rng)
            d = init_values(G)
            for _ in range(100):
                d = dress_step(G, d)
                assert np.all(d.edge_values > 0)
                assert np.all(d.edge_values <= 2.0)

    def test_equivariance_each_step(self, rng):
        for _ in range(40):
            G = random_graph(rng.randint(2, 10), rng.uniform(0.2, 0.8), rng)
            perm = random_permutation(G.n, rng)
            P = permute(G, perm)
            d, dp = init_values(G), init_values(P)
            for _ in range(15):
                d, dp = dress_step(G, d), dress_step(P, dp)
                for i, (u, v) in enumerate(G.edges):
                    j = P.edge_index(perm[u], perm[v])
                    assert abs(d.edge_values[i] - dp.edge_values[j]) <= 1e-9
                    # exact summation makes the match bitwise
                    assert d.edge_values[i] == dp.edge_values[j]

    def test_deterministic(self, rng):
        G = random_graph(9, 0.5, rng)
        a, _ = dress_fixpoint(G)
        b, _ = dress_fixpoint(G)
        assert np.array_equal(a.edge_values, b.edge_values)

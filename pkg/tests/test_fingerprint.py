import hashlib
import math
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wl_ladder.cfi import cycle_graph, k33_graph
from wl_ladder.dress import dress_fixpoint
from wl_ladder.fingerprint import (
    EMPTY_DIGEST,
    BinWidthMismatch,
    Fingerprint,
    SparseHistogram,
    Verdict,
    compare_histograms,
    digest,
    histogram_of_values,
    merge,
    merge_all,
    quantize,
    sorted_fingerprint,
)
from wl_ladder.graph import build_graph, permute, random_graph, random_permutation

hists = st.dictionaries(
    st.integers(-10**9, 10**9), st.integers(1, 1000), max_size=12
).map(lambda b: SparseHistogram(b, 1e-6))


class TestQuantize:
    def test_sqrt2(self):
        h = histogram_of_values([math.sqrt(2)])
        assert h.bins == {1414214: 1}

    def test_three_twos(self):
        assert quantize(Fingerprint((2.0, 2.0, 2.0))).bins == {2000000: 3}

    def test_half_rounds_up(self):
        assert histogram_of_values([2.5], 1.0).bins == {3: 1}
        assert histogram_of_values([2.4999], 1.0).bins == {2: 1}

    def test_empty(self):
        h = quantize(Fingerprint(()))
        assert h.bins == {} and h.total == 0

    def test_bad_width(self):
        with pytest.raises(ValueError):
            histogram_of_values([1.0], 0.0)

    def test_hexagon_fingerprint(self):
        d, _ = dress_fixpoint(cycle_graph(6))
        fp = sorted_fingerprint(d)
        assert len(fp) == 6
        assert quantize(fp).bins == {1414214: 6}

    def test_fingerprint_sorted(self, rng):
        d, _ = dress_fixpoint(random_graph(9, 0.5, rng))
        fp = sorted_fingerprint(d)
        assert list(fp.values) == sorted(fp.values)

    def test_loops_optional(self):
        d, _ = dress_fixpoint(k33_graph())
        assert len(sorted_fingerprint(d)) == 9
        assert len(sorted_fingerprint(d, include_loops=True)) == 15

    def test_json_round_trip(self):
        h = SparseHistogram({5: 2, -3: 1}, 1e-4)
        assert SparseHistogram.from_json(h.to_json()) == h

    def test_json_total_checked(self):
        with pytest.raises(ValueError):
            SparseHistogram.from_json({"bin_width": 1e-6, "bins": [[1, 2]], "total": 3})


class TestMerge:
    @given(hists, hists)
    def test_commutative(self, a, b):
        assert merge(a, b) == merge(b, a)

    @given(hists, hists, hists)
    def test_associative(self, a, b, c):
        assert merge(merge(a, b), c) == merge(a, merge(b, c))

    @given(hists)
    def test_identity(self, a):
        assert merge(a, SparseHistogram({}, 1e-6)) == a

    @given(hists, hists)
    def test_total_adds(self, a, b):
        assert merge(a, b).total == a.total + b.total

    @given(st.lists(st.floats(0.01, 3.0), max_size=30), st.lists(st.floats(0.01, 3.0), max_size=30))
    def test_quantize_is_a_homomorphism(self, xs, ys):
        assert histogram_of_values(xs + ys) == merge(histogram_of_values(xs), histogram_of_values(ys))

    def test_merge_all(self):
        hs = [SparseHistogram({1: 1}), SparseHistogram({1: 2, 4: 1})]
        assert merge_all(hs).bins == {1: 3, 4: 1}

    def test_width_mismatch(self):
        with pytest.raises(BinWidthMismatch):
            merge(SparseHistogram({}, 1e-6), SparseHistogram({}, 1e-5))
        with pytest.raises(BinWidthMismatch):
            compare_histograms(SparseHistogram({}, 1e-6), SparseHistogram({}, 1e-5))


class TestCompare:
    def test_equal(self):
        a = SparseHistogram({1: 2})
        assert compare_histograms(a, SparseHistogram({1: 2})) is Verdict.NOT_DISTINGUISHED

    def test_differ(self):
        assert compare_histograms(SparseHistogram({1: 2}), SparseHistogram({1: 3})) is Verdict.DISTINGUISHED

    @settings(max_examples=60)
    @given(st.lists(st.floats(0.01, 3.0), min_size=1, max_size=20), st.data())
    def test_value_order_irrelevant(self, xs, data):
        perm = data.draw(st.permutations(xs))
        for w in (1e-6, 1e-4, 1e-2):
            assert compare_histograms(histogram_of_values(xs, w), histogram_of_values(perm, w)) is Verdict.NOT_DISTINGUISHED

    def test_isomorphic_graphs_never_distinguished(self, rng):
        for _ in range(60):
            G = random_graph(rng.randint(2, 11), rng.uniform(0.2, 0.8), rng)
            P = permute(G, random_permutation(G.n, rng))
            hg = quantize(sorted_fingerprint(dress_fixpoint(G)[0]))
            hp = quantize(sorted_fingerprint(dress_fixpoint(P)[0]))
            assert compare_histograms(hg, hp) is Verdict.NOT_DISTINGUISHED
            assert digest(hg) == digest(hp)


class TestDigest:
    def test_empty_constant(self):
        assert EMPTY_DIGEST == "4a39cf9ce5567fde744cd2df6634d6ea"
        assert digest(SparseHistogram({}, 1e-6)) == EMPTY_DIGEST

    def test_independent_recomputation(self):
        h = SparseHistogram({2000000: 3, 1414214: 6})
        raw = struct.pack("<d", 1e-6) + b"".join(struct.pack("<qq", b, c) for b, c in sorted(h.bins.items()))
        assert digest(h) == hashlib.blake2b(raw, digest_size=16).hexdigest()

    def test_shape(self):
        d = digest(SparseHistogram({1: 1}))
        assert len(d) == 32 and int(d, 16) >= 0

    def test_insertion_order_irrelevant(self):
        assert digest(SparseHistogram({1: 1, 2: 2})) == digest(SparseHistogram({2: 2, 1: 1}))

    def test_width_is_hashed(self):
        assert digest(SparseHistogram({}, 1e-5)) != EMPTY_DIGEST

    def test_counts_matter(self):
        assert digest(SparseHistogram({1: 1})) != digest(SparseHistogram({1: 2}))

    def test_edgeless_graph_digests_empty(self):
        a = build_graph(3, [])
        hg = quantize(sorted_fingerprint(dress_fixpoint(a)[0]))
        assert digest(hg) == EMPTY_DIGEST

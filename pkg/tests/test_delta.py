import math
from collections import Counter
from itertools import combinations

import numpy as np
import pytest

from wl_ladder.cfi import complete_graph, cycle_graph, path_graph
from wl_ladder.delta import (
    Mode,
    SweepConfig,
    colex_rank,
    colex_unrank,
    compare_delta,
    delta_multiset,
    delta_pooled,
    delta_sweep,
    enumerate_subsets,
    split_ranges,
    subset_count,
)
from wl_ladder.dress import dress_fixpoint
from wl_ladder.fingerprint import (
    EMPTY_DIGEST,
    Verdict,
    digest,
    merge_all,
    quantize,
    sorted_fingerprint,
)
from wl_ladder.graph import build_graph, induced_delete, permute, random_graph, random_permutation


def colex_key(s):
    return tuple(reversed(s))


class TestEnumeration:
    def test_four_choose_two(self):
        subs = list(enumerate_subsets(4, 2))
        assert subs == [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]

    @pytest.mark.parametrize("n,k", [(5, 0), (5, 1), (6, 3), (7, 4), (7, 7), (8, 2)])
    def test_matches_itertools(self, n, k):
        subs = list(enumerate_subsets(n, k))
        assert subs == sorted(combinations(range(n), k), key=colex_key)
        assert len(subs) == subset_count(n, k) == math.comb(n, k)

    def test_large_count(self):
        assert subset_count(224, 3) == 1_848_224

    def test_rank_unrank(self):
        for r, s in enumerate(enumerate_subsets(9, 4)):
            assert colex_rank(s) == r
            assert colex_unrank(r, 9, 4) == s

    def test_bad_k(self):
        with pytest.raises(ValueError):
            subset_count(3, 4)
        with pytest.raises(ValueError):
            colex_unrank(10, 4, 2)

    def test_split_ranges_cover(self):
        for total, parts in [(10, 3), (1, 8), (100, 7), (6, 6)]:
            rs = split_ranges(total, parts)
            assert rs[0][0] == 0 and rs[-1][1] == total
            assert all(a[1] == b[0] for a, b in zip(rs, rs[1:]))
            assert all(hi > lo for lo, hi in rs)


class TestSweep:
    def test_k0_is_plain_dress(self, rng):
        G = random_graph(8, 0.5, rng)
        res = delta_sweep(G, SweepConfig(k=0))
        h = quantize(sorted_fingerprint(dress_fixpoint(G)[0]))
        assert res.histogram == h
        assert res.deck.members == (digest(h),)
        assert res.report.subsets == 1

    def test_path_k1(self):
        deck = delta_multiset(path_graph(3), SweepConfig(k=1))
        c = deck.counter()
        assert deck.count == 3
        assert len(c) == 2
        # removing the middle vertex leaves no edge
        assert c[EMPTY_DIGEST] == 1
        assert sorted(c.values()) == [1, 2]

    def test_complete_k1_all_equal(self):
        deck = delta_multiset(complete_graph(4), SweepConfig(k=1))
        assert deck.count == 4 and len(deck.counter()) == 1

    def test_pooled_histogram_counts(self):
        h, rep = delta_pooled(cycle_graph(6), SweepConfig(k=1))
        # each card is P5 with 4 edges
        assert rep.subsets == 6 and h.total == 24 and rep.total_values == 24

    def test_cards_match_rebuilt_subgraphs(self, rng):
        # masking inside the parent graph equals running on the induced subgraph
        for _ in range(8):
            G = random_graph(rng.randint(4, 9), 0.55, rng)
            k = rng.randint(1, 2)
            res = delta_sweep(G, SweepConfig(k=k, mode=Mode.BOTH, verify=True))
            want_seqs, want_hists = [], []
            for S in enumerate_subsets(G.n, k):
                d, _ = dress_fixpoint(induced_delete(G, S))
                want_seqs.append(tuple(sorted(d.edge_values.tolist())))
                want_hists.append(quantize(sorted_fingerprint(d)))
            assert res.deck.sequences == tuple(sorted(want_seqs))
            assert res.deck.members == tuple(sorted(digest(h) for h in want_hists))
            assert res.histogram == merge_all(want_hists)

    def test_deck_recursion(self, rng):
        # every k-subset arises from k different (k-1)-subsets
        for _ in range(5):
            G = random_graph(7, 0.5, rng)
            for k in (1, 2, 3):
                deck = delta_multiset(G, SweepConfig(k=k)).counter()
                union = Counter()
                for S in enumerate_subsets(G.n, k - 1):
                    union.update(delta_multiset(induced_delete(G, S), SweepConfig(k=1)).counter())
                assert union == Counter({d: c * k for d, c in deck.items()})

    def test_worker_count_irrelevant(self, rng):
        G = random_graph(10, 0.5, rng)
        one = delta_sweep(G, SweepConfig(k=2, workers=1))
        three = delta_sweep(G, SweepConfig(k=2, workers=3))
        assert one.histogram == three.histogram
        assert one.deck == three.deck
        assert one.report.subsets == three.report.subsets == 45

    def test_isomorphism_invariant(self, rng):
        for _ in range(10):
            G = random_graph(rng.randint(4, 9), 0.5, rng)
            P = permute(G, random_permutation(G.n, rng))
            cmp = compare_delta(G, P, SweepConfig(k=1))
            assert cmp.pooled is Verdict.NOT_DISTINGUISHED
            assert cmp.multiset is Verdict.NOT_DISTINGUISHED

    def test_multiset_refines_pooled(self, rng):
        for _ in range(40):
            n = rng.randint(4, 8)
            G, H = random_graph(n, 0.5, rng), random_graph(n, 0.5, rng)
            cmp = compare_delta(G, H, SweepConfig(k=1))
            if cmp.multiset is Verdict.NOT_DISTINGUISHED:
                assert cmp.pooled is Verdict.NOT_DISTINGUISHED

    def test_mode_selects_outputs(self):
        G = cycle_graph(5)
        assert delta_sweep(G, SweepConfig(k=1, mode="pooled")).deck is None
        assert delta_sweep(G, SweepConfig(k=1, mode="multiset")).histogram is None

    def test_verify_size_limit(self):
        with pytest.raises(ValueError):
            delta_sweep(cycle_graph(41), SweepConfig(k=0, verify=True))

    def test_k_equals_n(self):
        res = delta_sweep(complete_graph(3), SweepConfig(k=3))
        assert res.report.subsets == 1 and res.histogram.total == 0

    def test_bad_config(self):
        for kw in ({"k": -1}, {"eps": 0}, {"workers": 0}, {"bin_width": -1}):
            with pytest.raises(ValueError):
                SweepConfig(**kw)

    def test_nonconvergence_counted(self):
        res = delta_sweep(cycle_graph(7), SweepConfig(k=1, max_iter=1))
        assert res.report.nonconverged == 7


class TestCfiSmall:
    def test_k3_distinguished_at_k0(self, cfi_pairs):
        G, H = cfi_pairs(3)
        assert compare_delta(G, H, SweepConfig(k=0, mode=Mode.POOLED)).verdict is Verdict.DISTINGUISHED

    def test_k4_needs_one_deletion(self, cfi_pairs):
        G, H = cfi_pairs(4)
        assert compare_delta(G, H, SweepConfig(k=0)).verdict is Verdict.NOT_DISTINGUISHED
        assert compare_delta(G, H, SweepConfig(k=1)).verdict is Verdict.DISTINGUISHED

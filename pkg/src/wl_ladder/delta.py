"""Delta^k sweeps: DRESS on every graph obtained by deleting k vertices.

Two fingerprints come out of one sweep. The pooled histogram merges every
card's binned edge values. The deck keeps one digest per card, sorted. The
subset stream is cut into contiguous colex ranges; each range is reduced
privately and partial results are merged in range order, so the output does
not depend on the worker count.
"""
from __future__ import annotations

import enum
import hashlib
import math
import os
import struct
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .dress import (
    DEFAULT_EPS,
    DEFAULT_MAX_ITER,
    DressStructure,
    init_values,
    run_masked,
)
from .fingerprint import (
    DEFAULT_BIN_WIDTH,
    SparseHistogram,
    Verdict,
    bin_indices,
    compare_histograms,
    digest_strings,
)
from .graph import Graph

VERIFY_MAX_N = 40
_FLUSH_EVERY = 256


class Mode(str, enum.Enum):
    POOLED = "pooled"
    MULTISET = "multiset"
    BOTH = "both"


class SweepTimeout(RuntimeError):
    """A sweep ran past its deadline."""


def default_workers() -> int:
    env = os.environ.get("WL_LADDER_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SweepConfig:
    k: int = 0
    eps: float = DEFAULT_EPS
    max_iter: int = DEFAULT_MAX_ITER
    bin_width: float = DEFAULT_BIN_WIDTH
    workers: int = 1
    mode: Mode = Mode.BOTH
    verify: bool = False
    kernel: str | None = None

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("deletion depth k must be non-negative")
        if self.eps <= 0 or self.bin_width <= 0:
            raise ValueError("eps and bin_width must be positive")
        if self.max_iter < 1 or self.workers < 1:
            raise ValueError("max_iter and workers must be at least 1")
        object.__setattr__(self, "mode", Mode(self.mode))


@dataclass
class SweepReport:
    subsets: int = 0
    nonconverged: int = 0
    total_values: int = 0
    max_iterations: int = 0
    wall_seconds: float = 0.0


@dataclass(frozen=True)
class DeckFingerprint:
    """Sorted per-card digests. ``sequences`` holds full fingerprints in verify mode."""

    k: int
    members: tuple[str, ...]
    sequences: tuple[tuple[float, ...], ...] | None = field(default=None, compare=False)

    @property
    def count(self) -> int:
        return len(self.members)

    def digest(self) -> str:
        return digest_strings(self.members)

    def counter(self) -> Counter:
        return Counter(self.members)


@dataclass
class SweepResult:
    k: int
    histogram: SparseHistogram | None
    deck: DeckFingerprint | None
    report: SweepReport


# -- subset enumeration -------------------------------------------------------


def subset_count(n: int, k: int) -> int:
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    return math.comb(n, k)


def colex_rank(subset) -> int:
    return sum(math.comb(s, i + 1) for i, s in enumerate(sorted(subset)))


def colex_unrank(rank: int, n: int, k: int) -> tuple[int, ...]:
    if not 0 <= rank < subset_count(n, k):
        raise ValueError(f"rank {rank} outside 0..C({n},{k})-1")
    out = [0] * k
    s = n - 1
    for i in range(k - 1, -1, -1):
        while math.comb(s, i + 1) > rank:
            s -= 1
        out[i] = s
        rank -= math.comb(s, i + 1)
        s -= 1
    return tuple(out)


def _colex_range(n: int, k: int, start: int, stop: int) -> Iterator[tuple[int, ...]]:
    if start >= stop:
        return
    s = list(colex_unrank(start, n, k))
    for _ in range(stop - start):
        yield tuple(s)
        i = 0
        while i < k - 1 and s[i] + 1 == s[i + 1]:
            i += 1
        if k == 0:
            return
        s[i] += 1
        for j in range(i):
            s[j] = j


def enumerate_subsets(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-subsets of ``range(n)`` as sorted tuples, in colexicographic order."""
    yield from _colex_range(n, k, 0, subset_count(n, k))


def split_ranges(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    step, extra = divmod(total, parts)
    out = []
    lo = 0
    for i in range(parts):
        hi = lo + step + (1 if i < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


# -- per-range work -----------------------------------------------------------


def _card_digest(keys: np.ndarray, counts: np.ndarray, bin_width: float) -> str:
    # byte layout identical to fingerprint.digest
    m = hashlib.blake2b(digest_size=16)
    m.update(struct.pack("<d", bin_width))
    if keys.size:
        m.update(np.stack([keys, counts], axis=1).astype("<i8").tobytes())
    return m.hexdigest()


@dataclass
class _Partial:
    bins: Counter = field(default_factory=Counter)
    digests: list = field(default_factory=list)
    sequences: list = field(default_factory=list)
    report: SweepReport = field(default_factory=SweepReport)


def _sweep_range(G: Graph, cfg: SweepConfig, start: int, stop: int, deadline: float | None):
    st = DressStructure(G)
    init = init_values(G)
    want_pooled = cfg.mode in (Mode.POOLED, Mode.BOTH)
    want_deck = cfg.mode in (Mode.MULTISET, Mode.BOTH)
    part = _Partial()
    pending = []
    mask = np.zeros(G.n, dtype=np.uint8)
    for S in _colex_range(G.n, cfg.k, start, stop):
        if deadline is not None and time.monotonic() > deadline:
            raise SweepTimeout(f"deadline passed at subset {S}")
        mask[:] = 0
        if S:
            mask[list(S)] = 1
        d, rep = run_masked(st, mask, init, cfg.eps, cfg.max_iter, kernel=cfg.kernel)
        vals = d.edge_values[st.active_edges(mask)]
        idx = bin_indices(vals, cfg.bin_width)
        part.report.subsets += 1
        part.report.total_values += int(vals.size)
        part.report.max_iterations = max(part.report.max_iterations, rep.iterations)
        if not rep.converged:
            part.report.nonconverged += 1
        if want_pooled:
            pending.append(idx)
            if len(pending) >= _FLUSH_EVERY:
                _flush(part.bins, pending)
        if want_deck:
            keys, counts = np.unique(idx, return_counts=True)
            part.digests.append(_card_digest(keys, counts, cfg.bin_width))
            if cfg.verify:
                part.sequences.append(tuple(np.sort(vals).tolist()))
    _flush(part.bins, pending)
    return part


def _flush(bins: Counter, pending: list) -> None:
    if not pending:
        return
    keys, counts = np.unique(np.concatenate(pending), return_counts=True)
    for b, c in zip(keys.tolist(), counts.tolist()):
        bins[b] += c
    pending.clear()


def delta_sweep(G: Graph, cfg: SweepConfig, *, deadline: float | None = None) -> SweepResult:
    """Run DRESS on every ``G - S`` with ``|S| = k`` and reduce per ``cfg.mode``.

    ``deadline`` is a ``time.monotonic()`` value; passing it raises
    :class:`SweepTimeout`.
    """
    t0 = time.perf_counter()
    total = subset_count(G.n, cfg.k)
    if cfg.verify and G.n > VERIFY_MAX_N:
        raise ValueError(f"verify mode keeps full sequences only for n <= {VERIFY_MAX_N}")
    if cfg.workers == 1 or total < 2:
        parts = [_sweep_range(G, cfg, 0, total, deadline)]
    else:
        ranges = split_ranges(total, cfg.workers * 4)
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_sweep_range, G, cfg, lo, hi, deadline) for lo, hi in ranges]
            parts = [f.result() for f in futures]

    report = SweepReport()
    bins: Counter = Counter()
    digests: list[str] = []
    sequences: list = []
    for p in parts:
        bins.update(p.bins)
        digests.extend(p.digests)
        sequences.extend(p.sequences)
        report.subsets += p.report.subsets
        report.nonconverged += p.report.nonconverged
        report.total_values += p.report.total_values
        report.max_iterations = max(report.max_iterations, p.report.max_iterations)
    report.wall_seconds = time.perf_counter() - t0

    hist = None
    if cfg.mode in (Mode.POOLED, Mode.BOTH):
        hist = SparseHistogram(dict(sorted(bins.items())), cfg.bin_width)
    deck = None
    if cfg.mode in (Mode.MULTISET, Mode.BOTH):
        seqs = tuple(sorted(sequences)) if cfg.verify else None
        deck = DeckFingerprint(cfg.k, tuple(sorted(digests)), seqs)
    return SweepResult(cfg.k, hist, deck, report)


def delta_pooled(G: Graph, cfg: SweepConfig) -> tuple[SparseHistogram, SweepReport]:
    res = delta_sweep(G, _with_mode(cfg, Mode.POOLED))
    return res.histogram, res.report


def delta_multiset(G: Graph, cfg: SweepConfig) -> DeckFingerprint:
    return delta_sweep(G, _with_mode(cfg, Mode.MULTISET)).deck


def _with_mode(cfg: SweepConfig, mode: Mode) -> SweepConfig:
    if cfg.mode == mode:
        return cfg
    return SweepConfig(cfg.k, cfg.eps, cfg.max_iter, cfg.bin_width, cfg.workers, mode, cfg.verify, cfg.kernel)


@dataclass
class DeltaComparison:
    mode: Mode
    pooled: Verdict | None
    multiset: Verdict | None
    results: tuple[SweepResult, SweepResult]

    @property
    def verdict(self) -> Verdict:
        # in "both" mode the finer multiset verdict decides
        if self.mode == Mode.POOLED:
            return self.pooled
        return self.multiset


def compare_delta(
    G: Graph, H: Graph, cfg: SweepConfig, *, deadline: float | None = None
) -> DeltaComparison:
    rg = delta_sweep(G, cfg, deadline=deadline)
    rh = delta_sweep(H, cfg, deadline=deadline)
    pooled = multiset = None
    if rg.histogram is not None:
        pooled = compare_histograms(rg.histogram, rh.histogram)
    if rg.deck is not None:
        differ = rg.deck.members != rh.deck.members
        if cfg.verify and rg.deck.sequences is not None:
            differ = differ or rg.deck.sequences != rh.deck.sequences
        multiset = Verdict.of(differ)
    return DeltaComparison(cfg.mode, pooled, multiset, (rg, rh))

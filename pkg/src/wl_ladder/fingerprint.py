"""Sorted fingerprints, sparse bin histograms, digests and verdicts."""
from __future__ import annotations

import enum
import hashlib
import struct
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .dress import EdgeValueMap

DEFAULT_BIN_WIDTH = 1e-6


class Verdict(str, enum.Enum):
    DISTINGUISHED = "distinguished"
    NOT_DISTINGUISHED = "not_distinguished"

    @classmethod
    def of(cls, differ: bool) -> "Verdict":
        return cls.DISTINGUISHED if differ else cls.NOT_DISTINGUISHED


class BinWidthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Fingerprint:
    values: tuple[float, ...]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class SparseHistogram:
    """Map from bin index to count. Only non-empty bins are stored."""

    bins: dict[int, int] = field(default_factory=dict)
    bin_width: float = DEFAULT_BIN_WIDTH

    @property
    def total(self) -> int:
        return sum(self.bins.values())

    def items(self) -> list[tuple[int, int]]:
        return sorted(self.bins.items())

    def __eq__(self, other):
        if not isinstance(other, SparseHistogram):
            return NotImplemented
        return self.bin_width == other.bin_width and self.bins == other.bins

    def __hash__(self):
        return hash((self.bin_width, tuple(self.items())))

    def to_json(self) -> dict:
        return {
            "bin_width": self.bin_width,
            "bins": [[b, c] for b, c in self.items()],
            "total": self.total,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SparseHistogram":
        bins = {int(b): int(c) for b, c in obj["bins"]}
        h = cls(bins, float(obj["bin_width"]))
        if "total" in obj and h.total != obj["total"]:
            raise ValueError("histogram total does not match its bins")
        return h


def sorted_fingerprint(d: EdgeValueMap, include_loops: bool = False) -> Fingerprint:
    """Converged edge values in ascending order. Loop slots are left out by default."""
    vals = d.edge_values
    if include_loops:
        vals = np.concatenate([vals, d.loop_values])
    return Fingerprint(tuple(float(v) for v in np.sort(vals)))


def bin_indices(values, bin_width: float = DEFAULT_BIN_WIDTH) -> np.ndarray:
    """Nearest bin center: ``floor(v / w + 1/2)``."""
    return np.floor(np.asarray(values, dtype=np.float64) / bin_width + 0.5).astype(np.int64)


def histogram_of_values(values, bin_width: float = DEFAULT_BIN_WIDTH) -> SparseHistogram:
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    idx = bin_indices(values, bin_width)
    if idx.size == 0:
        return SparseHistogram({}, bin_width)
    keys, counts = np.unique(idx, return_counts=True)
    return SparseHistogram(dict(zip(keys.tolist(), counts.tolist())), bin_width)


def quantize(fp: Fingerprint, bin_width: float = DEFAULT_BIN_WIDTH) -> SparseHistogram:
    return histogram_of_values(fp.values, bin_width)


def _check_widths(h1: SparseHistogram, h2: SparseHistogram) -> None:
    if h1.bin_width != h2.bin_width:
        raise BinWidthMismatch(f"bin widths differ: {h1.bin_width} vs {h2.bin_width}")


def merge(h1: SparseHistogram, h2: SparseHistogram) -> SparseHistogram:
    _check_widths(h1, h2)
    bins = dict(h1.bins)
    for b, c in h2.bins.items():
        bins[b] = bins.get(b, 0) + c
    return SparseHistogram(bins, h1.bin_width)


def merge_all(hists: Iterable[SparseHistogram], bin_width: float = DEFAULT_BIN_WIDTH) -> SparseHistogram:
    out = SparseHistogram({}, bin_width)
    for h in hists:
        out = merge(out, h)
    return out


def compare_histograms(hG: SparseHistogram, hH: SparseHistogram) -> Verdict:
    _check_widths(hG, hH)
    return Verdict.of(hG.bins != hH.bins)


def digest(h: SparseHistogram) -> str:
    """128-bit digest of ``(bin_width, sorted (bin, count) pairs)`` as 32 hex digits.

    BLAKE2b-128 over the little-endian float64 width followed by int64 pairs.
    At the default width the empty histogram digests to
    ``4a39cf9ce5567fde744cd2df6634d6ea``.
    """
    m = hashlib.blake2b(digest_size=16)
    m.update(struct.pack("<d", h.bin_width))
    items = h.items()
    if items:
        m.update(np.asarray(items, dtype="<i8").tobytes())
    return m.hexdigest()


def digest_strings(parts: Iterable[str]) -> str:
    """Digest of a sequence of hex digests, e.g. a sorted deck."""
    m = hashlib.blake2b(digest_size=16)
    for p in parts:
        m.update(bytes.fromhex(p))
    return m.hexdigest()


EMPTY_DIGEST = digest(SparseHistogram({}, DEFAULT_BIN_WIDTH))

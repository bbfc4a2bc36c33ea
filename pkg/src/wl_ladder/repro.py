"""Reproduce the CFI(K_n) verdict staircase and check it against the expected matrix."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .cfi import cfi_pair, complete_graph
from .delta import Mode, SweepConfig, SweepTimeout, compare_delta

# (base size n) -> per-k verdicts for k = 0..3; None marks a cell the
# reference run leaves unexecuted.
EXPECTED = {
    3: (True, True, True, True),
    4: (False, True, True, True),
    5: (False, False, True, True),
    6: (False, False, False, True),
    7: (False, False, False, False),
    8: (False, False, None, None),
    9: (False, False, None, None),
    10: (False, False, None, None),
}
# WL dimension needed for CFI(K_n); taken as given, never computed
WL_REQUIREMENT = {n: n - 1 for n in EXPECTED}

TIERS = {
    "core": [(n, k) for n in (3, 4, 5) for k in (0, 1, 2)] + [(4, 3)],
    "extended": [(n, k) for n in (3, 4, 5) for k in (0, 1, 2)]
    + [(4, 3), (5, 3)]
    + [(6, k) for k in (0, 1, 2, 3)],
}
CLUSTER_CELLS = [(7, k) for k in (0, 1, 2, 3)] + [(n, k) for n in (8, 9, 10) for k in (0, 1)]

MARK = {"distinguished": "✓", "not_distinguished": "×", "skipped": "--", None: " "}


@dataclass
class Cell:
    k: int
    outcome: str  # distinguished | not_distinguished | skipped
    expected: str | None
    wall_seconds: float
    subsets: int = 0
    nonconverged: int = 0
    reason: str = ""

    @property
    def matches(self) -> bool | None:
        if self.outcome == "skipped" or self.expected is None:
            return None
        return self.outcome == self.expected


@dataclass
class ReproRow:
    base_name: str
    n_cfi: int
    wl_requirement: int
    cells: dict[int, Cell] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "base_name": self.base_name,
            "n_cfi": self.n_cfi,
            "wl_requirement": f"{self.wl_requirement}-WL",
            "verdicts": {
                f"delta{k}": {
                    "outcome": c.outcome,
                    "expected": c.expected,
                    "match": c.matches,
                    "subsets": c.subsets,
                    "nonconverged": c.nonconverged,
                    "wall_seconds": round(c.wall_seconds, 3),
                    **({"reason": c.reason} if c.reason else {}),
                }
                for k, c in sorted(self.cells.items())
            },
        }


def expected_outcome(n: int, k: int) -> str | None:
    v = EXPECTED.get(n, (None,) * 4)[k]
    if v is None:
        return None
    return "distinguished" if v else "not_distinguished"


def cells_for(tier: str, cluster: bool = False) -> list[tuple[int, int]]:
    if tier not in TIERS:
        raise ValueError(f"unknown tier {tier!r}; choose from {', '.join(TIERS)}")
    cells = list(TIERS[tier])
    if cluster:
        cells += CLUSTER_CELLS
    return cells


def reproduce(
    tier: str = "core",
    *,
    cluster: bool = False,
    workers: int = 1,
    cell_timeout: float | None = None,
    bin_width: float = 1e-6,
    progress=None,
) -> list[ReproRow]:
    """Run every (base, k) cell of the tier with pooled histograms."""
    rows: dict[int, ReproRow] = {}
    pairs = {}
    for n, k in cells_for(tier, cluster):
        if n not in pairs:
            pairs[n] = cfi_pair(complete_graph(n))
            rows[n] = ReproRow(f"K{n}", pairs[n][0].n, WL_REQUIREMENT[n])
        G, H = pairs[n]
        cfg = SweepConfig(k=k, mode=Mode.POOLED, workers=workers, bin_width=bin_width)
        deadline = time.monotonic() + cell_timeout if cell_timeout else None
        t0 = time.perf_counter()
        try:
            cmp = compare_delta(G, H, cfg, deadline=deadline)
        except SweepTimeout:
            cell = Cell(k, "skipped", expected_outcome(n, k), time.perf_counter() - t0,
                        reason=f"cell timeout {cell_timeout}s")
        else:
            rg, rh = cmp.results
            cell = Cell(
                k, cmp.pooled.value, expected_outcome(n, k), time.perf_counter() - t0,
                subsets=rg.report.subsets,
                nonconverged=rg.report.nonconverged + rh.report.nonconverged,
            )
        rows[n].cells[k] = cell
        if progress is not None:
            progress(rows[n], cell)
    return [rows[n] for n in sorted(rows)]


def mismatches(rows: list[ReproRow]) -> list[tuple[str, int, str, str]]:
    out = []
    for row in rows:
        for k, c in sorted(row.cells.items()):
            if c.matches is False:
                out.append((row.base_name, k, c.outcome, c.expected))
    return out


def render_table(rows: list[ReproRow]) -> str:
    ks = sorted({k for r in rows for k in r.cells})
    head = ["base", "|V_CFI|", "WL req."] + [f"Δ{k}" for k in ks]
    lines = ["  ".join(f"{h:>8}" for h in head)]
    for r in rows:
        cols = [r.base_name, str(r.n_cfi), f"{r.wl_requirement}-WL"]
        for k in ks:
            c = r.cells.get(k)
            if c is None:
                cols.append("")
                continue
            flag = "" if c.matches is not False else "!"
            cols.append(MARK[c.outcome] + flag)
        lines.append("  ".join(f"{x:>8}" for x in cols))
    return "\n".join(lines)

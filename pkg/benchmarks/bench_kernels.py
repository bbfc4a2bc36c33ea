"""Time the compiled and pure-Python DRESS kernels on the same workloads.

    python benchmarks/bench_kernels.py [--repeat 3]

Both kernels must produce bit-identical values; the script checks that too.
"""
import argparse
import time

import numpy as np

from wl_ladder._backend import KERNELS
from wl_ladder.cfi import cfi_pair, complete_graph
from wl_ladder.dress import DressStructure, init_values, run_masked
from wl_ladder.graph import random_graph


def workloads():
    import random

    rng = random.Random(1)
    for n in (4, 5, 6):
        G, _ = cfi_pair(complete_graph(n))
        mask = np.zeros(G.n, dtype=np.uint8)
        mask[[0, 1]] = 1
        yield f"CFI(K{n}) card, n={G.n - 2}", G, mask
    G = random_graph(60, 0.2, rng)
    yield "G(60, 0.2)", G, np.zeros(G.n, dtype=np.uint8)


def bench(st, mask, init, name, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out, rep = run_masked(st, mask, init, kernel=name)
        best = min(best, time.perf_counter() - t0)
    return best, out, rep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = sorted(KERNELS)
    print(f"{'workload':<26}{'iters':>6}" + "".join(f"{n + ' ms':>14}" for n in names) + f"{'speedup':>10}")
    for label, G, mask in workloads():
        st = DressStructure(G)
        init = init_values(G)
        times = {}
        results = {}
        for name in names:
            times[name], results[name], rep = bench(st, mask, init, name, args.repeat)
        if len(names) > 1:
            a, b = (results[n].edge_values for n in names)
            assert a.tobytes() == b.tobytes(), f"kernels disagree on {label}"
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        cols = "".join(f"{times[n] * 1e3:>14.2f}" for n in names)
        print(f"{label:<26}{rep.iterations:>6}{cols}{speed:>9.1f}x")


if __name__ == "__main__":
    main()

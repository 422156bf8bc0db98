"""Compare the compiled kernels with the pure-Python fallback.

Runs the same workloads through both backends, checks that the answers agree
and prints the timings:

    python benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import time

from hybrix import _purekernels
from hybrix.algebra import all_hybrid
from hybrix.corpus import equation_corpus
from hybrix.evaluation import Compiled

try:
    from hybrix import _speedups
except ImportError:
    _speedups = None


def workload():
    """Every corpus equation on every 3-atom hybrid algebra, pre-compiled."""
    jobs = []
    eqs = equation_corpus()
    for h in all_hybrid(3):
        for eq in eqs:
            c = Compiled(h, [eq.lhs, eq.rhs])
            jobs.append((c.programs[0], c.programs[1], c.domains(), list(h.bao.diamond_table), h.bao.top))
    return jobs


def run(mod, jobs):
    start = time.perf_counter()
    out = [mod.find_falsifier(l, r, dom, dt, top) for l, r, dom, dt, top in jobs]
    return time.perf_counter() - start, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    jobs = workload()
    print(f"{len(jobs)} equation checks per run")
    pure = min(run(_purekernels, jobs)[0] for _ in range(args.repeat))
    print(f"python  {pure:8.3f} s")
    if _speedups is None:
        print("cython  (extension not built)")
        return
    fast = min(run(_speedups, jobs)[0] for _ in range(args.repeat))
    print(f"cython  {fast:8.3f} s   speedup x{pure / fast:.1f}")
    if run(_purekernels, jobs)[1] != run(_speedups, jobs)[1]:
        raise SystemExit("backends disagree")
    print("results identical")


if __name__ == "__main__":
    main()

"""Compiled vs pure-Python kernels, plus dense series multiplication.

    python benchmarks/bench_kernels.py [--n 9] [--repeat 3]
"""

import argparse
import random
import time

from permgrid import _kernels_py
from permgrid.series import Series, _multiply_kronecker, _multiply_sparse

try:
    from permgrid import _kernels as _compiled
except ImportError:
    _compiled = None

PATTERNS = [(4, 2, 1, 3), (2, 1, 4, 3)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def enumerate_with(kern, n):
    level = [()]
    for _ in range(n):
        level = kern.extend_level(level, PATTERNS)
    return len(level)


def contains_batch(kern, hosts):
    return sum(kern.contains(h, p) for h in hosts for p in PATTERNS)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=9, help="enumeration size")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = random.Random(0)
    hosts = []
    for _ in range(20000):
        h = list(range(1, 13))
        rng.shuffle(h)
        hosts.append(tuple(h))

    rows = []
    kernels = [("python", _kernels_py)] + ([("cython", _compiled)] if _compiled else [])
    for name, kern in kernels:
        rows.append((f"extend_level D_n, n={args.n}", name, best_of(lambda: enumerate_with(kern, args.n), args.repeat)))
        rows.append(("contains, 20000 hosts of length 12", name, best_of(lambda: contains_batch(kern, hosts), args.repeat)))
    if _compiled is None:
        print("compiled kernels not built; showing the pure-Python timings only")

    a = Series.from_list([rng.getrandbits(2000) for _ in range(1500)])
    rows.append(("series multiply, order 1499, 2000-bit coeffs", "kronecker",
                 best_of(lambda: _multiply_kronecker(a, a), args.repeat)))
    small = Series.from_list([0, 1, 1] + [0] * 1497)
    rows.append(("series multiply by a 2-term series", "sparse", best_of(lambda: _multiply_sparse(small, a), args.repeat)))
    rows.append(("series multiply by a 2-term series", "kronecker",
                 best_of(lambda: _multiply_kronecker(small, a), args.repeat)))

    width = max(len(r[0]) for r in rows)
    for task, impl, secs in rows:
        print(f"{task:<{width}}  {impl:<9}  {secs * 1000:9.1f} ms")
    by_task = {}
    for task, impl, secs in rows:
        by_task.setdefault(task, {})[impl] = secs
    for task, impls in by_task.items():
        if "python" in impls and "cython" in impls:
            print(f"speed-up ({task}): {impls['python'] / impls['cython']:.1f}x")


if __name__ == "__main__":
    main()

"""Time the compiled and pure-Python kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import timeit
from fractions import Fraction

from posgeom import _kernels_py

try:
    from posgeom import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None


def random_terms(rng, nvars, nterms, degree):
    out = {}
    while len(out) < nterms:
        e = tuple(rng.randint(0, degree) for _ in range(nvars))
        out[e] = Fraction(rng.randint(-50, 50) or 1, rng.randint(1, 7))
    return out


def random_matrix(rng, n):
    return [[rng.randint(-20, 20) for _ in range(n + 1)] for _ in range(n)]


def cases(rng):
    a = random_terms(rng, 3, 60, 6)
    b = random_terms(rng, 3, 60, 6)
    m = random_matrix(rng, 24)
    return {
        "add_terms (60+60 terms)": lambda k: k.add_terms(a, b, -1),
        "mul_terms (60x60 terms)": lambda k: k.mul_terms(a, b),
        "bareiss_echelon (24x25)": lambda k: k.bareiss_echelon([r[:] for r in m], 25),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    args = ap.parse_args()
    backends = [("python", _kernels_py)]
    if _kernels_cy is not None:
        backends.append(("cython", _kernels_cy))
    else:
        print("compiled extension not built; timing the Python backend only")
    print(f"{'kernel':28s}" + "".join(f"{name:>12s}" for name, _ in backends) + "    speedup")
    for label, fn in cases(random.Random(1)).items():
        times = []
        for _, mod in backends:
            assert fn(mod) == fn(_kernels_py)
            t = min(timeit.repeat(lambda: fn(mod), number=args.number, repeat=args.repeat))
            times.append(t / args.number * 1e3)
        row = f"{label:28s}" + "".join(f"{t:10.3f}ms" for t in times)
        if len(times) == 2:
            row += f"    {times[0] / times[1]:.2f}x"
        print(row)


if __name__ == "__main__":
    main()

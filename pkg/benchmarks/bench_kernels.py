"""Compiled vs pure-Python timing of the hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from modelcomp import _fallback

try:
    from modelcomp import _kernels
except ImportError:  # extension not built
    _kernels = None


def _cases(rng):
    zeros = 0.95 * np.sqrt(rng.uniform(size=40)) * np.exp(2j * np.pi * rng.uniform(size=40))
    z = np.sqrt(rng.uniform(size=200_000)) * np.exp(2j * np.pi * rng.uniform(size=200_000))
    mask = (rng.uniform(size=(512, 512)) < 0.55).astype(np.uint8)
    return [
        ("blaschke_eval 40 zeros x 2e5 points", "blaschke_eval", (zeros, z)),
        ("label_components 512x512", "label_components", (mask,)),
    ]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<40}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for label, name, call_args in _cases(rng):
        py = min(timeit.repeat(lambda: getattr(_fallback, name)(*call_args),
                               number=1, repeat=args.repeat))
        if _kernels is None:
            print(f"{label:<40}{1e3 * py:>14.2f}{'n/a':>16}{'':>10}")
            continue
        cc = min(timeit.repeat(lambda: getattr(_kernels, name)(*call_args),
                               number=1, repeat=args.repeat))
        print(f"{label:<40}{1e3 * py:>14.2f}{1e3 * cc:>16.2f}{py / cc:>9.1f}x")


if __name__ == "__main__":
    main()

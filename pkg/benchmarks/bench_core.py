"""Compare the compiled kernels with the numpy fallback.

Usage: python3 benchmarks/bench_core.py [--repeat N] [--scale S]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from distorder import _backend


def cases(scale: float):
    rng = np.random.default_rng(0)
    n_conv = int(4096 * scale)
    a, x = rng.random(n_conv), rng.random(n_conv)

    n_march = int(2048 * scale)
    w = 1.0 / (1.0 + np.arange(n_march)) ** 0.8

    batch, n_toep = 256, int(256 * scale)
    cols = rng.random((batch, n_toep)) * 0.1
    cols[:, 0] += 1.0

    return {
        f"causal_conv n={n_conv}": lambda m: m.causal_conv(a, x),
        f"volterra_march n={n_march}": lambda m: m.volterra_march(w, -0.01, 1.0),
        f"tril_toeplitz_inv {batch}x{n_toep}": lambda m: m.tril_toeplitz_inv(cols),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--scale", type=float, default=1.0)
    args = parser.parse_args()

    impls = {"python": _backend.get("python")}
    if _backend.compiled is not None:
        impls["compiled"] = _backend.get("compiled")
    else:
        print("compiled kernels not built; timing the fallback only")

    print(f"{'kernel':<32}" + "".join(f"{k:>12}" for k in impls) + f"{'speedup':>10}")
    for name, fn in cases(args.scale).items():
        times = {}
        for key, mod in impls.items():
            times[key] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        speedup = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        row = "".join(f"{times[k] * 1e3:>10.2f}ms" for k in impls)
        print(f"{name:<32}{row}{speedup:>9.1f}x")


if __name__ == "__main__":
    main()

"""Timing comparison between the pure-Python and compiled loop kernels.

Run as ``python -m etseek.benchmark [--iters N] [--repeat R]``. Reports the
best-of-R wall time for each backend on the bundled reference parameters and
the resulting speedup. Falls back gracefully when the compiled extension is
not built.
"""

from __future__ import annotations

import argparse
import time

from etseek import _kernel

_ARGS = dict(q_star=2.0, h_star=-0.7, theta_star=3.0, a=0.1, omega=7.0,
             epsilon=0.18, gain_k=-240.0, sigma=0.7, alpha=0.74,
             theta_hat0=0.5)
_AVG_ARGS = dict(h_star=-0.7, c_g=0.18 * 0.1 * 0.1 * (-0.7) * (-240.0) / 2.0,
                 c_t=0.18 * 0.1 * 0.1 * (-240.0) / 2.0, sigma=0.7, alpha=0.74,
                 theta_tilde0=-2.5)


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m etseek.benchmark",
        description="Compare pure-Python and compiled loop kernels.")
    parser.add_argument("--iters", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = [("pure", _kernel)]
    try:
        from etseek import _ckernel
    except ImportError:
        print("compiled extension not built; timing pure backend only")
    else:
        backends.append(("compiled", _ckernel))

    print(f"n_iters = {args.iters}, best of {args.repeat}")
    print(f"{'kernel':<10}{'backend':<10}{'seconds':>12}")
    timings = {}
    for name, mod in backends:
        t = _time(lambda m=mod: m.run_loop(n_iters=args.iters, **_ARGS),
                  args.repeat)
        timings[("run_loop", name)] = t
        print(f"{'run_loop':<10}{name:<10}{t:>12.4f}")
    for name, mod in backends:
        t = _time(lambda m=mod: m.avg_loop(n_iters=args.iters, **_AVG_ARGS),
                  args.repeat)
        timings[("avg_loop", name)] = t
        print(f"{'avg_loop':<10}{name:<10}{t:>12.4f}")

    if len(backends) == 2:
        for kernel in ("run_loop", "avg_loop"):
            pure = timings[(kernel, "pure")]
            comp = timings[(kernel, "compiled")]
            print(f"{kernel}: compiled is {pure / comp:.1f}x faster")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

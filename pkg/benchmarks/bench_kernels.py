"""Compare the compiled stencil kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints wall time per backend and the max abs difference of their outputs.
"""
import argparse
import time

import numpy as np

from amalgam import kernels
from amalgam.grid import ball_offsets, make_grid, make_weight, sample
from amalgam.spaces import SpaceParams, weak_candidates, level_norms


def _cases():
    g1 = make_grid(1, 4.0, 4096)
    f1 = sample("random_smooth:1", g1).values
    off1, d2 = ball_offsets(1, 512)
    stops1 = [int(np.searchsorted(d2, r * r)) for r in (8, 32, 128, 512)]
    g2 = make_grid(2, 4.0, 128)
    f2 = sample("random_smooth:2", g2).values
    off2, _ = ball_offsets(2, 16)
    gw = make_grid(1, 4.0, 1024)
    fw = sample("random_smooth:3", gw, confine=True)
    params = SpaceParams(2.0, 1.5, 0.25, make_weight("power:0.3", gw), make_weight("power:0.2", gw))
    _, counts, order = weak_candidates(fw)
    return {
        "cumsum 1d N=4096, 4 radii": lambda: kernels.stencil_cumsum(f1, off1, stops1, g1.indices()),
        "cumsum 2d N=128, r=16h": lambda: kernels.stencil_cumsum(f2, off2, [len(off2)], g2.indices()),
        "max 2d N=128, r=16h": lambda: kernels.stencil_max(f2, off2, g2.indices()),
        "level sweep 1d N=1024": lambda: level_norms(gw, order, counts, params),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "compiled" not in kernels.BACKENDS:
        print("compiled extension not built; only the fallback is available")
    names = [b for b in ("compiled", "python") if b in kernels.BACKENDS]
    print(f"{'kernel':<28}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}{'max diff':>12}")
    for label, fn in _cases().items():
        times, outs = [], []
        for name in names:
            kernels.set_backend(name)
            best = np.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                out = fn()
                best = min(best, time.perf_counter() - t0)
            times.append(best)
            outs.append(out)
        diff = float(np.max(np.abs(outs[0] - outs[-1])))
        speed = times[-1] / times[0] if len(times) > 1 else 1.0
        print(f"{label:<28}" + "".join(f"{t:>11.4f}s" for t in times) + f"{speed:>9.1f}x{diff:>12.2e}")
    kernels.set_backend(names[0])


if __name__ == "__main__":
    main()

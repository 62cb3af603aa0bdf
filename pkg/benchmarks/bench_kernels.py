"""Time the numba and numpy backends of the hot kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Numba compilation is triggered once before timing.  Every case also checks
that both backends return the same array.
"""

import argparse
import statistics
import sys
import time

import numpy as np

from lfwave import kernels
from lfwave.algebra import digit_grid
from lfwave.mra import build_family, build_mask, default_assignment, scaling_hat
from lfwave.spectral import elementary_from_tree
from lfwave.transform import inverse_fourier
from lfwave.trees import admissible_moves, basic_step, build_basic_tree


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times), out


def walked_family(p, s, N, steps, seed=0):
    rng = np.random.default_rng(seed)
    t = build_basic_tree(p, s, N)
    for _ in range(steps):
        moves = admissible_moves(t)
        if not moves:
            break
        t = basic_step(t, *moves[rng.integers(len(moves))])
    E = elementary_from_tree(t)
    return build_family(t, build_mask(E, default_assignment(E, seed=seed, phases=True), 0.5, 1.6))


def cases(quick):
    rng = np.random.default_rng(0)
    n_cos, n_pts, width = (500, 2000, 12) if quick else (2000, 20000, 16)
    a = rng.integers(0, 3, size=(n_cos, width))
    x = rng.integers(0, 3, size=(n_pts, width))
    w = rng.normal(size=n_cos) + 1j * rng.normal(size=n_cos)
    yield f"character_sums {n_cos}x{n_pts}x{width} p=3", lambda b: kernels.character_sums(w, a, x, 3, backend=b)

    rows, q, window = (20000, 4, 3) if quick else (200000, 4, 3)
    strings = rng.integers(0, q, size=(rows, 10))
    table = rng.normal(size=q ** window) + 1j
    yield f"window_products {rows} rows q={q}", lambda b: kernels.window_products(strings, table, q, window, 10, backend=b)

    grid = digit_grid(2, 1, -6, 7)
    coeffs = rng.integers(0, 2, size=(64, grid.shape[1]))
    cw = rng.normal(size=64) + 0j
    yield f"character_sums full grid {len(grid)} points", lambda b: kernels.character_sums(cw, coeffs, grid, 2, backend=b)

    fam = walked_family(3, 1, 2, 4 if quick else 8)
    yield f"scaling_hat p=3 N=2 H={fam.H}", lambda b: scaling_hat(fam.mask, fam.H, backend=b).values
    phi = fam.phi_hat
    yield f"inverse_fourier ({len(phi)} cosets)", lambda b: inverse_fourier(phi, backend=b).values


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)

    if not kernels.HAVE_NUMBA:
        print("numba is not importable; nothing to compare", file=sys.stderr)
        return 1
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'case':48s} {'numba best':>12s} {'numpy best':>12s} {'speedup':>8s}  agree")
    for name, fn in cases(args.quick):
        fn("numba")  # compile
        nb, _, out_nb = best_of(lambda: fn("numba"), args.repeat)
        npb, _, out_np = best_of(lambda: fn("numpy"), args.repeat)
        if isinstance(out_nb, dict):
            agree = out_nb.keys() == out_np.keys() and all(abs(out_nb[k] - out_np[k]) < 1e-12 for k in out_nb)
        else:
            agree = bool(np.allclose(out_nb, out_np, atol=1e-10))
        print(f"{name:48s} {nb * 1e3:10.2f}ms {npb * 1e3:10.2f}ms {npb / nb:7.1f}x  {agree}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

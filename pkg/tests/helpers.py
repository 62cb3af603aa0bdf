"""Fixture builders and brute-force oracles shared by the test modules.

The oracles use only Python integers and ``cmath``; none of them touch the
numba/numpy kernels, window tables or digit grids of the package.
"""

from __future__ import annotations

import cmath
import itertools
import random

import numpy as np

from lfwave.characters import CosetAddress
from lfwave.mra import build_family, build_mask, default_assignment
from lfwave.spectral import elementary_from_tree
from lfwave.trees import admissible_moves, basic_step, build_basic_tree, chain_tree
from lfwave.wavelets import build_system

CHAIN_WORD = [(0,), (0,), (1,), (1,), (0,)]
CHAIN_VALUES = {
    (): 1.0,
    ((-2, (1,)),): 0.8,
    ((-2, (1,)), (-1, (1,))): 1.2,
    ((-1, (1,)), (0, (1,))): 0.9,
}
# frozen by hand: window products of the table above
CHAIN_PHI = {
    (): 1.0,
    ((-2, (1,)),): 0.8,
    ((-2, (1,)), (-1, (1,))): 0.96,
    ((-1, (1,)), (0, (1,))): 0.864,
}

PARAMS = [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2)]


def chain():
    return chain_tree(2, 1, 2, CHAIN_WORD)


def chain_mask():
    t = chain()
    E = elementary_from_tree(t)
    return build_mask(E, {a: CHAIN_VALUES[a.digits] for a in E.cosets}, 0.5, 1.6, tree_id=t.fingerprint())


def chain_family():
    return build_family(chain(), chain_mask())


def chain_system():
    return build_system(chain_family())


def haar_family(p=2, s=1, N=2):
    t = build_basic_tree(p, s, N)
    E = elementary_from_tree(t)
    return build_family(t, build_mask(E, {a: 1.0 for a in E.cosets}))


def random_tree(p, s, N, steps, rng: random.Random):
    """Random walk of admissible basic steps from the basic tree."""
    t = build_basic_tree(p, s, N)
    for _ in range(steps):
        moves = admissible_moves(t)
        if not moves:
            break
        t = basic_step(t, *rng.choice(moves))
    return t


def random_family(p, s, N, steps, seed, phases=True):
    rng = random.Random(seed)
    t = random_tree(p, s, N, steps, rng)
    E = elementary_from_tree(t)
    mask = build_mask(E, default_assignment(E, 0.5, 1.6, seed=seed, phases=phases), 0.5, 1.6)
    return build_family(t, mask)


# -- oracles ---------------------------------------------------------------------


def omega(p, e):
    return cmath.exp(2j * cmath.pi * (e % p) / p)


def pair_exponent(digits: dict, x: dict) -> int:
    """Sum over shared indices of the GF(p) dot products (unreduced)."""
    return sum(sum(a * b for a, b in zip(digits[j], x[j])) for j in digits if j in x)


def brute_scaling_value(mask_values: dict, N: int, n_factors: int, digits: dict) -> complex:
    """``prod_n m(chi A^-n)`` with ``m`` given as ``{digit tuple: value}``.

    ``chi A^-n`` lowers every index by ``n``; indices below ``-N`` fall into
    the annihilator and indices above 0 are removed by periodicity.
    """
    prod = 1.0 + 0j
    for n in range(n_factors):
        shifted = tuple(sorted((j - n, v) for j, v in digits.items() if -N <= j - n <= 0 and any(v)))
        prod *= mask_values.get(shifted, 0j)
        if prod == 0:
            break
    return prod


def brute_inverse_fourier(f, x: dict) -> complex:
    """``sum value p^(-sL) (zeta, x)``; zero outside ``K_{-L}``."""
    if x and min(x) < -f.base:
        return 0j
    total = 0j
    for a, v in f.values.items():
        total += v * float(f.p) ** (-f.s * f.base) * omega(f.p, pair_exponent(dict(a.digits), x))
    return total


def brute_character_integral(f, x: dict) -> complex:
    """``int f(chi) (chi, x) dnu`` refining ``f`` until ``x`` is coset-constant."""
    lo = min(x) if x else 0
    g = f.refine(max(f.base, -lo)) if x else f
    w = float(g.p) ** (-g.s * g.base)
    return sum(v * w * omega(g.p, pair_exponent(dict(a.digits), x)) for a, v in g.values.items())


def brute_mask_coefficients(mask) -> dict:
    """Solve ``m(d) = p^-s sum_h beta_h conj(omega^<d, A^-1 h>)`` as a dense
    linear system over every base-N coset of the unit-ball annihilator."""
    p, s, N = mask.p, mask.s, mask.N
    blocks = list(itertools.product(range(p), repeat=s))
    idx = list(range(-N, 1))
    cosets = [dict(zip(idx, combo)) for combo in itertools.product(blocks, repeat=N + 1)]
    hs = [dict(zip(range(-1, -N - 2, -1), combo)) for combo in itertools.product(blocks, repeat=N + 1)]
    M = np.zeros((len(cosets), len(hs)), dtype=np.complex128)
    rhs = np.zeros(len(cosets), dtype=np.complex128)
    for i, d in enumerate(cosets):
        key = CosetAddress(p, s, N, tuple(d.items()))
        rhs[i] = mask.values.values.get(key, 0j)
        for k, h in enumerate(hs):
            ah = {j + 1: v for j, v in h.items()}
            M[i, k] = float(p) ** (-s) * np.conj(omega(p, pair_exponent(d, ah)))
    beta = np.linalg.solve(M, rhs)
    return {tuple(sorted((j, v) for j, v in h.items() if any(v))): b for h, b in zip(hs, beta)}

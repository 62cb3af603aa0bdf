"""Acceptance gate: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed in
the terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import functools
import random
import sys
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import PARAMS, chain_family, haar_family, random_family  # noqa: E402
from lfwave.algebra import all_blocks, h0_enumerate  # noqa: E402
from lfwave.characters import CosetAddress  # noqa: E402
from lfwave.mra import check_refinement, mask_coefficients, mask_from_coefficients, scaling_hat, scaling_hat_paths  # noqa: E402
from lfwave.spectral import SpectralStepFunction, elementary_from_tree, spectral_integral, validate_elementary  # noqa: E402
from lfwave.transform import (  # noqa: E402
    biorthogonality_report,
    character_orthonormality,
    forward_fourier,
    gram_eigen_range,
    gram_matrix,
    inverse_fourier,
    periodization_diagnostic,
    spatial_refinement_deviation,
)
from lfwave.trees import admissible_moves, basic_step, build_basic_tree, validate_tree, window_multiset  # noqa: E402
from lfwave.wavelets import build_system, check_decay_hypotheses, matrix_condition_table  # noqa: E402

pytestmark = pytest.mark.acceptance

# criterion id -> (passed, detail); printed by the conftest summary hook
RESULTS: dict[str, tuple[bool, str]] = {}


def record(cid: str, ok: bool, detail: str) -> None:
    RESULTS[cid] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'} [{cid}] {detail}")


def gate(cid: str, ok: bool, detail: str) -> None:
    record(cid, ok, detail)
    assert ok, detail


@functools.lru_cache(maxsize=None)
def fixtures():
    """Haar for every parameter set, the chain family, and seeded random
    families with complex masks."""
    out = [(f"haar{p}", haar_family(*p)) for p in PARAMS]
    out.append(("chain", chain_family()))
    for k, p in enumerate(PARAMS):
        for seed in range(3):
            out.append((f"random{p}#{seed}", random_family(*p, steps=3 + 2 * seed, seed=100 * k + seed)))
    return out


@functools.lru_cache(maxsize=None)
def systems():
    return [(name, build_system(fam)) for name, fam in fixtures()]


# -- 1 ------------------------------------------------------------------------


def test_c01_two_digit_basic_tree():
    t = build_basic_tree(2, 2, 2)
    words = Counter(t.window(v, 2) for v in range(t.node_count) if t.depths[v] >= 1)
    want = Counter((a, b) for a in all_blocks(2, 2) for b in all_blocks(2, 2))
    ok = t.node_count == 17 and t.height == 3 and words == want
    gate("1", ok, f"nodes={t.node_count} height={t.height} windows={sum(words.values())} distinct={len(words)}")


# -- 2 ------------------------------------------------------------------------


def test_c02_basic_step_closure():
    rng = random.Random(2024)
    steps = failures = restarts = 0
    while steps < 1000:
        p = PARAMS[steps % len(PARAMS)]
        t = build_basic_tree(*p)
        base = window_multiset(t)
        for _ in range(25):
            moves = admissible_moves(t)
            if not moves:
                restarts += 1
                break
            t = basic_step(t, *rng.choice(moves))
            steps += 1
            if not validate_tree(t).valid or window_multiset(t) != base:
                failures += 1
            if steps >= 1000:
                break
    gate("2", failures == 0, f"steps={steps} failures={failures} dead_ends={restarts}")


# -- 3 ------------------------------------------------------------------------


def test_c03_chain_instance():
    fam = chain_family()
    E = elementary_from_tree(fam.tree)
    got = {a.digits for a in E.cosets}
    want = {(), ((-2, (1,)),), ((-2, (1,)), (-1, (1,))), ((-1, (1,)), (0, (1,)))}
    rep = validate_elementary(fam.phi_hat, 2, 1)
    ok = got == want and fam.H == 4 and rep.valid and set(fam.phi_hat.values) == set(E.cosets)
    gate("3", ok, f"E matches={got == want} H={fam.H} supp(phi_hat) (2,1)-elementary={rep.valid}")


# -- 4 ------------------------------------------------------------------------


def test_c04_oracle_equivalence():
    worst = worst_extra = 0.0
    n = 0
    for k in range(60):
        p = PARAMS[k % len(PARAMS)]
        fam = random_family(*p, steps=k % 9, seed=7000 + k)
        worst = max(worst, scaling_hat_paths(fam.tree, fam.mask).max_abs_diff(fam.phi_hat))
        worst_extra = max(worst_extra, scaling_hat(fam.mask, fam.H, extra_factors=1).max_abs_diff(fam.phi_hat))
        n += 1
    gate("4", worst < 1e-12 and worst_extra < 1e-15,
         f"fixtures={n} max|product-paths|={worst:.3g} max|extra factor|={worst_extra:.3g}")


# -- 5 ------------------------------------------------------------------------


def test_c05_haar():
    fam = haar_family(2, 1, 2)
    unit = fam.phi_hat.refine(2)
    want = {CosetAddress(2, 1, 2, tuple((j, b) for j, b in zip((-2, -1), d) if any(b)))
            for d in [((0,), (0,)), ((1,), (0,)), ((0,), (1,)), ((1,), (1,))]}
    spec_ok = set(unit.values) == want and all(v == 1 for v in unit.values.values())
    phi = inverse_fourier(fam.phi_hat)
    ones = [x for x, v in zip(phi.points(), phi.values) if abs(v - 1) < 1e-15]
    space_ok = (len(ones) == 1 and ones[0].is_zero() and np.sum(np.abs(phi.values)) == pytest.approx(1.0))
    G = gram_matrix(fam.phi_hat, h0_enumerate(2, 1, 3))
    gram_dev = float(np.max(np.abs(G - np.eye(len(G)))))
    per = periodization_diagnostic(fam.phi_hat, 2)
    per_dev = max(abs(v - 1) for v in per.values())
    ok = spec_ok and space_ok and gram_dev < 1e-12 and per_dev == 0
    gate("5", ok, f"phi_hat=1 on unit-ball annihilator: {spec_ok}; phi=1 on K_0: {space_ok}; "
                  f"|G-I|={gram_dev:.3g}; |periodization-1|={per_dev:.3g}")


# -- 6 ------------------------------------------------------------------------


def _chain_riesz():
    fam = chain_family()
    lo, hi = fam.bounds()
    A, B = fam.envelope()
    e_lo, e_hi, method = gram_eigen_range(gram_matrix(fam.phi_hat, h0_enumerate(2, 1, 3)))
    return lo, hi, A, B, e_lo, e_hi, method


def test_c06_envelope():
    lo, hi, A, B, e_lo, e_hi, method = _chain_riesz()
    ok = (
        A == pytest.approx(0.0625) and B == pytest.approx(6.5536)
        and A <= lo <= hi <= B
        and abs(lo - 0.64) < 1e-12 and abs(hi - 1) < 1e-12
        and lo - 1e-9 <= e_lo and e_hi <= hi + 1e-9
    )
    gate("6", ok, f"|phi_hat|^2 in [{lo:.6g}, {hi:.6g}] within [A^4, B^4]=[{A:.6g}, {B:.6g}]; "
                  f"Gram nu=3 eigenvalues [{e_lo:.9g}, {e_hi:.9g}] ({method})")


@pytest.mark.xfail(strict=True, reason="stated floor 0.746496 = 0.864^2 ignores the 0.8 entry of the same table")
def test_c06_literal_floor():
    lo, _, _, _, e_lo, _, _ = _chain_riesz()
    ok = lo >= 0.746496 - 1e-12 and e_lo >= 0.746496 - 1e-9
    record("6-literal", ok, f"stated floor 0.746496 vs min|phi_hat|^2={lo:.6g}, min eigenvalue={e_lo:.9g}")
    assert ok


# -- 7 ------------------------------------------------------------------------


def test_c07_refinement():
    worst_ref = worst_sp = worst_rt = 0.0
    points = 0
    for _, fam in fixtures():
        w = check_refinement(fam).witness
        worst_ref = max(worst_ref, w["max_deviation"], w["dual_max_deviation"])
        beta = mask_coefficients(fam.mask)
        worst_rt = max(worst_rt, mask_from_coefficients(beta, fam.p, fam.s, fam.N).max_abs_diff(fam.mask.values))
        dev, n, sampled = spatial_refinement_deviation(fam.phi_hat, beta)
        assert not sampled
        worst_sp = max(worst_sp, dev)
        points += n
    ok = worst_ref < 1e-12 and worst_sp < 1e-9 and worst_rt < 1e-12
    gate("7", ok, f"fixtures={len(fixtures())} spectral={worst_ref:.3g} spatial={worst_sp:.3g} "
                  f"(full grids, {points} points) coefficient round-trip={worst_rt:.3g}")


# -- 8 ------------------------------------------------------------------------


def test_c08_matrix_condition():
    worst = 0.0
    counts_ok = True
    n_sums = 0
    for _, sy in systems():
        sums, counts = matrix_condition_table(sy)
        q = sums.shape[0]
        worst = max(worst, float(np.max(np.abs(sums - np.eye(q)[:, :, None]))))
        counts_ok &= bool(np.all(counts[np.arange(q), np.arange(q)] == 1))
        n_sums += sums.size
    gate("8", worst < 1e-9 and counts_ok,
         f"systems={len(systems())} sums={n_sums} max|sum-delta|={worst:.3g} one term on diagonal: {counts_ok}")


# -- 9 ------------------------------------------------------------------------


def test_c09_biorthogonality():
    parts = []
    ok = True
    for name, sy in (("haar", build_system(haar_family(2, 1, 2))), ("chain", build_system(chain_family()))):
        for r in biorthogonality_report(sy, 3, (-1, 0, 1), 1e-9):
            ok &= r.passed
            parts.append(f"{name}/{r.name.split('_')[-1]}={r.witness['max_deviation']:.3g}")
    gate("9", ok, "nu=3 levels -1..1: " + " ".join(parts))


# -- 10 -----------------------------------------------------------------------


def random_step_function(rng, p, s):
    L = int(rng.integers(0, 3))
    top = int(rng.integers(-L - 1, 2))
    n_idx = top + L + 1
    q = p ** s
    size = int(rng.integers(1, 7))
    vals = {}
    for _ in range(size):
        digits = []
        for k in range(max(n_idx, 0)):
            code = int(rng.integers(0, q))
            if code:
                digits.append((-L + k, tuple((code // p ** i) % p for i in range(s))))
        vals[CosetAddress(p, s, L, tuple(digits))] = complex(rng.normal(), rng.normal())
    return SpectralStepFunction(p, s, L, vals)


def test_c10_fourier():
    rng = np.random.default_rng(10)
    worst_rt = worst_pl = 0.0
    count = 0
    for p, s, _ in PARAMS:
        for _ in range(100):
            f = random_step_function(rng, p, s)
            F = inverse_fourier(f)
            worst_rt = max(worst_rt, forward_fourier(F).max_abs_diff(f))
            worst_pl = max(worst_pl, abs(F.norm2() - spectral_integral(f.abs2()).real))
            count += 1
    gate("10", worst_rt < 1e-12 and worst_pl < 1e-12,
         f"functions={count} max round-trip={worst_rt:.3g} max Plancherel gap={worst_pl:.3g}")


# -- 11 -----------------------------------------------------------------------


def test_c11_character_orthonormality():
    worst = max(character_orthonormality(fam.phi_hat.support, 3) for _, fam in fixtures())
    gate("11", worst < 1e-12, f"fixtures={len(fixtures())} depth=3 max|G-I|={worst:.3g}")


# -- 12 -----------------------------------------------------------------------


def test_c12_decay():
    Cs = []
    ok = True
    for _, sy in systems():
        r = check_decay_hypotheses(sy)
        ok &= r.passed
        Cs.append(r.witness["C"])
    gate("12", ok and all(np.isfinite(Cs)),
         f"systems={len(Cs)} eps=0.5 C in [{min(Cs):.3g}, {max(Cs):.3g}]")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))

"""One-call verification of families and wavelet systems.

Every check here is a thin wrapper around a library routine; the CLI
only serializes the resulting :class:`Report`.
"""

from __future__ import annotations

import numpy as np

from .algebra import h0_enumerate
from .characters import CosetAddress
from .mra import MRAFamily, check_refinement, mask_coefficients, mask_from_coefficients, scaling_hat, scaling_hat_paths
from .reports import CheckResult, Report
from .spectral import elementary_from_tree, product, spectral_integral, validate_elementary, window_table
from .transform import (
    character_orthonormality,
    forward_fourier,
    gram_eigen_range,
    gram_matrix,
    inverse_fourier,
    biorthogonality_report,
    periodization_diagnostic,
    spatial_refinement_deviation,
)
from .trees import validate_tree
from .wavelets import WaveletSystem, build_system, verify_wavelets

DEFAULT_TOL = 1e-9
MAX_GRID_POINTS = 1 << 20


def check_mask(family: MRAFamily, tol: float) -> CheckResult:
    m, d = family.mask, family.dual
    vals = m.values.values
    ident = CosetAddress.identity(m.p, m.s, m.N)
    mods = [abs(v) ** 2 for v in vals.values()]
    in_bounds = all(m.A * (1 - tol) <= x <= m.B * (1 + tol) for x in mods) and m.A > 0
    unit = abs(vals.get(ident, 0) - 1) <= tol
    table = window_table(m.values, m.N).reshape(m.q, m.q ** m.N)
    unique_ext = bool(np.all(np.count_nonzero(table, axis=0) == 1))
    dual_dev = max(
        (abs(d.values.values.get(a, 0) - 1 / v.conjugate()) for a, v in vals.items()), default=0.0
    )
    same_support = set(d.values.values) == set(vals)
    dual_bounds = abs(d.A - 1 / m.B) <= tol * d.A and abs(d.B - 1 / m.A) <= tol * d.B
    ok = in_bounds and unit and unique_ext and same_support and dual_dev < tol and dual_bounds
    return CheckResult("mask", ok, {
        "bounds_ok": in_bounds, "identity_is_one": unit, "unique_extension": unique_ext,
        "dual_support_equal": same_support, "dual_max_deviation": dual_dev,
        "dual_bounds_ok": dual_bounds, "A": m.A, "B": m.B,
    })


def check_tree_link(family: MRAFamily) -> CheckResult:
    if family.tree is None:
        return CheckResult("tree_support", True, {"reason": "no provenance tree"}, skipped=True)
    rep = validate_tree(family.tree)
    if not rep.valid:
        return CheckResult("tree_support", False, {"tree": rep.to_json()})
    E = elementary_from_tree(family.tree)
    same = set(E.cosets) == set(family.mask.values.values)
    return CheckResult("tree_support", same and family.tree.height == family.H, {
        "support_matches_tree": same, "tree_height": family.tree.height, "H": family.H,
    })


def check_scaling_product(family: MRAFamily, tol: float) -> CheckResult:
    """Stored spectra against a fresh product, the path oracle and one
    extra factor."""
    w = {}
    fresh = scaling_hat(family.mask, family.H)
    w["primal_vs_product"] = fresh.max_abs_diff(family.phi_hat)
    w["dual_vs_product"] = scaling_hat(family.dual, family.H).max_abs_diff(family.dual_phi_hat)
    w["extra_factor"] = scaling_hat(family.mask, family.H, extra_factors=1).max_abs_diff(fresh)
    if family.tree is not None:
        w["path_oracle"] = scaling_hat_paths(family.tree, family.mask).max_abs_diff(fresh)
    return CheckResult("scaling_product", max(w.values()) < tol, w)


def check_duality(family: MRAFamily, tol: float) -> CheckResult:
    phi, dphi = family.phi_hat, family.dual_phi_hat
    same = set(phi.values) == set(dphi.values)
    prod = product(phi, dphi.conj())
    dev = max((abs(v - 1) for v in prod.values.values()), default=0.0)
    return CheckResult("duality", same and dev < tol, {"same_support": same, "max_deviation": dev})


def check_support(family: MRAFamily) -> CheckResult:
    """Support below index ``H - 2N + 1`` and elementary for its actual M."""
    limit = family.H - 2 * family.N + 1
    top = family.phi_hat.top()
    below = top is None or top < limit
    M = validate_elementary(family.phi_hat, family.N, 0).max_M
    rep = validate_elementary(family.phi_hat, family.N, 0 if M is None else M)
    return CheckResult("support_elementary", below and rep.valid, {
        "top": top, "index_limit": limit, "M": M, "report": rep.to_json(),
    })


def check_riesz(family: MRAFamily, depth: int, tol: float) -> CheckResult:
    lo, hi = family.bounds()
    env_lo, env_hi = family.envelope()
    shifts = h0_enumerate(family.p, family.s, depth)
    e_lo, e_hi, method = gram_eigen_range(gram_matrix(family.phi_hat, shifts))
    per = periodization_diagnostic(family.phi_hat, max(family.N, family.phi_hat.base))
    p_lo, p_hi = min(per.values()), max(per.values())
    ok = (
        env_lo * (1 - tol) <= lo and hi <= env_hi * (1 + tol)
        and lo - tol <= e_lo and e_hi <= hi + tol
        and lo - tol <= p_lo and p_hi <= hi + tol
    )
    return CheckResult("riesz", ok, {
        "bounds": [lo, hi], "envelope": [env_lo, env_hi], "gram_depth": depth,
        "gram_eigen_range": [e_lo, e_hi], "eigen_method": method,
        "periodization_range": [p_lo, p_hi],
    })


def check_orthonormal_characters(family: MRAFamily, depth: int, tol: float) -> CheckResult:
    dev = character_orthonormality(family.phi_hat.support, depth)
    return CheckResult("character_orthonormality", dev < tol, {"max_deviation": dev, "depth": depth})


def check_coefficients(family: MRAFamily, tol: float, max_points: int = MAX_GRID_POINTS) -> CheckResult:
    beta = mask_coefficients(family.mask)
    rt = mask_from_coefficients(beta, family.p, family.s, family.N).max_abs_diff(family.mask.values)
    dev, n, sampled = spatial_refinement_deviation(family.phi_hat, beta, max_points=max_points)
    return CheckResult("spatial_refinement", max(rt, dev) < tol, {
        "coefficient_roundtrip": rt, "max_deviation": dev, "points": n, "sampled": sampled,
    })


def check_fourier(family: MRAFamily, tol: float) -> CheckResult:
    F = inverse_fourier(family.phi_hat)
    back = forward_fourier(F).max_abs_diff(family.phi_hat)
    plancherel = abs(F.norm2() - spectral_integral(family.phi_hat.abs2()).real)
    fft_gap = float(np.max(np.abs(inverse_fourier(family.phi_hat, method="fft").values - F.values)))
    return CheckResult("fourier", max(back, plancherel, fft_gap) < tol, {
        "roundtrip": back, "plancherel_gap": plancherel, "fft_vs_direct": fft_gap,
        "grid": {"R": F.R, "rho": F.rho, "points": F.size},
    })


def verify_family(family: MRAFamily, depth: int | None = None, tol: float = DEFAULT_TOL) -> Report:
    depth = family.N + 1 if depth is None else depth
    return Report([
        check_mask(family, tol),
        check_tree_link(family),
        check_scaling_product(family, tol),
        check_refinement(family, tol),
        check_duality(family, tol),
        check_support(family),
        check_riesz(family, depth, tol),
        check_orthonormal_characters(family, depth, tol),
        check_coefficients(family, tol),
        check_fourier(family, tol),
    ])


def check_stored_wavelets(system: WaveletSystem, tol: float) -> CheckResult:
    fresh = build_system(system.family)
    dev = 0.0
    missing = sorted(set(fresh.labels) ^ set(system.labels))
    for l in set(fresh.labels) & set(system.labels):
        for a, b in (
            (fresh.masks[l], system.masks[l]),
            (fresh.dual_masks[l], system.dual_masks[l]),
            (fresh.psi_hat[l], system.psi_hat[l]),
            (fresh.dual_psi_hat[l], system.dual_psi_hat[l]),
        ):
            dev = max(dev, a.max_abs_diff(b))
    return CheckResult("wavelet_data", not missing and dev < tol, {
        "max_deviation": dev, "label_mismatch": [list(l) for l in missing],
    })


def verify_system(
    system: WaveletSystem, depth: int | None = None, levels=(-1, 0, 1), tol: float = DEFAULT_TOL
) -> Report:
    fam = system.family
    depth = fam.N + 1 if depth is None else depth
    rep = verify_family(fam, depth, tol)
    rep.add(check_stored_wavelets(system, tol))
    for c in verify_wavelets(system, tol).checks:
        rep.add(c)
    for c in biorthogonality_report(system, depth, levels, tol):
        rep.add(c)
    return rep

"""Shifted masks, wavelet spectra and the checks that make them biorthogonal."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .algebra import all_blocks, block_code
from .characters import CosetAddress
from .mra import MRAFamily
from .reports import CheckResult, Report
from .spectral import SpectralStepFunction, periodized_eval, spectral_dilate, window_table

Label = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class WaveletSystem:
    family: MRAFamily
    masks: Mapping[Label, SpectralStepFunction]
    dual_masks: Mapping[Label, SpectralStepFunction]
    psi_hat: Mapping[Label, SpectralStepFunction]
    dual_psi_hat: Mapping[Label, SpectralStepFunction]

    @property
    def labels(self) -> list[Label]:
        return list(self.masks)

    @property
    def nonzero_labels(self) -> list[Label]:
        return [l for l in self.masks if any(l)]


def wavelet_masks(family: MRAFamily) -> tuple[dict[Label, SpectralStepFunction], dict[Label, SpectralStepFunction]]:
    """``m_l(chi) = m_0(chi r_0^-l)`` and the same shift of the dual mask."""
    labels = all_blocks(family.p, family.s)
    masks = {l: family.mask.values.translate(0, l) for l in labels}
    duals = {l: family.dual.values.translate(0, l) for l in labels}
    return masks, duals


def _wavelet_hat(mask_l: SpectralStepFunction, phi: SpectralStepFunction) -> SpectralStepFunction:
    N = mask_l.base
    shifted = spectral_dilate(phi, 1).refine(N)
    out = {a: periodized_eval(mask_l, a) * v for a, v in shifted.values.items()}
    return SpectralStepFunction(phi.p, phi.s, N, out)


def build_system(family: MRAFamily) -> WaveletSystem:
    masks, duals = wavelet_masks(family)
    psi = {l: _wavelet_hat(m, family.phi_hat) for l, m in masks.items()}
    dpsi = {l: _wavelet_hat(m, family.dual_phi_hat) for l, m in duals.items()}
    return WaveletSystem(family, masks, duals, psi, dpsi)


def wavelet_hat(system: WaveletSystem, l: Label) -> SpectralStepFunction:
    return system.psi_hat[tuple(l)]


def dual_wavelet_hat(system: WaveletSystem, l: Label) -> SpectralStepFunction:
    return system.dual_psi_hat[tuple(l)]


def check_mask_properties(system: WaveletSystem) -> CheckResult:
    """Support identities of the shifted masks, as exact set operations.

    1. ``m_l`` is nonzero on every coset of ``E~ r_0^l``.
    2. ``m_l`` vanishes on ``E~ r_0^a`` for ``a != l``.
    3. ``m_l`` vanishes on the identity coset for ``l != 0``.
    4. ``supp m_l`` and ``supp m_k`` are disjoint for ``k != l``.

    Each statement is checked for the primal and the dual masks.
    """
    fam = system.family
    base_support = set(fam.mask.values.values)
    ident = CosetAddress.identity(fam.p, fam.s, fam.N)
    labels = system.labels
    props = {1: True, 2: True, 3: True, 4: True}
    failures = []
    for which, masks in (("primal", system.masks), ("dual", system.dual_masks)):
        supports = {l: set(m.values) for l, m in masks.items()}
        for l in labels:
            for a in labels:
                moved = {c.times_rademacher(0, a) for c in base_support}
                hit = moved & supports[l]
                if a == l and hit != moved:
                    props[1] = False
                    failures.append((which, 1, l, a))
                if a != l and hit:
                    props[2] = False
                    failures.append((which, 2, l, a))
            if any(l) and ident in supports[l]:
                props[3] = False
                failures.append((which, 3, l))
            for k in labels:
                if k != l and supports[k] & supports[l]:
                    props[4] = False
                    failures.append((which, 4, l, k))
    return CheckResult(
        "mask_properties",
        all(props.values()),
        {"properties": {str(k): v for k, v in props.items()}, "failures": failures[:10]},
    )


def matrix_condition_table(system: WaveletSystem) -> tuple[np.ndarray, np.ndarray]:
    """Sums over the index-0 digit for every ``(k, l, lower digit string)``.

    Returns ``sums[k, l, c]`` and the number of nonzero terms
    ``counts[k, l, c]``, with ``k, l`` in block-code order and ``c`` the
    window code of the digits on ``[-N, -1]``.
    """
    fam = system.family
    N, q, p = fam.N, fam.q, fam.p
    labels = sorted(system.labels, key=lambda l: block_code(l, p))
    # rows: index-0 digit code; columns: lower string code
    T = np.stack([window_table(system.masks[l], N).reshape(q, q ** N) for l in labels])
    D = np.stack([window_table(system.dual_masks[l], N).reshape(q, q ** N) for l in labels])
    terms = T[:, None, :, :] * np.conj(D[None, :, :, :])
    return terms.sum(axis=2), np.count_nonzero(terms, axis=2)


def check_matrix_condition(system: WaveletSystem, tol: float = 1e-9) -> CheckResult:
    sums, counts = matrix_condition_table(system)
    q = sums.shape[0]
    target = np.eye(q)[:, :, None]
    dev = float(np.max(np.abs(sums - target)))
    diag_counts = counts[np.arange(q), np.arange(q), :]
    single = bool(np.all(diag_counts == 1))
    return CheckResult(
        "matrix_condition",
        dev < tol and single,
        {
            "max_deviation": dev,
            "diagonal_terms_min": int(diag_counts.min()),
            "diagonal_terms_max": int(diag_counts.max()),
            "sums_evaluated": int(sums.size),
            "tol": tol,
        },
    )


def shell_sups(f: SpectralStepFunction) -> dict[int, float]:
    """``sup |f|`` over each shell ``(K_n)^perp minus (K_{n-1})^perp``.

    Only shells with ``n > -base`` are resolved coset by coset; the shells
    inside the identity coset all carry its value and are reported at
    ``n = -base``.
    """
    out: dict[int, float] = {}
    for a, v in f.values.items():
        t = a.top()
        n = -f.base if t is None else t + 1
        out[n] = max(out.get(n, 0.0), abs(v))
    return dict(sorted(out.items()))


def ball_sups(f: SpectralStepFunction) -> dict[int, float]:
    """``sup |f|`` over each ball ``(K_n)^perp`` for ``n`` from ``-base`` to
    one past the top digit."""
    shells = shell_sups(f)
    out = {}
    run = 0.0
    top = max(shells, default=-f.base)
    for n in range(-f.base, top + 1):
        run = max(run, shells.get(n, 0.0))
        out[n] = run
    return out


def scaling_decay_constant(f: SpectralStepFunction, eps: float) -> float:
    """Least ``C`` with ``sup_shell_n |f| <= C (1 + p^(ns))^-(1/2 + eps)`` for all n.

    Shells below ``-base`` lie in the identity coset and share its value;
    their weight ``(1 + p^(ns))`` decreases as ``n`` falls, so ``n = -base``
    dominates them.
    """
    q = float(f.p ** f.s)
    return max(
        (v * (1 + q ** n) ** (0.5 + eps) for n, v in shell_sups(f).items()),
        default=0.0,
    )


def wavelet_decay_constant(f: SpectralStepFunction) -> float | None:
    """Least ``C`` with ``sup_{(K_n)^perp} |f| <= C p^(ns)`` for all n.

    Returns None when ``f`` is nonzero on the identity coset (no finite
    constant exists as ``n`` goes to minus infinity).
    """
    q = float(f.p ** f.s)
    ident = CosetAddress.identity(f.p, f.s, f.base)
    if ident in f.values:
        return None
    return max((v / q ** n for n, v in ball_sups(f).items()), default=0.0)


def check_decay_hypotheses(system: WaveletSystem, eps: float = 0.5) -> CheckResult:
    """Exhibit ``(C, eps)`` for the shell bounds on the scaling spectra and
    the ball bounds on the nonzero-label wavelet spectra."""
    fam = system.family
    consts = {
        "phi": scaling_decay_constant(fam.phi_hat, eps),
        "dual_phi": scaling_decay_constant(fam.dual_phi_hat, eps),
    }
    ok = True
    for l in system.nonzero_labels:
        for tag, f in (("psi", system.psi_hat[l]), ("dual_psi", system.dual_psi_hat[l])):
            c = wavelet_decay_constant(f)
            if c is None:
                ok = False
            consts[f"{tag}{list(l)}"] = c
    C = max((c for c in consts.values() if c is not None), default=0.0)
    return CheckResult(
        "decay_hypotheses",
        ok and np.isfinite(C) and C > 0,
        {
            "C": C,
            "eps": eps,
            "constants": consts,
            "phi_shell_sups": shell_sups(fam.phi_hat),
        },
    )


def verify_wavelets(system: WaveletSystem, tol: float = 1e-9) -> Report:
    """Structural checks that need no transforms."""
    rep = Report()
    rep.add(check_mask_properties(system))
    rep.add(check_matrix_condition(system, tol))
    rep.add(check_support_bounds(system))
    rep.add(check_scaling_consistency(system, tol))
    rep.add(check_decay_hypotheses(system))
    return rep


def check_support_bounds(system: WaveletSystem) -> CheckResult:
    """Wavelet spectra live below index ``H - 2N + 2`` and, for nonzero
    labels, vanish on the identity coset."""
    fam = system.family
    limit = fam.H - 2 * fam.N + 1
    ident = CosetAddress.identity(fam.p, fam.s, fam.N)
    bad = []
    for l in system.labels:
        for tag, f in (("psi", system.psi_hat[l]), ("dual_psi", system.dual_psi_hat[l])):
            t = f.top()
            if t is not None and t > limit:
                bad.append(f"{tag}{list(l)} top {t}")
            if any(l) and ident in f.values:
                bad.append(f"{tag}{list(l)} nonzero at identity")
    return CheckResult("wavelet_support", not bad, {"max_index": limit, "violations": bad})


def check_scaling_consistency(system: WaveletSystem, tol: float = 1e-12) -> CheckResult:
    """The label-0 wavelet spectrum must reproduce the scaling spectrum."""
    fam = system.family
    zero = (0,) * fam.s
    d = system.psi_hat[zero].max_abs_diff(fam.phi_hat.refine(system.psi_hat[zero].base))
    dd = system.dual_psi_hat[zero].max_abs_diff(fam.dual_phi_hat)
    return CheckResult("label0_is_scaling", max(d, dd) < tol, {"max_deviation": max(d, dd)})

"""Exact transforms between spectral and spatial step functions, and the
finite-section diagnostics built on them (Gram matrices, biorthogonality,
periodization)."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import kernels
from .algebra import FieldElement, digit_grid, digit_window, elements_from_window, field_dilate, h0_enumerate
from .characters import CosetAddress
from .errors import ParameterError
from .reports import CheckResult
from .spectral import (
    SpectralStepFunction,
    character_integrals,
    indicator,
    product,
    spectral_dilate,
)

PRUNE = 1e-14


def _msd_exponents(n_digits: int, s: int):
    # ascending column (block b, digit l) sits at msd position (n_blocks-1-b)*s + l
    n_blocks = n_digits // s
    for c in range(n_digits):
        b, l = divmod(c, s)
        yield n_digits - 1 - ((n_blocks - 1 - b) * s + l)


def _ranks(digits: np.ndarray, p: int, s: int) -> np.ndarray:
    """Row position of each ascending-index digit string inside ``digit_grid``."""
    digits = np.asarray(digits, dtype=np.int64)
    if digits.shape[1] == 0:
        return np.zeros(len(digits), dtype=np.int64)
    w = np.array([p ** e for e in _msd_exponents(digits.shape[1], s)], dtype=np.int64)
    return digits @ w


@dataclass(frozen=True, eq=False)
class SpatialStepFunction:
    """Function on ``K_{-rho}``, constant on cosets of ``K_R``.

    ``values[i]`` belongs to row ``i`` of ``digit_grid(p, s, -rho, R - 1)``.
    """

    p: int
    s: int
    R: int
    rho: int
    values: np.ndarray

    def __post_init__(self):
        if self.R < -self.rho:
            raise ParameterError(f"need R >= -rho, got R={self.R}, rho={self.rho}")
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.shape != (self.size,):
            raise ParameterError(f"expected {self.size} values, got {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.p ** (self.s * (self.R + self.rho))

    def grid(self) -> np.ndarray:
        return digit_grid(self.p, self.s, -self.rho, self.R - 1)

    def points(self) -> list[FieldElement]:
        return elements_from_window(self.grid(), -self.rho, self.p, self.s)

    def cell_measure(self) -> float:
        return float(self.p) ** (-self.s * self.R)

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2) * self.cell_measure())

    def value_at(self, x: FieldElement) -> complex:
        lo = x.min_index()
        if lo is not None and lo < -self.rho:
            return 0j
        d = digit_window([x], -self.rho, self.R - 1, self.s)
        return complex(self.values[_ranks(d, self.p, self.s)[0]])

    def evaluate(self, points) -> np.ndarray:
        return np.array([self.value_at(x) for x in points], dtype=np.complex128)

    def max_abs_diff(self, other: SpatialStepFunction) -> float:
        if (self.R, self.rho) != (other.R, other.rho):
            raise ParameterError("grids differ")
        return float(np.max(np.abs(self.values - other.values), initial=0.0))

    def csv_rows(self, name: str = "f"):
        """``name, digits..., re, im`` per grid point; digits listed from
        index ``-rho`` upwards."""
        for row, v in zip(self.grid(), self.values):
            yield [name, " ".join(str(int(d)) for d in row), repr(float(v.real)), repr(float(v.imag))]


def spatial_extent(f: SpectralStepFunction) -> tuple[int, int]:
    """Default ``(R, rho)`` for the inverse transform of ``f``."""
    top = f.top()
    R = -f.base if top is None else max(top + 1, -f.base)
    return R, f.base


def inverse_fourier(
    f: SpectralStepFunction,
    R: int | None = None,
    method: str = "direct",
    backend: str | None = None,
) -> SpatialStepFunction:
    """``f(x) = sum_cosets value * p^(-sL) (zeta, x)`` on ``K_{-L}``.

    ``method="direct"`` runs the character-sum kernel point by point;
    ``method="fft"`` scatters the coefficients onto the digit hypercube
    and applies an inverse FFT along every GF(p) digit axis.
    """
    R0, rho = spatial_extent(f)
    R = R0 if R is None else R
    if R < R0:
        raise ParameterError(f"R={R} is below the spectral top {R0}")
    p, s = f.p, f.s
    if method == "direct":
        grid = digit_grid(p, s, -rho, R - 1)
        cos_digits, vals = f.digit_arrays(R - 1)
        w = vals * float(p) ** (-s * f.base)
        out = kernels.character_sums(w, cos_digits, grid, p, backend=backend)
    elif method == "fft":
        n_digits = s * (R + rho)
        dense = np.zeros(p ** n_digits, dtype=np.complex128)
        cos_digits, vals = f.digit_arrays(R - 1)
        dense[_ranks(cos_digits, p, s)] = vals
        if n_digits:
            dense = np.fft.ifftn(dense.reshape((p,) * n_digits)).ravel()
        out = dense * float(p) ** (s * R)
    else:
        raise ParameterError(f"unknown method {method!r}")
    return SpatialStepFunction(p, s, R, rho, out)


def forward_fourier(
    F: SpatialStepFunction, method: str = "direct", prune: float = PRUNE, backend: str | None = None
) -> SpectralStepFunction:
    """``v(chi) = int f(x) conj((chi, x)) dmu`` as a base-``rho`` step function."""
    p, s, R, rho = F.p, F.s, F.R, F.rho
    grid = F.grid()
    if method == "direct":
        w = np.conj(F.values) * F.cell_measure()
        vals = np.conj(kernels.character_sums(w, grid, grid, p, backend=backend))
    elif method == "fft":
        n_digits = grid.shape[1]
        vals = F.values.copy()
        if n_digits:
            vals = np.fft.fftn(vals.reshape((p,) * n_digits)).ravel()
        vals = vals * F.cell_measure()
    else:
        raise ParameterError(f"unknown method {method!r}")
    scale = max(1.0, float(np.max(np.abs(vals), initial=0.0)))
    keep = np.abs(vals) > prune * scale
    out = {}
    for x, v in zip(elements_from_window(grid[keep], -rho, p, s), vals[keep]):
        out[CosetAddress(p, s, rho, x.blocks)] = v
    return SpectralStepFunction(p, s, rho, out)


def plancherel_gap(f: SpectralStepFunction, F: SpatialStepFunction | None = None) -> float:
    from .spectral import spectral_integral

    if F is None:
        F = inverse_fourier(f)
    return abs(F.norm2() - spectral_integral(f.abs2()).real)


# -- Gram matrices -------------------------------------------------------------


def _difference_points(rows, cols) -> list[FieldElement]:
    return [g - h for h in rows for g in cols]


def gram_matrix(f: SpectralStepFunction, shifts) -> np.ndarray:
    """``G[h, g] = int |f|^2 (chi, g - h) dnu`` over the given shifts."""
    shifts = list(shifts)
    if len(set(shifts)) != len(shifts):
        raise ParameterError("shifts must be distinct")
    n = len(shifts)
    vals = character_integrals(f.abs2(), _difference_points(shifts, shifts))
    return vals.reshape(n, n)


EIG_METHOD = "numpy.linalg.eigvalsh (LAPACK Hermitian solver)"


def gram_eigen_range(G: np.ndarray) -> tuple[float, float, str]:
    herm = float(np.max(np.abs(G - G.conj().T), initial=0.0))
    if herm > 1e-10:
        raise ParameterError(f"Gram matrix is not Hermitian (gap {herm})")
    ev = np.linalg.eigvalsh((G + G.conj().T) / 2)
    return float(ev[0]), float(ev[-1]), EIG_METHOD


def character_orthonormality(cosets, depth: int) -> float:
    """``max |G - I|`` for the characters ``(chi, h)``, ``h`` of the given
    depth, integrated over the union of ``cosets``."""
    cosets = list(cosets)
    p, s = cosets[0].p, cosets[0].s
    shifts = h0_enumerate(p, s, depth)
    n = len(shifts)
    G = character_integrals(indicator(cosets), _difference_points(shifts, shifts)).reshape(n, n)
    return float(np.max(np.abs(G - np.eye(n))))


# -- biorthogonality ------------------------------------------------------------


def pair_matrix(F: SpectralStepFunction, G: SpectralStepFunction, n: int, m: int, shifts) -> np.ndarray:
    """``<F_{n,h}, G_{m,g}>`` for all ``h, g`` in ``shifts``.

    ``F_{n,h}(x) = p^(ns/2) F(A^n x - h)``; in the spectral domain this is
    ``p^(-ns/2) F(chi A^-n) conj((chi, A^-n h))``.
    """
    shifts = list(shifts)
    P = product(spectral_dilate(F, n), spectral_dilate(G, m).conj())
    k = len(shifts)
    if P.is_zero():
        return np.zeros((k, k), dtype=np.complex128)
    pts = [field_dilate(g, -m) - field_dilate(h, -n) for h in shifts for g in shifts]
    scale = float(P.p) ** (-(n + m) * P.s / 2)
    return character_integrals(P, pts).reshape(k, k) * scale


def biorthogonality_report(system, depth: int, levels=(-1, 0, 1), tol: float = 1e-9) -> list[CheckResult]:
    """Deviation from the Kronecker pattern on a finite section.

    Three checks: scaling shifts against dual scaling shifts; wavelets
    against dual wavelets over all nonzero labels and level pairs; and
    level-0 scaling shifts against wavelets of nonnegative level (both
    directions), which must vanish.
    """
    fam = system.family
    shifts = h0_enumerate(fam.p, fam.s, depth)
    eye = np.eye(len(shifts))

    S = pair_matrix(fam.phi_hat, fam.dual_phi_hat, 0, 0, shifts)
    dev_s = float(np.max(np.abs(S - eye)))

    dev_w = 0.0
    worst = None
    labels = system.nonzero_labels
    for k, l in itertools.product(labels, labels):
        for n, m in itertools.product(levels, levels):
            M = pair_matrix(system.psi_hat[k], system.dual_psi_hat[l], n, m, shifts)
            target = eye if (k == l and n == m) else 0
            d = float(np.max(np.abs(M - target)))
            if d > dev_w:
                dev_w, worst = d, {"k": list(k), "l": list(l), "n": n, "m": m}

    dev_c = 0.0
    for l in labels:
        for m in (m for m in levels if m >= 0):
            A = pair_matrix(fam.phi_hat, system.dual_psi_hat[l], 0, m, shifts)
            B = pair_matrix(system.psi_hat[l], fam.dual_phi_hat, m, 0, shifts)
            dev_c = max(dev_c, float(np.max(np.abs(A))), float(np.max(np.abs(B))))

    common = {"depth": depth, "levels": list(levels), "tol": tol}
    return [
        CheckResult("biorthogonality_scaling", dev_s < tol, {"max_deviation": dev_s, **common}),
        CheckResult("biorthogonality_wavelets", dev_w < tol, {"max_deviation": dev_w, "worst": worst, **common}),
        CheckResult("biorthogonality_cross", dev_c < tol, {"max_deviation": dev_c, **common}),
    ]


# -- periodization and spatial refinement ---------------------------------------


def periodization_diagnostic(f: SpectralStepFunction, L: int) -> dict[CosetAddress, float]:
    """Sum of ``|f|^2`` over the translates by characters with digits at
    indices ``>= 0``, one entry per base-``L`` coset of the unit ball
    annihilator."""
    if L < f.base:
        raise ParameterError(f"resolution {L} is coarser than the function base {f.base}")
    g = f.refine(L)
    out = {}
    for x in elements_from_window(digit_grid(f.p, f.s, -L, -1), -L, f.p, f.s):
        out[CosetAddress(f.p, f.s, L, x.blocks)] = 0.0
    for a, v in g.values.items():
        key = a.truncate(hi=-1)
        out[key] += abs(v) ** 2
    return out


def spatial_refinement_deviation(
    phi_hat: SpectralStepFunction,
    beta: dict[FieldElement, complex],
    max_points: int | None = None,
    seed: int = 0,
) -> tuple[float, int, bool]:
    """``max |phi(x) - sum_h beta_h phi(A x - h)|`` over the spatial grid.

    Works on digit arrays: ``A x`` lowers every block index by one and
    ``- h`` is digitwise subtraction mod p.  Returns the deviation, the
    number of points checked and whether the grid was sampled (only when
    it exceeds ``max_points``).
    """
    phi = inverse_fourier(phi_hat)
    p, s, R, rho = phi.p, phi.s, phi.R, phi.rho
    grid = phi.grid()
    sampled = False
    if max_points is not None and len(grid) > max_points:
        rng = np.random.default_rng(seed)
        grid = grid[np.sort(rng.choice(len(grid), size=max_points, replace=False))]
        sampled = True
    coeffs = [(h, c) for h, c in beta.items() if abs(c) > 0]
    if not coeffs:
        return float(np.max(np.abs(phi.values), initial=0.0)), len(grid), sampled
    lows = [h.min_index() for h, _ in coeffs if h.min_index() is not None]
    highs = [max(n for n, _ in h.blocks) for h, _ in coeffs if h.blocks]
    lo = min([-rho - 1] + lows)
    hi = max([R - 1] + highs)
    width = (hi - lo + 1) * s
    # A x on the common window: grid block at index j lands at j - 1
    ax = np.zeros((len(grid), width), dtype=np.int64)
    off = (-rho - 1 - lo) * s
    ax[:, off:off + grid.shape[1]] = grid
    hs = digit_window([h for h, _ in coeffs], lo, hi, s)
    c = np.array([v for _, v in coeffs], dtype=np.complex128)
    below = (-rho - lo) * s
    keep_hi = (R - 1 - lo + 1) * s
    lhs = phi.values[_ranks(grid, p, s)]
    rhs = np.zeros(len(grid), dtype=np.complex128)
    for k in range(len(coeffs)):
        diff = (ax - hs[k]) % p
        inside = ~diff[:, :below].any(axis=1)
        vals = np.zeros(len(grid), dtype=np.complex128)
        vals[inside] = phi.values[_ranks(diff[inside, below:keep_hi], p, s)]
        rhs += c[k] * vals
    dev = float(np.max(np.abs(lhs - rhs), initial=0.0))
    return dev, len(grid), sampled

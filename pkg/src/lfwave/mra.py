"""Masks on tree-generated elementary sets and the scaling spectra they define.

``scaling_hat`` evaluates the finite product of periodized mask values
coset by coset, driven only by the mask table.  ``scaling_hat_paths``
recomputes the same function from the tree's zero-prefixed paths and is
kept as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import kernels
from .algebra import FieldElement, field_dilate, h0_enumerate
from .characters import CosetAddress
from .errors import MaskError, ParameterError
from .reports import CheckResult
from .spectral import (
    ElementarySet,
    SpectralStepFunction,
    addresses_from_codes,
    character_integrals,
    periodized_eval,
    spectral_dilate,
    tree_coset,
    window_table,
)
from .trees import ValidTree

UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Mask:
    """Mask values on the tree cosets (base N, digits on ``[-N, 0]``)."""

    values: SpectralStepFunction
    A: float
    B: float
    N: int
    tree_id: str | None = None

    @property
    def p(self) -> int:
        return self.values.p

    @property
    def s(self) -> int:
        return self.values.s

    @property
    def q(self) -> int:
        return self.p ** self.s

    def table(self) -> np.ndarray:
        return window_table(self.values, self.N)

    def __call__(self, a: CosetAddress) -> complex:
        return periodized_eval(self.values, a)

    def to_json(self) -> dict:
        return {
            "N": self.N, "A": self.A, "B": self.B, "tree_id": self.tree_id,
            "values": self.values.to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Mask:
        return cls(
            SpectralStepFunction.from_json(data["values"]),
            float(data["A"]), float(data["B"]), int(data["N"]), data.get("tree_id"),
        )


def _check_mask_values(values: SpectralStepFunction, N: int, A: float, B: float, tol: float = 0.0):
    if not 0 < A <= B:
        raise MaskError(f"need 0 < A <= B, got A={A}, B={B}")
    for a, v in values.values.items():
        m2 = abs(v) ** 2
        if m2 < A * (1 - tol) or m2 > B * (1 + tol):
            raise MaskError(f"|m({a!r})|^2 = {m2} outside [{A}, {B}]")
    unit = values.values.get(CosetAddress.identity(values.p, values.s, N))
    if unit is None or abs(unit - 1) > UNIT_TOL:
        raise MaskError(f"mask value on the identity coset must be 1, got {unit}")


def build_mask(
    eset: ElementarySet,
    assignment: Mapping[CosetAddress, complex],
    A: float | None = None,
    B: float | None = None,
    tree_id: str | None = None,
) -> Mask:
    """Attach values to every coset of a tree-generated set.

    ``A`` and ``B`` default to the extreme squared moduli; either way
    ``0 < A <= |m|^2 <= B`` is enforced and the identity-coset value must
    equal 1.
    """
    cosets = set(eset.cosets)
    keys = set(assignment)
    missing = cosets - keys
    if missing:
        raise MaskError(f"assignment misses {len(missing)} coset(s), e.g. {sorted(missing, key=CosetAddress.sort_key)[0]!r}")
    extra = keys - cosets
    if extra:
        raise MaskError(f"assignment has {len(extra)} coset(s) outside the set")
    vals = {}
    for a in eset.cosets:
        v = complex(assignment[a])
        if v == 0:
            raise MaskError(f"zero mask value on support coset {a!r} (A > 0 violated)")
        vals[a] = v
    ident = CosetAddress.identity(eset.p, eset.s, eset.N)
    if ident not in vals or abs(vals[ident] - 1) > UNIT_TOL:
        raise MaskError(f"mask value on the identity coset must be 1, got {vals.get(ident)}")
    vals[ident] = 1.0 + 0j
    mods = [abs(v) ** 2 for v in vals.values()]
    A = min(mods) if A is None else float(A)
    B = max(mods) if B is None else float(B)
    values = SpectralStepFunction(eset.p, eset.s, eset.N, vals)
    _check_mask_values(values, eset.N, A, B)
    return Mask(values, A, B, eset.N, tree_id)


def default_assignment(
    eset: ElementarySet, A: float = 0.5, B: float = 1.6, seed: int = 0, phases: bool = False
) -> dict[CosetAddress, complex]:
    """Seeded mask values with modulus uniform in ``[sqrt A, sqrt B]``.

    Phases are zero unless ``phases`` is set; the identity coset gets 1.
    """
    if not 0 < A <= 1 <= B:
        raise MaskError(f"need 0 < A <= 1 <= B, got A={A}, B={B}")
    rng = np.random.default_rng(seed)
    out = {}
    for a in eset.cosets:
        r = rng.uniform(np.sqrt(A), np.sqrt(B))
        theta = rng.uniform(0, 2 * np.pi) if phases else 0.0
        out[a] = complex(r * np.exp(1j * theta)) if phases else complex(r)
    out[CosetAddress.identity(eset.p, eset.s, eset.N)] = 1.0 + 0j
    return out


def _sweep_support(table: np.ndarray, q: int, N: int, lo: int, hi: int) -> np.ndarray:
    """Digit strings on ``lo..hi`` whose every sliding window has a nonzero entry.

    Digits are chosen from ``hi`` downwards; choosing index ``i`` closes
    the window ``[i, i + N]``.
    """
    nonzero = table != 0
    states = np.zeros((1, 0), dtype=np.int64)
    weights = q ** np.arange(N + 1, dtype=np.int64)
    for _ in range(hi, lo - 1, -1):
        n_states = states.shape[0]
        cand = np.empty((n_states * q, states.shape[1] + 1), dtype=np.int64)
        cand[:, 0] = np.tile(np.arange(q), n_states)
        cand[:, 1:] = np.repeat(states, q, axis=0)
        win = np.zeros((cand.shape[0], N + 1), dtype=np.int64)
        w = min(N + 1, cand.shape[1])
        win[:, :w] = cand[:, :w]
        keep = nonzero[win @ weights]
        states = cand[keep]
    return states


def scaling_hat(mask: Mask, H: int, extra_factors: int = 0, backend: str | None = None) -> SpectralStepFunction:
    """Finite product ``prod_{n=0}^{H-N+1} m(chi A^-n)`` coset by coset.

    Evaluated on the annihilator of ``K_{H-2N+2}``; a surviving coset with
    a nonzero digit at ``H - 2N + 1`` means ``H`` is below the true tree
    height and raises.  ``extra_factors`` appends further factors (and
    widens the sweep accordingly) for stabilization checks.
    """
    N, q = mask.N, mask.q
    if H < 1:
        raise ParameterError(f"height must be >= 1, got {H}")
    n_factors = H - N + 2 + extra_factors
    top = H - 2 * N + 1 + extra_factors
    table = mask.table()
    if top < -N:
        strings = np.zeros((1, 0), dtype=np.int64)
    else:
        strings = _sweep_support(table, q, N, -N, top)
    vals = kernels.window_products(strings, table, q, N + 1, n_factors, backend=backend)
    limit = H - 2 * N + 1
    if strings.shape[1] and np.any((vals != 0) & (strings[:, max(limit + N, 0):] != 0).any(axis=1)):
        raise ParameterError(f"support reaches index {limit}; H={H} is below the tree height")
    addrs = addresses_from_codes(strings, -N, mask.p, mask.s, N)
    return SpectralStepFunction(mask.p, mask.s, N, dict(zip(addrs, vals)))


def scaling_hat_paths(tree: ValidTree, mask: Mask) -> SpectralStepFunction:
    """Scaling spectrum from zero-prefixed root paths.

    The coset of a node ``v`` at depth ``d >= N`` carries the label of its
    depth-``k`` ancestor at index ``d - N - k``; its value is the product
    of mask values on the (N+1)-windows ending at the ancestors of depth
    ``>= N``.
    """
    N = tree.N
    if mask.N != N:
        raise ParameterError("mask and tree disagree on N")
    vals = {CosetAddress.identity(tree.p, tree.s, N): mask.values.values.get(
        CosetAddress.identity(tree.p, tree.s, N), 0j)}
    for v in range(tree.node_count):
        d = tree.depths[v]
        if d < N:
            continue
        path = tree.ancestors(v)
        prod = 1.0 + 0j
        digits = []
        for u in path:
            k = tree.depths[u]
            if k < N:
                break
            prod *= mask.values.values.get(tree_coset(tree, u), 0j)
            digits.append((d - N - k, tree.labels[u]))
        vals[CosetAddress(tree.p, tree.s, N, tuple(digits))] = prod
    return SpectralStepFunction(tree.p, tree.s, N, vals)


def dual_mask(mask: Mask) -> Mask:
    """Conjugate-reciprocal mask ``1 / conj(m)`` on the same support."""
    vals = mask.values.map(lambda v: 1 / v.conjugate())
    return Mask(vals, 1 / mask.B, 1 / mask.A, mask.N, mask.tree_id)


@dataclass(frozen=True, eq=False)
class MRAFamily:
    mask: Mask
    dual: Mask
    phi_hat: SpectralStepFunction
    dual_phi_hat: SpectralStepFunction
    H: int
    tree: ValidTree | None = None
    meta: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.mask.p

    @property
    def s(self) -> int:
        return self.mask.s

    @property
    def N(self) -> int:
        return self.mask.N

    @property
    def q(self) -> int:
        return self.mask.q

    def bounds(self) -> tuple[float, float]:
        return riesz_bounds(self)

    def envelope(self) -> tuple[float, float]:
        """Guaranteed Riesz constants ``(A^(H-N+2), B^(H-N+2))``."""
        e = self.H - self.N + 2
        return self.mask.A ** e, self.mask.B ** e


def build_family(tree: ValidTree | None, mask: Mask, H: int | None = None) -> MRAFamily:
    """Scaling pair and dual pair for a mask; ``H`` defaults to the tree height."""
    if H is None:
        if tree is None:
            raise ParameterError("a family without a tree needs an explicit H")
        H = tree.height
    if tree is not None:
        if tree.N != mask.N or (tree.p, tree.s) != (mask.p, mask.s):
            raise ParameterError("mask and tree parameters differ")
    dual = dual_mask(mask)
    phi = scaling_hat(mask, H)
    dphi = scaling_hat(dual, H)
    return MRAFamily(mask, dual, phi, dphi, H, tree)


def dual_scaling_hat(family: MRAFamily) -> SpectralStepFunction:
    return scaling_hat(family.dual, family.H)


def riesz_bounds(family: MRAFamily) -> tuple[float, float]:
    """``(min, max)`` of ``|phi_hat|^2`` over its support."""
    mods = [abs(v) ** 2 for v in family.phi_hat.values.values()]
    return min(mods), max(mods)


def mask_coefficients(mask: Mask) -> dict[FieldElement, complex]:
    """Coefficients ``beta_h`` for ``h`` of depth ``N + 1``.

    ``beta_h`` is the integral over the annihilator of ``K_1`` of
    ``m(chi) (chi, A^-1 h)``; the characters ``(chi, A^-1 h)`` are
    orthogonal there with squared norm ``p^s``.
    """
    shifts = h0_enumerate(mask.p, mask.s, mask.N + 1)
    pts = [field_dilate(h, -1) for h in shifts]
    beta = character_integrals(mask.values, pts)
    return dict(zip(shifts, beta))


def mask_from_coefficients(beta: Mapping[FieldElement, complex], p: int, s: int, N: int) -> SpectralStepFunction:
    """Evaluate ``p^-s sum_h beta_h conj((chi A^-1, h))`` on every base-N coset
    of the annihilator of ``K_1``."""
    from .algebra import digit_grid, digit_window, elements_from_window

    shifts = list(beta)
    ys = [field_dilate(h, -1) for h in shifts]
    lo, hi = -N, 0
    coeff_digits = digit_window(ys, lo, hi, s)
    grid = digit_grid(p, s, lo, hi)
    w = np.conj(np.array([beta[h] for h in shifts], dtype=np.complex128))
    vals = np.conj(kernels.character_sums(w, coeff_digits, grid, p)) * float(p) ** (-s)
    vals[np.abs(vals) < 1e-13] = 0
    out = {}
    for x, v in zip(elements_from_window(grid, lo, p, s), vals):
        out[CosetAddress(p, s, N, x.blocks)] = v
    return SpectralStepFunction(p, s, N, out)


def refinement_deviation(mask_values: SpectralStepFunction, phi: SpectralStepFunction) -> float:
    """``max |phi(chi) - m(chi) phi(chi A^-1)|`` over the union of supports."""
    N = mask_values.base
    shifted = spectral_dilate(phi, 1).refine(max(N, phi.base))
    phi = phi.refine(shifted.base)
    dev = 0.0
    for a in set(phi.values) | set(shifted.values):
        rhs = periodized_eval(mask_values, a.truncate(lo=-N)) * shifted.values.get(a, 0j)
        dev = max(dev, abs(phi.values.get(a, 0j) - rhs))
    return dev


def check_refinement(family: MRAFamily, tol: float = 1e-12) -> CheckResult:
    """Refinement identity for the primal and dual pairs."""
    primal = refinement_deviation(family.mask.values, family.phi_hat)
    dual = refinement_deviation(family.dual.values, family.dual_phi_hat)
    return CheckResult(
        "refinement",
        max(primal, dual) < tol,
        {"max_deviation": primal, "dual_max_deviation": dual, "tol": tol},
    )

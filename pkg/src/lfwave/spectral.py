"""Finitely supported step functions on the character group.

A :class:`SpectralStepFunction` of base ``L`` is constant on cosets of
the annihilator of ``K_{-L}``; each such coset has measure
``p^(-s L)`` (the unit-ball annihilator has measure 1).  Elementary
sets are built from N-valid trees and checked against the tiling and
shell conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .algebra import FieldElement, block_code, check_params, codes_from_digits, digit_window
from .characters import CosetAddress, addr_dilate
from .errors import CosetNonconstantError, ParameterError, TreeStructureError
from .trees import ValidTree, validate_tree


def _fsum_complex(values: Iterable[complex]) -> complex:
    values = list(values)
    return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))


@dataclass(frozen=True, eq=False)
class SpectralStepFunction:
    p: int
    s: int
    base: int
    values: Mapping[CosetAddress, complex] = field(default_factory=dict)

    def __post_init__(self):
        check_params(self.p, self.s)
        clean: dict[CosetAddress, complex] = {}
        for a, v in self.values.items():
            if (a.p, a.s, a.base) != (self.p, self.s, self.base):
                raise ParameterError(f"address {a!r} does not match base {self.base}")
            v = complex(v)
            if v != 0:
                clean[a] = v
        ordered = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))
        object.__setattr__(self, "values", ordered)

    # -- access ---------------------------------------------------------------

    @property
    def support(self) -> list[CosetAddress]:
        return list(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, a: CosetAddress) -> complex:
        return self.value_at(a)

    def value_at(self, a: CosetAddress) -> complex:
        """Value on the coset ``a``; ``a`` may be finer than the function."""
        if a.base < self.base:
            vals = {self.values.get(b, 0j) for b in a.refine(self.base)}
            if len(vals) > 1:
                raise CosetNonconstantError(
                    f"function of base {self.base} is not constant on a coset of base {a.base}"
                )
            return vals.pop()
        if a.base > self.base:
            a = a.truncate(lo=-self.base)
        return self.values.get(a, 0j)

    def top(self) -> int | None:
        """Highest digit index used by the support (None if no digits anywhere)."""
        tops = [a.top() for a in self.values if a.top() is not None]
        return max(tops) if tops else None

    def is_zero(self) -> bool:
        return not self.values

    # -- algebra ------------------------------------------------------------------

    def refine(self, base: int) -> SpectralStepFunction:
        if base == self.base:
            return self
        out = {}
        for a, v in self.values.items():
            for b in a.refine(base):
                out[b] = v
        return SpectralStepFunction(self.p, self.s, base, out)

    def map(self, fn) -> SpectralStepFunction:
        return SpectralStepFunction(self.p, self.s, self.base, {a: fn(v) for a, v in self.values.items()})

    def conj(self) -> SpectralStepFunction:
        return self.map(lambda v: v.conjugate())

    def abs2(self) -> SpectralStepFunction:
        return self.map(lambda v: complex(abs(v) ** 2))

    def scale(self, c: complex) -> SpectralStepFunction:
        return self.map(lambda v: c * v)

    def __mul__(self, other: SpectralStepFunction) -> SpectralStepFunction:
        return product(self, other)

    def __add__(self, other: SpectralStepFunction) -> SpectralStepFunction:
        f, g = common_base(self, other)
        out = dict(f.values)
        for a, v in g.values.items():
            out[a] = out.get(a, 0j) + v
        return SpectralStepFunction(self.p, self.s, f.base, out)

    def __sub__(self, other: SpectralStepFunction) -> SpectralStepFunction:
        return self + other.scale(-1)

    def translate(self, j: int, block) -> SpectralStepFunction:
        """``g(chi) = f(chi r_j^{-block})``: support moves by ``r_j^{block}``."""
        if j < -self.base:
            raise ParameterError("translation below the base needs refinement first")
        return SpectralStepFunction(
            self.p, self.s, self.base,
            {a.times_rademacher(j, block): v for a, v in self.values.items()},
        )

    def dilate(self, n: int = 1) -> SpectralStepFunction:
        return spectral_dilate(self, n)

    def max_abs_diff(self, other: SpectralStepFunction) -> float:
        d = self - other
        return max((abs(v) for v in d.values.values()), default=0.0)

    # -- dense views -----------------------------------------------------------

    def digit_arrays(self, hi: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """GF(p) digits of the support on indices ``-base..hi`` and the values."""
        if hi is None:
            top = self.top()
            hi = -self.base - 1 if top is None else top
        digits = np.zeros((len(self.values), max(hi + self.base + 1, 0) * self.s), dtype=np.int64)
        for i, a in enumerate(self.values):
            for j, v in a.digits:
                if j > hi:
                    raise ParameterError(f"support digit at {j} exceeds window top {hi}")
                k = (j + self.base) * self.s
                digits[i, k:k + self.s] = v
        vals = np.array(list(self.values.values()), dtype=np.complex128)
        return digits, vals

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "s": self.s,
            "base": self.base,
            "values": [
                {"addr": a.to_json(), "re": v.real, "im": v.imag} for a, v in self.values.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> SpectralStepFunction:
        p, s, base = int(data["p"]), int(data["s"]), int(data["base"])
        vals = {}
        for item in data["values"]:
            a = CosetAddress.from_json(item["addr"], p, s)
            if a.base != base:
                raise ParameterError("address base differs from function base")
            vals[a] = complex(float(item["re"]), float(item["im"]))
        return cls(p, s, base, vals)

    def __repr__(self) -> str:
        return f"SpectralStepFunction(p={self.p}, s={self.s}, L={self.base}, {len(self.values)} cosets)"


def indicator(cosets: Sequence[CosetAddress], value: complex = 1.0) -> SpectralStepFunction:
    """Step function equal to ``value`` on the union of ``cosets``."""
    cosets = list(cosets)
    if not cosets:
        raise ParameterError("indicator of an empty family needs explicit parameters")
    base = max(a.base for a in cosets)
    p, s = cosets[0].p, cosets[0].s
    out = {}
    for a in cosets:
        for b in a.refine(base):
            out[b] = value
    return SpectralStepFunction(p, s, base, out)


def zero_function(p: int, s: int, base: int) -> SpectralStepFunction:
    return SpectralStepFunction(p, s, base, {})


def common_base(f: SpectralStepFunction, g: SpectralStepFunction):
    if (f.p, f.s) != (g.p, g.s):
        raise ParameterError("step functions have different (p, s)")
    base = max(f.base, g.base)
    return f.refine(base), g.refine(base)


def product(f: SpectralStepFunction, g: SpectralStepFunction) -> SpectralStepFunction:
    f, g = common_base(f, g)
    if len(g) < len(f):
        out = {a: f.values[a] * v for a, v in g.values.items() if a in f.values}
    else:
        out = {a: v * g.values[a] for a, v in f.values.items() if a in g.values}
    return SpectralStepFunction(f.p, f.s, f.base, out)


def spectral_integral(f: SpectralStepFunction) -> complex:
    """``sum value * p^(-s L)`` with compensated summation."""
    w = float(f.p) ** (-f.s * f.base)
    return _fsum_complex(v * w for v in f.values.values())


def spectral_inner_product(f: SpectralStepFunction, g: SpectralStepFunction) -> complex:
    """``int f conj(g) dnu`` after refining both to a common base."""
    return spectral_integral(product(f, g.conj()))


def spectral_dilate(f: SpectralStepFunction, n: int) -> SpectralStepFunction:
    """``g(chi) = f(chi A^(-n))``; the integral scales by ``p^(s n)``."""
    return SpectralStepFunction(
        f.p, f.s, f.base - n, {addr_dilate(a, n): v for a, v in f.values.items()}
    )


def character_integrals(
    f: SpectralStepFunction, points: Sequence[FieldElement], backend: str | None = None
) -> np.ndarray:
    """``int f(chi) (chi, x) dnu(chi)`` for each point ``x``.

    A point with a block below ``-L`` integrates a nontrivial character
    over every base-``L`` coset and contributes exactly zero; the
    remaining points go through the character-sum kernel.
    """
    points = list(points)
    out = np.zeros(len(points), dtype=np.complex128)
    if not points or f.is_zero():
        return out
    top = f.top()
    hi = -f.base - 1 if top is None else top
    inside = [i for i, x in enumerate(points) if x.min_index() is None or x.min_index() >= -f.base]
    if not inside:
        return out
    cos_digits, vals = f.digit_arrays(hi)
    pts = digit_window([points[i] for i in inside], -f.base, hi, f.s)
    weights = vals * float(f.p) ** (-f.s * f.base)
    out[inside] = kernels.character_sums(weights, cos_digits, pts, f.p, backend=backend)
    return out


# ---------------------------------------------------------------------------
# elementary sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ElementarySet:
    """``p^(sN)`` cosets of base ``N`` with digits on ``[-N, M-1]``."""

    p: int
    s: int
    N: int
    M: int
    cosets: tuple[CosetAddress, ...]

    def indicator(self) -> SpectralStepFunction:
        return SpectralStepFunction(self.p, self.s, self.N, {a: 1.0 for a in self.cosets})

    def to_json(self) -> dict:
        return {
            "p": self.p, "s": self.s, "N": self.N, "M": self.M,
            "cosets": [a.to_json() for a in self.cosets],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> ElementarySet:
        p, s = int(data["p"]), int(data["s"])
        return cls(
            p, s, int(data["N"]), int(data["M"]),
            tuple(CosetAddress.from_json(c, p, s) for c in data["cosets"]),
        )


@dataclass
class ElementaryReport:
    N: int
    M: int
    count_ok: bool
    disjoint: bool
    xi_exhaustive: bool
    xi0_trivial: bool
    contained: bool
    shells: dict[int, bool]
    max_M: int | None

    @property
    def valid(self) -> bool:
        return (
            self.count_ok and self.disjoint and self.xi_exhaustive and self.xi0_trivial
            and self.contained and all(self.shells.values())
        )

    def to_json(self) -> dict:
        return {
            "valid": self.valid, "N": self.N, "M": self.M,
            "count_ok": self.count_ok, "disjoint": self.disjoint,
            "xi_exhaustive": self.xi_exhaustive, "xi0_trivial": self.xi0_trivial,
            "contained": self.contained,
            "shells": {str(k): v for k, v in self.shells.items()},
            "max_M": self.max_M,
        }


def _as_cosets(obj) -> list[CosetAddress]:
    if isinstance(obj, ElementarySet):
        return list(obj.cosets)
    if isinstance(obj, SpectralStepFunction):
        return obj.support
    return list(obj)


def _shell_hits(cosets: Sequence[CosetAddress], N: int, upto: int) -> dict[int, bool]:
    tops = {a.top() for a in cosets}
    return {l: (-N + l) in tops for l in range(upto)}


def validate_elementary(obj, N: int, M: int) -> ElementaryReport:
    """Check the (N, M)-elementary conditions on a family of cosets.

    Accepts an :class:`ElementarySet`, a step function (its support) or a
    list of addresses.  ``max_M`` is the unique ``M`` for which the
    family qualifies, or None.
    """
    cosets = _as_cosets(obj)
    if not cosets:
        raise ParameterError("empty coset family")
    p, s = cosets[0].p, cosets[0].s
    q = p ** s
    at_base = []
    for a in cosets:
        if a.base > N:
            raise ParameterError(f"coset {a!r} is finer than base N={N}")
        at_base.extend(a.refine(N))
    disjoint = len(set(at_base)) == len(at_base)
    count_ok = len(at_base) == q ** N
    xis = [a.truncate(hi=-1) for a in at_base]
    xi_exhaustive = len(set(xis)) == q ** N and all(x.top() is None or x.top() <= -1 for x in xis)
    xi0 = [a for a in at_base if a.truncate(hi=-1).is_identity()]
    xi0_trivial = len(xi0) == 1 and xi0[0].is_identity()
    contained = all(a.top() is None or a.top() <= M - 1 for a in at_base)
    shells = _shell_hits(at_base, N, M + N)
    tops = [a.top() for a in at_base if a.top() is not None]
    t_max = max(tops) if tops else -N - 1
    cand = max(t_max + 1, 0)
    max_M = cand if all(_shell_hits(at_base, N, cand + N).values()) else None
    return ElementaryReport(N, M, count_ok, disjoint, xi_exhaustive, xi0_trivial, contained, shells, max_M)


def tree_coset(t: ValidTree, v: int) -> CosetAddress:
    """Coset of the (N+1)-window ending at ``v``: deepest label at index -N."""
    word = t.window(v, t.N + 1)
    return CosetAddress(t.p, t.s, t.N, tuple((-t.N + j, word[t.N - j]) for j in range(t.N + 1)))


def elementary_from_tree(t: ValidTree) -> ElementarySet:
    """The set built from the (N+1)-windows of a valid tree."""
    rep = validate_tree(t)
    if not rep.valid:
        raise TreeStructureError("tree is not N-valid")
    cosets = sorted(
        (tree_coset(t, v) for v in range(t.node_count) if t.depths[v] >= t.N - 1),
        key=CosetAddress.sort_key,
    )
    M = 1 if any(a.top() == 0 for a in cosets) else 0
    return ElementarySet(t.p, t.s, t.N, M, tuple(cosets))


def periodized_eval(f: SpectralStepFunction, a: CosetAddress) -> complex:
    """Value of the periodic extension of a mask-like function at ``a``.

    ``f`` lives on the unit-ball annihilator of ``K_1`` (digits on
    ``[-L, 0]``); digits of ``a`` at indices >= 1 are discarded.
    """
    if f.top() is not None and f.top() > 0:
        raise ParameterError("periodized_eval needs a function with digits on [-L, 0]")
    low = a.digits[0][0] if a.digits else None
    if low is not None and low < -f.base:
        raise CosetNonconstantError(
            f"address has a digit at {low}, below the mask floor {-f.base}"
        )
    kept = tuple((j, v) for j, v in a.digits if j <= 0)
    return f.values.get(CosetAddress(f.p, f.s, f.base, kept), 0j)


def window_table(f: SpectralStepFunction, N: int) -> np.ndarray:
    """Dense table of a base-N function with digits on ``[-N, 0]``.

    Entry ``sum_j code(digit at -N + j) * q^j`` holds the value.
    """
    if f.base != N:
        raise ParameterError(f"expected base {N}, got {f.base}")
    q = f.p ** f.s
    table = np.zeros(q ** (N + 1), dtype=np.complex128)
    for a, v in f.values.items():
        code = 0
        for j, digits in a.digits:
            if not -N <= j <= 0:
                raise ParameterError(f"digit at {j} outside [-N, 0]")
            code += block_code(digits, f.p) * q ** (j + N)
        table[code] = v
    return table


def addresses_from_codes(codes: np.ndarray, lo: int, p: int, s: int, base: int) -> list[CosetAddress]:
    """Addresses from rows of block codes over indices ``lo, lo+1, ...``."""
    from .algebra import code_block

    out = []
    for row in codes:
        digits = tuple(
            (lo + k, code_block(int(c), p, s)) for k, c in enumerate(row) if c
        )
        out.append(CosetAddress(p, s, base, digits))
    return out


def support_codes(f: SpectralStepFunction, lo: int, hi: int) -> np.ndarray:
    digits = np.zeros((len(f), (hi - lo + 1) * f.s), dtype=np.int64)
    for i, a in enumerate(f.values):
        for j, v in a.digits:
            k = (j - lo) * f.s
            digits[i, k:k + f.s] = v
    return codes_from_digits(digits, f.p, f.s)

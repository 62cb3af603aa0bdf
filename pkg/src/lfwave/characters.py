"""Cosets of annihilators in the character group and the pairing (chi, x).

A character is a product of Rademacher powers ``r_j^{a_j}``; its coset
modulo the annihilator of ``K_{-L}`` is fixed by the exponents at the
indices ``j >= -L``.  :class:`CosetAddress` stores exactly those
exponents, with zero blocks pruned.
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .algebra import Digits, FieldElement, GFBlock, _normalize_blocks, all_blocks, check_params
from .errors import CosetNonconstantError, ParameterError


@dataclass(frozen=True)
class CosetAddress:
    """The coset ``(K_{-base}^+)^perp * prod_j r_j^{digits[j]}``.

    ``base`` is the integer ``L``; digits may only sit at indices
    ``>= -L`` and the coset has measure ``p^(-s L)``.
    """

    p: int
    s: int
    base: int
    digits: tuple[tuple[int, Digits], ...] = ()

    def __post_init__(self):
        check_params(self.p, self.s)
        digits = _normalize_blocks(self.p, self.s, self.digits)
        if digits and digits[0][0] < -self.base:
            raise ParameterError(
                f"digit at index {digits[0][0]} lies below the annihilator floor {-self.base}"
            )
        object.__setattr__(self, "digits", digits)

    @classmethod
    def identity(cls, p: int, s: int, base: int) -> CosetAddress:
        return cls(p, s, base)

    @classmethod
    def from_mapping(cls, p: int, s: int, base: int, digits: Mapping, absorb: bool = False):
        """Build from ``{index: block}``; with ``absorb`` digits below the
        floor are dropped (they lie inside the annihilator)."""
        items = [(int(k), v) for k, v in digits.items()]
        if absorb:
            items = [(k, v) for k, v in items if k >= -base]
        return cls(p, s, base, tuple(items))

    @property
    def floor(self) -> int:
        """Lowest index that carries information, ``-base``."""
        return -self.base

    def digit(self, j: int) -> Digits:
        for idx, v in self.digits:
            if idx == j:
                return v
        return (0,) * self.s

    def top(self) -> int | None:
        """Highest index with a nonzero digit, or None for the annihilator itself."""
        return self.digits[-1][0] if self.digits else None

    def is_identity(self) -> bool:
        return not self.digits

    def measure(self) -> Fraction:
        return Fraction(self.p) ** (-self.s * self.base)

    def __mul__(self, other: CosetAddress) -> CosetAddress:
        return addr_mul(self, other)

    def inverse(self) -> CosetAddress:
        return CosetAddress(
            self.p, self.s, self.base,
            tuple((j, tuple((-d) % self.p for d in v)) for j, v in self.digits),
        )

    def times_rademacher(self, j: int, block: Digits) -> CosetAddress:
        """Multiply by ``r_j^{block}``."""
        return CosetAddress(self.p, self.s, self.base, self.digits + ((j, tuple(block)),))

    def truncate(self, lo: int | None = None, hi: int | None = None) -> CosetAddress:
        """Drop digits outside ``lo..hi``; cutting at ``lo`` coarsens the base to ``-lo``."""
        base = self.base if lo is None else min(self.base, -lo)
        kept = tuple(
            (j, v) for j, v in self.digits
            if (lo is None or j >= lo) and (hi is None or j <= hi)
        )
        return CosetAddress(self.p, self.s, base, kept)

    def with_base(self, base: int) -> CosetAddress:
        """Same digits viewed at a finer base (no new digits)."""
        if base < self.base:
            raise ParameterError("with_base only refines")
        return CosetAddress(self.p, self.s, base, self.digits)

    def refine(self, base: int) -> list[CosetAddress]:
        return addr_refine(self, base)

    def dilate(self, n: int = 1) -> CosetAddress:
        return addr_dilate(self, n)

    def pairing(self, x: FieldElement) -> complex:
        return char_pairing(self, x)

    def key(self) -> tuple:
        return (self.base, self.digits)

    def sort_key(self) -> tuple:
        """Order by digit string, highest index most significant."""
        return tuple((-j, v) for j, v in reversed(self.digits))

    def to_json(self) -> dict:
        return {"base": self.base, "digits": {str(j): list(v) for j, v in self.digits}}

    @classmethod
    def from_json(cls, data: Mapping, p: int, s: int) -> CosetAddress:
        return cls(p, s, int(data["base"]), {int(k): v for k, v in data["digits"].items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{j}:{list(v)}" for j, v in self.digits)
        return f"Coset(L={self.base}, {{{body}}})"


def _check_pair(a: CosetAddress, b: CosetAddress) -> None:
    if (a.p, a.s) != (b.p, b.s):
        raise ParameterError("addresses have different (p, s)")


def addr_mul(a: CosetAddress, b: CosetAddress) -> CosetAddress:
    """Group product: exponent-wise block addition."""
    _check_pair(a, b)
    if a.base != b.base:
        raise ParameterError(f"base mismatch ({a.base} vs {b.base}); refine first")
    return CosetAddress(a.p, a.s, a.base, a.digits + b.digits)


def addr_refine(a: CosetAddress, base: int) -> list[CosetAddress]:
    """The ``p^(s (base - L))`` sub-cosets of base ``base`` that partition ``a``."""
    if base < a.base:
        raise ParameterError(f"cannot refine base {a.base} to coarser base {base}")
    new_indices = list(range(-base, -a.base))
    out = []
    for combo in itertools.product(all_blocks(a.p, a.s), repeat=len(new_indices)):
        extra = tuple(zip(new_indices, combo))
        out.append(CosetAddress(a.p, a.s, base, extra + a.digits))
    return out


def addr_dilate(a: CosetAddress, n: int) -> CosetAddress:
    """Image of the coset under ``chi -> chi A^n``: indices shift by ``+n``."""
    return CosetAddress(a.p, a.s, a.base - n, tuple((j + n, v) for j, v in a.digits))


def pairing_exponent(a: CosetAddress, x: FieldElement) -> int:
    """Exact exponent ``e`` with ``(chi, x) = exp(2 pi i e / p)`` on the coset."""
    if (a.p, a.s) != (x.p, x.s):
        raise ParameterError("address and field element have different (p, s)")
    lo = x.min_index()
    if lo is not None and lo < -a.base:
        raise CosetNonconstantError(
            f"coset-nonconstant pairing: element has a block at {lo} below floor {-a.base}"
        )
    xd = dict(x.blocks)
    e = 0
    for j, v in a.digits:
        w = xd.get(j)
        if w is not None:
            e += sum(d * u for d, u in zip(v, w))
    return e % a.p


def char_pairing(a: CosetAddress, x: FieldElement) -> complex:
    """Value of ``(chi, x)`` for any character ``chi`` in the coset ``a``."""
    e = pairing_exponent(a, x)
    if e == 0:
        return 1.0 + 0j
    if a.p == 2:
        return -1.0 + 0j
    return cmath.exp(2j * cmath.pi * e / a.p)


def rademacher(p: int, s: int, j: int, block: Digits | GFBlock, base: int | None = None) -> CosetAddress:
    """The coset of ``r_j^{block}``; base defaults to the coarsest admissible."""
    if isinstance(block, GFBlock):
        block = block.digits
    if base is None:
        base = -j
    return CosetAddress(p, s, base, ((j, tuple(block)),))

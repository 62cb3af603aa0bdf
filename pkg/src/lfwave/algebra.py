"""Digit arithmetic on GF(p)^s and finitely supported elements of F^(s).

An element of the field is a finite sum of blocks ``a_n g_n`` where each
block ``a_n`` is a vector of ``s`` residues mod ``p`` and ``g_n`` is the
basic sequence element with block ``(1, 0, ..., 0)`` at index ``n``.
Only the additive structure of GF(p^s) is modelled; field multiplication
is never needed by the constructions in this package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import ParameterError

Digits = tuple[int, ...]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_params(p: int, s: int, N: int | None = None) -> None:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ParameterError(f"p must be prime, got {p!r}")
    if not isinstance(s, (int, np.integer)) or s < 1:
        raise ParameterError(f"s must be a positive integer, got {s!r}")
    if N is not None and (not isinstance(N, (int, np.integer)) or N < 1):
        raise ParameterError(f"N must be a positive integer, got {N!r}")


def block_code(digits: Digits, p: int) -> int:
    """Lexicographic rank of a block (digit 0 most significant)."""
    code = 0
    for d in digits:
        code = code * p + d
    return code


def code_block(code: int, p: int, s: int) -> Digits:
    out = [0] * s
    for l in range(s - 1, -1, -1):
        code, out[l] = divmod(code, p)
    return tuple(out)


def all_blocks(p: int, s: int) -> list[Digits]:
    """Every element of GF(p)^s in lexicographic order, zero first."""
    return [tuple(d) for d in itertools.product(range(p), repeat=s)]


@dataclass(frozen=True)
class GFBlock:
    """One digit block, an element of GF(p)^s used additively."""

    p: int
    digits: Digits

    def __post_init__(self):
        check_params(self.p, len(self.digits))
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if any(not 0 <= d < self.p for d in self.digits):
            raise ParameterError(f"block digits must lie in [0, {self.p}): {self.digits}")

    @classmethod
    def zero(cls, p: int, s: int) -> GFBlock:
        return cls(p, (0,) * s)

    @classmethod
    def unit(cls, p: int, s: int) -> GFBlock:
        return cls(p, (1,) + (0,) * (s - 1))

    @classmethod
    def from_code(cls, code: int, p: int, s: int) -> GFBlock:
        return cls(p, code_block(code, p, s))

    @property
    def s(self) -> int:
        return len(self.digits)

    @property
    def code(self) -> int:
        return block_code(self.digits, self.p)

    def is_zero(self) -> bool:
        return not any(self.digits)

    def _check(self, other: GFBlock) -> None:
        if self.p != other.p or self.s != other.s:
            raise ParameterError(
                f"block parameters differ: (p={self.p}, s={self.s}) vs (p={other.p}, s={other.s})"
            )

    def __add__(self, other: GFBlock) -> GFBlock:
        return gf_add(self, other)

    def __neg__(self) -> GFBlock:
        return GFBlock(self.p, tuple((-d) % self.p for d in self.digits))

    def __sub__(self, other: GFBlock) -> GFBlock:
        return gf_add(self, -other)


def gf_add(a: GFBlock, b: GFBlock) -> GFBlock:
    a._check(b)
    return GFBlock(a.p, tuple((x + y) % a.p for x, y in zip(a.digits, b.digits)))


def gf_dot(a: GFBlock, b: GFBlock) -> int:
    """Pairing exponent sum_l a^(l) b^(l) mod p."""
    a._check(b)
    return sum(x * y for x, y in zip(a.digits, b.digits)) % a.p


def _normalize_blocks(p: int, s: int, blocks) -> tuple[tuple[int, Digits], ...]:
    items = blocks.items() if isinstance(blocks, Mapping) else blocks
    acc: dict[int, list[int]] = {}
    for n, digits in items:
        if isinstance(digits, GFBlock):
            digits = digits.digits
        digits = tuple(int(d) for d in digits)
        if len(digits) != s:
            raise ParameterError(f"block at index {n} has {len(digits)} digits, expected {s}")
        if any(not 0 <= d < p for d in digits):
            raise ParameterError(f"block at index {n} has digits outside [0, {p}): {digits}")
        cur = acc.setdefault(int(n), [0] * s)
        for l, d in enumerate(digits):
            cur[l] = (cur[l] + d) % p
    return tuple((n, tuple(v)) for n, v in sorted(acc.items()) if any(v))


@dataclass(frozen=True)
class FieldElement:
    """Finitely supported element ``sum a_n g_n`` of F^(s).

    ``blocks`` is a sorted tuple of ``(index, digits)`` pairs with zero
    blocks pruned, so equality is structural.
    """

    p: int
    s: int
    blocks: tuple[tuple[int, Digits], ...] = ()

    def __post_init__(self):
        check_params(self.p, self.s)
        object.__setattr__(self, "blocks", _normalize_blocks(self.p, self.s, self.blocks))

    @classmethod
    def zero(cls, p: int, s: int) -> FieldElement:
        return cls(p, s)

    @classmethod
    def basis(cls, p: int, s: int, n: int) -> FieldElement:
        """The basic sequence element g_n."""
        return cls(p, s, ((n, (1,) + (0,) * (s - 1)),))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.blocks)

    def block(self, n: int) -> GFBlock:
        for idx, digits in self.blocks:
            if idx == n:
                return GFBlock(self.p, digits)
        return GFBlock.zero(self.p, self.s)

    def digits_at(self, n: int) -> Digits:
        for idx, digits in self.blocks:
            if idx == n:
                return digits
        return (0,) * self.s

    def is_zero(self) -> bool:
        return not self.blocks

    def min_index(self) -> int | None:
        return self.blocks[0][0] if self.blocks else None

    def max_index(self) -> int | None:
        return self.blocks[-1][0] if self.blocks else None

    def _check(self, other: FieldElement) -> None:
        if (self.p, self.s) != (other.p, other.s):
            raise ParameterError("field elements have different (p, s)")

    def __add__(self, other: FieldElement) -> FieldElement:
        self._check(other)
        return FieldElement(self.p, self.s, self.blocks + other.blocks)

    def __neg__(self) -> FieldElement:
        return FieldElement(
            self.p, self.s, tuple((n, tuple((-d) % self.p for d in v)) for n, v in self.blocks)
        )

    def __sub__(self, other: FieldElement) -> FieldElement:
        return self + (-other)

    def dilate(self, n: int = 1) -> FieldElement:
        return field_dilate(self, n)

    def norm(self) -> Fraction:
        return field_norm(self)

    def is_shift(self) -> bool:
        """True when every block sits at a negative index (x in H_0)."""
        return all(n < 0 for n in self.support)

    @property
    def depth(self) -> int:
        """Shift depth: minus the smallest block index (0 for the zero element)."""
        if not self.is_shift():
            raise ParameterError("depth is defined only for elements of H_0")
        return -self.blocks[0][0] if self.blocks else 0

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "s": self.s,
            "blocks": {str(n): list(v) for n, v in self.blocks},
        }

    @classmethod
    def from_json(cls, data: Mapping) -> FieldElement:
        return cls(int(data["p"]), int(data["s"]), {int(k): v for k, v in data["blocks"].items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{n}:{list(v)}" for n, v in self.blocks) or "0"
        return f"FieldElement(p={self.p}, s={self.s}, {{{body}}})"


ShiftH0 = FieldElement


def field_dilate(x: FieldElement, n: int) -> FieldElement:
    """Apply the dilation g_k -> g_{k-1} ``n`` times (negative n inverts)."""
    return FieldElement(x.p, x.s, tuple((k - n, v) for k, v in x.blocks))


def field_norm(x: FieldElement) -> Fraction:
    """``p^(-s n)`` for the first nonzero block index ``n``; 0 for zero."""
    if x.is_zero():
        return Fraction(0)
    return Fraction(x.p) ** (-x.s * x.blocks[0][0])


def h0_enumerate(p: int, s: int, depth: int) -> list[FieldElement]:
    """All shifts with blocks on indices -1..-depth.

    Ordered lexicographically over digit strings with the index -1 block
    most significant.
    """
    check_params(p, s)
    if depth < 0:
        raise ParameterError(f"shift depth must be >= 0, got {depth}")
    blocks = all_blocks(p, s)
    out = []
    for combo in itertools.product(blocks, repeat=depth):
        out.append(FieldElement(p, s, tuple((-(j + 1), b) for j, b in enumerate(combo))))
    return out


def digit_window(elements: Iterable[FieldElement], lo: int, hi: int, s: int) -> np.ndarray:
    """GF(p) digits of each element on block indices ``lo..hi`` (ascending).

    Blocks outside the window are ignored; callers check support first
    when that matters.
    """
    elements = list(elements)
    width = max(hi - lo + 1, 0)
    out = np.zeros((len(elements), width * s), dtype=np.int64)
    for i, x in enumerate(elements):
        for n, v in x.blocks:
            if lo <= n <= hi:
                k = (n - lo) * s
                out[i, k:k + s] = v
    return out


def digit_grid(p: int, s: int, lo: int, hi: int) -> np.ndarray:
    """Every digit string on block indices ``lo..hi``.

    Rows are in lexicographic order with the highest index most
    significant; columns are GF(p) digits in ascending index order.
    """
    n_blocks = max(hi - lo + 1, 0)
    n_digits = n_blocks * s
    total = p ** n_digits
    # mixed-radix expansion of 0..total-1; most significant digit is the
    # first digit of the highest block
    ranks = np.arange(total, dtype=np.int64)
    msd_first = np.zeros((total, n_digits), dtype=np.int64)
    for k in range(n_digits - 1, -1, -1):
        ranks, msd_first[:, k] = np.divmod(ranks, p)
    # msd_first columns: block hi digit0..digit(s-1), block hi-1, ...
    out = np.zeros_like(msd_first)
    for b in range(n_blocks):
        src = b * s
        dst = (n_blocks - 1 - b) * s
        out[:, dst:dst + s] = msd_first[:, src:src + s]
    return out


def codes_from_digits(digits: np.ndarray, p: int, s: int) -> np.ndarray:
    """Collapse GF(p) digit columns into per-block codes (ascending index)."""
    n = digits.shape[0]
    n_blocks = digits.shape[1] // s if s else 0
    weights = p ** np.arange(s - 1, -1, -1, dtype=np.int64)
    return (digits.reshape(n, n_blocks, s) * weights).sum(axis=2)


def digits_from_codes(codes: np.ndarray, p: int, s: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    n, n_blocks = codes.shape
    out = np.zeros((n, n_blocks, s), dtype=np.int64)
    rem = codes.copy()
    for l in range(s - 1, -1, -1):
        rem, out[:, :, l] = np.divmod(rem, p)
    return out.reshape(n, n_blocks * s)


def elements_from_window(digits: np.ndarray, lo: int, p: int, s: int) -> list[FieldElement]:
    out = []
    for row in digits:
        blocks = []
        for b in range(len(row) // s):
            v = tuple(int(d) for d in row[b * s:(b + 1) * s])
            if any(v):
                blocks.append((lo + b, v))
        out.append(FieldElement(p, s, tuple(blocks)))
    return out

"""Fixed-width bit strings, SDR section layout, and the two matching predicates.

An SDR here is a bit string partitioned into feature | location | class
sections, written left to right (the leftmost character is the first
feature bit). The same container also represents don't-care masks (1 =
ignore that position) and single-section k-hot vectors.

Positions are string positions: 0-based, left to right. "Adjacent"
locations are adjacent string positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


class LayoutError(ValueError):
    """Width or section-layout violation."""


@dataclass(frozen=True)
class Bits:
    """A value-semantic bit string of fixed width.

    Internally an int, MSB-first, so that ``str()`` reads exactly like the
    canonical text form (position 0 is the most significant bit). Bit-exact
    textual round trip is part of the contract.
    """

    value: int
    width: int

    def __post_init__(self) -> None:
        if self.width < 0:
            raise LayoutError(f"negative width {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise LayoutError(f"value 0x{self.value:x} does not fit in {self.width} bits")

    @classmethod
    def zeros(cls, width: int) -> Bits:
        return cls(0, width)

    @classmethod
    def ones(cls, width: int) -> Bits:
        return cls((1 << width) - 1, width)

    @classmethod
    def one_hot(cls, width: int, position: int) -> Bits:
        if not 0 <= position < width:
            raise LayoutError(f"hot position {position} outside width {width}")
        return cls(1 << (width - 1 - position), width)

    @classmethod
    def from_positions(cls, width: int, positions: Iterable[int]) -> Bits:
        value = 0
        for p in positions:
            if not 0 <= p < width:
                raise LayoutError(f"position {p} outside width {width}")
            value |= 1 << (width - 1 - p)
        return cls(value, width)

    @classmethod
    def parse(cls, text: str, width: int | None = None) -> Bits:
        """Parse '0'/'1' text; a '|' between sections is accepted and ignored."""
        raw = text.replace("|", "")
        if raw and set(raw) - {"0", "1"}:
            raise LayoutError(f"invalid bit characters in {text!r}")
        if width is not None and len(raw) != width:
            raise LayoutError(f"expected {width} bits, got {len(raw)} in {text!r}")
        return cls(int(raw, 2) if raw else 0, len(raw))

    def __str__(self) -> str:
        return format(self.value, f"0{self.width}b") if self.width else ""

    def bit(self, position: int) -> int:
        if not 0 <= position < self.width:
            raise LayoutError(f"position {position} outside width {self.width}")
        return (self.value >> (self.width - 1 - position)) & 1

    @property
    def popcount(self) -> int:
        return self.value.bit_count()

    @property
    def is_zero(self) -> bool:
        return self.value == 0

    @property
    def hot_positions(self) -> tuple[int, ...]:
        """String positions of the set bits, ascending."""
        out = []
        v = self.value
        while v:
            low = v & -v
            out.append(self.width - low.bit_length())
            v ^= low
        out.reverse()
        return tuple(out)

    def _check_same_width(self, other: Bits) -> None:
        if self.width != other.width:
            raise LayoutError(f"width mismatch: {self.width} vs {other.width}")

    def __or__(self, other: Bits) -> Bits:
        self._check_same_width(other)
        return Bits(self.value | other.value, self.width)

    def __and__(self, other: Bits) -> Bits:
        self._check_same_width(other)
        return Bits(self.value & other.value, self.width)

    def __xor__(self, other: Bits) -> Bits:
        self._check_same_width(other)
        return Bits(self.value ^ other.value, self.width)

    def invert(self) -> Bits:
        return Bits(self.value ^ ((1 << self.width) - 1), self.width)


def concat(*parts: Bits) -> Bits:
    """Concatenate left to right; the first part lands in the leftmost positions."""
    value = 0
    width = 0
    for p in parts:
        value = (value << p.width) | p.value
        width += p.width
    return Bits(value, width)


@dataclass(frozen=True)
class SdrLayout:
    """Section widths of an SDR: feature | location | class, in that order."""

    feature_bits: int
    location_bits: int
    class_bits: int

    def __post_init__(self) -> None:
        for name in ("feature_bits", "location_bits", "class_bits"):
            if getattr(self, name) < 1:
                raise LayoutError(f"{name} must be >= 1")

    @property
    def total(self) -> int:
        return self.feature_bits + self.location_bits + self.class_bits

    def check_width(self, bits: Bits) -> None:
        if bits.width != self.total:
            raise LayoutError(f"SDR width {bits.width} != layout total {self.total}")

    def split(self, sdr: Bits) -> tuple[Bits, Bits, Bits]:
        """Partition a full-width SDR into (feature, location, class) sections."""
        self.check_width(sdr)
        lc = self.location_bits + self.class_bits
        feature = Bits(sdr.value >> lc, self.feature_bits)
        location = Bits((sdr.value >> self.class_bits) & ((1 << self.location_bits) - 1),
                        self.location_bits)
        class_ = Bits(sdr.value & ((1 << self.class_bits) - 1), self.class_bits)
        return feature, location, class_

    def join(self, feature: Bits, location: Bits, class_: Bits) -> Bits:
        widths = (feature.width, location.width, class_.width)
        expected = (self.feature_bits, self.location_bits, self.class_bits)
        if widths != expected:
            raise LayoutError(f"section widths {widths} != layout {expected}")
        return concat(feature, location, class_)

    def parse(self, text: str) -> Bits:
        return Bits.parse(text, width=self.total)

    def pretty(self, sdr: Bits) -> str:
        """Human-readable text with '|' between sections."""
        f, l, c = self.split(sdr)
        return f"{f}|{l}|{c}"


def is_one_hot(v: Bits) -> bool:
    """True iff exactly one bit is set."""
    return v.popcount == 1


def equality_match(stored: Bits, query: Bits, dc: Bits) -> bool:
    """Exact equality over every position the mask does not cover.

    True iff stored[p] == query[p] at every position p with dc[p] = 0.
    An all-ones mask matches anything; an all-zeros mask is plain equality.
    """
    if not stored.width == query.width == dc.width:
        raise LayoutError("equality_match operands must share one width")
    care = ((1 << stored.width) - 1) & ~dc.value
    return ((stored.value ^ query.value) & care) == 0


def membership_match(stored: Bits, query: Bits, dc: Bits) -> bool:
    """Set-membership style match used by class validation.

    True iff some position p has dc[p] = 0 and both query[p] and stored[p]
    set. With an all-ones mask the existential is vacuous: no match.
    """
    if not stored.width == query.width == dc.width:
        raise LayoutError("membership_match operands must share one width")
    care = ((1 << stored.width) - 1) & ~dc.value
    return (stored.value & query.value & care) != 0

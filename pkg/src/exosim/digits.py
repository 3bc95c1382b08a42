"""Digit streams for positional behavior.

A positional entity replays the digits of a fixed mathematical constant
(or an explicitly listed digit string) in the base given by the size of
the act alphabet. The stream starts with the integer-part digits of the
constant and continues with its fractional digits, so pi in base 10 is
3, 1, 4, 1, 5, ... and pi in base 2 starts 1, 1 (the integer part 3).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

_GUARD_DECIMALS = 10


class DigitError(Exception):
    pass


class DigitSourceExhausted(DigitError):
    """An explicit digit list was asked for a position past its end."""


class DigitOutOfRange(DigitError):
    """An explicit digit is too large for the requested base."""


def _scaled_constant(name: str, decimals: int) -> int:
    """floor(constant * 10**decimals) computed with guard precision."""
    with mpmath.workdps(decimals + 2 * _GUARD_DECIMALS):
        if name == "pi":
            x = +mpmath.pi
        elif name == "e":
            x = +mpmath.e
        else:
            raise DigitError(f"unknown constant {name!r}")
        return int(mpmath.floor(x * mpmath.mpf(10) ** decimals))


def constant_digits(name: str, base: int, count: int) -> list[int]:
    """First count digits of a named constant in the given base.

    Integer-part digits come first, then fractional digits. Base 1 is the
    degenerate unary alphabet: every digit is 0.
    """
    if base < 1:
        raise DigitError(f"base must be at least 1, got {base}")
    if count < 0:
        raise DigitError(f"count must be non-negative, got {count}")
    if base == 1:
        return [0] * count
    # Enough decimal precision that count base-b digits are exact, plus guard.
    decimals = int(count * mpmath.log10(base)) + _GUARD_DECIMALS
    scaled = _scaled_constant(name, decimals)
    modulus = 10**decimals
    integer_part, frac = divmod(scaled, modulus)
    head: list[int] = []
    while integer_part:
        integer_part, d = divmod(integer_part, base)
        head.append(d)
    head.reverse()
    out = head[:count]
    while len(out) < count:
        frac *= base
        d, frac = divmod(frac, modulus)
        out.append(d)
    return out


@dataclass
class ConstantDigits:
    """Lazily extended digit stream of a named constant in one base."""

    name: str
    base: int
    _cache: list[int] = field(default_factory=list, repr=False, compare=False)

    def digit(self, position: int) -> int:
        if position < 0:
            raise DigitError(f"digit position must be non-negative, got {position}")
        if position >= len(self._cache):
            # Grow geometrically so a long run recomputes the prefix rarely.
            self._cache = constant_digits(
                self.name, self.base, max(64, 2 * (position + 1))
            )
        return self._cache[position]


@dataclass(frozen=True)
class ExplicitDigits:
    """A finite digit list given directly in the declaration."""

    digits: tuple[int, ...]
    base: int

    def __post_init__(self) -> None:
        for i, d in enumerate(self.digits):
            if not 0 <= d < max(self.base, 1):
                raise DigitOutOfRange(
                    f"digit {d} at position {i} does not fit base {self.base}"
                )

    def digit(self, position: int) -> int:
        if position < 0:
            raise DigitError(f"digit position must be non-negative, got {position}")
        if position >= len(self.digits):
            raise DigitSourceExhausted(
                f"explicit digit list of length {len(self.digits)} has no position {position}"
            )
        return self.digits[position]


def parse_digit_string(text: str, base: int) -> ExplicitDigits:
    """Parse a digit string like ``"0121"`` (digits 0-9 then a-z)."""
    digits = []
    for i, ch in enumerate(text):
        try:
            value = int(ch, 36)
        except ValueError:
            raise DigitOutOfRange(f"character {ch!r} at position {i} is not a digit") from None
        digits.append(value)
    return ExplicitDigits(tuple(digits), base)

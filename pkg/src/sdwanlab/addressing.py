"""IPv4-style addresses and CIDR prefixes.

Thin value types over integer math. Addresses order lexicographically by
octet (equivalently, by their 32-bit value), prefixes require host bits to
be zero so that every prefix has exactly one canonical spelling.
"""

from dataclasses import dataclass
from functools import total_ordering

from .errors import ValidationError


@total_ordering
@dataclass(frozen=True)
class NetAddress:
    """A single IPv4-style address (four octets)."""

    octets: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.octets) != 4 or any(not (0 <= o <= 255) for o in self.octets):
            raise ValidationError(f"invalid address octets: {self.octets!r}")

    @classmethod
    def parse(cls, text: str) -> "NetAddress":
        parts = text.strip().split(".")
        if len(parts) != 4 or not all(p.isdigit() for p in parts):
            raise ValidationError(f"invalid address: {text!r}")
        return cls(tuple(int(p) for p in parts))

    @property
    def value(self) -> int:
        a, b, c, d = self.octets
        return (a << 24) | (b << 16) | (c << 8) | d

    @classmethod
    def from_value(cls, value: int) -> "NetAddress":
        if not (0 <= value <= 0xFFFFFFFF):
            raise ValidationError(f"address value out of range: {value}")
        return cls(((value >> 24) & 255, (value >> 16) & 255, (value >> 8) & 255, value & 255))

    def __str__(self) -> str:
        return ".".join(str(o) for o in self.octets)

    def __lt__(self, other: "NetAddress") -> bool:
        return self.octets < other.octets


@dataclass(frozen=True)
class Prefix:
    """A CIDR prefix; host bits below `length` must be zero."""

    base: NetAddress
    length: int

    def __post_init__(self):
        if not (0 <= self.length <= 32):
            raise ValidationError(f"invalid prefix length: {self.length}")
        if self.base.value & ~self.mask & 0xFFFFFFFF:
            raise ValidationError(f"host bits set in prefix base: {self}")

    @classmethod
    def parse(cls, text: str) -> "Prefix":
        if "/" not in text:
            raise ValidationError(f"invalid prefix (missing /length): {text!r}")
        base, _, length = text.partition("/")
        if not length.isdigit():
            raise ValidationError(f"invalid prefix length: {text!r}")
        return cls(NetAddress.parse(base), int(length))

    @property
    def mask(self) -> int:
        return 0 if self.length == 0 else (0xFFFFFFFF << (32 - self.length)) & 0xFFFFFFFF

    def contains(self, addr: NetAddress) -> bool:
        return (addr.value & self.mask) == self.base.value

    def overlaps(self, other: "Prefix") -> bool:
        shorter = self if self.length <= other.length else other
        longer = other if shorter is self else self
        return shorter.contains(longer.base)

    def __str__(self) -> str:
        return f"{self.base}/{self.length}"


def interface_spec(text: str) -> tuple[NetAddress, Prefix]:
    """Parse 'A.B.C.D/L' into (address, enclosing canonical prefix)."""
    addr_text, _, length = text.partition("/")
    if not length.isdigit():
        raise ValidationError(f"invalid interface address: {text!r}")
    addr = NetAddress.parse(addr_text)
    length = int(length)
    if not (0 <= length <= 32):
        raise ValidationError(f"invalid interface address: {text!r}")
    mask = 0 if length == 0 else (0xFFFFFFFF << (32 - length)) & 0xFFFFFFFF
    return addr, Prefix(NetAddress.from_value(addr.value & mask), length)

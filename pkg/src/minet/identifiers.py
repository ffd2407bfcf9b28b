"""Multi-modal identifier space.

An identifier names a thing in one of five address families: named content,
identity, geospatial path, IP address, or a legacy DNS domain.  The canonical
text form carries a scheme prefix so the family survives a round trip through
text:

    ccn:/ndr/edu/pkusz/node3      content, hierarchical path
    id:/alice/phone               identity, hierarchical path
    geo:/cn/gd/sz/518055          geospatial, hierarchical path
    ip:10.0.0.7                   host address (v4 or v6)
    ip:10.0.0.0/8                 address prefix (table keys)
    dns:example.com               legacy domain, dot-separated labels

Path labels may contain any UTF-8 text except '/' and control characters;
DNS labels additionally exclude '.'.  Parsing and formatting are exact
inverses on every valid identifier.
"""

from __future__ import annotations

import enum
import ipaddress
from dataclasses import dataclass, field


class IdentifierError(ValueError):
    """Base class for identifier parse/usage errors."""


class EmptyName(IdentifierError):
    pass


class BadScheme(IdentifierError):
    pass


class BadIpSyntax(IdentifierError):
    pass


class IllegalLabel(IdentifierError):
    pass


class KindMismatch(IdentifierError):
    pass


class WrongKind(IdentifierError):
    pass


class Kind(enum.Enum):
    CONTENT = "ccn"
    IDENTITY = "id"
    GEO = "geo"
    IP = "ip"
    LEGACY_DOMAIN = "dns"


PATH_KINDS = (Kind.CONTENT, Kind.IDENTITY, Kind.GEO)
#: Kinds whose components form a hierarchy with prefix semantics.
HIERARCHICAL_KINDS = (Kind.CONTENT, Kind.IDENTITY, Kind.GEO, Kind.LEGACY_DOMAIN)

_SCHEME_TO_KIND = {k.value: k for k in Kind}


def _check_label(label: str, kind: Kind) -> None:
    if not label:
        raise IllegalLabel("empty component")
    for ch in label:
        if ch == "/" or ord(ch) < 0x20 or ord(ch) == 0x7F:
            raise IllegalLabel(f"character {ch!r} not allowed in component {label!r}")
    if kind is Kind.LEGACY_DOMAIN and "." in label:
        raise IllegalLabel(f"'.' not allowed inside domain label {label!r}")


@dataclass(frozen=True, slots=True)
class Identifier:
    """One name in the multi-modal identifier space.

    ``components`` is the label path for hierarchical kinds and empty for
    IP.  IP identifiers carry the packed address in ``addr`` plus an
    optional CIDR ``prefix_len`` (None means a full host address).
    """

    kind: Kind
    components: tuple[str, ...] = ()
    addr: bytes | None = field(default=None, repr=False)
    prefix_len: int | None = None

    def __post_init__(self) -> None:
        if self.kind is Kind.IP:
            if self.components:
                raise IllegalLabel("ip identifiers carry no components")
            if self.addr is None or len(self.addr) not in (4, 16):
                raise BadIpSyntax("ip identifier needs a 4- or 16-byte address")
            if self.prefix_len is not None and not 0 <= self.prefix_len <= 8 * len(self.addr):
                raise BadIpSyntax(f"prefix length {self.prefix_len} out of range")
        else:
            if not self.components:
                raise EmptyName(f"{self.kind.value} identifier needs at least one component")
            if self.addr is not None or self.prefix_len is not None:
                raise IllegalLabel("only ip identifiers carry an address")
            for label in self.components:
                _check_label(label, self.kind)

    @property
    def raw(self) -> str:
        """Canonical text form; ``parse_identifier(x.raw) == x``."""
        return format_identifier(self)

    @property
    def is_hierarchical(self) -> bool:
        return self.kind is not Kind.IP

    @property
    def ip_bits(self) -> int:
        """Number of significant leading bits for an IP identifier."""
        if self.kind is not Kind.IP:
            raise WrongKind("ip_bits on a non-ip identifier")
        return self.prefix_len if self.prefix_len is not None else 8 * len(self.addr)

    def child(self, *labels: str) -> "Identifier":
        """Extend a hierarchical identifier by one or more labels."""
        if self.kind is Kind.IP:
            raise WrongKind("cannot extend an ip identifier")
        return Identifier(self.kind, self.components + tuple(labels))

    def __str__(self) -> str:
        return self.raw


def parse_identifier(text: str) -> Identifier:
    """Parse canonical text into an :class:`Identifier`.

    Raises :class:`EmptyName`, :class:`BadScheme`, :class:`BadIpSyntax` or
    :class:`IllegalLabel` on malformed input.
    """
    if not text:
        raise EmptyName("empty identifier text")
    scheme, sep, rest = text.partition(":")
    if not sep:
        raise BadScheme(f"missing scheme prefix in {text!r}")
    kind = _SCHEME_TO_KIND.get(scheme)
    if kind is None:
        raise BadScheme(f"unknown scheme {scheme!r}")

    if kind is Kind.IP:
        addr_text, slash, len_text = rest.partition("/")
        try:
            packed = ipaddress.ip_address(addr_text).packed
        except ValueError as exc:
            raise BadIpSyntax(f"bad ip address {addr_text!r}: {exc}") from exc
        prefix_len = None
        if slash:
            if not len_text.isdigit():
                raise BadIpSyntax(f"bad prefix length {len_text!r}")
            prefix_len = int(len_text)
            if prefix_len > 8 * len(packed):
                raise BadIpSyntax(f"prefix length {prefix_len} exceeds address width")
        return Identifier(Kind.IP, (), packed, prefix_len)

    if kind is Kind.LEGACY_DOMAIN:
        if not rest:
            raise EmptyName("empty domain name")
        return Identifier(kind, tuple(rest.split(".")))

    # Path kinds: leading slash then '/'-separated labels.
    if not rest or rest == "/":
        raise EmptyName(f"{scheme} identifier needs at least one component")
    if not rest.startswith("/"):
        raise IllegalLabel(f"{scheme} identifier path must start with '/'")
    return Identifier(kind, tuple(rest[1:].split("/")))


def format_identifier(ident: Identifier) -> str:
    """Canonical text form of an identifier."""
    if ident.kind is Kind.IP:
        addr = ipaddress.ip_address(ident.addr)
        if ident.prefix_len is None:
            return f"ip:{addr}"
        return f"ip:{addr}/{ident.prefix_len}"
    if ident.kind is Kind.LEGACY_DOMAIN:
        return "dns:" + ".".join(ident.components)
    return f"{ident.kind.value}:/" + "/".join(ident.components)


def is_prefix_of(a: Identifier, b: Identifier) -> bool:
    """True iff ``a.components`` is a leading sublist of ``b.components``.

    Defined only for two identifiers of the same hierarchical kind;
    raises :class:`KindMismatch` otherwise.
    """
    if a.kind is not b.kind:
        raise KindMismatch(f"{a.kind.value} vs {b.kind.value}")
    if a.kind is Kind.IP:
        raise KindMismatch("ip identifiers have no component hierarchy")
    if len(a.components) > len(b.components):
        return False
    return b.components[: len(a.components)] == a.components


def ip_leading_bits(ident: Identifier) -> tuple[int, ...]:
    """Leading bits of an IP identifier, most significant first."""
    if ident.kind is not Kind.IP:
        raise WrongKind("not an ip identifier")
    value = int.from_bytes(ident.addr, "big")
    width = 8 * len(ident.addr)
    return tuple((value >> (width - 1 - i)) & 1 for i in range(ident.ip_bits))

"""Publisher keys and signed resource records.

A published resource is bound to its publisher by a signature over the
(name, content hash, locator) triple, which makes publication
non-repudiable: flipping any signed field, or the content bytes behind the
hash, breaks verification.

The signature algorithm hides behind :class:`SignatureScheme` so it can be
swapped without touching record logic; the default is Ed25519 from the
``cryptography`` package.  Records serialize to a length-prefixed TLV:

    record  := field*
    field   := type(1 byte) length(4 bytes, big-endian) value
    types   : 0x01 name, 0x02 publisher, 0x03 content_hash,
              0x04 locator, 0x05 signature

Name and locator values are canonical identifier text in UTF-8.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Protocol

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .identifiers import Identifier, Kind, WrongKind, parse_identifier


@dataclass(frozen=True, slots=True)
class KeyPair:
    public: bytes
    secret: bytes


class SignatureScheme(Protocol):
    """Deterministic asymmetric signatures with >= 128-bit security."""

    name: str

    def generate(self, seed: bytes | None = None) -> KeyPair: ...

    def sign(self, secret: bytes, message: bytes) -> bytes: ...

    def verify(self, public: bytes, signature: bytes, message: bytes) -> bool: ...


class Ed25519Scheme:
    name = "ed25519"

    def generate(self, seed: bytes | None = None) -> KeyPair:
        if seed is not None:
            # Deterministic keys for reproducible fixtures: the 32-byte
            # private scalar is a digest of the seed.
            secret = hashlib.sha256(b"minet-ed25519-" + seed).digest()
            key = Ed25519PrivateKey.from_private_bytes(secret)
        else:
            key = Ed25519PrivateKey.generate()
        return KeyPair(
            public=key.public_key().public_bytes_raw(),
            secret=key.private_bytes_raw(),
        )

    def sign(self, secret: bytes, message: bytes) -> bytes:
        return Ed25519PrivateKey.from_private_bytes(secret).sign(message)

    def verify(self, public: bytes, signature: bytes, message: bytes) -> bool:
        try:
            Ed25519PublicKey.from_public_bytes(public).verify(signature, message)
            return True
        except (InvalidSignature, ValueError):
            return False


ED25519 = Ed25519Scheme()

DIGEST_SIZE = 32


def content_digest(data: bytes) -> bytes:
    """256-bit collision-resistant digest of resource bytes."""
    return hashlib.sha256(data).digest()


def publisher_id(public_key: bytes) -> bytes:
    """Deterministic publisher identity: digest of the public key."""
    return hashlib.sha256(public_key).digest()


@dataclass(frozen=True, slots=True)
class ResourceRecord:
    """A signed publication: content name -> (hash, locator, publisher)."""

    name: Identifier
    publisher: bytes
    content_hash: bytes
    locator: Identifier
    signature: bytes


_T_NAME, _T_PUBLISHER, _T_HASH, _T_LOCATOR, _T_SIGNATURE = 1, 2, 3, 4, 5


def _tlv(ftype: int, value: bytes) -> bytes:
    return bytes([ftype]) + len(value).to_bytes(4, "big") + value


def _signing_payload(name: Identifier, content_hash: bytes, locator: Identifier) -> bytes:
    return (
        _tlv(_T_NAME, name.raw.encode())
        + _tlv(_T_HASH, content_hash)
        + _tlv(_T_LOCATOR, locator.raw.encode())
    )


def sign_record(
    name: Identifier,
    content_hash: bytes,
    locator: Identifier,
    keypair: KeyPair,
    scheme: SignatureScheme = ED25519,
) -> ResourceRecord:
    """Build a publication record signed by ``keypair``.

    ``name`` must be a content identifier; anything else raises
    :class:`WrongKind`.
    """
    if name.kind is not Kind.CONTENT:
        raise WrongKind(f"publications name content, not {name.kind.value}")
    signature = scheme.sign(keypair.secret, _signing_payload(name, content_hash, locator))
    return ResourceRecord(
        name=name,
        publisher=publisher_id(keypair.public),
        content_hash=content_hash,
        locator=locator,
        signature=signature,
    )


def verify_record(
    record: ResourceRecord,
    public_key: bytes,
    content: bytes | None = None,
    scheme: SignatureScheme = ED25519,
) -> bool:
    """Check a record against the publisher's public key.

    Verifies the publisher binding and the signature over the signed
    triple; when ``content`` is given, additionally requires the stored
    bytes to match ``content_hash``.
    """
    if publisher_id(public_key) != record.publisher:
        return False
    payload = _signing_payload(record.name, record.content_hash, record.locator)
    if not scheme.verify(public_key, record.signature, payload):
        return False
    if content is not None and content_digest(content) != record.content_hash:
        return False
    return True


def record_to_bytes(record: ResourceRecord) -> bytes:
    """Serialize a record to the documented TLV wire form."""
    return (
        _tlv(_T_NAME, record.name.raw.encode())
        + _tlv(_T_PUBLISHER, record.publisher)
        + _tlv(_T_HASH, record.content_hash)
        + _tlv(_T_LOCATOR, record.locator.raw.encode())
        + _tlv(_T_SIGNATURE, record.signature)
    )


def record_from_bytes(blob: bytes) -> ResourceRecord:
    """Inverse of :func:`record_to_bytes`; raises ValueError on bad framing."""
    fields: dict[int, bytes] = {}
    pos = 0
    while pos < len(blob):
        if pos + 5 > len(blob):
            raise ValueError("truncated TLV header")
        ftype = blob[pos]
        length = int.from_bytes(blob[pos + 1 : pos + 5], "big")
        pos += 5
        if pos + length > len(blob):
            raise ValueError("truncated TLV value")
        fields[ftype] = blob[pos : pos + length]
        pos += length
    try:
        return ResourceRecord(
            name=parse_identifier(fields[_T_NAME].decode()),
            publisher=fields[_T_PUBLISHER],
            content_hash=fields[_T_HASH],
            locator=parse_identifier(fields[_T_LOCATOR].decode()),
            signature=fields[_T_SIGNATURE],
        )
    except KeyError as exc:
        raise ValueError(f"missing TLV field {exc}") from exc

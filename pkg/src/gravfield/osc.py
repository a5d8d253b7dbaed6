"""Bit-exact OSC 1.0 message and bundle codec.

Supports type tags i, f, s, b over UDP-sized packets. Everything is
big-endian and 4-byte aligned per the OSC 1.0 layout rules; decoding
is strictly bounds-checked and reports the byte offset of any defect.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

MAX_BLOB = 65507        # single UDP datagram fit
MAX_BUNDLE_DEPTH = 8
IMMEDIATELY = 1         # OSC NTP timetag "now"

BUNDLE_HEADER = b"#bundle\x00"


class OscEncodeError(ValueError):
    pass


class OscDecodeError(ValueError):
    def __init__(self, offset: int, reason: str):
        super().__init__(f"offset {offset}: {reason}")
        self.offset = offset
        self.reason = reason


@dataclass(frozen=True)
class OscMessage:
    address: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class OscBundle:
    timetag: int = IMMEDIATELY
    elements: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))


def _valid_address(addr: str) -> bool:
    if not addr.startswith("/"):
        return False
    return all(0x21 <= ord(c) <= 0x7E and c != "#" for c in addr[1:])


def _pad4(b: bytes) -> bytes:
    return b + b"\x00" * (-len(b) % 4)


def _encode_string(s: str) -> bytes:
    try:
        raw = s.encode("ascii")
    except UnicodeEncodeError:
        raise OscEncodeError(f"non-ASCII string {s!r}") from None
    if b"\x00" in raw:
        raise OscEncodeError("string contains NUL")
    return _pad4(raw + b"\x00")


def encode_message(msg: OscMessage) -> bytes:
    if not _valid_address(msg.address):
        raise OscEncodeError(f"invalid OSC address {msg.address!r}")
    tags = ","
    payload = b""
    for arg in msg.args:
        if isinstance(arg, bool):
            raise OscEncodeError("bool is not an OSC value")
        if isinstance(arg, int):
            if not -2**31 <= arg < 2**31:
                raise OscEncodeError(f"int32 out of range: {arg}")
            tags += "i"
            payload += struct.pack(">i", arg)
        elif isinstance(arg, float):
            tags += "f"
            payload += struct.pack(">f", arg)
        elif isinstance(arg, str):
            tags += "s"
            payload += _encode_string(arg)
        elif isinstance(arg, (bytes, bytearray)):
            if len(arg) >= MAX_BLOB:
                raise OscEncodeError(f"blob of {len(arg)} bytes exceeds {MAX_BLOB}")
            tags += "b"
            payload += _pad4(struct.pack(">I", len(arg)) + bytes(arg))
        else:
            raise OscEncodeError(f"unsupported value kind {type(arg).__name__}")
    out = _encode_string(msg.address) + _encode_string(tags) + payload
    assert len(out) % 4 == 0
    return out


def encode_bundle(bundle: OscBundle, _depth: int = 1) -> bytes:
    if _depth > MAX_BUNDLE_DEPTH:
        raise OscEncodeError(f"bundle nesting exceeds {MAX_BUNDLE_DEPTH}")
    if not 0 <= bundle.timetag < 2**64:
        raise OscEncodeError(f"timetag {bundle.timetag} outside u64")
    out = BUNDLE_HEADER + struct.pack(">Q", bundle.timetag)
    for el in bundle.elements:
        if isinstance(el, OscBundle):
            raw = encode_bundle(el, _depth + 1)
        elif isinstance(el, OscMessage):
            raw = encode_message(el)
        else:
            raise OscEncodeError(f"bundle element {type(el).__name__} unsupported")
        out += struct.pack(">I", len(raw)) + raw
    return out


def encode_packet(value) -> bytes:
    if isinstance(value, OscBundle):
        return encode_bundle(value)
    return encode_message(value)


class _Reader:
    """Cursor over one packet; every read is bounds-checked."""

    def __init__(self, data: bytes, base: int = 0):
        self.data = data
        self.pos = 0
        self.base = base  # offset of this slice within the outermost packet

    def fail(self, reason: str):
        raise OscDecodeError(self.base + self.pos, reason)

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            self.fail(f"needed {n} bytes, {len(self.data) - self.pos} remain")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def take_string(self) -> str:
        start = self.pos
        end = self.data.find(b"\x00", start)
        if end < 0:
            self.fail("unterminated string")
        raw = self.data[start:end]
        advance = (end - start) + 1
        self.pos = start + advance + (-advance % 4)
        if self.pos > len(self.data):
            self.fail("string padding runs past buffer")
        try:
            return raw.decode("ascii")
        except UnicodeDecodeError:
            raise OscDecodeError(self.base + start, "non-ASCII string") from None


def _decode_message(r: _Reader) -> OscMessage:
    addr_at = r.base + r.pos
    address = r.take_string()
    if not _valid_address(address):
        raise OscDecodeError(addr_at, f"bad address {address!r}")
    tags_at = r.base + r.pos
    tags = r.take_string()
    if not tags.startswith(","):
        raise OscDecodeError(tags_at, f"type tags must start with ',', got {tags!r}")
    args = []
    for tag in tags[1:]:
        at = r.base + r.pos
        if tag == "i":
            args.append(struct.unpack(">i", r.take(4))[0])
        elif tag == "f":
            args.append(struct.unpack(">f", r.take(4))[0])
        elif tag == "s":
            args.append(r.take_string())
        elif tag == "b":
            size = struct.unpack(">I", r.take(4))[0]
            if size >= MAX_BLOB:
                raise OscDecodeError(at, f"blob size {size} exceeds {MAX_BLOB}")
            blob = r.take(size)
            r.take(-size % 4)
            args.append(blob)
        else:
            raise OscDecodeError(at, f"unknown type tag {tag!r}")
    return OscMessage(address, tuple(args))


def _decode_bundle(r: _Reader, depth: int) -> OscBundle:
    if depth > MAX_BUNDLE_DEPTH:
        r.fail(f"bundle nesting exceeds {MAX_BUNDLE_DEPTH}")
    r.take(len(BUNDLE_HEADER))
    timetag = struct.unpack(">Q", r.take(8))[0]
    elements = []
    while r.pos < len(r.data):
        size_at = r.base + r.pos
        size = struct.unpack(">I", r.take(4))[0]
        if size % 4 != 0:
            raise OscDecodeError(size_at, f"element size {size} not 4-aligned")
        raw = r.take(size)
        sub = _Reader(raw, base=size_at + 4)
        if raw.startswith(BUNDLE_HEADER):
            elements.append(_decode_bundle(sub, depth + 1))
        else:
            el = _decode_message(sub)
            if sub.pos != len(raw):
                raise OscDecodeError(sub.base + sub.pos, "trailing bytes in element")
            elements.append(el)
    return OscBundle(timetag, tuple(elements))


def decode_packet(data: bytes):
    """Decode one UDP payload into an OscMessage or OscBundle."""
    if len(data) == 0:
        raise OscDecodeError(0, "empty packet")
    if len(data) % 4 != 0:
        raise OscDecodeError(len(data) - len(data) % 4,
                             f"length {len(data)} not a multiple of 4")
    r = _Reader(bytes(data))
    if r.data.startswith(BUNDLE_HEADER):
        return _decode_bundle(r, 1)
    msg = _decode_message(r)
    if r.pos != len(r.data):
        raise OscDecodeError(r.pos, "trailing bytes after message")
    return msg


def iter_messages(packet):
    """Flatten a decoded packet to messages in encounter order."""
    if isinstance(packet, OscMessage):
        yield packet
        return
    for el in packet.elements:
        yield from iter_messages(el)

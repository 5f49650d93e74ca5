"""Byte-exact UDP/IPv4/ARP frame codec over fixed-width datapath words.

The model matches the network block of the node design: whole Ethernet
frames move through the core as a stream of words of the configured
width, one word per clock, with a byte-enable on the final word. The
preamble, start delimiter, frame check sequence and interpacket gap are
the MAC's business and never appear here; WIRE_OVERHEAD_BYTES carries
their cost (plus the L2 header) for line-rate arithmetic.

There is no buffering and no segmentation: a payload either fits one
frame under the standard 1500-byte MTU or is rejected. 802.1Q tags are
understood on receive and never generated. ARP is the standard 28-byte
request/reply pair with a 256-entry cache evicting the least recently
inserted mapping.

Checksums follow the usual ones'-complement rules; the IPv4 header sum
is verified over the raw header bytes before any field is trusted, and
a computed UDP checksum of zero is transmitted as 0xFFFF.
"""

from __future__ import annotations

import struct
from collections import OrderedDict
from dataclasses import dataclass
from ipaddress import IPv4Address

__all__ = [
    "ETHERTYPE_IPV4",
    "ETHERTYPE_ARP",
    "ETHERTYPE_VLAN",
    "IP_PROTO_UDP",
    "MAX_PAYLOAD_BYTES",
    "WIRE_OVERHEAD_BYTES",
    "ARP_CACHE_ENTRIES",
    "FrameError",
    "PayloadTooLargeError",
    "ChecksumError",
    "UnsupportedProtocolError",
    "TruncatedFrameError",
    "EthernetHeader",
    "Ipv4Header",
    "UdpHeader",
    "ArpMessage",
    "FrameHeaders",
    "DatapathConfig",
    "FrameWords",
    "ones_complement_sum",
    "internet_checksum",
    "frame_bytes",
    "encode_frame",
    "decode_frame",
    "udp_frame",
    "arp_request",
    "arp_reply",
    "ArpCache",
    "arp_resolve",
    "chunk_payload",
    "write_pcap",
    "LoopbackTransport",
]

ETHERTYPE_IPV4 = 0x0800
ETHERTYPE_ARP = 0x0806
ETHERTYPE_VLAN = 0x8100
IP_PROTO_UDP = 17

# 1500-byte MTU minus the 20-byte IPv4 and 8-byte UDP headers
MAX_PAYLOAD_BYTES = 1472

# preamble + start delimiter (8), L2 header (14), frame check (4) and
# minimum interpacket gap (12): what one frame costs on the wire beyond
# its IP datagram
WIRE_OVERHEAD_BYTES = 38

ARP_CACHE_ENTRIES = 256

_ETH = struct.Struct("!6s6sH")
_VLAN = struct.Struct("!HH")  # tag control word, real ethertype
_IPV4 = struct.Struct("!BBHHHBBH4s4s")
_UDP = struct.Struct("!HHHH")
_ARP = struct.Struct("!HHBBH6s4s6s4s")

BROADCAST_MAC = b"\xff\xff\xff\xff\xff\xff"
ZERO_MAC = b"\x00\x00\x00\x00\x00\x00"


class FrameError(ValueError):
    """Malformed frame content or an encoding request outside the model."""


class PayloadTooLargeError(FrameError):
    """Payload would need segmentation, which the datapath does not do."""


class ChecksumError(FrameError):
    """IPv4 or UDP checksum failed verification."""


class UnsupportedProtocolError(FrameError):
    """Frame is well-formed but not something this datapath handles."""


class TruncatedFrameError(FrameError):
    """Word stream ended before the declared frame did."""


def _as_mac(value) -> bytes:
    if isinstance(value, (bytes, bytearray)):
        raw = bytes(value)
    elif isinstance(value, str):
        parts = value.replace("-", ":").split(":")
        if len(parts) != 6:
            raise FrameError(f"bad MAC address {value!r}")
        raw = bytes(int(p, 16) for p in parts)
    else:
        raise FrameError(f"bad MAC address {value!r}")
    if len(raw) != 6:
        raise FrameError(f"MAC addresses are 6 bytes, got {len(raw)}")
    return raw


def _as_ip(value) -> IPv4Address:
    return value if isinstance(value, IPv4Address) else IPv4Address(value)


def _check_u16(name: str, value: int) -> None:
    if not isinstance(value, int) or not 0 <= value <= 0xFFFF:
        raise FrameError(f"{name} must be a 16-bit integer, got {value!r}")


def ones_complement_sum(data: bytes) -> int:
    """16-bit ones'-complement sum with end-around carries folded in."""
    if len(data) % 2:
        data = data + b"\x00"
    total = sum(struct.unpack(f"!{len(data) // 2}H", data))
    while total > 0xFFFF:
        total = (total & 0xFFFF) + (total >> 16)
    return total


def internet_checksum(data: bytes) -> int:
    return ~ones_complement_sum(data) & 0xFFFF


# ---------------------------------------------------------------------------
# header types


@dataclass(frozen=True)
class EthernetHeader:
    """L2 addresses and type. vlan_tag holds a received 802.1Q control
    word; frames are never sent tagged."""

    dst_mac: bytes
    src_mac: bytes
    ethertype: int = ETHERTYPE_IPV4
    vlan_tag: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "dst_mac", _as_mac(self.dst_mac))
        object.__setattr__(self, "src_mac", _as_mac(self.src_mac))
        _check_u16("ethertype", self.ethertype)
        if self.vlan_tag is not None:
            _check_u16("vlan_tag", self.vlan_tag)


@dataclass(frozen=True)
class Ipv4Header:
    """The fields a sender chooses. total_length and header_checksum are
    derived on encode; decode returns them filled in."""

    src_ip: IPv4Address
    dst_ip: IPv4Address
    dscp: int = 0
    identification: int = 0
    flags: int = 2  # don't-fragment; the datapath never fragments
    fragment_offset: int = 0
    ttl: int = 64
    total_length: int | None = None
    header_checksum: int | None = None

    version = 4
    header_words = 5  # no options, ever
    protocol = IP_PROTO_UDP

    def __post_init__(self) -> None:
        object.__setattr__(self, "src_ip", _as_ip(self.src_ip))
        object.__setattr__(self, "dst_ip", _as_ip(self.dst_ip))
        if not 0 <= self.dscp <= 63:
            raise FrameError(f"dscp must be in [0, 63], got {self.dscp}")
        _check_u16("identification", self.identification)
        if self.flags not in (0, 2):
            raise FrameError(
                f"only the don't-fragment flag is meaningful here, got flags={self.flags}"
            )
        if self.fragment_offset != 0:
            raise FrameError("fragments are not supported")
        if not 0 <= self.ttl <= 255:
            raise FrameError(f"ttl must be in [0, 255], got {self.ttl}")


@dataclass(frozen=True)
class UdpHeader:
    """Ports plus the derived length/checksum pair, as for Ipv4Header."""

    src_port: int
    dst_port: int
    length: int | None = None
    checksum: int | None = None

    def __post_init__(self) -> None:
        _check_u16("src_port", self.src_port)
        _check_u16("dst_port", self.dst_port)


@dataclass(frozen=True)
class ArpMessage:
    """One Ethernet/IPv4 ARP body; oper 1 asks, oper 2 answers."""

    oper: int
    sender_mac: bytes
    sender_ip: IPv4Address
    target_mac: bytes
    target_ip: IPv4Address

    def __post_init__(self) -> None:
        if self.oper not in (1, 2):
            raise FrameError(f"oper must be 1 (request) or 2 (reply), got {self.oper}")
        object.__setattr__(self, "sender_mac", _as_mac(self.sender_mac))
        object.__setattr__(self, "target_mac", _as_mac(self.target_mac))
        object.__setattr__(self, "sender_ip", _as_ip(self.sender_ip))
        object.__setattr__(self, "target_ip", _as_ip(self.target_ip))


@dataclass(frozen=True)
class FrameHeaders:
    """Everything above the payload: L2 always, then UDP/IPv4 or ARP."""

    eth: EthernetHeader
    ipv4: Ipv4Header | None = None
    udp: UdpHeader | None = None
    arp: ArpMessage | None = None

    def __post_init__(self) -> None:
        is_udp = self.ipv4 is not None and self.udp is not None
        is_arp = self.arp is not None
        if is_udp == is_arp or (self.ipv4 is None) != (self.udp is None):
            raise FrameError("headers must carry either ipv4+udp or arp")
        expected = ETHERTYPE_ARP if is_arp else ETHERTYPE_IPV4
        if self.eth.ethertype != expected:
            raise FrameError(
                f"ethertype 0x{self.eth.ethertype:04x} does not match the "
                f"payload kind (expected 0x{expected:04x})"
            )


def udp_frame(
    src_mac, dst_mac, src_ip, dst_ip, src_port: int, dst_port: int, **ipv4_fields
) -> FrameHeaders:
    """Sender-side header bundle with the derived fields left blank."""
    return FrameHeaders(
        eth=EthernetHeader(dst_mac=dst_mac, src_mac=src_mac),
        ipv4=Ipv4Header(src_ip=src_ip, dst_ip=dst_ip, **ipv4_fields),
        udp=UdpHeader(src_port=src_port, dst_port=dst_port),
    )


def arp_request(sender_mac, sender_ip, target_ip) -> FrameHeaders:
    """Broadcast who-has for target_ip."""
    return FrameHeaders(
        eth=EthernetHeader(
            dst_mac=BROADCAST_MAC, src_mac=sender_mac, ethertype=ETHERTYPE_ARP
        ),
        arp=ArpMessage(
            oper=1,
            sender_mac=sender_mac,
            sender_ip=sender_ip,
            target_mac=ZERO_MAC,
            target_ip=target_ip,
        ),
    )


def arp_reply(request: ArpMessage, own_mac, own_ip) -> FrameHeaders:
    """Unicast is-at answer to a request for own_ip."""
    own_ip = _as_ip(own_ip)
    if request.oper != 1:
        raise FrameError("can only reply to a request")
    if request.target_ip != own_ip:
        raise FrameError(
            f"request asks for {request.target_ip}, not {own_ip}"
        )
    return FrameHeaders(
        eth=EthernetHeader(
            dst_mac=request.sender_mac, src_mac=own_mac, ethertype=ETHERTYPE_ARP
        ),
        arp=ArpMessage(
            oper=2,
            sender_mac=own_mac,
            sender_ip=own_ip,
            target_mac=request.sender_mac,
            target_ip=request.sender_ip,
        ),
    )


# ---------------------------------------------------------------------------
# byte-level codec


def _udp_checksum(ipv4: Ipv4Header, udp_len: int, udp_wo_sum: bytes, payload: bytes) -> int:
    pseudo = struct.pack(
        "!4s4sBBH",
        ipv4.src_ip.packed,
        ipv4.dst_ip.packed,
        0,
        IP_PROTO_UDP,
        udp_len,
    )
    value = internet_checksum(pseudo + udp_wo_sum + payload)
    return value if value else 0xFFFF


def frame_bytes(headers: FrameHeaders, payload: bytes = b"") -> bytes:
    """The exact octets of one frame, L2 header through last payload byte."""
    if headers.eth.vlan_tag is not None:
        raise FrameError("802.1Q tags are understood on receive but never sent")
    eth = _ETH.pack(headers.eth.dst_mac, headers.eth.src_mac, headers.eth.ethertype)

    if headers.arp is not None:
        if payload:
            raise FrameError("ARP frames carry no payload")
        a = headers.arp
        return eth + _ARP.pack(
            1, ETHERTYPE_IPV4, 6, 4, a.oper,
            a.sender_mac, a.sender_ip.packed, a.target_mac, a.target_ip.packed,
        )

    if len(payload) > MAX_PAYLOAD_BYTES:
        raise PayloadTooLargeError(
            f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD_BYTES}; "
            f"the datapath does not segment"
        )
    ip, udp = headers.ipv4, headers.udp
    udp_len = 8 + len(payload)
    total_len = 20 + udp_len
    if ip.total_length is not None and ip.total_length != total_len:
        raise FrameError(
            f"total_length says {ip.total_length} but the frame is {total_len} bytes"
        )
    if udp.length is not None and udp.length != udp_len:
        raise FrameError(
            f"udp length says {udp.length} but header+payload is {udp_len} bytes"
        )

    head = _IPV4.pack(
        (4 << 4) | 5,
        ip.dscp << 2,
        total_len,
        ip.identification,
        (ip.flags << 13) | ip.fragment_offset,
        ip.ttl,
        IP_PROTO_UDP,
        0,
        ip.src_ip.packed,
        ip.dst_ip.packed,
    )
    ip_sum = internet_checksum(head)
    if ip.header_checksum is not None and ip.header_checksum != ip_sum:
        raise FrameError(
            f"header_checksum says 0x{ip.header_checksum:04x} but the "
            f"header sums to 0x{ip_sum:04x}"
        )
    head = head[:10] + struct.pack("!H", ip_sum) + head[12:]

    udp_wo_sum = struct.pack("!HHH", udp.src_port, udp.dst_port, udp_len)
    udp_sum = _udp_checksum(ip, udp_len, udp_wo_sum, payload)
    if udp.checksum is not None and udp.checksum != udp_sum:
        raise FrameError(
            f"udp checksum says 0x{udp.checksum:04x} but the datagram "
            f"sums to 0x{udp_sum:04x}"
        )
    return eth + head + udp_wo_sum + struct.pack("!H", udp_sum) + payload


def _parse_frame(raw: bytes) -> tuple[FrameHeaders, bytes]:
    if len(raw) < _ETH.size:
        raise TruncatedFrameError(f"{len(raw)} bytes is too short for an L2 header")
    dst, src, ethertype = _ETH.unpack_from(raw, 0)
    offset = _ETH.size
    vlan_tag = None
    if ethertype == ETHERTYPE_VLAN:
        if len(raw) < offset + _VLAN.size:
            raise TruncatedFrameError("frame ends inside the 802.1Q tag")
        vlan_tag, ethertype = _VLAN.unpack_from(raw, offset)
        offset += _VLAN.size

    if ethertype == ETHERTYPE_ARP:
        if len(raw) < offset + _ARP.size:
            raise TruncatedFrameError("frame ends inside the ARP body")
        if len(raw) > offset + _ARP.size:
            raise FrameError("trailing bytes after the ARP body")
        htype, ptype, hlen, plen, oper, sha, spa, tha, tpa = _ARP.unpack_from(
            raw, offset
        )
        if (htype, ptype, hlen, plen) != (1, ETHERTYPE_IPV4, 6, 4):
            raise UnsupportedProtocolError(
                "only Ethernet/IPv4 ARP is handled, got "
                f"htype={htype} ptype=0x{ptype:04x} hlen={hlen} plen={plen}"
            )
        eth = EthernetHeader(dst, src, ETHERTYPE_ARP, vlan_tag)
        arp = ArpMessage(oper, sha, IPv4Address(spa), tha, IPv4Address(tpa))
        return FrameHeaders(eth=eth, arp=arp), b""

    if ethertype != ETHERTYPE_IPV4:
        raise UnsupportedProtocolError(f"ethertype 0x{ethertype:04x} is not handled")
    if len(raw) < offset + 20:
        raise TruncatedFrameError("frame ends inside the IPv4 header")
    # checksum over the raw header, before trusting any field in it; this
    # makes any single corrupted bit surface as a checksum failure
    if ones_complement_sum(raw[offset : offset + 20]) != 0xFFFF:
        raise ChecksumError("IPv4 header checksum failed")
    ihl = raw[offset] & 0x0F
    if raw[offset] >> 4 != 4:
        raise FrameError(f"IP version {raw[offset] >> 4} is not 4")
    if ihl < 5:
        raise FrameError(f"IPv4 header length {ihl} words is invalid")
    if ihl > 5:
        raise UnsupportedProtocolError("IP options are not handled")
    (
        _ver_ihl,
        dscp_ecn,
        total_len,
        ident,
        flags_frag,
        ttl,
        proto,
        ip_sum,
        src_ip,
        dst_ip,
    ) = _IPV4.unpack_from(raw, offset)
    if proto != IP_PROTO_UDP:
        raise UnsupportedProtocolError(f"IP protocol {proto} is not handled")
    flags = flags_frag >> 13
    frag = flags_frag & 0x1FFF
    if flags & 1 or frag:
        raise UnsupportedProtocolError("fragments are not handled")
    if total_len < 28:
        raise FrameError(f"total_length {total_len} cannot hold the UDP header")
    if len(raw) < offset + total_len:
        raise TruncatedFrameError(
            f"IPv4 declares {total_len} bytes, frame carries {len(raw) - offset}"
        )
    if len(raw) > offset + total_len:
        raise FrameError("trailing bytes after the IP datagram")

    uoff = offset + 20
    sport, dport, udp_len, udp_sum = _UDP.unpack_from(raw, uoff)
    if udp_len != total_len - 20:
        raise FrameError(
            f"UDP length {udp_len} does not match the IP datagram ({total_len - 20})"
        )
    payload = raw[uoff + 8 : uoff + udp_len]
    ipv4 = Ipv4Header(
        src_ip=IPv4Address(src_ip),
        dst_ip=IPv4Address(dst_ip),
        dscp=dscp_ecn >> 2,
        identification=ident,
        flags=flags,
        fragment_offset=frag,
        ttl=ttl,
        total_length=total_len,
        header_checksum=ip_sum,
    )
    if udp_sum:
        expect = _udp_checksum(ipv4, udp_len, raw[uoff : uoff + 6], payload)
        if udp_sum != expect:
            raise ChecksumError("UDP checksum failed")
    eth = EthernetHeader(dst, src, ETHERTYPE_IPV4, vlan_tag)
    udp = UdpHeader(sport, dport, length=udp_len, checksum=udp_sum)
    return FrameHeaders(eth=eth, ipv4=ipv4, udp=udp), payload


# ---------------------------------------------------------------------------
# datapath words


_DATAPATH_TABLE = {
    # rate -> (allowed word widths in bits, clock MHz, line rate bit/s)
    "1G": ((8,), 125.0, 1.0e9),
    "10G": ((64,), 156.25, 1.0e10),
    "40G": ((128, 256), 322.22, 4.0e10),
    "100G": ((512,), 322.22, 1.0e11),
}


@dataclass(frozen=True)
class DatapathConfig:
    """One row of the core's interface table: rate, word width, clock."""

    rate: str
    width_bits: int

    def __post_init__(self) -> None:
        if self.rate not in _DATAPATH_TABLE:
            raise FrameError(
                f"rate must be one of {tuple(_DATAPATH_TABLE)}, got {self.rate!r}"
            )
        widths = _DATAPATH_TABLE[self.rate][0]
        if self.width_bits not in widths:
            raise FrameError(
                f"a {self.rate} datapath is {' or '.join(map(str, widths))} bits "
                f"wide, not {self.width_bits}"
            )

    @classmethod
    def for_rate(cls, rate: str, width_bits: int | None = None) -> "DatapathConfig":
        if rate not in _DATAPATH_TABLE:
            raise FrameError(
                f"rate must be one of {tuple(_DATAPATH_TABLE)}, got {rate!r}"
            )
        widths = _DATAPATH_TABLE[rate][0]
        return cls(rate, widths[0] if width_bits is None else width_bits)

    @classmethod
    def all_rows(cls) -> tuple["DatapathConfig", ...]:
        return tuple(
            cls(rate, width)
            for rate, (widths, _, _) in _DATAPATH_TABLE.items()
            for width in widths
        )

    @property
    def word_bytes(self) -> int:
        return self.width_bits // 8

    @property
    def clock_hz(self) -> float:
        return _DATAPATH_TABLE[self.rate][1] * 1.0e6

    @property
    def line_rate_bps(self) -> float:
        return _DATAPATH_TABLE[self.rate][2]

    def transmit_cycles(self, nbytes: int) -> int:
        return -(-nbytes // self.word_bytes)


@dataclass(frozen=True)
class FrameWords:
    """One frame as the datapath sees it: full words, last one padded.

    last_word_bytes is the byte-enable of the final word; words before it
    are always full. One word leaves per clock, so cycles == len(words).
    """

    words: tuple[bytes, ...]
    last_word_bytes: int
    word_bytes: int

    def __post_init__(self) -> None:
        if not self.words:
            raise FrameError("a frame is at least one word")
        if any(len(w) != self.word_bytes for w in self.words):
            raise FrameError("every stored word must be full-width (last one padded)")
        if not 1 <= self.last_word_bytes <= self.word_bytes:
            raise FrameError(
                f"last_word_bytes must be in [1, {self.word_bytes}], "
                f"got {self.last_word_bytes}"
            )

    @property
    def cycles(self) -> int:
        return len(self.words)

    @property
    def frame_length(self) -> int:
        return (len(self.words) - 1) * self.word_bytes + self.last_word_bytes

    def to_bytes(self) -> bytes:
        if not self.words:
            return b""
        return b"".join(self.words[:-1]) + self.words[-1][: self.last_word_bytes]


def encode_frame(headers: FrameHeaders, payload: bytes, dp: DatapathConfig) -> FrameWords:
    """Serialize one frame into datapath words.

    Word count always equals ceil(frame bytes / word bytes); the final
    word is zero-padded with its byte-enable recorded.
    """
    raw = frame_bytes(headers, payload)
    wb = dp.word_bytes
    words = [raw[i : i + wb] for i in range(0, len(raw), wb)]
    last = len(words[-1])
    words[-1] = words[-1].ljust(wb, b"\x00")
    return FrameWords(words=tuple(words), last_word_bytes=last, word_bytes=wb)


def decode_frame(words, dp: DatapathConfig) -> tuple[FrameHeaders, bytes]:
    """Parse a word stream back into headers and payload.

    Accepts the FrameWords produced by encode_frame or any iterable of
    word-sized byte chunks (the last may be short).
    """
    if isinstance(words, FrameWords):
        if words.word_bytes != dp.word_bytes:
            raise FrameError(
                f"frame was cut into {words.word_bytes}-byte words but the "
                f"datapath reads {dp.word_bytes}-byte ones"
            )
        raw = words.to_bytes()
    else:
        chunks = [bytes(w) for w in words]
        if any(len(c) != dp.word_bytes for c in chunks[:-1]):
            raise FrameError("every word before the last must be full-width")
        raw = b"".join(chunks)
    return _parse_frame(raw)


# ---------------------------------------------------------------------------
# ARP cache


class ArpCache:
    """IP-to-MAC mappings, capacity 256, least-recently-inserted eviction.

    Re-inserting an address refreshes its position, so steady chatter
    about a mapping keeps it alive; a full cache drops the mapping whose
    last insertion is oldest.
    """

    def __init__(self, own_mac, own_ip, capacity: int = ARP_CACHE_ENTRIES):
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        self.own_mac = _as_mac(own_mac)
        self.own_ip = _as_ip(own_ip)
        self.capacity = capacity
        self._entries: OrderedDict[IPv4Address, bytes] = OrderedDict()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, ip) -> bool:
        return _as_ip(ip) in self._entries

    def lookup(self, ip) -> bytes | None:
        return self._entries.get(_as_ip(ip))

    def insert(self, ip, mac) -> None:
        ip = _as_ip(ip)
        mac = _as_mac(mac)
        if ip in self._entries:
            del self._entries[ip]  # refresh the insertion position
        self._entries[ip] = mac
        while len(self._entries) > self.capacity:
            self._entries.popitem(last=False)

    def entries(self) -> list[tuple[IPv4Address, bytes]]:
        """Mappings in insertion order, eviction candidate first."""
        return list(self._entries.items())

    def resolve(self, ip) -> tuple[bytes | None, FrameHeaders | None]:
        """Hit: (mac, None). Miss: (None, who-has request ready to send)."""
        ip = _as_ip(ip)
        mac = self._entries.get(ip)
        if mac is not None:
            return mac, None
        return None, arp_request(self.own_mac, self.own_ip, ip)

    def observe(self, message: ArpMessage) -> FrameHeaders | None:
        """Learn from any ARP body; answer requests aimed at us."""
        self.insert(message.sender_ip, message.sender_mac)
        if message.oper == 1 and message.target_ip == self.own_ip:
            return arp_reply(message, self.own_mac, self.own_ip)
        return None


def arp_resolve(cache: ArpCache, ip) -> tuple[bytes | None, FrameHeaders | None]:
    """Function form of ArpCache.resolve."""
    return cache.resolve(ip)


# ---------------------------------------------------------------------------
# capture files


_PCAP_GLOBAL = struct.Struct("<IHHiIII")
_PCAP_RECORD = struct.Struct("<IIII")
_PCAP_MAGIC = 0xA1B2C3D4
_LINKTYPE_ETHERNET = 1


def write_pcap(path, frames, start_seconds: int = 0) -> int:
    """Write frames to a classic capture file, one per microsecond.

    Timestamps are deterministic (frame i lands at start_seconds plus i
    microseconds) so repeated runs produce identical files. Returns the
    number of records written.
    """
    frames = list(frames)
    header = _PCAP_GLOBAL.pack(_PCAP_MAGIC, 2, 4, 0, 0, 65535, _LINKTYPE_ETHERNET)
    with open(path, "wb") as fh:
        fh.write(header)
        for i, raw in enumerate(frames):
            sec, usec = divmod(i, 1_000_000)
            fh.write(_PCAP_RECORD.pack(start_seconds + sec, usec, len(raw), len(raw)))
            fh.write(raw)
    return len(frames)


def chunk_payload(data: bytes, limit: int = MAX_PAYLOAD_BYTES) -> list[bytes]:
    """Split one bulk message into frame-sized payloads, in order."""
    if limit < 1:
        raise ValueError(f"limit must be positive, got {limit}")
    if not data:
        return [b""]
    return [data[i : i + limit] for i in range(0, len(data), limit)]


class LoopbackTransport:
    """Message transport that folds every bulk transfer through the codec.

    Each (u, v) node gets a deterministic MAC and IP; a message becomes
    ceil(len(payload) / 1472) UDP frames which are encoded to datapath
    words, decoded back, and reassembled. Every frame that would hit the
    wire is kept (in order) for capture-file output. With resolve_arp
    on, the first transfer between two nodes also performs the
    request/reply exchange and those frames are kept too.
    """

    def __init__(self, dp: DatapathConfig | None = None, resolve_arp: bool = False):
        self.dp = dp if dp is not None else DatapathConfig.for_rate("100G")
        self.resolve_arp = resolve_arp
        self.frames: list[bytes] = []
        self.data_frame_count = 0
        self._caches: dict[tuple[int, int], ArpCache] = {}
        self._port_base = 49152

    @staticmethod
    def node_mac(node: tuple[int, int]) -> bytes:
        u, v = node
        return bytes([0x02, 0x00, 0x00, 0x00, u & 0xFF, v & 0xFF])

    @staticmethod
    def node_ip(node: tuple[int, int]) -> IPv4Address:
        u, v = node
        return IPv4Address(f"10.{u & 0xFF}.{v & 0xFF}.1")

    def _cache(self, node: tuple[int, int]) -> ArpCache:
        if node not in self._caches:
            self._caches[node] = ArpCache(self.node_mac(node), self.node_ip(node))
        return self._caches[node]

    def _resolve(self, src: tuple[int, int], dst: tuple[int, int]) -> bytes:
        if not self.resolve_arp:
            return self.node_mac(dst)
        cache = self._cache(src)
        mac, request = cache.resolve(self.node_ip(dst))
        if mac is not None:
            return mac
        self.frames.append(frame_bytes(request))
        reply = self._cache(dst).observe(request.arp)
        if reply is None:
            raise FrameError(f"node {dst} did not answer a request for its own IP")
        self.frames.append(frame_bytes(reply))
        cache.observe(reply.arp)
        mac = cache.lookup(self.node_ip(dst))
        assert mac is not None
        return mac

    def deliver(self, phase: str, src, dst, payload: bytes) -> bytes:
        src = tuple(src)
        dst = tuple(dst)
        dst_mac = self._resolve(src, dst)
        port = self._port_base + (0 if phase == "xy" else 1)
        received: list[bytes] = []
        for chunk in chunk_payload(payload):
            headers = udp_frame(
                src_mac=self.node_mac(src),
                dst_mac=dst_mac,
                src_ip=self.node_ip(src),
                dst_ip=self.node_ip(dst),
                src_port=port,
                dst_port=port,
            )
            words = encode_frame(headers, chunk, self.dp)
            self.frames.append(words.to_bytes())
            self.data_frame_count += 1
            got_headers, got_payload = decode_frame(words, self.dp)
            if got_headers.udp is None or got_headers.ipv4.dst_ip != self.node_ip(dst):
                raise FrameError("frame came back addressed to the wrong node")
            received.append(got_payload)
        return b"".join(received)

    def write_pcap(self, path) -> int:
        return write_pcap(path, self.frames)

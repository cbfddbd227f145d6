import json
import logging
import socket
import struct

import pydantic
from pydantic import TypeAdapter

from neuroedge.domain.errors import LinkClosed, MalformedMessage
from neuroedge.models.link import LinkMessage
from neuroedge.service.link.config import LENGTH_PREFIX_BYTES, MAX_FRAME_BYTES


logger = logging.getLogger(__name__)

_PREFIX = struct.Struct(">I")
_adapter = TypeAdapter(LinkMessage)


def encode_message(msg) -> bytes:
    """Canonical compact JSON: {"kind", "step", "data"} with shortest round-trip floats."""
    payload = {"kind": msg.kind, "step": msg.step, "data": [float(v) for v in msg.data]}
    return json.dumps(payload, separators=(",", ":"), allow_nan=False).encode("utf-8")


def decode_message(payload: bytes):
    try:
        raw = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise MalformedMessage(f"not a JSON message: {e}") from e
    return parse_message(raw)


def parse_message(raw):
    if not isinstance(raw, dict) or set(raw) != {"kind", "step", "data"}:
        raise MalformedMessage("message must be an object with exactly kind, step and data")
    try:
        return _adapter.validate_python(raw)
    except pydantic.ValidationError as e:
        raise MalformedMessage(f"invalid message: {e.errors()[0]['msg']}") from e


def frame(payload: bytes) -> bytes:
    if len(payload) > MAX_FRAME_BYTES:
        raise MalformedMessage(f"frame of {len(payload)} bytes exceeds {MAX_FRAME_BYTES}")
    return _PREFIX.pack(len(payload)) + payload


def decode_frame(buffer: bytes):
    if len(buffer) < LENGTH_PREFIX_BYTES:
        raise MalformedMessage("truncated length prefix")
    (length,) = _PREFIX.unpack_from(buffer)
    if length > MAX_FRAME_BYTES:
        raise MalformedMessage(f"frame of {length} bytes exceeds {MAX_FRAME_BYTES}")
    body = buffer[LENGTH_PREFIX_BYTES:]
    if len(body) != length:
        raise MalformedMessage(f"frame announces {length} bytes, got {len(body)}")
    return decode_message(body)


def _recv_exactly(sock: socket.socket, length: int) -> bytes:
    chunks = []
    remaining = length
    while remaining:
        chunk = sock.recv(remaining)
        if not chunk:
            break
        chunks.append(chunk)
        remaining -= len(chunk)
    return b"".join(chunks)


def read_frame(sock: socket.socket) -> bytes:
    """Block until one whole frame arrives; returns it prefix included.

    Raises:
        LinkClosed: the peer closed the stream between frames.
        MalformedMessage: the stream ended inside a frame.
    """
    prefix = _recv_exactly(sock, LENGTH_PREFIX_BYTES)
    if not prefix:
        raise LinkClosed("peer closed the connection")
    if len(prefix) < LENGTH_PREFIX_BYTES:
        raise MalformedMessage("truncated length prefix")
    (length,) = _PREFIX.unpack(prefix)
    if length > MAX_FRAME_BYTES:
        raise MalformedMessage(f"frame of {length} bytes exceeds {MAX_FRAME_BYTES}")
    body = _recv_exactly(sock, length)
    if len(body) < length:
        raise MalformedMessage("connection closed inside a frame")
    return prefix + body


def write_frame(sock: socket.socket, msg) -> int:
    data = frame(encode_message(msg))
    sock.sendall(data)
    return len(data)

import logging
import socket
import threading
from collections import deque
from contextlib import contextmanager
from typing import Protocol
from urllib.parse import urlparse

import requests

from neuroedge.domain.errors import (
    InsideObstacle,
    LinkClosed,
    MalformedMessage,
    NeuroEdgeError,
    ValidationError,
)
from neuroedge.service.cloud.endpoint import CloudEndpoint
from neuroedge.service.link.codec import (
    decode_frame,
    decode_message,
    encode_message,
    parse_message,
    read_frame,
    write_frame,
)
from neuroedge.service.link.config import LINK_TIMEOUT


logger = logging.getLogger(__name__)


class Transport(Protocol):

    def send(self, msg) -> None: ...

    def receive(self): ...

    def reference(self, steps: int) -> list[list[float]]: ...

    def close(self) -> None: ...


class InProcTransport:
    """Same-process link; every message still goes through the wire encoding."""

    def __init__(self, endpoint: CloudEndpoint) -> None:
        self.endpoint = endpoint
        self._replies: deque[bytes] = deque()

    def send(self, msg) -> None:
        reply = self.endpoint.handle(decode_message(encode_message(msg)))
        if reply is not None:
            self._replies.append(encode_message(reply))

    def receive(self):
        if not self._replies:
            raise LinkClosed("no reply pending on the in-process link")
        return decode_message(self._replies.popleft())

    def reference(self, steps: int) -> list[list[float]]:
        return self.endpoint.trajectory(steps)

    def close(self) -> None:
        self._replies.clear()


class CloudServer:
    """Serves one CloudEndpoint to a single edge over a length-prefixed TCP stream."""

    def __init__(self, endpoint: CloudEndpoint, host: str = "127.0.0.1", port: int = 0) -> None:
        self.endpoint = endpoint
        self._listener = socket.create_server((host, port))
        self._listener.settimeout(LINK_TIMEOUT)
        self.address = self._listener.getsockname()[:2]
        self.error: NeuroEdgeError | None = None
        self._thread = threading.Thread(target=self._serve, name="neuroedge-cloud", daemon=True)

    def start(self) -> "CloudServer":
        self._thread.start()
        logger.info(f"cloud listening on tcp://{self.address[0]}:{self.address[1]}")
        return self

    def _serve(self) -> None:
        try:
            conn, peer = self._listener.accept()
        except OSError as e:
            logger.error(f"cloud server accept failed: {e}")
            return
        logger.debug(f"edge connected from {peer}")
        with conn:
            while True:
                try:
                    msg = decode_frame(read_frame(conn))
                    reply = self.endpoint.handle(msg)
                except LinkClosed:
                    break
                except NeuroEdgeError as e:
                    logger.error(f"cloud server stopped: {e}")
                    self.error = e
                    break
                except OSError as e:
                    logger.error(f"cloud server socket error: {e}")
                    break
                if reply is not None:
                    write_frame(conn, reply)

    def stop(self) -> None:
        self._listener.close()
        self._thread.join(timeout=LINK_TIMEOUT)


class SocketTransport:
    """Edge side of the loopback TCP link."""

    def __init__(self, server: CloudServer) -> None:
        self.server = server
        self._sock = socket.create_connection(server.address, timeout=LINK_TIMEOUT)

    def send(self, msg) -> None:
        try:
            write_frame(self._sock, msg)
        except OSError as e:
            raise LinkClosed(f"send failed: {e}") from e

    def receive(self):
        try:
            return decode_frame(read_frame(self._sock))
        except (LinkClosed, OSError) as e:
            if self.server.error is not None:
                raise self.server.error from e
            raise LinkClosed(f"receive failed: {e}") from e

    def reference(self, steps: int) -> list[list[float]]:
        return self.server.endpoint.trajectory(steps)

    def close(self) -> None:
        self._sock.close()
        self.server.stop()


class HttpTransport:
    """Posts each message to the cloud service; replies come back in the response body.

    `session` is anything with requests' post/get interface.
    """

    def __init__(self, base_url: str, session=None) -> None:
        self.base_url = base_url.rstrip("/")
        self.session = session if session is not None else requests.Session()
        self._replies: deque = deque()

    def send(self, msg) -> None:
        response = self.session.post(f"{self.base_url}/api/link/frames", json=msg.model_dump())
        body = self._checked(response)
        if body is not None:
            self._replies.append(parse_message(body))

    def receive(self):
        if not self._replies:
            raise LinkClosed("no reply pending on the HTTP link")
        return self._replies.popleft()

    def reference(self, steps: int) -> list[list[float]]:
        response = self.session.get(f"{self.base_url}/api/link/reference", params={"steps": steps})
        return self._checked(response)["states"]

    def close(self) -> None:
        close = getattr(self.session, "close", None)
        if isinstance(self.session, requests.Session) and close is not None:
            close()

    @staticmethod
    def _checked(response):
        if response.status_code in (400, 422):
            raise MalformedMessage(response.json().get("detail", "rejected by cloud"))
        if response.status_code == 409:
            detail = response.json().get("detail", {})
            raise InsideObstacle(detail.get("distance", 0.0), detail.get("t", 0.0))
        if response.status_code != 200:
            raise LinkClosed(f"cloud answered HTTP {response.status_code}")
        return response.json()


@contextmanager
def open_link(address: str, endpoint: CloudEndpoint | None = None):
    """Yield a Transport for `inproc`, `tcp://HOST:PORT` or `http://HOST:PORT`."""
    if address == "inproc":
        transport = InProcTransport(endpoint)
    elif address.startswith("tcp://"):
        parsed = urlparse(address)
        if parsed.hostname is None or parsed.port is None:
            raise ValidationError([f"link address '{address}' must be tcp://HOST:PORT"])
        server = CloudServer(endpoint, parsed.hostname, parsed.port).start()
        transport = SocketTransport(server)
    elif address.startswith(("http://", "https://")):
        transport = HttpTransport(address)
    else:
        raise ValidationError([f"unknown link address '{address}'"])

    try:
        yield transport
    finally:
        transport.close()
        logger.debug(f"link {address} closed")

"""Client-side transports: in-memory and TCP, sharing one byte-level code path."""

from __future__ import annotations

import socket
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

from ..pir.scheme import AnswerSet, Combination
from ..protocol import ConfigMismatch
from .server import DatabaseServer
from .wire import (
    MAX_FRAME,
    Hello,
    Query,
    Status,
    WireError,
    decode_response,
    encode_request,
    frame,
    read_frame,
)


class TransportError(RuntimeError):
    pass


class FramedTransport:
    """Encodes requests, sends one per database concurrently, decodes answers.

    ``transcript[n - 1]`` lists the ``(request, response)`` payload pairs
    exchanged with database ``n`` in order.
    """

    def __init__(self, N: int):
        self.N = N
        self.transcript: list[list[tuple[bytes, bytes]]] = [[] for _ in range(N)]

    def _exchange(self, n: int, payload: bytes) -> bytes:
        raise NotImplementedError

    def _round(self, payloads: Sequence[bytes]) -> list[bytes]:
        with ThreadPoolExecutor(max_workers=self.N) as pool:
            responses = list(pool.map(self._exchange, range(1, self.N + 1), payloads))
        for n, (req, resp) in enumerate(zip(payloads, responses)):
            self.transcript[n].append((req, resp))
        return responses

    def hello(self, digest: bytes) -> None:
        payload = encode_request(Hello(digest))
        for n, raw in enumerate(self._round([payload] * self.N), start=1):
            resp = decode_response(raw)
            if resp.status == Status.DIGEST_MISMATCH:
                raise ConfigMismatch(f"database {n} runs a different configuration")
            if not resp.ok:
                raise TransportError(f"database {n} rejected HELLO: {resp.status.name}")

    def query(self, per_db_queries: Sequence[Sequence[Combination]]) -> AnswerSet:
        if len(per_db_queries) != self.N:
            raise ValueError(f"need queries for {self.N} databases")
        payloads = [encode_request(Query(tuple(q))) for q in per_db_queries]
        answers = []
        for n, (raw, q) in enumerate(zip(self._round(payloads), per_db_queries), start=1):
            resp = decode_response(raw)
            if not resp.ok:
                raise TransportError(f"database {n} failed QUERY: {resp.status.name}")
            if resp.bits is None or len(resp.bits) != len(q):
                raise TransportError(f"database {n} answered {resp.bits and len(resp.bits)} bits for {len(q)} queries")
            answers.append(resp.bits)
        return AnswerSet(tuple(answers))

    def flat_transcript(self) -> bytes:
        """All frames, database by database, as one byte string for comparisons."""
        return b"".join(frame(req) + frame(resp) for per_db in self.transcript for req, resp in per_db)


class InMemoryTransport(FramedTransport):
    def __init__(self, servers: Sequence[DatabaseServer]):
        super().__init__(len(servers))
        self.servers = list(servers)

    def _exchange(self, n: int, payload: bytes) -> bytes:
        return self.servers[n - 1].handle(payload)


def in_memory_transport(servers: Sequence[DatabaseServer]) -> InMemoryTransport:
    return InMemoryTransport(servers)


def parse_endpoint(text: str) -> tuple[str, int]:
    host, _, port = text.strip().rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"endpoint {text!r} is not host:port")
    return host, int(port)


class TcpTransport(FramedTransport):
    """One persistent connection per database.

    Transport failures are retried by reconnecting and resending the very
    same payload, so a retry never changes what a database sees.
    """

    def __init__(self, endpoints: Sequence[tuple[str, int]], timeout: float = 5.0, retries: int = 2,
                 max_frame: int = MAX_FRAME):
        super().__init__(len(endpoints))
        self.endpoints = list(endpoints)
        self.timeout = timeout
        self.retries = retries
        self.max_frame = max_frame
        self._socks: list = [None] * self.N

    def _connect(self, n: int):
        sock = socket.create_connection(self.endpoints[n - 1], timeout=self.timeout)
        self._socks[n - 1] = (sock, sock.makefile("rb"))
        return self._socks[n - 1]

    def _drop(self, n: int) -> None:
        conn = self._socks[n - 1]
        self._socks[n - 1] = None
        if conn:
            for c in reversed(conn):
                try:
                    c.close()
                except OSError:
                    pass

    def _exchange(self, n: int, payload: bytes) -> bytes:
        data = frame(payload, self.max_frame)
        last: Exception = TransportError("no attempt made")
        for _ in range(self.retries + 1):
            try:
                sock, rfile = self._socks[n - 1] or self._connect(n)
                sock.sendall(data)
                resp = read_frame(rfile, self.max_frame)
                if resp is None:
                    raise ConnectionError("server closed the connection")
                return resp
            except WireError:
                self._drop(n)
                raise
            except OSError as exc:
                last = exc
                self._drop(n)
        raise TransportError(f"database {n} at {self.endpoints[n - 1]}: {last}") from last

    def close(self) -> None:
        for n in range(1, self.N + 1):
            self._drop(n)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

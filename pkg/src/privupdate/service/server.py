"""A single replicated database.

Each server knows only its own copy of the library and the public
configuration; there is no notion of peer databases anywhere in it.
"""

from __future__ import annotations

import logging
import socketserver
import threading
from typing import Optional

from ..codes import LinearCode
from ..pir.scheme import answer
from ..protocol import MessageLibrary, SystemConfig, config_code, config_digest, db_prepare
from .wire import (
    MAX_FRAME,
    Hello,
    Response,
    Status,
    WireError,
    decode_request,
    encode_response,
    frame,
    read_frame,
)

log = logging.getLogger(__name__)


class DatabaseServer:
    """Answers HELLO and QUERY payloads over the prepared (syndrome) library."""

    def __init__(self, config: SystemConfig, library: MessageLibrary, code: Optional[LinearCode] = None):
        self.config = config
        self.code = code or config_code(config)
        self.prepared = tuple(db_prepare(config, library, self.code))
        self.digest = config_digest(config, self.code)

    @property
    def ell(self) -> int:
        return self.code.r

    def handle(self, payload: bytes) -> bytes:
        try:
            req = decode_request(payload)
        except WireError as exc:
            return encode_response(Response(exc.status))
        if isinstance(req, Hello):
            ok = req.digest == self.digest
            return encode_response(Response(Status.OK if ok else Status.DIGEST_MISMATCH))
        for combo in req.combinations:
            for m, s, _ in combo.terms:
                if not (1 <= m <= self.config.K and 1 <= s <= self.ell):
                    return encode_response(Response(Status.OUT_OF_RANGE))
        return encode_response(Response(Status.OK, answer(req.combinations, self.prepared)))


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        db: DatabaseServer = self.server.database
        max_frame: int = self.server.max_frame
        while True:
            try:
                payload = read_frame(self.rfile, max_frame)
            except WireError as exc:
                self.wfile.write(frame(encode_response(Response(exc.status))))
                log.warning("dropping %s: %s", self.client_address, exc)
                return
            except (ConnectionError, OSError) as exc:
                log.info("connection %s lost: %s", self.client_address, exc)
                return
            if payload is None:
                return
            self.wfile.write(frame(db.handle(payload), max_frame))
            self.wfile.flush()


class DatabaseTCPServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int], database: DatabaseServer, max_frame: int = MAX_FRAME):
        self.database = database
        self.max_frame = max_frame
        super().__init__(address, _Handler)

    @property
    def address(self) -> tuple[str, int]:
        host, port = self.server_address[:2]
        return host, port


def serve(
    database: DatabaseServer, host: str = "127.0.0.1", port: int = 0, background: bool = False
) -> DatabaseTCPServer:
    """Bind and serve. ``port=0`` picks a free port; see ``.address``."""
    srv = DatabaseTCPServer((host, port), database)
    if background:
        threading.Thread(target=srv.serve_forever, daemon=True).start()
    else:
        srv.serve_forever()
    return srv

"""Wire protocol, database server, client transports and the CLI."""

from .server import DatabaseServer, DatabaseTCPServer, serve
from .simulate import SimulationSummary, simulate
from .transport import FramedTransport, InMemoryTransport, TcpTransport, TransportError, in_memory_transport
from .wire import MAX_FRAME, Hello, Opcode, Query, Response, Status, WireError

__all__ = [
    "DatabaseServer",
    "DatabaseTCPServer",
    "FramedTransport",
    "Hello",
    "InMemoryTransport",
    "MAX_FRAME",
    "Opcode",
    "Query",
    "Response",
    "SimulationSummary",
    "Status",
    "TcpTransport",
    "TransportError",
    "WireError",
    "in_memory_transport",
    "serve",
    "simulate",
]

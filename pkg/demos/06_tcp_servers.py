"""Two database servers on localhost and one client talking to them over TCP.

The byte transcript matches the in-memory run for the same seed.
"""

from privupdate.gf2 import BitWord
from privupdate.protocol import MessageLibrary, SystemConfig, UpdateInstance, client_update
from privupdate.service.server import DatabaseServer, serve
from privupdate.service.transport import InMemoryTransport, TcpTransport

config = SystemConfig(2, 2, 5, 1, seed=11)
library = MessageLibrary((BitWord.from_str("11010"), BitWord.from_str("00111")))
servers = [serve(DatabaseServer(config, library), port=0, background=True) for _ in range(2)]
print("listening on", ", ".join(f"{h}:{p}" for h, p in (s.address for s in servers)))

stale = library[1].flip(3)
with TcpTransport([s.address for s in servers]) as tcp:
    report = client_update(config, UpdateInstance(1, stale, 1), tcp)
print(f"updated {stale} -> {report.updated} with {report.bits_downloaded} bits")

memory = InMemoryTransport([DatabaseServer(config, library) for _ in range(2)])
client_update(config, UpdateInstance(1, stale, 1), memory)
print(f"transcript {len(tcp.flat_transcript())} bytes, identical to in-memory: "
      f"{tcp.flat_transcript() == memory.flat_transcript()}")

for s in servers:
    s.shutdown()
    s.server_close()

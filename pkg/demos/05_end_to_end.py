"""Full private update against in-memory databases, in every mode."""

import numpy as np

from privupdate.protocol import SystemConfig, UpdateInstance, client_update, random_flips, random_library, savings
from privupdate.service.server import DatabaseServer
from privupdate.service.transport import InMemoryTransport

rng = np.random.default_rng(2)
library = random_library(2, 8, rng)
theta = 2

for mode, flips in (("bounded_f", 1), ("exact_one_flip", 1), ("naive", 1)):
    config = SystemConfig(2, 2, 8, 1, mode=mode, seed=5)
    stale = library[theta] ^ random_flips(8, flips, rng, exact=True)
    transport = InMemoryTransport([DatabaseServer(config, library) for _ in range(config.N)])
    report = client_update(config, UpdateInstance(theta, stale, 1), transport)
    print(f"{mode:<15} {report.bits_downloaded} bits, flips {sorted(report.flip_set)}, "
          f"correct={report.updated == library[theta]}")

s = savings(SystemConfig(2, 10, 32, 1))
print(f"\nten 32-bit messages, one flip: {s.upper} bits instead of {s.naive} ({s.saved} saved)")

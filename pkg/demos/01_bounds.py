"""How many bits does a private update cost?

Prints the lower bound, the achievable cost and the naive cost for a few
settings, then the full curve over f for two databases and ten messages.
"""

import sys

from privupdate.pir.bounds import bounds
from privupdate.service.cli import write_curve

print("N K  L  f | ball      lower upper naive")
for N, K, L, f in [(2, 2, 3, 1), (2, 2, 5, 1), (2, 2, 8, 1), (3, 3, 16, 2), (2, 10, 32, 1)]:
    b = bounds(N, K, L, f)
    tight = "  (tight: ball is a power of two)" if b.perfect else ""
    print(f"{N} {K:<2} {L:<2} {f} | {b.ball:<9} {b.lower:<5} {b.upper:<5} {b.naive}{tight}")

print("\nWith f flips allowed, a 32-bit message among 10 costs:")
write_curve(2, 10, 32, range(0, 33), sys.stdout)
# from f = 16 on the ball covers every word, so nothing beats downloading it all

"""Fix an outdated word from its syndrome alone.

The databases hold H w for every message. Knowing the syndrome of the
current word and a stale copy that differs in at most f places is enough
to find the flips: they form the lightest word in the matching coset.
"""

import numpy as np

from privupdate.codes import CodeSpec, code_for, repetition_code
from privupdate.gf2 import BitWord
from privupdate.protocol import random_flips
from privupdate.syndrome import syndrome_of, update_decode

code = repetition_code(3)
current = BitWord.from_str("101")
stale = BitWord.from_str("100")
s = syndrome_of(code, current)
print("H rows:", code.parity_check.to_lists())
print(f"current {current}, syndrome {s.bits}, stale copy {stale}")
result = update_decode(code, stale, s, 1)
print(f"decoded {result.updated}, flipped positions {sorted(result.flip_set)}")

# a longer message: 32 bits with up to 2 flips needs only 10 syndrome bits
rng = np.random.default_rng(7)
code = code_for(CodeSpec(32, 2))
current = BitWord(32, int(rng.integers(0, 2**32)))
stale = current ^ random_flips(32, 2, rng, exact=True)
result = update_decode(code, stale, syndrome_of(code, current), 2)
print(f"\n{code.name}: {code.r} syndrome bits instead of 32")
print(f"stale   {stale}\ncurrent {current}\nfound flips at {sorted(result.flip_set)}, ok={result.updated == current}")

"""Audit privacy exactly.

Enumerate every permutation and coefficient draw, tally what each database
sees for each wanted message, and compare the distributions with exact
fractions. Zero distance means a database learns nothing.
"""

from privupdate.pir.audit import audit_privacy, leaky_extra_bit_plan, unpermuted_plan
from privupdate.pir.scheme import PirParams

for params in (PirParams(2, 2, 2), PirParams(2, 2, 3), PirParams(3, 2, 3)):
    report = audit_privacy(params)
    print(f"N={params.N} K={params.K} ell={params.ell}: TV per db {[str(d) for d in report.per_db_distance]}")

print("\nbroken variants, for contrast:")
for name, scheme in (("desired coefficient pinned to 1", leaky_extra_bit_plan), ("no permutation", unpermuted_plan)):
    report = audit_privacy(PirParams(2, 2, 3 if scheme is leaky_extra_bit_plan else 2), scheme)
    print(f"  {name}: TV per db {[str(d) for d in report.per_db_distance]}")

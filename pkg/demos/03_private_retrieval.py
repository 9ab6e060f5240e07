"""Retrieve one syndrome privately from two databases.

Each database gets a list of XOR combinations. Neither list says which
message the client wants, yet the answers together spell it out.
"""

from privupdate.gf2 import BitWord
from privupdate.pir.scheme import PirParams, answer_all, cost, plan_query, reconstruct

library = [BitWord.from_str("101"), BitWord.from_str("011")]
params = PirParams(N=2, K=2, ell=3)

for theta in (1, 2):
    plan = plan_query(params, theta, rng=4)
    print(f"want message {theta}:")
    for n, queries in enumerate(plan.per_db_queries, start=1):
        print(f"  db{n} asked {', '.join(str(q) for q in queries)}")
    answers = answer_all(plan, library)
    print(f"  answers {answers.per_db_answers}, {cost(plan)} bits, recovered {reconstruct(plan, answers)}")

# both requests share one shape; only the hidden permutation and coefficients differ

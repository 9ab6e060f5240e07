"""PIR over the syndrome messages: exact bounds, query plans, and audits."""

from .audit import AuditReport, InfeasibleExhaustive, VerifyReport, audit_joint, audit_privacy, verify_scheme
from .bounds import BoundsReport, ball, bounds, capacity, ceil_log2, lbar_ceil, pir_cost
from .scheme import (
    AnswerSet,
    Combination,
    PirParams,
    QueryPlan,
    Randomness,
    UnsupportedParameters,
    answer,
    answer_all,
    build_plan,
    cost,
    draw_randomness,
    expected_cost,
    plan_block,
    plan_extra_bit,
    plan_query,
    reconstruct,
)

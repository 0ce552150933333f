"""Token ledger audit of a solve trace against an optimal LP solution."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .contraction import FIND_TREE, GREEDY, HALF, SEMI_CLOSED, SolveResult
from .instance import TapInstance
from .leafcover import ExactLeafCover
from .lpbound import LpSolution, coupons_rhs


@dataclass
class StepAudit:
    index: int
    kind: str
    links: int
    tokens: Fraction
    tokens_alt: Fraction  # with (rho - 1/2)|U'_0| on top of |U'|
    sigma: Fraction
    slack: Fraction  # tokens - (|I'| + 1)
    surplus: Fraction  # tokens - (|M'| + |U'|)
    failures: list[str] = field(default_factory=list)


@dataclass
class AuditReport:
    steps: list[StepAudit]
    solution_size: int
    partial_size: int
    tau: Fraction
    rhs: Fraction
    rho: Fraction
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def audit_ledger(result: SolveResult, lp: LpSolution, cover: ExactLeafCover | None = None
                 ) -> AuditReport:
    inst: TapInstance = result.instance
    cover = cover or result.cover
    trace = result.trace
    rho = trace.rho
    degree = {v: lp.degree(inst, v) for v in range(inst.n)}
    failures: list[str] = []
    steps = []
    spent = Fraction(0)
    for i, rec in enumerate(trace.records):
        s = rec.summary
        sigma = sum((degree[v] for v in s.R_prime), Fraction(0))
        tokens = rec.tokens + HALF * sigma
        tokens_alt = tokens + len(s.U_prime_0)
        step = StepAudit(i, rec.kind, len(rec.links), tokens, tokens_alt, sigma,
                         tokens - len(rec.links) - 1,
                         tokens - len(s.M_prime) - len(s.U_prime))
        if step.slack < 0:
            step.failures.append(f"illegal contraction: tokens {tokens} < |I'|+1 = {len(rec.links) + 1}")
        if rec.kind in (SEMI_CLOSED, FIND_TREE):
            if step.surplus < 1:
                step.failures.append(f"deficient tree: tokens - (|M'|+|U'|) = {step.surplus} < 1")
            if len(rec.links) != len(s.M_prime) + len(s.U_prime):
                step.failures.append("cover size differs from |M'|+|U'|")
        elif rec.kind == GREEDY and len(rec.links) != 1:
            step.failures.append("greedy step with more than one link")
        failures += [f"step {i} ({rec.kind}): {f}" for f in step.failures]
        spent += tokens - 1
        steps.append(step)

    rhs = coupons_rhs(inst, lp, cover)
    if spent != rhs:
        failures.append(f"token conservation: consumed {spent} != w(F_L) + Sigma/2 = {rhs}")
    if len(result.partial) > rhs:
        failures.append(f"|I| = {len(result.partial)} exceeds {rhs}")
    if len(result.solution) > rhs:
        failures.append(f"|F| = {len(result.solution)} exceeds {rhs}")
    if rho * lp.tau < rhs:
        failures.append(f"rho*tau = {rho * lp.tau} < w(F_L) + Sigma/2 = {rhs}")
    if len(result.solution) > rho * lp.tau:
        failures.append(f"|F| = {len(result.solution)} exceeds rho*tau = {rho * lp.tau}")
    return AuditReport(steps, len(result.solution), len(result.partial), lp.tau, rhs, rho, failures)

"""Randomised sweep checking every guarantee on generated instances."""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .audit import audit_ledger
from .contraction import InvariantViolation, solve
from .generate import MODES, GenSpec, generate
from .instance import shadow_completion
from .leafcover import DEFAULT_RHO, LeafWeightConfig, min_weight_exact_cover
from .lpbound import build_cut_model, build_pi_model, coupons_rhs, solve_lp
from .oracle import exact_leaf_cover_opt, exact_opt

MAX_LEAVES = 8


@dataclass
class InstanceOutcome:
    seed: int
    n: int
    alg: int
    opt: int
    tau: Fraction
    cut: Fraction
    failures: list[dict] = field(default_factory=list)


@dataclass
class StressReport:
    instances: int = 0
    max_ratio_opt: Fraction = Fraction(0)
    max_ratio_tau: Fraction = Fraction(0)
    failures: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def merge(self, out: InstanceOutcome) -> None:
        self.instances += 1
        self.max_ratio_opt = max(self.max_ratio_opt, Fraction(out.alg, out.opt))
        self.max_ratio_tau = max(self.max_ratio_tau, out.alg / out.tau)
        self.failures.extend(out.failures)

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "max_ratio_opt": fraction_str(self.max_ratio_opt),
            "max_ratio_tau": fraction_str(self.max_ratio_tau),
            "failures": self.failures,
        }

    @classmethod
    def from_json(cls, data: dict) -> "StressReport":
        return cls(data["instances"], Fraction(data["max_ratio_opt"]),
                   Fraction(data["max_ratio_tau"]), list(data["failures"]))


def fraction_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def spec_for(seed: int, n_min: int, n_max: int) -> GenSpec:
    """Instance parameters drawn from the seed; reseeds until the leaf count fits."""
    rng = random.Random(seed)
    for attempt in range(1000):
        spec = GenSpec(rng.randint(n_min, n_max), Fraction(rng.choice((1, 2, 3, 4)), 8),
                       seed * 1000 + attempt, rng.choice(MODES))
        if len(generate(spec).tree.leaves()) <= MAX_LEAVES:
            return spec
    raise RuntimeError(f"no instance with at most {MAX_LEAVES} leaves for seed {seed}")


def check_instance(seed: int, spec: GenSpec, rho: Fraction = DEFAULT_RHO,
                   leaf_oracle: bool = True) -> InstanceOutcome:
    inst = generate(spec)
    closed = shadow_completion(inst)
    failures = []

    def fail(check: str, detail: str) -> None:
        failures.append({"seed": seed, "check": check, "detail": detail})

    try:
        result = solve(inst, rho)
    except InvariantViolation as exc:
        fail("solve", str(exc))
        return InstanceOutcome(seed, spec.n, 0, 1, Fraction(1), Fraction(0), failures)
    lp = solve_lp(build_pi_model(closed), closed)
    cut = solve_lp(build_cut_model(closed), closed)
    opt = exact_opt(inst).opt_size
    alg = len(result.solution)
    if alg > rho * lp.tau:
        fail("ratio-tau", f"|ALG|={alg} > {rho}*tau={rho * lp.tau}")
    if alg > rho * opt:
        fail("ratio-opt", f"|ALG|={alg} > {rho}*OPT={rho * opt}")
    if not cut.tau <= lp.tau <= opt <= alg:
        fail("sandwich", f"cut={cut.tau} tau={lp.tau} opt={opt} alg={alg}")
    rhs = coupons_rhs(closed, lp, result.cover)
    if rho * lp.tau < rhs:
        fail("coupons", f"rho*tau={rho * lp.tau} < {rhs}")
    report = audit_ledger(result, lp)
    for f in report.failures:
        fail("ledger", f)
    if leaf_oracle:
        brute, _ = exact_leaf_cover_opt(closed, LeafWeightConfig(rho))
        fast = min_weight_exact_cover(LeafWeightConfig(rho), closed).weight
        if brute != fast:
            fail("leafcover", f"matching {fast} != enumeration {brute}")
    return InstanceOutcome(seed, spec.n, alg, opt, lp.tau, cut.tau, failures)


def _run_one(args: tuple[int, int, int, Fraction]) -> InstanceOutcome:
    seed, n_min, n_max, rho = args
    return check_instance(seed, spec_for(seed, n_min, n_max), rho)


def run_stress(count: int, n_min: int = 4, n_max: int = 12, seed: int = 0,
               rho: Fraction = DEFAULT_RHO, workers: int = 1) -> StressReport:
    report = StressReport()
    jobs = [(seed + i, n_min, n_max, Fraction(rho)) for i in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            for out in pool.map(_run_one, jobs, chunksize=8):
                report.merge(out)
    else:
        for job in jobs:
            report.merge(_run_one(job))
    return report


def dumps(report: StressReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True)

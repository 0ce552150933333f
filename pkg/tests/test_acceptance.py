"""Acceptance criteria, one test each, with a PASS/FAIL line printed per criterion.

All comparisons are exact rational comparisons with tolerance 0. Criteria
1 to 7 share one sweep of 500 generated instances (4 <= n <= 12, at most 8
leaves).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import pytest

from tapaug.audit import AuditReport, audit_ledger
from tapaug.contraction import FIND_TREE, SEMI_CLOSED, init_state, solve
from tapaug.generate import generate
from tapaug.instance import TapInstance, parse_instance, shadow_completion
from tapaug.leafcover import LeafWeightConfig, min_weight_exact_cover
from tapaug.lpbound import LpModel, build_cut_model, build_pi_model, coupons_rhs, solve_lp
from tapaug.oracle import MAX_LINKS, exact_leaf_cover_opt, exact_opt, shadow_minimal_twin_max
from tapaug.stress import spec_for

from conftest import DANGEROUS_ONE, FIXTURE_1, FIXTURE_2, FIXTURE_3

RHO = Fraction(7, 4)
SWEEP = 500


@dataclass
class Row:
    seed: int
    closed: TapInstance
    model: LpModel
    alg: int
    opt: int
    tau: Fraction
    cut: Fraction
    rhs: Fraction
    audit: AuditReport


def report(name: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")


@pytest.fixture(scope="module")
def sweep() -> list[Row]:
    rows = []
    for seed in range(SWEEP):
        inst = generate(spec_for(seed, 4, 12))
        closed = shadow_completion(inst)
        res = solve(inst, RHO)
        model = build_pi_model(closed)
        lp = solve_lp(model, closed)
        cut = solve_lp(build_cut_model(closed), closed)
        rows.append(Row(seed, closed, model, len(res.solution), exact_opt(inst).opt_size, lp.tau,
                        cut.tau, coupons_rhs(closed, lp, res.cover), audit_ledger(res, lp)))
    return rows


def test_sweep_shape(sweep):
    assert len(sweep) == SWEEP
    assert all(4 <= r.closed.n <= 12 and len(r.closed.leaves) <= 8 for r in sweep)


def test_criterion_1_ratio_to_lp(sweep, capsys):
    bad = [r.seed for r in sweep if r.alg > RHO * r.tau]
    worst = max(Fraction(r.alg) / r.tau for r in sweep)
    with capsys.disabled():
        report("1 |ALG| <= 7/4 tau", not bad, f"{len(sweep)} instances, max |ALG|/tau = {worst}, violations {bad}")
    assert not bad


def test_criterion_2_ratio_to_opt(sweep, capsys):
    bad = [r.seed for r in sweep if r.alg > RHO * r.opt]
    worst = max(Fraction(r.alg, r.opt) for r in sweep)
    with capsys.disabled():
        report("2 |ALG| <= 7/4 OPT", not bad, f"{len(sweep)} instances, max |ALG|/OPT = {worst}, violations {bad}")
    assert not bad


def test_criterion_3_coupon_inequality(sweep, capsys):
    bad = [r.seed for r in sweep if RHO * r.tau < r.rhs]
    tight = sum(1 for r in sweep if RHO * r.tau == r.rhs)
    with capsys.disabled():
        report("3 7/4 tau >= w(F_L) + Sigma/2", not bad,
               f"{len(sweep)} instances, {tight} tight, violations {bad}")
    assert not bad


def test_criterion_4_ledger_legality(sweep, capsys):
    bad = [(r.seed, r.audit.failures) for r in sweep if not r.audit.ok]
    steps = [s for r in sweep for s in r.audit.steps]
    closed_steps = [s for s in steps if s.kind in (SEMI_CLOSED, FIND_TREE)]
    illegal = [s for s in steps if s.slack < 0]
    deficient = [s for s in closed_steps if s.surplus < 1]
    ok = not bad and not illegal and not deficient
    with capsys.disabled():
        report("4 ledger legality", ok,
               f"{len(steps)} contractions ({len(closed_steps)} semi-closed or find-tree), "
               f"min slack {min(s.slack for s in steps)}, min surplus {min(s.surplus for s in closed_steps)}, "
               f"failing instances {bad[:3]}")
    assert ok


def test_criterion_5_relaxation_validity(sweep, capsys):
    checked, bad = 0, []
    for r in sweep:
        if len(r.closed.links) > MAX_LINKS:
            continue
        best = shadow_minimal_twin_max(r.closed)
        x = {e: Fraction(1) for e in best}
        if len(best) != r.opt or not all(row.satisfied(x) for row in r.model.rows):
            bad.append(r.seed)
        checked += 1
    ok = checked >= 100 and not bad
    with capsys.disabled():
        report("5 Pi contains the shadow-minimal twin-maximal optimum", ok,
               f"{checked} instances checked, violations {bad}")
    assert ok


def test_criterion_6_matching_optimality(sweep, capsys):
    cfg = LeafWeightConfig(RHO)
    checked, bad = 0, []
    for r in sweep:
        fast = min_weight_exact_cover(cfg, r.closed).weight
        brute, _ = exact_leaf_cover_opt(r.closed, cfg)
        checked += 1
        if fast != brute:
            bad.append((r.seed, fast, brute))
    ok = checked >= 200 and not bad
    with capsys.disabled():
        report("6 matching leaf cover equals enumeration", ok, f"{checked} instances, mismatches {bad}")
    assert ok


def test_criterion_7_sandwich(sweep, capsys):
    bad = [r.seed for r in sweep if not r.cut <= r.tau <= r.opt <= r.alg]
    gaps = sum(1 for r in sweep if r.cut < r.tau)
    with capsys.disabled():
        report("7 cut <= tau <= OPT <= |ALG|", not bad,
               f"{len(sweep)} instances, {gaps} with cut LP strictly below tau, violations {bad}")
    assert not bad


def test_criterion_8_fixture_regression(capsys):
    expected = {"FIXTURE-1": (FIXTURE_1, (1, 1, 1)), "FIXTURE-2": (FIXTURE_2, (2, 2, 2)),
                "FIXTURE-3": (FIXTURE_3, (1, 1, 1))}
    got = {}
    for name, (text, _) in expected.items():
        inst = parse_instance(text)
        closed = shadow_completion(inst)
        got[name] = (exact_opt(inst).opt_size, solve_lp(build_pi_model(closed), closed).tau,
                     len(solve(inst).solution))
    ok = all(got[name] == want for name, (_, want) in expected.items())
    with capsys.disabled():
        report("8 fixture (OPT, tau, |ALG|)", ok,
               ", ".join(f"{k} = ({a}, {b}, {c})" for k, (a, b, c) in got.items()))
    assert ok


def test_criterion_9_find_tree(capsys):
    closed = shadow_completion(parse_instance(DANGEROUS_ONE))
    state = init_state(closed, min_weight_exact_cover(LeafWeightConfig(RHO), closed), RHO)
    state.greedy_contract_exhaust()
    state.step()
    minimal = state.minimally_semi_closed()
    all_dangerous = bool(minimal) and all(state.is_dangerous(t) for t in minimal)
    _, cover, plain = state.find_tree()
    safe = state.is_dangerous(plain) is None
    sized = len(cover) == len(plain.M_prime) + len(plain.U_prime)
    contains = all(t.nodes < plain.nodes for t in minimal)
    ok = all_dangerous and safe and sized and contains
    with capsys.disabled():
        report("9 find-tree on a dangerous state", ok,
               f"dangerous trees {[sorted(t.nodes) for t in minimal]}, returned {sorted(plain.nodes)}, "
               f"|I'| = {len(cover)}, |M'| + |U'| = {len(plain.M_prime) + len(plain.U_prime)}, "
               f"non-dangerous {safe}")
    assert ok

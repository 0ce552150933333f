"""The leaf-strengthened LP relaxation and the plain cut LP, solved exactly."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from . import simplex
from .instance import InstanceError, Link, TapInstance, path_edges
from .leafcover import ExactLeafCover

ODD_SET_CAP = 16

CUT = "cut"
ODD_SET = "odd-leaf-set"
LEAF_EQ = "leaf-equality"
TWIN_STEM = "twin-stem"


@dataclass(frozen=True)
class ConstraintRow:
    kind: str
    coefficients: dict[Link, Fraction]
    sense: str
    rhs: Fraction
    tag: object

    def lhs(self, x: dict[Link, Fraction]) -> Fraction:
        return sum((c * x.get(e, 0) for e, c in self.coefficients.items()), Fraction(0))

    def satisfied(self, x: dict[Link, Fraction]) -> bool:
        value = self.lhs(x)
        return value == self.rhs if self.sense == "=" else value >= self.rhs

    def text(self) -> str:
        parts = []
        for (u, v), c in sorted(self.coefficients.items()):
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            parts.append(f"{sign} {mag}x{u}_{v}")
        terms = " ".join(parts).removeprefix("+ ") or "0"
        tag = sorted(self.tag) if isinstance(self.tag, frozenset) else self.tag
        return f"[{self.kind} {tag}] {terms} {self.sense} {self.rhs}"


@dataclass
class LpModel:
    variables: list[Link]
    rows: list[ConstraintRow]

    def objective(self, x: dict[Link, Fraction]) -> Fraction:
        return sum((x.get(e, Fraction(0)) for e in self.variables), Fraction(0))

    def count(self, kind: str) -> int:
        return sum(1 for r in self.rows if r.kind == kind)

    def text(self) -> str:
        head = "minimize " + " + ".join(f"x{u}_{v}" for u, v in self.variables)
        return "\n".join([head] + [r.text() for r in self.rows]) + "\n"


@dataclass
class LpSolution:
    x: dict[Link, Fraction]
    tau: Fraction
    duals: Optional[list[Fraction]] = field(default=None, repr=False)

    def degree(self, inst: TapInstance, v: int) -> Fraction:
        return sum((val for e, val in self.x.items() if v in e), Fraction(0))


def _one(links) -> dict[Link, Fraction]:
    return {e: Fraction(1) for e in links}


def cut_rows(inst: TapInstance) -> list[ConstraintRow]:
    rows = []
    covering: dict[tuple[int, int], list[Link]] = {e: [] for e in inst.tree.edges()}
    for link in inst.sorted_links():
        for e in path_edges(inst, *link):
            covering[e].append(link)
    for e in inst.tree.edges():
        rows.append(ConstraintRow(CUT, _one(covering[e]), ">=", Fraction(1), e))
    return rows


def build_cut_model(inst: TapInstance) -> LpModel:
    return LpModel(inst.sorted_links(), cut_rows(inst))


def build_pi_model(inst: TapInstance, cap: int = ODD_SET_CAP) -> LpModel:
    leaves = sorted(inst.leaves)
    if len(leaves) > cap:
        raise InstanceError(f"{len(leaves)} leaves exceeds the odd-set enumeration cap {cap}")
    links = inst.sorted_links()
    rows = cut_rows(inst)
    for size in range(1, len(leaves) + 1, 2):
        for subset in combinations(leaves, size):
            members = set(subset)
            touching = [e for e in links if e[0] in members or e[1] in members]
            rows.append(ConstraintRow(ODD_SET, _one(touching), ">=",
                                      Fraction((size + 1) // 2), frozenset(subset)))
    for v in leaves:
        rows.append(ConstraintRow(LEAF_EQ, _one(inst.incident(v)), "=", Fraction(1), v))
    for e, stem in sorted(inst.stem_of.items()):
        coeffs = {f: Fraction(-1) for f in inst.incident(stem)}
        coeffs[e] = coeffs.get(e, Fraction(0)) + 1
        rows.append(ConstraintRow(TWIN_STEM, coeffs, "=", Fraction(0), e))
    return LpModel(links, rows)


def _implied_odd_row(inst: TapInstance, row: ConstraintRow) -> bool:
    """True if leaf equalities alone force this odd-set row.

    With every leaf degree equal to one, the row reads x(E[A]) <= (|A|-1)/2
    for the links E[A] inside A, and any vertex cover C of E[A] gives
    x(E[A]) <= |C|.
    """
    members = row.tag
    inside = [e for e in row.coefficients if e[0] in members and e[1] in members]
    limit = (len(members) - 1) // 2
    if len(inside) <= limit:
        return True
    nodes = sorted({v for e in inside for v in e})
    for k in range(limit + 1):
        for cover in combinations(nodes, k):
            cs = set(cover)
            if all(e[0] in cs or e[1] in cs for e in inside):
                return True
    return False


def check_certificate(model: LpModel, sol: LpSolution) -> None:
    """Verify primal feasibility, dual feasibility and equal objectives, all exactly."""
    for row in model.rows:
        if not row.satisfied(sol.x):
            raise AssertionError(f"row violated: {row.text()}")
    if any(v < 0 for v in sol.x.values()):
        raise AssertionError("negative variable")
    if sol.tau != model.objective(sol.x):
        raise AssertionError("tau differs from the objective of x")
    y = sol.duals
    if y is None:
        raise AssertionError("no dual certificate")
    reduced = {e: Fraction(1) for e in model.variables}
    for yi, row in zip(y, model.rows):
        if row.sense == ">=" and yi < 0:
            raise AssertionError(f"negative dual on {row.text()}")
        for e, c in row.coefficients.items():
            reduced[e] -= yi * c
    if any(r < 0 for r in reduced.values()):
        raise AssertionError("dual infeasible")
    if sum((yi * row.rhs for yi, row in zip(y, model.rows)), Fraction(0)) != sol.tau:
        raise AssertionError("duality gap")


def solve_lp(model: LpModel, inst: Optional[TapInstance] = None, exact: bool = True,
             presolve: bool = True) -> LpSolution:
    """Optimal solution of ``model``; exact results carry a checked dual certificate.

    With ``presolve`` (and the instance at hand) odd-set rows already implied
    by the leaf equalities are left out of the simplex run; they receive a
    zero dual, and the certificate is checked against every row.
    """
    if not exact:
        return _solve_float(model)
    keep = list(range(len(model.rows)))
    if presolve and inst is not None and any(r.kind == LEAF_EQ for r in model.rows):
        keep = [i for i, r in enumerate(model.rows)
                if not (r.kind == ODD_SET and _implied_odd_row(inst, r))]
    index = {e: j for j, e in enumerate(model.variables)}
    rows = []
    for i in keep:
        r = model.rows[i]
        coeffs = [Fraction(0)] * len(model.variables)
        for e, c in r.coefficients.items():
            coeffs[index[e]] = c
        rows.append((coeffs, r.sense, r.rhs))
    try:
        res = simplex.solve([Fraction(1)] * len(model.variables), rows)
    except simplex.Infeasible:
        raise InstanceError("LP infeasible (instance infeasible)") from None
    duals = [Fraction(0)] * len(model.rows)
    for i, yi in zip(keep, res.duals):
        duals[i] = yi
    x = {e: v for e, v in zip(model.variables, res.x) if v}
    sol = LpSolution(x, res.value, duals)
    check_certificate(model, sol)
    return sol


def _solve_float(model: LpModel) -> LpSolution:
    import numpy as np
    from scipy.optimize import linprog

    index = {e: j for j, e in enumerate(model.variables)}
    n = len(model.variables)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for r in model.rows:
        vec = np.zeros(n)
        for e, c in r.coefficients.items():
            vec[index[e]] = float(c)
        if r.sense == ">=":
            a_ub.append(-vec)
            b_ub.append(-float(r.rhs))
        else:
            a_eq.append(vec)
            b_eq.append(float(r.rhs))
    res = linprog(np.ones(n), A_ub=np.array(a_ub) if a_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(a_eq) if a_eq else None, b_eq=b_eq or None, method="highs")
    if res.status != 0:
        raise InstanceError(f"float LP failed: {res.message}")
    x = {e: Fraction(v).limit_denominator(10**9) for e, v in zip(model.variables, res.x)
         if abs(v) > 1e-9}
    return LpSolution(x, Fraction(res.fun).limit_denominator(10**9))


def regular_degree_sum(inst: TapInstance, lp: LpSolution) -> Fraction:
    """Sum of x(delta(v)) over nodes that are neither leaves nor stems."""
    return sum((lp.degree(inst, v) for v in inst.regular_nodes), Fraction(0))


def coupons_rhs(inst: TapInstance, lp: LpSolution, cover: ExactLeafCover) -> Fraction:
    return cover.weight + regular_degree_sum(inst, lp) / 2

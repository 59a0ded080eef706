"""Verification suites behind ``corrspace verify`` and ``corrspace table1``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import aklt, cluster, engine
from .mps import validate_channel
from .operators import (
    EPS,
    is_unitary,
    max_norm,
    phase_distance,
    projective_distance,
    random_state,
    rebit_embed,
    random_unitary,
    symplectic_form,
    weyl,
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    expected: object
    observed: object
    deviation: float | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "status": "pass" if self.passed else "fail",
                "deviation": self.deviation, "expected": self.expected, "observed": self.observed}


def _dev(name: str, dev: float, tol: float) -> Check:
    return Check(name, dev < tol, f"< {tol:g}", float(dev), float(dev))


def _eq(name: str, expected, observed) -> Check:
    return Check(name, expected == observed, expected, observed)


# --------------------------------------------------------------------------
# cluster


def cluster_checks(d: int, x: int | None = None, n: int = 4, bc: str = "pbc", tol: float = EPS) -> list[Check]:
    xs = [x] if x is not None else list(range(1, d))
    out: list[Check] = []
    for xv in xs:
        spec = cluster.ClusterSpec(d, xv, n, bc)
        psi = cluster.build_cluster(spec)
        devs = [max_norm(w.apply(psi, d, n) - psi) for w in cluster.stabilizer_generators(spec)]
        out.append(_dev(f"stabilizers d={d} x={xv} N={n} {bc}", max(devs), tol))
        if bc == "pbc" and d**n <= 4096:
            h = cluster.parent_hamiltonian(spec)
            evals = np.linalg.eigvalsh(h)
            energy = float(np.real(np.vdot(psi, h @ psi)))
            gap = float(evals[1] - evals[0])
            out.append(Check(f"parent hamiltonian ground state d={d} x={xv} N={n}",
                             abs(energy - evals[0]) < 1e-8 and gap > 1e-6 and abs(energy + 2 * n) < 1e-8,
                             {"energy": -2 * n, "unique": True},
                             {"energy": energy, "gap": gap}, abs(energy + 2 * n)))
        if bc == "pbc" and n % 2 == 0:
            dg, dh = cluster.onsite_symmetry_deviation(spec)
            out.append(_dev(f"on-site symmetry d={d} x={xv} N={n}", max(dg, dh), tol))
            moved = cluster.translate(cluster.build_cluster(cluster.ClusterSpec(d, d - xv, n, bc)), d, n)
            out.append(_dev(f"translation swaps x,y d={d} x={xv}", phase_distance(psi, moved), tol))
        lab = cluster.spt_label(d, xv)
        want = np.exp(2j * np.pi * xv / d)
        out.append(_dev(f"cocycle phase d={d} x={xv}", abs(lab.cocycle_phase - want), tol))
        out.append(_dev(f"cocycle composition d={d} x={xv}", cocycle_composition_defect(d, xv), tol))
        if gcd(xv, d) == 1:
            rep = cluster.teleport_identities(d, xv)
            out.append(_dev(f"teleport identities d={d} x={xv}",
                            max(rep.shifted_deviation, rep.fourier_deviation), tol))
        else:
            fr = cluster.factorize_noncoprime(d, xv, min(n, 3))
            out.append(Check(f"factorization d={d} x={xv}", fr.passed, f"fidelity > {1 - tol}",
                             fr.fidelity, 1 - fr.fidelity))
    out += transition_checks(d, tol)
    return out


def cocycle_composition_defect(d: int, x: int) -> float:
    worst = 0.0
    for i, j, a, b in itertools.product(range(d), repeat=4):
        lhs = cluster.projective_rep(d, x, i, j) @ cluster.projective_rep(d, x, a, b)
        rhs = cluster.cocycle(d, x, (i, j), (a, b)) * cluster.projective_rep(d, x, i + a, j + b)
        worst = max(worst, max_norm(lhs - rhs))
    return worst


def transition_routes(d: int) -> list[tuple[cluster.ClusterSpec, str, dict, tuple[int, int]]]:
    """``(source, pattern, params, expected target (x, y))`` for the local-unitary routes."""
    routes = []
    for x in range(1, d):
        y = d - x
        routes.append((cluster.ClusterSpec(d, x, 4), "identity", {}, (x, y)))
        routes.append((cluster.ClusterSpec(d, x, 4), "pi_alternating", {}, (y, x)))
        routes.append((cluster.ClusterSpec(d, x, 4), "pi_alternating", {"offset": 1}, (y, x)))
        routes.append((cluster.ClusterSpec(d, x, 4), "pi_pairs", {}, (x, x)))
        routes.append((cluster.ClusterSpec(d, x, 4), "pi_pairs", {"offset": 3}, (y, y)))
        if gcd(x, d) != 1:
            continue
        for a in range(1, d):
            if gcd(a, d) != 1:
                continue
            b = d - a
            # F_{a x} on the sublattice carrying the left end of the x bonds
            routes.append((cluster.ClusterSpec(d, y, 4, y=x), "f_ax_alternating",
                           {"a": a, "xf": x}, (a, b)))
            routes.append((cluster.ClusterSpec(d, x, 4, y=y), "f_ax_alternating",
                           {"a": a, "xf": x, "offset": 1}, (b, a)))
    if d == 5:
        routes.append((cluster.ClusterSpec(5, 4, 4, y=1), "f_ax_alternating", {"a": 1, "xf": 3}, (2, 3)))
        routes.append((cluster.ClusterSpec(5, 1, 4), "pi_pairs", {}, (1, 1)))
    if d == 4:
        routes.append((cluster.ClusterSpec(4, 1, 4), "pi_pairs", {}, (1, 1)))
    return routes


def transition_checks(d: int, tol: float = EPS) -> list[Check]:
    out = []
    for spec, pattern, params, (tx, ty) in transition_routes(d):
        res = cluster.lu_transition(spec, pattern, **params)
        ok = res.passed and (res.target.x, res.target.y) == (tx, ty)
        out.append(Check(f"transition {pattern}{params or ''} C_{d}({spec.x},{spec.y})",
                         ok, f"C_{d}({tx},{ty})", f"C_{d}({res.target.x},{res.target.y})", res.deviation))
    return out


# --------------------------------------------------------------------------
# AKLT families


TABLE_DIMS = {
    "spin1": lambda p: (3, 2),
    "su": lambda p: (p["N"] ** 2 - 1, p["N"]),
    "so_fund": lambda p: (2 * p["l"] + 1, 2 ** p["l"]),
    "so_adj": lambda p: (p["l"] * (2 * p["l"] + 1), 2 ** p["l"]),
    "sp": lambda p: (2 ** p["m"] * (2 ** (p["m"] + 1) + 1), 2 ** (p["m"] + 1)),
}


def family_checks(fam: aklt.ResourceFamily, samples: int = 20, tol: float = EPS) -> list[Check]:
    out = [_eq(f"{fam.name} dimensions", TABLE_DIMS[fam.tag](fam.params), (fam.phys_dim, fam.bond_dim))]
    out.append(_dev(f"{fam.name} channel", validate_channel(fam.kraus).deviation, tol))
    out.append(_eq(f"{fam.name} words unitary", True, all(is_unitary(w) for w in fam.words)))
    out.append(_eq(f"{fam.name} byproduct closure defects", 0, aklt.byproduct_closure_defect(fam)))
    rep = aklt.verify_family_symmetry(fam, samples)
    out.append(_dev(f"{fam.name} symmetry condition", rep.max_deviation, 1e-7))
    return out


def aklt_checks(families=None, samples: int = 20, tol: float = EPS) -> list[Check]:
    fams = families if families is not None else [aklt.spin1_kraus(), *aklt.all_table_families()]
    out = []
    for fam in fams:
        out += family_checks(fam, samples, tol)
    return out


# --------------------------------------------------------------------------
# engine


def census_check(fam: aklt.ResourceFamily) -> Check:
    c = engine.success_census(fam)
    want = engine.closed_form_fraction(fam)
    return Check(f"{fam.name} success census", c.fraction == want and c.independent, want, c.fraction)


def engine_checks(families=None, tol: float = EPS, seed: int = 0) -> list[Check]:
    fams = families if families is not None else [aklt.spin1_kraus(), *aklt.all_table_families()]
    rng = np.random.default_rng(seed)
    out = []
    for fam in fams:
        out.append(census_check(fam))
        proj = engine.projection_basis(fam)
        out.append(Check(f"{fam.name} projection census", proj.fraction == engine.closed_form_fraction(fam),
                         engine.closed_form_fraction(fam), proj.fraction))
        if fam.tag != "su" or engine._is_prime(fam.bond_dim):
            span = engine.universality_span_check(fam)
            out.append(Check(f"{fam.name} algebra span", span.passed, span.expected, span.rank))
        worst = 0.0
        for _ in range(10):
            v1 = aklt.random_algebra_element(fam, rng)
            v2 = aklt.random_algebra_element(fam, rng)
            lift = lambda v: engine.adjoint_lift(v, fam.lift_basis, fam.phys_dim)  # noqa: E731
            worst = max(worst, max_norm(lift(v1 @ v2) - lift(v1) @ lift(v2)))
        out.append(_dev(f"{fam.name} lift homomorphism", worst, 1e-8))
    out += standard_plan_checks(tol)
    for n in (2, 4, 8):
        rows = engine.sp_commutation_census(n)
        out.append(Check(f"sp commutation facts n={n}", all(r.passed for r in rows),
                         {r.pair: r.expected for r in rows},
                         {r.pair: sorted(set(r.observed)) for r in rows}))
    out.append(_dev("rebit embedding", rebit_defect(20, seed), tol))
    return out


def teleport_check(tol: float = EPS) -> Check:
    plan = engine.teleport_plan(random_state(2, np.random.default_rng(7)))
    worst = 0.0
    labels = []
    for rec in engine.run_plan(plan):
        s, t = rec.outcomes
        worst = max(worst, projective_distance(rec.net_operator, weyl(2, t, s)),
                    abs(rec.probability - 0.25))
        labels.append(rec.byproduct.label)
    return Check("qubit teleportation byproducts", worst < tol, ["1", "X", "Z", "XZ"], labels, worst)


def euler_check(tol: float = EPS, angles=(0.3, 0.7, -0.4), axes=("Z", "X", "Z")) -> Check:
    fam = aklt.spin1_kraus()
    plan = engine.euler_plan(fam, angles, axes, random_state(2, np.random.default_rng(3)))
    recs = engine.run_plan(plan)
    target = engine.euler_target(fam, angles, axes)
    active = [r for r in recs if r.fully_active]
    worst = max(projective_distance(r.logical, target) for r in active)
    return Check("spin-1 Euler plan on fully active branches", worst < tol and len(active) == 8,
                 {"fully_active": 8, "deviation": f"< {tol:g}"},
                 {"fully_active": len(active), "deviation": worst}, worst)


def standard_plan_checks(tol: float = EPS) -> list[Check]:
    out = [teleport_check(tol), euler_check(tol)]
    rng = np.random.default_rng(11)
    plans = []
    fam = engine.cluster_resource(2, 1)
    plans.append(engine.MeasurementPlan(fam, tuple(engine.cluster_basis_step(fam, t)
                                                   for t in ("H", "F1:0.4", "H", "F1:-1.1")),
                                        random_state(2, rng)))
    fam = engine.cluster_resource(3, 1)
    plans.append(engine.MeasurementPlan(fam, (engine.cluster_basis_step(fam, ["F1", "F2"]),
                                              engine.cluster_basis_step(fam, ["F1:0.3", "I"])),
                                        random_state(3, rng)))
    plans.append(engine.euler_plan(aklt.spin1_kraus(), input_state=random_state(2, rng)))
    su3 = aklt.su_family(3)
    plans.append(engine.MeasurementPlan(su3, (engine.elementary_gate_plan(su3, "Z-mub:0", 0.4),
                                              engine.elementary_gate_plan(su3, "XZ-mub:2", 1.1)),
                                        random_state(3, rng)))
    for plan in plans:
        rep = engine.real_vs_virtual_check(plan, 1e-8)
        out.append(Check(f"real vs virtual {rep.family} ({rep.branches} branches)", rep.passed,
                         "< 1e-08", max(rep.max_state_deviation, rep.max_probability_deviation),
                         max(rep.max_state_deviation, rep.max_probability_deviation)))
    return out


def rebit_defect(samples: int = 100, seed: int = 0) -> float:
    """Orthogonality, symplecticity and multiplicativity of the rebit map on random SU(2) pairs."""
    rng = np.random.default_rng(seed)
    omega = symplectic_form(2).real
    worst = 0.0
    for _ in range(samples):
        u1, u2 = random_unitary(2, rng), random_unitary(2, rng)
        u1 = u1 / np.sqrt(np.linalg.det(u1))
        u2 = u2 / np.sqrt(np.linalg.det(u2))
        r1, r2 = rebit_embed(u1), rebit_embed(u2)
        worst = max(worst, max_norm(r1.T @ r1 - np.eye(4)), max_norm(r1.T @ omega @ r1 - omega),
                    max_norm(rebit_embed(u1 @ u2) - r1 @ r2))
    return worst


# --------------------------------------------------------------------------
# Table I


def table1_rows() -> list[dict]:
    rows = []
    for fam in [aklt.spin1_kraus(), *aklt.all_table_families()]:
        c = engine.success_census(fam)
        closed = engine.closed_form_fraction(fam)
        byp = "Weyl X^iZ^j" if fam.tag == "su" and fam.bond_dim > 2 else "Pauli words"
        rows.append({"family": fam.name, "on_site_dim": fam.phys_dim, "virtual_dim": fam.bond_dim,
                     "byproduct": byp, "census": c.fraction, "closed_form": closed,
                     "independent_of_generator": c.independent,
                     "status": "pass" if c.fraction == closed and c.independent else "fail"})
    return rows


def table1_closed_forms() -> dict:
    return {"su": "N/(N+1)", "so_fund": "2/(2l+1)", "so_adj": "2(2l-1)/(l(2l+1))", "sp": "(n+1)/(2n+1)",
            "spin1": "2/3"}


def fraction_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"

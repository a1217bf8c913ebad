"""Named verification suites: theorem instances checked on concrete rings."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ksl.charsums import (
    bound_ledger,
    coefficient_table,
    field_trend_scan,
    kloosterman_salem,
    ks_number,
    matrix_degenerate_coefficient,
    product_formula,
    pullback_bound,
)
from ksl.extremal import check_certificate, extremal_scan, is_extremal, sum_of_units_solver, verify_unit_sum
from ksl.ringspec import Galois, Matrix, Product, Zmod, prime_power
from ksl.rings import as_ring, brute_force_inverses, build_ring, phi, principal_left_ideals, unit_count_formula, units
from ksl.sgraph import (
    connectivity_report,
    count_pairs,
    eigen_relation_residual,
    hyperbola_graph,
    ideal_bound_check,
    independence_and_chromatic,
    random_walk_check,
    spectral_gap,
    spectrum,
)


def num(x: float) -> float:
    """Round to 12 significant digits for stable serialization."""
    return float(f"{float(x):.12g}")


@dataclass
class Instance:
    claim: str
    reference: str
    instance: str
    verdict: bool
    values: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        vals = {k: (num(v) if isinstance(v, float) else v) for k, v in self.values.items()}
        return {
            "claim": self.claim,
            "reference": self.reference,
            "instance": self.instance,
            "verdict": "PASS" if self.verdict else "FAIL",
            "values": vals,
        }


@dataclass
class VerificationSuiteResult:
    suite: str
    instances: list[Instance]
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        return all(i.verdict for i in self.instances)

    def as_dict(self, timing: bool = False) -> dict:
        out = {
            "suite": self.suite,
            "passed": self.passed,
            "instances": [i.as_dict() for i in self.instances],
        }
        if timing:
            out["runtime"] = round(self.runtime, 3)
        return out


def prime_powers(limit: int) -> list[int]:
    return [q for q in range(2, limit + 1) if prime_power(q)]


def boolean(n: int):
    return Product((Galois(2),) * n) if n > 1 else Galois(2)


FIELD_FAMILY = [2, 3, 4, 5, 7, 8, 9, 11, 13]
RING_FAMILY = ["Z/4", "Z/6", "Z/8", "Z/9", "Z/12", "Z/15", "Z/16", "Z/18", "Z/25", "Z/27",
               "M2(GF(2))", "M2(GF(3))", "GF(4) x Z/3", "Z/3 x GF(2)", "GF(3) x GF(5)", "Z/4 x Z/3"]


def suite_bounds(seed: int = 0, jobs: int = 1) -> list[Instance]:
    out = []
    specs = [boolean(n) for n in range(1, 7)] + [Galois.of_order(q) for q in FIELD_FAMILY] + RING_FAMILY
    for spec in specs:
        ring = as_ring(spec)
        report = kloosterman_salem(ring, jobs=jobs)
        ledger = bound_ledger(ring, report)
        failed = [r.name for r in ledger.records if r.verdict != "PASS"]
        out.append(Instance("every applicable bound holds", "bound ledger", ring.name, ledger.passed,
                            {"C": report.C, "records": len(ledger.records), "failed": failed}))
        formula = unit_count_formula(ring.spec)
        left, right = brute_force_inverses(ring)
        J = ring.radical()
        quotient_units = len(units(build_ring(ring.quotient_spec())))
        ok = (len(units(ring)) == formula == int((left >= 0).sum()) == int((right >= 0).sum())
              == len(J) * quotient_units)
        out.append(Instance("unit count = formula = brute force = |J||(R/J)*|", "unit structure",
                            ring.name, ok, {"units": formula}))
    for row in field_trend_scan([5, 7, 9, 11, 13], jobs=jobs):
        out.append(Instance("C of a field lies between the Kloosterman and Weil bounds", "field trend",
                            f"GF({row.q})", row.bracketed,
                            {"C": row.C, "lower": row.lower, "upper": row.upper}))
    worst = min(phi(n, q) for n in range(1, 21) for q in (2, 3, 4, 5))
    out.append(Instance("phi(n, q) >= 1/4", "phi lemma", "n<=20, q in {2,3,4,5}", worst >= 0.25,
                        {"min_phi": worst}))
    return out


def suite_extremal_fields(seed: int = 0, jobs: int = 1) -> list[Instance]:
    out = []
    for q in prime_powers(16):
        cert = is_extremal(Galois.of_order(q))
        expected = q in (2, 3, 4)
        C = ks_number(Galois.of_order(q))
        agrees = cert.extremal == (abs(C - math.sqrt(q - 1)) < 1e-9)
        out.append(Instance("GF(q) extremal iff q in {2,3,4}", "finite-field classification", f"GF({q})",
                            cert.extremal == expected and agrees and check_certificate(Galois.of_order(q), cert),
                            {"extremal": cert.extremal, "C": C}))
    for text in ["Z/3", "Z/5", "GF(4)", "Z/4"]:
        ring = as_ring(f"{text} x GF(2)")
        C = ks_number(ring)
        root = math.sqrt(len(units(ring)))
        ext = is_extremal(ring).extremal
        out.append(Instance("R x GF(2) is extremal with C = sqrt|R*|", "Boolean twist", ring.name,
                            ext and abs(C - root) <= 1e-9, {"C": C, "sqrt_units": root}))
    scan = extremal_scan([Galois.of_order(q) for q in prime_powers(16)] + RING_FAMILY)
    out.append(Instance("exact and analytic extremality agree; product and radical laws", "extremal laws",
                        f"{len(scan.rows)} rings", scan.passed,
                        {"extremal": [r.ring for r in scan.rows if r.extremal]}))
    for text, A, B in [("GF(5)", 0, 0), ("GF(7)", 3, 5), ("M2(GF(3))", 7, 40)]:
        us = sum_of_units_solver(text, A, B, shifted=False)
        out.append(Instance("non-extremal rings write (A, B) as sums of units and inverses",
                            "sum-of-units corollary", f"{text} ({A},{B})",
                            us is not None and verify_unit_sum(text, us, A, B, shifted=False),
                            {"terms": len(us) if us else 0}))
    return out


PRODUCT_PAIRS = [("Z/3", "Z/4"), ("Z/3", "Z/5"), ("Z/3", "GF(2)"), ("Z/4", "Z/5"), ("Z/4", "GF(4)"),
                 ("Z/5", "GF(2)"), ("Z/5", "GF(7)"), ("GF(2)", "GF(4)"), ("GF(4)", "GF(7)"), ("Z/3", "GF(7)")]


def suite_products(seed: int = 0, jobs: int = 1) -> list[Instance]:
    out = []
    for a, b in PRODUCT_PAIRS:
        R1, R2 = as_ring(a), as_ring(b)
        R = as_ring(f"{a} x {b}")
        C = kloosterman_salem(R, jobs=jobs).C
        pred = product_formula(ks_number(R1), R1, ks_number(R2), R2)
        ext_law = is_extremal(R).extremal == (is_extremal(R1).extremal or is_extremal(R2).extremal)
        out.append(Instance("C of a product from its factors; extremal iff a factor is", "direct-product formula",
                            R.name, abs(C - pred) <= 1e-8 and ext_law, {"C": C, "formula": pred}))
    for a, b in [("GF(2)", "GF(3)"), ("Z/3", "Z/4")]:
        R1, R2, R = as_ring(a), as_ring(b), as_ring(f"{a} x {b}")
        K1, K2, K = coefficient_table(R1), coefficient_table(R2), coefficient_table(R)
        n2 = R2.size
        expected = np.einsum("ac,bd->abcd", K1, K2).reshape(R.size, R.size)
        # product ring indices are (first factor, second factor) mixed radix
        idx = np.arange(R.size)
        i1, i2 = idx // n2, idx % n2
        expected = K1[i1[:, None], i1[None, :]] * K2[i2[:, None], i2[None, :]]
        err = float(np.abs(K - expected).max())
        out.append(Instance("coefficients of a product factor", "direct-product formula", R.name,
                            err < 1e-9, {"max_error": err}))
    return out


def suite_pullback(seed: int = 0, jobs: int = 1) -> list[Instance]:
    out = []
    for text in ["Z/9", "Z/4", "Z/8", "Z/12", "Z/18", "Z/25", "Z/27", "Z/4 x Z/3"]:
        pb = pullback_bound(text, tolerance=1e-8)
        q_ext = is_extremal(build_ring(as_ring(text).quotient_spec())).extremal
        law = is_extremal(text).extremal or not q_ext
        out.append(Instance("C_R >= C_{R/J} sqrt|J|; R/J extremal implies R extremal", "pullback lemma", text,
                            pb.verdict and law, {"lhs": pb.lhs, "C": pb.rhs, "J": pb.radical_size}))
    return out


def suite_graphs(seed: int = 0, jobs: int = 1) -> list[Instance]:
    out = []
    shapes = {"GF(2)": (2, 2), "GF(3)": (3, 3), "GF(4)": (4, 4)}
    for text in ["GF(2)", "GF(3)", "GF(4)", "GF(5)", "GF(7)", "Z/8", "Z/6"]:
        g = hyperbola_graph(text)
        rep = spectrum(g)
        conn = connectivity_report(g, rep)
        resid = eigen_relation_residual(g)
        ok = resid < 1e-8 * g.degree and conn.agree and rep.max_imag < 1e-9 * g.degree
        ok &= conn.connected and not conn.bipartite if not is_extremal(text).extremal else not (conn.connected and not conn.bipartite)
        if text in shapes:
            k, size = shapes[text]
            ok &= rep.components == k and g.degree == size - 1 and len(g.edges()) == k * size * (size - 1) // 2
        out.append(Instance("spectrum from Fourier coefficients; components match traversal", "hyperbola graphs",
                            text, bool(ok), {"components": conn.components, "bipartite": conn.bipartite,
                                             "residual": resid}))
    for text in ["GF(5)", "GF(7)", "M2(GF(3))"]:
        gap = spectral_gap(hyperbola_graph(text))
        out.append(Instance("spectral gap = |R*| - C sqrt|R*|", "spectral gap", text,
                            abs(gap.value - gap.from_spectrum) < 1e-8, {"gap": gap.value}))
    for text in ["GF(5)", "GF(7)"]:
        rows = random_walk_check(hyperbola_graph(text), 15)
        out.append(Instance("|p_ij^t - 1/|R|^2| <= (C/sqrt|R*|)^t, t <= 15", "random walk mixing", text,
                            all(r.ok for r in rows), {"deviation_15": rows[-1].deviation, "bound_15": rows[-1].bound}))
    for text in ["GF(3)", "GF(5)"]:
        rep = independence_and_chromatic(hyperbola_graph(text))
        out.append(Instance("exact independence/chromatic numbers respect the C bounds",
                            "independence and chromatic bounds", text, rep.consistent,
                            {"independence": rep.exact_indep, "chromatic": rep.exact_chrom}))
    return out


def suite_counting(seed: int = 0, jobs: int = 1) -> list[Instance]:
    out = []
    rng = np.random.default_rng(seed)
    for text in ["Z/3", "Z/5", "Z/4"]:
        ring = as_ring(text)
        worst = 0.0
        for _ in range(100):
            size = int(rng.integers(1, ring.size**2 + 1))
            E = rng.choice(ring.size**2, size=size, replace=False)
            worst = max(worst, count_pairs(ring, E).residual)
        out.append(Instance("n(E) = D(E) + |E|^2|R*|/|R|^2 on 100 random sets", "pair counting identity",
                            f"({text})^2", worst < 1e-6, {"max_residual": worst}))
    for text in ["Z/8", "Z/9", "Z/12", "M2(GF(2))"]:
        ring = as_ring(text)
        zero_counts = []
        for ideal in principal_left_ideals(ring):
            if ideal.proper:
                E = [(x, int(i)) for x in range(ring.size) for i in ideal.elements]
                zero_counts.append(count_pairs(ring, E).n_exact)
        recs = ideal_bound_check(ring)
        ok = all(r.verdict for r in recs) and all(c == 0 for c in zero_counts)
        out.append(Instance("proper ideals: n(R x I) = 0 and |I| <= C|R|/sqrt|R*|", "ideal bound", text, ok,
                            {"largest": max(r.size for r in recs), "bound": recs[0].bound}))
    return out


def suite_matrix(seed: int = 0, jobs: int = 1) -> list[Instance]:
    out = []
    for q in (2, 3):
        mc = matrix_degenerate_coefficient(q)
        C = kloosterman_salem(Matrix(2, Galois.of_order(q)), jobs=jobs).C
        out.append(Instance("degenerate coefficient closed form; C above the implied bound", "2x2 matrix rings",
                            f"M2(GF({q}))", bool(mc.exact_match) and C >= mc.implied_bound - 1e-8,
                            {"closed_form": mc.closed_form, "C": C, "bound": mc.implied_bound}))
    return out


SUITES = {
    "bounds": suite_bounds,
    "extremal-fields": suite_extremal_fields,
    "products": suite_products,
    "pullback": suite_pullback,
    "graphs": suite_graphs,
    "counting": suite_counting,
    "matrix": suite_matrix,
}


def run_suite(name: str, seed: int = 0, jobs: int = 1) -> list[VerificationSuiteResult]:
    """Run one suite, or every suite for ``all``."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join([*SUITES, 'all'])}")
    results = []
    for n in names:
        t0 = time.perf_counter()
        inst = SUITES[n](seed=seed, jobs=jobs)
        results.append(VerificationSuiteResult(n, inst, time.perf_counter() - t0))
    return results

"""Acceptance criteria, one test each; every test prints a single pass/fail line."""

import math
import subprocess
import sys
import time

import numpy as np

from ksl.charsums import (
    kloosterman_lower_bound_sq,
    kloosterman_salem,
    ks_number,
    matrix_degenerate_coefficient,
    product_formula,
    weil_upper_bound,
)
from ksl.extremal import check_certificate, is_extremal
from ksl.ringspec import Galois, Product, prime_power
from ksl.rings import as_ring, phi, principal_left_ideals, units
from ksl.sgraph import (
    connectivity_report,
    count_pairs,
    eigen_relation_residual,
    hyperbola_graph,
    ideal_bound_check,
    independence_and_chromatic,
    random_walk_check,
    spectrum,
    traversal_components,
)
from ksl.verify import PRODUCT_PAIRS, RING_FAMILY


def boolean(n):
    return Product((Galois(2),) * n) if n > 1 else Galois(2)


def test_01_boolean_law(criterion):
    worst_err, worst_time = 0.0, 0.0
    for n in range(1, 7):
        t0 = time.perf_counter()
        C = kloosterman_salem(boolean(n)).C
        worst_time = max(worst_time, time.perf_counter() - t0)
        worst_err = max(worst_err, abs(C - 1.0))
    criterion(1, "C = 1 on GF(2)^n, n = 1..6", worst_err <= 1e-9 and worst_time < 1.0,
              f"max |C-1| = {worst_err:.2e}, slowest {worst_time:.3f}s")


def test_02_field_values(criterion):
    t0 = time.perf_counter()
    ok = abs(kloosterman_salem("GF(2)").C - 1) <= 1e-9
    ok &= abs(kloosterman_salem("GF(3)").C - math.sqrt(2)) <= 1e-9
    rows = []
    for q in (4, 5, 7, 8, 9, 11, 13):
        C = kloosterman_salem(Galois.of_order(q)).C
        inside = kloosterman_lower_bound_sq(q) <= C * C and C <= weil_upper_bound(q)
        rows.append(f"q={q}:{C:.6f}")
        ok &= inside
    elapsed = time.perf_counter() - t0
    criterion(2, "field values and Kloosterman/Weil bounds", ok and elapsed < 10, f"{' '.join(rows)}; {elapsed:.2f}s")


def test_03_trend_bracket(criterion):
    values = {q: kloosterman_salem(Galois.of_order(q)).C for q in (5, 7, 9, 11, 13)}
    outside = {q: round(C, 6) for q, C in values.items() if not 1.85 < C < 2.17}
    criterion(3, "C of GF(q), q in {5,7,9,11,13}, inside (1.85, 2.17)", not outside,
              f"outside: {outside}" if outside else "all inside")


def test_04_extremal_fields(criterion):
    t0 = time.perf_counter()
    qs = [q for q in range(2, 17) if prime_power(q)]
    verdicts = {}
    ok = True
    for q in qs:
        cert = is_extremal(Galois.of_order(q))
        verdicts[q] = cert.extremal
        ok &= cert.extremal == (q in (2, 3, 4)) and check_certificate(Galois.of_order(q), cert)
    elapsed = time.perf_counter() - t0
    criterion(4, "GF(q) extremal iff q in {2,3,4}, q <= 16", ok and elapsed < 30,
              f"extremal q = {[q for q, v in verdicts.items() if v]}; {elapsed:.2f}s")


def test_05_product_formula(criterion):
    worst = 0.0
    for a, b in PRODUCT_PAIRS:
        R1, R2 = as_ring(a), as_ring(b)
        C = kloosterman_salem(as_ring(f"{a} x {b}")).C
        worst = max(worst, abs(C - product_formula(ks_number(R1), R1, ks_number(R2), R2)))
    criterion(5, f"product formula on {len(PRODUCT_PAIRS)} pairs", len(PRODUCT_PAIRS) == 10 and worst <= 1e-8,
              f"max error {worst:.2e}")


def test_06_boolean_twist(criterion):
    ok, detail = True, []
    for text in ("Z/3", "Z/5", "GF(4)", "Z/4"):
        R = as_ring(f"{text} x GF(2)")
        C = kloosterman_salem(R).C
        ok &= abs(C - math.sqrt(len(units(R)))) <= 1e-9 and is_extremal(R).extremal
        detail.append(f"{R.name}:{C:.6f}")
    criterion(6, "R x GF(2) extremal with C = sqrt|R*|", ok, " ".join(detail))


def test_07_pullback(criterion):
    c9, c4 = kloosterman_salem("Z/9").C, kloosterman_salem("Z/4").C
    ok = c9 >= math.sqrt(6) - 1e-8 and c4 >= math.sqrt(2) - 1e-8
    criterion(7, "pullback: C(Z/9) >= sqrt 6, C(Z/4) >= sqrt 2", ok, f"C(Z/9)={c9:.6f} C(Z/4)={c4:.6f}")


def test_08_matrix_ring(criterion):
    ok, detail, elapsed = True, [], 0.0
    for q in (2, 3):
        t0 = time.perf_counter()
        mc = matrix_degenerate_coefficient(q)
        C = kloosterman_salem(f"M2(GF({q}))").C
        elapsed = time.perf_counter() - t0
        closed = (q - 1) * q * (q + 1) - (q - 2) * q
        bound = (q - 1 + 1 / q) / math.sqrt((1 - 1 / q) * (1 - 1 / q**2))
        ok &= mc.exact_match and mc.closed_form == closed and C >= bound - 1e-8
        detail.append(f"q={q}: sum={closed} C={C:.6f} bound={bound:.6f}")
    criterion(8, "2x2 matrix degenerate coefficient and C bound", ok and elapsed < 60,
              "; ".join(detail) + f"; q=3 {elapsed:.2f}s")


def test_09_lower_bound_law(criterion):
    family = [boolean(n) for n in range(1, 7)] + [Galois.of_order(q) for q in (2, 3, 4, 5, 7, 8, 9, 11, 13, 16)]
    family += RING_FAMILY + [f"{a} x {b}" for a, b in PRODUCT_PAIRS]
    ok, tested = True, 0
    for spec in family:
        R = as_ring(spec)
        C = ks_number(R)
        nu = len(units(R))
        if nu > 1:
            ok &= C >= math.sqrt(2) - 1e-9
        ok &= C >= math.sqrt(1 - nu / R.size**2) - 1e-9
        tested += 1
    criterion(9, "C >= sqrt 2 (non-Boolean) and C >= sqrt(1-|R*|/|R|^2)", ok, f"{tested} rings")


def test_10_spectrum_oracle(criterion):
    ok, detail = True, []
    for text in ("GF(2)", "GF(3)", "GF(4)", "GF(5)", "Z/8", "Z/6"):
        g = hyperbola_graph(text)
        rep = spectrum(g)
        resid = eigen_relation_residual(g)
        comps, _ = traversal_components(g)
        ok &= resid < 1e-8 * g.degree and comps == rep.components and connectivity_report(g, rep).agree
        detail.append(f"{text}:{comps}")
    for text, k in (("GF(2)", 2), ("GF(3)", 3), ("GF(4)", 4)):
        g = hyperbola_graph(text)
        # k disjoint copies of K_k: k components, degree k-1, k * C(k, 2) edges
        ok &= spectrum(g).components == k and g.degree == k - 1 and len(g.edges()) == k * k * (k - 1) // 2
    criterion(10, "Fourier spectrum, components and clique decompositions", ok, "components " + " ".join(detail))


def test_11_counting_identity(criterion):
    rng = np.random.default_rng(42)
    worst = 0.0
    for text in ("Z/3", "Z/5", "Z/4"):
        R = as_ring(text)
        for _ in range(100):
            E = rng.choice(R.size**2, size=int(rng.integers(1, R.size**2 + 1)), replace=False)
            worst = max(worst, count_pairs(R, E).residual)
    zero = True
    for text in ("Z/8", "Z/9", "Z/12", "M2(GF(2))", "Z/3", "Z/4"):
        R = as_ring(text)
        for ideal in principal_left_ideals(R):
            if ideal.proper:
                E = [(x, int(i)) for x in range(R.size) for i in ideal.elements]
                zero &= count_pairs(R, E).n_exact == 0
    criterion(11, "n(E) = D(E) + |E|^2|R*|/|R|^2; n(R x I) = 0", worst < 1e-6 and zero, f"max residual {worst:.2e}")


def test_12_ideal_bound(criterion):
    ok, count = True, 0
    for text in ("Z/8", "Z/9", "Z/12", "M2(GF(2))"):
        R = as_ring(text)
        bound = ks_number(R) * R.size / math.sqrt(len(units(R)))
        for ideal in principal_left_ideals(R):
            if ideal.proper:
                ok &= ideal.size <= bound + 1e-8
                count += 1
        ok &= all(r.verdict for r in ideal_bound_check(R))
    criterion(12, "|I| <= C|R|/sqrt|R*| for proper principal left ideals", ok, f"{count} ideals")


def test_13_mixing(criterion):
    ok, detail = True, []
    for text in ("GF(5)", "GF(7)"):
        g = hyperbola_graph(text)
        C = ks_number(text)
        ratio = C / math.sqrt(len(units(text)))
        n = g.vertex_count
        P = g.adjacency_matrix().astype(float) / g.degree
        Pt = np.eye(n)
        for t in range(1, 16):
            Pt = Pt @ P
            ok &= np.abs(Pt - 1 / n).max() <= ratio**t + 1e-12
        ok &= all(r.ok for r in random_walk_check(g, 15, C))
        detail.append(f"{text} ratio={ratio:.4f}")
    criterion(13, "walk deviation <= (C/sqrt|R*|)^t, t = 1..15", ok, " ".join(detail))


def test_14_independence_chromatic(criterion):
    f3 = independence_and_chromatic(hyperbola_graph("GF(3)"))
    f5 = independence_and_chromatic(hyperbola_graph("GF(5)"))
    ok = f3.consistent and f5.consistent and (f3.exact_indep, f3.exact_chrom) == (3, 3)
    criterion(14, "exact independence/chromatic numbers within bounds", ok,
              f"GF(3): {f3.exact_indep},{f3.exact_chrom}  GF(5): {f5.exact_indep},{f5.exact_chrom}")


def test_15_phi_lemma(criterion):
    worst = min(phi(n, q) for n in range(1, 21) for q in (2, 3, 4, 5))
    criterion(15, "phi(n, q) >= 1/4", worst >= 0.25, f"min {worst:.6f}")


def test_16_determinism(criterion):
    def run(jobs):
        cmd = [sys.executable, "-m", "ksl.cli", "verify", "all", "--seed", "42", "--jobs", str(jobs)]
        return subprocess.run(cmd, capture_output=True, text=True)

    a, b = run(1), run(8)
    ok = a.returncode == b.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    criterion(16, "verify all --seed 42 identical for --jobs 1 and 8", ok,
              f"exit {a.returncode}/{b.returncode}, {len(a.stdout)} bytes")

"""Hyperbola Fourier coefficients and Kloosterman-Salem numbers.

For a dual pair ``(m, n)`` the (unnormalized) generalized Kloosterman sum is

    K(m, n) = sum_{x unit} chi_m(-x) chi_n(-x^-1)

and the hyperbola Fourier coefficient is ``K(m, n) / |R|^2``.  The
Kloosterman-Salem number is ``max_{(m,n) != 0} |K(m, n)| / sqrt(|R*|)``.

The full table of K is the matrix product ``A @ B.T`` with
``A[m, j] = chi_m(-u_j)`` and ``B[n, j] = chi_n(-u_j^-1)``.  Rows are processed
in fixed-size blocks so that the floating point result of each entry does not
depend on how many worker threads are used.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ksl.errors import GuardError
from ksl.ringspec import Galois, Matrix, Product, format_ring_spec
from ksl.rings import (
    FiniteRing,
    as_ring,
    build_ring,
    phi,
    roots_of_unity,
    size_guard,
    units,
)

DEFAULT_TOL = 1e-9
BLOCK_ROWS = 64


@dataclass(frozen=True, eq=False)
class Hyperbola:
    ring: FiniteRing
    units: np.ndarray
    inverses: np.ndarray

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(int(u), int(v)) for u, v in zip(self.units, self.inverses)]

    def __len__(self):
        return len(self.units)


def hyperbola(ring) -> Hyperbola:
    """The points (u, u^-1), sorted by unit index."""
    us = units(ring)
    return Hyperbola(us.ring, us.units, us.inverses)


def kloosterman_sum(ring, m: int, n: int) -> complex:
    """K(m, n), summed one unit at a time in increasing unit order."""
    ring = as_ring(ring)
    h = hyperbola(ring)
    roots = roots_of_unity(ring.exponent)
    total = 0j
    for u, v in zip(h.units, h.inverses):
        total += roots[ring.phase(m, ring.neg(u))] * roots[ring.phase(n, ring.neg(v))]
    return complex(total)


def fourier_coefficient(ring, m: int, n: int) -> complex:
    """Normalized hyperbola coefficient H^(m, n) = K(m, n) / |R|^2."""
    ring = as_ring(ring)
    return kloosterman_sum(ring, m, n) / ring.size**2


def _factor_matrices(ring: FiniteRing, phase=None):
    h = hyperbola(ring)
    phase = phase or ring.phase
    roots = roots_of_unity(ring.exponent)
    duals = ring.elements[:, None]
    A = roots[phase(duals, ring.neg(h.units)[None, :])]
    B = roots[phase(duals, ring.neg(h.inverses)[None, :])]
    return A, B


def _blocks(n: int):
    return [(s, min(s + BLOCK_ROWS, n)) for s in range(0, n, BLOCK_ROWS)]


def _map_blocks(fn, n: int, jobs: int):
    blocks = _blocks(n)
    if jobs <= 1 or len(blocks) == 1:
        return [fn(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, blocks))


def _check_guard(ring: FiniteRing, guard: int | None):
    limit = size_guard(guard)
    if ring.size > limit:
        raise GuardError(f"{ring.name}: {ring.size}^2 dual pairs exceed guard {limit}")


def coefficient_table(ring, jobs: int = 1, phase=None, guard: int | None = None) -> np.ndarray:
    """All K(m, n) as an |R| x |R| complex array indexed ``[m, n]``.

    ``phase`` substitutes another pairing ``(m, x) -> int mod exponent``.
    """
    ring = as_ring(ring)
    _check_guard(ring, guard)
    A, B = _factor_matrices(ring, phase)
    BT = B.T.copy()
    parts = _map_blocks(lambda b: A[b[0] : b[1]] @ BT, ring.size, jobs)
    return np.vstack(parts)


@dataclass
class KSReport:
    """Result of the exhaustive scan over nontrivial dual pairs."""

    ring: str
    size: int
    unit_count: int
    C: float
    max_abs_sum: float
    argmax: list[tuple[int, int]]
    tolerance: float
    table: np.ndarray | None = field(default=None, repr=False)

    @property
    def sqrt_units(self) -> float:
        return math.sqrt(self.unit_count)

    @property
    def max_coefficient(self) -> float:
        """max |H^(m,n)| over nontrivial pairs."""
        return self.max_abs_sum / self.size**2


def kloosterman_salem(
    ring,
    tolerance: float = DEFAULT_TOL,
    record_table: bool = False,
    jobs: int = 1,
    phase=None,
    guard: int | None = None,
) -> KSReport:
    """Kloosterman-Salem number with every maximizing dual pair.

    A pair is reported as a maximizer when its |K| is within
    ``tolerance * sqrt(|R*|)`` of the maximum, i.e. within ``tolerance`` on
    the scale of C itself.
    """
    ring = as_ring(ring)
    _check_guard(ring, guard)
    n = ring.size
    A, B = _factor_matrices(ring, phase)
    BT = B.T.copy()
    unit_count = A.shape[1]
    slack = tolerance * math.sqrt(unit_count)

    def scan(block):
        lo, hi = block
        K = A[lo:hi] @ BT
        mag = np.abs(K)
        if lo == 0:
            mag[0, 0] = -1.0
        best = float(mag.max())
        rows, cols = np.nonzero(mag >= best - slack)
        cands = [(lo + int(r), int(c), float(mag[r, c])) for r, c in zip(rows, cols)]
        return best, cands, (K if record_table else None)

    results = _map_blocks(scan, n, jobs)
    best = max(r[0] for r in results)
    argmax = sorted((m, k) for r in results for m, k, v in r[1] if v >= best - slack)
    table = np.vstack([r[2] for r in results]) if record_table else None
    return KSReport(
        ring=ring.name,
        size=n,
        unit_count=unit_count,
        C=best / math.sqrt(unit_count),
        max_abs_sum=best,
        argmax=argmax,
        tolerance=tolerance,
        table=table,
    )


@lru_cache(maxsize=512)
def _ks_value(spec) -> float:
    return kloosterman_salem(build_ring(spec)).C


def ks_number(ring) -> float:
    """C_R alone, cached per ring description."""
    return _ks_value(as_ring(ring).spec)


# -- structural formulas --------------------------------------------------------


def product_formula(C1: float, R1, C2: float, R2) -> float:
    """C of R1 x R2 from the factors: max(C1 sqrt|R2*|, C2 sqrt|R1*|)."""
    u1 = len(units(R1))
    u2 = len(units(R2))
    return max(C1 * math.sqrt(u2), C2 * math.sqrt(u1))


@dataclass
class PullbackResult:
    ring: str
    quotient: str
    radical_size: int
    C_quotient: float
    lhs: float
    rhs: float
    verdict: bool


def pullback_bound(ring, tolerance: float = DEFAULT_TOL) -> PullbackResult:
    """Check C_R >= C_{R/J} sqrt|J| with R/J built from the constructor tree."""
    ring = as_ring(ring)
    qspec = ring.quotient_spec()
    J = ring.radical()
    Cq = ks_number(qspec)
    lhs = Cq * math.sqrt(len(J))
    rhs = ks_number(ring)
    return PullbackResult(
        ring=ring.name,
        quotient=format_ring_spec(qspec),
        radical_size=len(J),
        C_quotient=Cq,
        lhs=lhs,
        rhs=rhs,
        verdict=rhs >= lhs - tolerance,
    )


@dataclass
class MatrixCoefficient:
    q: int
    closed_form: int
    implied_bound: float
    brute_force: complex | None = None
    phase_counts: list[int] | None = None
    exact_match: bool | None = None


def matrix_degenerate_coefficient(q: int, brute_force: bool = True) -> MatrixCoefficient:
    """The coefficient at (diag(1,0), diag(0,-1)) of M_2(GF(q)), scaled by |R|^2.

    Closed form (q-1)q(q+1) - (q-2)q; dividing by sqrt|GL_2(q)| gives the lower
    bound (q - 1 + 1/q) / sqrt((1-1/q)(1-1/q^2)) for C.  The brute-force side
    sums over GL_2 through the generic ring machinery and also tallies the
    integer phases, so agreement can be checked exactly: the sum equals the
    closed form iff every nonzero phase occurs equally often and
    ``count[0] - count[1]`` is the closed form.
    """
    closed = (q - 1) * q * (q + 1) - (q - 2) * q
    bound = (q - 1 + 1 / q) / math.sqrt(phi(2, q))
    result = MatrixCoefficient(q=q, closed_form=closed, implied_bound=bound)
    if not brute_force:
        return result
    R = build_ring(Matrix(2, Galois.of_order(q)))
    F = R.field
    A = R.encode([[1, 0], [0, 0]])
    B = R.encode([[0, 0], [0, int(F.neg(1))]])
    h = hyperbola(R)
    phases = (R.phase(A, R.neg(h.units)) + R.phase(B, R.neg(h.inverses))) % R.exponent
    counts = np.bincount(phases, minlength=R.exponent)
    result.brute_force = kloosterman_sum(R, A, B)
    result.phase_counts = counts.tolist()
    nonzero = counts[1:]
    result.exact_match = bool(
        np.all(nonzero == nonzero[0]) and int(counts[0] - nonzero[0]) == closed
    )
    return result


# -- bound ledger ------------------------------------------------------------------


@dataclass
class BoundRecord:
    name: str
    reference: str
    inequality: str
    lhs: float
    rhs: float
    verdict: str


@dataclass
class BoundLedger:
    ring: str
    C: float
    records: list[BoundRecord]

    @property
    def passed(self) -> bool:
        return all(r.verdict == "PASS" for r in self.records)


def kloosterman_lower_bound_sq(q: int) -> float:
    """Classical lower bound for C_F^2 over a field of order q."""
    return (2 * q**3 - 3 * q**2 - 3 * q - 1) / ((q - 1) * (q * q - q - 1))


def weil_upper_bound(q: int) -> float:
    return 2 / math.sqrt(1 - 1 / q)


def _leq(name, ref, text, lhs, rhs, tol) -> BoundRecord:
    return BoundRecord(name, ref, text, float(lhs), float(rhs), "PASS" if lhs <= rhs + tol else "FAIL")


def bound_ledger(ring, report: KSReport | None = None, tolerance: float = 1e-8, deep: bool = True) -> BoundLedger:
    """Evaluate every applicable inequality on C_R.

    With ``deep`` the product and pullback relations are checked too, which
    needs C of the factors and of R/J.
    """
    ring = as_ring(ring)
    report = report or kloosterman_salem(ring)
    C, n, u = report.C, ring.size, report.unit_count
    recs: list[BoundRecord] = []
    lower = math.sqrt(1 - u / n**2)
    recs.append(_leq("plancherel-lower", "Plancherel lower bound", "sqrt(1-|R*|/|R|^2) <= C", lower, C, tolerance))
    recs.append(_leq("half-root", "Plancherel lower bound", "sqrt(1/2) < sqrt(1-|R*|/|R|^2)", math.sqrt(0.5), lower - 1e-15, 0.0))
    recs.append(_leq("trivial-upper", "trivial upper bound", "C <= sqrt(|R*|)", C, math.sqrt(u), tolerance))
    boolean = u == 1
    if boolean:
        recs.append(BoundRecord("boolean-equality", "Boolean rings", "C == 1", C, 1.0,
                                "PASS" if abs(C - 1) <= tolerance else "FAIL"))
    else:
        recs.append(_leq("non-boolean", "non-Boolean lower bound", "sqrt(2) <= C", math.sqrt(2), C, tolerance))
    recs.append(_leq("at-least-one", "general lower bound", "1 <= C", 1.0, C, tolerance))

    spec = ring.spec
    if ring.is_field:
        q = n
        recs.append(_leq("weil", "Weil bound", "C <= 2/sqrt(1-1/q)", C, weil_upper_bound(q), tolerance))
        if q > 3:
            recs.append(_leq("kloosterman-lower", "Kloosterman lower bound",
                             "(2q^3-3q^2-3q-1)/((q-1)(q^2-q-1)) <= C^2",
                             kloosterman_lower_bound_sq(q), C * C, tolerance))
    if isinstance(spec, Matrix):
        k, qf = spec.k, spec.base.q
        recs.append(_leq("matrix-size", "explicit matrix bounds", "n <= sqrt(2 log2 C) + 2",
                         k, math.sqrt(2 * math.log2(C)) + 2, tolerance))
        if k == 2:
            recs.append(_leq("matrix-2x2", "2x2 matrix bound",
                             "(q-1+1/q)/sqrt((1-1/q)(1-1/q^2)) <= C",
                             (qf - 1 + 1 / qf) / math.sqrt(phi(2, qf)), C, tolerance))
        if k >= 3:
            recs.append(_leq("matrix-large", "explicit matrix bounds", "|F|^(n(n-2)/2) / 2 <= C",
                             0.5 * qf ** (k * (k - 2) / 2), C, tolerance))
    if deep and isinstance(spec, Product) and len(spec.factors) >= 2:
        first = spec.factors[0]
        rest = spec.factors[1] if len(spec.factors) == 2 else Product(spec.factors[1:])
        predicted = product_formula(ks_number(first), first, ks_number(rest), rest)
        recs.append(BoundRecord("product-formula", "direct-product formula",
                                "C == max(C1 sqrt|R2*|, C2 sqrt|R1*|)", C, predicted,
                                "PASS" if abs(C - predicted) <= tolerance else "FAIL"))
    if deep and len(ring.radical()) > 1:
        pb = pullback_bound(ring, tolerance)
        recs.append(_leq("pullback", "pullback lemma", "C_{R/J} sqrt|J| <= C_R", pb.lhs, C, tolerance))
    return BoundLedger(ring.name, C, recs)


@dataclass
class TrendRow:
    q: int
    C: float
    lower: float
    upper: float

    @property
    def bracketed(self) -> bool:
        return self.lower - 1e-9 <= self.C <= self.upper + 1e-9


def field_trend_scan(q_list, jobs: int = 1) -> list[TrendRow]:
    """C of GF(q) for each q, with the proven bracket around it.

    The lower end is sqrt of the Kloosterman bound (q > 3) or the Plancherel
    bound otherwise; the upper end is the Weil bound.
    """
    rows = []
    for q in q_list:
        C = kloosterman_salem(Galois.of_order(q), jobs=jobs).C
        if q > 3:
            lower = math.sqrt(kloosterman_lower_bound_sq(q))
        else:
            lower = math.sqrt(1 - (q - 1) / q**2)
        rows.append(TrendRow(q, C, lower, weil_upper_bound(q)))
    return rows


def is_boolean(ring) -> bool:
    """Boolean rings are exactly the finite rings with a single unit."""
    return len(units(ring)) == 1


__all__ = [
    "Hyperbola",
    "hyperbola",
    "kloosterman_sum",
    "fourier_coefficient",
    "coefficient_table",
    "KSReport",
    "kloosterman_salem",
    "ks_number",
    "product_formula",
    "PullbackResult",
    "pullback_bound",
    "MatrixCoefficient",
    "matrix_degenerate_coefficient",
    "BoundRecord",
    "BoundLedger",
    "bound_ledger",
    "kloosterman_lower_bound_sq",
    "weil_upper_bound",
    "TrendRow",
    "field_trend_scan",
    "is_boolean",
]

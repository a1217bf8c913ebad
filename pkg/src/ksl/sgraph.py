"""S-graphs on R^d and their Fourier-derived spectra.

Vertices of R^d are encoded mixed radix with the first coordinate most
significant, matching the element indexing of the ring.  Two vertices are
adjacent when their difference lies in the symmetric connection set S, so the
adjacency operator is ``(A f)(v) = sum_{s in S} f(v + s)`` and the character
indexed by m is an eigenvector with eigenvalue ``sum_{s in S} chi_m(-s)``.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ksl.charsums import coefficient_table, hyperbola, ks_number
from ksl.errors import ExtremalRingError, GuardError
from ksl.exact import chromatic_number, independence_number
from ksl.extremal import PairSpace, is_extremal
from ksl.rings import FiniteRing, as_ring, principal_left_ideals, roots_of_unity, units

VERTEX_GUARD = 1 << 20
EDGE_GUARD = 1 << 24
EXACT_LIMIT = 64


@dataclass(frozen=True, eq=False)
class SGraph:
    ring: FiniteRing
    dim: int
    connection: np.ndarray
    kind: str = "custom"

    @property
    def vertex_count(self) -> int:
        return self.ring.size**self.dim

    @property
    def degree(self) -> int:
        return len(self.connection)

    @property
    def has_loops(self) -> bool:
        return bool(np.any(self.connection == 0))

    def split(self, v) -> list[np.ndarray]:
        v = np.asarray(v, dtype=np.int64)
        n = self.ring.size
        return [(v // n ** (self.dim - 1 - i)) % n for i in range(self.dim)]

    def join(self, coords) -> np.ndarray:
        n = self.ring.size
        total = np.zeros(np.shape(coords[0]), dtype=np.int64)
        for c in coords:
            total = total * n + np.asarray(c, dtype=np.int64)
        return total

    def add(self, v, w):
        return self.join([self.ring.add(a, b) for a, b in zip(self.split(v), self.split(w))])

    def neg(self, v):
        return self.join([self.ring.neg(a) for a in self.split(v)])

    def phase(self, m, v):
        total = 0
        for a, b in zip(self.split(m), self.split(v)):
            total = total + self.ring.phase(a, b)
        return np.asarray(total) % self.ring.exponent

    def neighbors(self, v: int) -> np.ndarray:
        return self.add(v, self.connection)

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        if self.vertex_count * max(self.degree, 1) > EDGE_GUARD:
            raise GuardError(f"{self.vertex_count} x {self.degree} neighbour table exceeds {EDGE_GUARD}")
        verts = np.arange(self.vertex_count, dtype=np.int64)
        return self.add(verts[:, None], self.connection[None, :])

    def edges(self) -> np.ndarray:
        """Undirected edges (u, v), u <= v, each once, sorted."""
        nt = self.neighbor_table
        u = np.repeat(np.arange(self.vertex_count), self.degree)
        v = nt.reshape(-1)
        keep = u <= v
        pairs = np.unique(np.stack([u[keep], v[keep]], axis=1), axis=0)
        return pairs

    def adjacency_matrix(self) -> np.ndarray:
        if self.vertex_count > 4096:
            raise GuardError("dense adjacency limited to 4096 vertices")
        A = np.zeros((self.vertex_count, self.vertex_count), dtype=np.int64)
        nt = self.neighbor_table
        rows = np.repeat(np.arange(self.vertex_count), self.degree)
        A[rows, nt.reshape(-1)] = 1
        return A

    def bitmasks(self) -> list[int]:
        nt = self.neighbor_table
        return [sum(1 << int(w) for w in set(row.tolist())) for row in nt]


def _encode_set(ring: FiniteRing, d: int, S) -> np.ndarray:
    n = ring.size
    out = []
    for s in S:
        if isinstance(s, (int, np.integer)):
            out.append(int(s))
        else:
            coords = list(s)
            if len(coords) != d:
                raise ValueError(f"point {s!r} does not have {d} coordinates")
            code = 0
            for c in coords:
                code = code * n + int(c)
            out.append(code)
    return np.unique(np.asarray(out, dtype=np.int64))


def build_sgraph(ring, d: int, S, kind: str = "custom", guard: int = VERTEX_GUARD) -> SGraph:
    """S-graph on R^d; S is a collection of vertex codes or coordinate tuples."""
    ring = as_ring(ring)
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if ring.size**d > guard:
        raise GuardError(f"{ring.name}^{d} has {ring.size ** d} vertices, guard is {guard}")
    conn = _encode_set(ring, d, S)
    g = SGraph(ring, d, conn, kind)
    if conn.size and (conn.min() < 0 or conn.max() >= g.vertex_count):
        raise ValueError("connection set point outside R^d")
    if not np.array_equal(np.sort(g.neg(conn)), conn):
        raise ValueError("connection set is not symmetric under negation")
    return g


def hyperbola_graph(ring, guard: int = VERTEX_GUARD) -> SGraph:
    ring = as_ring(ring)
    h = hyperbola(ring)
    return build_sgraph(ring, 2, zip(h.units.tolist(), h.inverses.tolist()), "hyperbola", guard)


def sphere_set(ring, d: int, t: int) -> list[tuple[int, ...]]:
    """Points of R^d with x_1^2 + ... + x_d^2 = t, for a unit t."""
    ring = as_ring(ring)
    if int(t) not in units(ring):
        raise ValueError(f"radius {t} is not a unit of {ring.name}")
    grids = np.meshgrid(*([ring.elements] * d), indexing="ij")
    coords = [g.reshape(-1) for g in grids]
    total = np.zeros_like(coords[0])
    for c in coords:
        total = ring.add(total, ring.mul(c, c))
    hit = total == t
    return [tuple(int(c[i]) for c in coords) for i in np.flatnonzero(hit)]


# -- spectrum -------------------------------------------------------------------


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray = field(repr=False)
    degree: int
    lambda2: float
    second_largest: float
    spectral_gap: float
    components: int
    connected: bool
    bipartite: bool
    epsilon: float
    ramanujan: bool
    max_imag: float

    def multiset(self, decimals: int = 8) -> list[tuple[float, int]]:
        vals, counts = np.unique(np.round(self.eigenvalues, decimals) + 0.0, return_counts=True)
        return [(float(v), int(c)) for v, c in zip(vals[::-1], counts[::-1])]


def fourier_eigenvalues(graph: SGraph) -> np.ndarray:
    """``sum_{s in S} chi_m(-s)`` for every m in R^d, indexed like the vertices."""
    ring, d = graph.ring, graph.dim
    roots = roots_of_unity(ring.exponent)
    negs = graph.split(graph.neg(graph.connection))
    duals = ring.elements[:, None]
    mats = [roots[ring.phase(duals, c[None, :])] for c in negs]
    if d == 1:
        return mats[0].sum(axis=1)
    T = mats[0]
    for M in mats[1:-1]:
        T = (T[:, None, :] * M[None, :, :]).reshape(-1, graph.degree)
    return (T @ mats[-1].T).reshape(-1)


def spectrum(graph: SGraph, tolerance: float = 1e-8) -> SpectralReport:
    lam = fourier_eigenvalues(graph)
    d = graph.degree
    tol = tolerance * max(d, 1)
    real = lam.real
    comps = int(np.sum(np.abs(real - d) < tol))
    negs = int(np.sum(np.abs(real + d) < tol))
    nontrivial = np.abs(lam[1:]) if lam.size > 1 else np.zeros(1)
    lambda2 = float(nontrivial.max())
    ordered = np.sort(real)[::-1]
    second = float(ordered[1]) if ordered.size > 1 else float(ordered[0])
    connected = comps == 1
    bipartite = comps > 0 and negs == comps
    gap = d - lambda2
    return SpectralReport(
        eigenvalues=real,
        degree=d,
        lambda2=lambda2,
        second_largest=second,
        spectral_gap=gap,
        components=comps,
        connected=connected,
        bipartite=bipartite,
        epsilon=gap / (2 * d) if d else 0.0,
        ramanujan=bool(connected and not bipartite and lambda2 <= 2 * math.sqrt(max(d - 1, 0)) + tol),
        max_imag=float(np.abs(lam.imag).max()),
    )


def eigen_relation_residual(graph: SGraph, duals=None) -> float:
    """max_m || A chi_m - lambda_m chi_m ||_inf, with A applied through the neighbour table."""
    lam = fourier_eigenvalues(graph)
    roots = roots_of_unity(graph.ring.exponent)
    verts = np.arange(graph.vertex_count, dtype=np.int64)
    nt = graph.neighbor_table
    duals = verts if duals is None else np.asarray(duals, dtype=np.int64)
    worst = 0.0
    for m in duals:
        chi = roots[graph.phase(m, verts)]
        Achi = chi[nt].sum(axis=1)
        worst = max(worst, float(np.abs(Achi - lam[m] * chi).max()))
    return worst


@dataclass
class ConnectivityReport:
    components: int
    connected: bool
    bipartite: bool
    spectral_components: int
    spectral_bipartite: bool
    agree: bool


def traversal_components(graph: SGraph) -> tuple[int, bool]:
    """Component count and whether every component is bipartite, from the edges."""
    n = graph.vertex_count
    nt = graph.neighbor_table
    rows = np.repeat(np.arange(n), graph.degree)
    cols = nt.reshape(-1)
    data = np.ones(rows.size, dtype=np.int8)
    A = csr_matrix((data, (rows, cols)), shape=(n, n))
    k, _ = connected_components(A, directed=False)
    # A component is bipartite iff it splits into two in the bipartite double cover.
    cover = csr_matrix(
        (np.ones(2 * rows.size, dtype=np.int8), (np.concatenate([rows, rows + n]), np.concatenate([cols + n, cols]))),
        shape=(2 * n, 2 * n),
    )
    k2, _ = connected_components(cover, directed=False)
    return int(k), bool(k2 == 2 * k)


def connectivity_report(graph: SGraph, report: SpectralReport | None = None) -> ConnectivityReport:
    report = report or spectrum(graph)
    if graph.vertex_count * max(graph.degree, 1) > EDGE_GUARD:
        return ConnectivityReport(report.components, report.connected, report.bipartite,
                                  report.components, report.bipartite, True)
    comps, bip = traversal_components(graph)
    return ConnectivityReport(
        components=comps,
        connected=comps == 1,
        bipartite=bip,
        spectral_components=report.components,
        spectral_bipartite=report.bipartite,
        agree=comps == report.components and bip == report.bipartite,
    )


# -- hyperbola-graph quantities -------------------------------------------------


def _require_hyperbola(graph: SGraph):
    if graph.kind != "hyperbola":
        raise ValueError("this quantity is defined for hyperbola graphs")


@dataclass
class GapResult:
    value: float
    extremal: bool
    from_spectrum: float


def spectral_gap(graph: SGraph, C: float | None = None) -> GapResult:
    """|R*| - C sqrt|R*| for a non-extremal ring; 0 with ``extremal`` set otherwise."""
    _require_hyperbola(graph)
    report = spectrum(graph)
    if is_extremal(graph.ring).extremal:
        return GapResult(0.0, True, report.spectral_gap)
    C = ks_number(graph.ring) if C is None else C
    d = graph.degree
    return GapResult(d - C * math.sqrt(d), False, report.spectral_gap)


@dataclass
class WalkRow:
    t: int
    deviation: float
    bound: float

    @property
    def ok(self) -> bool:
        return self.deviation <= self.bound + 1e-12


def random_walk_check(graph: SGraph, t_max: int, C: float | None = None, starts=None) -> list[WalkRow]:
    """Exact t-step distributions from each start against (C / sqrt|R*|)^t.

    For a general S-graph the contraction factor is lambda2 / |S|.
    """
    if graph.kind == "hyperbola":
        if is_extremal(graph.ring).extremal:
            raise ExtremalRingError(f"{graph.ring.name} is extremal; the walk need not mix")
        rate = (ks_number(graph.ring) if C is None else C) / math.sqrt(graph.degree)
    else:
        rep = spectrum(graph)
        if not rep.connected or rep.bipartite:
            raise ExtremalRingError("walk bound needs a connected non-bipartite graph")
        rate = rep.lambda2 / graph.degree
    n = graph.vertex_count
    starts = np.arange(n) if starts is None else np.asarray(starts, dtype=np.int64)
    nt = graph.neighbor_table
    P = np.zeros((len(starts), n))
    P[np.arange(len(starts)), starts] = 1.0
    rows = []
    for t in range(t_max + 1):
        if t:
            # p_{t}(j) = (1/d) sum_s p_{t-1}(j + s), S symmetric
            P = P[:, nt].sum(axis=2) / graph.degree
        rows.append(WalkRow(t, float(np.abs(P - 1.0 / n).max()), rate**t))
    return rows


@dataclass
class ExpanderReport:
    epsilon: float
    ramanujan: bool
    threshold: float
    C: float


def expander_and_ramanujan(graph: SGraph, C: float | None = None, tolerance: float = 1e-9) -> ExpanderReport:
    _require_hyperbola(graph)
    if is_extremal(graph.ring).extremal:
        raise ExtremalRingError(f"{graph.ring.name} is extremal")
    C = ks_number(graph.ring) if C is None else C
    d = graph.degree
    threshold = 2 * math.sqrt(1 - 1 / d)
    return ExpanderReport(0.5 * (1 - C / math.sqrt(d)), C <= threshold + tolerance, threshold, C)


# -- counting -------------------------------------------------------------------


@dataclass
class CountReport:
    size: int
    n_exact: int
    discrepancy: float
    main_term: float
    residual: float


def count_pairs(ring, E, guard: int = 1 << 13) -> CountReport:
    """n(E) by direct enumeration against D(E) + |E|^2 |R*| / |R|^2.

    ``E`` holds pair codes ``a*|R| + b`` or (a, b) tuples.
    """
    ring = as_ring(ring)
    space = PairSpace(ring)
    pts = _encode_set(ring, 2, E) if len(E) else np.zeros(0, dtype=np.int64)
    if len(pts) > guard:
        raise GuardError(f"|E| = {len(pts)} exceeds the pair-count guard {guard}")
    h = hyperbola(ring)
    on_h = np.zeros(space.size, dtype=bool)
    on_h[space.encode(h.units, h.inverses)] = True
    diffs = space.add(pts[:, None], space.encode(*[ring.neg(c) for c in space.split(pts)])[None, :])
    n_exact = int(on_h[diffs].sum())

    q = ring.size
    roots = roots_of_unity(ring.exponent)
    a, b = space.split(pts)
    duals = ring.elements[:, None]
    E1 = roots[ring.phase(duals, ring.neg(a)[None, :])]
    E2 = roots[ring.phase(duals, ring.neg(b)[None, :])]
    Ehat = E1 @ E2.T  # q^2 * E^(m)
    K = coefficient_table(ring)  # q^2 * H^(m)
    terms = (np.abs(Ehat) ** 2) * K / q**2
    main = len(pts) ** 2 * len(h) / q**2
    D = float(terms.sum().real - terms[0, 0].real)
    return CountReport(len(pts), n_exact, D, main, abs(n_exact - D - main))


@dataclass
class IdealBoundRecord:
    generator: int | None
    label: str
    size: int
    bound: float
    verdict: bool


def ideal_bound_check(ring, C: float | None = None, tolerance: float = 1e-8) -> list[IdealBoundRecord]:
    """|I| <= C |R| / sqrt|R*| for every proper principal left ideal and the radical."""
    ring = as_ring(ring)
    C = ks_number(ring) if C is None else C
    bound = C * ring.size / math.sqrt(len(units(ring)))
    out = []
    for ideal in principal_left_ideals(ring):
        if ideal.proper:
            out.append(IdealBoundRecord(ideal.generator, f"R*{ideal.generator}", ideal.size, bound,
                                        ideal.size <= bound + tolerance))
    J = ring.radical()
    out.append(IdealBoundRecord(None, "J", len(J), bound, len(J) <= bound + tolerance))
    return out


@dataclass
class ColoringReport:
    indep_upper: float
    chrom_lower: float
    exact_indep: int | None
    exact_chrom: int | None
    field_bound: float | None
    consistent: bool


def independence_and_chromatic(graph: SGraph, C: float | None = None, exact_limit: int = EXACT_LIMIT) -> ColoringReport:
    """Bounds from C, plus exact values by branch and bound on small graphs."""
    _require_hyperbola(graph)
    ring = graph.ring
    C = ks_number(ring) if C is None else C
    d = graph.degree
    n = ring.size
    upper = C * n * n / math.sqrt(d)
    lower = math.sqrt(d) / C
    exact_i = exact_c = None
    if graph.vertex_count <= exact_limit:
        masks = graph.bitmasks()
        exact_i = independence_number(masks)
        exact_c = chromatic_number(masks)
    field_bound = math.sqrt(n - 1) / 2.14 if ring.is_field else None
    ok = True
    if exact_i is not None:
        ok &= exact_i <= upper + 1e-9 and exact_c >= lower - 1e-9
    if field_bound is not None:
        ok &= lower >= field_bound - 1e-12
        if exact_c is not None:
            ok &= exact_c >= field_bound
    return ColoringReport(upper, lower, exact_i, exact_c, field_bound, bool(ok))


# -- export -----------------------------------------------------------------------


def format_edge_list(graph: SGraph) -> str:
    buf = io.StringIO()
    buf.write(f"# vertices={graph.vertex_count} degree={graph.degree} ring={graph.ring.name}\n")
    for u, v in graph.edges():
        buf.write(f"{u} {v}\n")
    return buf.getvalue()


def write_edge_list(graph: SGraph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_edge_list(graph))


__all__ = [
    "SGraph",
    "build_sgraph",
    "hyperbola_graph",
    "sphere_set",
    "SpectralReport",
    "fourier_eigenvalues",
    "spectrum",
    "eigen_relation_residual",
    "ConnectivityReport",
    "traversal_components",
    "connectivity_report",
    "GapResult",
    "spectral_gap",
    "WalkRow",
    "random_walk_check",
    "ExpanderReport",
    "expander_and_ramanujan",
    "CountReport",
    "count_pairs",
    "IdealBoundRecord",
    "ideal_bound_check",
    "ColoringReport",
    "independence_and_chromatic",
    "format_edge_list",
    "write_edge_list",
]

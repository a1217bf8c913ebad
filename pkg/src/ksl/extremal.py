"""Exact extremality via additive generation of the shifted hyperbola.

A ring is extremal (C_R = sqrt|R*|) exactly when the points (u - 1, u^-1 - 1)
fail to generate R^2 additively.  Everything here is integer arithmetic; the
floating C value is only ever used as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ksl.errors import GuardError, InvariantError
from ksl.rings import FiniteRing, as_ring, build_ring, roots_of_unity, units
from ksl.charsums import hyperbola, ks_number

PAIR_GUARD = 1 << 24


class PairSpace:
    """R^2 with pairs encoded as ``a * |R| + b``."""

    def __init__(self, ring: FiniteRing):
        self.ring = ring
        self.n = ring.size
        self.size = self.n * self.n

    def encode(self, a, b):
        return np.asarray(a, dtype=np.int64) * self.n + b

    def split(self, v):
        v = np.asarray(v, dtype=np.int64)
        return v // self.n, v % self.n

    def add(self, v, w):
        a1, b1 = self.split(v)
        a2, b2 = self.split(w)
        return self.encode(self.ring.add(a1, a2), self.ring.add(b1, b2))

    def phase(self, mn, v):
        m, n = self.split(mn)
        a, b = self.split(v)
        return (self.ring.phase(m, a) + self.ring.phase(n, b)) % self.ring.exponent


@dataclass(frozen=True, eq=False)
class Closure:
    """Result of a breadth-first additive closure.

    ``parent[v]`` is the vertex v was reached from (-1 for roots and
    unreached vertices); ``via[v]`` the generator position used.
    """

    space: PairSpace
    generators: np.ndarray
    reached: np.ndarray
    parent: np.ndarray
    via: np.ndarray

    @property
    def members(self) -> np.ndarray:
        return np.flatnonzero(self.reached)

    @property
    def order(self) -> int:
        return int(self.reached.sum())

    def path(self, target: int) -> list[int] | None:
        """Generator positions summing (from a root) to ``target``."""
        if not self.reached[target]:
            return None
        steps = []
        v = target
        while self.parent[v] >= 0 or self.via[v] >= 0:
            steps.append(int(self.via[v]))
            if self.parent[v] < 0:
                break
            v = int(self.parent[v])
        return steps[::-1]


def _bfs(space: PairSpace, generators: np.ndarray, roots: np.ndarray, root_via: np.ndarray) -> Closure:
    if space.size > PAIR_GUARD:
        raise GuardError(f"{space.ring.name}: |R|^2 = {space.size} exceeds {PAIR_GUARD}")
    reached = np.zeros(space.size, dtype=bool)
    parent = np.full(space.size, -1, dtype=np.int64)
    via = np.full(space.size, -1, dtype=np.int64)
    roots, first = np.unique(roots, return_index=True)
    order = np.argsort(first)
    roots = roots[order]
    reached[roots] = True
    via[roots] = root_via[first[order]]
    frontier = roots
    g = np.asarray(generators, dtype=np.int64)
    while frontier.size and g.size:
        cand = space.add(frontier[:, None], g[None, :]).reshape(-1)
        src = np.repeat(frontier, g.size)
        gen = np.tile(np.arange(g.size), frontier.size)
        fresh = ~reached[cand]
        cand, src, gen = cand[fresh], src[fresh], gen[fresh]
        cand, first = np.unique(cand, return_index=True)
        keep = np.sort(first)
        cand, src, gen = cand[np.argsort(first)], src[keep], gen[keep]
        reached[cand] = True
        parent[cand] = src
        via[cand] = gen
        frontier = cand
    return Closure(space, g, reached, parent, via)


def additive_closure(ring, points) -> Closure:
    """Subgroup of R^2 generated by ``points`` (pair codes), grown from 0.

    In a finite group the semigroup generated by a set is already the
    subgroup, so closing under addition alone suffices.
    """
    space = PairSpace(as_ring(ring))
    pts = np.asarray(list(points), dtype=np.int64)
    return _bfs(space, pts, np.zeros(1, dtype=np.int64), np.full(1, -1, dtype=np.int64))


def shifted_hyperbola(ring) -> np.ndarray:
    """Pair codes of (u - 1, u^-1 - 1) in unit order."""
    ring = as_ring(ring)
    h = hyperbola(ring)
    minus_one = ring.neg(ring.one)
    space = PairSpace(ring)
    return space.encode(ring.add(h.units, minus_one), ring.add(h.inverses, minus_one))


@dataclass
class GenerationCertificate:
    ring: str
    generators: list[tuple[int, int]]
    closure_order: int
    ambient_order: int
    extremal: bool
    witness: tuple[int, int] | None = None
    witness_phase: int | None = None
    expressions: dict[tuple[int, int], list[int]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "ring": self.ring,
            "closure_order": self.closure_order,
            "ambient_order": self.ambient_order,
            "extremal": self.extremal,
            "witness": list(self.witness) if self.witness else None,
            "expressions": [
                {"target": list(t), "units": us} for t, us in self.expressions.items()
            ],
        }


def annihilator_character(ring, generators: np.ndarray) -> tuple[int, int] | None:
    """First nonzero dual pair (m, n) whose character is trivial on ``generators``.

    The characters of R^2 trivial on a subgroup K are the pullbacks of the
    characters of R^2 / K, so one exists iff K is proper.
    """
    ring = as_ring(ring)
    space = PairSpace(ring)
    ga, gb = space.split(generators)
    duals = ring.elements[:, None]
    N = ring.exponent
    pa = ring.phase(duals, ga[None, :]) if len(ga) else np.zeros((ring.size, 0), dtype=np.int64)
    pb = ring.phase(duals, gb[None, :]) if len(gb) else np.zeros((ring.size, 0), dtype=np.int64)
    want = {}
    for n in range(ring.size):
        want.setdefault(((-pb[n]) % N).tobytes(), []).append(n)
    for m in range(ring.size):
        for n in want.get(pa[m].tobytes(), ()):
            if (m, n) != (0, 0):
                return m, n
    return None


def _constant_phase(ring: FiniteRing, m: int, n: int) -> int | None:
    h = hyperbola(ring)
    ph = (ring.phase(m, h.units) + ring.phase(n, h.inverses)) % ring.exponent
    return int(ph[0]) if np.all(ph == ph[0]) else None


@lru_cache(maxsize=256)
def _certificate(ring: FiniteRing) -> GenerationCertificate:
    space = PairSpace(ring)
    gens = shifted_hyperbola(ring)
    closure = additive_closure(ring, gens)
    extremal = closure.order != space.size
    h = hyperbola(ring)
    a, b = space.split(gens)
    cert = GenerationCertificate(
        ring=ring.name,
        generators=[(int(x), int(y)) for x, y in zip(a, b)],
        closure_order=closure.order,
        ambient_order=space.size,
        extremal=extremal,
    )
    if extremal:
        mn = annihilator_character(ring, gens)
        if mn is None:
            raise InvariantError(f"{ring.name}: proper closure but no annihilating character")
        ph = _constant_phase(ring, *mn)
        if ph is None:
            raise InvariantError(f"{ring.name}: witness {mn} is not constant on the hyperbola")
        cert.witness, cert.witness_phase = mn, ph
    else:
        for g in ring.additive_generators():
            for target in ((g, 0), (0, g)):
                steps = closure.path(int(space.encode(*target)))
                cert.expressions[target] = [int(h.units[s]) for s in steps]
    return cert


def is_extremal(ring) -> GenerationCertificate:
    """Decide extremality exactly and return the supporting certificate.

    Non-extremal rings carry, for each additive generator g of R, unit lists
    whose shifted points sum to (g, 0) and (0, g).  Extremal rings carry a
    nonzero dual pair whose character is constant on the hyperbola.
    """
    return _certificate(as_ring(ring))


def check_certificate(ring, cert: GenerationCertificate) -> bool:
    """Independent validation of a certificate by direct evaluation."""
    ring = as_ring(ring)
    if cert.extremal:
        if cert.witness is None or cert.witness == (0, 0):
            return False
        return _constant_phase(ring, *cert.witness) is not None
    us = units(ring)
    for (A, B), seq in cert.expressions.items():
        if not seq:
            return False
        sa = sb = 0
        for u in seq:
            sa = int(ring.add(sa, ring.add(u, ring.neg(ring.one))))
            sb = int(ring.add(sb, ring.add(us.inverse(u), ring.neg(ring.one))))
        if (sa, sb) != (A, B):
            return False
    return True


def sum_of_units_solver(ring, A: int, B: int, shifted: bool = True) -> list[int] | None:
    """Units u_1..u_n (n >= 1) hitting (A, B), or None if (A, B) is unreachable.

    With ``shifted`` the sums are sum(u_i) - n = A and sum(u_i^-1) - n = B;
    otherwise sum(u_i) = A and sum(u_i^-1) = B.  The search is breadth first
    from the one-term sums, so n is the fewest terms possible.
    """
    ring = as_ring(ring)
    space = PairSpace(ring)
    h = hyperbola(ring)
    gens = shifted_hyperbola(ring) if shifted else space.encode(h.units, h.inverses)
    closure = _bfs(space, gens, gens, np.arange(len(gens)))
    steps = closure.path(int(space.encode(A, B)))
    if steps is None:
        return None
    return [int(h.units[s]) for s in steps]


def verify_unit_sum(ring, us: list[int], A: int, B: int, shifted: bool = True) -> bool:
    ring = as_ring(ring)
    if not us:
        return False
    inv = units(ring)
    sa = sb = 0
    for u in us:
        if u not in inv:
            return False
        sa = int(ring.add(sa, u))
        sb = int(ring.add(sb, inv.inverse(u)))
    if shifted:
        shift = _multiple_of_one(ring, len(us))
        sa = int(ring.add(sa, ring.neg(shift)))
        sb = int(ring.add(sb, ring.neg(shift)))
    return (sa, sb) == (A, B)


def _multiple_of_one(ring: FiniteRing, k: int) -> int:
    acc = 0
    for _ in range(k % _additive_order(ring)):
        acc = int(ring.add(acc, ring.one))
    return acc


def _additive_order(ring: FiniteRing) -> int:
    acc, k = ring.one, 1
    while acc != 0:
        acc = int(ring.add(acc, ring.one))
        k += 1
    return k


@dataclass
class ScanRow:
    ring: str
    extremal: bool
    C: float
    sqrt_units: float
    analytic_agrees: bool


@dataclass
class ScanResult:
    rows: list[ScanRow]
    product_law: list[tuple[str, bool]]
    radical_law: list[tuple[str, bool]]

    @property
    def passed(self) -> bool:
        return (
            all(r.analytic_agrees for r in self.rows)
            and all(ok for _, ok in self.product_law)
            and all(ok for _, ok in self.radical_law)
        )


def extremal_scan(family, tolerance: float = 1e-9) -> ScanResult:
    """Classify each ring exactly and check the product and radical laws.

    Product law: a product is extremal iff some factor is.  Radical law: if
    R/J is extremal then so is R.
    """
    rows, prod_law, rad_law = [], [], []
    for item in family:
        ring = as_ring(item)
        ext = is_extremal(ring).extremal
        C = ks_number(ring)
        root = math.sqrt(len(units(ring)))
        rows.append(ScanRow(ring.name, ext, C, root, ext == (abs(C - root) < tolerance)))
        spec = ring.spec
        if hasattr(spec, "factors") and len(spec.factors) >= 2:
            any_factor = any(is_extremal(build_ring(f)).extremal for f in spec.factors)
            prod_law.append((ring.name, ext == any_factor))
        if len(ring.radical()) > 1:
            quotient_ext = is_extremal(build_ring(ring.quotient_spec())).extremal
            rad_law.append((ring.name, ext or not quotient_ext))
    return ScanResult(rows, prod_law, rad_law)


__all__ = [
    "PairSpace",
    "Closure",
    "additive_closure",
    "shifted_hyperbola",
    "GenerationCertificate",
    "annihilator_character",
    "is_extremal",
    "check_certificate",
    "sum_of_units_solver",
    "verify_unit_sum",
    "ScanRow",
    "ScanResult",
    "extremal_scan",
]

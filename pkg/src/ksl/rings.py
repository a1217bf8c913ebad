"""Exact arithmetic on finite rings with integer-indexed elements.

Every ring element is an integer in ``[0, |R|)``; zero is index 0.  Indexing
is mixed radix over the description tree:

* ``Z/n``: the residue itself.
* ``GF(p^k)``: ``sum c_i p^i`` for the polynomial-basis coefficients ``c_i``.
* ``M_k(GF(q))``: entries in row-major order, the first entry most
  significant.
* products: the first factor most significant.

All arithmetic methods are vectorized over numpy integer arrays (plain ints
work too).  Additive characters are represented by integer phases: for a
dual index ``m`` and element ``x``, ``chi_m(x) = exp(2 pi i phase(m, x) / N)``
where ``N`` is :attr:`FiniteRing.exponent`.  The pairing is the trace pairing
(``m*x`` for ``Z/n``, field trace of ``m*x`` for Galois fields, field trace of
the matrix trace of ``M X`` for matrix rings, summed over product factors).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from ksl.errors import GuardError, RingSpecError
from ksl.ringspec import (
    Galois,
    Matrix,
    Product,
    RingSpec,
    Zmod,
    format_ring_spec,
    parse_ring_spec,
    prime_factors,
    spec_size,
)

DEFAULT_GUARD = 4096


def size_guard(guard: int | None = None) -> int:
    """Resolve the ring size guard: explicit value, then ``KSL_GUARD``, then 4096."""
    if guard is not None:
        return int(guard)
    env = os.environ.get("KSL_GUARD")
    return int(env) if env else DEFAULT_GUARD


def _as_index(a):
    return np.asarray(a, dtype=np.int64)


class FiniteRing:
    """Common interface of the concrete ring classes."""

    spec: RingSpec
    size: int
    exponent: int
    one: int

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def phase(self, m, x):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def decode(self, i: int):
        raise NotImplementedError

    def encode(self, components) -> int:
        raise NotImplementedError

    def additive_generators(self) -> list[int]:
        raise NotImplementedError

    def radical(self) -> np.ndarray:
        """Jacobson radical as a sorted index array (structural)."""
        raise NotImplementedError

    def quotient_spec(self) -> RingSpec:
        """Description of R/J."""
        raise NotImplementedError

    def _inverse_table(self) -> np.ndarray:
        """``inv[a]`` is the two-sided inverse of a, or -1 for non-units."""
        raise NotImplementedError

    @property
    def name(self) -> str:
        return format_ring_spec(self.spec)

    @cached_property
    def elements(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    @cached_property
    def is_field(self) -> bool:
        spec = self.spec
        return isinstance(spec, Galois) or (
            isinstance(spec, Zmod) and prime_factors(spec.n) == [spec.n]
        )

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class ZmodRing(FiniteRing):
    def __init__(self, spec: Zmod):
        self.spec = spec
        self.size = self.exponent = spec.n
        self.one = 1

    def add(self, a, b):
        return (_as_index(a) + b) % self.size

    def neg(self, a):
        return (-_as_index(a)) % self.size

    def mul(self, a, b):
        return (_as_index(a) * b) % self.size

    def phase(self, m, x):
        return (_as_index(m) * x) % self.size

    def decode(self, i):
        return int(i)

    def encode(self, components):
        return int(components) % self.size

    def additive_generators(self):
        return [1]

    def _rad(self) -> int:
        return math.prod(prime_factors(self.size))

    def radical(self):
        return np.arange(0, self.size, self._rad(), dtype=np.int64)

    def quotient_spec(self):
        return Zmod(self._rad())

    def _inverse_table(self):
        n = self.size
        inv = np.full(n, -1, dtype=np.int64)
        for a in range(1, n):
            if math.gcd(a, n) == 1:
                inv[a] = pow(a, -1, n)
        return inv


class GaloisField(FiniteRing):
    """GF(p^k) in the polynomial basis with log/antilog multiplication."""

    def __init__(self, spec: Galois):
        self.spec = spec
        self.p, self.k = spec.p, spec.k
        self.size = spec.q
        self.exponent = spec.p
        self.one = 1
        self._weights = self.p ** np.arange(self.k, dtype=np.int64)
        self.digits = (self.elements[:, None] // self._weights) % self.p
        self._build_log_tables()
        # Tr(a) = a + a^p + ... + a^(p^(k-1)); lands in the prime field.
        trace = np.zeros(self.size, dtype=np.int64)
        nz = self.elements[1:]
        acc = np.zeros(self.size - 1, dtype=np.int64)
        for j in range(self.k):
            power = self._exp[(self._log[nz] * self.p**j) % (self.size - 1)]
            acc = self.add(acc, power)
        trace[1:] = acc
        if np.any(trace >= self.p):
            raise RingSpecError(f"trace map of {self.name} left the prime field")
        self.trace = trace

    def _polymul(self, a: int, b: int) -> int:
        p, k, poly = self.p, self.k, self.spec.poly
        da = [(a // p**i) % p for i in range(k)]
        db = [(b // p**i) % p for i in range(k)]
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i]
            if c:
                for j in range(k + 1):
                    prod[i - k + j] = (prod[i - k + j] - c * poly[j]) % p
        return sum(c * p**i for i, c in enumerate(prod[:k]))

    def _build_log_tables(self):
        q = self.size
        order = q - 1
        for g in range(1, q):
            powers = [1]
            x = g
            while x != 1:
                powers.append(x)
                x = self._polymul(x, g)
            if len(powers) == order:
                break
        else:  # pragma: no cover - a field always has a primitive element
            raise RingSpecError(f"{self.name} has no primitive element")
        self.generator = g
        self._exp = np.array(powers, dtype=np.int64)
        self._log = np.zeros(q, dtype=np.int64)
        self._log[self._exp] = np.arange(order, dtype=np.int64)

    def _encode_digits(self, digits):
        return digits @ self._weights

    def add(self, a, b):
        a, b = _as_index(a), _as_index(b)
        if self.k == 1:
            return (a + b) % self.p
        return self._encode_digits((self.digits[a] + self.digits[b]) % self.p)

    def neg(self, a):
        a = _as_index(a)
        if self.k == 1:
            return (-a) % self.p
        return self._encode_digits((-self.digits[a]) % self.p)

    def mul(self, a, b):
        a, b = np.broadcast_arrays(_as_index(a), _as_index(b))
        out = self._exp[(self._log[a] + self._log[b]) % (self.size - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = _as_index(a)
        return self._exp[(-self._log[a]) % (self.size - 1)]

    def phase(self, m, x):
        return self.trace[self.mul(m, x)]

    def decode(self, i):
        return tuple(int(c) for c in self.digits[int(i)])

    def encode(self, components):
        if isinstance(components, (int, np.integer)):
            return int(components) % self.size
        comps = list(components) + [0] * (self.k - len(components))
        return int(sum((int(c) % self.p) * self.p**i for i, c in enumerate(comps)))

    def additive_generators(self):
        return [int(w) for w in self._weights]

    def radical(self):
        return np.zeros(1, dtype=np.int64)

    def quotient_spec(self):
        return self.spec

    def _inverse_table(self):
        inv = np.full(self.size, -1, dtype=np.int64)
        inv[1:] = self.inv(self.elements[1:])
        return inv


class MatrixRing(FiniteRing):
    """k x k matrices over a Galois field."""

    def __init__(self, spec: Matrix):
        self.spec = spec
        self.k = spec.k
        self.field = build_ring(spec.base, guard=max(spec.base.q, 2))
        q = self.field.size
        self.size = q ** (self.k * self.k)
        self.exponent = self.field.exponent
        self._weights = q ** np.arange(self.k * self.k - 1, -1, -1, dtype=np.int64)
        self.entries = (self.elements[:, None] // self._weights) % q
        self.one = self.encode(np.eye(self.k, dtype=np.int64))

    def _encode_entries(self, entries):
        return entries @ self._weights

    def add(self, a, b):
        F = self.field
        return self._encode_entries(F.add(self.entries[_as_index(a)], self.entries[_as_index(b)]))

    def neg(self, a):
        return self._encode_entries(self.field.neg(self.entries[_as_index(a)]))

    def _product_entries(self, A, B):
        F, k = self.field, self.k
        A, B = np.broadcast_arrays(A, B)
        out = np.zeros(A.shape, dtype=np.int64)
        for i in range(k):
            for j in range(k):
                acc = np.zeros(A.shape[:-1], dtype=np.int64)
                for l in range(k):
                    acc = F.add(acc, F.mul(A[..., i * k + l], B[..., l * k + j]))
                out[..., i * k + j] = acc
        return out

    def mul(self, a, b):
        A = self.entries[_as_index(a)]
        B = self.entries[_as_index(b)]
        return self._encode_entries(self._product_entries(A, B))

    def phase(self, m, x):
        # Tr(M X) = sum_{i,l} M_il X_li, then the field trace.
        F, k = self.field, self.k
        M = self.entries[_as_index(m)]
        X = self.entries[_as_index(x)]
        M, X = np.broadcast_arrays(M, X)
        acc = np.zeros(M.shape[:-1], dtype=np.int64)
        for i in range(k):
            for l in range(k):
                acc = F.add(acc, F.mul(M[..., i * k + l], X[..., l * k + i]))
        return F.trace[acc]

    def decode(self, i):
        flat = [int(e) for e in self.entries[int(i)]]
        return tuple(tuple(flat[r * self.k : (r + 1) * self.k]) for r in range(self.k))

    def encode(self, components):
        flat = np.asarray(components, dtype=np.int64).reshape(-1)
        if flat.size != self.k * self.k:
            raise ValueError(f"expected {self.k * self.k} entries, got {flat.size}")
        return int(flat @ self._weights)

    def additive_generators(self):
        gens = []
        for pos in range(self.k * self.k):
            for g in self.field.additive_generators():
                flat = np.zeros(self.k * self.k, dtype=np.int64)
                flat[pos] = g
                gens.append(int(flat @ self._weights))
        return gens

    def radical(self):
        return np.zeros(1, dtype=np.int64)

    def quotient_spec(self):
        return self.spec

    def _invert(self, flat) -> list[int] | None:
        """Gauss-Jordan inverse over the base field, None when singular."""
        F, k = self.field, self.k
        rows = [[int(flat[r * k + c]) for c in range(k)] + [int(r == c) for c in range(k)] for r in range(k)]
        add = lambda a, b: int(F.add(a, b))
        mul = lambda a, b: int(F.mul(a, b))
        for col in range(k):
            pivot = next((r for r in range(col, k) if rows[r][col]), None)
            if pivot is None:
                return None
            rows[col], rows[pivot] = rows[pivot], rows[col]
            s = int(F.inv(rows[col][col]))
            rows[col] = [mul(s, v) for v in rows[col]]
            for r in range(k):
                if r != col and rows[r][col]:
                    f = int(F.neg(rows[r][col]))
                    rows[r] = [add(v, mul(f, w)) for v, w in zip(rows[r], rows[col])]
        return [v for row in rows for v in row[k:]]

    def _inverse_table(self):
        inv = np.full(self.size, -1, dtype=np.int64)
        if self.k == 2:
            # adjugate / det, vectorized
            F = self.field
            E = self.entries
            a, b, c, d = E[:, 0], E[:, 1], E[:, 2], E[:, 3]
            det = F.add(F.mul(a, d), F.neg(F.mul(b, c)))
            ok = det != 0
            di = F.inv(np.where(ok, det, 1))
            adj = np.stack([d, F.neg(b), F.neg(c), a], axis=1)
            invE = F.mul(adj, di[:, None])
            inv[ok] = self._encode_entries(invE[ok])
            return inv
        for i in range(self.size):
            res = self._invert(self.entries[i])
            if res is not None:
                inv[i] = int(np.asarray(res, dtype=np.int64) @ self._weights)
        return inv


class ProductRing(FiniteRing):
    def __init__(self, spec: Product, guard: int):
        self.spec = spec
        self.factors = [build_ring(f, guard=guard) for f in spec.factors]
        self.sizes = [f.size for f in self.factors]
        self.size = math.prod(self.sizes)
        strides = []
        s = 1
        for n in reversed(self.sizes):
            strides.append(s)
            s *= n
        self.strides = list(reversed(strides))
        self.exponent = math.lcm(*(f.exponent for f in self.factors))
        self.one = self.join([f.one for f in self.factors])

    def split(self, a):
        a = _as_index(a)
        return [(a // st) % n for st, n in zip(self.strides, self.sizes)]

    def join(self, parts):
        total = 0
        for part, st in zip(parts, self.strides):
            total = total + _as_index(part) * st
        return total if isinstance(total, np.ndarray) and total.ndim else int(total)

    def _zip(self, op, a, b):
        return self.join([getattr(f, op)(x, y) for f, x, y in zip(self.factors, self.split(a), self.split(b))])

    def add(self, a, b):
        return self._zip("add", a, b)

    def mul(self, a, b):
        return self._zip("mul", a, b)

    def neg(self, a):
        return self.join([f.neg(x) for f, x in zip(self.factors, self.split(a))])

    def phase(self, m, x):
        N = self.exponent
        total = 0
        for f, mi, xi in zip(self.factors, self.split(m), self.split(x)):
            total = total + f.phase(mi, xi) * (N // f.exponent)
        return np.asarray(total) % N

    def decode(self, i):
        return tuple(f.decode(int(c)) for f, c in zip(self.factors, self.split(int(i))))

    def encode(self, components):
        return int(self.join([f.encode(c) for f, c in zip(self.factors, components)]))

    def _embed(self, pos: int, value):
        return self.join([value if j == pos else 0 for j in range(len(self.factors))])

    def additive_generators(self):
        return [int(self._embed(i, g)) for i, f in enumerate(self.factors) for g in f.additive_generators()]

    def radical(self):
        parts = [f.radical() for f in self.factors]
        grids = np.meshgrid(*parts, indexing="ij")
        return np.sort(self.join([g.reshape(-1) for g in grids]))

    def quotient_spec(self):
        return Product(tuple(f.quotient_spec() for f in self.factors))

    def _inverse_table(self):
        tables = [f._inverse_table() for f in self.factors]
        parts = [t[x] for t, x in zip(tables, self.split(self.elements))]
        ok = np.all([p >= 0 for p in parts], axis=0)
        inv = np.full(self.size, -1, dtype=np.int64)
        inv[ok] = self.join([p[ok] for p in parts])
        return inv


@lru_cache(maxsize=256)
def _build(spec: RingSpec, guard: int) -> FiniteRing:
    if isinstance(spec, Zmod):
        return ZmodRing(spec)
    if isinstance(spec, Galois):
        return GaloisField(spec)
    if isinstance(spec, Matrix):
        return MatrixRing(spec)
    if isinstance(spec, Product):
        return ProductRing(spec, guard)
    raise RingSpecError(f"not a ring description: {spec!r}")


def build_ring(spec: RingSpec, guard: int | None = None) -> FiniteRing:
    """Construct (or fetch from cache) the ring for a description."""
    limit = size_guard(guard)
    n = spec_size(spec)
    if n > limit:
        raise GuardError(f"{format_ring_spec(spec)} has {n} elements, guard is {limit}")
    return _build(spec, limit)


def as_ring(obj, guard: int | None = None) -> FiniteRing:
    """Accept a ring, a description, or a description string."""
    if isinstance(obj, FiniteRing):
        return obj
    if isinstance(obj, str):
        obj = parse_ring_spec(obj)
    return build_ring(obj, guard=guard)


# -- units ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UnitSet:
    """Units of a ring in increasing index order, with aligned inverses."""

    ring: FiniteRing
    units: np.ndarray
    inverses: np.ndarray

    def __len__(self):
        return len(self.units)

    def __contains__(self, x):
        return int(x) in self._lookup

    @cached_property
    def _lookup(self) -> dict[int, int]:
        return {int(u): int(v) for u, v in zip(self.units, self.inverses)}

    def inverse(self, u: int) -> int:
        return self._lookup[int(u)]


@lru_cache(maxsize=256)
def _units_of(ring: FiniteRing) -> UnitSet:
    inv = ring._inverse_table()
    us = np.flatnonzero(inv >= 0).astype(np.int64)
    return UnitSet(ring, us, inv[us])


def units(ring) -> UnitSet:
    """Two-sided units with their inverses, computed structurally per constructor."""
    return _units_of(as_ring(ring))


def brute_force_inverses(ring, chunk: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Exhaustive search for left and right inverses.

    Returns ``(left, right)`` arrays where ``left[a]`` is some b with
    ``b*a == 1`` (or -1) and ``right[a]`` some b with ``a*b == 1``.
    """
    ring = as_ring(ring)
    n = ring.size
    left = np.full(n, -1, dtype=np.int64)
    right = np.full(n, -1, dtype=np.int64)
    allx = ring.elements
    for start in range(0, n, chunk):
        a = allx[start : start + chunk]
        prod_r = ring.mul(a[:, None], allx[None, :])
        prod_l = ring.mul(allx[None, :], a[:, None])
        hit_r = prod_r == ring.one
        hit_l = prod_l == ring.one
        rows_r = hit_r.any(axis=1)
        rows_l = hit_l.any(axis=1)
        right[start : start + len(a)][rows_r] = hit_r[rows_r].argmax(axis=1)
        left[start : start + len(a)][rows_l] = hit_l[rows_l].argmax(axis=1)
    return left, right


def gl_order(k: int, q: int) -> int:
    return math.prod(q**k - q**i for i in range(k))


def unit_count_formula(spec: RingSpec) -> int:
    """|R*| from closed forms: totient, q - 1, |GL_k(q)|, products."""
    if isinstance(spec, Zmod):
        n = spec.n
        for p in prime_factors(n):
            n = n // p * (p - 1)
        return n
    if isinstance(spec, Galois):
        return spec.q - 1
    if isinstance(spec, Matrix):
        return gl_order(spec.k, spec.base.q)
    return math.prod(unit_count_formula(f) for f in spec.factors)


def phi(n: int, q: int) -> float:
    """prod_{j=1..n} (1 - q^-j), the fraction of invertible n x n matrices over F_q."""
    return math.prod(1.0 - q ** (-j) for j in range(1, n + 1))


# -- characters and ideals ------------------------------------------------------


def roots_of_unity(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


def character(ring, m, x):
    """Value of the additive character indexed by ``m`` at ``x``."""
    ring = as_ring(ring)
    return roots_of_unity(ring.exponent)[ring.phase(m, x)]


def jacobson_radical(ring) -> np.ndarray:
    return as_ring(ring).radical()


@dataclass(frozen=True, eq=False)
class Ideal:
    generator: int
    elements: np.ndarray
    proper: bool

    @property
    def size(self) -> int:
        return len(self.elements)


def principal_left_ideals(ring, guard: int | None = None) -> list[Ideal]:
    """The distinct ideals R*a for a in R, in order of first generator.

    R*a is closed under addition already (ra + sa = (r+s)a), so its additive
    closure is the set itself.
    """
    ring = as_ring(ring)
    if ring.size > size_guard(guard):
        raise GuardError(f"{ring.name} exceeds the ideal enumeration guard")
    seen = {}
    allx = ring.elements
    for a in range(ring.size):
        elems = np.unique(ring.mul(allx, a))
        key = elems.tobytes()
        if key not in seen:
            seen[key] = Ideal(a, elems, proper=bool(ring.one not in elems))
    return list(seen.values())

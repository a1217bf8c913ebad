"""Ring descriptions and the text grammar that produces them.

A ring description is a small immutable tree::

    Zmod(n)                  integers modulo n
    Galois(p, k, poly)       F_p[x] / (poly), poly monic irreducible of degree k
    Matrix(k, base)          k x k matrices over a Galois field
    Product(factors)         direct product, factors in order

The text form accepted by :func:`parse_ring_spec` is::

    ring  := atom ("x" atom)*
    atom  := "Z/" INT | "GF(" INT ")" ["{" poly "}"] | "M" INT "(GF(" INT "))"
           | "(" ring ")"
    atom may be followed by "^" INT, meaning that many product copies.
    poly  := comma separated coefficients, constant term first

Whitespace is ignored everywhere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from ksl.errors import RingSpecError

__all__ = [
    "Zmod",
    "Galois",
    "Matrix",
    "Product",
    "RingSpec",
    "parse_ring_spec",
    "format_ring_spec",
    "spec_size",
    "is_prime",
    "prime_power",
    "is_irreducible",
    "least_irreducible",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of ``n`` in increasing order."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k`` or None if q is not a prime power."""
    if q < 2:
        return None
    ps = prime_factors(q)
    if len(ps) != 1:
        return None
    p = ps[0]
    k = round(math.log(q, p))
    for kk in (k - 1, k, k + 1):
        if kk >= 1 and p**kk == q:
            return p, kk
    return None


# -- polynomials over F_p, coefficient tuples with constant term first ---------


def _trim(c: list[int]) -> list[int]:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def poly_mod(a: tuple[int, ...] | list[int], b: tuple[int, ...], p: int) -> list[int]:
    """Remainder of ``a`` divided by the monic polynomial ``b`` over F_p."""
    r = [x % p for x in a]
    db = len(b) - 1
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c:
            for j in range(db + 1):
                r[i - db + j] = (r[i - db + j] - c * b[j]) % p
    return _trim(r[:db] if db > 0 else [0])


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Exhaustive factor search: no monic divisor of degree 1..deg/2."""
    k = len(poly) - 1
    if k < 1 or poly[-1] != 1:
        return False
    if k == 1:
        return True
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            divisor = tuple(low) + (1,)
            if poly_mod(poly, divisor, p) == [0]:
                return False
    return True


@lru_cache(maxsize=None)
def least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree k with the smallest value of sum c_i p^i."""
    for code in range(p**k):
        low = tuple((code // p**i) % p for i in range(k))
        poly = low + (1,)
        if is_irreducible(poly, p):
            return poly
    raise RingSpecError(f"no irreducible polynomial of degree {k} over F_{p}")


# -- the description tree -------------------------------------------------------


@dataclass(frozen=True)
class Zmod:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise RingSpecError(f"Z/n needs n >= 2, got {self.n!r}")


@dataclass(frozen=True)
class Galois:
    p: int
    k: int = 1
    poly: tuple[int, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise RingSpecError(f"characteristic {self.p} is not prime")
        if self.k < 1:
            raise RingSpecError(f"extension degree must be >= 1, got {self.k}")
        if self.poly is None:
            object.__setattr__(self, "poly", least_irreducible(self.p, self.k))
        else:
            poly = tuple(int(c) % self.p for c in self.poly)
            if len(poly) != self.k + 1 or poly[-1] != 1:
                raise RingSpecError(
                    f"modulus {list(self.poly)} is not monic of degree {self.k}"
                )
            if not is_irreducible(poly, self.p):
                raise RingSpecError(f"modulus {list(self.poly)} is reducible over F_{self.p}")
            object.__setattr__(self, "poly", poly)

    @property
    def q(self) -> int:
        return self.p**self.k

    @classmethod
    def of_order(cls, q: int, poly=None) -> "Galois":
        pk = prime_power(q)
        if pk is None:
            raise RingSpecError(f"GF({q}): {q} is not a prime power")
        return cls(pk[0], pk[1], None if poly is None else tuple(poly))


@dataclass(frozen=True)
class Matrix:
    k: int
    base: Galois

    def __post_init__(self):
        if self.k < 1:
            raise RingSpecError(f"matrix size must be >= 1, got {self.k}")
        if not isinstance(self.base, Galois):
            raise RingSpecError("matrix rings are only supported over Galois fields")


@dataclass(frozen=True)
class Product:
    factors: tuple

    def __post_init__(self):
        factors = tuple(self.factors)
        if not factors:
            raise RingSpecError("a product needs at least one factor")
        for f in factors:
            if not isinstance(f, (Zmod, Galois, Matrix, Product)):
                raise RingSpecError(f"not a ring description: {f!r}")
        object.__setattr__(self, "factors", factors)


RingSpec = Union[Zmod, Galois, Matrix, Product]


def spec_size(spec: RingSpec) -> int:
    if isinstance(spec, Zmod):
        return spec.n
    if isinstance(spec, Galois):
        return spec.q
    if isinstance(spec, Matrix):
        return spec.base.q ** (spec.k * spec.k)
    return math.prod(spec_size(f) for f in spec.factors)


def format_ring_spec(spec: RingSpec) -> str:
    """Canonical text form; parses back to an equal description."""
    if isinstance(spec, Zmod):
        return f"Z/{spec.n}"
    if isinstance(spec, Galois):
        text = f"GF({spec.q})"
        if spec.poly != least_irreducible(spec.p, spec.k):
            text += "{" + ",".join(map(str, spec.poly)) + "}"
        return text
    if isinstance(spec, Matrix):
        return f"M{spec.k}({format_ring_spec(spec.base)})"
    parts = []
    for f in spec.factors:
        s = format_ring_spec(f)
        parts.append(f"({s})" if isinstance(f, Product) else s)
    return " x ".join(parts)


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str):
        raise RingSpecError(message, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, token: str) -> bool:
        self.skip()
        return self.text.startswith(token, self.pos)

    def expect(self, token: str):
        if not self.peek(token):
            found = self.text[self.pos : self.pos + len(token)] or "end of input"
            self.fail(f"expected {token!r}, found {found!r}")
        self.pos += len(token)

    def integer(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.fail("expected an integer")
        return int(self.text[start : self.pos])

    def ring(self) -> list[RingSpec]:
        factors = self.atom()
        while self.peek("x"):
            self.pos += 1
            factors += self.atom()
        return factors

    def galois(self) -> Galois:
        start = self.pos
        self.expect("GF(")
        q = self.integer()
        self.expect(")")
        poly = None
        if self.peek("{"):
            self.pos += 1
            poly = [self.integer()]
            while self.peek(","):
                self.pos += 1
                poly.append(self.integer())
            self.expect("}")
        try:
            return Galois.of_order(q, poly)
        except RingSpecError as exc:
            raise RingSpecError(str(exc), start) from None

    def atom(self) -> list[RingSpec]:
        self.skip()
        start = self.pos
        if self.peek("Z/"):
            self.pos += 2
            n = self.integer()
            try:
                node = Zmod(n)
            except RingSpecError as exc:
                raise RingSpecError(str(exc), start) from None
        elif self.peek("GF("):
            node = self.galois()
        elif self.peek("M"):
            self.pos += 1
            k = self.integer()
            self.expect("(")
            base = self.galois()
            self.expect(")")
            try:
                node = Matrix(k, base)
            except RingSpecError as exc:
                raise RingSpecError(str(exc), start) from None
        elif self.peek("("):
            self.pos += 1
            inner = self.ring()
            self.expect(")")
            node = inner[0] if len(inner) == 1 else Product(tuple(inner))
        else:
            self.fail("expected 'Z/', 'GF(', 'M' or '('")
        if self.peek("^"):
            self.pos += 1
            e = self.integer()
            if e < 1:
                self.fail("exponent must be >= 1")
            return [node] * e
        return [node]


def parse_ring_spec(text: str) -> RingSpec:
    """Parse the text grammar into a validated description.

    >>> parse_ring_spec("Z/8")
    Zmod(n=8)
    >>> format_ring_spec(parse_ring_spec("GF(4) x Z/3"))
    'GF(4) x Z/3'
    """
    parser = _Parser(text)
    factors = parser.ring()
    parser.skip()
    if parser.pos != len(text):
        parser.fail(f"unexpected trailing text {text[parser.pos:]!r}")
    return factors[0] if len(factors) == 1 else Product(tuple(factors))

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ksl.errors import GuardError
from ksl.rings import (
    as_ring,
    brute_force_inverses,
    build_ring,
    character,
    phi,
    principal_left_ideals,
    unit_count_formula,
    units,
)

RINGS = ["Z/6", "Z/8", "Z/9", "GF(4)", "GF(8)", "GF(9)", "M2(GF(2))", "M2(GF(3))", "Z/3 x GF(4)", "Z/4 x Z/2"]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(RINGS), st.data())
def test_ring_axioms(text, data):
    R = as_ring(text)
    idx = st.integers(0, R.size - 1)
    a, b, c = data.draw(idx), data.draw(idx), data.draw(idx)
    assert R.add(a, b) == R.add(b, a)
    assert R.add(R.add(a, b), c) == R.add(a, R.add(b, c))
    assert R.add(a, R.neg(a)) == 0
    assert R.mul(R.mul(a, b), c) == R.mul(a, R.mul(b, c))
    assert R.mul(a, R.add(b, c)) == R.add(R.mul(a, b), R.mul(a, c))
    assert R.mul(R.add(a, b), c) == R.add(R.mul(a, c), R.mul(b, c))
    assert R.mul(R.one, a) == a == R.mul(a, R.one)


def test_gf4_multiplication():
    R = as_ring("GF(4)")
    u = 2  # the class of x
    assert R.mul(u, u) == 3  # x^2 = x + 1
    assert R.mul(u, 3) == 1


def test_matrix_is_noncommutative():
    R = as_ring("M2(GF(2))")
    x = R.elements
    assert np.any(R.mul(x[:, None], x[None, :]) != R.mul(x[None, :], x[:, None]))


@pytest.mark.parametrize("text", RINGS + ["GF(2) x GF(2) x GF(2)", "Z/12", "M3(GF(2))"])
def test_unit_counts_agree(text):
    R = as_ring(text)
    left, right = brute_force_inverses(R)
    us = units(R)
    assert len(us) == unit_count_formula(R.spec)
    # a left inverse forces a two-sided one in a finite ring
    assert np.array_equal(left >= 0, right >= 0)
    assert np.array_equal(np.flatnonzero(left >= 0), us.units)
    assert np.all(R.mul(us.units, us.inverses) == R.one)
    assert np.all(R.mul(us.inverses, us.units) == R.one)
    J = R.radical()
    quotient = build_ring(R.quotient_spec())
    assert len(us) == len(J) * len(units(quotient))


@pytest.mark.parametrize("text, count", [("M2(GF(3))", 48), ("GF(2) x GF(2) x GF(2)", 1), ("Z/12", 4), ("M2(GF(2))", 6)])
def test_unit_count_values(text, count):
    assert len(units(text)) == count


@pytest.mark.parametrize("text", ["Z/8", "Z/9", "Z/12", "Z/4 x GF(3)"])
def test_radical_shifts_units(text):
    R = as_ring(text)
    us = units(R)
    for a in R.radical():
        for r in R.elements:
            assert R.add(R.one, R.mul(r, a)) in us


def test_phi_lower_bound():
    assert min(phi(n, q) for n in range(1, 21) for q in (2, 3, 4, 5)) >= 0.25
    assert phi(2, 2) == pytest.approx(6 / 16)


@pytest.mark.parametrize("text", RINGS)
def test_character_orthogonality(text):
    R = as_ring(text)
    table = character(R, R.elements[:, None], R.elements[None, :])
    sums = table.sum(axis=1)
    assert abs(sums[0] - R.size) < 1e-9
    assert np.all(np.abs(sums[1:]) < 1e-9)
    # distinct duals give distinct characters
    phases = R.phase(R.elements[:, None], R.elements[None, :])
    assert len({row.tobytes() for row in phases}) == R.size


def test_boolean_is_idempotent():
    R = as_ring("GF(2) x GF(2) x GF(2) x GF(2)")
    assert np.all(R.mul(R.elements, R.elements) == R.elements)
    assert len(units(R)) == 1


def test_principal_ideals_z8():
    sizes = sorted(i.size for i in principal_left_ideals("Z/8"))
    assert sizes == [1, 2, 4, 8]


def test_guard(monkeypatch):
    with pytest.raises(GuardError):
        as_ring("Z/5000")
    monkeypatch.setenv("KSL_GUARD", "10000")
    assert as_ring("Z/5000").size == 5000


def test_matrix_inverse_general():
    R = as_ring("M3(GF(2))")
    assert len(units(R)) == math.prod(8 - 2**i for i in range(3))

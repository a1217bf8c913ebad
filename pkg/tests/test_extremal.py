import math

import numpy as np
import pytest

from ksl.charsums import ks_number
from ksl.extremal import (
    PairSpace,
    additive_closure,
    check_certificate,
    extremal_scan,
    is_extremal,
    shifted_hyperbola,
    sum_of_units_solver,
    verify_unit_sum,
)
from ksl.rings import as_ring, units

EXTREMAL = ["GF(2)", "GF(3)", "GF(4)", "Z/4", "Z/8", "Z/9", "Z/15", "Z/3 x GF(2)", "M2(GF(2))", "GF(3) x GF(5)"]
NOT_EXTREMAL = ["GF(5)", "GF(7)", "GF(8)", "GF(9)", "GF(16)", "M2(GF(3))", "GF(5) x GF(7)"]


@pytest.mark.parametrize("text", EXTREMAL + NOT_EXTREMAL)
def test_classification_and_certificate(text):
    cert = is_extremal(text)
    assert cert.extremal == (text in EXTREMAL)
    assert check_certificate(text, cert)
    root = math.sqrt(len(units(text)))
    assert (abs(ks_number(text) - root) < 1e-9) == cert.extremal


def test_closure_z8():
    R = as_ring("Z/8")
    closure = additive_closure(R, shifted_hyperbola(R))
    # the subgroup generated by (u-1, u^-1-1) for odd u is {(2a, 2a)}
    assert sorted(closure.members.tolist()) == [0, 18, 36, 54]


def test_witness_is_a_constant_character():
    cert = is_extremal("Z/8")
    assert cert.witness is not None and cert.witness != (0, 0)
    R = as_ring("Z/8")
    space = PairSpace(R)
    gens = shifted_hyperbola(R)
    assert np.all(space.phase(space.encode(*cert.witness), gens) == 0)


def test_generator_expressions():
    cert = is_extremal("GF(7)")
    assert set(cert.expressions) == {(1, 0), (0, 1)}
    assert check_certificate("GF(7)", cert)
    bad = is_extremal("GF(7)")
    bad_copy = type(bad)(**{**bad.__dict__, "expressions": {(1, 0): [1]}})
    assert not check_certificate("GF(7)", bad_copy)


def test_sum_of_units():
    us = sum_of_units_solver("GF(5)", 0, 0, shifted=False)
    assert us == [1, 4]
    assert verify_unit_sum("GF(5)", us, 0, 0, shifted=False)
    assert sum_of_units_solver("Z/8", 1, 0) is None
    for A, B in [(0, 0), (3, 2), (6, 6)]:
        found = sum_of_units_solver("GF(7)", A, B)
        assert found and verify_unit_sum("GF(7)", found, A, B)


def test_scan_laws():
    scan = extremal_scan(["Z/8", "Z/9", "Z/12", "GF(5) x GF(2)", "GF(5) x GF(7)", "M2(GF(3))", "Z/25"])
    assert scan.passed
    assert dict(scan.product_law)["GF(5) x GF(2)"]

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicereg.errors import QuaternionZeroDivision, ZeroArgument
from slicereg.quat import (
    I,
    J,
    K,
    ONE,
    UNIT_I,
    UNIT_J,
    Quaternion,
    UnitImaginary,
    embed_slice,
    parse_unit,
    polar_form,
    qinv,
    qmul,
    qmul_array,
    unit_imaginary,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)
nonzero = quats.filter(lambda q: q.norm() > 1e-3)


def close(a, b, tol=1e-12):
    return (a - b).norm() <= tol


def test_hamilton_table():
    assert qmul(I, J) == K
    assert qmul(J, I) == -K
    assert qmul(J, K) == I
    assert qmul(K, I) == J
    for u in (I, J, K):
        assert qmul(u, u) == Quaternion(-1.0)


def test_noncommutative_exactly():
    assert qmul(I, J) != qmul(J, I)


@given(quats)
def test_identity_left_and_right(q):
    assert qmul(ONE, q) == q
    assert qmul(q, ONE) == q


@given(quats, quats, quats)
def test_associative(a, b, c):
    lhs = qmul(qmul(a, b), c)
    rhs = qmul(a, qmul(b, c))
    assert close(lhs, rhs, 1e-12 * max(1.0, a.norm() * b.norm() * c.norm()))


@given(quats, quats)
def test_norm_multiplicative(a, b):
    assert math.isclose(qmul(a, b).norm(), a.norm() * b.norm(), rel_tol=1e-12, abs_tol=1e-12)


@given(quats)
def test_conj_times_q_is_norm_squared(q):
    p = qmul(q.conj(), q)
    assert math.isclose(p.w, q.norm2(), rel_tol=1e-12, abs_tol=1e-12)
    assert p.vec_norm() <= 1e-12 * max(1.0, q.norm2())


def test_qinv_examples():
    assert qinv(Quaternion(2.0)) == Quaternion(0.5)
    assert qinv(I) == -I
    with pytest.raises(QuaternionZeroDivision):
        qinv(Quaternion())
    with pytest.raises(ZeroDivisionError):
        qinv(Quaternion(1e-13))


@given(nonzero)
def test_qinv_product_is_one(a):
    assert close(qmul(a, qinv(a)), ONE, 1e-12)
    assert close(qmul(qinv(a), a), ONE, 1e-12)


def test_unit_imaginary_examples():
    u, deg = unit_imaginary(Quaternion(1, 2, 0, 0))
    assert u == UNIT_I and not deg
    u, deg = unit_imaginary(Quaternion(0, 1, 1, 0))
    assert np.allclose(u.to_array(), [2**-0.5, 2**-0.5, 0], atol=1e-15)
    u, deg = unit_imaginary(Quaternion(5.0))
    assert u == UNIT_I and deg


@given(st.floats(-5, 5), st.floats(0.01, 5), st.sampled_from([UNIT_I, UNIT_J, UnitImaginary.normalized(1, 1, 1)]))
def test_embed_then_unit_recovers_unit(x, y, unit):
    u, deg = unit_imaginary(embed_slice(x, y, unit))
    assert not deg
    assert np.allclose(u.to_array(), unit.to_array(), atol=1e-12)


def test_embed_slice_examples():
    assert embed_slice(1, 0, UNIT_I) == Quaternion(1.0)
    assert embed_slice(0, 1, UNIT_J) == J


def test_polar_examples():
    p = polar_form(I)
    assert p.r == 1.0 and math.isclose(p.a, math.pi / 2) and p.I == UNIT_I and not p.degenerate
    p = polar_form(Quaternion(-3.0))
    assert p.r == 3.0 and p.a == math.pi and p.degenerate and p.I == UNIT_I
    p = polar_form(Quaternion(2.0))
    assert p.a == 0.0 and p.degenerate
    with pytest.raises(ZeroArgument):
        polar_form(Quaternion())


@given(nonzero)
def test_polar_round_trip(q):
    p = polar_form(q)
    assert 0.0 <= p.a <= math.pi
    assert (p.to_quaternion() - q).norm() <= 1e-10 * q.norm()


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_unit_squares_to_minus_one(x, y, z):
    if x * x + y * y + z * z < 1e-6:
        return
    u = UnitImaginary.normalized(x, y, z).quaternion
    assert close(qmul(u, u), Quaternion(-1.0), 1e-12)


def test_unit_imaginary_rejects_non_unit():
    with pytest.raises(ValueError):
        UnitImaginary(1.0, 1.0, 0.0)


@pytest.mark.parametrize("text,expected", [("i", UNIT_I), ("J", UNIT_J), ("-i", -UNIT_I), ("0,2,0", UNIT_J)])
def test_parse_unit(text, expected):
    assert parse_unit(text) == expected


@settings(max_examples=50)
@given(st.lists(finite, min_size=8, max_size=8))
def test_array_product_matches_scalar(vals):
    a, b = Quaternion(*vals[:4]), Quaternion(*vals[4:])
    assert np.allclose(qmul_array(a.to_array(), b.to_array()), qmul(a, b).to_array(), rtol=0, atol=1e-12)

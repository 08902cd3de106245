import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaugekit.errors import AntipodalElement, NonUnit
from gaugekit.group import (
    SU2,
    U1,
    Su2Alg,
    det_alg,
    qconj,
    qmul,
    quat_matrix,
    su2_exp,
    su2_log,
    trace_square,
    u1_principal_arg,
    wrap_angle,
)

finite = st.floats(-4.0, 4.0, allow_nan=False)
vec3 = st.tuples(finite, finite, finite)
quat = st.tuples(finite, finite, finite, finite).filter(lambda q: np.linalg.norm(q) > 1e-3)


def test_exp_of_zero_is_identity():
    assert su2_exp(Su2Alg((0, 0, 0))) == SU2.identity()


def test_exp_of_pi_axis_is_minus_one():
    q = su2_exp(Su2Alg((math.pi, 0, 0))).array
    np.testing.assert_allclose(q, [-1, 0, 0, 0], atol=1e-15)


def test_log_identity_and_known_value():
    assert su2_log(SU2.identity()).array.tolist() == [0.0, 0.0, 0.0]
    v = su2_log(su2_exp(Su2Alg((0.3, 0, 0)))).array
    np.testing.assert_allclose(v, [0.3, 0, 0], atol=1e-12)


def test_log_refuses_antipode():
    with pytest.raises(AntipodalElement):
        su2_log(SU2((-1.0, 1e-12, 0, 0)))


@given(vec3)
def test_exp_log_round_trip(v):
    v = np.asarray(v)
    n = np.linalg.norm(v)
    if n >= math.pi - 0.01:
        v = v * (math.pi - 0.01) / n * 0.999
    back = su2_log(su2_exp(Su2Alg(v))).array
    np.testing.assert_allclose(back, v, atol=1e-10)


def test_trace_square_examples():
    xi = Su2Alg((1, 0, 0))  # diag(i, -i)
    np.testing.assert_allclose(xi.matrix(), np.diag([1j, -1j]))
    assert trace_square(xi) == pytest.approx(-2.0, abs=1e-15)
    assert det_alg(xi) == pytest.approx(1.0, abs=1e-15)
    assert trace_square(Su2Alg((0, 0, 0))) == 0.0


@given(vec3)
def test_trace_square_is_minus_twice_det(v):
    xi = Su2Alg(v)
    assert abs(trace_square(xi) + 2 * det_alg(xi)) <= 1e-12 * max(1.0, xi.norm() ** 2)
    assert trace_square(xi) == pytest.approx(-2 * xi.norm() ** 2, abs=1e-12 * max(1.0, xi.norm() ** 2))


@given(quat, quat, quat)
def test_group_axioms(a, b, c):
    g, h, k = SU2(a), SU2(b), SU2(c)
    assert ((g * h) * k).distance(g * (h * k)) <= 1e-12
    assert (g * g.inverse()).distance(SU2.identity()) <= 1e-12
    assert np.linalg.norm((g * h).array) == pytest.approx(1.0, abs=1e-15)


@given(quat, quat)
def test_matrix_picture_is_homomorphism(a, b):
    g, h = SU2(a), SU2(b)
    np.testing.assert_allclose((g * h).matrix(), g.matrix() @ h.matrix(), atol=1e-12)


@given(vec3, quat)
def test_imaginary_quaternion_squares_to_minus_norm(h, v):
    hq = np.r_[0.0, h]
    v = np.asarray(v)
    lhs = qmul(hq, qmul(hq, v))
    np.testing.assert_allclose(lhs, -np.dot(h, h) * v, atol=1e-12 * (1 + np.dot(h, h) * np.linalg.norm(v)))


@given(vec3, vec3)
def test_bracket_matches_matrix_commutator(u, v):
    x, y = Su2Alg(u), Su2Alg(v)
    comm = x.matrix() @ y.matrix() - y.matrix() @ x.matrix()
    np.testing.assert_allclose(x.bracket(y).matrix(), comm, atol=1e-10)


def test_principal_arg_branch():
    assert u1_principal_arg(1.0) == 0.0
    assert u1_principal_arg(-1.0) == math.pi
    assert u1_principal_arg(complex(-1.0, -0.0)) == math.pi
    assert u1_principal_arg(complex(math.cos(0.7), math.sin(0.7))) == pytest.approx(0.7, abs=1e-12)
    with pytest.raises(NonUnit):
        u1_principal_arg(2.0)


@given(st.floats(-50, 50))
def test_wrap_angle_range(t):
    w = wrap_angle(t)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(t), abs_tol=1e-9)


def test_u1_arithmetic():
    a, b = U1(3.0), U1(1.0)
    assert (a * b).angle == pytest.approx(wrap_angle(4.0))
    assert (a * a.inverse()).distance(U1.identity()) < 1e-15


def test_quat_matrix_is_unitary(rng):
    q = rng.normal(size=(10, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    m = quat_matrix(q)
    eye = np.einsum("nij,nkj->nik", m, m.conj())
    np.testing.assert_allclose(eye, np.broadcast_to(np.eye(2), eye.shape), atol=1e-14)
    np.testing.assert_allclose(quat_matrix(qconj(q)), np.conj(np.swapaxes(m, 1, 2)), atol=1e-15)

import math

import numpy as np
import pytest

from odeseries.matcore import (
    MatExpRangeError,
    ShapeError,
    SingularMatrixError,
    as_matrix,
    as_vector,
    mat_det,
    mat_exp,
    mat_inv,
    mat_mul,
)

H_EXAMPLE = np.array([[2.0, 3.0], [-1.0, -2.0]])
M0_EXAMPLE = np.array([[3.0, 1.0], [-1.0, -1.0]])


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        as_matrix([[1.0, float("nan")], [0.0, 1.0]])
    with pytest.raises(ValueError):
        as_vector([float("inf")])


def test_matmul_identity():
    b = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(mat_mul(np.eye(2), b), b)


def test_matmul_hand_product():
    # hand multiplication of the two 2x2 matrices above
    expected = np.array([[3.0, -1.0], [-1.0, 1.0]])
    assert np.allclose(mat_mul(H_EXAMPLE, M0_EXAMPLE), expected, atol=1e-14)


def test_matmul_zero_absorbs():
    b = np.array([[5.0, 6.0], [7.0, 8.0]])
    assert np.array_equal(mat_mul(np.zeros((2, 2)), b), np.zeros((2, 2)))


def test_matmul_shape_error():
    with pytest.raises(ShapeError):
        mat_mul(np.ones((2, 3)), np.ones((2, 2)))


def test_inv_of_fundamental_start():
    expected = 0.5 * np.array([[1.0, 1.0], [-1.0, -3.0]])
    assert np.allclose(mat_inv(M0_EXAMPLE), expected, atol=1e-14)


def test_inv_identity():
    assert np.allclose(mat_inv(np.eye(3)), np.eye(3), atol=1e-14)


def test_inv_singular_carries_det():
    with pytest.raises(SingularMatrixError) as exc:
        mat_inv(np.array([[1.0, 2.0], [2.0, 4.0]]))
    assert abs(exc.value.det) < 1e-10


def test_det_of_fundamental_matrix_is_constant():
    # columns (3e^x, -e^x) and (e^-x, -e^-x): det = -3 + 1 = -2 for every x
    for x in (0.0, 0.3, 1.0):
        m = np.array(
            [[3 * math.exp(x), math.exp(-x)], [-math.exp(x), -math.exp(-x)]]
        )
        assert mat_det(m) == pytest.approx(-2.0, rel=1e-12)


def test_det_trivial():
    assert mat_det(np.eye(4)) == pytest.approx(1.0)
    assert mat_det(np.array([[1.0, 2.0], [1.0, 2.0]])) == pytest.approx(0.0, abs=1e-14)


def test_exp_zero_is_identity():
    assert np.allclose(mat_exp(np.zeros((3, 3))), np.eye(3), atol=1e-15)


def test_exp_diagonal():
    r = mat_exp(np.diag([1.0, 2.0]))
    assert np.allclose(r, np.diag([math.e, math.e**2]), rtol=1e-13)


def _exp_by_eigen(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eig(a)
    return (v @ np.diag(np.exp(w)) @ np.linalg.inv(v)).real


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0])
def test_exp_against_eigen_oracle(t):
    # H has eigenvalues +1 and -1, so the eigen route is well conditioned
    a = t * H_EXAMPLE
    got = mat_exp(a)
    want = _exp_by_eigen(a)
    assert np.max(np.abs(got - want)) <= 1e-12 * max(1.0, np.max(np.abs(want)))


def test_exp_range_error():
    with pytest.raises(MatExpRangeError):
        mat_exp(np.array([[1e4, 0.0], [0.0, 1e4]]))


def test_inverse_roundtrip_property():
    rng = np.random.default_rng(7)
    for _ in range(25):
        n = rng.integers(1, 6)
        a = rng.uniform(-2, 2, (n, n))
        try:
            inv = mat_inv(a)
        except SingularMatrixError:
            continue
        cond = np.linalg.cond(a)
        assert np.max(np.abs(a @ inv - np.eye(n))) <= 1e-10 * max(1.0, cond)


def test_exp_semigroup_property():
    rng = np.random.default_rng(11)
    for _ in range(15):
        a = rng.uniform(-1, 1, (3, 3))
        a *= min(1.0, 5.0 / np.linalg.norm(a, 1))
        s, t = rng.uniform(0, 2, 2)
        lhs = mat_exp((s + t) * a)
        rhs = mat_mul(mat_exp(s * a), mat_exp(t * a))
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1.0, np.max(np.abs(lhs)))


def test_exp_abel_liouville_property():
    rng = np.random.default_rng(13)
    for _ in range(15):
        a = rng.uniform(-1, 1, (3, 3))
        t = rng.uniform(0, 2)
        got = mat_det(mat_exp(t * a))
        want = math.exp(t * np.trace(a))
        assert got == pytest.approx(want, rel=1e-9)


def test_det_multiplicative_property():
    rng = np.random.default_rng(17)
    for _ in range(15):
        a = rng.uniform(-1, 1, (4, 4)) + 2 * np.eye(4)
        b = rng.uniform(-1, 1, (4, 4)) + 2 * np.eye(4)
        assert mat_det(mat_mul(a, b)) == pytest.approx(mat_det(a) * mat_det(b), rel=1e-9)

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from divalg import (
    Algebra,
    ConvergenceError,
    SingularOperatorError,
    ZeroDivisorError,
    find_idempotent,
    hurwitz,
    isotope,
    left_divide,
    left_mul,
    multiply,
    right_divide,
    right_mul,
    star_product,
)
from divalg.algebra import conjugate_by, dumps, hua_check, opposite

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def test_constructor_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Algebra(np.zeros((2, 2, 3)))
    with pytest.raises(ValueError):
        Algebra(np.full((1, 1, 1), np.nan))
    with pytest.raises(ValueError):
        Algebra(np.ones((1, 1, 1)), labels=["a", "b"])


def test_constants_are_read_only():
    A = hurwitz(2)
    with pytest.raises(ValueError):
        A.constants[0, 0, 0] = 5.0


def test_json_round_trip_keeps_17_digits():
    A = isotope(hurwitz(4), np.diag([1.0, 1 / 3, 2.0, 1.0]), np.eye(4))
    B = Algebra.from_dict(json.loads(dumps(A.to_dict())))
    assert np.array_equal(A.constants, B.constants)
    assert B.labels == A.labels


def test_from_dict_checks_dim():
    with pytest.raises(ValueError):
        Algebra.from_dict({"dim": 3, "constants": np.zeros((2, 2, 2)).tolist()})
    with pytest.raises(ValueError):
        Algebra.from_dict({"dim": 2})


@given(seeds)
def test_operators_match_multiply(seed):
    rng = np.random.default_rng(seed)
    O = hurwitz(8)
    a, x = rng.standard_normal((2, 8))
    assert np.allclose(left_mul(O, a) @ x, multiply(O, a, x))
    assert np.allclose(right_mul(O, a) @ x, multiply(O, x, a))


def test_stacked_multiply_matches_rows(rng):
    O = hurwitz(8)
    X, Y = rng.standard_normal((2, 5, 8))
    stacked = multiply(O, X, Y)
    for k in range(5):
        assert np.allclose(stacked[k], multiply(O, X[k], Y[k]))


@given(seeds)
def test_divisions_invert_products(seed):
    rng = np.random.default_rng(seed)
    O = hurwitz(8)
    a, y = rng.standard_normal((2, 8))
    assert np.allclose(multiply(O, a, left_divide(O, a, y)), y)
    assert np.allclose(multiply(O, right_divide(O, y, a), a), y)


def test_division_by_zero():
    H = hurwitz(4)
    with pytest.raises(ZeroDivisorError):
        left_divide(H, np.zeros(4), np.ones(4))


def test_singular_isotope_rejected():
    H = hurwitz(4)
    with pytest.raises(SingularOperatorError):
        isotope(H, np.diag([1.0, 1.0, 1.0, 0.0]), np.eye(4))


def test_isotope_product(rng):
    H = hurwitz(4)
    alpha, beta = rng.standard_normal((2, 4, 4))
    A = isotope(H, alpha, beta)
    x, y = rng.standard_normal((2, 4))
    assert np.allclose(multiply(A, x, y), multiply(H, alpha @ x, beta @ y))


def test_opposite_and_conjugate(rng):
    O = hurwitz(8)
    x, y = rng.standard_normal((2, 8))
    assert np.allclose(multiply(opposite(O), x, y), multiply(O, y, x))
    phi = rng.standard_normal((8, 8))
    B = conjugate_by(O, phi)
    assert np.allclose(multiply(B, phi @ x, phi @ y), phi @ multiply(O, x, y))


def test_idempotent_and_star_product_recover_unit(rng):
    H = hurwitz(4)
    A = isotope(H, rng.standard_normal((4, 4)) + 3 * np.eye(4), rng.standard_normal((4, 4)) + 3 * np.eye(4))
    e = find_idempotent(A, seed=1)
    assert np.allclose(multiply(A, e, e), e, atol=1e-9)
    S = star_product(A, e)
    x = rng.standard_normal(4)
    assert np.allclose(multiply(S, e, x), x, atol=1e-9)
    assert np.allclose(multiply(S, x, e), x, atol=1e-9)
    # the star product of an isotope of the quaternions is associative
    x, y, z = rng.standard_normal((3, 4))
    assert np.allclose(multiply(S, multiply(S, x, y), z), multiply(S, x, multiply(S, y, z)), atol=1e-9)


def test_no_idempotent_raises_convergence_error():
    # x o y = -xy on the reals has the idempotent -1, but x o y = 0 has none
    A = Algebra(np.zeros((1, 1, 1)))
    with pytest.raises(ConvergenceError):
        find_idempotent(A, max_restarts=3)


@given(seeds)
def test_hua_on_octonions(seed):
    rng = np.random.default_rng(seed)
    O = hurwitz(8)
    a, b = rng.standard_normal((2, 8))
    assert hua_check(O, a, b) < 1e-9

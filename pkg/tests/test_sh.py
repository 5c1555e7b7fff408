from fractions import Fraction
from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irrepcore import eval_sh, eval_sh_single, eval_solid_sh, sh_index
from irrepcore.limits import CapacityError
from irrepcore.sh import PiPolynomial, index_lm, sh_tables

from oracles import sh_matrix, sphere_quadrature

Y00 = 1 / (2 * sqrt(pi))
Y1 = sqrt(3 / (4 * pi))


def test_listed_closed_forms_along_z():
    values = eval_sh([0, 0, 1], 1).values
    np.testing.assert_allclose(values, [Y00, 0, 0, Y1], atol=1e-15)


def test_scale_invariance():
    np.testing.assert_allclose(
        eval_sh([2, 0, 0], 1).values, [Y00, Y1, 0, 0], atol=1e-15
    )
    r = np.array([0.3, -1.2, 0.7])
    np.testing.assert_allclose(
        eval_sh(17.5 * r, 6).values, eval_sh(r, 6).values, atol=1e-14
    )


def test_degree_one_block_is_xyz_ordered(rng):
    r = rng.standard_normal(3)
    expected = Y1 * r / np.linalg.norm(r)
    np.testing.assert_allclose(eval_sh(r, 1).values[1:4], expected, rtol=1e-14)


def test_parity_is_exact(rng):
    r = rng.standard_normal(3)
    plus = eval_sh(r, 7).values
    minus = eval_sh(-r, 7).values
    for l in range(8):
        block = slice(l * l, (l + 1) ** 2)
        assert np.array_equal(minus[block], (-1) ** l * plus[block])


def test_addition_theorem_norm(rng):
    for _ in range(25):
        values = eval_sh(rng.standard_normal(3), 8).values
        for l in range(9):
            block = values[l * l:(l + 1) ** 2]
            assert abs(block @ block - (2 * l + 1) / (4 * pi)) < 1e-12


def test_orthonormality_under_exact_quadrature():
    points, weights = sphere_quadrature(16)
    ys = sh_matrix(points, 8)
    gram = ys.T @ (weights[:, None] * ys)
    assert np.abs(gram - np.eye(81)).max() < 1e-10


def test_rotation_equivariance(table8, rng):
    from irrepcore import random_rotation, wigner_d

    worst = 0.0
    for _ in range(100):
        g = random_rotation(rng)
        d = wigner_d(g, 8, table8)
        r = rng.standard_normal(3)
        lhs = eval_sh(g.rotation @ r, 8).values
        rhs = d.apply_flat(eval_sh(r, 8).values)
        worst = max(worst, np.abs(lhs - rhs).max())
    assert worst < 1e-10


def test_zero_vector_rejected():
    with pytest.raises(ValueError, match="zero vector"):
        eval_sh([0.0, 0.0, 0.0], 1)
    with pytest.raises(ValueError):
        eval_sh(np.full(3, 1e-17), 2)


def test_single_matches_full(rng):
    r = rng.standard_normal(3)
    full = eval_sh(r, 5).values
    for l in range(6):
        for m in range(-l, l + 1):
            assert eval_sh_single(l, m, r) == full[sh_index(l, m)]


def test_single_closed_forms():
    r = np.array([1.0, 1.0, 0.0]) / sqrt(2)
    expected = sqrt(5 / (4 * pi)) * sqrt(3) * 0.5
    assert abs(eval_sh_single(2, -2, r) - expected) < 1e-14
    assert abs(eval_sh_single(0, 0, [0.1, 2.0, -3.0]) - Y00) < 1e-15


def test_order_out_of_range():
    with pytest.raises(ValueError, match="out of range"):
        eval_sh_single(3, 4, [0, 0, 1])
    with pytest.raises(ValueError):
        sh_index(2, -3)


def test_solid_at_origin():
    values = eval_solid_sh([0.0, 0.0, 0.0], 2).values
    expected = np.zeros(9)
    expected[0] = Y00
    np.testing.assert_array_equal(values, expected)


def test_solid_scaling():
    np.testing.assert_allclose(
        eval_solid_sh([0, 0, 2], 1).values, [Y00, 0, 0, 2 * Y1], atol=1e-15
    )


def test_solid_equals_sh_on_unit_vectors(rng):
    r = rng.standard_normal(3)
    r /= np.linalg.norm(r)
    np.testing.assert_allclose(
        eval_solid_sh(r, 6).values, eval_sh(r, 6).values, atol=1e-14
    )


@settings(max_examples=50, deadline=None)
@given(
    st.tuples(*[st.floats(-10, 10) for _ in range(3)]).filter(
        lambda t: sum(x * x for x in t) > 1e-4
    ),
    st.floats(0.1, 3.0),
)
def test_solid_is_homogeneous(r, scale):
    base = eval_solid_sh(np.array(r), 4).values
    scaled = eval_solid_sh(scale * np.array(r), 4).values
    for l in range(5):
        block = slice(l * l, (l + 1) ** 2)
        np.testing.assert_allclose(
            scaled[block], scale**l * base[block], rtol=1e-12, atol=1e-14
        )


def test_index_round_trip():
    for i in range(144):
        l, m = index_lm(i)
        assert sh_index(l, m) == i
    # storage order within a block: m = l, -l, l-1, -l+1, ..., 0
    assert [index_lm(i)[1] for i in range(4, 9)] == [2, -2, 1, -1, 0]


def test_pi_polynomial_term_count_and_values():
    for l in range(7):
        for m in range(l + 1):
            poly = PiPolynomial.build(l, m)
            assert len(poly.coefficients) == (l - m) // 2 + 1
    # hand-checked low-degree cases (with the 1/2**l folded in)
    assert PiPolynomial.build(1, 0).coefficients == ((0, Fraction(1)),)
    assert PiPolynomial.build(2, 0).coefficients == (
        (0, Fraction(3, 2)), (1, Fraction(-1, 2)),
    )
    assert PiPolynomial.build(1, 1).coefficients == ((0, Fraction(1)),)
    assert abs(PiPolynomial.build(2, 0)(0.5, 1.0) - (1.5 * 0.25 - 0.5)) < 1e-15


def test_degree_capacity_enforced():
    with pytest.raises(CapacityError):
        sh_tables(9)
    with pytest.raises(CapacityError):
        eval_sh([0, 0, 1], 99)


def test_capacity_env_override(monkeypatch):
    monkeypatch.setenv("IRREPCORE_MAX_L", "2")
    sh_tables.cache_clear()
    try:
        with pytest.raises(CapacityError):
            eval_sh([0, 0, 1], 3)
        assert eval_sh([0, 0, 1], 2).values.shape == (9,)
    finally:
        sh_tables.cache_clear()
    monkeypatch.setenv("IRREPCORE_MAX_L", "banana")
    with pytest.raises(ValueError, match="integer"):
        eval_sh([0, 0, 1], 1)
    monkeypatch.setenv("IRREPCORE_MAX_L", "40")
    with pytest.raises(ValueError, match="range"):
        eval_sh([0, 0, 1], 1)
